#include "pgc/fft.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "pgc/errors.hpp"

namespace pgc::fft {
namespace {

// Per-stage twiddles e^{-2 pi i k / len}, k < len/2, stored contiguously at
// offset len/2 - 1 for every span len up to the largest size seen, real and
// imaginary parts apart. Entries are computed directly rather than by
// recurrence to keep rounding error flat. Stages do not depend on the
// transform size, so one table serves every smaller size too.
struct TwiddleTable {
  std::size_t n = 1;
  std::vector<double> re;
  std::vector<double> im;
};

const TwiddleTable& twiddles(std::size_t n) {
  thread_local TwiddleTable table;
  if (table.n < n) {
    table.re.resize(n - 1);
    table.im.resize(n - 1);
    for (std::size_t half = table.n; half < n; half <<= 1) {
      for (std::size_t k = 0; k < half; ++k) {
        const double angle = -std::numbers::pi * static_cast<double>(k) /
                             static_cast<double>(half);
        table.re[half - 1 + k] = std::cos(angle);
        table.im[half - 1 + k] = std::sin(angle);
      }
    }
    table.n = n;
  }
  return table;
}

// Bit-reversal permutation of size n, one cached table per size (a
// convolution alternates two sizes).
const std::vector<std::uint32_t>& bit_reversal(std::size_t n) {
  thread_local std::array<std::vector<std::uint32_t>, 64> tables;
  auto& rev = tables[static_cast<std::size_t>(std::countr_zero(n))];
  if (rev.size() != n) {
    rev.assign(n, 0);
    for (std::size_t i = 1, j = 0; i < n; ++i) {
      std::size_t bit = n >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      rev[i] = static_cast<std::uint32_t>(j);
    }
  }
  return rev;
}

// One block of butterflies for a stage of span 2 * half.
inline void butterflies(double* __restrict ar, double* __restrict ai, double* __restrict br,
                        double* __restrict bi, const double* __restrict wr,
                        const double* __restrict wi, std::size_t half, double sign) {
  for (std::size_t k = 0; k < half; ++k) {
    const double ti = sign * wi[k];
    const double vr = br[k] * wr[k] - bi[k] * ti;
    const double vi = br[k] * ti + bi[k] * wr[k];
    br[k] = ar[k] - vr;
    bi[k] = ai[k] - vi;
    ar[k] += vr;
    ai[k] += vi;
  }
}

// Two consecutive stages, spans 2 * half and 4 * half, in one sweep over a
// block of 4 * half points (quarters 0..3). Same arithmetic as two radix-2
// passes with half the loads and stores.
inline void butterflies2(double* __restrict r0, double* __restrict i0, double* __restrict r1,
                         double* __restrict i1, double* __restrict r2, double* __restrict i2,
                         double* __restrict r3, double* __restrict i3,
                         const double* __restrict w1r, const double* __restrict w1i,
                         const double* __restrict w2r, const double* __restrict w2i,
                         std::size_t half, double sign) {
  for (std::size_t k = 0; k < half; ++k) {
    const double t1 = sign * w1i[k];
    const double ar = r1[k] * w1r[k] - i1[k] * t1;
    const double ai = r1[k] * t1 + i1[k] * w1r[k];
    const double br = r3[k] * w1r[k] - i3[k] * t1;
    const double bi = r3[k] * t1 + i3[k] * w1r[k];
    const double y0r = r0[k] + ar, y0i = i0[k] + ai;
    const double y1r = r0[k] - ar, y1i = i0[k] - ai;
    const double y2r = r2[k] + br, y2i = i2[k] + bi;
    const double y3r = r2[k] - br, y3i = i2[k] - bi;
    const double t2 = sign * w2i[k];
    const double cr = y2r * w2r[k] - y2i * t2;
    const double ci = y2r * t2 + y2i * w2r[k];
    const double dr = y3r * w2r[k] - y3i * t2;
    const double di = y3r * t2 + y3i * w2r[k];
    // The second pair's twiddle is the first one times -i (i for the
    // inverse).
    const double er = sign * di, ei = -sign * dr;
    r0[k] = y0r + cr;
    i0[k] = y0i + ci;
    r2[k] = y0r - cr;
    i2[k] = y0i - ci;
    r1[k] = y1r + er;
    i1[k] = y1i + ei;
    r3[k] = y1r - er;
    i3[k] = y1i - ei;
  }
}

// Radix-2 decimation in time on split storage, which lets the butterfly
// loops vectorize; out of place, reading the input in bit-reversed order
// during the first two stages. The inverse conjugates the twiddles and is
// unscaled.
void transform_split(const double* __restrict in_re, const double* __restrict in_im,
                     double* __restrict re, double* __restrict im, std::size_t n,
                     bool inverse) {
  if (n == 1) {
    re[0] = in_re[0];
    im[0] = in_im[0];
    return;
  }
  if (n == 2) {
    re[0] = in_re[0] + in_re[1];
    im[0] = in_im[0] + in_im[1];
    re[1] = in_re[0] - in_re[1];
    im[1] = in_im[0] - in_im[1];
    return;
  }
  // Spans 2 and 4 as one 4-point transform per block. For s a multiple of
  // 4, rev(s + 1), rev(s + 2), rev(s + 3) are rev(s) plus n/2, n/4, 3n/4.
  const double sign = inverse ? -1.0 : 1.0;
  const auto& rev = bit_reversal(n);
  const std::size_t q = n / 4;
  for (std::size_t s = 0; s < n; s += 4) {
    const std::size_t r = rev[s];
    const double x0r = in_re[r], x0i = in_im[r];
    const double x1r = in_re[r + 2 * q], x1i = in_im[r + 2 * q];
    const double x2r = in_re[r + q], x2i = in_im[r + q];
    const double x3r = in_re[r + 3 * q], x3i = in_im[r + 3 * q];
    const double y0r = x0r + x1r, y0i = x0i + x1i;
    const double y1r = x0r - x1r, y1i = x0i - x1i;
    const double y2r = x2r + x3r, y2i = x2i + x3i;
    // (x2 - x3) times -i (i for the inverse)
    const double y3r = sign * (x2i - x3i), y3i = -sign * (x2r - x3r);
    re[s] = y0r + y2r;
    im[s] = y0i + y2i;
    re[s + 2] = y0r - y2r;
    im[s + 2] = y0i - y2i;
    re[s + 1] = y1r + y3r;
    im[s + 1] = y1i + y3i;
    re[s + 3] = y1r - y3r;
    im[s + 3] = y1i - y3i;
  }
  const auto& table = twiddles(n);
  std::size_t half = 4;
  for (; 4 * half <= n; half *= 4) {
    const double* w1r = table.re.data() + (half - 1);
    const double* w1i = table.im.data() + (half - 1);
    const double* w2r = table.re.data() + (2 * half - 1);
    const double* w2i = table.im.data() + (2 * half - 1);
    for (std::size_t s = 0; s < n; s += 4 * half) {
      double* r = re + s;
      double* i = im + s;
      butterflies2(r, i, r + half, i + half, r + 2 * half, i + 2 * half, r + 3 * half,
                   i + 3 * half, w1r, w1i, w2r, w2i, half, sign);
    }
  }
  if (half < n) {
    const double* wr = table.re.data() + (half - 1);
    const double* wi = table.im.data() + (half - 1);
    for (std::size_t s = 0; s < n; s += 2 * half) {
      butterflies(re + s, im + s, re + s + half, im + s + half, wr, wi, half, sign);
    }
  }
}

}  // namespace

void transform(std::span<std::complex<double>> data, bool inverse) {
  const std::size_t n = data.size();
  if (n <= 1) return;
  if (!std::has_single_bit(n)) {
    throw ContractViolation("fft::transform: size must be a power of two");
  }
  std::vector<double> in_re(n), in_im(n), re(n), im(n);
  for (std::size_t i = 0; i < n; ++i) {
    in_re[i] = data[i].real();
    in_im[i] = data[i].imag();
  }
  transform_split(in_re.data(), in_im.data(), re.data(), im.data(), n, inverse);
  for (std::size_t i = 0; i < n; ++i) data[i] = {re[i], im[i]};
}

std::vector<double> convolve(std::span<const double> a,
                             std::span<const double> b, std::size_t keep) {
  if (a.empty() || b.empty() || keep == 0) return {};
  // Coefficients past `keep` cannot reach a kept output.
  a = a.first(std::min(a.size(), keep));
  b = b.first(std::min(b.size(), keep));
  const std::size_t full = a.size() + b.size() - 1;
  const std::size_t out_len = std::min(full, keep);

  // A cyclic transform of size n folds c_t onto c_{t-n} for t >= n. When
  // only a few terms overflow half the padded size, the half-size transform
  // is used and those top terms are computed directly.
  std::size_t n = std::max<std::size_t>(4, std::bit_ceil(full));
  if (n / 2 >= 4 && full > n / 2) {
    const std::size_t over = full - n / 2;
    if (over * over <= n / 2) n /= 2;
  }
  const std::size_t h = n / 2;

  // Forward: z = a + i b in one transform (inputs folded mod n); the
  // spectra A and B follow from conjugate symmetry.
  thread_local std::vector<double> ar_, ai_, zr, zi, xr, xi, qr, qi, pr, pi;
  ar_.assign(n, 0.0);
  ai_.assign(n, 0.0);
  for (auto* v : {&zr, &zi, &xr, &xi}) v->resize(n);
  for (auto* v : {&qr, &qi, &pr, &pi}) v->resize(h);
  const std::size_t a_low = std::min(a.size(), n), b_low = std::min(b.size(), n);
  std::copy(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(a_low), ar_.begin());
  std::copy(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(b_low), ai_.begin());
  for (std::size_t i = n; i < a.size(); ++i) ar_[i - n] += a[i];
  for (std::size_t i = n; i < b.size(); ++i) ai_[i - n] += b[i];
  transform_split(ar_.data(), ai_.data(), zr.data(), zi.data(), n, false);

  // Spectrum at -k, so the combination below reads every array in order.
  xr[0] = zr[0];
  xi[0] = zi[0];
  for (std::size_t k = 1; k < n; ++k) {
    xr[k] = zr[n - k];
    xi[k] = zi[n - k];
  }

  // Inverse of the real product p = A B through a half-size transform of
  // q_m = p_{2m} + i p_{2m+1}: Q_k = E_k + i O_k with
  // E_k = (P_k + P_{k+h}) / 2 and O_k = (P_k - P_{k+h}) / (2 w^k),
  // w = e^{-2 pi i / n}. Spectra of the inputs: A = (Z_k + conj Z_{-k}) / 2,
  // B = (Z_k - conj Z_{-k}) / (2i).
  const auto& table = twiddles(n);
  const double* wr = table.re.data() + (h - 1);
  const double* wi = table.im.data() + (h - 1);
  for (std::size_t k = 0; k < h; ++k) {
    const std::size_t u = k + h;
    const double a0r = 0.5 * (zr[k] + xr[k]), a0i = 0.5 * (zi[k] - xi[k]);
    const double b0r = 0.5 * (zi[k] + xi[k]), b0i = -0.5 * (zr[k] - xr[k]);
    const double a1r = 0.5 * (zr[u] + xr[u]), a1i = 0.5 * (zi[u] - xi[u]);
    const double b1r = 0.5 * (zi[u] + xi[u]), b1i = -0.5 * (zr[u] - xr[u]);
    const double p0r = a0r * b0r - a0i * b0i, p0i = a0r * b0i + a0i * b0r;
    const double p1r = a1r * b1r - a1i * b1i, p1i = a1r * b1i + a1i * b1r;
    const double er = 0.5 * (p0r + p1r), ei = 0.5 * (p0i + p1i);
    const double dr = 0.5 * (p0r - p1r), di = 0.5 * (p0i - p1i);
    // O = d * conj(w^k)
    const double orr = dr * wr[k] + di * wi[k];
    const double oi = di * wr[k] - dr * wi[k];
    qr[k] = er - oi;
    qi[k] = ei + orr;
  }
  transform_split(qr.data(), qi.data(), pr.data(), pi.data(), h, true);

  std::vector<double> out(out_len);
  const double inv_h = 1.0 / static_cast<double>(h);
  const std::size_t direct = std::min(out_len, n);
  for (std::size_t m = 0; 2 * m < direct; ++m) {
    out[2 * m] = pr[m] * inv_h;
    if (2 * m + 1 < direct) out[2 * m + 1] = pi[m] * inv_h;
  }
  for (std::size_t t = n; t < full; ++t) {
    double c = 0.0;
    const std::size_t lo = t >= b.size() ? t - (b.size() - 1) : 0;
    const std::size_t hi = std::min(a.size() - 1, t);
    for (std::size_t i = lo; i <= hi; ++i) c += a[i] * b[t - i];
    if (t - n < out_len) out[t - n] -= c;
    if (t < out_len) out[t] = c;
  }
  return out;
}

}  // namespace pgc::fft
