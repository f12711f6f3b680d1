#include "pgc/poly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pgc/errors.hpp"
#include "pgc/fft.hpp"

namespace pgc {
namespace {

void require_same_cap(const Poly& a, const Poly& b, const char* op) {
  if (a.cap() != b.cap()) {
    throw ContractViolation(std::string(op) + ": cap mismatch (" +
                            std::to_string(a.cap()) + " vs " +
                            std::to_string(b.cap()) + ")");
  }
}

std::vector<double> naive_product(std::span<const double> a,
                                  std::span<const double> b, std::size_t cap) {
  const std::size_t len = std::min(a.size() + b.size() - 1, cap + 1);
  std::vector<double> out(len, 0.0);
  for (std::size_t i = 0; i < a.size() && i < len; ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    const std::size_t jmax = std::min(b.size(), len - i);
    for (std::size_t j = 0; j < jmax; ++j) out[i + j] += ai * b[j];
  }
  return out;
}

}  // namespace

Poly::Poly(std::vector<double> coeffs, std::size_t cap)
    : coeffs_(std::move(coeffs)), cap_(cap) {
  if (coeffs_.size() > cap_ + 1) coeffs_.resize(cap_ + 1);
  trim();
}

Poly Poly::constant(double value, std::size_t cap) {
  return Poly(std::vector<double>{value}, cap);
}

Poly Poly::monomial(double value, std::size_t power, std::size_t cap) {
  if (power > cap) return Poly(cap);
  std::vector<double> c(power + 1, 0.0);
  c[power] = value;
  return Poly(std::move(c), cap);
}

std::complex<double> Poly::at(std::complex<double> x) const {
  std::complex<double> acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * x + *it;
  }
  return acc;
}

double Poly::at(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * x + *it;
  }
  return acc;
}

Poly Poly::with_cap(std::size_t cap) const { return Poly(coeffs_, cap); }

void Poly::add_scaled(const Poly& x, double weight) {
  require_same_cap(*this, x, "Poly::add_scaled");
  if (weight == 0.0 || x.is_zero()) return;
  if (coeffs_.size() < x.coeffs_.size()) coeffs_.resize(x.coeffs_.size(), 0.0);
  for (std::size_t i = 0; i < x.coeffs_.size(); ++i) {
    coeffs_[i] += weight * x.coeffs_[i];
  }
  trim();
}

void Poly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

Poly add(const Poly& a, const Poly& b) {
  require_same_cap(a, b, "add");
  Poly out = a;
  out.add_scaled(b, 1.0);
  return out;
}

Poly sub(const Poly& a, const Poly& b) {
  require_same_cap(a, b, "sub");
  Poly out = a;
  out.add_scaled(b, -1.0);
  return out;
}

Poly scale(const Poly& a, double c) {
  if (c == 0.0) return Poly(a.cap());
  std::vector<double> out(a.coeffs().begin(), a.coeffs().end());
  for (double& v : out) v *= c;
  return Poly(std::move(out), a.cap());
}

Poly mul(const Poly& a, const Poly& b, MulBackend backend) {
  require_same_cap(a, b, "mul");
  if (a.is_zero() || b.is_zero()) return Poly(a.cap());
  if (backend == MulBackend::kAuto) {
    const auto smaller =
        static_cast<std::size_t>(std::min(a.degree(), b.degree())) + 1;
    backend = smaller <= kFftThreshold ? MulBackend::kNaive : MulBackend::kFft;
  }
  if (backend == MulBackend::kNaive) {
    return Poly(naive_product(a.coeffs(), b.coeffs(), a.cap()), a.cap());
  }
  return Poly(fft::convolve(a.coeffs(), b.coeffs(), a.cap() + 1), a.cap());
}

double max_abs_diff(const Poly& a, const Poly& b) {
  const std::size_t len = std::max(a.coeffs().size(), b.coeffs().size());
  double worst = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    worst = std::max(worst, std::abs(a.coef(k) - b.coef(k)));
  }
  return worst;
}

}  // namespace pgc
