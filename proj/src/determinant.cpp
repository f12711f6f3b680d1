#include "pgc/determinant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pgc/errors.hpp"

namespace pgc {

PolyMatrix::PolyMatrix(std::size_t n, std::size_t cap)
    : n_(n), cap_(cap), entries_(n * n, Poly(cap)) {}

int PolyMatrix::degree_bound() const {
  int by_rows = 0;
  int by_cols = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    int row_max = -1;
    int col_max = -1;
    for (std::size_t j = 0; j < n_; ++j) {
      row_max = std::max(row_max, (*this)(i, j).degree());
      col_max = std::max(col_max, (*this)(j, i).degree());
    }
    if (row_max < 0 || col_max < 0) return -1;
    by_rows += row_max;
    by_cols += col_max;
  }
  return std::min(by_rows, by_cols);
}

double det_numeric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw ContractViolation("det_numeric: matrix is not square");
  }
  if (m.rows() == 0) return 1.0;
  return Eigen::PartialPivLU<Eigen::MatrixXd>(m).determinant();
}

std::complex<double> det_numeric(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) {
    throw ContractViolation("det_numeric: matrix is not square");
  }
  if (m.rows() == 0) return 1.0;
  return Eigen::PartialPivLU<Eigen::MatrixXcd>(m).determinant();
}

Poly det_bird(const PolyMatrix& m) {
  const std::size_t n = m.rows();
  const std::size_t cap = m.cap();
  if (n == 0) return Poly::constant(1.0, cap);
  if (n == 1) return m(0, 0);

  // Only the upper triangle (diagonal included) of each iterate feeds mu(),
  // so the strict lower triangle is never formed.
  PolyMatrix x = m;
  std::vector<Poly> diag(n, Poly(cap));
  for (std::size_t step = 1; step < n; ++step) {
    // diag[i] = -(x_{i+1,i+1} + ... + x_{n-1,n-1})
    Poly suffix(cap);
    for (std::size_t i = n; i-- > 0;) {
      diag[i] = scale(suffix, -1.0);
      suffix.add_scaled(x(i, i), 1.0);
    }
    const bool last = step + 1 == n;
    PolyMatrix y(n, cap);
    const std::size_t row_end = last ? 1 : n;
    for (std::size_t i = 0; i < row_end; ++i) {
      const std::size_t col_end = last ? 1 : n;
      for (std::size_t j = i; j < col_end; ++j) {
        Poly acc = mul(diag[i], m(i, j));
        for (std::size_t k = i + 1; k < n; ++k) {
          if (x(i, k).is_zero() || m(k, j).is_zero()) continue;
          acc.add_scaled(mul(x(i, k), m(k, j)), 1.0);
        }
        y(i, j) = std::move(acc);
      }
    }
    x = std::move(y);
  }
  return (n % 2 == 1) ? x(0, 0) : scale(x(0, 0), -1.0);
}

Poly det_evalinterp(const PolyMatrix& m) {
  const std::size_t n = m.rows();
  const std::size_t cap = m.cap();
  if (n == 0) return Poly::constant(1.0, cap);
  const int bound = m.degree_bound();
  if (bound < 0) return Poly(cap);

  const auto points = static_cast<std::size_t>(bound) + 1;
  std::vector<std::complex<double>> roots(points);
  for (std::size_t p = 0; p < points; ++p) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(p) /
                         static_cast<double>(points);
    roots[p] = {std::cos(angle), std::sin(angle)};
  }

  // Points are evaluated in a fixed order so the inverse DFT sums are
  // reproducible.
  std::vector<std::complex<double>> values(points);
  Eigen::MatrixXcd at(n, n);
  for (std::size_t p = 0; p < points; ++p) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        at(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            m(i, j).at(roots[p]);
      }
    }
    values[p] = det_numeric(at);
  }

  const std::size_t keep = std::min(points, cap + 1);
  std::vector<double> coeffs(keep);
  for (std::size_t k = 0; k < keep; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t p = 0; p < points; ++p) {
      // root^{-k} for root index p is the conjugate of roots[(k p) mod D].
      acc += values[p] * std::conj(roots[(k * p) % points]);
    }
    coeffs[k] = acc.real() / static_cast<double>(points);
  }
  return Poly(std::move(coeffs), cap);
}

Poly det_ring(const PolyMatrix& m, DetBackend backend, bool cross_check) {
  Poly primary =
      backend == DetBackend::kBird ? det_bird(m) : det_evalinterp(m);
  if (cross_check) {
    const Poly other =
        backend == DetBackend::kBird ? det_evalinterp(m) : det_bird(m);
    double magnitude = 1.0;
    for (double c : primary.coeffs()) magnitude = std::max(magnitude, std::abs(c));
    const double diff = max_abs_diff(primary, other);
    if (!(diff <= kDetCrossCheckTolerance * magnitude)) {
      throw InternalConsistencyError(
          "det_ring: bird and evalinterp disagree by " + std::to_string(diff));
    }
  }
  return primary;
}

}  // namespace pgc
