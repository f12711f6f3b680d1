#ifndef PGC_DETERMINANT_HPP
#define PGC_DETERMINANT_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "pgc/poly.hpp"

namespace pgc {

/// Square matrix with entries in R[t] (all sharing one cap), row-major.
class PolyMatrix {
 public:
  PolyMatrix(std::size_t n, std::size_t cap);

  std::size_t rows() const { return n_; }
  std::size_t cap() const { return cap_; }

  Poly& operator()(std::size_t i, std::size_t j) { return entries_[i * n_ + j]; }
  const Poly& operator()(std::size_t i, std::size_t j) const {
    return entries_[i * n_ + j];
  }

  /// Upper bound on the degree of the determinant: the smaller of the sum of
  /// per-row maximum degrees and the sum of per-column maximum degrees.
  /// Returns -1 when some row or column is identically zero.
  int degree_bound() const;

 private:
  std::size_t n_;
  std::size_t cap_;
  std::vector<Poly> entries_;
};

enum class DetBackend { kBird, kEvalInterp };

/// LU with partial pivoting; singular matrices give 0.
double det_numeric(const Eigen::MatrixXd& m);
std::complex<double> det_numeric(const Eigen::MatrixXcd& m);

/// Division-free determinant (Bird's algorithm): n-1 products of the form
/// mu(X) * M, where mu keeps the strict upper triangle of X, zeroes the
/// strict lower triangle and puts -(X_{i+1,i+1} + ... + X_{n-1,n-1}) on
/// the diagonal. det M = (-1)^(n-1) times the (0,0) entry of the last
/// iterate. Works in the truncated ring, so entries above the cap never
/// need to be formed.
Poly det_bird(const PolyMatrix& m);

/// Evaluates the numeric determinant at D = degree_bound() + 1 roots of
/// unity, recovers the coefficients by an inverse DFT and keeps real parts.
Poly det_evalinterp(const PolyMatrix& m);

inline constexpr double kDetCrossCheckTolerance = 1e-7;

/// Determinant over R[t]. With cross_check set, both backends run and an
/// InternalConsistencyError is thrown if they differ by more than
/// kDetCrossCheckTolerance (scaled by the largest coefficient when that
/// exceeds one).
Poly det_ring(const PolyMatrix& m, DetBackend backend,
              bool cross_check = false);

}  // namespace pgc

#endif  // PGC_DETERMINANT_HPP
