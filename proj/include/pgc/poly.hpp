#ifndef PGC_POLY_HPP
#define PGC_POLY_HPP

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace pgc {

enum class MulBackend { kNaive, kFft, kAuto };

// Operands whose smaller degree is at most this use schoolbook
// multiplication under MulBackend::kAuto.
inline constexpr std::size_t kFftThreshold = 64;

/// Dense univariate polynomial in t over the reals, truncated at a maximum
/// degree `cap`. Coefficients above the cap are discarded by every
/// operation, so a Poly is an element of R[t]/(t^(cap+1)).
///
/// Trailing zero coefficients are trimmed; the zero polynomial has an empty
/// coefficient vector and degree -1.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::size_t cap) : cap_(cap) {}
  Poly(std::vector<double> coeffs, std::size_t cap);

  static Poly constant(double value, std::size_t cap);
  /// value * t^power (zero if power > cap).
  static Poly monomial(double value, std::size_t power, std::size_t cap);

  std::size_t cap() const { return cap_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }

  /// Coefficient of t^k; zero past the degree.
  double coef(std::size_t k) const {
    return k < coeffs_.size() ? coeffs_[k] : 0.0;
  }
  std::span<const double> coeffs() const { return coeffs_; }

  /// Horner evaluation at a complex point.
  std::complex<double> at(std::complex<double> x) const;
  double at(double x) const;

  /// Same polynomial viewed in a ring with a different cap.
  Poly with_cap(std::size_t cap) const;

  /// In-place acc += weight * x, for accumulating weighted sums.
  void add_scaled(const Poly& x, double weight);

  friend bool operator==(const Poly&, const Poly&) = default;

 private:
  void trim();

  std::vector<double> coeffs_;
  std::size_t cap_ = 0;
};

Poly add(const Poly& a, const Poly& b);
Poly sub(const Poly& a, const Poly& b);
Poly scale(const Poly& a, double c);
Poly mul(const Poly& a, const Poly& b, MulBackend backend = MulBackend::kAuto);

inline Poly operator+(const Poly& a, const Poly& b) { return add(a, b); }
inline Poly operator-(const Poly& a, const Poly& b) { return sub(a, b); }
inline Poly operator*(const Poly& a, const Poly& b) { return mul(a, b); }
inline Poly operator*(double c, const Poly& a) { return scale(a, c); }

/// Largest absolute coefficient difference (caps may differ).
double max_abs_diff(const Poly& a, const Poly& b);

}  // namespace pgc

#endif  // PGC_POLY_HPP
