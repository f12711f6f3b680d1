#include <doctest.h>

#include <complex>
#include <vector>

#include "oracles.hpp"
#include "pgc/errors.hpp"
#include "pgc/fft.hpp"
#include "pgc/poly.hpp"
#include "pgc/random.hpp"

using pgc::MulBackend;
using pgc::Poly;

namespace {

std::vector<double> random_coeffs(pgc::Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

}  // namespace

TEST_CASE("construction truncates and trims") {
  const Poly p({1.0, 2.0, 3.0, 4.0}, 2);
  CHECK(p.degree() == 2);
  CHECK(p.coef(2) == 3.0);
  CHECK(p.coef(3) == 0.0);
  CHECK(Poly({1.0, 0.0, 0.0}, 5).degree() == 0);
  CHECK(Poly(3).is_zero());
  CHECK(Poly(3).degree() == -1);
  CHECK(Poly::monomial(2.0, 4, 3).is_zero());
  CHECK(Poly::monomial(2.0, 3, 3).coef(3) == 2.0);
}

TEST_CASE("arithmetic in the truncated ring") {
  const Poly a({1.0, 1.0}, 3);  // 1 + t
  const Poly b({-1.0, 1.0}, 3);  // -1 + t
  CHECK((a * b) == Poly({-1.0, 0.0, 1.0}, 3));
  CHECK((a + b) == Poly({0.0, 2.0}, 3));
  CHECK((a - a).is_zero());
  CHECK((2.0 * a) == Poly({2.0, 2.0}, 3));
  // (1 + t)^4 truncated at t^3.
  const Poly sq = a * a;
  CHECK((sq * sq) == Poly({1.0, 4.0, 6.0, 4.0}, 3));
  Poly acc(3);
  acc.add_scaled(a, 0.5);
  acc.add_scaled(b, 0.5);
  CHECK(acc == Poly({0.0, 1.0}, 3));
}

TEST_CASE("cap mismatch is a contract violation") {
  CHECK_THROWS_AS(Poly({1.0}, 2) + Poly({1.0}, 3), pgc::ContractViolation);
  CHECK_THROWS_AS(Poly({1.0}, 2) * Poly({1.0}, 3), pgc::ContractViolation);
}

TEST_CASE("Horner evaluation") {
  const Poly p({1.0, -2.0, 3.0}, 4);
  CHECK(p.at(2.0) == doctest::Approx(9.0));
  const auto z = p.at(std::complex<double>(0.0, 1.0));
  CHECK(z.real() == doctest::Approx(-2.0));
  CHECK(z.imag() == doctest::Approx(-2.0));
}

TEST_CASE("naive, fft and auto agree with schoolbook") {
  pgc::Rng rng(11);
  for (std::size_t trial = 0; trial < 40; ++trial) {
    const std::size_t da = 1 + rng.below(300);
    const std::size_t db = 1 + rng.below(300);
    const std::size_t cap = 1 + rng.below(da + db);
    const auto ca = random_coeffs(rng, da);
    const auto cb = random_coeffs(rng, db);
    const Poly a(ca, cap);
    const Poly b(cb, cap);
    const auto expect = oracle::schoolbook(ca, cb, cap);
    for (auto backend : {MulBackend::kNaive, MulBackend::kFft, MulBackend::kAuto}) {
      const Poly got = pgc::mul(a, b, backend);
      for (std::size_t k = 0; k <= cap; ++k) CHECK(got.coef(k) == doctest::Approx(expect[k]).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("fft inverse recovers the input") {
  pgc::Rng rng(3);
  std::vector<std::complex<double>> data(64);
  for (auto& x : data) x = {rng.normal(), rng.normal()};
  auto copy = data;
  pgc::fft::transform(copy, false);
  pgc::fft::transform(copy, true);
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(std::abs(copy[i] / 64.0 - data[i]) < 1e-12);
  }
}

TEST_CASE("fft of a delta is flat") {
  std::vector<std::complex<double>> data(8, 0.0);
  data[0] = 1.0;
  pgc::fft::transform(data, false);
  for (const auto& x : data) CHECK(std::abs(x - 1.0) < 1e-15);
}

TEST_CASE("convolve keeps the requested prefix") {
  const std::vector<double> a{1.0, 2.0, 3.0};
  const std::vector<double> b{4.0, 5.0};
  const auto full = pgc::fft::convolve(a, b, 4);
  REQUIRE(full.size() == 4);
  CHECK(full[0] == doctest::Approx(4.0));
  CHECK(full[1] == doctest::Approx(13.0));
  CHECK(full[2] == doctest::Approx(22.0));
  CHECK(full[3] == doctest::Approx(15.0));
  CHECK(pgc::fft::convolve(a, b, 2).size() == 2);
}
