#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>

#include <cmath>

#include "core/error.hpp"
#include "core/specfun.hpp"
#include "support/oracles.hpp"

using namespace hfl;
using namespace hfl::specfun;

namespace {

const double kNu = 2.0 * std::sqrt(2.0);

template <class Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

double rel(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

}  // namespace

TEST_SUITE("specfun") {

TEST_CASE("kummer_m spot values") {
  for (double al : {-3.5, 0.0, 1.0, 7.25})
    for (double be : {0.5, 2.0, 3.0}) CHECK(kummer_m(al, be, 0.0) == 1.0);
  CHECK(rel(kummer_m(1, 2, 1), std::exp(1.0) - 1.0) < 1e-14);
  CHECK(std::abs(kummer_m(1 + 2.16096 / std::sqrt(2.0), 2, -kNu)) < 5e-5);
  CHECK(code_of([] { kummer_m(1, -2, 0.5); }) == ErrorCode::BetaPole);
  CHECK(code_of([] { kummer_m(1, 0, 0.5); }) == ErrorCode::BetaPole);
  CHECK(code_of([] { SeriesControl{10, 1e-17}.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("kummer_m against an extended-precision series") {
  for (double al = -10; al <= 10; al += 1.25)
    for (double z = -8; z <= 8; z += 1.0) {
      const double ref = oracle::kummer_series(al, 2.0, z);
      CHECK(std::abs(kummer_m(al, 2.0, z) - ref) <= 1e-11 * (1 + std::abs(ref)));
    }
  // eigenfunction arguments at large |z| through the transformation
  for (double z : {-40.0, -100.0, -200.0}) {
    const double ref = oracle::kummer_series(3.3, 2.0, z);
    CHECK(std::abs(kummer_m(3.3, 2.0, z) - ref) <= 1e-10 * (1 + std::abs(ref)));
  }
}

TEST_CASE("Kummer transformation and contiguous relation") {
  for (double al = -10; al <= 10; al += 0.5)
    for (double z = -8; z <= 8; z += 0.5) {
      const double m = kummer_m(al, 2, z);
      const double t = std::exp(z) * kummer_m(2 - al, 2, -z);
      CHECK(std::abs(m - t) <= 1e-9 * (1 + std::abs(m)));
      const double lhs = (2 - al) * kummer_m(al - 1, 2, z) + (2 * al - 2 + z) * m - al * kummer_m(al + 1, 2, z);
      const double scale = std::abs((2 - al) * kummer_m(al - 1, 2, z)) + std::abs((2 * al - 2 + z) * m) +
                           std::abs(al * kummer_m(al + 1, 2, z));
      CHECK(std::abs(lhs) <= 1e-8 * std::max(scale, 1.0));
    }
}

TEST_CASE("Bessel half-integer closed forms") {
  CHECK(std::abs(bessel_j(0.5, 1.0) - 0.671396707) < 1e-9);
  CHECK(rel(bessel_j(0.5, 1.0), std::sqrt(2 / M_PI) * std::sin(1.0)) < 1e-14);
  CHECK(rel(bessel_j(-0.5, 2.0), std::sqrt(1 / M_PI) * std::cos(2.0)) < 1e-14);
  CHECK(std::abs(bessel_j(-0.5, 2.0) + 0.234785) < 1e-6);
  CHECK(std::abs(bessel_i(0.5, 1.0) - 0.937674) < 1e-6);
  CHECK(std::abs(bessel_k(0.5, 1.0) - 0.461068) < 1e-6);
  CHECK(rel(bessel_k(0.5, 1.0), std::sqrt(M_PI / 2) * std::exp(-1.0)) < 1e-13);
}

TEST_CASE("Bessel J against a 50-digit series") {
  CHECK(rel(bessel_j(kNu, kNu), oracle::bessel_j_series(kNu, kNu)) < 1e-13);
  for (double nu : {-kNu, -0.3, 0.3, 5.5, 12.7})
    for (double x : {0.1, 1.0, 4.0, 11.0}) {
      const double ref = oracle::bessel_j_series(nu, x);
      CHECK(std::abs(bessel_j(nu, x) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
    }
}

TEST_CASE("Bessel functions against Boost.Math") {
  for (double nu : {0.3, kNu, 5.5, 13.1})
    for (double x : {0.05, 0.7, 3.0, 12.5, 30.0, 80.0}) {
      const double j = boost::math::cyl_bessel_j(nu, x), y = boost::math::cyl_neumann(nu, x);
      const double scale = std::hypot(j, y);
      CHECK(std::abs(bessel_j(nu, x) - j) <= 1e-11 * scale);
      CHECK(std::abs(bessel_y(nu, x) - y) <= 1e-11 * scale);
      if (x < 50) {
        CHECK(rel(bessel_i(nu, x), boost::math::cyl_bessel_i(nu, x)) < 1e-11);
        CHECK(rel(bessel_k(nu, x), boost::math::cyl_bessel_k(nu, x)) < 1e-9);
      }
    }
}

TEST_CASE("Bessel Wronskians") {
  for (double nu : {0.3, kNu, 5.5})
    for (double x = 0.1; x <= 50.0; x *= 1.37) {
      const BesselPair p = bessel_jy(nu, x);
      const double w = p.first * p.second_prime - p.first_prime * p.second;
      CHECK(rel(w, 2 / (M_PI * x)) < 1e-8);
    }
  const BesselPair m = bessel_ik(kNu, 0.7);
  CHECK(std::abs(m.first * m.second_prime - m.first_prime * m.second + 1 / 0.7) < 1e-9);
}

TEST_CASE("integer orders are refused") {
  CHECK(code_of([] { bessel_y(2.0, 1.0); }) == ErrorCode::NonIntegerOnly);
  CHECK(code_of([] { bessel_k(3.0 + 1e-11, 1.0); }) == ErrorCode::NonIntegerOnly);
  CHECK(near_integer(4.0 - 5e-10));
  CHECK_FALSE(near_integer(kNu));
}

TEST_CASE("abs_k_imag") {
  CHECK(rel(abs_k_imag(0.5, 1.0), M_PI / 2 * std::sqrt(2 / M_PI)) < 1e-13);
  for (double w = 0.5; w <= 20.0; w += 0.75) {
    const double ref = oracle::abs_k_imag_series(kNu, w);
    CHECK(rel(abs_k_imag(kNu, w) * abs_k_imag(kNu, w), ref * ref) < 1e-7);
  }
  CHECK(abs_k_imag(kNu, 10.0) < abs_k_imag(kNu, 5.0));
}

TEST_CASE("sin_pi and cos_pi") {
  CHECK(sin_pi(3.0) == 0.0);
  CHECK(cos_pi(2.5) == 0.0);
  CHECK(std::abs(sin_pi(0.25) - std::sqrt(0.5)) < 2.3e-16);
}

}
