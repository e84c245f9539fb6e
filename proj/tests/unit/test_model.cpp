#include <doctest.h>

#include <cmath>

#include "core/error.hpp"
#include "core/model.hpp"
#include "core/numerics.hpp"
#include "core/spectral.hpp"

using namespace hfl;
using namespace hfl::model;

namespace {

template <class Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

// A~ g via the closed-form coefficients and five-point differences.
double apply_tilde(const ModelParams& p, const numerics::RealFn& g, double x) {
  const auto d = numerics::fd_derivatives(g, x, 1e-4);
  const double s = vol(p, x);
  return drift_tilde(p, x) * d.first + 0.5 * s * s * d.second;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("parameter validation") {
  CHECK(code_of([] { ModelParams(0.5, 0.0, 1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { ModelParams(0.5, 1.0, -1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { ModelParams(NAN, 1.0, 1.0); }) == ErrorCode::InvalidArgument);
  // 2 sqrt2 / a = 2 exactly
  CHECK(code_of([] { ModelParams(-0.5, std::sqrt(2.0), 1.0); }) == ErrorCode::InvalidArgument);
  CHECK_NOTHROW(ModelParams(0.5, std::sqrt(2.0), 1.0));
}

TEST_CASE("coefficients") {
  const ModelParams h(0.5, 1, 1), n(-0.5, 1, 1), g(0.0, 2, 1);
  CHECK(drift(h, 0.3) == 0.0);
  CHECK(vol(h, 0.25) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(drift(n, 0.5) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(vol(n, 0.25) == doctest::Approx(0.125).epsilon(1e-15));
  for (double x : {0.1, 0.5, 0.9}) {
    // geometric Brownian motion with rate a^2/4 = 1
    CHECK(drift(g, x) == doctest::Approx(x).epsilon(1e-15));
    CHECK(vol(g, x) == doctest::Approx(2 * x).epsilon(1e-15));
  }
  CHECK(code_of([&] { drift(h, 0.0); }) == ErrorCode::OutOfDomain);
  CHECK(code_of([&] { vol(h, 1.0); }) == ErrorCode::OutOfDomain);
}

TEST_CASE("f and the f-ODE") {
  const ModelParams h(0.5, 1, 1), n(-0.5, 1, 1);
  CHECK(f_func(h, 1.0) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-15));
  CHECK(f_func(n, 1.0) == 0.0);
  CHECK(code_of([&] { f_func(h, 0.0); }) == ErrorCode::OutOfDomain);
  for (double k : {0.5, -0.5, 0.0, 1.0, 0.25})
    for (double a : {0.7, 1.0, 2.0}) {
      const ModelParams p(k, a, 1);
      for (double x : {0.1, 0.5, 0.9}) {
        const double s = vol(p, x), fp = f_prime(p, x);
        const double res = 0.5 * s * s * fp * fp - drift(p, x) * fp - 0.5 * s * s * f_second(p, x) - x;
        CHECK(std::abs(res) < 1e-9);
        const auto d = numerics::fd_derivatives([&](double z) { return f_func(p, z); }, x, 1e-4);
        CHECK(std::abs(d.first - fp) < 1e-7);
        CHECK(std::abs(d.second - f_second(p, x)) < 1e-5);
      }
    }
}

TEST_CASE("drift_tilde") {
  const ModelParams h(0.5, 1, 1), n(-0.5, 1, 1);
  for (double x : {0.2, 0.5, 0.8}) {
    CHECK(drift_tilde(h, x) == doctest::Approx(std::sqrt(2.0) * x).epsilon(1e-14));
    CHECK(drift_tilde(n, x) == doctest::Approx((0.5 + std::sqrt(2.0)) * x * x).epsilon(1e-14));
  }
  for (double k : {-1.0, 0.0, 0.5, 2.0})
    for (double x : {0.1, 0.6}) {
      const ModelParams p(k, 1.3, 1);
      CHECK(drift_tilde(p, x) - drift(p, x) >= 0.0);
    }
}

TEST_CASE("scale and speed densities") {
  const ModelParams h(0.5, 1, 1), n(-0.5, 1, 1);
  const double sL = scale_density(h, 1.0 - 1e-15);
  CHECK(sL == doctest::Approx(std::exp(-2 * std::sqrt(2.0))).epsilon(1e-12));
  CHECK(std::abs(sL - 0.059105) < 1e-6);
  CHECK(speed_density(h, 0.5) == doctest::Approx(2 * std::exp(std::sqrt(2.0)) / 0.5).epsilon(1e-14));
  CHECK(speed_density(n, 0.5) == doctest::Approx(2 * std::pow(0.5, -2 + 2 * std::sqrt(2.0))).epsilon(1e-14));
  for (double k : {-1.0, -0.5, 0.0, 0.5, 1.5})
    for (double a : {0.5, 1.0, 2.0})
      for (double x : {0.05, 0.4, 0.95}) {
        const ModelParams p(k, a, 1);
        const double s = vol(p, x);
        CHECK(scale_density(p, x) * speed_density(p, x) * s * s / 2 == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(std::exp(log_speed_density(p, x)) == doctest::Approx(speed_density(p, x)).epsilon(1e-13));
      }
}

TEST_CASE("closed-form classification") {
  CHECK(classify_origin(ModelParams(1, 1, 1)) == BoundaryClass::Regular);
  CHECK(classify_origin(ModelParams(0.5, 1, 1)) == BoundaryClass::Exit);
  CHECK(classify_origin(ModelParams(0.1, 1, 1)) == BoundaryClass::Exit);
  CHECK(classify_origin(ModelParams(-0.5, 1, 1)) == BoundaryClass::Natural);
  CHECK(classify_origin(ModelParams(0.0, 1, 1)) == BoundaryClass::Natural);
  CHECK(classify_spectrum(ModelParams(0.5, 1, 1)).kind == SpectrumKind::PurelyDiscrete);
  CHECK(classify_spectrum(ModelParams(-0.5, 1, 1)).kind == SpectrumKind::PurelyContinuous);
  const auto m = classify_spectrum(ModelParams(0, 1, 1));
  CHECK(m.kind == SpectrumKind::Mixed);
  CHECK(m.cutoff == -1.0 / 32.0);
  CHECK(to_string(m) == "mixed; cutoff -0.03125");
  CHECK(std::isnan(classify_spectrum(ModelParams(1, 1, 1)).cutoff));
}

TEST_CASE("numeric classification agrees with the closed form") {
  const auto r1 = classify_origin_numeric(ModelParams(1, 1, 1), 0.5);
  CHECK(r1.i0_finite);
  CHECK(r1.j0_finite);
  CHECK(r1.boundary == BoundaryClass::Regular);
  const auto r2 = classify_origin_numeric(ModelParams(0.5, 1, 1), 0.5);
  CHECK(r2.i0_finite);
  CHECK_FALSE(r2.j0_finite);
  CHECK(std::isinf(r2.j0_estimate));
  const auto r3 = classify_origin_numeric(ModelParams(-0.5, 1, 1), 0.5);
  CHECK_FALSE(r3.i0_finite);
  CHECK_FALSE(r3.j0_finite);
  for (double k : {-1.0, -0.5, -0.1, 0.0, 0.25, 0.5, 0.75, 1.0, 2.0})
    for (double a : {0.5, 1.0, 2.0}) {
      const ModelParams p(k, a, 1.0);
      CAPTURE(k);
      CAPTURE(a);
      CHECK(classify_origin_numeric(p, 0.5).boundary == classify_origin(p));
    }
  CHECK(code_of([] { classify_origin_numeric(ModelParams(1, 1, 1), 1.5); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("Liouville coordinate and potential") {
  auto [z1, u1] = liouville(ModelParams(0.5, 1, 1), 0.25);
  CHECK(z1 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(u1 == doctest::Approx(0.25 + 3.0 / 32.0 / 0.25).epsilon(1e-14));
  CHECK(liouville(ModelParams(-0.5, 1, 1), 0.25).first == doctest::Approx(-4.0).epsilon(1e-15));
  auto [z0, u0] = liouville(ModelParams(0, 1, 1), 1.0 - 1e-16);
  CHECK(std::abs(z0) < 1e-15);
  CHECK(u0 == doctest::Approx(1.0 + 1.0 / 32.0).epsilon(1e-14));
}

TEST_CASE("Liouville normal form of the first eigenfunction") {
  const ModelParams p(0.5, 1, 1);
  const auto sys = spectral::solve_eigen(p, 1);
  const double lam = sys.pair(1).lambda;
  auto x_of = [](double z) { return z * z / 4.0; };  // inverse of z = 2 sqrt(x)
  auto eta = [&](double z) {
    const double x = x_of(z);
    return spectral::psi_n(sys, 1, x) / std::sqrt(vol(p, x) * scale_density(p, x));
  };
  for (double z = 0.3; z <= 1.7 + 1e-12; z += 0.1) {
    const auto d = numerics::fd_derivatives(eta, z, 1e-3);
    const double U = liouville(p, x_of(z)).second;
    CHECK(std::abs(0.5 * d.second - U * eta(z) - lam * eta(z)) < 1e-4);
  }
}

TEST_CASE("A~ is symmetric with respect to the speed measure") {
  for (double k : {0.5, -0.5}) {
    const ModelParams p(k, 1, 1);
    // smooth bumps supported inside (0.1, 0.9)
    auto bump = [](double c, double w) {
      return [c, w](double x) {
        const double u = (x - c) / w;
        return std::abs(u) < 1 ? std::exp(-1.0 / (1 - u * u)) : 0.0;
      };
    };
    const auto g = bump(0.45, 0.3), h = bump(0.55, 0.3);
    const numerics::QuadSpec q{1e-12, 1e-9, 60, 16};
    const double lhs = numerics::integrate(
        [&](double x) { return apply_tilde(p, g, x) * h(x) * speed_density(p, x); }, 0.15, 0.85, q);
    const double rhs = numerics::integrate(
        [&](double x) { return g(x) * apply_tilde(p, h, x) * speed_density(p, x); }, 0.15, 0.85, q);
    CHECK(std::abs(lhs - rhs) < 1e-6 * std::abs(lhs));
  }
}

}
