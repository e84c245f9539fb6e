#include <doctest.h>

#include <cmath>

#include "core/error.hpp"
#include "core/model.hpp"
#include "core/numerics.hpp"
#include "core/pricing.hpp"
#include "core/spectral.hpp"
#include "support/oracles.hpp"

using namespace hfl;
using namespace hfl::pricing;
using model::ModelParams;

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

const ModelParams& khalf() {
  static const ModelParams p(0.5, 1, 1);
  return p;
}
const ModelParams& kneg() {
  static const ModelParams p(-0.5, 1, 1);
  return p;
}
const spectral::EigenSystem& sys() {
  static const spectral::EigenSystem s = spectral::solve_eigen(khalf(), 25);
  return s;
}
const spectral::DensityField& field_half() {
  static const spectral::DensityField f = spectral::DensityField::discrete(sys());
  return f;
}
const spectral::DensityField& field_neg() {
  static const spectral::DensityField f = spectral::DensityField::continuous(kneg());
  return f;
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

}  // namespace

TEST_SUITE("pricing") {

TEST_CASE("q_source closed forms") {
  const double r2 = std::sqrt(2.0);
  for (double x : {0.2, 0.5, 0.9})
    for (double t : {0.0, 0.3}) {
      const double D = 1.0 - t;
      const double want = 0.5 * D * D * x * std::exp(-x * (D + r2));
      CHECK(std::abs(q_source(khalf(), Payoff::one(), t, x, 1.0) - want) < 1e-14);
    }
  CHECK(std::abs(q_source(khalf(), Payoff::one(), 1.0, 0.4, 1.0)) < 1e-16);
  const double t = 0, x = 0.5, T = 1;
  const double want = 0.5 * std::exp(-(T - t) * x) * std::pow(x, 2 - r2) * (t - T) * (1 + t * x - T * x);
  CHECK(rel(q_source(kneg(), Payoff::one(), t, x, T), want) < 1e-13);
  CHECK(code_of([] { q_source(khalf(), Payoff::one(), 0, 1.0, 1); }) == ErrorCode::OutOfDomain);
  // the offset scales q by e^c
  CHECK(rel(q_source(khalf(), Payoff::linear(), 0, 0.3, 1, 3.7),
            std::exp(3.7) * q_source(khalf(), Payoff::linear(), 0, 0.3, 1)) < 1e-14);
}

TEST_CASE("q_source matches (d/dt + A~) applied by differences") {
  for (const ModelParams* p : {&khalf(), &kneg()})
    for (const Payoff& pay : {Payoff::one(), Payoff::linear(), Payoff::put_on_rate(0.7)})
      for (double x : {0.25, 0.5}) {
        const double T = 0.8, t = 0.1;
        auto w = [&](double s, double z) { return std::exp(-z * (T - s) + model::f_func(*p, z)) * pay.g(z); };
        const auto dx = numerics::fd_derivatives([&](double z) { return w(t, z); }, x, 1e-3);
        const auto dt = numerics::fd_derivatives([&](double s) { return w(s, x); }, t, 1e-3);
        const double sg = model::vol(*p, x);
        const double want = dt.first + model::drift_tilde(*p, x) * dx.first + 0.5 * sg * sg * dx.second;
        CHECK(std::abs(q_source(*p, pay, t, x, T) - want) < 1e-8);
      }
}

TEST_CASE("h kernels: removable singularity") {
  const double a = 1.0, t = 0.1, T = 0.6, D = T - t, xi = 0.4;
  const double at_zero = 0.5 * a * a * xi * std::exp(xi * (std::sqrt(2.0) / a - D)) * D * D * D / 3.0;
  CHECK(rel(h_kernel_k_half(a, t, T, xi, -xi), at_zero) < 1e-15);
  CHECK(h_kernel_k_half(a, T, T, xi, -3.0) == 0.0);
  // the Taylor start eps^3/3 against the direct formula at |lambda + xi| = 1e-2
  CHECK(rel(h_kernel_k_half_direct(a, t, T, xi, -xi + 1e-2), at_zero) < 1e-2);
  for (double eps : {1e-3, 0.5, 1.0, -1.0, 2.0}) {
    const double lam = eps / D - xi;
    CHECK(rel(h_kernel_k_half_direct(a, t, T, xi, lam), h_kernel_k_half_series(a, t, T, xi, lam)) <
          (std::abs(eps) < 0.01 ? 1e-5 : 1e-12));
  }
  const double L = 1.0;
  for (double eps : {1e-3, 0.3, 1.0, -0.1, 3.0}) {
    const double rho = std::sqrt((xi + eps / D) / L);
    CHECK(rel(h_kernel_k_neg_half_direct(L, t, T, xi, rho), h_kernel_k_neg_half_series(L, t, T, xi, rho)) <
          (std::abs(eps) < 0.01 ? 1e-5 : 1e-12));
  }
  CHECK(std::isfinite(h_kernel_k_neg_half(L, t, T, xi, std::sqrt(xi / L))));
}

TEST_CASE("analytic bonds: boundaries and bounds") {
  for (double T : {0.25, 0.5, 1.0}) {
    CHECK(bond_k_half(khalf(), sys(), 0, 1.0, T) == doctest::Approx(std::exp(-T)).epsilon(1e-15));
    CHECK(bond_k_half(khalf(), sys(), 0, 0.0, T) == 1.0);
    CHECK(std::abs(bond_k_neg_half(kneg(), 0, 1.0, T) - std::exp(-T)) < 1e-4);
    double prev_half = 1.0, prev_neg = 1.0;
    for (double x : {1.0 / 3, 0.5, 2.0 / 3}) {
      const double bh = bond_k_half(khalf(), sys(), 0, x, T);
      const double bn = bond_k_neg_half(kneg(), 0, x, T);
      CHECK(bh <= 1.0);
      CHECK(bh >= std::exp(-T));
      CHECK(bn <= 1.0);
      CHECK(bn >= std::exp(-T));
      CHECK(bh < prev_half);
      CHECK(bn < prev_neg);
      prev_half = bh;
      prev_neg = bn;
    }
  }
  CHECK(code_of([] { bond_k_neg_half(kneg(), 0, 0.5, 0.005); }) == ErrorCode::HorizonTooShort);
  CHECK(code_of([] { bond_k_half(khalf(), sys(), 0.5, 0.5, 0.5); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { bond_k_half(kneg(), sys(), 0, 0.5, 0.5); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("analytic bonds against a Crank-Nicolson solution") {
  for (double T : {0.25, 0.5, 1.0}) {
    const auto ph = oracle::bond_pde(0.5, 1, 1, T, 2000, 2000);
    const auto pn = oracle::bond_pde(-0.5, 1, 1, T, 2000, 2000);
    for (double x : {1.0 / 3, 0.5, 2.0 / 3}) {
      CHECK(std::abs(bond_k_half(khalf(), sys(), 0, x, T) - ph.at(x)) < 2e-6);
      if (T < 1.0) CHECK(std::abs(bond_k_neg_half(kneg(), 0, x, T) - pn.at(x)) < 2e-6);
    }
  }
  // a != 1, L != 1
  const ModelParams p(0.5, 1.5, 0.8);
  const auto s = spectral::solve_eigen(p, 25);
  const auto g = oracle::bond_pde(0.5, 1.5, 0.8, 0.5, 2000, 2000);
  CHECK(std::abs(bond_k_half(p, s, 0, 0.3, 0.5) - g.at(0.3)) < 2e-6);
}

TEST_CASE("truncated eigen-series is reported") {
  const spectral::EigenSystem two = spectral::solve_eigen(khalf(), 2);
  CHECK(code_of([&] { bond_k_half(khalf(), two, 0, 0.5, 0.05); }) == ErrorCode::SeriesNotConverged);
}

TEST_CASE("Feynman-Kac residual of the k=1/2 bond") {
  const double T = 0.5;
  auto B = [&](double t, double x) { return bond_k_half(khalf(), sys(), t, x, T); };
  for (double t : {0.1, 0.3})
    for (double x = 0.2; x <= 0.8 + 1e-12; x += 0.1) {
      const auto dx = numerics::fd_derivatives([&](double z) { return B(t, z); }, x, 1e-3);
      const auto dt = numerics::fd_derivatives([&](double s) { return B(s, x); }, t, 1e-3);
      const double s = model::vol(khalf(), x);
      const double res = dt.first + model::drift(khalf(), x) * dx.first + 0.5 * s * s * dx.second - x * B(t, x);
      CHECK(std::abs(res) < 1e-3 * B(t, x));
    }
}

TEST_CASE("Duhamel pricer, k = 1/2") {
  for (auto [x, T] : {std::pair{0.5, 0.5}, std::pair{1.0 / 3, 1.0}, std::pair{2.0 / 3, 0.25}}) {
    const double d = price_general(khalf(), field_half(), Payoff::one(), 0, x, T).value;
    CHECK(rel(d, bond_k_half(khalf(), sys(), 0, x, T)) < 1e-5);
  }
  // terminal condition
  const double x = 0.5, tau = 0.01;
  const double near = price_general(khalf(), field_half(), Payoff::linear(), 0.3, x, 0.3 + tau).value;
  CHECK(std::abs(near - x * std::exp(-x * tau)) < 1e-3);
  // other payoffs against the PDE
  const auto lin = oracle::price_pde(0.5, 1, 1, 0.5, [](double z) { return z; }, 2000, 2000);
  CHECK(std::abs(price_general(khalf(), field_half(), Payoff::linear(), 0, 0.5, 0.5).value - lin.at(0.5)) < 1e-5);
  const auto put = oracle::price_pde(0.5, 1, 1, 0.5, [](double z) { return std::max(0.5 - z, 0.0); }, 4000, 4000);
  // the kink costs accuracy near the strike
  for (auto [x0, tol] : {std::pair{0.4, 2e-5}, std::pair{0.5, 1e-4}, std::pair{0.7, 1e-5}}) {
    const auto r = price_general(khalf(), field_half(), Payoff::put_on_rate(0.5), 0, x0, 0.5);
    CAPTURE(x0);
    CHECK(std::abs(r.value - put.at(x0)) < tol);
    CHECK(std::abs(r.value - put.at(x0)) < r.sliver_bound);
  }
  // f-offset invariance
  DuhamelOptions o;
  o.f_offset = 3.7;
  for (const Payoff& pay : {Payoff::one(), Payoff::linear()}) {
    const double base = price_general(khalf(), field_half(), pay, 0, 0.4, 0.5).value;
    CHECK(rel(price_general(khalf(), field_half(), pay, 0, 0.4, 0.5, o).value, base) < 1e-9);
  }
  CHECK(code_of([] { price_general(khalf(), field_half(), Payoff::one(), 0, 0.5, 0.005); }) ==
        ErrorCode::HorizonTooShort);
}

TEST_CASE("yield curves") {
  const auto deg = -std::log(std::exp(-0.37 * 1.7)) / 1.7;
  CHECK(std::abs(deg - 0.37) < 1e-15);
  std::vector<double> grid;
  for (int i = 0; i < 10; ++i) grid.push_back(0.2 + 0.2 * i);
  const auto ch = yield_curve(khalf(), Pricer::Analytic, field_half(), 2.0 / 3, grid);
  REQUIRE(ch.size() == grid.size());
  for (size_t i = 0; i < ch.size(); ++i) {
    CHECK(ch[i].maturity == grid[i]);
    CHECK(ch[i].yield == doctest::Approx(-std::log(ch[i].bond) / grid[i]).epsilon(1e-15));
    if (i) CHECK(ch[i].yield < ch[i - 1].yield);
  }
  const auto cn = yield_curve(kneg(), Pricer::Analytic, field_neg(), 2.0 / 3, grid);
  size_t peak = 0;
  for (size_t i = 1; i < cn.size(); ++i)
    if (cn[i].yield > cn[peak].yield) peak = i;
  CHECK(peak > 0);
  CHECK(peak + 1 < cn.size());
  CHECK(code_of([&] { yield_curve(khalf(), Pricer::Analytic, field_half(), 0.5, {0.5, 0.3}); }) ==
        ErrorCode::InvalidArgument);
}

}

TEST_SUITE("pricing-slow") {

TEST_CASE("Duhamel pricer, k = -1/2") {
  const double x = 0.5, T = 0.5;
  const double d = price_general(kneg(), field_neg(), Payoff::one(), 0, x, T).value;
  CHECK(rel(d, bond_k_neg_half(kneg(), 0, x, T)) < 1e-4);
  DuhamelOptions o;
  o.f_offset = 3.7;
  CHECK(rel(price_general(kneg(), field_neg(), Payoff::one(), 0, x, T, o).value, d) < 1e-9);
}

}
