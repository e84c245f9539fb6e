#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/model.hpp"
#include "core/numerics.hpp"
#include "core/spectral.hpp"

namespace hfl::pricing {

/// Terminal payoff g with caller-supplied derivatives. A payoff whose first
/// derivative jumps at one point (the put on the rate) declares the kink; its
/// second derivative then carries a point mass `kink_jump` there.
struct Payoff {
  std::function<double(double)> g;
  std::function<double(double)> g_prime;
  std::function<double(double)> g_double_prime;
  std::optional<double> kink;
  double kink_jump = 0.0;
  std::string name;

  static Payoff one();
  static Payoff linear();
  /// (K - x)^+
  static Payoff put_on_rate(double strike);
};

/// (d/dt + A~) e^{-x(T-t) + f(x) + f_offset} g(x), point masses excluded.
double q_source(const model::ModelParams& p, const Payoff& pay, double t, double x, double T,
                double f_offset = 0.0);

struct DuhamelOptions {
  numerics::QuadSpec quad{1e-12, 1e-8, 60, 4};
  double f_offset = 0.0;
};

struct DuhamelResult {
  double value;
  double sliver;        ///< analytic contribution of s in [t, t + tau_min]
  double sliver_bound;  ///< size of the neglected part of that contribution
};

DuhamelResult price_general(const model::ModelParams& p, const spectral::DensityField& field,
                            const Payoff& pay, double t, double x, double T,
                            const DuhamelOptions& opts = {});

// h(t, T; xi, lambda) for k = 1/2. `h_kernel_k_half` switches between the two
// branches at |(lambda + xi)(T - t)| = 1.
double h_kernel_k_half(double a, double t, double T, double xi, double lambda);
double h_kernel_k_half_direct(double a, double t, double T, double xi, double lambda);
double h_kernel_k_half_series(double a, double t, double T, double xi, double lambda);

// h(t, T, xi, rho) for k = -1/2, with the same branch rule in
// (L rho^2 - xi)(T - t).
double h_kernel_k_neg_half(double L, double t, double T, double xi, double rho);
double h_kernel_k_neg_half_direct(double L, double t, double T, double xi, double rho);
double h_kernel_k_neg_half_series(double L, double t, double T, double xi, double rho);

struct BondOptions {
  double series_tol = 1e-6;   ///< estimated series tail / price bound for k = 1/2
  double tau_min = 0.01;      ///< shortest maturity accepted for k = -1/2
  double rho_max = 20.0;      ///< spectral cutoff for k = -1/2 (scaled by 1/sqrt(L))
};

// Throws SeriesNotConverged when the estimated truncation tail exceeds
// series_tol times the price.
double bond_k_half(const model::ModelParams& p, const spectral::EigenSystem& sys, double t,
                   double x, double T, const BondOptions& opts = {});
double bond_k_neg_half(const model::ModelParams& p, double t, double x, double T,
                       const BondOptions& opts = {});

enum class Pricer { Analytic, Duhamel };

struct CurvePoint {
  double maturity;
  double bond;
  double yield;
};
using Curve = std::vector<CurvePoint>;

/// Spot curve at t = 0. Analytic requires k = +-1/2; Duhamel uses `field`.
Curve yield_curve(const model::ModelParams& p, Pricer pricer, const spectral::DensityField& field,
                  double x, const std::vector<double>& maturities, const BondOptions& opts = {});

}  // namespace hfl::pricing
