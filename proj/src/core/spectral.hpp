#pragma once

#include <optional>
#include <vector>

#include "core/model.hpp"
#include "core/numerics.hpp"

namespace hfl::spectral {

struct EigenPair {
  int n;          ///< 1-based index
  double lambda;  ///< negative eigenvalue, strictly decreasing in n
  double c_n;     ///< int_0^L x e^{2 sqrt2 x/a} M_n(x)^2 dx
};

/// Discrete eigen-system of the k = 1/2 generator with Dirichlet condition at L.
class EigenSystem {
 public:
  EigenSystem(model::ModelParams params, std::vector<EigenPair> pairs);

  const model::ModelParams& params() const noexcept { return params_; }
  const std::vector<EigenPair>& pairs() const noexcept { return pairs_; }
  int n_max() const noexcept { return static_cast<int>(pairs_.size()); }
  const EigenPair& pair(int n) const;

  /// M(1 - lambda_n/(a sqrt2), 2; -2 sqrt2 x / a).
  double kummer(int n, double x) const;

 private:
  model::ModelParams params_;
  std::vector<EigenPair> pairs_;
};

/// M(1 - lambda/(a sqrt2), 2; -2 sqrt2 L / a); its zeros are the eigenvalues.
double eigen_equation(const model::ModelParams& p, double lambda);

// Throws InvalidArgument unless k = 1/2 and n_max >= 1, and
// BracketScanExhausted when fewer than n_max roots lie above -1e4 a.
EigenSystem solve_eigen(const model::ModelParams& p, int n_max);

/// Normalized eigenfunction (a / sqrt(2 c_n)) x M_n(x); x in [0, L].
double psi_n(const EigenSystem& sys, int n, double x);

/// Improper eigenfunction for k = -1/2 at spectral parameter rho > 0.
double psi_rho(const model::ModelParams& p, double rho, double x);

/// x^{sqrt2/a} psi(rho, x) / (sqrt(L rho / 2) pi): the Bessel bracket divided
/// by |K_nu(i nu rho)|, free of the csc factor.
double theta_rho(const model::ModelParams& p, double rho, double x);

/// (psi' phi - psi phi') / s~ for the k = -1/2 resolvent pair at lambda > 0.
double greens_wronskian(const model::ModelParams& p, double lambda, double x);

/// Kernel G(x, xi) of (-A~)^{-1} with respect to the speed measure, for the
/// two closed-form cases k = 1/2 and k = -1/2. Symmetric, zero at L.
double green_zero(const model::ModelParams& p, double x, double xi);

struct DensityOptions {
  double tau_min = 0.01;
  double rho_eps = 1e-12;  ///< Gaussian envelope cutoff e^{-L rho^2 (T-t)}
  numerics::QuadSpec quad{1e-13, 1e-9, 60, 1};

  void validate() const;
};

struct DensityValue {
  double value;
  double tail_bound;  ///< truncation bound (discrete) or envelope mass (continuous)
};

/// Transition density of the killed process under the transformed measure.
class DensityField {
 public:
  static DensityField discrete(EigenSystem sys, DensityOptions opts = {});
  static DensityField continuous(const model::ModelParams& p, DensityOptions opts = {});
  /// Backend chosen from the spectrum class: k = 1/2 discrete, k = -1/2
  /// continuous; other k throw InvalidArgument.
  static DensityField for_params(const model::ModelParams& p, int n_max = 25,
                                 DensityOptions opts = {});

  DensityValue evaluate(double t, double x, double T, double y) const;
  double operator()(double t, double x, double T, double y) const {
    return evaluate(t, x, T, y).value;
  }

  const model::ModelParams& params() const noexcept { return params_; }
  const DensityOptions& options() const noexcept { return opts_; }
  bool is_discrete() const noexcept { return sys_.has_value(); }
  const EigenSystem* eigen_system() const noexcept { return sys_ ? &*sys_ : nullptr; }

 private:
  DensityField(model::ModelParams p, std::optional<EigenSystem> sys, DensityOptions opts);

  model::ModelParams params_;
  std::optional<EigenSystem> sys_;
  DensityOptions opts_;
};

}  // namespace hfl::spectral
