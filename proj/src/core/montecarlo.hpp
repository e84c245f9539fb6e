#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "core/model.hpp"

namespace hfl::mc {

enum class Measure { P, PTilde };

const char* to_string(Measure m) noexcept;

struct SimConfig {
  double x0 = 0.5;
  double dt = 1e-4;
  double horizon = 1.0;
  std::int64_t n_paths = 10000;
  std::uint64_t seed = 1;
  Measure measure = Measure::P;
  int threads = 0;         ///< 0: hardware concurrency
  int hist_bins = 50;      ///< terminal histogram over [0, L]
  bool keep_terminal = false;
  /// Kill paths that cross a boundary between grid points with the
  /// Brownian-bridge probability; off gives plain step-granularity absorption.
  bool bridge = true;

  /// Throws ConfigInvalid.
  void validate(const model::ModelParams& p) const;
};

struct Histogram {
  std::vector<double> edges;   ///< bins + 1 edges spanning [0, L]
  std::vector<double> masses;  ///< fraction of all paths ending inside each bin
  std::vector<std::int64_t> counts;
};

struct PathStats {
  double time = 0.0;
  double price_mean = 0.0;
  double price_stderr = 0.0;
  double absorbed_at_L = 0.0;
  double absorbed_at_0 = 0.0;
  Histogram terminal_histogram;
  std::vector<double> terminal;  ///< per-path X_T when keep_terminal is set
};

using TerminalFn = std::function<double(double)>;

// Euler-Maruyama estimate of E[e^{-int_0^T X ds} g(X_T)] and absorption
// fractions at the horizon. Bit-identical for a fixed seed whatever the
// thread count: every path owns an RNG stream keyed by (seed, path index)
// and the reduction runs in path order.
PathStats simulate(const model::ModelParams& p, const SimConfig& cfg, const TerminalFn& g);

/// Same paths observed at several times on the step grid (each a multiple of
/// dt, at most the horizon).
std::vector<PathStats> simulate_at(const model::ModelParams& p, const SimConfig& cfg,
                                   const TerminalFn& g, const std::vector<double>& times);

struct MeasureReport {
  double weighted_mean;    ///< E_P[Z_T phi(X_T) 1{interior}]
  double weighted_stderr;
  double tilde_mean;       ///< E_P~[phi(X_T) 1{interior}]
  double tilde_stderr;
  double weight_mean;      ///< E_P[Z_T]
  double weight_stderr;
  double combined_stderr;  ///< sqrt of the summed variances of the two means
};

struct CompareOptions {
  TerminalFn test_fn;       ///< phi; identity when empty
  TerminalFn f_prime;       ///< replaces model f' in the weight when set
};

// Simulates under P with the Radon-Nikodym weight
//   Z_T = exp(-int sigma f' dW - 1/2 int sigma^2 f'^2 dt)
// stopped at absorption, and an independent P~ run with the same budget.
MeasureReport compare_measures(const model::ModelParams& p, const SimConfig& cfg, double T,
                               const CompareOptions& opts = {});

struct DensityHistogram {
  std::vector<double> centers;
  std::vector<double> density;  ///< mass / bin width
  std::vector<double> std_error;  ///< binomial standard error of density
  std::vector<std::int64_t> counts;
  std::vector<double> masses;
  double absorbed_at_0;
  double absorbed_at_L;
  std::int64_t n_paths;
};

/// Histogram estimate of the killed transition density under P~.
DensityHistogram density_histogram(const model::ModelParams& p, const SimConfig& cfg, double T,
                                   int bins);

}  // namespace hfl::mc
