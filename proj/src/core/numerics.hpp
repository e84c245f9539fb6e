#pragma once

#include <cmath>
#include <functional>

namespace hfl::numerics {

using RealFn = std::function<double(double)>;

/// Error targets for adaptive quadrature. A subinterval that still needs
/// refinement after `max_depth` bisections aborts with DepthExceeded.
struct QuadSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_depth = 60;
  /// Number of equal panels the range is cut into before adaptation starts.
  /// Raising it guards against false convergence on oscillatory integrands.
  int initial_panels = 1;

  void validate() const;
};

/// A sign-changing interval; construct through `Bracket::make`.
struct Bracket {
  double lo;
  double hi;
  double f_lo;
  double f_hi;

  static Bracket make(const RealFn& f, double lo, double hi);
  void validate() const;
};

struct Derivatives {
  double first;
  double second;
};

// Globally adaptive Gauss-Kronrod (7/15). The rule never evaluates the
// interval endpoints, so integrable endpoint singularities need no special
// handling.
double integrate(const RealFn& f, double lo, double hi,
                 const QuadSpec& spec = {});

// Integrates f over [lo, inf) by truncating where the decreasing envelope
// `damping` drops below abs_tol / 100.
double integrate_semi_infinite(const RealFn& f, double lo,
                               const RealFn& damping,
                               const QuadSpec& spec = {});

/// Point where `damping` first falls below `threshold`, located by doubling
/// then bisection. Exposed for callers that need the truncation point.
double envelope_cutoff(const RealFn& damping, double lo, double threshold);

// Brent's method. The returned abscissa sits inside a sign-changing interval
// no wider than `tol`.
double find_root(const RealFn& f, const Bracket& b, double tol = 1e-12);

// Five-point central differences for f' and f''.
Derivatives fd_derivatives(const RealFn& f, double x, double h);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace hfl::numerics
