#pragma once

#include <string>
#include <utility>

namespace hfl::model {

/// Power-law short-rate family on (0, L):
///   sigma(x) = a x^(1-k),  mu(x) = a^2 (1/4 - k/2) x^(1-2k).
class ModelParams {
 public:
  // Throws InvalidArgument for a <= 0, L <= 0 or non-finite inputs, and for
  // k = -1/2 with 2 sqrt(2)/a within 1e-9 of an integer.
  ModelParams(double k, double a, double L);

  double k() const noexcept { return k_; }
  double a() const noexcept { return a_; }
  double L() const noexcept { return L_; }

  bool is_k_half() const noexcept;
  bool is_k_neg_half() const noexcept;
  /// Bessel order 2 sqrt(2) / a of the k = -1/2 eigenfunctions.
  double nu() const noexcept;

 private:
  double k_;
  double a_;
  double L_;
};

enum class BoundaryClass { Regular, Exit, Natural };
enum class SpectrumKind { PurelyDiscrete, PurelyContinuous, Mixed };

struct SpectrumClass {
  SpectrumKind kind;
  double cutoff;  ///< -a^2/32 for Mixed, NaN otherwise
};

/// Outcome of the I0/J0 convergence probe at the origin. Estimates are
/// +infinity when the corresponding integral diverges.
struct BoundaryReport {
  BoundaryClass boundary;
  SpectrumClass spectrum;
  bool i0_finite;
  bool j0_finite;
  double i0_estimate;
  double j0_estimate;
};

const char* to_string(BoundaryClass c) noexcept;
std::string to_string(const SpectrumClass& s);

// Coefficients; x must lie in (0, L).
double drift(const ModelParams& p, double x);
double vol(const ModelParams& p, double x);
double drift_tilde(const ModelParams& p, double x);

// f with additive constant 0 and its derivatives; x in (0, L].
double f_func(const ModelParams& p, double x);
double f_prime(const ModelParams& p, double x);
double f_second(const ModelParams& p, double x);

// Scale and speed densities with C = 1; x in (0, L).
double scale_density(const ModelParams& p, double x);
double speed_density(const ModelParams& p, double x);
/// Logarithms of the densities, valid for any x > 0 (no overflow).
double log_scale_density(const ModelParams& p, double x);
double log_speed_density(const ModelParams& p, double x);

BoundaryClass classify_origin(const ModelParams& p) noexcept;
SpectrumClass classify_spectrum(const ModelParams& p) noexcept;

// Probes finiteness of I0 and J0 on [delta, eps] along delta = eps 2^-j,
// j <= 40. Throws Inconclusive when the ladder does not settle.
BoundaryReport classify_origin_numeric(const ModelParams& p, double eps);

/// Liouville coordinate z(x) and potential U(x).
std::pair<double, double> liouville(const ModelParams& p, double x);

}  // namespace hfl::model
