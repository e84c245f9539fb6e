#include "core/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "core/error.hpp"
#include "core/numerics.hpp"
#include "core/specfun.hpp"

namespace hfl::model {

namespace {

constexpr double kSqrt2 = 1.414213562373095048801688724209698;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBranchTol = 1e-12;

void check_open(const ModelParams& p, double x, const char* what) {
  if (!(x > 0.0 && x < p.L())) fail(ErrorCode::OutOfDomain, std::string(what) + ": x must lie in (0, L)");
}

void check_half_open(const ModelParams& p, double x, const char* what) {
  if (!(x > 0.0 && x <= p.L())) fail(ErrorCode::OutOfDomain, std::string(what) + ": x must lie in (0, L]");
}

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

struct Probe {
  bool finite;
  double estimate;
};

// Finiteness of  int_0^eps A(z) int_z^eps B(u) du dz  judged from the ratios
// of successive dyadic panel contributions. A and B enter through their
// logarithms so that exponentially large densities near the origin do not
// overflow.
Probe probe_nested(const numerics::RealFn& log_a, const numerics::RealFn& log_b, double eps) {
  constexpr int kRungs = 40;
  constexpr int kMinRung = 10;
  const numerics::QuadSpec qs{1e-13, 1e-10, 60, 1};

  std::vector<double> log_panel;
  double log_c_hi = -kInf;  // log int_{hi}^eps B
  for (int j = 0; j < kRungs; ++j) {
    const double hi = std::ldexp(eps, -j);
    const double lo = 0.5 * hi;

    // log int_z^hi B(u) du, scaled so the quadrature sees O(1) values.
    auto log_inner = [&](double z) {
      if (z >= hi) return -kInf;
      const double r = std::max(log_b(z), log_b(hi));
      const double w = hi - z;
      const double v = numerics::integrate(
          [&](double t) { return std::exp(log_b(z + w * t) - r); }, 0.0, 1.0, qs);
      return r + std::log(w * v);
    };
    auto g = [&](double z) { return log_a(z) + log_add(log_c_hi, log_inner(z)); };

    const double ref = std::max({g(lo), g(0.75 * lo + 0.25 * hi), g(0.5 * (lo + hi))});
    const double width = hi - lo;
    double log_p = kInf;
    if (std::isfinite(ref)) {
      const double v = numerics::integrate(
          [&](double t) { return std::exp(g(lo + width * t) - ref); }, 0.0, 1.0, qs);
      log_p = ref + std::log(width * v);
    }
    if (!std::isfinite(log_p)) return {false, kInf};
    log_panel.push_back(log_p);
    log_c_hi = log_add(log_c_hi, log_inner(lo));

    if (j < kMinRung) continue;
    double r[4];
    for (int i = 0; i < 4; ++i) r[i] = std::exp(log_panel[j - 3 + i] - log_panel[j - 4 + i]);
    const double d0 = r[1] - r[0], d1 = r[2] - r[1], d2 = r[3] - r[2];
    const double spread = std::max({std::abs(d0), std::abs(d1), std::abs(d2)});

    // Divergence: increments no longer shrink, and the ratios are either
    // settled or still growing (super-geometric blow-up).
    if (std::min({r[1], r[2], r[3]}) >= 0.99 &&
        ((d1 >= 0.0 && d2 >= 0.0) || spread <= 1e-2 * r[3]))
      return {false, kInf};

    // Ratios creeping up towards 1 with shrinking steps: Aitken's
    // delta-squared estimate of their limit exposes a log-type divergence.
    double limit = r[3];
    if (std::abs(d2 - d1) > 1e-14) limit = r[3] - d2 * d2 / (d2 - d1);
    if (d1 > 0.0 && d2 > 0.0 && d2 < d1 && r[3] >= 0.95 && limit >= 0.995) return {false, kInf};

    // Convergence is only trusted once both integrands behave like stable
    // power laws, and once a divergent inner integral dominates its bounded
    // part whenever A alone is integrable (otherwise A times a constant
    // masquerades as the asymptotic integrand).
    const double ln2 = std::log(2.0);
    const double pa = (log_a(hi) - log_a(lo)) / ln2;
    const double pa_prev = (log_a(2.0 * hi) - log_a(hi)) / ln2;
    const double pb = (log_b(hi) - log_b(lo)) / ln2;
    const double pb_prev = (log_b(2.0 * hi) - log_b(hi)) / ln2;
    if (std::abs(pa - pa_prev) > 1e-2 || std::abs(pb - pb_prev) > 1e-2) continue;
    if (pb < -1.02 && pa > -1.0 && pa + pb < -1.98 &&
        log_c_hi > std::log(lo / (-pb - 1.0)) + log_b(lo) + 0.05)
      continue;
    const bool monotone = (d0 >= 0.0 && d1 >= 0.0 && d2 >= 0.0) || (d0 <= 0.0 && d1 <= 0.0 && d2 <= 0.0);
    if (std::max({r[1], r[2], r[3]}) <= 0.98 && limit <= 0.98 && (monotone || spread <= 1e-6)) {
      numerics::CompensatedSum total;
      for (double lp : log_panel) total.add(std::exp(lp));
      total.add(std::exp(log_panel[j]) * r[3] / (1.0 - r[3]));
      return {true, total.value()};
    }
  }
  fail(ErrorCode::Inconclusive,
       "classify_origin_numeric: convergence probe undecided after 40 halvings");
}

}  // namespace

ModelParams::ModelParams(double k, double a, double L) : k_(k), a_(a), L_(L) {
  require(std::isfinite(k) && std::isfinite(a) && std::isfinite(L), ErrorCode::InvalidArgument,
          "ModelParams: non-finite parameter");
  require(a > 0.0, ErrorCode::InvalidArgument, "ModelParams: a must be > 0");
  require(L > 0.0, ErrorCode::InvalidArgument, "ModelParams: L must be > 0");
  if (is_k_neg_half() && specfun::near_integer(nu()))
    fail(ErrorCode::InvalidArgument,
         "ModelParams: 2*sqrt(2)/a is (nearly) an integer; the k=-1/2 eigenfunctions degenerate");
}

bool ModelParams::is_k_half() const noexcept { return std::abs(k_ - 0.5) < kBranchTol; }
bool ModelParams::is_k_neg_half() const noexcept { return std::abs(k_ + 0.5) < kBranchTol; }
double ModelParams::nu() const noexcept { return 2.0 * kSqrt2 / a_; }

const char* to_string(BoundaryClass c) noexcept {
  switch (c) {
    case BoundaryClass::Regular: return "regular";
    case BoundaryClass::Exit: return "exit";
    case BoundaryClass::Natural: return "natural";
  }
  return "unknown";
}

std::string to_string(const SpectrumClass& s) {
  switch (s.kind) {
    case SpectrumKind::PurelyDiscrete: return "discrete";
    case SpectrumKind::PurelyContinuous: return "continuous";
    case SpectrumKind::Mixed: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "mixed; cutoff %.17g", s.cutoff);
      return buf;
    }
  }
  return "unknown";
}

double drift(const ModelParams& p, double x) {
  check_open(p, x, "drift");
  const double k = p.k(), a = p.a();
  return a * a * (0.25 - 0.5 * k) * std::pow(x, 1.0 - 2.0 * k);
}

double vol(const ModelParams& p, double x) {
  check_open(p, x, "vol");
  return p.a() * std::pow(x, 1.0 - p.k());
}

double drift_tilde(const ModelParams& p, double x) {
  check_open(p, x, "drift_tilde");
  const double s = vol(p, x);
  return drift(p, x) - s * s * f_prime(p, x);
}

double f_func(const ModelParams& p, double x) {
  check_half_open(p, x, "f_func");
  if (p.is_k_neg_half()) return -kSqrt2 / p.a() * std::log(x);
  const double k = p.k();
  return -2.0 * kSqrt2 / (p.a() * (2.0 * k + 1.0)) * std::pow(x, k + 0.5);
}

double f_prime(const ModelParams& p, double x) {
  check_half_open(p, x, "f_prime");
  return -kSqrt2 / p.a() * std::pow(x, p.k() - 0.5);
}

double f_second(const ModelParams& p, double x) {
  check_half_open(p, x, "f_second");
  const double k = p.k();
  return -kSqrt2 / p.a() * (k - 0.5) * std::pow(x, k - 1.5);
}

double log_scale_density(const ModelParams& p, double x) {
  require(x > 0.0, ErrorCode::OutOfDomain, "log_scale_density: x must be > 0");
  const double k = p.k(), a = p.a();
  if (p.is_k_neg_half()) return (-1.0 - 2.0 * kSqrt2 / a) * std::log(x);
  return (k - 0.5) * std::log(x) - 2.0 * kSqrt2 / (a * (k + 0.5)) * std::pow(x, k + 0.5);
}

double log_speed_density(const ModelParams& p, double x) {
  require(x > 0.0, ErrorCode::OutOfDomain, "log_speed_density: x must be > 0");
  const double k = p.k(), a = p.a();
  const double c = std::log(2.0 / (a * a));
  if (p.is_k_neg_half()) return c + (-2.0 + 2.0 * kSqrt2 / a) * std::log(x);
  return c + (k - 1.5) * std::log(x) + 2.0 * kSqrt2 / (a * (k + 0.5)) * std::pow(x, k + 0.5);
}

double scale_density(const ModelParams& p, double x) {
  check_open(p, x, "scale_density");
  return std::exp(log_scale_density(p, x));
}

double speed_density(const ModelParams& p, double x) {
  check_open(p, x, "speed_density");
  return std::exp(log_speed_density(p, x));
}

BoundaryClass classify_origin(const ModelParams& p) noexcept {
  if (p.k() <= 0.0) return BoundaryClass::Natural;
  if (p.k() <= 0.5) return BoundaryClass::Exit;
  return BoundaryClass::Regular;
}

SpectrumClass classify_spectrum(const ModelParams& p) noexcept {
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  if (p.k() > 0.0) return {SpectrumKind::PurelyDiscrete, kNaN};
  if (p.k() < 0.0) return {SpectrumKind::PurelyContinuous, kNaN};
  return {SpectrumKind::Mixed, -p.a() * p.a() / 32.0};
}

BoundaryReport classify_origin_numeric(const ModelParams& p, double eps) {
  require(eps > 0.0 && eps < p.L(), ErrorCode::InvalidArgument,
          "classify_origin_numeric: eps must lie in (0, L)");
  auto ls = [&p](double x) { return log_scale_density(p, x); };
  auto lm = [&p](double x) { return log_speed_density(p, x); };
  // I0 = int_0^eps S(0,z] m(z) dz = int_0^eps s(u) M[u,eps] du (Fubini).
  const Probe i0 = probe_nested(ls, lm, eps);
  const Probe j0 = probe_nested(lm, ls, eps);

  BoundaryClass boundary;
  if (i0.finite && j0.finite)
    boundary = BoundaryClass::Regular;
  else if (i0.finite)
    boundary = BoundaryClass::Exit;
  else if (!j0.finite)
    boundary = BoundaryClass::Natural;
  else
    fail(ErrorCode::Inconclusive,
         "classify_origin_numeric: I0 infinite with J0 finite matches no boundary class");
  return {boundary, classify_spectrum(p), i0.finite, j0.finite, i0.estimate, j0.estimate};
}

std::pair<double, double> liouville(const ModelParams& p, double x) {
  check_open(p, x, "liouville");
  const double k = p.k(), a = p.a();
  if (k == 0.0) return {std::log(x) / a, x + a * a / 32.0};
  const double z = std::pow(x, k) / (a * k);
  const double u = x + a * a * (4.0 * k + 1.0) / 32.0 * std::pow(x, -2.0 * k);
  return {z, u};
}

}  // namespace hfl::model
