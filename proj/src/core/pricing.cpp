#include "core/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>

#include "core/error.hpp"
#include "core/specfun.hpp"

namespace hfl::pricing {

namespace {

constexpr double kSqrt2 = 1.414213562373095048801688724209698;
constexpr double kPi = 3.141592653589793238462643383279503;
constexpr double kBranch = 1.0;

// 2 sum_{j>=3} eps^{j-3} / j!, i.e. (2 e^eps - eps^2 - 2 eps - 2) / eps^3.
double bracket_series(double eps) {
  double term = 1.0 / 6.0;
  double sum = term;
  for (int j = 4; j < 60; ++j) {
    term *= eps / j;
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
  }
  return 2.0 * sum;
}

void check_times(double t, double T, const char* what) {
  require(std::isfinite(t) && std::isfinite(T) && t < T, ErrorCode::InvalidArgument,
          (std::string(what) + ": need t < T").c_str());
}

std::vector<double> breakpoints(double lo, double hi, std::vector<double> cuts) {
  std::vector<double> pts{lo};
  std::sort(cuts.begin(), cuts.end());
  const double gap = 1e-9 * (hi - lo) + 1e-14 * std::max(std::abs(lo), std::abs(hi));
  for (double c : cuts)
    if (c > pts.back() + gap && c < hi - gap) pts.push_back(c);
  pts.push_back(hi);
  return pts;
}

double integrate_pieces(const numerics::RealFn& f, const std::vector<double>& pts,
                        const numerics::QuadSpec& qs) {
  numerics::CompensatedSum s;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) s.add(numerics::integrate(f, pts[i], pts[i + 1], qs));
  return s.value();
}

}  // namespace

Payoff Payoff::one() {
  return {[](double) { return 1.0; }, [](double) { return 0.0; }, [](double) { return 0.0; },
          std::nullopt, 0.0, "one"};
}

Payoff Payoff::linear() {
  return {[](double x) { return x; }, [](double) { return 1.0; }, [](double) { return 0.0; },
          std::nullopt, 0.0, "linear"};
}

Payoff Payoff::put_on_rate(double strike) {
  require(std::isfinite(strike), ErrorCode::InvalidArgument, "put_on_rate: strike must be finite");
  return {[strike](double x) { return std::max(strike - x, 0.0); },
          [strike](double x) { return x < strike ? -1.0 : 0.0; },
          [](double) { return 0.0; },
          strike,
          1.0,
          "put-on-rate"};
}

double q_source(const model::ModelParams& p, const Payoff& pay, double t, double x, double T,
                double f_offset) {
  if (!(x > 0.0 && x < p.L())) fail(ErrorCode::OutOfDomain, "q_source: x must lie in (0, L)");
  require(t <= T, ErrorCode::InvalidArgument, "q_source: need t <= T");
  const double D = T - t;
  const double e = std::exp(-x * D + model::f_func(p, x) + f_offset);
  const double h1 = -D + model::f_prime(p, x);
  const double h2 = model::f_second(p, x);
  const double g = pay.g(x), g1 = pay.g_prime(x), g2 = pay.g_double_prime(x);
  const double mu = model::drift_tilde(p, x);
  const double s = model::vol(p, x);
  return e * (x * g + mu * (h1 * g + g1) + 0.5 * s * s * ((h1 * h1 + h2) * g + 2.0 * h1 * g1 + g2));
}

DuhamelResult price_general(const model::ModelParams& p, const spectral::DensityField& field,
                            const Payoff& pay, double t, double x, double T,
                            const DuhamelOptions& opts) {
  check_times(t, T, "price_general");
  const double L = p.L();
  if (!(x > 0.0 && x < L)) fail(ErrorCode::OutOfDomain, "price_general: x must lie in (0, L)");
  const double tau = field.options().tau_min;
  if (T - t < tau * (1.0 - 1e-12))
    fail(ErrorCode::HorizonTooShort, "price_general: T - t below the density's tau_min");
  opts.quad.validate();
  const double c = opts.f_offset;
  const double ef = std::exp(-model::f_func(p, x) - c);

  // Point source from the jump of g' (second derivative is a delta there).
  const bool kinked = pay.kink && *pay.kink > 0.0 && *pay.kink < L && pay.kink_jump != 0.0;
  auto point_source = [&](double s) {
    const double K = *pay.kink;
    const double sig = model::vol(p, K);
    return 0.5 * sig * sig * pay.kink_jump * std::exp(-K * (T - s) + model::f_func(p, K) + c);
  };

  std::vector<double> cuts{x};
  if (kinked) cuts.push_back(*pay.kink);
  const auto pts = breakpoints(0.0, L, cuts);
  numerics::QuadSpec inner = opts.quad;
  inner.abs_tol *= 1e-2;

  auto slice = [&](double s) {
    auto f = [&](double xi) { return field(t, x, s, xi) * q_source(p, pay, s, xi, T, c); };
    double v = integrate_pieces(f, pts, inner);
    if (kinked) v += field(t, x, s, *pay.kink) * point_source(s);
    return v;
  };

  const double s0 = std::min(t + tau, T);
  double bulk = 0.0;
  if (T - s0 > 1e-14 * std::max(1.0, T)) bulk = numerics::integrate(slice, s0, T, opts.quad);

  // Over [t, t + tau] the density is close to a point mass at x:
  // int q(s, x) ds plus the first-order spreading term (tau^2/2) A~q.
  const double span = s0 - t;
  const double direct = numerics::integrate(
      [&](double s) { return q_source(p, pay, s, x, T, c); }, t, s0, opts.quad);
  const double hx = 1e-3 * std::min(x, L - x);
  const double sm = t + 2.0 * span / 3.0;
  const auto d = numerics::fd_derivatives([&](double v) { return q_source(p, pay, sm, v, T, c); }, x, hx);
  const double sig = model::vol(p, x);
  const double spread = 0.5 * span * span * (model::drift_tilde(p, x) * d.first + 0.5 * sig * sig * d.second);
  double sliver = direct + spread;
  double neglected = std::abs(spread);

  // A kink within reach of the short-time spread: the Taylor term above does not
  // see it, so smooth q and the point source with a Gaussian in the unit-diffusion
  // coordinate z = int dx / sigma instead.
  if (kinked && std::abs(*pay.kink - x) < 12.0 * sig * std::sqrt(span)) {
    const double k = p.k(), a = p.a();
    auto to_z = [&](double v) { return k == 0.0 ? std::log(v) / a : std::pow(v, k) / (a * k); };
    auto from_z = [&](double z) { return k == 0.0 ? std::exp(a * z) : std::pow(a * k * z, 1.0 / k); };
    const double dsig = a * (1.0 - k) * std::pow(x, -k);
    const double b = model::drift_tilde(p, x) / sig - 0.5 * dsig;
    const double z0 = to_z(x), zK = to_z(*pay.kink);
    auto gauss_slice = [&](double s) {
      const double u = s - t;
      if (u <= 0.0) return q_source(p, pay, s, x, T, c);
      const double m = z0 + b * u, sd = std::sqrt(u);
      auto phi = [&](double z) {
        const double w = (z - m) / sd;
        return std::exp(-0.5 * w * w) / (sd * std::sqrt(2.0 * kPi));
      };
      const double zlo = std::max(m - 10.0 * sd, to_z(1e-12 * L));
      const double zhi = std::min(m + 10.0 * sd, to_z(L * (1.0 - 1e-12)));
      if (!(zhi > zlo)) return 0.0;
      double v = integrate_pieces([&](double z) { return phi(z) * q_source(p, pay, s, from_z(z), T, c); },
                                  breakpoints(zlo, zhi, {zK, m}), inner);
      v += phi(zK) / model::vol(p, *pay.kink) * point_source(s);
      return v;
    };
    const double smoothed = numerics::integrate(gauss_slice, t, s0, opts.quad);
    neglected = std::abs(smoothed - direct);
    sliver = smoothed;
  }

  const double value = std::exp(-x * (T - t)) * pay.g(x) + ef * (bulk + sliver);
  return {value, ef * sliver, ef * neglected};
}

double h_kernel_k_half_direct(double a, double t, double T, double xi, double lambda) {
  const double D = T - t;
  const double cc = lambda + xi;
  const double e = cc * D;
  const double pre = 0.5 * a * a * xi * std::exp(xi * (kSqrt2 / a - D));
  return pre * (2.0 * std::exp(e) - e * e - 2.0 * e - 2.0) / (cc * cc * cc);
}

double h_kernel_k_half_series(double a, double t, double T, double xi, double lambda) {
  const double D = T - t;
  const double pre = 0.5 * a * a * xi * std::exp(xi * (kSqrt2 / a - D));
  return pre * D * D * D * bracket_series((lambda + xi) * D);
}

double h_kernel_k_half(double a, double t, double T, double xi, double lambda) {
  if (t == T) return 0.0;
  if (std::abs((lambda + xi) * (T - t)) > kBranch) return h_kernel_k_half_direct(a, t, T, xi, lambda);
  return h_kernel_k_half_series(a, t, T, xi, lambda);
}

double h_kernel_k_neg_half_direct(double L, double t, double T, double xi, double rho) {
  const double D = T - t;
  const double lam = L * rho * rho;
  const double b = lam - xi;
  const double ex = std::exp(-xi * D), el = std::exp(-lam * D);
  const double bd = b * D;
  return xi * (ex * (bd * bd - 2.0 * bd + 2.0) - 2.0 * el) / (b * b * b) -
         (ex * (bd - 1.0) + el) / (b * b);
}

double h_kernel_k_neg_half_series(double L, double t, double T, double xi, double rho) {
  const double D = T - t;
  const double lam = L * rho * rho;
  const double bd = (lam - xi) * D;
  // e^{-lam D} sum_j (bd)^j / j! (xi D^3 / (j+3) - D^2 / (j+2))
  numerics::CompensatedSum s;
  double pw = 1.0;
  for (int j = 0; j < 60; ++j) {
    if (j > 0) pw *= bd / j;
    const double term = pw * (xi * D * D * D / (j + 3) - D * D / (j + 2));
    s.add(term);
    if (j > 2 && std::abs(term) <= 1e-17 * std::abs(s.value())) break;
  }
  return std::exp(-lam * D) * s.value();
}

double h_kernel_k_neg_half(double L, double t, double T, double xi, double rho) {
  if (t == T) return 0.0;
  if (std::abs((L * rho * rho - xi) * (T - t)) > kBranch)
    return h_kernel_k_neg_half_direct(L, t, T, xi, rho);
  return h_kernel_k_neg_half_series(L, t, T, xi, rho);
}

// The source's time integral is split as
//   int_t^T e^{lambda (s-t)} q(s) ds = q(t) / (-lambda) + O(lambda^-2).
// The first part summed over the spectrum is (-A~)^{-1} q(t), available in
// closed form through the scale function, so the series only carries the
// O(lambda^-2) remainder.
double bond_k_half(const model::ModelParams& p, const spectral::EigenSystem& sys, double t,
                   double x, double T, const BondOptions& opts) {
  if (!p.is_k_half()) fail(ErrorCode::InvalidArgument, "bond_k_half requires k=1/2");
  check_times(t, T, "bond_k_half");
  const double L = p.L(), a = p.a();
  if (!(x >= 0.0 && x <= L)) fail(ErrorCode::OutOfDomain, "bond_k_half: x must lie in [0, L]");
  const double D = T - t;
  if (x == 0.0) return 1.0;
  if (x == L) return std::exp(-L * D);

  const double r2 = kSqrt2 / a;
  const numerics::QuadSpec qs{1e-17, 1e-12, 60, 4};
  auto resolvent_src = [&](double xi) {
    return spectral::green_zero(p, x, xi) * D * D * std::exp(xi * (r2 - D));
  };
  const double quasi = integrate_pieces(resolvent_src, {0.0, x, L}, qs);

  numerics::CompensatedSum series;
  double last = 0.0;
  for (const auto& e : sys.pairs()) {
    auto f = [&](double xi) {
      const double pre = 0.5 * a * a * xi * std::exp(xi * (r2 - D));
      const double rem = h_kernel_k_half(a, t, T, xi, e.lambda) + pre * D * D / e.lambda;
      return rem * sys.kummer(e.n, xi);
    };
    const numerics::QuadSpec qn{1e-17, 1e-12, 60, e.n + 3};
    const double integral = numerics::integrate(f, 0.0, L, qn);
    last = x * sys.kummer(e.n, x) / e.c_n * integral;
    series.add(last);
  }
  const double correction = quasi + series.value();
  const double price = std::exp(-x * D) + std::exp(r2 * x) * correction;
  // Remainder terms fall off like n^-5, so the tail beyond N is about N/4
  // times the last term.
  const double tail = std::exp(r2 * x) * std::abs(last) * sys.n_max() / 4.0;
  if (tail > opts.series_tol * price) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "bond_k_half: estimated tail %.3g after %d terms exceeds %.3g of the price; raise n_max",
                  tail, sys.n_max(), opts.series_tol);
    fail(ErrorCode::SeriesNotConverged, buf);
  }
  return price;
}

double bond_k_neg_half(const model::ModelParams& p, double t, double x, double T,
                       const BondOptions& opts) {
  if (!p.is_k_neg_half()) fail(ErrorCode::InvalidArgument, "bond_k_neg_half requires k=-1/2");
  check_times(t, T, "bond_k_neg_half");
  const double L = p.L();
  if (!(x >= 0.0 && x <= L)) fail(ErrorCode::OutOfDomain, "bond_k_neg_half: x must lie in [0, L]");
  const double D = T - t;
  if (D < opts.tau_min * (1.0 - 1e-12))
    fail(ErrorCode::HorizonTooShort, "bond_k_neg_half: T - t below tau_min");
  if (x == L) return std::exp(-L * D);
  if (x == 0.0) return 1.0;  // natural origin: unreachable, limit of the formula
  if (x < 1e-6 * L) fail(ErrorCode::OutOfDomain, "bond_k_neg_half: x below 1e-6 L");

  const double pw = kSqrt2 / p.a();
  const double nu = p.nu();
  auto g0 = [D](double xi) { return -D * (1.0 - D * xi) * std::exp(-D * xi); };

  // Below xi_min both parts are O(xi^{p+1}) and dropped.
  const double xi_min = std::max(1e-6, std::pow(1e-12, 1.0 / (pw + 1.0))) * L;
  const numerics::QuadSpec qs{1e-15, 1e-12, 60, 4};
  const double quasi =
      std::pow(x, pw) *
      integrate_pieces([&](double xi) { return spectral::green_zero(p, x, xi) * std::pow(xi, pw) * g0(xi); },
                       {xi_min, x, L}, qs);

  // Inner integral over xi in w = sqrt(L/xi), where theta(rho, xi) oscillates
  // with the constant frequency nu rho.
  const double w_max = std::sqrt(L / xi_min);
  auto inner = [&](double rho) {
    const double lam = L * rho * rho;
    const double A = nu * rho;
    const auto ja = specfun::bessel_jy(nu, A);
    const double ak = specfun::abs_k_imag(nu, A);
    auto f = [&](double w) {
      const double xi = L / (w * w);
      const auto jb = specfun::bessel_jy(nu, A * w);
      const double th = (jb.first * ja.second - ja.first * jb.second) / ak;
      const double rem = h_kernel_k_neg_half(L, t, T, xi, rho) - g0(xi) / lam;
      return th * rem * 2.0 * L / (w * w * w);
    };
    const int panels = static_cast<int>(A * (w_max - 1.0) / kPi) + 4;
    return numerics::integrate(f, 1.0, w_max, {1e-14, 1e-10, 60, panels});
  };
  const double rho_max = opts.rho_max / std::sqrt(L);
  const int panels = static_cast<int>(rho_max * nu * std::sqrt(L / x) / kPi) + 8;
  const double spectral_part = numerics::integrate(
      [&](double rho) { return rho * spectral::theta_rho(p, rho, x) * inner(rho); }, 0.0, rho_max,
      {1e-12, 1e-9, 60, panels});
  return std::exp(-x * D) + quasi + 0.5 * L * kPi * kPi * spectral_part;
}

Curve yield_curve(const model::ModelParams& p, Pricer pricer, const spectral::DensityField& field,
                  double x, const std::vector<double>& maturities, const BondOptions& opts) {
  require(!maturities.empty(), ErrorCode::InvalidArgument, "yield_curve: no maturities");
  const double tau = field.options().tau_min;
  for (std::size_t i = 0; i < maturities.size(); ++i) {
    require(maturities[i] >= tau * (1.0 - 1e-12), ErrorCode::InvalidArgument,
            "yield_curve: maturities must be >= tau_min");
    if (i > 0)
      require(maturities[i] > maturities[i - 1], ErrorCode::InvalidArgument,
              "yield_curve: maturities must increase strictly");
  }
  Curve curve;
  curve.reserve(maturities.size());
  for (double T : maturities) {
    double B;
    if (pricer == Pricer::Duhamel) {
      B = price_general(p, field, Payoff::one(), 0.0, x, T).value;
    } else if (p.is_k_half()) {
      const auto* sys = field.eigen_system();
      require(sys != nullptr, ErrorCode::InvalidArgument, "yield_curve: k=1/2 needs an eigen-system");
      B = bond_k_half(p, *sys, 0.0, x, T, opts);
    } else if (p.is_k_neg_half()) {
      B = bond_k_neg_half(p, 0.0, x, T, opts);
    } else {
      fail(ErrorCode::InvalidArgument, "analytic bond prices exist for k=1/2 and k=-1/2 only");
    }
    curve.push_back({T, B, -std::log(B) / T});
  }
  return curve;
}

}  // namespace hfl::pricing
