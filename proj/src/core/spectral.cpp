#include "core/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "core/error.hpp"
#include "core/specfun.hpp"

namespace hfl::spectral {

namespace {

constexpr double kSqrt2 = 1.414213562373095048801688724209698;
constexpr double kPi = 3.141592653589793238462643383279503;

double kummer_alpha(double a, double lambda) { return 1.0 - lambda / (a * kSqrt2); }

void require_k_half(const model::ModelParams& p, const char* what) {
  if (!p.is_k_half()) fail(ErrorCode::InvalidArgument, std::string(what) + " requires k=1/2");
}

void require_k_neg_half(const model::ModelParams& p, const char* what) {
  if (!p.is_k_neg_half()) fail(ErrorCode::InvalidArgument, std::string(what) + " requires k=-1/2");
}

// Scan step in lambda. Roots of M(alpha, 2; z) in alpha crowd together as
// |z| grows, so the step shrinks once |z| exceeds 4.
double scan_step(const model::ModelParams& p) {
  const double z = 2.0 * kSqrt2 * p.L() / p.a();
  return p.a() / kSqrt2 * std::min(1.0, 4.0 / z);
}

double c_n_integral(const model::ModelParams& p, double lambda, int n) {
  const double a = p.a();
  const double alpha = kummer_alpha(a, lambda);
  const double b = 2.0 * kSqrt2 / a;
  auto integrand = [&](double x) {
    const double m = specfun::kummer_m(alpha, 2.0, -b * x);
    return x * std::exp(b * x) * m * m;
  };
  const numerics::QuadSpec qs{1e-300, 1e-11, 60, 2 * n + 2};
  return numerics::integrate(integrand, 0.0, p.L(), qs);
}

}  // namespace

EigenSystem::EigenSystem(model::ModelParams params, std::vector<EigenPair> pairs)
    : params_(params), pairs_(std::move(pairs)) {
  require_k_half(params_, "EigenSystem");
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    const auto& e = pairs_[i];
    require(e.n == static_cast<int>(i) + 1, ErrorCode::InvalidArgument,
            "EigenSystem: pairs must be indexed 1..n in order");
    require(e.lambda < 0.0 && e.c_n > 0.0, ErrorCode::InvalidArgument,
            "EigenSystem: need lambda < 0 and c_n > 0");
    if (i > 0)
      require(e.lambda < pairs_[i - 1].lambda, ErrorCode::InvalidArgument,
              "EigenSystem: eigenvalues must decrease strictly");
  }
}

const EigenPair& EigenSystem::pair(int n) const {
  if (n < 1 || n > n_max())
    fail(ErrorCode::IndexOutOfRange,
         "eigen index " + std::to_string(n) + " outside 1.." + std::to_string(n_max()));
  return pairs_[n - 1];
}

double EigenSystem::kummer(int n, double x) const {
  const double a = params_.a();
  return specfun::kummer_m(kummer_alpha(a, pair(n).lambda), 2.0, -2.0 * kSqrt2 * x / a);
}

double eigen_equation(const model::ModelParams& p, double lambda) {
  require_k_half(p, "eigen_equation");
  return specfun::kummer_m(kummer_alpha(p.a(), lambda), 2.0, -2.0 * kSqrt2 * p.L() / p.a());
}

EigenSystem solve_eigen(const model::ModelParams& p, int n_max) {
  if (!p.is_k_half()) fail(ErrorCode::InvalidArgument, "discrete eigensolver requires k=1/2");
  require(n_max >= 1, ErrorCode::InvalidArgument, "solve_eigen: n_max must be >= 1");

  auto f = [&p](double lambda) { return eigen_equation(p, lambda); };
  const double step = scan_step(p);
  const double floor = -1e4 * p.a();

  std::vector<EigenPair> pairs;
  pairs.reserve(n_max);
  double hi = -0.0;
  double f_hi = f(hi);
  while (static_cast<int>(pairs.size()) < n_max) {
    const double lo = hi - step;
    if (lo < floor)
      fail(ErrorCode::BracketScanExhausted,
           "solve_eigen: only " + std::to_string(pairs.size()) + " of " +
               std::to_string(n_max) + " eigenvalues above lambda = " + std::to_string(floor));
    const double f_lo = f(lo);
    if (f_lo == 0.0) {
      pairs.push_back({static_cast<int>(pairs.size()) + 1, lo, 0.0});
    } else if (f_lo * f_hi < 0.0) {
      const double root = numerics::find_root(f, {lo, hi, f_lo, f_hi},
                                              1e-12 * std::max(1.0, std::abs(lo)));
      pairs.push_back({static_cast<int>(pairs.size()) + 1, root, 0.0});
    }
    hi = lo;
    f_hi = f_lo;
  }
  for (auto& e : pairs) e.c_n = c_n_integral(p, e.lambda, e.n);
  return EigenSystem(p, std::move(pairs));
}

double psi_n(const EigenSystem& sys, int n, double x) {
  const auto& p = sys.params();
  const EigenPair& e = sys.pair(n);
  if (!(x >= 0.0 && x <= p.L())) fail(ErrorCode::OutOfDomain, "psi_n: x must lie in [0, L]");
  return p.a() / std::sqrt(2.0 * e.c_n) * x * sys.kummer(n, x);
}

double theta_rho(const model::ModelParams& p, double rho, double x) {
  require_k_neg_half(p, "theta_rho");
  require(rho > 0.0, ErrorCode::OutOfDomain, "psi_rho: rho must be > 0");
  if (!(x >= 1e-6 * p.L() && x <= p.L()))
    fail(ErrorCode::OutOfDomain, "psi_rho: x must lie in [1e-6 L, L]");
  const double nu = p.nu();
  const double A = nu * rho;
  const double B = A * std::sqrt(p.L() / x);
  const auto ja = specfun::bessel_jy(nu, A);
  const auto jb = specfun::bessel_jy(nu, B);
  // J_nu(A) J_-nu(B) - J_-nu(A) J_nu(B) = sin(nu pi) (J_nu(B) Y_nu(A) - J_nu(A) Y_nu(B)),
  // so the csc prefactor cancels exactly.
  const double bracket = jb.first * ja.second - ja.first * jb.second;
  return bracket / specfun::abs_k_imag(nu, A);
}

double psi_rho(const model::ModelParams& p, double rho, double x) {
  const double th = theta_rho(p, rho, x);
  return std::sqrt(p.L() * rho / 2.0) * kPi * th * std::pow(x, -kSqrt2 / p.a());
}

double greens_wronskian(const model::ModelParams& p, double lambda, double x) {
  require_k_neg_half(p, "greens_wronskian");
  require(lambda > 0.0, ErrorCode::InvalidArgument, "greens_wronskian: lambda must be > 0");
  if (!(x > 0.0 && x < p.L())) fail(ErrorCode::OutOfDomain, "greens_wronskian: x must lie in (0, L)");
  const double nu = p.nu();
  const double pw = kSqrt2 / p.a();
  const double u = nu * std::sqrt(lambda / x);
  const double du = -u / (2.0 * x);
  const auto bu = specfun::bessel_ik(nu, u);
  const auto bv = specfun::bessel_ik(nu, nu * std::sqrt(lambda / p.L()));

  const double xp = std::pow(x, -pw);
  const double dxp = -pw * xp / x;
  const double psi = xp * bu.second;
  const double dpsi = dxp * bu.second + xp * bu.second_prime * du;
  const double core = bu.first * bv.second - bv.first * bu.second;
  const double dcore = (bu.first_prime * bv.second - bv.first * bu.second_prime) * du;
  const double phi = xp * core;
  const double dphi = dxp * core + xp * dcore;
  return (dpsi * phi - psi * dphi) / model::scale_density(p, x);
}

double green_zero(const model::ModelParams& p, double x, double xi) {
  const double L = p.L(), a = p.a();
  if (!(x > 0.0 && x <= L && xi > 0.0 && xi <= L))
    fail(ErrorCode::OutOfDomain, "green_zero: arguments must lie in (0, L]");
  const double lo = std::min(x, xi), hi = std::max(x, xi);
  if (p.is_k_half()) {
    // S(x) = (a / (2 sqrt2)) (1 - e^{-2 sqrt2 x / a}), exit boundary at 0.
    const double b = 2.0 * kSqrt2 / a;
    auto S = [b](double v) { return -std::expm1(-b * v) / b; };
    const double tail = (std::exp(-b * hi) - std::exp(-b * L)) / b;
    return S(lo) * tail / S(L);
  }
  if (p.is_k_neg_half()) {
    // Natural origin: the bounded solution there is constant.
    const double pw = 2.0 * kSqrt2 / a;
    return (std::pow(hi, -pw) - std::pow(L, -pw)) / pw;
  }
  fail(ErrorCode::InvalidArgument, "green_zero: closed form only for k=1/2 and k=-1/2");
}

void DensityOptions::validate() const {
  require(tau_min > 0.0, ErrorCode::InvalidArgument, "DensityOptions: tau_min must be > 0");
  require(rho_eps > 0.0 && rho_eps < 1.0, ErrorCode::InvalidArgument,
          "DensityOptions: rho_eps must lie in (0, 1)");
  quad.validate();
}

DensityField::DensityField(model::ModelParams p, std::optional<EigenSystem> sys,
                           DensityOptions opts)
    : params_(p), sys_(std::move(sys)), opts_(opts) {
  opts_.validate();
}

DensityField DensityField::discrete(EigenSystem sys, DensityOptions opts) {
  const auto p = sys.params();
  return DensityField(p, std::move(sys), opts);
}

DensityField DensityField::continuous(const model::ModelParams& p, DensityOptions opts) {
  require_k_neg_half(p, "continuous density");
  return DensityField(p, std::nullopt, opts);
}

DensityField DensityField::for_params(const model::ModelParams& p, int n_max, DensityOptions opts) {
  if (p.is_k_half()) return discrete(solve_eigen(p, n_max), opts);
  if (p.is_k_neg_half()) return continuous(p, opts);
  fail(ErrorCode::InvalidArgument, "transition density implemented for k=1/2 and k=-1/2 only");
}

DensityValue DensityField::evaluate(double t, double x, double T, double y) const {
  const double L = params_.L();
  require(t >= 0.0 && t < T, ErrorCode::InvalidArgument, "density: need 0 <= t < T");
  if (!(x > 0.0 && x < L && y > 0.0 && y < L))
    fail(ErrorCode::OutOfDomain, "density: x and y must lie in (0, L)");
  const double D = T - t;
  if (D < opts_.tau_min)
    fail(ErrorCode::HorizonTooShort,
         "density: T - t = " + std::to_string(D) + " below tau_min = " + std::to_string(opts_.tau_min));

  const double log_m = model::log_speed_density(params_, y);
  if (sys_) {
    numerics::CompensatedSum sum;
    double envelope = 0.0;
    for (const auto& e : sys_->pairs()) {
      const double pp = psi_n(*sys_, e.n, x) * psi_n(*sys_, e.n, y);
      envelope = std::max(envelope, std::abs(pp));
      sum.add(std::exp(e.lambda * D) * pp);
    }
    // Remaining terms: lambda_m <= lambda_N - (m - N) g with g the last gap,
    // and eigenfunction products bounded by twice the largest seen.
    const auto& ps = sys_->pairs();
    const int N = sys_->n_max();
    const double gap = N >= 2 ? ps[N - 2].lambda - ps[N - 1].lambda : -ps[0].lambda;
    const double r = std::exp(-gap * D);
    const double m = std::exp(log_m);
    const double tail = std::exp(ps[N - 1].lambda * D) * m * 2.0 * envelope * r / (1.0 - r);
    return {m * sum.value(), tail};
  }

  const double nu = params_.nu();
  const double pw = kSqrt2 / params_.a();
  const double rho_max = std::sqrt(std::log(1.0 / opts_.rho_eps) / (L * D));
  const double freq = nu * (std::sqrt(L / x) + std::sqrt(L / y));
  numerics::QuadSpec qs = opts_.quad;
  qs.initial_panels = std::max(qs.initial_panels, static_cast<int>(rho_max * freq / kPi) + 8);
  auto integrand = [&](double rho) {
    return std::exp(-L * rho * rho * D) * rho * theta_rho(params_, rho, x) * theta_rho(params_, rho, y);
  };
  const double integral = numerics::integrate(integrand, 0.0, rho_max, qs);
  // (2/a^2) y^{-2+2p} psi(x) psi(y) with psi = sqrt(L rho/2) pi theta x^{-p}.
  const double pref = std::exp(log_m) * 0.5 * L * kPi * kPi * std::pow(x * y, -pw);
  // Beyond rho_max: int rho e^{-L rho^2 D} = eps / (2 L D), with |theta| <= 2.
  return {pref * integral, pref * 4.0 * opts_.rho_eps / (2.0 * L * D)};
}

}  // namespace hfl::spectral
