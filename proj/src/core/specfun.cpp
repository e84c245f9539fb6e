#include "core/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "core/error.hpp"
#include "core/numerics.hpp"

namespace hfl::specfun {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kFpMin = std::numeric_limits<double>::min() / kEps;
constexpr int kMaxIt = 100000;
constexpr double kMaxOrder = 20.0;
constexpr double kMaxKummerArg = 200.0;

// Power series coefficients of 1/Gamma(z) (Abramowitz & Stegun 6.1.34).
constexpr std::array<double, 26> kInvGamma = {
    1.0,
    0.5772156649015329,
    -0.6558780715202538,
    -0.0420026350340952,
    0.1665386113822915,
    -0.0421977345555443,
    -0.0096219715278770,
    0.0072189432466630,
    -0.0011651675918591,
    -0.0002152416741149,
    0.0001280502823882,
    -0.0000201348547807,
    -0.0000012504934821,
    0.0000011330272320,
    -0.0000002056338417,
    0.0000000061160950,
    0.0000000050020075,
    -0.0000000011812746,
    0.0000000001043427,
    0.0000000000077823,
    -0.0000000000036968,
    0.0000000000005100,
    -0.0000000000000206,
    -0.0000000000000054,
    0.0000000000000014,
    0.0000000000000001};

// Temme's auxiliary functions for |mu| <= 1/2:
//   gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)
//   gam2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2
struct Temme {
  double gam1, gam2, gampl, gammi;
};

Temme temme_gammas(double mu) {
  const double mu2 = mu * mu;
  double odd = 0.0, even = 0.0;
  for (int k = 12; k >= 0; --k) {
    odd = odd * mu2 + kInvGamma[2 * k + 1];
    even = even * mu2 + kInvGamma[2 * k];
  }
  Temme t{-odd, even, 0.0, 0.0};
  t.gampl = t.gam2 - mu * t.gam1;  // 1/Gamma(1+mu)
  t.gammi = t.gam2 + mu * t.gam1;  // 1/Gamma(1-mu)
  return t;
}

void check_bessel_args(double nu, double x) {
  require(std::isfinite(nu) && std::isfinite(x), ErrorCode::InvalidArgument,
          "bessel: non-finite argument");
  require(x > 0.0, ErrorCode::OutOfDomain, "bessel: x must be > 0");
  require(std::abs(nu) <= kMaxOrder, ErrorCode::OutOfDomain, "bessel: |nu| must be <= 20");
}

double hankel_threshold(double nu) { return std::max(25.0, nu * nu); }

// Large-argument Hankel expansions for J, Y and their derivatives.
BesselPair jy_asymptotic(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0, q = 0.0, r = 1.0, s = 0.0;
  double a = 1.0;  // a_k(nu) / x^k
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double b = a * (mu + 4.0 * k * k - 1.0) / (8.0 * k * x);
    a *= (mu - odd * odd) / (8.0 * k * x);
    const double size = std::abs(a) + std::abs(b);
    if (size > prev) break;  // series has begun to diverge
    const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      p += sign * a;
      r += sign * b;
    } else {
      q += sign * a;
      s += sign * b;
    }
    if (size < 1e-17) break;
    prev = size;
  }
  // chi = x - (nu/2 + 1/4) pi, expanded to keep the phase accurate.
  const double phase = 0.5 * nu + 0.25;
  const double cx = std::cos(x), sx = std::sin(x);
  const double cp = cos_pi(phase), sp = sin_pi(phase);
  const double cchi = cx * cp + sx * sp;
  const double schi = sx * cp - cx * sp;
  const double amp = std::sqrt(2.0 / (kPi * x));
  return {amp * (p * cchi - q * schi), amp * (p * schi + q * cchi),
          amp * (-r * schi - s * cchi), amp * (r * cchi - s * schi)};
}

// J_nu, Y_nu for nu >= 0: Steed's CF1 for J'/J with downward recurrence to a
// reduced order |mu| <= 1/2, then Temme's series (x < 2) or Steed's CF2
// (x >= 2) for the pair at the reduced order, then upward recurrence for Y.
BesselPair jy_nonnegative(double nu, double x) {
  if (x >= hankel_threshold(nu)) return jy_asymptotic(nu, x);

  constexpr double kXMin = 2.0;
  const int nl = (x < kXMin) ? static_cast<int>(nu + 0.5)
                             : std::max(0, static_cast<int>(nu - x + 1.5));
  const double xmu = nu - nl;
  const double xmu2 = xmu * xmu;
  const double xi = 1.0 / x;
  const double xi2 = 2.0 * xi;
  const double w = xi2 / kPi;

  int isign = 1;
  double h = std::max(nu * xi, kFpMin);
  double b = xi2 * nu;
  double d = 0.0;
  double c = h;
  int i = 0;
  for (; i < kMaxIt; ++i) {
    b += xi2;
    d = b - d;
    if (std::abs(d) < kFpMin) d = kFpMin;
    c = b - 1.0 / c;
    if (std::abs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = c * d;
    h *= del;
    if (d < 0.0) isign = -isign;
    if (std::abs(del - 1.0) <= kEps) break;
  }
  if (i >= kMaxIt) fail(ErrorCode::NoConvergence, "bessel_jy: continued fraction 1 failed");

  double rjl = isign * kFpMin;
  double rjpl = h * rjl;
  const double rjl1 = rjl;
  const double rjp1 = rjpl;
  double fact = nu * xi;
  for (int l = nl - 1; l >= 0; --l) {
    const double rjtemp = fact * rjl + rjpl;
    fact -= xi;
    rjpl = fact * rjtemp - rjl;
    rjl = rjtemp;
  }
  if (rjl == 0.0) rjl = kEps;
  const double f = rjpl / rjl;

  double rjmu, rymu, rymup, ry1;
  if (x < kXMin) {
    const double x2 = 0.5 * x;
    const double pimu = kPi * xmu;
    const double fct = (std::abs(pimu) < kEps) ? 1.0 : pimu / std::sin(pimu);
    double dd = -std::log(x2);
    double e = xmu * dd;
    const double fact2 = (std::abs(e) < kEps) ? 1.0 : std::sinh(e) / e;
    const Temme g = temme_gammas(xmu);
    double ff = 2.0 / kPi * fct * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * dd);
    e = std::exp(e);
    double p = e / (g.gampl * kPi);
    double q = 1.0 / (e * kPi * g.gammi);
    const double pimu2 = 0.5 * pimu;
    const double fact3 = (std::abs(pimu2) < kEps) ? 1.0 : std::sin(pimu2) / pimu2;
    const double r = kPi * pimu2 * fact3 * fact3;
    double cc = 1.0;
    dd = -x2 * x2;
    double sum = ff + r * q;
    double sum1 = p;
    int k = 1;
    for (; k <= kMaxIt; ++k) {
      ff = (k * ff + p + q) / (k * k - xmu2);
      cc *= dd / k;
      p /= (k - xmu);
      q /= (k + xmu);
      const double del = cc * (ff + r * q);
      sum += del;
      sum1 += cc * p - k * del;
      if (std::abs(del) < (1.0 + std::abs(sum)) * kEps) break;
    }
    if (k > kMaxIt) fail(ErrorCode::NoConvergence, "bessel_jy: Temme series failed");
    rymu = -sum;
    ry1 = -sum1 * xi2;
    rymup = xmu * xi * rymu - ry1;
    rjmu = w / (rymup - f * rymu);
  } else {
    double a = 0.25 - xmu2;
    double p = -0.5 * xi;
    double q = 1.0;
    const double br = 2.0 * x;
    double bi = 2.0;
    double fct = a * xi / (p * p + q * q);
    double cr = br + q * fct;
    double ci = bi + p * fct;
    double den = br * br + bi * bi;
    double dr = br / den;
    double di = -bi / den;
    double dlr = cr * dr - ci * di;
    double dli = cr * di + ci * dr;
    double temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    int k = 1;
    for (; k < kMaxIt; ++k) {
      a += 2 * k;
      bi += 2.0;
      dr = a * dr + br;
      di = a * di + bi;
      if (std::abs(dr) + std::abs(di) < kFpMin) dr = kFpMin;
      fct = a / (cr * cr + ci * ci);
      cr = br + cr * fct;
      ci = bi - ci * fct;
      if (std::abs(cr) + std::abs(ci) < kFpMin) cr = kFpMin;
      den = dr * dr + di * di;
      dr /= den;
      di /= -den;
      dlr = cr * dr - ci * di;
      dli = cr * di + ci * dr;
      temp = p * dlr - q * dli;
      q = p * dli + q * dlr;
      p = temp;
      if (std::abs(dlr - 1.0) + std::abs(dli) <= kEps) break;
    }
    if (k >= kMaxIt) fail(ErrorCode::NoConvergence, "bessel_jy: continued fraction 2 failed");
    const double gam = (p - f) / q;
    rjmu = std::copysign(std::sqrt(w / ((p - f) * gam + q)), rjl);
    rymu = rjmu * gam;
    rymup = rymu * (p + q / gam);
    ry1 = xmu * xi * rymu - rymup;
  }

  const double scale = rjmu / rjl;
  BesselPair out{};
  out.first = rjl1 * scale;
  out.first_prime = rjp1 * scale;
  for (int k = 1; k <= nl; ++k) {
    const double rytemp = (xmu + k) * xi2 * ry1 - rymu;
    rymu = ry1;
    ry1 = rytemp;
  }
  out.second = rymu;
  out.second_prime = nu * xi * rymu - ry1;
  return out;
}

// I_nu, K_nu for nu >= 0 (Temme series for x < 2, Steed/Temme CF2 otherwise).
BesselPair ik_nonnegative(double nu, double x) {
  constexpr double kXMin = 2.0;
  const int nl = static_cast<int>(nu + 0.5);
  const double xmu = nu - nl;
  const double xmu2 = xmu * xmu;
  const double xi = 1.0 / x;
  const double xi2 = 2.0 * xi;

  double h = std::max(nu * xi, kFpMin);
  double b = xi2 * nu;
  double d = 0.0;
  double c = h;
  int i = 0;
  for (; i < kMaxIt; ++i) {
    b += xi2;
    d = 1.0 / (b + d);
    c = b + 1.0 / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  if (i >= kMaxIt) fail(ErrorCode::NoConvergence, "bessel_ik: continued fraction 1 failed");

  double ril = kFpMin;
  double ripl = h * ril;
  const double ril1 = ril;
  const double rip1 = ripl;
  double fact = nu * xi;
  for (int l = nl - 1; l >= 0; --l) {
    const double ritemp = fact * ril + ripl;
    fact -= xi;
    ripl = fact * ritemp + ril;
    ril = ritemp;
  }
  const double f = ripl / ril;

  double rkmu, rk1;
  if (x < kXMin) {
    const double x2 = 0.5 * x;
    const double pimu = kPi * xmu;
    const double fct = (std::abs(pimu) < kEps) ? 1.0 : pimu / std::sin(pimu);
    const double dd = -std::log(x2);
    double e = xmu * dd;
    const double fact2 = (std::abs(e) < kEps) ? 1.0 : std::sinh(e) / e;
    const Temme g = temme_gammas(xmu);
    double ff = fct * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * dd);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / g.gampl;
    double q = 0.5 / (e * g.gammi);
    double cc = 1.0;
    const double d2 = x2 * x2;
    double sum1 = p;
    int k = 1;
    for (; k <= kMaxIt; ++k) {
      ff = (k * ff + p + q) / (k * k - xmu2);
      cc *= d2 / k;
      p /= (k - xmu);
      q /= (k + xmu);
      const double del = cc * ff;
      sum += del;
      sum1 += cc * (p - k * ff);
      if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    if (k > kMaxIt) fail(ErrorCode::NoConvergence, "bessel_ik: Temme series failed");
    rkmu = sum;
    rk1 = sum1 * xi2;
  } else {
    double bb = 2.0 * (1.0 + x);
    double dd = 1.0 / bb;
    double hh = dd;
    double delh = dd;
    double q1 = 0.0;
    double q2 = 1.0;
    const double a1 = 0.25 - xmu2;
    double q = a1;
    double cc = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    int k = 1;
    for (; k < kMaxIt; ++k) {
      a -= 2 * k;
      cc = -a * cc / (k + 1.0);
      const double qnew = (q1 - bb * q2) / a;
      q1 = q2;
      q2 = qnew;
      q += cc * qnew;
      bb += 2.0;
      dd = 1.0 / (bb + a * dd);
      delh = (bb * dd - 1.0) * delh;
      hh += delh;
      const double dels = q * delh;
      s += dels;
      if (std::abs(dels / s) < kEps) break;
    }
    if (k >= kMaxIt) fail(ErrorCode::NoConvergence, "bessel_ik: continued fraction 2 failed");
    hh *= a1;
    rkmu = std::sqrt(kPi / (2.0 * x)) * std::exp(-x) / s;
    rk1 = rkmu * (xmu + x + 0.5 - hh) * xi;
  }
  const double rkmup = xmu * xi * rkmu - rk1;
  const double rimu = xi / (f * rkmu - rkmup);
  BesselPair out{};
  out.first = rimu * ril1 / ril;
  out.first_prime = rimu * rip1 / ril;
  for (int k = 1; k <= nl; ++k) {
    const double rktemp = (xmu + k) * xi2 * rk1 + rkmu;
    rkmu = rk1;
    rk1 = rktemp;
  }
  out.second = rkmu;
  out.second_prime = nu * xi * rkmu - rk1;
  return out;
}

double kummer_series(double alpha, double beta, double z, const SeriesControl& ctl) {
  numerics::CompensatedSum sum;
  sum.add(1.0);
  double term = 1.0;
  int small = 0;
  for (int k = 0; k < ctl.max_terms; ++k) {
    if (alpha + k == 0.0) return sum.value();  // polynomial case
    term *= (alpha + k) * z / ((beta + k) * (k + 1.0));
    sum.add(term);
    if (std::abs(term) <= ctl.term_tol * std::abs(sum.value())) {
      if (++small >= 2) return sum.value();
    } else {
      small = 0;
    }
  }
  fail(ErrorCode::NoConvergence, "kummer_m: series tail above term_tol after max_terms");
}

}  // namespace

void SeriesControl::validate() const {
  require(max_terms >= 50, ErrorCode::InvalidArgument, "SeriesControl: max_terms must be >= 50");
  require(term_tol > 0.0, ErrorCode::InvalidArgument, "SeriesControl: term_tol must be > 0");
}

double sin_pi(double x) {
  double r = std::fmod(x, 2.0);
  if (r <= -1.0) r += 2.0;
  if (r > 1.0) r -= 2.0;
  if (r == 0.0 || r == 1.0) return 0.0;
  if (r == 0.5) return 1.0;
  if (r == -0.5) return -1.0;
  return std::sin(kPi * r);
}

double cos_pi(double x) {
  const double r = std::fmod(std::abs(x), 2.0);
  if (r == 0.5 || r == 1.5) return 0.0;
  if (r == 0.0) return 1.0;
  if (r == 1.0) return -1.0;
  return std::cos(kPi * r);
}

bool near_integer(double nu) { return std::abs(nu - std::round(nu)) < 1e-9; }

double kummer_m(double alpha, double beta, double z, const SeriesControl& ctl) {
  ctl.validate();
  require(std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(z),
          ErrorCode::InvalidArgument, "kummer_m: non-finite argument");
  if (beta <= 0.0 && beta == std::round(beta))
    fail(ErrorCode::BetaPole, "kummer_m: beta is a non-positive integer");
  require(std::abs(z) <= kMaxKummerArg, ErrorCode::OutOfDomain, "kummer_m: |z| must be <= 200");

  if (z >= 0.0) return kummer_series(alpha, beta, z, ctl);
  if (alpha <= beta) return std::exp(z) * kummer_series(beta - alpha, beta, -z, ctl);

  // alpha > beta, z < 0: start from alpha0 in [beta-1, beta) where the
  // transformed series has positive terms, then recur upward in alpha.
  const int n = static_cast<int>(std::floor(alpha - beta)) + 1;
  const double alpha0 = alpha - n;
  if (alpha0 <= 0.0) return kummer_series(alpha, beta, z, ctl);
  const double ez = std::exp(z);
  double m_prev = ez * kummer_series(beta - alpha0 + 1.0, beta, -z, ctl);
  double m_cur = ez * kummer_series(beta - alpha0, beta, -z, ctl);
  for (int i = 0; i < n; ++i) {
    const double a = alpha0 + i;
    const double m_next = ((beta - a) * m_prev + (2.0 * a - beta + z) * m_cur) / a;
    m_prev = m_cur;
    m_cur = m_next;
  }
  return m_cur;
}

BesselPair bessel_jy(double nu, double x) {
  check_bessel_args(nu, x);
  if (nu >= 0.0) return jy_nonnegative(nu, x);
  // Reflection: J_{-v} = cos(v pi) J_v - sin(v pi) Y_v,
  //             Y_{-v} = sin(v pi) J_v + cos(v pi) Y_v.
  const double v = -nu;
  const BesselPair p = jy_nonnegative(v, x);
  const double c = cos_pi(v), s = sin_pi(v);
  return {c * p.first - s * p.second, s * p.first + c * p.second,
          c * p.first_prime - s * p.second_prime, s * p.first_prime + c * p.second_prime};
}

BesselPair bessel_ik(double nu, double x) {
  check_bessel_args(nu, x);
  if (nu >= 0.0) return ik_nonnegative(nu, x);
  // I_{-v} = I_v + (2/pi) sin(v pi) K_v;  K_{-v} = K_v.
  const double v = -nu;
  const BesselPair p = ik_nonnegative(v, x);
  const double s = 2.0 / kPi * sin_pi(v);
  return {p.first + s * p.second, p.second, p.first_prime + s * p.second_prime,
          p.second_prime};
}

double bessel_j(double nu, double x) { return bessel_jy(nu, x).first; }

double bessel_y(double nu, double x) {
  if (near_integer(nu))
    fail(ErrorCode::NonIntegerOnly, "bessel_y: integer order is not supported");
  return bessel_jy(nu, x).second;
}

double bessel_i(double nu, double x) { return bessel_ik(nu, x).first; }

double bessel_k(double nu, double x) {
  if (near_integer(nu))
    fail(ErrorCode::NonIntegerOnly, "bessel_k: integer order is not supported");
  return bessel_ik(nu, x).second;
}

double abs_k_imag(double nu, double w) {
  require(w > 0.0, ErrorCode::OutOfDomain, "abs_k_imag: w must be > 0");
  const BesselPair p = bessel_jy(nu, w);
  return 0.5 * kPi * std::hypot(p.first, p.second);
}

}  // namespace hfl::specfun
