#pragma once

// Reference computations that share no code with the library: brute-force
// quadrature, extended-precision series and a finite-difference PDE solver.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using Real50 = boost::multiprecision::cpp_bin_float_50;

// Composite Simpson with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, long n) {
  if (n % 2) ++n;
  const double h = (hi - lo) / n;
  long double s = f(lo) + f(hi);
  for (long i = 1; i < n; ++i) s += (i % 2 ? 4.0L : 2.0L) * f(lo + i * h);
  return static_cast<double>(s * h / 3.0L);
}

// Midpoint Riemann sum, for integrands with endpoint singularities.
inline double midpoint(const std::function<double(double)>& f, double lo, double hi, long n) {
  const double h = (hi - lo) / n;
  long double s = 0.0L;
  for (long i = 0; i < n; ++i) s += f(lo + (i + 0.5) * h);
  return static_cast<double>(s * h);
}

using Real150 = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<150>>;

// Ascending series of M(alpha, beta; z) in 150-digit arithmetic, enough to
// absorb the e^{|z|} cancellation for z down to -200.
inline double kummer_series(double alpha, double beta, double z) {
  Real150 term = 1, sum = 1;
  const Real150 a = alpha, b = beta, zz = z;
  for (int k = 0; k < 4000; ++k) {
    term *= (a + k) * zz / ((b + k) * (k + 1));
    sum += term;
    if (k > std::abs(z) && abs(term) < Real150(1e-60) * abs(sum)) break;
  }
  return static_cast<double>(sum);
}

// Ascending series of J_nu(x) in 50-digit arithmetic.
inline double bessel_j_series(double nu, double x) {
  const Real50 half = Real50(x) / 2;
  const Real50 q = -half * half;
  Real50 term = pow(half, Real50(nu)) / boost::multiprecision::tgamma(Real50(nu) + 1);
  Real50 sum = term;
  for (int m = 1; m < 500; ++m) {
    term *= q / (Real50(m) * (Real50(nu) + m));
    sum += term;
    if (abs(term) < Real50(1e-45) * abs(sum)) break;
  }
  return static_cast<double>(sum);
}

// |K_nu(i w)| from the complex ascending series of I_{+-nu} and the
// connection K = pi/2 (I_{-nu} - I_nu)/sin(nu pi), in long double.
inline double abs_k_imag_series(double nu, double w) {
  using C = std::complex<long double>;
  auto i_series = [&](long double order) {
    const C half = C(0.0L, w / 2.0L);
    const C q = half * half;
    C term = std::pow(half, C(order, 0.0L)) / std::tgamma(order + 1.0L);
    C sum = term;
    for (int m = 1; m < 400; ++m) {
      term *= q / (static_cast<long double>(m) * (order + m));
      sum += term;
      if (std::abs(term) < 1e-22L * std::abs(sum)) break;
    }
    return sum;
  };
  const long double pi = 3.141592653589793238462643383279502884L;
  const C k = pi / 2.0L * (i_series(-nu) - i_series(nu)) / std::sin(nu * pi);
  return static_cast<double>(std::abs(k));
}

// Price u(0, x; T) of the payoff g from the Feynman-Kac PDE
//   u_tau = mu u_x + 1/2 sigma^2 u_xx - x u,  u(0, x) = g(x),
// on a uniform grid over (x_lo, L) with Dirichlet data u(x_lo) = e^{-x_lo tau} g(x_lo)
// and u(L) = e^{-L tau} g(L). Crank-Nicolson after four implicit Euler half-steps
// (Rannacher start). Returns u at every grid node.
struct PdeGrid {
  std::vector<double> x;
  std::vector<double> u;
  double at(double x0) const {
    const double h = x[1] - x[0];
    const long i = std::min<long>(static_cast<long>((x0 - x[0]) / h), static_cast<long>(x.size()) - 2);
    const double w = (x0 - x[i]) / h;
    return (1 - w) * u[i] + w * u[i + 1];
  }
};

inline PdeGrid price_pde(double k, double a, double L, double T, const std::function<double(double)>& payoff,
                         int nx, int nt, double x_lo = 0.0) {
  const double h = (L - x_lo) / nx;
  PdeGrid g;
  g.x.resize(nx + 1);
  g.u.resize(nx + 1);
  for (int i = 0; i <= nx; ++i) {
    g.x[i] = x_lo + i * h;
    g.u[i] = payoff(g.x[i]);
  }
  std::vector<double> lo(nx + 1), di(nx + 1), up(nx + 1);
  for (int i = 1; i < nx; ++i) {
    const double x = g.x[i];
    const double mu = a * a * (0.25 - 0.5 * k) * std::pow(x, 1.0 - 2.0 * k);
    const double s2 = a * a * std::pow(x, 2.0 - 2.0 * k);
    lo[i] = 0.5 * s2 / (h * h) - 0.5 * mu / h;
    up[i] = 0.5 * s2 / (h * h) + 0.5 * mu / h;
    di[i] = -s2 / (h * h) - x;
  }
  auto step = [&](double dt, double theta, double tau_new) {
    std::vector<double> rhs(nx + 1), A(nx + 1), B(nx + 1), C(nx + 1);
    for (int i = 1; i < nx; ++i) {
      rhs[i] = g.u[i] + (1 - theta) * dt * (lo[i] * g.u[i - 1] + di[i] * g.u[i] + up[i] * g.u[i + 1]);
      A[i] = -theta * dt * lo[i];
      B[i] = 1 - theta * dt * di[i];
      C[i] = -theta * dt * up[i];
    }
    const double left = std::exp(-x_lo * tau_new) * payoff(x_lo), right = std::exp(-L * tau_new) * payoff(L);
    rhs[1] -= A[1] * left;
    rhs[nx - 1] -= C[nx - 1] * right;
    // Thomas algorithm on rows 1..nx-1.
    for (int i = 2; i < nx; ++i) {
      const double m = A[i] / B[i - 1];
      B[i] -= m * C[i - 1];
      rhs[i] -= m * rhs[i - 1];
    }
    std::vector<double> v(nx + 1);
    v[nx - 1] = rhs[nx - 1] / B[nx - 1];
    for (int i = nx - 2; i >= 1; --i) v[i] = (rhs[i] - C[i] * v[i + 1]) / B[i];
    v[0] = left;
    v[nx] = right;
    g.u = v;
  };
  const double dt = T / nt;
  double tau = 0.0;
  for (int s = 0; s < 4; ++s) {
    tau += 0.5 * dt;
    step(0.5 * dt, 1.0, tau);
  }
  for (int s = 2; s < nt; ++s) {
    tau += dt;
    step(dt, 0.5, tau);
  }
  return g;
}

inline PdeGrid bond_pde(double k, double a, double L, double T, int nx, int nt) {
  return price_pde(k, a, L, T, [](double) { return 1.0; }, nx, nt);
}

}  // namespace oracle
