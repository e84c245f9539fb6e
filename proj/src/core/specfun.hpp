#pragma once

namespace hfl::specfun {

/// Controls for power-series evaluation.
struct SeriesControl {
  int max_terms = 4000;
  double term_tol = 1e-17;  ///< stop once |term| <= term_tol * |partial sum|

  void validate() const;
};

// Kummer's confluent hypergeometric function M(alpha, beta; z), |z| <= 200.
// Negative arguments are evaluated through Kummer's transformation, and for
// alpha > beta additionally through the upward contiguous recurrence in alpha,
// so no alternating series is ever summed for z < 0.
double kummer_m(double alpha, double beta, double z, const SeriesControl& ctl = {});

/// A Bessel-type pair and its first derivatives at one argument.
struct BesselPair {
  double first;         ///< J_nu or I_nu
  double second;        ///< Y_nu or K_nu
  double first_prime;
  double second_prime;
};

// J_nu, Y_nu and derivatives for real order (|nu| <= 20) and x > 0.
BesselPair bessel_jy(double nu, double x);
// I_nu, K_nu and derivatives for real order (|nu| <= 20) and x > 0.
BesselPair bessel_ik(double nu, double x);

double bessel_j(double nu, double x);
// Throws NonIntegerOnly when nu lies within 1e-9 of an integer.
double bessel_y(double nu, double x);
double bessel_i(double nu, double x);
// Throws NonIntegerOnly when nu lies within 1e-9 of an integer.
double bessel_k(double nu, double x);

// |K_nu(i w)| through the Hankel modulus (pi/2) sqrt(J_nu(w)^2 + Y_nu(w)^2).
double abs_k_imag(double nu, double w);

/// sin(pi x) and cos(pi x) with exact zeros at (half-)integers.
double sin_pi(double x);
double cos_pi(double x);

/// True when nu is within 1e-9 of an integer.
bool near_integer(double nu);

}  // namespace hfl::specfun
