#pragma once

// Special functions used by the detection and capacity closed forms.
//
// Every routine takes and returns double but accumulates in long double.
// Series are truncated once |term| <= rel_tol * |partial sum| holds for three
// consecutive terms; ConvergenceError is thrown if that needs more than
// max_terms terms.

#include <cstdint>

namespace edsense {

struct AccuracyPolicy {
  double rel_tol = 1e-12;
  int max_terms = 10000;

  /// Throws DomainError unless 0 < rel_tol < 1e-3 and max_terms >= 100.
  void validate() const;
};

namespace specfun {

/// ln Gamma(x) for x > 0.
double ln_gamma(double x);

/// Lower incomplete gamma G(z, y) = int_0^y t^(z-1) e^-t dt (not regularized).
double lower_inc_gamma(double z, double y);

/// Upper incomplete gamma Gamma(z, y) = int_y^inf t^(z-1) e^-t dt (not regularized).
double upper_inc_gamma(double z, double y);

/// Regularized P(z, y) = G(z, y) / Gamma(z).
double gamma_p(double z, double y);

/// Regularized Q(z, y) = Gamma(z, y) / Gamma(z).
double gamma_q(double z, double y);

double beta(double c1, double c2);
double ln_beta(double c1, double c2);

/// Regularized incomplete beta I_x(a, b).
double inc_beta(double a, double b, double x);

/// 1 - I_x(a, b), evaluated without cancellation.
double inc_beta_complement(double a, double b, double x);

/// Rising factorial (a)_n.
double pochhammer(double a, int n);

/// Exact C(a, b); DomainError if b > a, NumericalError on 64-bit overflow.
std::uint64_t binomial(unsigned a, unsigned b);

/// psi(x) = d/dx ln Gamma(x); poles at nonpositive integers raise DomainError.
double digamma(double x);

/// Generalized Marcum Q of integer order u >= 1, absolute error <= 1e-12.
double marcum_q(int u, double a, double b, const AccuracyPolicy& policy = {});

/// Confluent hypergeometric 1F1(a; b; z).
double kummer_1f1(double a, double b, double z, const AccuracyPolicy& policy = {});

/// Gauss hypergeometric 2F1(a, b; c; z) for z < 1.
double gauss_2f1(double a, double b, double c, double z, const AccuracyPolicy& policy = {});

/// Generalized hypergeometric 2F2(a1, a2; b1, b2; z).
double hyp_2f2(double a1, double a2, double b1, double b2, double z,
               const AccuracyPolicy& policy = {});

/// Tricomi U(a; b; z) for a > 0, z > 0 (integral representation).
double tricomi_u(double a, double b, double z, const AccuracyPolicy& policy = {});

/// ln U(a; b; z); stays finite where U itself under- or overflows.
double log_tricomi_u(double a, double b, double z, const AccuracyPolicy& policy = {});

namespace detail {

// Raw building blocks, exposed for the consistency tests.
long double kummer_series(long double a, long double b, long double z, const AccuracyPolicy& policy);
long double gauss_series(long double a, long double b, long double c, long double z,
                         const AccuracyPolicy& policy);
/// 2F1 for z in (0, 1) through the z -> 1 - z connection formulas.
long double gauss_one_minus_z(long double a, long double b, long double c, long double z,
                              const AccuracyPolicy& policy);
/// 2F1 from the Euler integral; requires c > b > 0.
long double gauss_euler_integral(long double a, long double b, long double c, long double z);

long double ln_gamma_l(long double x);
long double gamma_p_l(long double z, long double y);
long double gamma_q_l(long double z, long double y);
/// P(z, y) / y^z, finite as y -> 0.
long double gamma_p_scaled_l(long double z, long double y);
/// 1 / Gamma(x), zero at the poles.
long double rgamma_l(long double x);
long double digamma_l(long double x);

}  // namespace detail
}  // namespace specfun
}  // namespace edsense
