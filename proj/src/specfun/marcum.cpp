#include <cmath>

#include "edsense/errors.hpp"
#include "internal.hpp"

namespace edsense::specfun {

// Q_u(a, b) = sum_k Poisson(k; a^2/2) * Q(u + k, b^2/2), with Q the
// regularized upper incomplete gamma. When a^2/2 >= b^2/2 the complement
// 1 - Q_u = sum_k Poisson(k; a^2/2) * P(u + k, b^2/2) is summed instead,
// since P(u + k, .) dies off factorially in k.
//
// Summation starts near the largest term and walks outward in both
// directions; each walk stops once an explicit bound on the rest of the
// series falls below the tolerance. Neighbouring incomplete-gamma values
// differ by d_k = e^-x x^(u+k) / (u+k)!.
double marcum_q(int u, double a_in, double b_in, const AccuracyPolicy& policy) {
  policy.validate();
  if (u < 1) throw DomainError("marcum_q: order u must be >= 1");
  if (!(a_in >= 0) || !(b_in >= 0)) throw DomainError("marcum_q: requires a >= 0 and b >= 0");
  if (b_in == 0) return 1.0;
  const long double g = 0.5L * static_cast<long double>(a_in) * a_in;
  const long double x = 0.5L * static_cast<long double>(b_in) * b_in;
  if (g == 0) return static_cast<double>(detail::gamma_q_l(u, x));

  const long double tol = detail::series_tol(policy);
  const bool complement = g >= x;
  const long double start_real = complement ? std::floor(std::sqrt(g * x)) : std::floor(g);
  const long double k0 = std::max(0.0L, start_real);

  using detail::ln_gamma_l;
  const long double w0 = std::exp(k0 * std::log(g) - g - ln_gamma_l(k0 + 1.0L));
  const long double d0 = std::exp((u + k0) * std::log(x) - x - ln_gamma_l(u + k0 + 1.0L));
  // f0 = Q(u + k0, x) in direct mode, P(u + k0, x) in complement mode.
  const long double f0 = complement ? detail::gamma_p_l(u + k0, x) : detail::gamma_q_l(u + k0, x);

  long double sum = w0 * f0;
  int terms = 1;

  // Upward walk.
  {
    long double w = w0, d = d0, f = f0;
    for (long double k = k0;; k += 1.0L) {
      const long double w_next = w * g / (k + 1.0L);
      const long double f_next = complement ? f - d : f + d;
      // Bound on sum_{j > k} w_j f_j.
      long double bound = complement ? std::max(f_next, 0.0L) : 1.0L;
      if (k + 2.0L > g) bound = std::min(bound, w_next / (1.0L - g / (k + 2.0L)));
      if (bound <= tol) break;
      if (++terms > policy.max_terms) throw ConvergenceError("marcum_q: max_terms exceeded");
      sum += w_next * std::max(f_next, 0.0L);
      w = w_next;
      f = f_next;
      d *= x / (u + k + 1.0L);
    }
  }
  // Downward walk.
  {
    long double w = w0, d = d0, f = f0;
    for (long double k = k0; k > 0; k -= 1.0L) {
      const long double w_prev = w * k / g;
      const long double d_prev = d * (u + k) / x;
      const long double f_prev = complement ? f + d_prev : f - d_prev;
      // Bound on sum_{j < k} w_j f_j; weights fall geometrically below the mode.
      long double bound = complement ? 1.0L : std::max(f_prev, 0.0L);
      if (k - 1.0L < g) bound = std::min(bound, w_prev / (1.0L - (k - 1.0L) / g));
      if (bound <= tol) break;
      if (++terms > policy.max_terms) throw ConvergenceError("marcum_q: max_terms exceeded");
      sum += w_prev * std::max(f_prev, 0.0L);
      w = w_prev;
      d = d_prev;
      f = f_prev;
    }
  }
  const long double q = complement ? 1.0L - sum : sum;
  return static_cast<double>(std::min(1.0L, std::max(0.0L, q)));
}

}  // namespace edsense::specfun
