#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "edsense/errors.hpp"
#include "edsense/quadrature.hpp"
#include "internal.hpp"

namespace edsense::specfun {
namespace detail {

long double kummer_series(long double a, long double b, long double z, const AccuracyPolicy& policy) {
  if (is_nonpositive_integer(b)) throw DomainError("kummer_1f1: b must not be a nonpositive integer");
  SeriesMonitor monitor(series_tol(policy));
  long double term = 1.0L;
  long double sum = 1.0L;
  for (int k = 0; k < policy.max_terms; ++k) {
    if (a + k == 0) return sum;
    term *= (a + k) * z / ((b + k) * (k + 1));
    sum += term;
    if (monitor.negligible(term, sum)) return sum;
  }
  throw ConvergenceError("kummer_1f1: max_terms exceeded");
}

long double gauss_series(long double a, long double b, long double c, long double z,
                         const AccuracyPolicy& policy) {
  if (is_nonpositive_integer(c)) throw DomainError("gauss_2f1: c must not be a nonpositive integer");
  SeriesMonitor monitor(series_tol(policy));
  long double term = 1.0L;
  long double sum = 1.0L;
  for (int k = 0; k < policy.max_terms; ++k) {
    if (a + k == 0 || b + k == 0) return sum;
    term *= (a + k) * (b + k) * z / ((c + k) * (k + 1));
    sum += term;
    if (monitor.negligible(term, sum)) return sum;
  }
  throw ConvergenceError("gauss_2f1: max_terms exceeded");
}

long double gauss_euler_integral(long double a, long double b, long double c, long double z) {
  if (!(c > b && b > 0)) throw DomainError("gauss_2f1 Euler integral: requires c > b > 0");
  const long double p = b;       // exponent of t is p - 1
  const long double q = c - b;   // exponent of (1 - t) is q - 1
  // Substitutions remove the algebraic endpoint behaviour:
  // [0, 1/2] with t = v^(1/p), [1/2, 1] with 1 - t = v^(1/q).
  auto left = [&](long double v) -> long double {
    const long double t = std::pow(v, 1.0L / p);
    return std::pow(1.0L - t, q - 1.0L) * std::pow(1.0L - z * t, -a) / p;
  };
  auto right = [&](long double v) -> long double {
    const long double s = std::pow(v, 1.0L / q);
    const long double t = 1.0L - s;
    return std::pow(t, p - 1.0L) * std::pow(1.0L - z * t, -a) / q;
  };
  const std::array<long double, 2> lp{0.0L, std::pow(0.5L, p)};
  const std::array<long double, 2> rp{0.0L, std::pow(0.5L, q)};
  const auto l = quad::integrate<long double>(left, std::span<const long double>(lp), 0.0L, 1e-16L, 4000);
  const auto r = quad::integrate<long double>(right, std::span<const long double>(rp), 0.0L, 1e-16L, 4000);
  const long double ln_norm = ln_gamma_l(c) - ln_gamma_l(b) - ln_gamma_l(c - b);
  return std::exp(ln_norm) * (l.value + r.value);
}

namespace {

// Signed product of Gamma ratios: prod Gamma(num) / prod Gamma(den).
// Returns 0 when a denominator argument sits on a pole.
long double gamma_ratio(std::initializer_list<long double> num, std::initializer_list<long double> den) {
  long double log_abs = 0.0L;
  int sign = 1;
  for (long double x : num) {
    const SignedLog g = ln_gamma_signed(x);
    if (g.sign == 0) throw DomainError("gauss_2f1: Gamma pole in connection coefficient");
    log_abs += g.log_abs;
    sign *= g.sign;
  }
  for (long double x : den) {
    const SignedLog g = ln_gamma_signed(x);
    if (g.sign == 0) return 0.0L;
    log_abs -= g.log_abs;
    sign *= g.sign;
  }
  return sign * std::exp(log_abs);
}

// 2F1(a, b; a + b + n; z) for integer n >= 0 and 0 < 1 - z < 1, from the
// logarithmic connection formula. a and b must not be nonpositive integers.
long double gauss_integer_gap(long double a, long double b, int n, long double z,
                              const AccuracyPolicy& policy) {
  const long double w = 1.0L - z;
  long double finite = 0.0L;
  if (n > 0) {
    long double term = 1.0L;
    for (int k = 0; k < n; ++k) {
      finite += term;
      term *= (a + k) * (b + k) * w / ((k + 1) * (1.0L - n + k));
    }
    finite *= gamma_ratio({static_cast<long double>(n), a + b + n}, {a + n, b + n});
  }
  // Second part: sum_k (a+n)_k (b+n)_k / (k! (k+n)!) w^k [ln w - psi(k+1) - psi(k+n+1) + psi(a+k+n) + psi(b+k+n)]
  long double psi_k1 = digamma_l(1.0L);
  long double psi_kn1 = digamma_l(n + 1.0L);
  long double psi_a = digamma_l(a + n);
  long double psi_b = digamma_l(b + n);
  const long double lnw = std::log(w);
  long double coef = std::exp(-ln_gamma_l(n + 1.0L));  // 1 / n!
  long double sum = 0.0L;
  SeriesMonitor monitor(series_tol(policy));
  int k = 0;
  for (; k < policy.max_terms; ++k) {
    const long double term = coef * (lnw - psi_k1 - psi_kn1 + psi_a + psi_b);
    sum += term;
    if (coef * (std::abs(lnw) + 1.0L) <= series_tol(policy) * std::abs(sum) || coef == 0) {
      if (monitor.negligible(term, sum)) break;
    }
    coef *= (a + n + k) * (b + n + k) * w / ((k + 1.0L) * (k + n + 1.0L));
    psi_k1 += 1.0L / (k + 1.0L);
    psi_kn1 += 1.0L / (k + n + 1.0L);
    psi_a += 1.0L / (a + n + k);
    psi_b += 1.0L / (b + n + k);
  }
  if (k == policy.max_terms) throw ConvergenceError("gauss_2f1: logarithmic series did not converge");
  const long double sign = (n % 2 == 0) ? 1.0L : -1.0L;  // (z - 1)^n = (-1)^n w^n
  const long double second = sign * std::pow(w, static_cast<long double>(n)) * gamma_ratio({a + b + n}, {a, b}) * sum;
  return finite - second;
}

}  // namespace

long double gauss_one_minus_z(long double a, long double b, long double c, long double z,
                              const AccuracyPolicy& policy) {
  const long double w = 1.0L - z;
  const long double gap = c - a - b;
  const long double n_near = std::round(gap);
  const long double dist = std::abs(gap - n_near);
  if (dist <= 1e-13L * std::max(1.0L, std::abs(gap))) {
    const int n = static_cast<int>(n_near);
    if (n >= 0) return gauss_integer_gap(a, b, n, z, policy);
    // Euler: 2F1(a,b;c;z) = w^(c-a-b) 2F1(c-a, c-b; c; z), whose gap is -n >= 0.
    const long double ap = c - a, bp = c - b;
    if (is_nonpositive_integer(ap) || is_nonpositive_integer(bp)) {
      return std::pow(w, gap) * gauss_series(ap, bp, c, z, policy);
    }
    return std::pow(w, gap) * gauss_integer_gap(ap, bp, -n, z, policy);
  }
  if (dist < 1e-5L) {
    // The two connection terms blow up with opposite signs near integer gaps.
    if (c > b && b > 0) return gauss_euler_integral(a, b, c, z);
    if (c > a && a > 0) return gauss_euler_integral(b, a, c, z);
    return gauss_series(a, b, c, z, policy);
  }
  const long double t1 = gamma_ratio({c, gap}, {c - a, c - b});
  const long double t2 = gamma_ratio({c, -gap}, {a, b});
  long double result = 0.0L;
  if (t1 != 0) result += t1 * gauss_series(a, b, 1.0L - gap, w, policy);
  if (t2 != 0) result += t2 * std::pow(w, gap) * gauss_series(c - a, c - b, gap + 1.0L, w, policy);
  return result;
}

}  // namespace detail

using detail::is_nonpositive_integer;

double kummer_1f1(double a, double b, double z, const AccuracyPolicy& policy) {
  policy.validate();
  if (is_nonpositive_integer(b)) throw DomainError("kummer_1f1: b must not be a nonpositive integer");
  if (z == 0) return 1.0;
  if (z < 0) {
    // Kummer transformation keeps the series free of alternating terms.
    const long double v = std::exp(static_cast<long double>(z)) *
                          detail::kummer_series(static_cast<long double>(b) - a, b, -static_cast<long double>(z), policy);
    return static_cast<double>(v);
  }
  return static_cast<double>(detail::kummer_series(a, b, z, policy));
}

namespace {

long double gauss_nonnegative(long double a, long double b, long double c, long double z,
                              const AccuracyPolicy& policy) {
  if (z <= 0.5L || is_nonpositive_integer(a) || is_nonpositive_integer(b)) {
    return detail::gauss_series(a, b, c, z, policy);
  }
  return detail::gauss_one_minus_z(a, b, c, z, policy);
}

}  // namespace

double gauss_2f1(double a, double b, double c, double z, const AccuracyPolicy& policy) {
  policy.validate();
  if (is_nonpositive_integer(c)) throw DomainError("gauss_2f1: c must not be a nonpositive integer");
  if (!(z < 1.0)) throw DomainError("gauss_2f1: requires z < 1");
  if (z == 0) return 1.0;
  const long double al = a, bl = b, cl = c, zl = z;
  if (zl > 0) return static_cast<double>(gauss_nonnegative(al, bl, cl, zl, policy));
  if (is_nonpositive_integer(al) || is_nonpositive_integer(bl)) {
    return static_cast<double>(detail::gauss_series(al, bl, cl, zl, policy));
  }
  // Pfaff: 2F1(a,b;c;z) = (1-z)^-a 2F1(a, c-b; c; z/(z-1)), argument in (0, 1).
  const long double wz = zl / (zl - 1.0L);
  const long double scale = std::pow(1.0L - zl, -al);
  return static_cast<double>(scale * gauss_nonnegative(al, cl - bl, cl, wz, policy));
}

double hyp_2f2(double a1, double a2, double b1, double b2, double z, const AccuracyPolicy& policy) {
  policy.validate();
  if (is_nonpositive_integer(b1) || is_nonpositive_integer(b2)) {
    throw DomainError("hyp_2f2: lower parameters must not be nonpositive integers");
  }
  detail::SeriesMonitor monitor(detail::series_tol(policy));
  long double term = 1.0L;
  long double sum = 1.0L;
  for (int k = 0; k < policy.max_terms; ++k) {
    if (a1 + k == 0 || a2 + k == 0) return static_cast<double>(sum);
    term *= (a1 + k) * static_cast<long double>(a2 + k) * z / ((b1 + k) * static_cast<long double>(b2 + k) * (k + 1));
    sum += term;
    if (monitor.negligible(term, sum)) return static_cast<double>(sum);
  }
  throw ConvergenceError("hyp_2f2: max_terms exceeded");
}

double log_tricomi_u(double a_in, double b_in, double z_in, const AccuracyPolicy& policy) {
  policy.validate();
  if (!(a_in > 0) || !(z_in > 0)) throw DomainError("tricomi_u: requires a > 0 and z > 0");
  const long double a = a_in, b = b_in, z = z_in;
  const long double c = b - a - 1.0L;  // exponent of (1 + t)

  // Integrand exp(phi(t)) with phi(t) = -z t + (a-1) ln t + c ln(1+t).
  auto phi = [&](long double t) { return -z * t + (a - 1.0L) * std::log(t) + c * std::log1p(t); };

  // Interior maximum: z t^2 - (b - 2 - z) t - (a - 1) = 0.
  long double peak = 0.0L, width = 1.0L / z;
  {
    const long double p = b - 2.0L - z;
    const long double disc = p * p + 4.0L * z * (a - 1.0L);
    if (disc >= 0) {
      const long double root = (p + std::sqrt(disc)) / (2.0L * z);
      if (root > 0) {
        const long double curv = (a - 1.0L) / (root * root) + c / ((1.0L + root) * (1.0L + root));
        if (curv > 0) {
          peak = root;
          width = 1.0L / std::sqrt(curv);
        }
      }
    }
  }
  const long double shift = peak > 0 ? phi(peak) : 0.0L;

  std::vector<long double> pts = {0.25L / z, 1.0L / z, 4.0L / z};
  if (peak > 0) {
    for (long double k : {-6.0L, -2.0L, 0.0L, 2.0L, 6.0L}) pts.push_back(peak + k * width);
  }
  std::erase_if(pts, [](long double t) { return !(t > 0); });
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const long double first = pts.front();

  constexpr long double kRel = 1e-15L;
  constexpr long double kAbs = 0.0L;
  const int max_sub = std::max(policy.max_terms, 2000);

  auto body = [&](long double t) -> long double { return std::exp(phi(t) - shift); };
  long double total = 0.0L;
  if (pts.size() > 1) {
    total += quad::integrate<long double>(body, std::span<const long double>(pts), kAbs, kRel, max_sub).value;
  }
  // Head and tail are judged against the bulk so negligible pieces stop early.
  const long double abs_tol = total > 0 ? 1e-17L * total : kAbs;

  // [0, first]: substitute t = v^(1/a) so that t^(a-1) dt = dv / a.
  auto head = [&](long double v) -> long double {
    if (v <= 0) return 0.0L;
    const long double t = std::pow(v, 1.0L / a);
    return std::exp(-z * t + c * std::log1p(t) - shift) / a;
  };
  const std::array<long double, 2> head_pts{0.0L, std::pow(first, a)};
  total += quad::integrate<long double>(head, std::span<const long double>(head_pts), abs_tol, kRel, max_sub).value;
  total += quad::integrate_tail<long double>(body, pts.back(), std::max(width, 1.0L / z), abs_tol, kRel, max_sub).value;
  if (!(total > 0)) throw ConvergenceError("tricomi_u: quadrature returned a nonpositive value");
  return static_cast<double>(shift + std::log(total) - detail::ln_gamma_l(a));
}

double tricomi_u(double a, double b, double z, const AccuracyPolicy& policy) {
  return std::exp(log_tricomi_u(a, b, z, policy));
}

}  // namespace edsense::specfun
