#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "edsense/errors.hpp"
#include "internal.hpp"

namespace edsense {

void AccuracyPolicy::validate() const {
  if (!(rel_tol > 0.0 && rel_tol < 1e-3))
    throw DomainError("AccuracyPolicy: rel_tol must lie in (0, 1e-3)");
  if (max_terms < 100) throw DomainError("AccuracyPolicy: max_terms must be >= 100");
}

namespace specfun {
namespace detail {

namespace {

constexpr int kIncGammaMaxIter = 200000;

// P(z, y) by its power series, y < z + 1.
long double p_series(long double z, long double y) {
  long double term = 1.0L / z;
  long double sum = term;
  for (int n = 1; n < kIncGammaMaxIter; ++n) {
    term *= y / (z + n);
    sum += term;
    if (term < sum * kEpsL) {
      return sum * std::exp(z * std::log(y) - y - ln_gamma_l(z));
    }
  }
  throw ConvergenceError("gamma_p: series did not converge");
}

// Q(z, y) by its continued fraction (modified Lentz), y >= z + 1.
long double q_fraction(long double z, long double y) {
  constexpr long double tiny = std::numeric_limits<long double>::min() / kEpsL;
  long double b = y + 1.0L - z;
  long double c = 1.0L / tiny;
  long double d = 1.0L / b;
  long double h = d;
  for (int i = 1; i < kIncGammaMaxIter; ++i) {
    const long double an = -i * (i - z);
    b += 2.0L;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0L / d;
    const long double del = d * c;
    h *= del;
    if (std::abs(del - 1.0L) < kEpsL) {
      return std::exp(z * std::log(y) - y - ln_gamma_l(z)) * h;
    }
  }
  throw ConvergenceError("gamma_q: continued fraction did not converge");
}

void check_inc_gamma_args(long double z, long double y, const char* who) {
  if (!(z > 0) || !(y >= 0)) {
    throw DomainError(std::string(who) + ": requires z > 0 and y >= 0");
  }
}

}  // namespace

long double ln_gamma_l(long double x) {
  if (!(x > 0)) throw DomainError("ln_gamma: requires x > 0");
  return std::lgamma(x);
}

SignedLog ln_gamma_signed(long double x) {
  if (is_nonpositive_integer(x)) return {-std::numeric_limits<long double>::infinity(), 0};
  if (x > 0) return {std::lgamma(x), 1};
  const long double fl = std::floor(x);
  const bool odd = std::fmod(std::abs(fl), 2.0L) == 1.0L;
  return {std::lgamma(x), odd ? -1 : 1};
}

long double rgamma_l(long double x) {
  const SignedLog g = ln_gamma_signed(x);
  if (g.sign == 0) return 0.0L;
  return g.sign * std::exp(-g.log_abs);
}

long double gamma_p_l(long double z, long double y) {
  check_inc_gamma_args(z, y, "gamma_p");
  if (y == 0) return 0.0L;
  if (std::isinf(y)) return 1.0L;
  if (y < z + 1.0L) return p_series(z, y);
  return 1.0L - q_fraction(z, y);
}

long double gamma_q_l(long double z, long double y) {
  check_inc_gamma_args(z, y, "gamma_q");
  if (y == 0) return 1.0L;
  if (std::isinf(y)) return 0.0L;
  if (y < z + 1.0L) return 1.0L - p_series(z, y);
  return q_fraction(z, y);
}

long double gamma_p_scaled_l(long double z, long double y) {
  check_inc_gamma_args(z, y, "gamma_p_scaled");
  if (y < z + 1.0L) {
    // e^-y / Gamma(z+1) * sum_k y^k / (z+1)_k
    long double term = 1.0L;
    long double sum = 1.0L;
    for (int n = 1; n < kIncGammaMaxIter; ++n) {
      term *= y / (z + n);
      sum += term;
      if (term < sum * kEpsL) return sum * std::exp(-y - ln_gamma_l(z + 1.0L));
    }
    throw ConvergenceError("gamma_p_scaled: series did not converge");
  }
  return (1.0L - q_fraction(z, y)) * std::exp(-z * std::log(y));
}

long double digamma_l(long double x) {
  if (is_nonpositive_integer(x)) throw DomainError("digamma: pole at nonpositive integer");
  long double result = 0.0L;
  if (x < 0) {
    // psi(x) = psi(1 - x) - pi cot(pi x)
    result -= kPiL / std::tan(kPiL * x);
    x = 1.0L - x;
  }
  while (x < 12.0L) {
    result -= 1.0L / x;
    x += 1.0L;
  }
  const long double inv2 = 1.0L / (x * x);
  // Bernoulli terms B_2k / (2k x^2k), k = 1..8
  constexpr long double c[] = {1.0L / 12,        -1.0L / 120,         1.0L / 252,
                               -1.0L / 240,      1.0L / 132,          -691.0L / 32760,
                               1.0L / 12,        -3617.0L / 8160};
  long double series = 0.0L;
  long double p = inv2;
  for (long double ck : c) {
    series += ck * p;
    p *= inv2;
  }
  return result + std::log(x) - 0.5L / x - series;
}

}  // namespace detail

double ln_gamma(double x) { return static_cast<double>(detail::ln_gamma_l(x)); }

double gamma_p(double z, double y) { return static_cast<double>(detail::gamma_p_l(z, y)); }
double gamma_q(double z, double y) { return static_cast<double>(detail::gamma_q_l(z, y)); }

double lower_inc_gamma(double z, double y) {
  const long double p = detail::gamma_p_l(z, y);
  return static_cast<double>(p * std::exp(detail::ln_gamma_l(z)));
}

double upper_inc_gamma(double z, double y) {
  const long double q = detail::gamma_q_l(z, y);
  return static_cast<double>(q * std::exp(detail::ln_gamma_l(z)));
}

double ln_beta(double c1, double c2) {
  if (!(c1 > 0) || !(c2 > 0)) throw DomainError("beta: requires c1 > 0 and c2 > 0");
  using detail::ln_gamma_l;
  return static_cast<double>(ln_gamma_l(c1) + ln_gamma_l(c2) - ln_gamma_l(static_cast<long double>(c1) + c2));
}

double beta(double c1, double c2) { return std::exp(ln_beta(c1, c2)); }

namespace {

// Continued fraction for I_x(a, b) (Numerical Recipes betacf), long double.
long double beta_fraction(long double a, long double b, long double x) {
  using detail::kEpsL;
  constexpr long double tiny = std::numeric_limits<long double>::min() / kEpsL;
  const long double qab = a + b, qap = a + 1.0L, qam = a - 1.0L;
  long double c = 1.0L;
  long double d = 1.0L - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0L / d;
  long double h = d;
  for (int m = 1; m < 100000; ++m) {
    const int m2 = 2 * m;
    long double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0L + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0L + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0L / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0L + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0L + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0L / d;
    const long double del = d * c;
    h *= del;
    if (std::abs(del - 1.0L) < kEpsL) return h;
  }
  throw ConvergenceError("inc_beta: continued fraction did not converge");
}

long double inc_beta_l(long double a, long double b, long double x) {
  if (!(a > 0) || !(b > 0)) throw DomainError("inc_beta: requires a > 0 and b > 0");
  if (!(x >= 0 && x <= 1)) throw DomainError("inc_beta: requires 0 <= x <= 1");
  if (x == 0) return 0.0L;
  if (x == 1) return 1.0L;
  using detail::ln_gamma_l;
  const long double ln_front = a * std::log(x) + b * std::log1p(-x) - ln_gamma_l(a) - ln_gamma_l(b) +
                               ln_gamma_l(a + b);
  if (x < (a + 1.0L) / (a + b + 2.0L)) return std::exp(ln_front) * beta_fraction(a, b, x) / a;
  return 1.0L - std::exp(ln_front) * beta_fraction(b, a, 1.0L - x) / b;
}

}  // namespace

double inc_beta(double a, double b, double x) { return static_cast<double>(inc_beta_l(a, b, x)); }

double inc_beta_complement(double a, double b, double x) {
  if (!(x >= 0 && x <= 1)) throw DomainError("inc_beta_complement: requires 0 <= x <= 1");
  return static_cast<double>(inc_beta_l(b, a, 1.0L - static_cast<long double>(x)));
}

double pochhammer(double a, int n) {
  if (n < 0) throw DomainError("pochhammer: requires n >= 0");
  long double r = 1.0L;
  for (int k = 0; k < n; ++k) r *= static_cast<long double>(a) + k;
  return static_cast<double>(r);
}

std::uint64_t binomial(unsigned a, unsigned b) {
  if (b > a) throw DomainError("binomial: requires b <= a");
  b = std::min(b, a - b);
  std::uint64_t result = 1;
  for (unsigned i = 1; i <= b; ++i) {
    // result * (a - b + i) / i is exact; divide the common factor out first.
    const std::uint64_t g = std::gcd(result, static_cast<std::uint64_t>(i));
    const std::uint64_t r = result / g;
    const std::uint64_t num = (static_cast<std::uint64_t>(a - b + i)) / (i / g);
    if (__builtin_mul_overflow(r, num, &result)) throw NumericalError("binomial: overflow");
  }
  return result;
}

double digamma(double x) { return static_cast<double>(detail::digamma_l(x)); }

}  // namespace specfun
}  // namespace edsense
