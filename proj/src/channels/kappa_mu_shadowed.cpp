#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "edsense/channels.hpp"
#include "edsense/errors.hpp"
#include "edsense/specfun.hpp"

namespace edsense {

namespace {

namespace sf = specfun;
namespace sfd = specfun::detail;

// Above this sum |w| the finite form gives way to the negative-binomial series.
constexpr double kMaxCondition = 1e4;
constexpr long double kNbTailTol = 1e-18L;
constexpr int kNbMaxTerms = 200000;

GammaMixture single_gamma(double shape, double rate) {
  return {GammaMixture::Form::single, {{1.0, shape, rate}}, 1.0, 0.0};
}

// Convolving the two Gamma factors gives
//   f = theta1^{mu-m} theta2^m / (Gamma(mu-m) Gamma(m)) e^{-theta2 g}
//       * sum_i binom(m-1, i) (-1)^i g^{m-1-i} G(a_i, d g) / d^{a_i},   a_i = mu - m + i,
// with G the lower incomplete gamma and d = theta1 - theta2. Writing
// G(a, y) = Gamma(a) [1 - e^{-y} sum_{k<a} y^k / k!] turns Gamma(a_i)/Gamma(mu-m) into
// (mu-m)_i and leaves Gamma kernels of shape m - i at rate theta2 and shape
// m - i + k at rate theta1.
GammaMixture finite_form(const KappaMuShadowedParams& p) {
  const int m = p.m();
  const int n1 = p.mu() - p.m();
  const long double t1 = p.theta1();
  const long double t2 = p.theta2();
  const long double d = t1 - t2;
  const long double ln_c = n1 * std::log(t1) + m * std::log(t2) - sfd::ln_gamma_l(m);

  std::map<int, long double> at_theta1;  // keyed by shape
  std::map<int, long double> at_theta2;
  for (int i = 0; i <= m - 1; ++i) {
    const int a = n1 + i;
    const int sign = (i % 2 == 0) ? 1 : -1;
    // ln[binom(m-1,i) (n1)_i] = ln Gamma(m) - ln Gamma(i+1) - ln Gamma(m-i) + ln Gamma(a) - ln Gamma(n1)
    const long double ln_ci = sfd::ln_gamma_l(m) - sfd::ln_gamma_l(i + 1) - sfd::ln_gamma_l(m - i) +
                              sfd::ln_gamma_l(a) - sfd::ln_gamma_l(n1);
    const long double base = ln_c + ln_ci - a * std::log(d);
    // Each raw monomial g^{q-1} e^{-t g} equals Gamma(q)/t^q times the Gamma(q, t) density.
    at_theta2[m - i] += sign * std::exp(base + sfd::ln_gamma_l(m - i) - (m - i) * std::log(t2));
    for (int k = 0; k < a; ++k) {
      const int q = m - i + k;
      at_theta1[q] -= sign * std::exp(base + k * std::log(d) - sfd::ln_gamma_l(k + 1) +
                                      sfd::ln_gamma_l(q) - q * std::log(t1));
    }
  }
  GammaMixture out{GammaMixture::Form::finite, {}, 0.0, 0.0};
  long double cond = 0;
  for (const auto& [q, w] : at_theta2) {
    out.terms.push_back({static_cast<double>(w), static_cast<double>(q), p.theta2()});
    cond += std::abs(w);
  }
  for (const auto& [q, w] : at_theta1) {
    if (w == 0) continue;
    out.terms.push_back({static_cast<double>(w), static_cast<double>(q), p.theta1()});
    cond += std::abs(w);
  }
  out.condition = static_cast<double>(cond);
  return out;
}

// Gamma(m, theta2) is a NegBin(m, theta2/theta1) mixture of Gamma(m + K, theta1),
// so gamma ~ sum_k w_k Gamma(mu + k, theta1), w_k = (1-rho)^m (m)_k / k! rho^k.
GammaMixture negative_binomial_form(const KappaMuShadowedParams& p) {
  const long double t1 = p.theta1();
  const long double rho = (t1 - p.theta2()) / t1;
  const int m = p.m();
  GammaMixture out{GammaMixture::Form::negative_binomial, {}, 1.0, 0.0};
  long double w = std::pow(1 - rho, static_cast<long double>(m));
  long double total = 0;
  for (int k = 0; k < kNbMaxTerms; ++k) {
    out.terms.push_back({static_cast<double>(w), static_cast<double>(p.mu() + k), p.theta1()});
    total += w;
    const long double ratio = rho * (m + k) / (k + 1);
    const long double next = w * ratio;
    // Once the term ratio drops below 1 it keeps falling, so the tail is bounded
    // by a geometric series.
    if (ratio < 1) {
      const long double ratio_next = rho * (m + k + 1) / (k + 2);
      const long double tail = next / (1 - ratio_next);
      if (tail <= kNbTailTol) {
        out.truncated_mass = static_cast<double>(std::max(0.0L, 1 - total));
        return out;
      }
    }
    w = next;
  }
  throw ConvergenceError("gamma_mixture: negative-binomial series needs more than " +
                         std::to_string(kNbMaxTerms) + " terms");
}

// P(a, y) / y^a
long double scaled_p(int a, long double y) { return sfd::gamma_p_scaled_l(a, y); }

}  // namespace

KappaMuShadowedParams::KappaMuShadowedParams(double kappa, int mu, int m, double mean_snr)
    : kappa_(kappa), mu_(mu), m_(m), mean_snr_(mean_snr) {
  if (!(kappa >= 0) || !std::isfinite(kappa)) throw DomainError("kappa must be >= 0");
  if (m < 1) throw DomainError("m must be a positive integer");
  if (mu < m) throw DomainError("mu must satisfy mu >= m");
  if (!(mean_snr > 0) || !std::isfinite(mean_snr)) throw DomainError("mean SNR must be > 0");
  theta1_ = mu * (1 + kappa) / mean_snr;
  theta2_ = m * theta1_ / (mu * kappa + m);
}

double gamma_density(double shape, double rate, double x) {
  if (x < 0) return 0.0;
  if (x == 0) {
    if (shape == 1) return rate;
    return shape < 1 ? INFINITY : 0.0;
  }
  const long double l = shape * std::log(static_cast<long double>(rate)) +
                        (shape - 1) * std::log(static_cast<long double>(x)) - rate * static_cast<long double>(x) -
                        sfd::ln_gamma_l(shape);
  return static_cast<double>(std::exp(l));
}

GammaMixture gamma_mixture(const KappaMuShadowedParams& p, GammaMixture::Form form) {
  switch (form) {
    case GammaMixture::Form::single:
      if (p.kappa() == 0) return single_gamma(p.mu(), p.theta1());
      if (p.mu() == p.m()) return single_gamma(p.m(), p.theta2());
      throw DomainError("gamma_mixture: single form needs kappa = 0 or mu = m");
    case GammaMixture::Form::finite:
      if (p.kappa() == 0 || p.mu() == p.m()) throw DomainError("gamma_mixture: finite form needs kappa > 0 and mu > m");
      return finite_form(p);
    case GammaMixture::Form::negative_binomial:
      return negative_binomial_form(p);
  }
  throw DomainError("gamma_mixture: unknown form");
}

GammaMixture gamma_mixture(const KappaMuShadowedParams& p) {
  if (p.kappa() == 0 || p.mu() == p.m()) return gamma_mixture(p, GammaMixture::Form::single);
  GammaMixture finite = finite_form(p);
  if (finite.condition <= kMaxCondition) return finite;
  try {
    return negative_binomial_form(p);
  } catch (const ConvergenceError&) {
    return finite;
  }
}

double kms_mgf(const KappaMuShadowedParams& p, double s) {
  if (!(s < p.theta2())) throw DomainError("kms_mgf: s must be below theta2");
  const double n1 = p.mu() - p.m();
  return std::exp(-n1 * std::log1p(-s / p.theta1()) - p.m() * std::log1p(-s / p.theta2()));
}

double kms_pdf(const KappaMuShadowedParams& p, double gamma) {
  if (gamma < 0) return 0.0;
  const GammaMixture mix = gamma_mixture(p);
  if (mix.form != GammaMixture::Form::finite) {
    long double sum = 0;
    for (const auto& t : mix.terms) sum += t.weight * static_cast<long double>(gamma_density(t.shape, t.rate, gamma));
    return static_cast<double>(std::max(0.0L, sum));
  }
  // Finite form written with P(a, y) / y^a so nothing blows up as gamma -> 0:
  // f = C e^{-theta2 g} g^{mu-1} sum_i c_i R(a_i, d g).
  const int m = p.m();
  const int n1 = p.mu() - p.m();
  const long double t1 = p.theta1();
  const long double t2 = p.theta2();
  const long double d = t1 - t2;
  const long double g = gamma;
  long double sum = 0;
  for (int i = 0; i <= m - 1; ++i) {
    const int a = n1 + i;
    const long double coeff = std::exp(sfd::ln_gamma_l(m) - sfd::ln_gamma_l(i + 1) - sfd::ln_gamma_l(m - i) +
                                       sfd::ln_gamma_l(a) - sfd::ln_gamma_l(n1));
    sum += ((i % 2 == 0) ? coeff : -coeff) * scaled_p(a, d * g);
  }
  const long double ln_pref = n1 * std::log(t1) + m * std::log(t2) - sfd::ln_gamma_l(m) - t2 * g;
  long double pow_part = 1;
  if (p.mu() > 1) pow_part = (g == 0) ? 0 : std::pow(g, static_cast<long double>(p.mu() - 1));
  return static_cast<double>(std::max(0.0L, std::exp(ln_pref) * pow_part * sum));
}

double kms_cdf(const KappaMuShadowedParams& p, double gamma) {
  if (gamma <= 0) return 0.0;
  if (std::isinf(gamma)) return 1.0;
  const GammaMixture mix = gamma_mixture(p);
  long double sum = 0;
  for (const auto& t : mix.terms) sum += t.weight * sfd::gamma_p_l(t.shape, static_cast<long double>(t.rate) * gamma);
  return static_cast<double>(std::clamp(sum, 0.0L, 1.0L));
}

}  // namespace edsense
