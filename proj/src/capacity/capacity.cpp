#include "edsense/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "../compensated_sum.hpp"
#include "edsense/errors.hpp"

namespace edsense {

namespace sf = specfun;
namespace sfd = specfun::detail;

void DelayQoS::validate() const {
  if (!(a_exponent > 0) || !std::isfinite(a_exponent)) throw DomainError("delay QoS: A must be > 0");
}

DelayQoS DelayQoS::from_theta(double theta, double block_time, double bandwidth) {
  DelayQoS q{theta * block_time * bandwidth / std::numbers::ln2};
  q.validate();
  return q;
}

namespace {

// The inner expectation must land in (0, 1]; a few ulps above 1 is rounding.
double checked_log_inner(long double ln_inner) {
  if (!std::isfinite(static_cast<double>(ln_inner))) throw NumericalError("effective rate: inner integral is not finite");
  if (ln_inner > 1e-12L) throw NumericalError("effective rate: inner integral exceeds 1");
  return static_cast<double>(std::min(ln_inner, 0.0L));
}

double rate_from_log_inner(double ln_inner, const DelayQoS& q) {
  return std::max(0.0, -ln_inner / (q.a_exponent * std::numbers::ln2));
}

}  // namespace

double log_eff_rate_inner_mixture(const GammaMixture& mix, const DelayQoS& q, const AccuracyPolicy& policy) {
  q.validate();
  const double A = q.a_exponent;
  // Under Gamma(p, theta): E[(1+g)^{-A}] = theta^p U(p; p - A + 1; theta).
  std::vector<long double> logs;
  logs.reserve(mix.terms.size());
  long double top = -INFINITY;
  for (const auto& t : mix.terms) {
    const long double l =
        t.shape * std::log(static_cast<long double>(t.rate)) + sf::log_tricomi_u(t.shape, t.shape - A + 1, t.rate, policy);
    logs.push_back(l);
    top = std::max(top, l);
  }
  std::vector<long double> scaled;
  scaled.reserve(logs.size());
  for (std::size_t k = 0; k < logs.size(); ++k) scaled.push_back(mix.terms[k].weight * std::exp(logs[k] - top));
  const long double s = detail::sorted_sum(std::move(scaled));
  if (!(s > 0)) throw NumericalError("effective rate: inner integral is not positive");
  return checked_log_inner(top + std::log(s));
}

double log_eff_rate_inner_kms(const KappaMuShadowedParams& p, const DelayQoS& q, const AccuracyPolicy& policy) {
  return log_eff_rate_inner_mixture(gamma_mixture(p), q, policy);
}

double log_eff_rate_inner_f(const FisherFParams& p, const DelayQoS& q, const AccuracyPolicy& policy) {
  q.validate();
  const double A = q.a_exponent;
  const double m = p.m();
  const double ms = p.m_s();
  const double om = p.omega();
  // E[(1+g)^{-A}] = Omega^m B(m, m_s+A) / B(m, m_s) 2F1(m+m_s, m; m+m_s+A; 1-Omega)
  const double f = sf::gauss_2f1(m + ms, m, m + ms + A, 1 - om, policy);
  if (!(f > 0) || !std::isfinite(f)) throw NumericalError("effective rate: 2F1 factor is not a positive number");
  const long double l = m * std::log(static_cast<long double>(om)) + sf::ln_beta(m, ms + A) - sf::ln_beta(m, ms) +
                        std::log(static_cast<long double>(f));
  return checked_log_inner(l);
}

double eff_rate_inner_kms(const KappaMuShadowedParams& p, const DelayQoS& q, const AccuracyPolicy& policy) {
  return std::exp(log_eff_rate_inner_kms(p, q, policy));
}

double eff_rate_inner_f(const FisherFParams& p, const DelayQoS& q, const AccuracyPolicy& policy) {
  return std::exp(log_eff_rate_inner_f(p, q, policy));
}

double eff_rate_kms(const KappaMuShadowedParams& p, const DelayQoS& q, const AccuracyPolicy& policy) {
  return rate_from_log_inner(log_eff_rate_inner_kms(p, q, policy), q);
}

double eff_rate_f(const FisherFParams& p, const DelayQoS& q, const AccuracyPolicy& policy) {
  return rate_from_log_inner(log_eff_rate_inner_f(p, q, policy), q);
}

}  // namespace edsense
