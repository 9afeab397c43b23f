#include <cmath>

#include "edsense/channels.hpp"
#include "edsense/errors.hpp"
#include "edsense/specfun.hpp"

namespace edsense {

FisherFParams::FisherFParams(double m, double m_s, double mean_snr) : m_(m), m_s_(m_s), mean_snr_(mean_snr) {
  if (!(m > 0) || !std::isfinite(m)) throw DomainError("m must be > 0");
  if (!(m_s > 0) || !std::isfinite(m_s)) throw DomainError("m_s must be > 0");
  if (!(mean_snr > 0) || !std::isfinite(mean_snr)) throw DomainError("mean SNR must be > 0");
  omega_ = m / (m_s * mean_snr);
}

double f_pdf(const FisherFParams& p, double gamma) {
  if (gamma < 0) return 0.0;
  const double m = p.m();
  const double ms = p.m_s();
  const double om = p.omega();
  if (gamma == 0) {
    if (m < 1) throw DomainError("f_pdf: density is singular at 0 for m < 1");
    return m == 1 ? om * ms : 0.0;
  }
  const long double l = m * std::log(static_cast<long double>(om)) - specfun::ln_beta(m, ms) -
                        (m + ms) * std::log1p(static_cast<long double>(om) * gamma) +
                        (m - 1) * std::log(static_cast<long double>(gamma));
  return static_cast<double>(std::exp(l));
}

double f_cdf(const FisherFParams& p, double gamma) {
  if (gamma <= 0) return 0.0;
  if (std::isinf(gamma)) return 1.0;
  const double og = p.omega() * gamma;
  // I_{x}(m, m_s) with x = og/(1+og); 1 - x = 1/(1+og) is formed without cancellation.
  if (og < 1) return specfun::inc_beta(p.m(), p.m_s(), og / (1 + og));
  return specfun::inc_beta_complement(p.m_s(), p.m(), 1 / (1 + og));
}

double f_survival(const FisherFParams& p, double gamma) {
  if (gamma <= 0) return 1.0;
  if (std::isinf(gamma)) return 0.0;
  const double og = p.omega() * gamma;
  if (og < 1) return specfun::inc_beta_complement(p.m(), p.m_s(), og / (1 + og));
  return specfun::inc_beta(p.m_s(), p.m(), 1 / (1 + og));
}

double f_quantile(const FisherFParams& p, double q) {
  if (!(q > 0 && q < 1)) throw DomainError("f_quantile: q must lie in (0, 1)");
  // Bisection in log(gamma); the cdf is continuous and strictly increasing.
  double lo = 1e-300, hi = p.mean_snr();
  while (f_cdf(p, hi) < q) {
    hi *= 4;
    if (hi > 1e300) throw ConvergenceError("f_quantile: bracket expansion failed");
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (f_cdf(p, mid) < q) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * hi) break;
  }
  return hi;
}

}  // namespace edsense
