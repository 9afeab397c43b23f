// F-channel detection series and its truncation control.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "../compensated_sum.hpp"
#include "edsense/detection.hpp"
#include "edsense/errors.hpp"

namespace edsense {

namespace sf = specfun;
namespace sfd = specfun::detail;

FisherSeries::FisherSeries(const FisherFParams& p, const AccuracyPolicy& policy)
    : params_(p), policy_(policy), ln_norm_(sf::ln_beta(p.m(), p.m_s())) {
  policy_.validate();
}

double FisherSeries::weight(int j) {
  if (j < 0) throw DomainError("FisherSeries: negative index");
  const double m = params_.m();
  const double ms = params_.m_s();
  const double om = params_.omega();
  while (static_cast<int>(weights_.size()) <= j) {
    const int k = static_cast<int>(weights_.size());
    // t_k = Gamma(k+m) U(k+m; k-m_s+1; 1/Omega) / (Omega^k k! B(m, m_s))
    const long double ln_t = sfd::ln_gamma_l(k + m) + sf::log_tricomi_u(k + m, k - ms + 1, 1 / om, policy_) -
                             k * std::log(static_cast<long double>(om)) - sfd::ln_gamma_l(k + 1) - ln_norm_;
    weights_.push_back(static_cast<double>(std::exp(ln_t)));
  }
  return weights_[j];
}

double truncation_bound_f(const FisherFParams& p, const DetectorConfig& cfg, int S) {
  cfg.validate();
  if (S < 0) throw DomainError("truncation_bound_f: S must be >= 0");
  if (S == 0) return 1.0;
  // Q(j+u, x) <= 1, so the tail is at most P(N >= S) for N mixed Poisson with
  // F-distributed mean. P(N >= S | gamma) = P(S, gamma) grows with gamma, hence
  // for any c: P(N >= S) <= P(gamma > c) + P(S, c).
  double best = 1.0;
  constexpr int kGrid = 240;
  for (int k = 0; k < kGrid; ++k) {
    const double beta = std::pow(10.0, -4.0 + 4.0 * k / (kGrid - 1));  // c/S in [1e-4, 1]
    const double c = beta * S;
    const double b = f_survival(p, c) + sf::gamma_p(S, c);
    best = std::min(best, b);
  }
  // Cover the rounding of the two regularized functions.
  return std::min(1.0, best * (1 + 1e-9));
}

double series_tail_estimate_f(const FisherFParams& p, const DetectorConfig& cfg, int S, const AccuracyPolicy& policy) {
  cfg.validate();
  const double om = p.omega();
  if (!(om > 1)) throw DomainError("series_tail_estimate_f: needs omega > 1 for the 2F1 argument 1/omega < 1");
  const double m = p.m();
  const double z = 1 / om;
  const long double ln_lead = sfd::ln_gamma_l(S + m) - S * std::log(static_cast<long double>(om)) -
                              sfd::ln_gamma_l(S + 1) + sf::log_tricomi_u(S + m, S - p.m_s() + 1, z, policy) -
                              sf::ln_beta(m, p.m_s());
  const double f21 = sf::gauss_2f1(S + m, 1, S + 1, z, policy);
  const double f22 = sf::hyp_2f2(S + m, 1, S + 1, S + cfg.u, z, policy);
  const double pg = sf::gamma_p(S + cfg.u, cfg.lambda / 2);
  return static_cast<double>(std::exp(ln_lead)) * (f21 - pg * f22);
}

SeriesResult avg_pd_f(FisherSeries& series, const DetectorConfig& cfg, double tol, const AccuracyPolicy& policy) {
  cfg.validate();
  policy.validate();
  if (!(tol > 0)) throw DomainError("avg_pd_f: tol must be > 0");
  if (cfg.lambda == 0) return {1.0, {1, 0.0, true}};
  const FisherFParams& p = series.params();

  // The bound is nonincreasing in S: double, then bisect for the first S that meets tol.
  int hi = 1;
  double bound_hi = truncation_bound_f(p, cfg, hi);
  while (bound_hi > tol) {
    if (hi > policy.max_terms) {
      throw ConvergenceError("avg_pd_f: more than " + std::to_string(policy.max_terms) +
                             " terms needed for tol " + std::to_string(tol));
    }
    hi *= 2;
    bound_hi = truncation_bound_f(p, cfg, hi);
  }
  int lo = hi / 2;  // bound(lo) > tol, or lo == 0
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    const double b = truncation_bound_f(p, cfg, mid);
    if (b <= tol) {
      hi = mid;
      bound_hi = b;
    } else {
      lo = mid;
    }
  }
  const int S = hi;
  if (S > policy.max_terms) {
    throw ConvergenceError("avg_pd_f: more than " + std::to_string(policy.max_terms) + " terms needed");
  }

  const double x = cfg.lambda / 2;
  detail::CompensatedSum acc;
  for (int j = 0; j < S; ++j) acc.add(sfd::gamma_q_l(j + cfg.u, x) * series.weight(j));
  const double v = static_cast<double>(std::clamp(acc.value(), 0.0L, 1.0L));
  return {v, {S, bound_hi, true}};
}

SeriesResult avg_pd_f(const FisherFParams& p, const DetectorConfig& cfg, double tol, const AccuracyPolicy& policy) {
  FisherSeries series(p, policy);
  return avg_pd_f(series, cfg, tol, policy);
}

}  // namespace edsense
