#pragma once

// Effective rate under a statistical delay constraint:
//   R = -(1/A) log2 E[(1 + gamma)^{-A}].

#include "edsense/channels.hpp"
#include "edsense/specfun.hpp"

namespace edsense {

struct DelayQoS {
  double a_exponent = 1.0;  // A = Theta T B / ln 2

  /// Throws DomainError unless a_exponent > 0.
  void validate() const;
  /// Folds the delay exponent, block duration and bandwidth into A.
  static DelayQoS from_theta(double theta, double block_time, double bandwidth);
};

/// ln E[(1 + gamma)^{-A}]; stays finite when the expectation underflows.
double log_eff_rate_inner_mixture(const GammaMixture& mix, const DelayQoS& q, const AccuracyPolicy& policy = {});
double log_eff_rate_inner_kms(const KappaMuShadowedParams& p, const DelayQoS& q, const AccuracyPolicy& policy = {});
double log_eff_rate_inner_f(const FisherFParams& p, const DelayQoS& q, const AccuracyPolicy& policy = {});

/// E[(1 + gamma)^{-A}], in (0, 1].
double eff_rate_inner_kms(const KappaMuShadowedParams& p, const DelayQoS& q, const AccuracyPolicy& policy = {});
double eff_rate_inner_f(const FisherFParams& p, const DelayQoS& q, const AccuracyPolicy& policy = {});

/// Effective rate in bits/s/Hz.
double eff_rate_kms(const KappaMuShadowedParams& p, const DelayQoS& q, const AccuracyPolicy& policy = {});
double eff_rate_f(const FisherFParams& p, const DelayQoS& q, const AccuracyPolicy& policy = {});

}  // namespace edsense
