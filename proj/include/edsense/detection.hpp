#pragma once

// Energy-detector performance over fading: false alarm, detection probability
// (instantaneous and channel-averaged), and area under the ROC.

#include <span>
#include <vector>

#include "edsense/channels.hpp"
#include "edsense/specfun.hpp"

namespace edsense {

struct DetectorConfig {
  int u = 2;            // time-bandwidth product
  double lambda = 0.0;  // threshold, in noise-normalized energy units

  /// Throws DomainError unless u >= 1 and lambda >= 0.
  void validate() const;
};

struct TruncationReport {
  int terms_used = 0;
  double error_bound = 0.0;  // certified bound on the discarded tail
  bool converged = false;
};

struct RocPoint {
  double pf;
  double pd;
  double pmd() const { return 1.0 - pd; }
};

struct SeriesResult {
  double value;
  TruncationReport report;
};

/// Gamma(u, lambda/2) / Gamma(u).
double prob_false_alarm(const DetectorConfig& cfg);

/// lambda with prob_false_alarm(u, lambda) = pf_target; bracket capped at 1e4.
double threshold_for_pf(int u, double pf_target);

/// Q_u(sqrt(2 gamma), sqrt(lambda)).
double prob_detect_instant(const DetectorConfig& cfg, double gamma, const AccuracyPolicy& policy = {});

/// Average detection probability over any Gamma-kernel mixture.
double avg_pd_mixture(const GammaMixture& mix, const DetectorConfig& cfg, const AccuracyPolicy& policy = {});
double avg_pd_kms(const KappaMuShadowedParams& p, const DetectorConfig& cfg, const AccuracyPolicy& policy = {});

/// Mixed-Poisson weights t_j = E[gamma^j e^{-gamma}] / j! of the F channel. The
/// F-channel detection series is sum_j Q(j+u, lambda/2) t_j; t_j does not depend
/// on the detector, so one instance can serve a whole threshold sweep.
class FisherSeries {
 public:
  explicit FisherSeries(const FisherFParams& p, const AccuracyPolicy& policy = {});

  const FisherFParams& params() const { return params_; }
  /// t_j, computed on first use.
  double weight(int j);

 private:
  FisherFParams params_;
  AccuracyPolicy policy_;
  double ln_norm_;
  std::vector<double> weights_;
};

/// Certified upper bound on sum_{j>=S} Q(j+u, lambda/2) t_j. Uses
/// sum_{j>=S} t_j = P(N >= S) <= P(gamma > c) + P(S, c) for every c.
double truncation_bound_f(const FisherFParams& p, const DetectorConfig& cfg, int S);

/// The hypergeometric tail expression (2F1 minus a 2F2 correction) that is often
/// quoted as the truncation bound of this series. It is NOT an upper bound in
/// general; kept for comparison only. Requires omega > 1.
double series_tail_estimate_f(const FisherFParams& p, const DetectorConfig& cfg, int S,
                              const AccuracyPolicy& policy = {});

/// Sums the F-channel series until the certified bound falls to tol.
/// ConvergenceError if that needs more than policy.max_terms terms.
SeriesResult avg_pd_f(const FisherFParams& p, const DetectorConfig& cfg, double tol,
                      const AccuracyPolicy& policy = {});
SeriesResult avg_pd_f(FisherSeries& series, const DetectorConfig& cfg, double tol,
                      const AccuracyPolicy& policy = {});

/// Area under the ROC at instantaneous SNR gamma.
double auc_instant(int u, double gamma);

/// Coefficients a_i with A(gamma) = 1 - sum_{i<u} a_i gamma^i e^{-gamma/2}.
std::vector<double> auc_coefficients(int u);

double avg_auc_mixture(const GammaMixture& mix, int u);
double avg_auc_kms(const KappaMuShadowedParams& p, int u);
double avg_auc_f(const FisherFParams& p, int u, const AccuracyPolicy& policy = {});

/// One RocPoint per pf (sorted, strictly inside (0, 1)); tol applies to the F series.
std::vector<RocPoint> croc_curve(const ChannelParams& channel, int u, std::span<const double> pf_grid,
                                 double tol = 1e-8, const AccuracyPolicy& policy = {});

}  // namespace edsense
