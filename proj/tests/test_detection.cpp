#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "edsense/detection.hpp"
#include "edsense/errors.hpp"
#include "edsense/oracle.hpp"
#include "edsense/specfun.hpp"
#include "reference_values.hpp"

using namespace edsense;

namespace {

double brute_tail(FisherSeries& s, const DetectorConfig& cfg, int S, int count) {
  long double acc = 0;
  for (int j = S; j < S + count; ++j) acc += specfun::gamma_q(j + cfg.u, cfg.lambda / 2) * s.weight(j);
  return static_cast<double>(acc);
}

double quad_of(const ChannelParams& ch, const std::function<double(double)>& metric) {
  return oracle::quad_average(metric, oracle::density_for(ch)).value;
}

}  // namespace

TEST(FalseAlarm, Examples) {
  EXPECT_EQ(prob_false_alarm({2, 0}), 1.0);
  EXPECT_NEAR(prob_false_alarm({1, 2}), std::exp(-1.0), 1e-15);
  EXPECT_LT(prob_false_alarm({2, 1e4}), 1e-300);
  EXPECT_THROW(prob_false_alarm({0, 1}), DomainError);
  EXPECT_THROW(prob_false_alarm({2, -1}), DomainError);
}

TEST(Threshold, ExamplesAndRoundTrip) {
  EXPECT_NEAR(threshold_for_pf(2, 0.5), ref::kThreshold_u2_pf0_5, 1e-10);
  EXPECT_NEAR(threshold_for_pf(2, 0.1), ref::kThreshold_u2_pf0_1, 1e-10);
  EXPECT_NEAR(threshold_for_pf(1, std::exp(-1.0)), 2.0, 1e-10);
  for (int u : {1, 2, 4, 9})
    for (double pf : {1e-6, 1e-3, 0.01, 0.1, 0.5, 0.9, 0.999}) {
      const double lam = threshold_for_pf(u, pf);
      EXPECT_NEAR(prob_false_alarm({u, lam}), pf, 1e-10 * pf) << u << " " << pf;
    }
  EXPECT_THROW(threshold_for_pf(2, 0), DomainError);
  EXPECT_THROW(threshold_for_pf(2, 1), DomainError);
}

TEST(InstantPd, Examples) {
  EXPECT_NEAR(prob_detect_instant({2, 4}, 0), prob_false_alarm({2, 4}), 1e-14);
  EXPECT_NEAR(prob_detect_instant({2, 4}, 3), ref::kPdInstant_u2_g3_l4, 1e-12);
  EXPECT_EQ(prob_detect_instant({3, 0}, 5), 1.0);
  double prev = 0;
  for (double g = 0; g < 30; g += 0.5) {
    const double pd = prob_detect_instant({2, 6}, g);
    EXPECT_GE(pd, prev - 1e-15);
    prev = pd;
  }
}

TEST(AvgPdKms, References) {
  const double lam = threshold_for_pf(2, 0.1);
  EXPECT_NEAR(avg_pd_kms(KappaMuShadowedParams(2, 3, 2, 10), {2, lam}), ref::kAvgPdKms_2_3_2_10_u2_pf0_1, 1e-10);
  EXPECT_NEAR(avg_pd_kms(KappaMuShadowedParams(0, 1, 1, 10), {2, lam}), ref::kAvgPdKms_0_1_1_10_u2_pf0_1, 1e-10);
  EXPECT_EQ(avg_pd_kms(KappaMuShadowedParams(2, 3, 2, 10), {2, 0}), 1.0);
}

TEST(AvgPdKms, MatchesQuadrature) {
  for (const auto& p : {KappaMuShadowedParams(8, 4, 1, 3), KappaMuShadowedParams(0.5, 2, 2, 1),
                        KappaMuShadowedParams(1, 30, 26, 5)}) {
    for (int u : {1, 3}) {
      const DetectorConfig cfg{u, threshold_for_pf(u, 0.05)};
      const double q = quad_of(p, [&](double g) { return specfun::marcum_q(u, std::sqrt(2 * g), std::sqrt(cfg.lambda)); });
      EXPECT_NEAR(avg_pd_kms(p, cfg), q, 1e-8);
    }
  }
}

TEST(AvgPd, BoundedByFalseAlarmAndOne) {
  for (double lam : {0.5, 2.0, 6.0, 15.0, 40.0}) {
    const DetectorConfig cfg{2, lam};
    const double pf = prob_false_alarm(cfg);
    for (const auto& p : {KappaMuShadowedParams(2, 3, 2, 0.1), KappaMuShadowedParams(0, 1, 1, 10)}) {
      const double pd = avg_pd_kms(p, cfg);
      EXPECT_GE(pd, pf - 1e-12);
      EXPECT_LE(pd, 1.0);
    }
    const double pd = avg_pd_f(FisherFParams(2, 3, 0.5), cfg, 1e-10).value;
    EXPECT_GE(pd, pf - 1e-9);
    EXPECT_LE(pd, 1.0);
  }
}

TEST(AvgPdKms, ParameterMonotonicity) {
  const DetectorConfig cfg{2, threshold_for_pf(2, 0.1)};
  for (double snr : {1.0, 10.0}) {
    for (int mu = 2; mu < 6; ++mu) {
      EXPECT_GE(avg_pd_kms(KappaMuShadowedParams(2, mu + 1, 2, snr), cfg) + 1e-9,
                avg_pd_kms(KappaMuShadowedParams(2, mu, 2, snr), cfg));
    }
    for (int m = 1; m < 5; ++m) {
      EXPECT_GE(avg_pd_kms(KappaMuShadowedParams(2, 5, m + 1, snr), cfg) + 1e-9,
                avg_pd_kms(KappaMuShadowedParams(2, 5, m, snr), cfg));
    }
  }
}

TEST(AvgPdKms, KappaUnderShadowing) {
  // At fixed mean the SNR variance runs from mean^2/mu (kappa = 0) up to
  // mean^2/m (kappa -> inf), so with m < mu a stronger shadowed LOS hurts and
  // with m = mu kappa drops out entirely.
  const DetectorConfig cfg{2, threshold_for_pf(2, 0.1)};
  for (double snr : {1.0, 10.0}) {
    for (double kappa : {0.5, 1.0, 2.0, 4.0}) {
      EXPECT_LT(avg_pd_kms(KappaMuShadowedParams(2 * kappa, 3, 2, snr), cfg),
                avg_pd_kms(KappaMuShadowedParams(kappa, 3, 2, snr), cfg));
      EXPECT_NEAR(avg_pd_kms(KappaMuShadowedParams(2 * kappa, 3, 3, snr), cfg),
                  avg_pd_kms(KappaMuShadowedParams(kappa, 3, 3, snr), cfg), 1e-13);
    }
  }
}

TEST(FisherSeriesWeights, SumToOneAndMatchQuadrature) {
  FisherSeries s(FisherFParams(2, 3, 1));
  long double total = 0;
  for (int j = 0; j < 4000; ++j) total += s.weight(j);
  EXPECT_NEAR(static_cast<double>(total), 1.0, 1e-6);
  // t_j = E[gamma^j e^-gamma]/j!
  const FisherFParams p(2, 3, 1);
  for (int j : {0, 1, 5}) {
    const double q = quad_of(p, [j](double g) { return std::exp(j * std::log(g) - g - std::lgamma(j + 1.0)); });
    EXPECT_NEAR(s.weight(j), q, 1e-9);
  }
}

TEST(AvgPdF, ReferenceAndLambdaZero) {
  const FisherFParams p(2, 3, 1);
  const auto r = avg_pd_f(p, {2, threshold_for_pf(2, 0.1)}, 1e-10);
  EXPECT_NEAR(r.value, ref::kAvgPdF_2_3_1_u2_pf0_1, 1e-10);
  EXPECT_TRUE(r.report.converged);
  EXPECT_LE(r.report.error_bound, 1e-10);
  const auto z = avg_pd_f(p, {2, 0}, 1e-8);
  EXPECT_EQ(z.value, 1.0);
}

TEST(AvgPdF, QuadratureAtSpecPoint) {
  const FisherFParams p(2, 3, 1);
  const double q = quad_of(p, [](double g) { return specfun::marcum_q(2, std::sqrt(2 * g), 2.0); });
  EXPECT_NEAR(avg_pd_f(p, {2, 4}, 1e-9).value, q, 2e-9);
}

TEST(AvgPdF, TermCapRaises) {
  AccuracyPolicy tight;
  tight.max_terms = 100;
  EXPECT_THROW(avg_pd_f(FisherFParams(2, 1.5, 10), {2, 4}, 1e-12, tight), ConvergenceError);
}

TEST(AvgPdF, CertifiedBoundDominatesTail) {
  for (const auto& p : {FisherFParams(2, 3, 1), FisherFParams(2, 5, 2), FisherFParams(1.5, 8, 3),
                        FisherFParams(0.8, 6, 1), FisherFParams(3, 10, 5)}) {
    FisherSeries s(p);
    const DetectorConfig cfg{2, threshold_for_pf(2, 0.1)};
    for (int S : {5, 20, 100, 400}) {
      const double bound = truncation_bound_f(p, cfg, S);
      EXPECT_GE(bound, brute_tail(s, cfg, S, 5000)) << p.m() << " " << p.m_s() << " " << S;
      EXPECT_LE(truncation_bound_f(p, cfg, S + 10), bound);
    }
  }
}

TEST(AvgPdF, LooseAndTightTolerancesAgree) {
  for (const auto& p : {FisherFParams(2, 3, 1), FisherFParams(2, 6, 3), FisherFParams(0.8, 6, 1)}) {
    const DetectorConfig cfg{2, threshold_for_pf(2, 0.1)};
    const auto a = avg_pd_f(p, cfg, 1e-7);
    const auto b = avg_pd_f(p, cfg, 1e-10);
    EXPECT_LE(a.report.terms_used, b.report.terms_used);
    EXPECT_LE(std::abs(a.value - b.value), 1e-7);
    EXPECT_LE(a.value, b.value + 1e-15);
  }
}

TEST(AvgPdF, NakagamiLimit) {
  const DetectorConfig cfg{2, threshold_for_pf(2, 0.1)};
  const double f = avg_pd_f(FisherFParams(2, 1e4, 3), cfg, 1e-9).value;
  EXPECT_NEAR(f, avg_pd_kms(KappaMuShadowedParams(0, 2, 2, 3), cfg), 5e-3);
}

TEST(AvgPdF, ParameterMonotonicity) {
  const DetectorConfig cfg{2, threshold_for_pf(2, 0.1)};
  double prev = 0;
  for (double m : {0.8, 1.0, 1.5, 2.0, 3.0}) {
    const double v = avg_pd_f(FisherFParams(m, 6, 1), cfg, 1e-10).value;
    EXPECT_GE(v + 1e-9, prev);
    prev = v;
  }
  // mean_snr is not the mean: E[gamma] = mean_snr m_s / (m_s - 1), so m_s is
  // compared at a fixed mean of 2.
  prev = 0;
  for (double ms : {4.0, 6.0, 10.0, 20.0}) {
    const double v = avg_pd_f(FisherFParams(2, ms, 2 * (ms - 1) / ms), cfg, 1e-8).value;
    EXPECT_GE(v + 1e-9, prev) << ms;
    prev = v;
  }
  // at fixed mean_snr a larger m_s lowers the mean
  EXPECT_LT(avg_pd_f(FisherFParams(2, 6, 1), cfg, 1e-10).value, avg_pd_f(FisherFParams(2, 3, 1), cfg, 1e-10).value);
}

TEST(SeriesTailEstimate, DefinedOnlyAboveUnitOmega) {
  // defined only for omega > 1
  const FisherFParams p(2, 3, 0.5);
  const DetectorConfig cfg{2, 4};
  const double est = series_tail_estimate_f(p, cfg, 3);
  EXPECT_TRUE(std::isfinite(est));
  EXPECT_THROW(series_tail_estimate_f(FisherFParams(2, 3, 10), cfg, 3), DomainError);
}

TEST(Auc, Instant) {
  EXPECT_NEAR(auc_instant(2, 0), 0.5, 1e-15);
  EXPECT_NEAR(auc_instant(2, 5), ref::kAucInstant_u2_g5, 1e-14);
  for (int u : {1, 2, 4, 7})
    for (double g : {0.1, 1.0, 4.0, 20.0}) EXPECT_NEAR(auc_instant(u, g), oracle::auc_double_sum(u, g), 1e-13);
  EXPECT_GT(auc_instant(2, 200), 1 - 1e-12);
  // u=1: 1 - exp(-g/2)/2
  EXPECT_NEAR(auc_instant(1, 3), 1 - 0.5 * std::exp(-1.5), 1e-15);
}

TEST(Auc, Averages) {
  EXPECT_NEAR(avg_auc_kms(KappaMuShadowedParams(2, 2, 1, 5), 2), ref::kAvgAucKms_2_2_1_5_u2, 1e-12);
  EXPECT_NEAR(avg_auc_f(FisherFParams(2, 3, 5), 2), ref::kAvgAucF_2_3_5_u2, 1e-11);
  EXPECT_GT(avg_auc_kms(KappaMuShadowedParams(2, 2, 1, 1e6), 2), 0.999);
  EXPECT_GT(avg_auc_f(FisherFParams(2, 3, 1e6), 2), 0.999);
  const FisherFParams p(2, 3, 5);
  EXPECT_NEAR(avg_auc_f(p, 1), quad_of(p, [](double g) { return 1 - 0.5 * std::exp(-g / 2); }), 1e-9);
  for (int u : {1, 3, 6}) {
    const double v = avg_auc_kms(KappaMuShadowedParams(0.5, 3, 1, 0.01), u);
    EXPECT_GE(v, 0.5);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Croc, ShapeAndEndpoints) {
  std::vector<double> grid;
  for (int i = 0; i < 50; ++i) grid.push_back(std::pow(10.0, -3 + i * (std::log10(0.999) + 3) / 49));
  const auto kms = croc_curve(KappaMuShadowedParams(2, 3, 2, 10), 2, grid);
  ASSERT_EQ(kms.size(), 50u);
  for (std::size_t i = 1; i < kms.size(); ++i) EXPECT_LE(kms[i].pmd(), kms[i - 1].pmd() + 1e-12);
  EXPECT_LT(kms.back().pmd(), 1e-3);
  const auto f = croc_curve(FisherFParams(2, 3, 1), 2, grid);
  for (std::size_t i = 1; i < f.size(); ++i) EXPECT_LE(f[i].pmd(), f[i - 1].pmd() + 1e-9);
  EXPECT_NEAR(f[20].pd, avg_pd_f(FisherFParams(2, 3, 1), {2, threshold_for_pf(2, grid[20])}, 1e-8).value, 1e-8);

  const std::vector<double> bad = {0.5, 0.1};
  EXPECT_THROW(croc_curve(KappaMuShadowedParams(2, 3, 2, 10), 2, bad), DomainError);
  const std::vector<double> edge = {0.0, 0.5};
  EXPECT_THROW(croc_curve(KappaMuShadowedParams(2, 3, 2, 10), 2, edge), DomainError);
}
