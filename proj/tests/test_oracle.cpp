#include <gtest/gtest.h>

#include <cmath>

#include "edsense/channels.hpp"
#include "edsense/detection.hpp"
#include "edsense/errors.hpp"
#include "edsense/oracle.hpp"
#include "edsense/specfun.hpp"

using namespace edsense;
using namespace edsense::oracle;

TEST(Quadrature, Normalization) {
  const QuadratureSpec spec;
  for (const ChannelParams& ch : std::vector<ChannelParams>{KappaMuShadowedParams(2, 3, 2, 10), KappaMuShadowedParams(0, 1, 1, 1),
                                                            FisherFParams(0.8, 1.2, 10), FisherFParams(2, 3, 1)}) {
    const Density d = density_for(ch, spec);
    EXPECT_LE(d.tail_mass, spec.abs_tol / 10);
    const Estimate e = quad_average([](double) { return 1.0; }, d, spec);
    EXPECT_NEAR(e.value + d.tail_mass, 1.0, 2 * spec.abs_tol);
  }
}

TEST(Quadrature, MgfAndSpecPoint) {
  const KappaMuShadowedParams p(2, 3, 2, 4);
  const Estimate e = quad_average([](double g) { return std::exp(-0.7 * g); }, kms_density(p));
  EXPECT_NEAR(e.value, kms_mgf(p, -0.7), 1e-9);

  const FisherFParams f(2, 3, 1);
  const auto metric = [](double g) { return specfun::marcum_q(2, std::sqrt(2 * g), 2.0); };
  const Estimate q = quad_average(metric, f_density(f));
  const McEstimate mc = mc_average(metric, f_sampler(f), {42, 1000000, 4});
  EXPECT_LE(std::abs(q.value - mc.mean), 4 * mc.std_error);
}

TEST(Quadrature, InvalidSpec) {
  EXPECT_THROW((QuadratureSpec{0, 1e-10, 100}.validate()), DomainError);
  EXPECT_THROW((QuadratureSpec{1e-10, 1e-10, 0}.validate()), DomainError);
}

TEST(MonteCarlo, ConstantMetric) {
  const McEstimate e = mc_average([](double) { return 0.25; }, kms_sampler(KappaMuShadowedParams(1, 2, 1, 3)),
                                  {7, 20000, 3});
  EXPECT_EQ(e.mean, 0.25);
  EXPECT_EQ(e.std_error, 0.0);
}

TEST(MonteCarlo, MeanSnr) {
  const KappaMuShadowedParams p(2, 3, 2, 10);
  const McEstimate e = mc_average([](double g) { return g; }, kms_sampler(p), {42, 1000000, 4});
  EXPECT_LE(std::abs(e.mean - 10), 4 * e.std_error);
}

TEST(MonteCarlo, Reproducible) {
  const auto sampler = f_sampler(FisherFParams(2, 3, 1));
  const auto metric = [](double g) { return std::exp(-g); };
  const McEstimate a = mc_average(metric, sampler, {99, 50000, 5});
  const McEstimate b = mc_average(metric, sampler, {99, 50000, 5});
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_error, b.std_error);
  const McEstimate c = mc_average(metric, sampler, {100, 50000, 5});
  EXPECT_NE(a.mean, c.mean);
  const auto multi = mc_average({metric, [](double g) { return g; }}, sampler, {99, 50000, 5});
  EXPECT_EQ(multi[0].mean, a.mean);
}

TEST(MonteCarlo, StandardErrorScaling) {
  const auto sampler = kms_sampler(KappaMuShadowedParams(2, 3, 2, 10));
  const auto metric = [](double g) { return std::exp(-0.1 * g); };
  const McEstimate a = mc_average(metric, sampler, {1, 200000, 4});
  const McEstimate b = mc_average(metric, sampler, {1, 400000, 4});
  EXPECT_NEAR(b.std_error / a.std_error, 1 / std::sqrt(2.0), 0.1 / std::sqrt(2.0));
}

TEST(MonteCarlo, InvalidSpec) {
  EXPECT_THROW((MonteCarloSpec{1, 0, 1}.validate()), DomainError);
  EXPECT_THROW((MonteCarloSpec{1, 100000, 0}.validate()), DomainError);
}

TEST(Metric, Names) {
  for (Metric m : {Metric::avg_pd_kms, Metric::avg_pd_f, Metric::avg_auc_kms, Metric::avg_auc_f, Metric::eff_rate_kms,
                   Metric::eff_rate_f})
    EXPECT_EQ(metric_from_string(to_string(m)), m);
  EXPECT_THROW(metric_from_string("avg_snr"), DomainError);
}

TEST(Verify, LambdaZero) {
  VerifyOptions opt;
  opt.mc.n_samples = 20000;
  for (const VerifyCase& c : {VerifyCase{Metric::avg_pd_kms, KappaMuShadowedParams(2, 3, 2, 10), 2, 0.1, 0.0},
                              VerifyCase{Metric::avg_pd_f, FisherFParams(2, 3, 1), 2, 0.1, 0.0}}) {
    const auto r = verify_closed_form(c, opt);
    EXPECT_EQ(r.closed_form, 1.0);
    EXPECT_NEAR(r.quadrature, 1.0, 1e-9);
    EXPECT_EQ(r.monte_carlo, 1.0);
    EXPECT_TRUE(r.pass());
  }
}

TEST(Verify, GammaBranch) {
  VerifyOptions opt;
  opt.mc.n_samples = 100000;
  for (Metric m : {Metric::avg_pd_kms, Metric::avg_auc_kms, Metric::eff_rate_kms}) {
    VerifyCase c{m, KappaMuShadowedParams(0, 2, 1, 3)};
    const auto r = verify_closed_form(c, opt);
    EXPECT_TRUE(r.pass()) << r.name << " " << r.closed_form << " " << r.quadrature;
  }
}

TEST(Verify, AllMetricsPass) {
  VerifyOptions opt;
  opt.mc.n_samples = 200000;
  const KappaMuShadowedParams k(2, 3, 2, 5);
  const FisherFParams f(2, 5, 2);
  for (Metric m : {Metric::avg_pd_kms, Metric::avg_auc_kms, Metric::eff_rate_kms}) {
    const auto r = verify_closed_form({m, k, 3, 0.05}, opt);
    EXPECT_TRUE(r.pass()) << r.name;
  }
  for (Metric m : {Metric::avg_pd_f, Metric::avg_auc_f, Metric::eff_rate_f}) {
    const auto r = verify_closed_form({m, f, 3, 0.05}, opt);
    EXPECT_TRUE(r.pass()) << r.name;
  }
}

TEST(Verify, PerturbationIsCaught) {
  VerifyOptions opt;
  opt.run_mc = false;
  opt.perturb = 1e-3;
  const auto r = verify_closed_form({Metric::avg_auc_kms, KappaMuShadowedParams(2, 3, 2, 5), 2}, opt);
  EXPECT_FALSE(r.pass_quadrature);
  EXPECT_FALSE(r.pass());
}

TEST(Verify, ChannelMismatch) {
  EXPECT_THROW(verify_closed_form({Metric::avg_pd_f, KappaMuShadowedParams(2, 3, 2, 5)}), DomainError);
}

TEST(InstantMetric, IndependentAuc) {
  VerifyCase c{Metric::avg_auc_kms, KappaMuShadowedParams(2, 3, 2, 5), 3};
  const auto metric = instantaneous_metric(c);
  for (double g : {0.0, 0.5, 4.0, 30.0}) EXPECT_NEAR(metric(g), auc_instant(3, g), 1e-13);
  EXPECT_NEAR(auc_double_sum(1, 0), 0.5, 1e-15);
}
