#pragma once

// Fading-channel models: parameter containers, densities, MGF and samplers.
// All SNR values are linear.

#include <cstddef>
#include <random>
#include <variant>
#include <vector>

namespace edsense {

/// kappa-mu shadowed fading with integer mu >= m >= 1.
class KappaMuShadowedParams {
 public:
  /// Throws DomainError on kappa < 0, m < 1, mu < m or mean_snr <= 0.
  KappaMuShadowedParams(double kappa, int mu, int m, double mean_snr);

  double kappa() const { return kappa_; }
  int mu() const { return mu_; }
  int m() const { return m_; }
  double mean_snr() const { return mean_snr_; }
  double theta1() const { return theta1_; }
  double theta2() const { return theta2_; }

  KappaMuShadowedParams with_mean_snr(double mean_snr) const {
    return {kappa_, mu_, m_, mean_snr};
  }

 private:
  double kappa_;
  int mu_;
  int m_;
  double mean_snr_;
  double theta1_;
  double theta2_;
};

/// Fisher-Snedecor F fading.
class FisherFParams {
 public:
  /// Throws DomainError unless m, m_s and mean_snr are positive and finite.
  FisherFParams(double m, double m_s, double mean_snr);

  double m() const { return m_; }
  double m_s() const { return m_s_; }
  double mean_snr() const { return mean_snr_; }
  double omega() const { return omega_; }
  /// false when m_s <= 1: the model is accepted, but E[gamma] is infinite.
  bool finite_mean() const { return m_s_ > 1; }

  FisherFParams with_mean_snr(double mean_snr) const { return {m_, m_s_, mean_snr}; }

 private:
  double m_;
  double m_s_;
  double mean_snr_;
  double omega_;
};

using ChannelParams = std::variant<KappaMuShadowedParams, FisherFParams>;

/// weight * Gamma(shape, rate) density.
struct GammaKernel {
  double weight;
  double shape;
  double rate;
};

/// The kappa-mu shadowed SNR density written as a finite signed combination of
/// Gamma densities. Every closed-form metric is a termwise average over it.
struct GammaMixture {
  enum class Form {
    single,             // kappa = 0 or mu = m: one Gamma factor survives
    finite,             // binomial expansion of the two-factor convolution
    negative_binomial,  // positive series in Gamma(mu + k, theta1); used when the
                        // finite form would cancel badly
  };
  Form form;
  std::vector<GammaKernel> terms;
  /// sum |weight|; the loss factor of the termwise sums.
  double condition;
  /// Mass dropped when the negative-binomial series was truncated.
  double truncated_mass;
};

/// Picks the form automatically; see kappa_mu_shadowed.cpp for the rule.
GammaMixture gamma_mixture(const KappaMuShadowedParams& p);
GammaMixture gamma_mixture(const KappaMuShadowedParams& p, GammaMixture::Form form);

/// E[e^{s gamma}] for s < theta2.
double kms_mgf(const KappaMuShadowedParams& p, double s);
double kms_pdf(const KappaMuShadowedParams& p, double gamma);
double kms_cdf(const KappaMuShadowedParams& p, double gamma);

/// gamma = gamma1 + gamma2, gamma1 ~ Gamma(mu - m, theta1), gamma2 ~ Gamma(m, theta2).
template <class Rng>
double kms_draw(const KappaMuShadowedParams& p, Rng& rng) {
  std::gamma_distribution<double> g2(p.m(), 1.0 / p.theta2());
  double x = g2(rng);
  if (p.mu() > p.m()) {
    std::gamma_distribution<double> g1(p.mu() - p.m(), 1.0 / p.theta1());
    x += g1(rng);
  }
  return x;
}

template <class Rng>
std::vector<double> kms_sample(const KappaMuShadowedParams& p, Rng& rng, std::size_t n) {
  std::vector<double> out;
  out.reserve(n);
  std::gamma_distribution<double> g2(p.m(), 1.0 / p.theta2());
  std::gamma_distribution<double> g1(p.mu() > p.m() ? p.mu() - p.m() : 1, 1.0 / p.theta1());
  for (std::size_t i = 0; i < n; ++i) {
    double x = g2(rng);
    if (p.mu() > p.m()) x += g1(rng);
    out.push_back(x);
  }
  return out;
}

/// Throws DomainError at gamma = 0 when m < 1.
double f_pdf(const FisherFParams& p, double gamma);
double f_cdf(const FisherFParams& p, double gamma);
/// 1 - f_cdf without cancellation in the upper tail.
double f_survival(const FisherFParams& p, double gamma);
/// Smallest gamma with f_cdf(gamma) >= q, q in (0, 1).
double f_quantile(const FisherFParams& p, double q);

/// gamma = mean_snr * (G1 / m) / (G2 / m_s) with G1 ~ Gamma(m, 1), G2 ~ Gamma(m_s, 1).
template <class Rng>
double f_draw(const FisherFParams& p, Rng& rng) {
  std::gamma_distribution<double> g1(p.m(), 1.0);
  std::gamma_distribution<double> g2(p.m_s(), 1.0);
  const double a = g1(rng);
  const double b = g2(rng);
  return p.mean_snr() * (a / p.m()) / (b / p.m_s());
}

template <class Rng>
std::vector<double> f_sample(const FisherFParams& p, Rng& rng, std::size_t n) {
  std::vector<double> out;
  out.reserve(n);
  std::gamma_distribution<double> g1(p.m(), 1.0);
  std::gamma_distribution<double> g2(p.m_s(), 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = g1(rng);
    const double b = g2(rng);
    out.push_back(p.mean_snr() * (a / p.m()) / (b / p.m_s()));
  }
  return out;
}

/// Density of Gamma(shape, rate) at x, evaluated in log space.
double gamma_density(double shape, double rate, double x);

}  // namespace edsense
