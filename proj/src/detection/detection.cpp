#include "edsense/detection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "../compensated_sum.hpp"
#include "edsense/errors.hpp"

namespace edsense {

namespace sf = specfun;
namespace sfd = specfun::detail;

void DetectorConfig::validate() const {
  if (u < 1) throw DomainError("detector: u must be >= 1");
  if (!(lambda >= 0) || !std::isfinite(lambda)) throw DomainError("detector: lambda must be >= 0");
}

double prob_false_alarm(const DetectorConfig& cfg) {
  cfg.validate();
  return sf::gamma_q(cfg.u, cfg.lambda / 2);
}

double threshold_for_pf(int u, double pf_target) {
  if (u < 1) throw DomainError("threshold_for_pf: u must be >= 1");
  if (!(pf_target > 0 && pf_target < 1)) throw DomainError("threshold_for_pf: pf must lie in (0, 1)");
  auto pf = [u](double lam) { return sf::gamma_q(u, lam / 2); };
  double lo = 0, hi = std::max(1.0, 2.0 * u);
  while (pf(hi) > pf_target) {
    lo = hi;
    hi *= 2;
    if (hi > 1e4) {
      if (pf(1e4) > pf_target) throw ConvergenceError("threshold_for_pf: bracket exceeds lambda = 1e4");
      hi = 1e4;
      break;
    }
  }
  for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (pf(mid) > pf_target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(pf(lo) - pf_target) < std::abs(pf(hi) - pf_target) ? lo : hi;
}

double prob_detect_instant(const DetectorConfig& cfg, double gamma, const AccuracyPolicy& policy) {
  cfg.validate();
  if (!(gamma >= 0)) throw DomainError("prob_detect_instant: gamma must be >= 0");
  return sf::marcum_q(cfg.u, std::sqrt(2 * gamma), std::sqrt(cfg.lambda), policy);
}

namespace {

// E[Q_u(sqrt(2g), sqrt(lambda))] under Gamma(p, theta) for integer p equals
// P_f + sum_{j<p} B(j) with
//   B(j) = x^u e^{-x} / u! * theta^j / (1+theta)^{j+1} * 1F1(j+1; u+1; x/(1+theta)),  x = lambda/2.
// Returns the prefix sums S(p) = sum_{j<p} B(j) for p = 0..max_shape.
std::vector<long double> detection_prefix(double theta, int u, double x, int max_shape, const AccuracyPolicy& policy) {
  std::vector<long double> prefix(max_shape + 1, 0.0L);
  const long double ln_front = u * std::log(static_cast<long double>(x)) - x - sfd::ln_gamma_l(u + 1);
  const long double lt = std::log(static_cast<long double>(theta));
  const long double l1t = std::log1p(static_cast<long double>(theta));
  const double z = x / (1 + theta);
  detail::CompensatedSum acc;
  for (int j = 0; j < max_shape; ++j) {
    const long double b =
        std::exp(ln_front + j * lt - (j + 1) * l1t) * sf::kummer_1f1(j + 1, u + 1, z, policy);
    acc.add(b);
    prefix[j + 1] = acc.value();
  }
  return prefix;
}

int integer_shape(double s) {
  if (s < 1 || s != std::floor(s)) throw DomainError("detection: closed form needs integer Gamma shapes");
  return static_cast<int>(s);
}

}  // namespace

double avg_pd_mixture(const GammaMixture& mix, const DetectorConfig& cfg, const AccuracyPolicy& policy) {
  cfg.validate();
  if (cfg.lambda == 0) return 1.0;
  const double x = cfg.lambda / 2;
  const long double pf = sfd::gamma_q_l(cfg.u, x);

  std::map<double, int> max_shape;
  for (const auto& t : mix.terms) {
    int& s = max_shape[t.rate];
    s = std::max(s, integer_shape(t.shape));
  }
  std::map<double, std::vector<long double>> prefix;
  for (const auto& [rate, s] : max_shape) prefix[rate] = detection_prefix(rate, cfg.u, x, s, policy);

  std::vector<long double> terms;
  terms.reserve(mix.terms.size() * 2);
  for (const auto& t : mix.terms) {
    terms.push_back(t.weight * pf);
    terms.push_back(t.weight * prefix[t.rate][integer_shape(t.shape)]);
  }
  const long double v = detail::sorted_sum(std::move(terms));
  return static_cast<double>(std::clamp(v, 0.0L, 1.0L));
}

double avg_pd_kms(const KappaMuShadowedParams& p, const DetectorConfig& cfg, const AccuracyPolicy& policy) {
  return avg_pd_mixture(gamma_mixture(p), cfg, policy);
}

std::vector<double> auc_coefficients(int u) {
  if (u < 1) throw DomainError("auc: u must be >= 1");
  std::vector<double> a(u, 0.0);
  const long double ln2 = std::log(2.0L);
  for (int i = 0; i < u; ++i) {
    detail::CompensatedSum s;
    for (int l = i; l < u; ++l) {
      // binom(l+u-1, l-i) 2^{-(l+i+u)} / i!
      const long double ln_term = sfd::ln_gamma_l(l + u) - sfd::ln_gamma_l(l - i + 1) - sfd::ln_gamma_l(u + i) -
                                  (l + i + u) * ln2 - sfd::ln_gamma_l(i + 1);
      s.add(std::exp(ln_term));
    }
    a[i] = static_cast<double>(s.value());
  }
  return a;
}

double auc_instant(int u, double gamma) {
  if (!(gamma >= 0)) throw DomainError("auc_instant: gamma must be >= 0");
  const std::vector<double> a = auc_coefficients(u);
  std::vector<long double> terms;
  for (int i = 0; i < u; ++i) {
    if (i > 0 && gamma == 0) break;
    const long double lg = (i == 0) ? 0.0L : i * std::log(static_cast<long double>(gamma));
    terms.push_back(a[i] * std::exp(lg - gamma / 2.0L));
  }
  return static_cast<double>(1 - detail::sorted_sum(std::move(terms)));
}

double avg_auc_mixture(const GammaMixture& mix, int u) {
  const std::vector<double> a = auc_coefficients(u);
  // Under Gamma(p, theta): E[g^i e^{-g/2}] = (theta/(theta+1/2))^p (p)_i / (theta+1/2)^i.
  std::vector<long double> terms;
  for (const auto& t : mix.terms) {
    const long double th = t.rate;
    const long double th_half = th + 0.5L;
    const long double base = t.shape * std::log(th / th_half);
    for (int i = 0; i < u; ++i) {
      const long double ln_e = base + sfd::ln_gamma_l(t.shape + i) - sfd::ln_gamma_l(t.shape) - i * std::log(th_half);
      terms.push_back(t.weight * a[i] * std::exp(ln_e));
    }
  }
  const long double v = 1 - detail::sorted_sum(std::move(terms));
  return static_cast<double>(std::clamp(v, 0.5L, 1.0L));
}

double avg_auc_kms(const KappaMuShadowedParams& p, int u) { return avg_auc_mixture(gamma_mixture(p), u); }

double avg_auc_f(const FisherFParams& p, int u, const AccuracyPolicy& policy) {
  const std::vector<double> a = auc_coefficients(u);
  // E_F[g^i e^{-g/2}] = Gamma(i+m) / (B(m, m_s) Omega^i) U(i+m; i-m_s+1; 1/(2 Omega))
  const long double om = p.omega();
  const long double ln_b = sf::ln_beta(p.m(), p.m_s());
  std::vector<long double> terms;
  for (int i = 0; i < u; ++i) {
    const long double ln_e = sfd::ln_gamma_l(i + p.m()) - ln_b - i * std::log(om) +
                             sf::log_tricomi_u(i + p.m(), i - p.m_s() + 1, static_cast<double>(1 / (2 * om)), policy);
    terms.push_back(a[i] * std::exp(ln_e));
  }
  const long double v = 1 - detail::sorted_sum(std::move(terms));
  return static_cast<double>(std::clamp(v, 0.5L, 1.0L));
}

std::vector<RocPoint> croc_curve(const ChannelParams& channel, int u, std::span<const double> pf_grid, double tol,
                                 const AccuracyPolicy& policy) {
  for (std::size_t i = 0; i < pf_grid.size(); ++i) {
    if (!(pf_grid[i] > 0 && pf_grid[i] < 1)) throw DomainError("croc_curve: pf values must lie in (0, 1)");
    if (i > 0 && !(pf_grid[i] > pf_grid[i - 1])) throw DomainError("croc_curve: pf grid must be ascending");
  }
  std::vector<RocPoint> out;
  out.reserve(pf_grid.size());
  if (const auto* kms = std::get_if<KappaMuShadowedParams>(&channel)) {
    const GammaMixture mix = gamma_mixture(*kms);
    for (double pf : pf_grid) {
      const DetectorConfig cfg{u, threshold_for_pf(u, pf)};
      out.push_back({pf, avg_pd_mixture(mix, cfg, policy)});
    }
  } else {
    FisherSeries series(std::get<FisherFParams>(channel), policy);
    for (double pf : pf_grid) {
      const DetectorConfig cfg{u, threshold_for_pf(u, pf)};
      out.push_back({pf, avg_pd_f(series, cfg, tol, policy).value});
    }
  }
  return out;
}

}  // namespace edsense
