#include "edsense/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "edsense/capacity.hpp"
#include "edsense/detection.hpp"
#include "edsense/errors.hpp"
#include "edsense/quadrature.hpp"
#include "edsense/specfun.hpp"

namespace edsense::oracle {

namespace sf = specfun;

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0) || !(rel_tol > 0)) throw DomainError("quadrature: tolerances must be > 0");
  if (max_subdivisions < 1) throw DomainError("quadrature: max_subdivisions must be >= 1");
}

void MonteCarloSpec::validate() const {
  if (n_samples < 1) throw DomainError("monte carlo: n_samples must be >= 1");
  if (n_streams < 1) throw DomainError("monte carlo: n_streams must be >= 1");
}

namespace {

// Geometric breakpoints from lo up to cutoff; they keep GK15 panels on a
// scale that follows the density.
std::vector<double> geometric_breaks(double lo, double cutoff, double factor) {
  std::vector<double> b{0.0};
  for (double x = lo; x < cutoff; x *= factor) b.push_back(x);
  b.push_back(cutoff);
  return b;
}

}  // namespace

Density kms_density(const KappaMuShadowedParams& p, const QuadratureSpec& spec) {
  spec.validate();
  const double target = spec.abs_tol / 10;
  // gamma1 + gamma2 with gamma1 ~ Gamma(mu-m, theta1) <=_st Gamma(mu-m, theta2) since theta2 <= theta1.
  const double rate = p.theta2();
  double L = std::max(1.0, static_cast<double>(p.mu())) / rate;
  while (sf::gamma_q(p.mu(), rate * L) >= target) L *= 1.5;
  Density d;
  d.pdf = [p](double g) { return kms_pdf(p, g); };
  d.regular = d.pdf;
  d.shape_exponent = 1.0;
  d.cutoff = L;
  d.tail_mass = sf::gamma_q(p.mu(), rate * L);
  d.breakpoints = geometric_breaks(0.05 / rate, L, 2.0);
  return d;
}

Density f_density(const FisherFParams& p, const QuadratureSpec& spec) {
  spec.validate();
  const double target = spec.abs_tol / 10;
  double L = p.mean_snr();
  while (f_survival(p, L) >= target) L *= 2;
  Density d;
  const double m = p.m();
  const double ms = p.m_s();
  const double om = p.omega();
  const double ln_c = m * std::log(om) - sf::ln_beta(m, ms);
  d.pdf = [p](double g) { return g == 0 && p.m() < 1 ? INFINITY : f_pdf(p, g); };
  d.regular = [=](double g) { return std::exp(ln_c - (m + ms) * std::log1p(om * g)); };
  d.shape_exponent = m;
  d.cutoff = L;
  d.tail_mass = f_survival(p, L);
  d.breakpoints = geometric_breaks(0.01 / om, L, 2.0);
  return d;
}

Density density_for(const ChannelParams& channel, const QuadratureSpec& spec) {
  if (const auto* k = std::get_if<KappaMuShadowedParams>(&channel)) return kms_density(*k, spec);
  return f_density(std::get<FisherFParams>(channel), spec);
}

Estimate quad_average(const std::function<double(double)>& metric, const Density& density, const QuadratureSpec& spec) {
  spec.validate();
  std::vector<double> bp = density.breakpoints;
  if (bp.size() < 2) bp = {0.0, density.cutoff};
  double value = 0, error = 0;
  std::size_t first = 0;
  if (density.shape_exponent < 1) {
    // g = v^(1/s) on the first panel: g^(s-1) dg = dv / s, so the integrand is regular in v.
    const double s = density.shape_exponent;
    const double v_end = std::pow(bp[1], s);
    const std::array<double, 2> vb{0.0, v_end};
    auto head = quad::integrate<double>(
        [&](double v) {
          const double g = std::pow(v, 1 / s);
          return metric(g) * density.regular(g) / s;
        },
        vb, spec.abs_tol / 2, spec.rel_tol, spec.max_subdivisions);
    value += head.value;
    error += head.error;
    first = 1;
  }
  std::vector<double> rest(bp.begin() + static_cast<std::ptrdiff_t>(first), bp.end());
  auto body = quad::integrate<double>([&](double g) { return metric(g) * density.pdf(g); }, rest,
                                      spec.abs_tol / 2, spec.rel_tol, spec.max_subdivisions);
  value += body.value;
  error += body.error + density.tail_mass;
  return {value, error};
}

Sampler kms_sampler(const KappaMuShadowedParams& p) {
  return [p](Engine& e) { return kms_draw(p, e); };
}

Sampler f_sampler(const FisherFParams& p) {
  return [p](Engine& e) { return f_draw(p, e); };
}

Sampler sampler_for(const ChannelParams& channel) {
  if (const auto* k = std::get_if<KappaMuShadowedParams>(&channel)) return kms_sampler(*k);
  return f_sampler(std::get<FisherFParams>(channel));
}

Engine stream_engine(std::uint64_t seed, int stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x5eedu};
  return Engine(seq);
}

namespace {

struct Moments {
  std::int64_t n = 0;
  double mean = 0;
  double m2 = 0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  // Chan et al. pairwise combination.
  void merge(const Moments& o) {
    if (o.n == 0) return;
    const std::int64_t nn = n + o.n;
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.n) / static_cast<double>(nn);
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / static_cast<double>(nn);
    n = nn;
  }
};

}  // namespace

std::vector<McEstimate> mc_average(const std::vector<std::function<double(double)>>& metrics, const Sampler& sampler,
                                   const MonteCarloSpec& spec) {
  spec.validate();
  const int ns = spec.n_streams;
  const std::size_t nm = metrics.size();
  std::vector<std::vector<Moments>> per_stream(ns, std::vector<Moments>(nm));

  auto run_stream = [&](int k) {
    Engine e = stream_engine(spec.seed, k);
    const std::int64_t count = spec.n_samples / ns + (k < spec.n_samples % ns ? 1 : 0);
    auto& mom = per_stream[k];
    for (std::int64_t i = 0; i < count; ++i) {
      const double g = sampler(e);
      for (std::size_t j = 0; j < nm; ++j) mom[j].add(metrics[j](g));
    }
  };
  const int workers = std::max(1, std::min<int>(ns, static_cast<int>(std::thread::hardware_concurrency())));
  if (workers == 1) {
    for (int k = 0; k < ns; ++k) run_stream(k);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int k = w; k < ns; k += workers) run_stream(k);
      });
    }
    for (auto& t : pool) t.join();
  }

  std::vector<McEstimate> out;
  for (std::size_t j = 0; j < nm; ++j) {
    Moments total;
    for (int k = 0; k < ns; ++k) total.merge(per_stream[k][j]);
    const double var = total.n > 1 ? total.m2 / static_cast<double>(total.n - 1) : 0.0;
    out.push_back({total.mean, std::sqrt(std::max(0.0, var) / static_cast<double>(total.n))});
  }
  return out;
}

McEstimate mc_average(const std::function<double(double)>& metric, const Sampler& sampler, const MonteCarloSpec& spec) {
  return mc_average(std::vector<std::function<double(double)>>{metric}, sampler, spec).front();
}

std::string to_string(Metric m) {
  switch (m) {
    case Metric::avg_pd_kms: return "avg_pd_kms";
    case Metric::avg_pd_f: return "avg_pd_f";
    case Metric::avg_auc_kms: return "avg_auc_kms";
    case Metric::avg_auc_f: return "avg_auc_f";
    case Metric::eff_rate_kms: return "eff_rate_kms";
    case Metric::eff_rate_f: return "eff_rate_f";
  }
  return "?";
}

Metric metric_from_string(const std::string& name) {
  for (Metric m : {Metric::avg_pd_kms, Metric::avg_pd_f, Metric::avg_auc_kms, Metric::avg_auc_f, Metric::eff_rate_kms,
                   Metric::eff_rate_f}) {
    if (to_string(m) == name) return m;
  }
  throw DomainError("unknown metric '" + name + "'");
}

bool is_kms(Metric m) {
  return m == Metric::avg_pd_kms || m == Metric::avg_auc_kms || m == Metric::eff_rate_kms;
}

double auc_double_sum(int u, double gamma) {
  if (u < 1) throw DomainError("auc: u must be >= 1");
  double s = 0;
  for (int l = 0; l < u; ++l) {
    for (int i = 0; i <= l; ++i) {
      const double ln_binom = std::lgamma(l + u) - std::lgamma(l - i + 1) - std::lgamma(u + i);
      const double ln_pow = (i == 0) ? 0.0 : i * std::log(gamma);
      s += std::exp(ln_binom - (l + i + u) * std::log(2.0) + ln_pow - gamma / 2 - std::lgamma(i + 1));
    }
  }
  return 1 - s;
}

namespace {

double lambda_of(const VerifyCase& c) { return c.lambda ? *c.lambda : threshold_for_pf(c.u, c.pf); }

}  // namespace

std::function<double(double)> instantaneous_metric(const VerifyCase& c) {
  switch (c.metric) {
    case Metric::avg_pd_kms:
    case Metric::avg_pd_f: {
      const int u = c.u;
      const double b = std::sqrt(lambda_of(c));
      return [u, b](double g) { return sf::marcum_q(u, std::sqrt(2 * g), b); };
    }
    case Metric::avg_auc_kms:
    case Metric::avg_auc_f: {
      const int u = c.u;
      return [u](double g) { return auc_double_sum(u, g); };
    }
    case Metric::eff_rate_kms:
    case Metric::eff_rate_f: {
      const double a = c.a_exponent;
      return [a](double g) { return std::exp(-a * std::log1p(g)); };
    }
  }
  throw DomainError("instantaneous_metric: unknown metric");
}

VerificationRecord verify_closed_form(const VerifyCase& c, const VerifyOptions& opt) {
  const bool want_kms = is_kms(c.metric);
  if (want_kms != std::holds_alternative<KappaMuShadowedParams>(c.channel)) {
    throw DomainError("verify: metric " + to_string(c.metric) + " does not match the channel type");
  }
  VerificationRecord r;
  r.name = to_string(c.metric);

  double extra_tol = 0;
  switch (c.metric) {
    case Metric::avg_pd_kms:
      r.closed_form = avg_pd_kms(std::get<KappaMuShadowedParams>(c.channel), {c.u, lambda_of(c)});
      break;
    case Metric::avg_pd_f:
      r.closed_form = avg_pd_f(std::get<FisherFParams>(c.channel), {c.u, lambda_of(c)}, c.series_tol).value;
      extra_tol = c.series_tol;
      break;
    case Metric::avg_auc_kms:
      r.closed_form = avg_auc_kms(std::get<KappaMuShadowedParams>(c.channel), c.u);
      break;
    case Metric::avg_auc_f:
      r.closed_form = avg_auc_f(std::get<FisherFParams>(c.channel), c.u);
      break;
    case Metric::eff_rate_kms:
      r.closed_form = eff_rate_inner_kms(std::get<KappaMuShadowedParams>(c.channel), {c.a_exponent});
      break;
    case Metric::eff_rate_f:
      r.closed_form = eff_rate_inner_f(std::get<FisherFParams>(c.channel), {c.a_exponent});
      break;
  }
  r.closed_form *= 1 + opt.perturb;

  const auto metric = instantaneous_metric(c);
  const Estimate q = quad_average(metric, density_for(c.channel, opt.quad), opt.quad);
  r.quadrature = q.value;
  r.quadrature_error = q.error;
  r.pass_quadrature = std::abs(r.closed_form - q.value) <= opt.quad_tol + extra_tol;

  if (opt.run_mc) {
    const McEstimate mc = mc_average(metric, sampler_for(c.channel), opt.mc);
    r.mc_run = true;
    r.monte_carlo = mc.mean;
    r.mc_std_error = mc.std_error;
    const double diff = std::abs(r.closed_form - mc.mean);
    r.pass_mc = mc.std_error > 0 ? diff <= opt.mc_sigmas * mc.std_error : diff <= 1e-12;
  }
  return r;
}

}  // namespace edsense::oracle
