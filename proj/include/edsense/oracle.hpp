#pragma once

// Reference averages that do not go through the closed forms: adaptive
// quadrature of the averaging integrals against the channel density, and
// seeded Monte Carlo over channel samples.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "edsense/channels.hpp"

namespace edsense::oracle {

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_subdivisions = 2000;

  void validate() const;
};

/// pdf(g) = g^(shape_exponent - 1) * regular(g) on [0, cutoff]. The split lets the
/// quadrature remove an integrable singularity at 0 by substituting g = v^(1/s).
struct Density {
  std::function<double(double)> pdf;
  std::function<double(double)> regular;
  double shape_exponent = 1.0;
  double cutoff = 0.0;
  /// Certified bound on the mass beyond cutoff.
  double tail_mass = 0.0;
  std::vector<double> breakpoints;  // ascending, from 0 to cutoff
};

/// Cutoff from the stochastic order gamma <= Gamma(mu, theta2): P(gamma > L) <= Q(mu, theta2 L).
Density kms_density(const KappaMuShadowedParams& p, const QuadratureSpec& spec = {});
/// Cutoff from the exact F survival function.
Density f_density(const FisherFParams& p, const QuadratureSpec& spec = {});
Density density_for(const ChannelParams& channel, const QuadratureSpec& spec = {});

struct Estimate {
  double value;
  double error;
};

/// integral_0^L metric * pdf. The error adds the quadrature estimate and the tail
/// mass (so it assumes |metric| <= 1 beyond L). ConvergenceError at the
/// subdivision limit.
Estimate quad_average(const std::function<double(double)>& metric, const Density& density,
                      const QuadratureSpec& spec = {});

struct MonteCarloSpec {
  std::uint64_t seed = 42;
  std::int64_t n_samples = 1000000;
  int n_streams = 4;

  void validate() const;
};

using Engine = std::mt19937_64;
using Sampler = std::function<double(Engine&)>;

Sampler kms_sampler(const KappaMuShadowedParams& p);
Sampler f_sampler(const FisherFParams& p);
Sampler sampler_for(const ChannelParams& channel);

/// Engine for stream k of a run, seeded from (seed, k).
Engine stream_engine(std::uint64_t seed, int stream);

struct McEstimate {
  double mean;
  double std_error;
};

/// Sample mean and standard error. Streams run on worker threads; the
/// per-stream moments are combined in stream order, so the result depends only
/// on (seed, n_samples, n_streams).
McEstimate mc_average(const std::function<double(double)>& metric, const Sampler& sampler,
                      const MonteCarloSpec& spec = {});
/// Several metrics over one shared set of samples.
std::vector<McEstimate> mc_average(const std::vector<std::function<double(double)>>& metrics,
                                   const Sampler& sampler, const MonteCarloSpec& spec = {});

enum class Metric { avg_pd_kms, avg_pd_f, avg_auc_kms, avg_auc_f, eff_rate_kms, eff_rate_f };

std::string to_string(Metric m);
/// DomainError for an unknown name.
Metric metric_from_string(const std::string& name);
bool is_kms(Metric m);

struct VerifyCase {
  Metric metric;
  ChannelParams channel;
  int u = 2;                // detection metrics
  double pf = 0.1;          // detection metrics: lambda = threshold_for_pf(u, pf)
  std::optional<double> lambda{};  // overrides pf when set
  double a_exponent = 1.0;  // rate metrics
  double series_tol = 1e-8; // F-channel detection series
};

struct VerifyOptions {
  QuadratureSpec quad;
  MonteCarloSpec mc;
  bool run_mc = true;
  double quad_tol = 1e-7;       // absolute, plus series_tol for the F series
  double mc_sigmas = 4.0;
  /// Test hook: scales the closed-form value by (1 + perturb) before comparing.
  double perturb = 0.0;
};

/// For rate metrics every value is the inner expectation E[(1+gamma)^{-A}].
struct VerificationRecord {
  std::string name;
  double closed_form = 0;
  double quadrature = 0;
  double quadrature_error = 0;
  double monte_carlo = 0;
  double mc_std_error = 0;
  bool mc_run = false;
  bool pass_quadrature = false;
  bool pass_mc = false;
  bool pass() const { return pass_quadrature && (!mc_run || pass_mc); }
};

VerificationRecord verify_closed_form(const VerifyCase& c, const VerifyOptions& opt = {});

/// The instantaneous metric that verify_closed_form averages, built from
/// special functions only.
std::function<double(double)> instantaneous_metric(const VerifyCase& c);

/// Instantaneous area under the ROC from its double sum, written independently
/// of the detection module.
double auc_double_sum(int u, double gamma);

}  // namespace edsense::oracle
