#include "edsense/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "edsense/capacity.hpp"
#include "edsense/channels.hpp"
#include "edsense/detection.hpp"
#include "edsense/errors.hpp"
#include "edsense/oracle.hpp"

#ifndef EDSENSE_VERSION
#define EDSENSE_VERSION "unknown"
#endif

namespace edsense::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

// Evaluates fn(i) for i in [0, n) on all cores; results stay in index order and
// the first failure (by index) is rethrown.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), static_cast<unsigned>(n)));
  auto work = [&](unsigned w) {
    for (std::size_t i = w; i < n; i += workers) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

int as_integer(double v, const char* name) {
  if (v != std::floor(v) || v < 1 || v > 1e6) throw UsageError(std::string("--") + name + " must be a positive integer");
  return static_cast<int>(v);
}

ChannelParams make_channel(const SweepConfig& c, double snr_db) {
  const double snr = db_to_linear(snr_db);
  if (c.channel == "kms") {
    if (c.ms) throw UsageError("--ms applies to the fisher channel only");
    if (!c.kappa || !c.mu || !c.m) throw UsageError("kms channel needs --kappa, --mu and --m");
    return KappaMuShadowedParams(*c.kappa, as_integer(*c.mu, "mu"), as_integer(*c.m, "m"), snr);
  }
  if (c.channel == "fisher") {
    if (c.kappa || c.mu) throw UsageError("--kappa/--mu apply to the kms channel only");
    if (!c.m || !c.ms) throw UsageError("fisher channel needs --m and --ms");
    return FisherFParams(*c.m, *c.ms, snr);
  }
  throw UsageError("--channel must be kms or fisher");
}

std::vector<double> snr_points(const SweepConfig& c) {
  if (c.snr_db) return c.snr_db->points();
  // Figure defaults: a single point for curves at fixed SNR, 0..20 dB for sweeps.
  if (c.command == "auc" || c.command == "effrate") return SnrRange{0, 20, 1}.points();
  return {c.channel == "kms" ? 10.0 : 0.0};
}

double single_snr(const SweepConfig& c) {
  const auto pts = snr_points(c);
  if (pts.size() != 1) throw UsageError(c.command + " takes a single --snr-db value");
  return pts.front();
}

void write_header(std::ostream& os, const SweepConfig& c) {
  os << "# edsense " << EDSENSE_VERSION << ", " << c.command_line << ", seed=" << c.seed << "\n";
}

void run_croc(const SweepConfig& c, std::ostream& os) {
  const ChannelParams ch = make_channel(c, single_snr(c));
  const auto grid = pf_grid(c.pf_points, c.pf_min, c.pf_max);
  const auto curve = croc_curve(ch, c.u, grid, c.tol);
  write_header(os, c);
  os << "pf,pmd\n";
  for (const auto& p : curve) os << num(p.pf) << "," << num(p.pmd()) << "\n";
}

void run_auc(const SweepConfig& c, std::ostream& os) {
  const auto snrs = snr_points(c);
  const auto vals = parallel_map<double>(snrs.size(), [&](std::size_t i) {
    const ChannelParams ch = make_channel(c, snrs[i]);
    if (const auto* k = std::get_if<KappaMuShadowedParams>(&ch)) return 1 - avg_auc_kms(*k, c.u);
    return 1 - avg_auc_f(std::get<FisherFParams>(ch), c.u);
  });
  write_header(os, c);
  os << "snr_db,comp_auc\n";
  for (std::size_t i = 0; i < snrs.size(); ++i) os << num(snrs[i]) << "," << num(vals[i]) << "\n";
}

void run_effrate(const SweepConfig& c, std::ostream& os) {
  const auto snrs = snr_points(c);
  const DelayQoS q{c.a};
  q.validate();
  const auto vals = parallel_map<double>(snrs.size(), [&](std::size_t i) {
    const ChannelParams ch = make_channel(c, snrs[i]);
    if (const auto* k = std::get_if<KappaMuShadowedParams>(&ch)) return eff_rate_kms(*k, q);
    return eff_rate_f(std::get<FisherFParams>(ch), q);
  });
  write_header(os, c);
  os << "snr_db,eff_rate_bits\n";
  for (std::size_t i = 0; i < snrs.size(); ++i) os << num(snrs[i]) << "," << num(vals[i]) << "\n";
}

double channel_cdf(const ChannelParams& ch, double g) {
  if (const auto* k = std::get_if<KappaMuShadowedParams>(&ch)) return kms_cdf(*k, g);
  return f_cdf(std::get<FisherFParams>(ch), g);
}

void run_pdf(const SweepConfig& c, std::ostream& os) {
  const ChannelParams ch = make_channel(c, single_snr(c));
  if (c.pdf_points < 2) throw UsageError("--points must be >= 2");
  // Upper limit: the 0.9995 quantile, found by bisection on the cdf.
  double hi = 1;
  while (channel_cdf(ch, hi) < 0.9995) {
    hi *= 2;
    if (hi > 1e300) throw NumericalError("pdf: could not bracket the 0.9995 quantile");
  }
  double lo = 0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (channel_cdf(ch, mid) < 0.9995 ? lo : hi) = mid;
  }
  const bool singular = std::holds_alternative<FisherFParams>(ch) && std::get<FisherFParams>(ch).m() < 1;
  write_header(os, c);
  os << "gamma,pdf,cdf\n";
  const int n = c.pdf_points;
  for (int i = singular ? 1 : 0; i < n; ++i) {
    // Quadratic spacing puts more points near the origin, where the shape changes fastest.
    const double t = static_cast<double>(i) / (n - 1);
    const double g = hi * t * t;
    double pdf;
    if (const auto* k = std::get_if<KappaMuShadowedParams>(&ch)) {
      pdf = kms_pdf(*k, g);
    } else {
      pdf = f_pdf(std::get<FisherFParams>(ch), g);
    }
    os << num(g) << "," << num(pdf) << "," << num(channel_cdf(ch, g)) << "\n";
  }
}

int run_verify(const SweepConfig& c, std::ostream& os) {
  using namespace edsense::oracle;
  const auto snrs = snr_points(c);
  std::vector<VerifyCase> cases;
  std::vector<double> case_snr;
  for (double s : snrs) {
    const ChannelParams ch = make_channel(c, s);
    const bool kms = std::holds_alternative<KappaMuShadowedParams>(ch);
    for (double pf : {0.01, 0.1, 0.5}) {
      VerifyCase v{kms ? Metric::avg_pd_kms : Metric::avg_pd_f, ch};
      v.u = c.u;
      v.pf = pf;
      v.series_tol = c.tol;
      cases.push_back(v);
      case_snr.push_back(s);
    }
    VerifyCase a{kms ? Metric::avg_auc_kms : Metric::avg_auc_f, ch};
    a.u = c.u;
    cases.push_back(a);
    case_snr.push_back(s);
    VerifyCase r{kms ? Metric::eff_rate_kms : Metric::eff_rate_f, ch};
    r.a_exponent = c.a;
    cases.push_back(r);
    case_snr.push_back(s);
  }
  VerifyOptions opt;
  opt.mc.seed = c.seed;
  opt.mc.n_samples = c.mc_samples;
  opt.run_mc = c.mc_samples > 0;
  opt.perturb = c.perturb;
  if (opt.run_mc && c.mc_samples < 10000) throw UsageError("--mc-samples must be 0 or >= 10000");

  const auto records = parallel_map<VerificationRecord>(cases.size(), [&](std::size_t i) {
    return verify_closed_form(cases[i], opt);
  });

  write_header(os, c);
  os << "metric,snr_db,u,pf,a,closed_form,quadrature,quadrature_err,monte_carlo,mc_std_error,status\n";
  int passed = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const auto& v = cases[i];
    const bool detection = v.metric == Metric::avg_pd_kms || v.metric == Metric::avg_pd_f;
    const bool rate = v.metric == Metric::eff_rate_kms || v.metric == Metric::eff_rate_f;
    os << r.name << "," << num(case_snr[i]) << "," << (rate ? std::string("") : std::to_string(v.u)) << ","
       << (detection ? num(v.pf) : std::string("")) << "," << (rate ? num(v.a_exponent) : std::string("")) << ","
       << num(r.closed_form) << "," << num(r.quadrature) << "," << num(r.quadrature_error) << ","
       << (r.mc_run ? num(r.monte_carlo) : std::string("")) << "," << (r.mc_run ? num(r.mc_std_error) : std::string(""))
       << "," << (r.pass() ? "PASS" : "FAIL") << "\n";
    if (r.pass()) ++passed;
  }
  os << "# " << passed << "/" << records.size() << " PASS\n";
  return passed == static_cast<int>(records.size()) ? static_cast<int>(ExitCode::ok)
                                                    : static_cast<int>(ExitCode::verify_failed);
}

// Fields from a --json object fill whatever was not given on the command line.
void merge_json(const std::string& path, SweepConfig& c, const CLI::App& app) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open --json file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("invalid JSON in ") + path + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError("--json must hold one object");
  auto given = [&](const char* flag) { return app.count(flag) > 0; };
  try {
    for (const auto& [key, val] : j.items()) {
      if (key == "command") {
        if (c.command.empty()) c.command = val.get<std::string>();
      } else if (key == "channel") {
        if (!given("--channel")) c.channel = val.get<std::string>();
      } else if (key == "kappa") {
        if (!given("--kappa")) c.kappa = val.get<double>();
      } else if (key == "mu") {
        if (!given("--mu")) c.mu = val.get<double>();
      } else if (key == "m") {
        if (!given("--m")) c.m = val.get<double>();
      } else if (key == "ms") {
        if (!given("--ms")) c.ms = val.get<double>();
      } else if (key == "snr_db") {
        if (!given("--snr-db")) {
          c.snr_db = val.is_string() ? parse_snr_range(val.get<std::string>())
                                     : SnrRange{val.get<double>(), val.get<double>(), 1};
        }
      } else if (key == "u") {
        if (!given("--u")) c.u = val.get<int>();
      } else if (key == "a") {
        if (!given("--a")) c.a = val.get<double>();
      } else if (key == "pf_points") {
        if (!given("--pf-points")) c.pf_points = val.get<int>();
      } else if (key == "pf_min") {
        if (!given("--pf-min")) c.pf_min = val.get<double>();
      } else if (key == "pf_max") {
        if (!given("--pf-max")) c.pf_max = val.get<double>();
      } else if (key == "tol") {
        if (!given("--tol")) c.tol = val.get<double>();
      } else if (key == "seed") {
        if (!given("--seed")) c.seed = val.get<std::uint64_t>();
      } else if (key == "out") {
        if (!given("--out")) c.out = val.get<std::string>();
      } else if (key == "points") {
        if (!given("--points")) c.pdf_points = val.get<int>();
      } else if (key == "mc_samples") {
        if (!given("--mc-samples")) c.mc_samples = val.get<std::int64_t>();
      } else {
        throw UsageError("unknown field '" + key + "' in " + path);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("bad field type in ") + path + ": " + e.what());
  }
}

}  // namespace

std::vector<double> SnrRange::points() const {
  if (!(step > 0)) throw DomainError("SNR step must be > 0");
  if (stop < start) throw DomainError("SNR range is empty");
  std::vector<double> pts;
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  for (long i = 0; i <= n; ++i) pts.push_back(start + static_cast<double>(i) * step);
  return pts;
}

SnrRange parse_snr_range(const std::string& text) {
  auto to_d = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw DomainError("bad SNR value '" + text + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw DomainError("bad SNR value '" + text + "'");
    return v;
  };
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() == 1) {
    const double v = to_d(parts[0]);
    return {v, v, 1};
  }
  if (parts.size() == 3) {
    SnrRange r{to_d(parts[0]), to_d(parts[1]), to_d(parts[2])};
    r.points();  // validates
    return r;
  }
  throw DomainError("--snr-db takes R or start:stop:step, got '" + text + "'");
}

std::vector<double> pf_grid(int points, double pf_min, double pf_max) {
  if (points < 1) throw DomainError("--pf-points must be >= 1");
  if (!(pf_min > 0 && pf_max < 1 && pf_min <= pf_max)) throw DomainError("pf range must satisfy 0 < pf-min <= pf-max < 1");
  if (points == 1) return {pf_min};
  if (pf_min == pf_max) throw DomainError("pf range is empty for more than one point");
  std::vector<double> g(points);
  const double l0 = std::log(pf_min), l1 = std::log(pf_max);
  for (int i = 0; i < points; ++i) g[i] = std::exp(l0 + (l1 - l0) * i / (points - 1));
  g.front() = pf_min;
  g.back() = pf_max;
  return g;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  SweepConfig c;
  CLI::App app{"Energy-detection and effective-rate metrics over kappa-mu shadowed and Fisher-Snedecor F fading",
               "edsense"};
  double kappa = 0, mu = 0, m = 0, ms = 0;
  std::string snr_text, json_path;
  double theta = 0, block_time = 0, bandwidth = 0;
  app.add_option("command", c.command, "croc | auc | effrate | verify | pdf")
      ->check(CLI::IsMember({"croc", "auc", "effrate", "verify", "pdf"}));
  app.add_option("--channel", c.channel, "kms | fisher")->check(CLI::IsMember({"kms", "fisher"}));
  app.add_option("--kappa", kappa, "kms: dominant-to-scattered power ratio");
  app.add_option("--mu", mu, "kms: number of clusters (integer)");
  app.add_option("--m", m, "kms: shadowing index (integer); fisher: multipath parameter");
  app.add_option("--ms", ms, "fisher: shadowing parameter");
  app.add_option("--snr-db", snr_text, "mean SNR in dB, R or start:stop:step");
  app.add_option("--u", c.u, "time-bandwidth product")->check(CLI::PositiveNumber);
  app.add_option("--a", c.a, "delay exponent A = Theta T B / ln 2");
  app.add_option("--theta", theta, "delay exponent Theta (with --block-time and --bandwidth, replaces --a)");
  app.add_option("--block-time", block_time, "block duration T");
  app.add_option("--bandwidth", bandwidth, "bandwidth B");
  app.add_option("--pf-points", c.pf_points, "CROC grid size");
  app.add_option("--pf-min", c.pf_min, "smallest false-alarm probability");
  app.add_option("--pf-max", c.pf_max, "largest false-alarm probability");
  app.add_option("--tol", c.tol, "truncation tolerance of the F-channel series");
  app.add_option("--seed", c.seed, "Monte Carlo seed (verify)");
  app.add_option("--out", c.out, "output file (default: standard output)");
  app.add_option("--json", json_path, "read fields from a JSON object; flags take precedence");
  app.add_option("--points", c.pdf_points, "pdf: number of grid points");
  app.add_option("--mc-samples", c.mc_samples, "verify: Monte Carlo samples per cell (0 disables)");
  app.add_option("--perturb", c.perturb, "verify: scale closed forms by (1 + value); self-test hook")
      ->group("");

  std::vector<std::string> argv_store{"edsense"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  c.command_line = "edsense";
  for (const auto& a : args) c.command_line += " " + a;

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ExitCode::usage);
  }

  try {
    if (app.count("--kappa")) c.kappa = kappa;
    if (app.count("--mu")) c.mu = mu;
    if (app.count("--m")) c.m = m;
    if (app.count("--ms")) c.ms = ms;
    if (app.count("--snr-db")) c.snr_db = parse_snr_range(snr_text);
    if (!json_path.empty()) merge_json(json_path, c, app);
    const int rate_flags = static_cast<int>(app.count("--theta") + app.count("--block-time") + app.count("--bandwidth"));
    if (rate_flags == 3) {
      if (app.count("--a")) throw UsageError("give either --a or --theta/--block-time/--bandwidth");
      c.a = DelayQoS::from_theta(theta, block_time, bandwidth).a_exponent;
    } else if (rate_flags != 0) {
      throw UsageError("--theta, --block-time and --bandwidth go together");
    }
    if (c.command.empty()) throw UsageError("missing command (croc | auc | effrate | verify | pdf)");
    if (c.command != "croc" && c.command != "auc" && c.command != "effrate" && c.command != "verify" &&
        c.command != "pdf") {
      throw UsageError("unknown command '" + c.command + "'");
    }
    if (c.channel != "kms" && c.channel != "fisher") throw UsageError("--channel must be kms or fisher");
    if (c.u < 1) throw UsageError("--u must be >= 1");
    if (!(c.tol > 0)) throw UsageError("--tol must be > 0");

    std::ostringstream buf;
    int code = static_cast<int>(ExitCode::ok);
    if (c.command == "croc") {
      run_croc(c, buf);
    } else if (c.command == "auc") {
      run_auc(c, buf);
    } else if (c.command == "effrate") {
      run_effrate(c, buf);
    } else if (c.command == "pdf") {
      run_pdf(c, buf);
    } else {
      code = run_verify(c, buf);
    }
    if (c.out.empty()) {
      out << buf.str();
    } else {
      std::ofstream f(c.out, std::ios::binary);
      if (!f) throw UsageError("cannot write " + c.out);
      f << buf.str();
    }
    return code;
  } catch (const UsageError& e) {
    err << "edsense: " << e.what() << "\n";
    return static_cast<int>(ExitCode::usage);
  } catch (const DomainError& e) {
    err << "edsense: invalid parameters: " << e.what() << "\n";
    return static_cast<int>(ExitCode::usage);
  } catch (const std::exception& e) {
    err << "edsense: numerical failure: " << e.what() << "\n";
    return static_cast<int>(ExitCode::numerical);
  }
}

}  // namespace edsense::cli
