#pragma once

// Front end for the edsense tool: parameter sweeps written as CSV and an
// oracle verification report.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace edsense::cli {

enum class ExitCode : int { ok = 0, verify_failed = 1, usage = 2, numerical = 3 };

struct SnrRange {
  double start = 0;
  double stop = 0;
  double step = 1;
  /// start, start+step, ... up to stop (inclusive, with a small rounding allowance).
  std::vector<double> points() const;
};

/// Parses "R" or "start:stop:step". Throws DomainError on anything else.
SnrRange parse_snr_range(const std::string& text);

struct SweepConfig {
  std::string command;          // croc | auc | effrate | verify | pdf
  std::string channel = "kms";  // kms | fisher
  std::optional<double> kappa;
  std::optional<double> mu;
  std::optional<double> m;
  std::optional<double> ms;
  std::optional<SnrRange> snr_db;
  int u = 2;
  double a = 1.0;
  int pf_points = 50;
  double pf_min = 1e-3;
  double pf_max = 0.999;
  double tol = 1e-8;
  std::uint64_t seed = 42;
  std::string out;              // empty: standard output
  int pdf_points = 201;
  std::int64_t mc_samples = 1000000;
  double perturb = 0;           // verification test hook
  std::string command_line;     // echoed into the provenance header
};

/// Runs the tool. `args` excludes the program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Log-spaced pf grid with `points` entries over [pf_min, pf_max].
std::vector<double> pf_grid(int points, double pf_min, double pf_max);

/// Decibel to linear power ratio.
double db_to_linear(double db);

}  // namespace edsense::cli
