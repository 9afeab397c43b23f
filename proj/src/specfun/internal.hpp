#pragma once

#include <cmath>
#include <limits>

#include "edsense/specfun.hpp"

namespace edsense::specfun::detail {

inline constexpr long double kEpsL = std::numeric_limits<long double>::epsilon();
inline constexpr long double kPiL = 3.141592653589793238462643383279502884L;

struct SignedLog {
  long double log_abs;
  int sign;  // 0 encodes an exact zero
};

/// ln|Gamma(x)| with the sign of Gamma(x); sign is 0 at poles (where 1/Gamma = 0).
SignedLog ln_gamma_signed(long double x);

inline bool is_nonpositive_integer(long double x) { return x <= 0 && x == std::floor(x); }

/// Running sum that stops after three consecutive negligible terms.
class SeriesMonitor {
 public:
  explicit SeriesMonitor(long double rel_tol) : rel_tol_(rel_tol) {}
  bool negligible(long double term, long double partial) {
    if (std::abs(term) <= rel_tol_ * std::abs(partial)) {
      ++quiet_;
    } else {
      quiet_ = 0;
    }
    return quiet_ >= 3;
  }

 private:
  long double rel_tol_;
  int quiet_ = 0;
};

/// The tighter of the caller's tolerance and what extended precision resolves.
inline long double series_tol(const AccuracyPolicy& p) {
  return std::min<long double>(p.rel_tol, 1e-17L);
}

}  // namespace edsense::specfun::detail
