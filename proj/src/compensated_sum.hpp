#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace edsense::detail {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(long double x) {
    const long double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  long double value() const { return sum_ + comp_; }

 private:
  long double sum_ = 0;
  long double comp_ = 0;
};

/// Sum in ascending magnitude with compensation; order-independent for a given set.
inline long double sorted_sum(std::vector<long double> terms) {
  std::sort(terms.begin(), terms.end(), [](long double a, long double b) { return std::abs(a) < std::abs(b); });
  CompensatedSum s;
  for (long double t : terms) s.add(t);
  return s.value();
}

}  // namespace edsense::detail
