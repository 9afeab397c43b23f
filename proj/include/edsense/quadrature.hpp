#pragma once

// Globally adaptive Gauss-Kronrod (7/15) integration. Templated on the scalar
// so the special-function layer can run in extended precision while the
// oracles use plain double.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "edsense/errors.hpp"

namespace edsense::quad {

template <class Real>
struct Result {
  Real value{};
  Real error{};
  int subdivisions = 0;
};

namespace detail {

inline constexpr std::array<long double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329L, 0.949107912342758524526189684047851L,
    0.864864423359769072789712788640926L, 0.741531185599394439863864773280788L,
    0.586087235467691130294144845693013L, 0.405845151377397166906606412076961L,
    0.207784955007898467600689403773245L, 0.0L};
inline constexpr std::array<long double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970L, 0.063092092629978553290700663189204L,
    0.104790010322250183839876322541518L, 0.140653259715525918745189590510238L,
    0.169004726639267902826583426598550L, 0.190350578064785409913256402421014L,
    0.204432940075298892414161999234649L, 0.209482141084727828012999174891714L};
// Gauss weights at the odd-indexed Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<long double, 4> kGaussWeights = {
    0.129484966168869693270611432679082L, 0.279705391489276667901467771423780L,
    0.381830050505118944950369775488975L, 0.417959183673469387755102040816327L};

template <class Real>
struct Segment {
  Real a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class Real, class F>
Segment<Real> gk15(F& f, Real a, Real b) {
  const Real center = (a + b) / 2;
  const Real half = (b - a) / 2;
  const Real fc = f(center);
  Real kronrod = fc * static_cast<Real>(kKronrodWeights[7]);
  Real gauss = fc * static_cast<Real>(kGaussWeights[3]);
  Real abs_sum = std::abs(kronrod);
  std::array<Real, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const Real dx = half * static_cast<Real>(kKronrodNodes[j]);
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const Real w = static_cast<Real>(kKronrodWeights[j]);
    kronrod += w * (f1[j] + f2[j]);
    abs_sum += w * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) gauss += static_cast<Real>(kGaussWeights[j / 2]) * (f1[j] + f2[j]);
  }
  const Real mean = kronrod / 2;
  Real asc = std::abs(fc - mean) * static_cast<Real>(kKronrodWeights[7]);
  for (int j = 0; j < 7; ++j)
    asc += static_cast<Real>(kKronrodWeights[j]) * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

  const Real value = kronrod * half;
  Real err = std::abs((kronrod - gauss) * half);
  asc *= std::abs(half);
  abs_sum *= std::abs(half);
  if (asc != 0 && err != 0) err = asc * std::min(Real(1), std::pow(200 * err / asc, Real(1.5)));
  const Real eps = std::numeric_limits<Real>::epsilon();
  if (abs_sum > std::numeric_limits<Real>::min() / (50 * eps)) err = std::max(err, 50 * eps * abs_sum);
  return {a, b, value, err};
}

}  // namespace detail

/// Integrates f over consecutive pieces [p0,p1], [p1,p2], ... of the
/// breakpoint list, bisecting the piece with the largest error estimate
/// until the total estimate is below max(abs_tol, rel_tol*|I|).
/// Throws ConvergenceError when max_subdivisions is reached first.
template <class Real, class F>
Result<Real> integrate(F&& f, std::span<const Real> breakpoints, Real abs_tol, Real rel_tol,
                       int max_subdivisions = 2000) {
  if (breakpoints.size() < 2) throw DomainError("integrate: need at least two breakpoints");
  std::priority_queue<detail::Segment<Real>> heap;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] == breakpoints[i]) continue;
    heap.push(detail::gk15<Real>(f, breakpoints[i], breakpoints[i + 1]));
  }
  int count = static_cast<int>(heap.size());
  auto totals = [&heap]() {
    Real value = 0, error = 0, comp = 0;
    auto copy = heap;
    while (!copy.empty()) {
      const auto& s = copy.top();
      // Neumaier summation of the piece values.
      const Real t = value + s.value;
      comp += std::abs(value) >= std::abs(s.value) ? (value - t) + s.value : (s.value - t) + value;
      value = t;
      error += s.error;
      copy.pop();
    }
    return std::pair<Real, Real>{value + comp, error};
  };
  auto [value, error] = totals();
  for (;;) {
    if (error <= std::max(abs_tol, rel_tol * std::abs(value))) {
      // Running sums drift; confirm with a fresh pass before accepting.
      std::tie(value, error) = totals();
      if (error <= std::max(abs_tol, rel_tol * std::abs(value))) break;
    }
    if (count >= max_subdivisions) {
      throw ConvergenceError("integrate: subdivision limit reached (estimated error " +
                             std::to_string(static_cast<double>(error)) + ")");
    }
    const auto worst = heap.top();
    const Real mid = (worst.a + worst.b) / 2;
    if (mid <= worst.a || mid >= worst.b) break;  // cannot split further in this precision
    heap.pop();
    const auto left = detail::gk15<Real>(f, worst.a, mid);
    const auto right = detail::gk15<Real>(f, mid, worst.b);
    heap.push(left);
    heap.push(right);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    ++count;
  }
  return {value, error, count};
}

/// Integral over [a, inf) via t = a + scale * s / (1 - s).
template <class Real, class F>
Result<Real> integrate_tail(F&& f, Real a, Real scale, Real abs_tol, Real rel_tol,
                            int max_subdivisions = 2000) {
  auto mapped = [&](Real s) -> Real {
    const Real one_minus = 1 - s;
    const Real t = a + scale * s / one_minus;
    const Real v = f(t);
    return v == 0 ? Real(0) : v * scale / (one_minus * one_minus);
  };
  const std::array<Real, 2> ends{Real(0), Real(1)};
  return integrate<Real>(mapped, std::span<const Real>(ends), abs_tol, rel_tol, max_subdivisions);
}

}  // namespace edsense::quad
