#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace magstrip {

template <typename Scalar>
struct QuadratureResult {
  Scalar value;
  Scalar error;
  int evaluations;
};

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename Scalar>
struct Segment {
  Scalar a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <typename Scalar, typename F>
Segment<Scalar> gauss_kronrod_15(F& f, Scalar a, Scalar b) {
  const Scalar center = (a + b) / 2;
  const Scalar half = (b - a) / 2;
  const Scalar fc = f(center);
  Scalar kronrod = Scalar(kKronrodWeights[7]) * fc;
  Scalar gauss = Scalar(kGaussWeights[3]) * fc;
  for (int i = 0; i < 7; ++i) {
    const Scalar dx = half * Scalar(kKronrodNodes[i]);
    const Scalar pair = f(center - dx) + f(center + dx);
    kronrod += Scalar(kKronrodWeights[i]) * pair;
    if (i % 2 == 1) gauss += Scalar(kGaussWeights[i / 2]) * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod quadrature of f over [a, b].
///
/// Bisects the interval with the largest error estimate until the summed
/// estimate drops below max(abs_tol, rel_tol * |I|) or the segment budget
/// is exhausted. Endpoints are never evaluated.
template <typename Scalar, typename F>
QuadratureResult<Scalar> integrate(F&& f, Scalar a, Scalar b, Scalar abs_tol = Scalar(1e-12),
                                   Scalar rel_tol = Scalar(1e-12), int max_segments = 4000) {
  if (a == b) return {Scalar(0), Scalar(0), 0};
  std::priority_queue<detail::Segment<Scalar>> heap;
  auto first = detail::gauss_kronrod_15<Scalar>(f, a, b);
  Scalar total = first.value;
  Scalar error = first.error;
  heap.push(first);
  int evaluations = 15;
  while (static_cast<int>(heap.size()) < max_segments &&
         error > std::max(abs_tol, rel_tol * std::abs(total))) {
    const auto worst = heap.top();
    heap.pop();
    const Scalar mid = (worst.a + worst.b) / 2;
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      break;
    }
    const auto left = detail::gauss_kronrod_15<Scalar>(f, worst.a, mid);
    const auto right = detail::gauss_kronrod_15<Scalar>(f, mid, worst.b);
    evaluations += 30;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed accumulated cancellation in the running totals.
  total = 0;
  error = 0;
  while (!heap.empty()) {
    total += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return {total, error, evaluations};
}

/// Integral of f over [a, inf) via the map y = a + t / (1 - t).
template <typename Scalar, typename F>
QuadratureResult<Scalar> integrate_to_infinity(F&& f, Scalar a, Scalar abs_tol = Scalar(1e-12),
                                               Scalar rel_tol = Scalar(1e-12)) {
  auto mapped = [&](Scalar t) {
    const Scalar s = Scalar(1) - t;
    return f(a + t / s) / (s * s);
  };
  return integrate(mapped, Scalar(0), Scalar(1), abs_tol, rel_tol);
}

/// Integral over [a, b] of an integrand with square-root behaviour at both
/// ends (e.g. the root of a function with simple zeros at a and b), through
/// y = a + (b - a) * (1 - cos(pi u)) / 2.
template <typename Scalar, typename F>
QuadratureResult<Scalar> integrate_sqrt_endpoints(F&& f, Scalar a, Scalar b, Scalar abs_tol = Scalar(1e-12),
                                                  Scalar rel_tol = Scalar(1e-12)) {
  const Scalar pi = std::acos(Scalar(-1));
  const Scalar half = (b - a) / 2;
  auto mapped = [&](Scalar u) { return f(a + half * (Scalar(1) - std::cos(pi * u))) * half * pi * std::sin(pi * u); };
  return integrate(mapped, Scalar(0), Scalar(1), abs_tol, rel_tol);
}

}  // namespace magstrip
