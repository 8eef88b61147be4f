#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace magstrip {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Real symmetric tridiagonal matrix stored by its diagonal and first off-diagonal.
template <typename Scalar>
struct SymTridiagonal {
  Vector<Scalar> diag;
  Vector<Scalar> off;  // size() - 1 entries

  Eigen::Index size() const { return diag.size(); }
};

template <typename Scalar>
Vector<Scalar> apply(const SymTridiagonal<Scalar>& t, const Vector<Scalar>& x) {
  const Eigen::Index n = t.size();
  Vector<Scalar> y = t.diag.cwiseProduct(x);
  if (n > 1) {
    y.head(n - 1) += t.off.cwiseProduct(x.tail(n - 1));
    y.tail(n - 1) += t.off.cwiseProduct(x.head(n - 1));
  }
  return y;
}

template <typename Scalar>
Scalar norm_inf(const SymTridiagonal<Scalar>& t) {
  const Eigen::Index n = t.size();
  Vector<Scalar> row = t.diag.cwiseAbs();
  if (n > 1) {
    row.head(n - 1) += t.off.cwiseAbs();
    row.tail(n - 1) += t.off.cwiseAbs();
  }
  return row.maxCoeff();
}

namespace detail {

template <typename Scalar>
Scalar pivot_floor(const SymTridiagonal<Scalar>& t) {
  const Scalar off2 = t.off.size() > 0 ? t.off.cwiseAbs2().maxCoeff() : Scalar(0);
  return std::numeric_limits<Scalar>::min() * std::max(Scalar(1), off2);
}

}  // namespace detail

/// Number of eigenvalues of the pencil (T, diag(mass)) strictly below sigma.
///
/// Counts negative pivots of the LDL^T factorization of T - sigma * M; by
/// Sylvester's law of inertia this equals the number of generalized
/// eigenvalues below sigma whenever M is positive.
template <typename Scalar>
Eigen::Index count_below(const SymTridiagonal<Scalar>& t, const Vector<Scalar>& mass, Scalar sigma) {
  const Eigen::Index n = t.size();
  const Scalar floor = detail::pivot_floor(t);
  Eigen::Index count = 0;
  Scalar d = t.diag[0] - sigma * mass[0];
  for (Eigen::Index i = 0;; ++i) {
    if (std::abs(d) <= floor) d = -floor;
    if (d < 0) ++count;
    if (i + 1 == n) break;
    d = (t.diag[i + 1] - sigma * mass[i + 1]) - t.off[i] * t.off[i] / d;
  }
  return count;
}

template <typename Scalar>
Eigen::Index count_below(const SymTridiagonal<Scalar>& t, Scalar sigma) {
  return count_below(t, Vector<Scalar>::Ones(t.size()).eval(), sigma);
}

/// Gershgorin enclosure of the spectrum of the pencil (T, diag(mass)).
template <typename Scalar>
std::pair<Scalar, Scalar> gershgorin_bounds(const SymTridiagonal<Scalar>& t, const Vector<Scalar>& mass) {
  const Eigen::Index n = t.size();
  Scalar lo = std::numeric_limits<Scalar>::max();
  Scalar hi = std::numeric_limits<Scalar>::lowest();
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar radius = 0;
    if (i > 0) radius += std::abs(t.off[i - 1]) / std::sqrt(mass[i] * mass[i - 1]);
    if (i + 1 < n) radius += std::abs(t.off[i]) / std::sqrt(mass[i] * mass[i + 1]);
    const Scalar center = t.diag[i] / mass[i];
    lo = std::min(lo, center - radius);
    hi = std::max(hi, center + radius);
  }
  return {lo, hi};
}

/// k-th smallest (0-based) generalized eigenvalue by Sturm-sequence bisection.
template <typename Scalar>
Scalar kth_eigenvalue(const SymTridiagonal<Scalar>& t, const Vector<Scalar>& mass, Eigen::Index k,
                      Scalar abs_tol = Scalar(0)) {
  auto [lo, hi] = gershgorin_bounds(t, mass);
  const Scalar pad = Scalar(2) * std::numeric_limits<Scalar>::epsilon() * std::max(std::abs(lo), std::abs(hi));
  lo -= pad + std::numeric_limits<Scalar>::min();
  hi += pad + std::numeric_limits<Scalar>::min();
  for (int iter = 0; iter < 256; ++iter) {
    const Scalar width = hi - lo;
    const Scalar scale = std::max(std::abs(lo), std::abs(hi));
    if (width <= std::max(abs_tol, Scalar(4) * std::numeric_limits<Scalar>::epsilon() * scale)) break;
    const Scalar mid = lo + width / 2;
    if (mid <= lo || mid >= hi) break;
    if (count_below(t, mass, mid) > k)
      hi = mid;
    else
      lo = mid;
  }
  return lo + (hi - lo) / 2;
}

template <typename Scalar>
Scalar kth_eigenvalue(const SymTridiagonal<Scalar>& t, Eigen::Index k, Scalar abs_tol = Scalar(0)) {
  return kth_eigenvalue(t, Vector<Scalar>::Ones(t.size()).eval(), k, abs_tol);
}

/// LU factorization with partial pivoting of T - sigma I (LAPACK gttrf layout).
template <typename Scalar>
class ShiftedTridiagonalLU {
 public:
  ShiftedTridiagonalLU(const SymTridiagonal<Scalar>& t, Scalar sigma)
      : dl_(t.off), d_(t.diag.array() - sigma), du_(t.off), du2_(std::max<Eigen::Index>(t.size() - 2, 0)),
        pivot_(static_cast<std::size_t>(t.size())) {
    const Eigen::Index n = t.size();
    const Scalar tiny = std::numeric_limits<Scalar>::epsilon() * std::max(norm_inf(t), Scalar(1));
    du2_.setZero();
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      if (std::abs(d_[i]) >= std::abs(dl_[i])) {
        if (d_[i] == 0) d_[i] = tiny;
        const Scalar fact = dl_[i] / d_[i];
        dl_[i] = fact;
        d_[i + 1] -= fact * du_[i];
        pivot_[i] = false;
      } else {
        const Scalar fact = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = fact;
        const Scalar temp = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = temp - fact * d_[i + 1];
        if (i + 2 < n) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -fact * du_[i + 1];
        }
        pivot_[i] = true;
      }
    }
    if (d_[n - 1] == 0) d_[n - 1] = tiny;
  }

  Vector<Scalar> solve(Vector<Scalar> b) const {
    const Eigen::Index n = d_.size();
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      if (!pivot_[i]) {
        b[i + 1] -= dl_[i] * b[i];
      } else {
        const Scalar temp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = temp - dl_[i] * b[i];
      }
    }
    b[n - 1] /= d_[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du_[n - 2] * b[n - 1]) / d_[n - 2];
    for (Eigen::Index i = n - 3; i >= 0; --i) b[i] = (b[i] - du_[i] * b[i + 1] - du2_[i] * b[i + 2]) / d_[i];
    return b;
  }

 private:
  Vector<Scalar> dl_, d_, du_, du2_;
  std::vector<bool> pivot_;
};

template <typename Scalar>
struct InverseIterationResult {
  Vector<Scalar> vector;  // unit Euclidean norm
  Scalar residual;        // ||T v - lambda v||_2
  int iterations;
  bool converged;
};

/// Eigenvector for an (accurately known) simple eigenvalue by inverse iteration.
template <typename Scalar>
InverseIterationResult<Scalar> inverse_iteration(const SymTridiagonal<Scalar>& t, Scalar eigenvalue, Scalar tol,
                                                 int max_iterations = 8) {
  const Eigen::Index n = t.size();
  const Scalar tnorm = norm_inf(t);
  const ShiftedTridiagonalLU<Scalar> lu(t, eigenvalue);

  // Fixed seed keeps results reproducible; a generic start avoids symmetry-orthogonal guesses.
  std::mt19937_64 rng(0x5eed5eedULL);
  std::uniform_real_distribution<double> unit(0.5, 1.5);
  Vector<Scalar> v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = Scalar(unit(rng));
  v.normalize();

  InverseIterationResult<Scalar> out{v, std::numeric_limits<Scalar>::infinity(), 0, false};
  for (int it = 1; it <= max_iterations; ++it) {
    v = lu.solve(v);
    v.normalize();
    const Scalar residual = (apply(t, v) - eigenvalue * v).norm();
    out = {v, residual, it, residual <= tol * tnorm};
    if (out.converged && it >= 2) break;
  }
  return out;
}

}  // namespace magstrip
