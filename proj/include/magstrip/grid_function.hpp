#pragma once

#include <Eigen/Core>

#include "magstrip/errors.hpp"

namespace magstrip {

/// Samples of a real function on a strictly increasing set of nodes.
class GridFunction1D {
 public:
  GridFunction1D() = default;
  GridFunction1D(Eigen::VectorXd nodes, Eigen::VectorXd values) : nodes_(std::move(nodes)), values_(std::move(values)) {
    if (nodes_.size() < 3) throw Error(ErrorKind::InvalidSpec, "grid function needs at least 3 nodes");
    if (nodes_.size() != values_.size()) throw Error(ErrorKind::InvalidSpec, "node/value count mismatch");
    for (Eigen::Index i = 1; i < nodes_.size(); ++i)
      if (!(nodes_[i] > nodes_[i - 1])) throw Error(ErrorKind::InvalidSpec, "grid nodes must be strictly increasing");
  }

  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::Index size() const { return nodes_.size(); }

 private:
  Eigen::VectorXd nodes_;
  Eigen::VectorXd values_;
};

/// Trapezoid weights for the given nodes.
inline Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& nodes) {
  const Eigen::Index n = nodes.size();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double h = nodes[i + 1] - nodes[i];
    w[i] += h / 2;
    w[i + 1] += h / 2;
  }
  return w;
}

inline double trapezoid(const Eigen::VectorXd& nodes, const Eigen::VectorXd& values) {
  return trapezoid_weights(nodes).dot(values);
}

inline double trapezoid(const GridFunction1D& f) { return trapezoid(f.nodes(), f.values()); }

/// Trapezoid L2 inner product of two functions on the same nodes.
inline double inner_product(const GridFunction1D& f, const GridFunction1D& g) {
  return trapezoid(f.nodes(), f.values().cwiseProduct(g.values()));
}

}  // namespace magstrip
