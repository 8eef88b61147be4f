#include "magstrip/fiber_solver.hpp"

#include <cmath>
#include <string>

namespace magstrip {

void FiberSpec::validate() const {
  if (!(L > 0) || !std::isfinite(L)) throw Error(ErrorKind::InvalidSpec, "L must be positive, got " + std::to_string(L));
  if (!(b >= 0) || !std::isfinite(b)) throw Error(ErrorKind::InvalidSpec, "b must be non-negative");
  if (!std::isfinite(k)) throw Error(ErrorKind::InvalidSpec, "k must be finite");
}

Eigen::VectorXd fiber_nodes(double L, Eigen::Index n) {
  const double h = 2 * L / static_cast<double>(n + 1);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = -L + static_cast<double>(i + 1) * h;
  return x;
}

SymTridiagonal<double> assemble_fiber(const FiberSpec& spec, Eigen::Index n) {
  spec.validate();
  if (n < 3) throw Error(ErrorKind::InvalidSpec, "fiber grid needs n >= 3");
  const double h = 2 * spec.L / static_cast<double>(n + 1);
  const Eigen::VectorXd x = fiber_nodes(spec.L, n);
  SymTridiagonal<double> t;
  t.diag = (2.0 / (h * h)) + (spec.b * x.array() - spec.k).square();
  t.off = Eigen::VectorXd::Constant(n - 1, -1.0 / (h * h));
  return t;
}

namespace {

struct GridSolve {
  std::vector<Eigenpair> pairs;
  std::vector<double> slopes;
};

GridSolve solve_on_grid(const FiberSpec& spec, Eigen::Index n, int m, double tol) {
  const SymTridiagonal<double> t = assemble_fiber(spec, n);
  const Eigen::VectorXd interior = fiber_nodes(spec.L, n);
  Eigen::VectorXd nodes(n + 2);
  nodes << -spec.L, interior, spec.L;
  const double h = 2 * spec.L / static_cast<double>(n + 1);

  GridSolve out;
  for (int j = 1; j <= m; ++j) {
    const double energy = kth_eigenvalue(t, j - 1);
    const auto inv = inverse_iteration(t, energy, tol);
    if (!inv.converged)
      throw Error(ErrorKind::NoConvergence, "inverse iteration for band " + std::to_string(j) +
                                                " stalled at residual " + std::to_string(inv.residual));
    Eigen::VectorXd values = Eigen::VectorXd::Zero(n + 2);
    values.segment(1, n) = inv.vector / std::sqrt(h * inv.vector.squaredNorm());
    if (values[1] < 0) values = -values;
    Eigenpair pair{j, energy, GridFunction1D(nodes, std::move(values))};
    out.slopes.push_back(feynman_hellmann_slope(spec, pair));
    out.pairs.push_back(std::move(pair));
  }
  return out;
}

}  // namespace

double feynman_hellmann_slope(const FiberSpec& spec, const Eigenpair& pair) {
  const auto& x = pair.psi.nodes();
  const auto& psi = pair.psi.values();
  return 2 * trapezoid(x, ((spec.k - spec.b * x.array()) * psi.array().square()).matrix());
}

FiberSolution solve_fiber(const FiberSpec& spec, int m, const SolverOptions& options) {
  spec.validate();
  if (m < 1) throw Error(ErrorKind::InvalidSpec, "need at least one band");
  if (!(options.tol > 0)) throw Error(ErrorKind::InvalidSpec, "tolerance must be positive");
  if (options.n < 3) throw Error(ErrorKind::InvalidSpec, "fiber grid needs n >= 3");
  if (options.n + 2 <= m) throw Error(ErrorKind::InvalidSpec, "grid too coarse for the requested band count");

  GridSolve coarse = solve_on_grid(spec, options.n, m, options.tol);
  FiberSolution sol{spec, std::move(coarse.pairs), std::move(coarse.slopes)};
  if (options.richardson) {
    // h -> h/2 exactly; the h^2 error term cancels.
    const GridSolve fine = solve_on_grid(spec, 2 * options.n + 1, m, options.tol);
    for (int j = 0; j < m; ++j) {
      sol.pairs[j].energy = (4 * fine.pairs[j].energy - sol.pairs[j].energy) / 3;
      sol.slopes[j] = (4 * fine.slopes[j] - sol.slopes[j]) / 3;
    }
  }
  return sol;
}

std::vector<Eigenpair> eigen_lowest(const FiberSpec& spec, Eigen::Index n, int m, double tol, bool richardson) {
  return solve_fiber(spec, m, {n, tol, richardson}).pairs;
}

}  // namespace magstrip
