#pragma once

#include <vector>

#include "magstrip/grid_function.hpp"
#include "magstrip/tridiagonal.hpp"

namespace magstrip {

/// Parameters of the fiber operator -d^2/dx^2 + (b x - k)^2 on (-L, L) with Dirichlet ends.
struct FiberSpec {
  double b = 1.0;  // field strength, b >= 0
  double L = 1.0;  // strip half-width
  double k = 0.0;  // fiber momentum

  void validate() const;
};

struct SolverOptions {
  Eigen::Index n = 2048;  // interior grid points of the base grid
  double tol = 1e-9;      // relative residual tolerance for eigenvectors
  bool richardson = true; // combine grids n and 2n+1 (exact step halving)
};

struct Eigenpair {
  int j = 0;                // 1-based band index
  double energy = 0.0;      // E_j(k)
  GridFunction1D psi;       // on [-L, L] including both (zero) endpoints
};

/// Eigenpairs plus Feynman-Hellmann slopes dE_j/dk, extrapolated consistently.
struct FiberSolution {
  FiberSpec spec;
  std::vector<Eigenpair> pairs;
  std::vector<double> slopes;
};

/// Interior nodes x_i = -L + i h, h = 2L/(n+1), i = 1..n.
Eigen::VectorXd fiber_nodes(double L, Eigen::Index n);

/// Central-difference discretization of the fiber operator on n interior nodes.
SymTridiagonal<double> assemble_fiber(const FiberSpec& spec, Eigen::Index n);

/// The m lowest eigenpairs and their momentum derivatives.
FiberSolution solve_fiber(const FiberSpec& spec, int m, const SolverOptions& options = {});

std::vector<Eigenpair> eigen_lowest(const FiberSpec& spec, Eigen::Index n, int m, double tol, bool richardson = true);

/// 2 * integral of (k - b x) psi^2 over the strip (trapezoid rule on the solve grid).
double feynman_hellmann_slope(const FiberSpec& spec, const Eigenpair& pair);

}  // namespace magstrip
