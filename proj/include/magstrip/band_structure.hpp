#pragma once

#include <vector>

#include "magstrip/fiber_solver.hpp"

namespace magstrip {

/// Strip parameters shared by every fiber of a band.
struct BandContext {
  double b = 1.0;
  double L = 1.0;
  SolverOptions solver{};
};

/// Sampled band function E_j(k) on a symmetric momentum grid containing 0.
struct Band {
  int j = 0;
  BandContext context;
  Eigen::VectorXd k;       // uniform on [-k_max, k_max]
  Eigen::VectorXd energy;  // E_j(k)
  Eigen::VectorXd slope;   // E_j'(k), Feynman-Hellmann
  double threshold = 0.0;  // E_j(0)
  double mu = 0.0;         // E_j''(0) / 2

  Eigen::Index zero_index() const { return k.size() / 2; }
};

struct CurvatureFit {
  double mu;        // coefficient of k^2
  double quartic;   // coefficient of k^4
  int nodes;        // samples used
};

/// 3 sqrt(E_m + 5 b): covers the momentum range needed up to band m.
double default_k_max(double b, double threshold_m);

/// Samples bands 1..m at n_k momenta (n_k odd, >= 5) in one pass per fiber.
std::vector<Band> sample_bands(const BandContext& context, int m, double k_max, Eigen::Index n_k);

Band sample_band(const BandContext& context, int j, double k_max, Eigen::Index n_k);

/// E_j'(k) from a fresh fiber solve.
double band_derivative(const BandContext& context, int j, double k);

/// Least squares of E - E(0) against (k^2, k^4) on |k| <= k_fit.
CurvatureFit fit_curvature(const Band& band, double k_fit = 0.2);
double curvature_mu(const Band& band, double k_fit = 0.2);

/// phi_j(s): the k >= 0 with E_j(k) - E_j(0) = s.
double inverse_band(const Band& band, double s);

/// Interval of momenta [k_lo, k_hi] (k >= 0) mapped by band r into [e_lo, e_hi].
struct Preimage {
  int r;
  double k_lo, k_hi;
};

/// Separation radius for an energy strictly between consecutive thresholds.
double separation_delta(const std::vector<Band>& bands, double energy);

/// Preimages of [E - delta, E + delta] under the bands below E, ordered by band.
std::vector<Preimage> window_preimages(const std::vector<Band>& bands, double energy, double delta);

struct MourreReport {
  double window_lo = 0.0, window_hi = 0.0;
  int n = 0;                             // E in (E_n, E_{n+1})
  std::vector<Preimage> preimages;
  std::vector<double> per_band_constants;  // C_r = min k E_r'(k) over the preimage
  double mourre_constant = 0.0;          // min_r C_r
  bool preimages_disjoint = false;
};

MourreReport mourre_constant(const std::vector<Band>& bands, double energy, double delta);

/// Thresholds E_r(0) of the given bands.
std::vector<double> thresholds(const std::vector<Band>& bands);

}  // namespace magstrip
