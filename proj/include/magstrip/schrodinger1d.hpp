#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "magstrip/potential.hpp"
#include "magstrip/tridiagonal.hpp"

namespace magstrip {

/// A potential on the line together with a decay envelope
/// |w(y)| <= amplitude * <y>^-decay used to size truncation radii.
struct LinePotential {
  std::function<double(double)> w;
  double amplitude = 0.0;  // 0 means w vanishes identically
  double decay = 1.0;
  double support = std::numeric_limits<double>::infinity();  // w = 0 for |y| > support
  std::vector<double> breakpoints;                           // jump locations, if any

  double operator()(double y) const { return w(y); }

  /// Smallest r >= 0 beyond which the envelope stays <= level.
  double envelope_radius(double level) const;

  /// y -> w(-y).
  LinePotential reflected() const;
  /// y -> w(factor * y), factor > 0.
  LinePotential dilated(double factor) const;

  static LinePotential zero();
  /// -depth on [-a, a], 0 elsewhere.
  static LinePotential square_well(double depth, double half_width);
  /// omega * <y>^-alpha.
  static LinePotential power_tail(double omega, double alpha);
  /// The effective potential of a strip perturbation (envelope from its decay certificate).
  static LinePotential effective(const PotentialSpec& spec, const Eigenpair& psi, double epsilon, double L);
};

/// The pair h0 = -mu d^2/dy^2, h = h0 + w.
struct EffectiveOperator {
  double mu = 1.0;
  LinePotential w;

  void validate() const;
};

struct CountOptions {
  double points_per_wavelength = 48;
  double decay_lengths = 12;    // margin beyond the potential region, in units of sqrt(mu / lambda)
  double radius = 0;            // 0 selects the radius automatically
  bool check_stability = true;  // recount on 2R and on a doubled grid
  double stability_slack = 2e-3;  // tolerated relative change of the recounts
};

/// Dirichlet finite-difference pencil of h on [-R, R] with a locally adapted grid.
struct LineDiscretization {
  Eigen::VectorXd nodes;  // interior nodes
  SymTridiagonal<double> stiffness;
  Eigen::VectorXd mass;
};

LineDiscretization discretize_line(const EffectiveOperator& op, double radius, double lambda_scale,
                                   double points_per_wavelength);

/// Truncation radius used for counting below -lambda.
double counting_radius(const EffectiveOperator& op, double lambda, const CountOptions& options = {});

/// N(-lambda; h): eigenvalues strictly below -lambda, lambda > 0.
Eigen::Index count_bound_states(const EffectiveOperator& op, double lambda, const CountOptions& options = {});

/// Eigenvalues of h below -lambda_min, ascending.
std::vector<double> bound_state_energies(const EffectiveOperator& op, double lambda_min,
                                         const CountOptions& options = {});

struct PhaseOptions {
  double points_per_wavelength = 64;
  double match_tolerance = 1e-4;     // |w(Y_match)| <= match_tolerance * lambda
  double residual_tolerance = 1e-2;  // allowed drift of the phase over the next half wavelength
};

struct PhaseShift {
  double lambda = 0.0;
  double delta = 0.0;  // continuous (Levinson-consistent) branch
  double xi = 0.0;     // -delta / pi
  double y_match = 0.0;
  double tail = 0.0;      // Born correction for (Y_match, inf)
  double residual = 0.0;  // |delta(Y + pi/k) - delta(Y)|
  std::complex<double> weyl_m;  // f'(0) / f(0) for the solution f ~ e^{iky} at +inf
};

/// Phase shift of h restricted to (0, inf) with u(0) = 0.
PhaseShift halfline_phase_shift(const EffectiveOperator& op, double lambda, const PhaseOptions& options = {});

/// xi^(+) + xi^(-): the shift of the pair decoupled by a Dirichlet condition
/// at y = 0 (the left half-line by reflection). Within O(1) of the line shift.
double ssf_halfline_sum(const EffectiveOperator& op, double lambda, const PhaseOptions& phase = {});

/// xi(lambda; h, h0) on the line: -N below zero. Above zero the Dirichlet
/// half-line phases give the decoupled shift, and the rank-one Dirichlet
/// decoupling at y = 0 is undone through the Weyl functions m_+ + m_-.
double ssf_pair(const EffectiveOperator& op, double lambda, const CountOptions& count = {},
                const PhaseOptions& phase = {});

/// -[N_box(lambda; h) - N_box(lambda; h0)] on a uniform grid of n interior points on [-R, R].
double ssf_box(const EffectiveOperator& op, double lambda, double radius, Eigen::Index n);

enum class SsfMethod { Box, PhaseShift };
std::string to_string(SsfMethod method);

struct SsfCurve {
  std::vector<double> lambda;
  std::vector<double> xi;
  SsfMethod method = SsfMethod::PhaseShift;
  double branch_anchor = 0.0;  // energy at which the phase branch was certified
};

struct BoxOptions {
  double radius = 200;
  Eigen::Index n = 20000;
};

/// Evaluates xi on a grid of nonzero energies. For the phase method the
/// branch is certified at a high-energy anchor before the curve is built.
SsfCurve ssf_curve(const EffectiveOperator& op, std::vector<double> lambdas, SsfMethod method,
                   const CountOptions& count = {}, const PhaseOptions& phase = {}, const BoxOptions& box = {});

}  // namespace magstrip
