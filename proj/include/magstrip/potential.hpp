#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "magstrip/fiber_solver.hpp"

namespace magstrip {

/// Transverse (x) factor of a separable term, defined on the strip cross-section.
struct XProfile {
  enum class Kind { Constant, CosineWindow, Indicator };
  Kind kind = Kind::Constant;
  double half_width = 1.0;  // cosine_window: cos(pi x / (2 a)) on |x| < a
  double lo = -1.0;         // indicator: smoothed 1_[lo, hi]
  double hi = 1.0;
  double smoothing = 0.01;

  double operator()(double x) const;
};

/// Longitudinal (y) factor of a separable term.
struct YProfile {
  enum class Kind { PureTail, SignedTail, Bump, Gaussian };
  Kind kind = Kind::PureTail;
  double exponent = 1.5;  // pure_tail / signed_tail: <y>^-exponent
  double radius = 1.0;    // bump: (1 - (y/r)^2)^2 on |y| < r
  double sigma = 1.0;     // gaussian: exp(-y^2 / (2 sigma^2))

  double operator()(double y) const;
  /// True for the power-tail families.
  bool has_power_tail() const { return kind == Kind::PureTail || kind == Kind::SignedTail; }
  /// lim |y|^exponent Y(y) as y -> -inf and y -> +inf (power-tail families only).
  std::pair<double, double> tail_coefficients() const;
};

struct PotentialTerm {
  double c = 0.0;
  XProfile x;
  YProfile y;
};

/// V(x, y) = sum_t c_t X_t(x) Y_t(y) with a declared decay exponent alpha.
struct PotentialSpec {
  double alpha = 1.5;
  std::vector<PotentialTerm> terms;

  void validate() const;
};

void to_json(nlohmann::json& j, const PotentialSpec& spec);
void from_json(const nlohmann::json& j, PotentialSpec& spec);

/// V(x, y) without the strip check.
double potential_value(const PotentialSpec& spec, double x, double y);

/// V(x, y) for |x| <= L.
double evaluate_potential(const PotentialSpec& spec, double L, double x, double y);

/// +1 where V >= 0, -1 where V < 0.
int sign_field(const PotentialSpec& spec, double L, double x, double y);

struct DecayCertificate {
  double c;            // certified bound in |V| <= c <y>^-alpha
  double grid_max;     // max of |V| <y>^alpha on the sample grid
  double tail_sup;     // sup over x of the limit of |V| <y>^alpha as |y| -> inf
};

DecayCertificate verify_decay(const PotentialSpec& spec, double L, double y_max = 1e3);

/// (omega_-, omega_+): limits of |y|^alpha w(y) as y -> -inf, +inf.
struct TailLimits {
  double minus = 0.0;
  double plus = 0.0;
};

struct EffectivePotential {
  int j = 0;
  double epsilon = 0.0;
  Eigen::VectorXd grid;
  Eigen::VectorXd values;
  std::optional<TailLimits> omega;
};

/// y -> integral of |V(x,y)| psi(x)^2 / (J(x,y) - epsilon) dx, with the
/// trapezoid weights psi^2 dx cached once.
class EffectivePotentialFunction {
 public:
  EffectivePotentialFunction(PotentialSpec spec, const Eigenpair& psi, double epsilon);
  double operator()(double y) const;
  double epsilon() const { return epsilon_; }

 private:
  PotentialSpec spec_;
  Eigen::VectorXd x_;
  Eigen::VectorXd weight_;
  double epsilon_;
  // One term: w(y) = |Y(y)| * separable_[Y(y) < 0].
  bool separable_ = false;
  std::array<double, 2> separable_weight_{};
};

double effective_potential_at(const PotentialSpec& spec, const Eigenpair& psi, double epsilon, double y);

EffectivePotential effective_potential(const PotentialSpec& spec, const Eigenpair& psi, double epsilon,
                                       const Eigen::VectorXd& y_grid);

/// True when every term has a power-tail y-profile.
bool all_power_tails(const PotentialSpec& spec);

TailLimits tail_limits(const PotentialSpec& spec, const Eigenpair& psi, double epsilon);

}  // namespace magstrip
