#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "magstrip/band_structure.hpp"
#include "magstrip/potential.hpp"
#include "magstrip/schrodinger1d.hpp"

namespace magstrip {

/// (1/pi) * integral over (0, 1) of (t^-alpha - 1)^(1/2), 0 < alpha < 2.
double c_alpha(double alpha);

/// Error scale: 1, |ln lambda| or lambda^(beta - 1/2) for lambda > 0 and
/// beta above, at or below 1/2; 1 for lambda < 0.
double theta(double beta, double lambda);

struct PredictedLimits {
  double Omega_minus = 0.0;  // sum over both tails of (omega)_-^(1/alpha)
  double Omega_plus = 0.0;
  double below = 0.0;  // lim lambda^(1/alpha - 1/2) xi(E_q - lambda)
  double above = 0.0;  // lim lambda^(1/alpha - 1/2) xi(E_q + lambda)
};

/// Limit constants for 1 < alpha < 2. The band index only labels the result.
PredictedLimits predicted_limits(int q, double alpha, double mu, const TailLimits& omega);

struct LogLimit {
  double limit = 0.0;    // lim |ln lambda|^-1 xi(E_q - lambda)
  bool bounded = false;  // both omega > -mu/4: xi stays O(1)
};

LogLimit predicted_log_limit(int q, double mu, const TailLimits& omega);

/// (2 pi)^-1 |{(y, eta): mu eta^2 + w(y) < -lambda}|.
double semiclassical_volume(const LinePotential& w, double mu, double lambda);

struct PowerFit {
  double exponent = 0.0;
  double constant = 0.0;  // carries the sign of xi
  double offset = 0.0;    // additive constant (zero for the pure power law)
  double residual = 0.0;
  int samples = 0;
};

/// Ordinary least squares of ln|xi| against ln|lambda| for lambda in [lo, hi].
PowerFit fit_threshold_exponent(const SsfCurve& curve, double lo, double hi);

/// Least squares of xi against constant * |lambda|^exponent + offset for
/// lambda in [lo, hi]; the offset absorbs the bounded part of xi.
PowerFit fit_threshold_law(const SsfCurve& curve, double lo, double hi);

/// Corner points (-|e_i|, -(i - 1/2)) of the counting staircase for the
/// eigenvalues e_1 < e_2 < ... whose binding energies lie in [lo, hi].
SsfCurve counting_corners(const std::vector<double>& energies, double lo, double hi);

/// h_q(epsilon) = -mu_q d^2/dy^2 + w_{q,epsilon}, built from band q.
EffectiveOperator effective_operator(const Band& band, const PotentialSpec& spec, double epsilon);

struct ToleranceProfile {
  double lambda_lo = 0.0;  // 0 selects the branch default
  double lambda_hi = 0.0;
  int n_lambda = 12;
  double exponent_tol = 0.10;  // relative
  double constant_tol = 0.15;  // relative
  double log_tol = 0.20;       // relative
  double trend_tol = 0.05;     // absolute, on the fitted exponent
  double gamma = 0.0;          // 0 selects min((alpha - 1) / 4, 1)
  double epsilon = 0.0;
};

void to_json(nlohmann::json& j, const ToleranceProfile& p);
void from_json(const nlohmann::json& j, ToleranceProfile& p);

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct AsymptoticsReport {
  int q = 1;
  double alpha = 0.0;
  double gamma = 0.0;
  double mu = 0.0;
  std::optional<double> c_alpha;
  TailLimits omega;
  double Omega_minus = 0.0;
  double Omega_plus = 0.0;
  std::optional<double> predicted_below;
  std::optional<double> predicted_above;
  std::optional<double> predicted_log;
  bool bounded_flag = false;
  std::string branch;  // "power", "log" or "bounded"
  std::optional<PowerFit> fit_below;
  std::optional<PowerFit> fit_above;
  std::optional<PowerFit> ols_below;
  std::optional<PowerFit> ols_above;
  SsfCurve below;  // xi(E_q - lambda), stored with negative lambda
  SsfCurve above;
  std::vector<CheckResult> checks;
  std::vector<std::string> errors;
  std::vector<std::string> curve_files;
  bool verdict = false;
};

void to_json(nlohmann::json& j, const AsymptoticsReport& r);

/// Runs the threshold check selected by spec.alpha for band q. Failures of
/// constituent computations are recorded in the report.
AsymptoticsReport verify_corollaries(int q, const PotentialSpec& spec, const std::vector<Band>& bands,
                                     const ToleranceProfile& profile = {});

/// Log-spaced energies lo * (hi / lo)^(i / (n - 1)).
std::vector<double> log_space(double lo, double hi, int n);

}  // namespace magstrip
