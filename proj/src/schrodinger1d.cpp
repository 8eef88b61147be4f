#include "magstrip/schrodinger1d.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>

#include "magstrip/parallel.hpp"
#include "magstrip/quadrature.hpp"

namespace magstrip {

// ---- LinePotential ----------------------------------------------------------

double LinePotential::envelope_radius(double level) const {
  if (amplitude <= 0) return 0.0;
  double r = 0.0;
  if (amplitude > level) r = std::sqrt(std::max(0.0, std::pow(amplitude / level, 2.0 / decay) - 1.0));
  return std::min(r, support);
}

LinePotential LinePotential::reflected() const {
  LinePotential out = *this;
  out.w = [f = w](double y) { return f(-y); };
  for (double& b : out.breakpoints) b = -b;
  std::sort(out.breakpoints.begin(), out.breakpoints.end());
  return out;
}

LinePotential LinePotential::dilated(double factor) const {
  if (!(factor > 0)) throw Error(ErrorKind::InvalidArgument, "dilation factor must be positive");
  LinePotential out = *this;
  out.w = [f = w, factor](double y) { return f(factor * y); };
  out.amplitude = amplitude * std::pow(std::min(1.0, factor), -decay);
  out.support = support / factor;
  for (double& b : out.breakpoints) b /= factor;
  return out;
}

LinePotential LinePotential::zero() { return {[](double) { return 0.0; }, 0.0, 1.0, 0.0, {}}; }

LinePotential LinePotential::square_well(double depth, double half_width) {
  if (!(half_width > 0)) throw Error(ErrorKind::InvalidArgument, "well half-width must be positive");
  LinePotential out;
  out.w = [depth, half_width](double y) { return std::abs(y) <= half_width ? -depth : 0.0; };
  out.amplitude = std::abs(depth) * (1 + half_width * half_width);
  out.decay = 2.0;
  out.support = half_width;
  out.breakpoints = {-half_width, half_width};
  return out;
}

LinePotential LinePotential::power_tail(double omega, double alpha) {
  if (!(alpha > 0)) throw Error(ErrorKind::InvalidArgument, "decay exponent must be positive");
  LinePotential out;
  out.w = [omega, alpha](double y) { return omega * std::pow(1 + y * y, -alpha / 2); };
  out.amplitude = std::abs(omega);
  out.decay = alpha;
  return out;
}

LinePotential LinePotential::effective(const PotentialSpec& spec, const Eigenpair& psi, double epsilon, double L) {
  const DecayCertificate cert = verify_decay(spec, L);
  auto fn = std::make_shared<const EffectivePotentialFunction>(spec, psi, epsilon);
  LinePotential out;
  out.w = [fn](double y) { return (*fn)(y); };
  out.amplitude = cert.c / (1 - std::abs(epsilon));
  out.decay = spec.alpha;
  const bool compact = std::all_of(spec.terms.begin(), spec.terms.end(),
                                   [](const PotentialTerm& t) { return t.y.kind == YProfile::Kind::Bump; });
  if (compact) {
    out.support = 0.0;
    for (const auto& t : spec.terms) out.support = std::max(out.support, t.y.radius);
  }
  return out;
}

void EffectiveOperator::validate() const {
  if (!(mu > 0) || !std::isfinite(mu)) throw Error(ErrorKind::InvalidArgument, "mu must be positive");
  if (!w.w) throw Error(ErrorKind::InvalidArgument, "operator has no potential");
}

// ---- counting -----------------------------------------------------------------

LineDiscretization discretize_line(const EffectiveOperator& op, double radius, double lambda_scale,
                                   double points_per_wavelength) {
  op.validate();
  if (!(radius > 0)) throw Error(ErrorKind::InvalidArgument, "radius must be positive");
  const double two_pi = 2 * std::numbers::pi;
  std::vector<double> kinks;
  for (double b : op.w.breakpoints)
    if (std::abs(b) > 0 && std::abs(b) < radius) kinks.push_back(std::abs(b));
  std::sort(kinks.begin(), kinks.end());

  auto spacing = [&](double y) {
    const double local = std::max({std::abs(op.w(y)), std::abs(op.w(-y)), lambda_scale}) / op.mu;
    return std::min(two_pi / (points_per_wavelength * std::sqrt(local)), std::max(0.05, 0.25 * y));
  };
  // Graded grid: steps grow by at most 25%, jumps of w sit on nodes.
  std::vector<double> half{0.0};
  double previous = spacing(0.0);
  for (double y = 0.0; y < radius;) {
    double h = std::min({spacing(y), 1.25 * previous});
    h = std::min(h, spacing(std::min(y + h, radius)));
    double next = std::min(y + h, radius);
    for (double b : kinks)
      if (b > y && b < next) next = b;
    if (radius - next < 0.25 * h) next = radius;
    previous = next - y;
    y = next;
    half.push_back(y);
  }

  const auto m = static_cast<Eigen::Index>(half.size());
  Eigen::VectorXd all(2 * m - 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    all[m - 1 + i] = half[static_cast<std::size_t>(i)];
    all[m - 1 - i] = -half[static_cast<std::size_t>(i)];
  }
  auto node_value = [&](double y) {
    for (double b : op.w.breakpoints)
      if (y == b) {
        const double e = 1e-12 * std::max(1.0, std::abs(b));
        return 0.5 * (op.w(b - e) + op.w(b + e));
      }
    return op.w(y);
  };
  const Eigen::Index n = all.size() - 2;
  LineDiscretization d;
  d.nodes = all.segment(1, n);
  d.stiffness.diag.resize(n);
  d.stiffness.off.resize(n - 1);
  d.mass.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double left = all[i + 1] - all[i];
    const double right = all[i + 2] - all[i + 1];
    d.mass[i] = 0.5 * (left + right);
    d.stiffness.diag[i] = op.mu * (1 / left + 1 / right) + d.mass[i] * node_value(all[i + 1]);
    if (i + 1 < n) d.stiffness.off[i] = -op.mu / right;
  }
  return d;
}

double counting_radius(const EffectiveOperator& op, double lambda, const CountOptions& options) {
  if (options.radius > 0) return options.radius;
  return op.w.envelope_radius(lambda / 10) + options.decay_lengths * std::sqrt(op.mu / lambda);
}

namespace {

Eigen::Index count_on(const EffectiveOperator& op, double lambda, double radius, double ppw) {
  const LineDiscretization d = discretize_line(op, radius, lambda, ppw);
  return count_below(d.stiffness, d.mass, -lambda);
}

}  // namespace

Eigen::Index count_bound_states(const EffectiveOperator& op, double lambda, const CountOptions& options) {
  op.validate();
  if (!(lambda > 0)) throw Error(ErrorKind::InvalidArgument, "counting needs lambda > 0");
  if (op.w.amplitude == 0) return 0;
  const double radius = counting_radius(op, lambda, options);
  const Eigen::Index count = count_on(op, lambda, radius, options.points_per_wavelength);
  if (options.check_stability) {
    const Eigen::Index wide = count_on(op, lambda, 2 * radius, options.points_per_wavelength);
    const Eigen::Index fine = count_on(op, lambda, radius, 2 * options.points_per_wavelength);
    // A larger box must not move the count. A finer grid may move it by its
    // discretization error (one level, or the relative slack for long spectra);
    // the finer count is then returned.
    const double slack = options.stability_slack * static_cast<double>(count);
    const double refine_slack = std::max(1.0, std::ceil(slack));
    if (static_cast<double>(std::abs(wide - count)) > slack ||
        static_cast<double>(std::abs(fine - count)) > refine_slack)
      throw Error(ErrorKind::TruncationUnstable, "count " + std::to_string(count) + " moved to " +
                                                     std::to_string(wide) + " (2R) / " + std::to_string(fine) +
                                                     " (2n) at lambda = " + std::to_string(lambda));
    return fine;
  }
  return count;
}

std::vector<double> bound_state_energies(const EffectiveOperator& op, double lambda_min, const CountOptions& options) {
  op.validate();
  if (!(lambda_min > 0)) throw Error(ErrorKind::InvalidArgument, "lambda_min must be positive");
  if (op.w.amplitude == 0) return {};
  const double radius = counting_radius(op, lambda_min, options);
  const LineDiscretization d = discretize_line(op, radius, lambda_min, options.points_per_wavelength);
  const Eigen::Index count = count_below(d.stiffness, d.mass, -lambda_min);
  std::vector<double> energies;
  for (Eigen::Index k = 0; k < count; ++k) energies.push_back(kth_eigenvalue(d.stiffness, d.mass, k));
  return energies;
}

// ---- phase shifts -----------------------------------------------------------------

namespace {

// Modified Prufer variables u = r sin(theta), u' = s r cos(theta) for a
// locally chosen scale s. Changing s keeps theta in the same quadrant, so the
// angle stays a continuous count of half oscillations.
struct PruferState {
  double theta;
  double log_r;
};

PruferState rescale(PruferState p, double from, double to) {
  const double m = std::round(p.theta / std::numbers::pi);
  const double phi = p.theta - m * std::numbers::pi;
  const double sn = std::sin(phi), c = std::cos(phi), q = from / to;
  return {m * std::numbers::pi + std::atan2(to * sn, from * c), p.log_r + 0.5 * std::log(sn * sn + q * q * c * c)};
}

class PruferIntegrator {
 public:
  PruferIntegrator(const EffectiveOperator& op, double lambda, double ppw)
      : op_(op), lambda_(lambda), k_(std::sqrt(lambda / op.mu)), ppw_(ppw) {}

  double k() const { return k_; }

  /// Advances both solutions from y to target, stopping at breakpoints.
  void advance(double& y, std::array<PruferState, 2>& sol, double& scale, double target) const {
    while (y < target) {
      double stop = target;
      for (double b : op_.w.breakpoints)
        if (b > y && b < stop) stop = b;
      step_to(y, sol, scale, stop);
    }
  }

 private:
  double k2(double y) const { return (lambda_ - op_.w(y)) / op_.mu; }

  static PruferState rhs(double k2, PruferState p, double s) {
    const double c = std::cos(p.theta), sn = std::sin(p.theta);
    return {s * c * c + k2 / s * sn * sn, (s - k2 / s) * sn * c};
  }

  static PruferState axpy(PruferState p, double h, PruferState d) { return {p.theta + h * d.theta, p.log_r + h * d.log_r}; }

  void step_to(double& y, std::array<PruferState, 2>& sol, double& scale, double stop) const {
    const double width = stop - y;
    const double nudge = 1e-13 * std::max(1.0, std::abs(y) + std::abs(stop));
    while (y < stop) {
      const double s = std::sqrt(std::max(std::abs(k2(std::min(y + nudge, stop))), k_ * k_));
      for (auto& p : sol) p = rescale(p, scale, s);
      scale = s;
      double h = 2 * std::numbers::pi / (ppw_ * s);
      h = std::min(h, std::max(0.05, 0.25 * y));
      const bool last = y + h >= stop || stop - (y + h) < 1e-12 * width;
      if (last) h = stop - y;
      // Stage abscissae stay strictly inside the step so jumps at its ends
      // are sampled from the correct side.
      const double ka = k2(y + nudge), km = k2(y + h / 2), kb = k2(std::max(y + nudge, y + h - nudge));
      for (auto& p : sol) {
        const PruferState d1 = rhs(ka, p, s);
        const PruferState d2 = rhs(km, axpy(p, h / 2, d1), s);
        const PruferState d3 = rhs(km, axpy(p, h / 2, d2), s);
        const PruferState d4 = rhs(kb, axpy(p, h, d3), s);
        p.theta += h / 6 * (d1.theta + 2 * d2.theta + 2 * d3.theta + d4.theta);
        p.log_r += h / 6 * (d1.log_r + 2 * d2.log_r + 2 * d3.log_r + d4.log_r);
      }
      y = last ? stop : y + h;
    }
  }

  const EffectiveOperator& op_;
  double lambda_;
  double k_;
  double ppw_;
};

/// -(1 / (2 mu k)) * integral of w over (y, inf): the averaged first Born term.
double born_tail(const EffectiveOperator& op, double k, double y) {
  if (y >= op.w.support || op.w.amplitude == 0) return 0.0;
  if (!(op.w.decay > 1)) throw Error(ErrorKind::InvalidArgument, "phase shifts need a decay exponent > 1");
  // y = Y u^-p makes the power-tail integrand bounded at u = 0.
  const double p = std::max(1.0, 1.0 / (op.w.decay - 1));
  auto integrand = [&](double u) {
    if (u <= 0) return 0.0;
    return op.w(y * std::pow(u, -p)) * p * y * std::pow(u, -p - 1);
  };
  const double integral = integrate(integrand, 0.0, 1.0, 1e-13, 1e-10).value;
  return -integral / (2 * op.mu * k);
}

}  // namespace

PhaseShift halfline_phase_shift(const EffectiveOperator& op, double lambda, const PhaseOptions& options) {
  op.validate();
  if (!(lambda > 0)) throw Error(ErrorKind::InvalidArgument, "phase shifts need lambda > 0");
  const double k = std::sqrt(lambda / op.mu);
  PhaseShift out;
  out.lambda = lambda;
  out.weyl_m = {0.0, k};
  if (op.w.amplitude == 0) return out;

  const PruferIntegrator prufer(op, lambda, options.points_per_wavelength);
  const double match = std::max(op.w.envelope_radius(options.match_tolerance * lambda), 1e-3);

  // sol[0]: u(0) = 0, u'(0) = 1. sol[1]: u(0) = 1, u'(0) = 0.
  double y = 0.0, scale = k;
  std::array<PruferState, 2> sol{PruferState{0.0, -std::log(k)}, PruferState{std::numbers::pi / 2, 0.0}};
  auto phase_at = [&](double at) { return rescale(sol[0], scale, k).theta - k * at + born_tail(op, k, at); };

  prufer.advance(y, sol, scale, match);
  out.y_match = match;
  out.tail = born_tail(op, k, match);
  out.delta = phase_at(match);
  out.xi = -out.delta / std::numbers::pi;
  const std::array<PruferState, 2> at_match = sol;
  const double scale_at_match = scale;
  if (match < op.w.support) {
    prufer.advance(y, sol, scale, match + std::numbers::pi / k);
    out.residual = std::abs(phase_at(y) - out.delta);
  }
  sol = at_match;
  scale = scale_at_match;

  // Outgoing solution f = a * sol[1] + b * sol[0] with f'/f = ik at the match point.
  const std::complex<double> ik{0.0, k};
  const PruferState d = sol[0], n = sol[1];
  const std::complex<double> num = ik * std::sin(n.theta) - scale * std::cos(n.theta);
  const std::complex<double> den = scale * std::cos(d.theta) - ik * std::sin(d.theta);
  out.weyl_m = std::exp(n.log_r - d.log_r) * num / den;

  if (out.residual > options.residual_tolerance)
    throw Error(ErrorKind::MatchingFailure, "phase drifts by " + std::to_string(out.residual) +
                                                " over the next half wavelength at lambda = " + std::to_string(lambda));
  return out;
}

double ssf_halfline_sum(const EffectiveOperator& op, double lambda, const PhaseOptions& phase) {
  const EffectiveOperator left{op.mu, op.w.reflected()};
  return halfline_phase_shift(op, lambda, phase).xi + halfline_phase_shift(left, lambda, phase).xi;
}

double ssf_pair(const EffectiveOperator& op, double lambda, const CountOptions& count, const PhaseOptions& phase) {
  if (lambda == 0) throw Error(ErrorKind::InvalidArgument, "the spectral shift is not evaluated at 0");
  if (lambda < 0) return -static_cast<double>(count_bound_states(op, -lambda, count));
  const EffectiveOperator left{op.mu, op.w.reflected()};
  const PhaseShift right_side = halfline_phase_shift(op, lambda, phase);
  const PhaseShift left_side = halfline_phase_shift(left, lambda, phase);
  // xi(h, h_D) - xi(h0, h0_D), where the free Weyl sum is 2ik.
  const std::complex<double> m = right_side.weyl_m + left_side.weyl_m;
  const double coupling = -std::atan2(std::max(0.0, m.imag()), -m.real()) / std::numbers::pi + 0.5;
  return right_side.xi + left_side.xi + coupling;
}

double ssf_box(const EffectiveOperator& op, double lambda, double radius, Eigen::Index n) {
  op.validate();
  if (lambda == 0) throw Error(ErrorKind::InvalidArgument, "the spectral shift is not evaluated at 0");
  if (!(radius > 0) || n < 3) throw Error(ErrorKind::InvalidArgument, "box needs R > 0 and n >= 3");
  const double h = 2 * radius / static_cast<double>(n + 1);
  SymTridiagonal<double> free_op{Eigen::VectorXd::Constant(n, 2 * op.mu / h), Eigen::VectorXd::Constant(n - 1, -op.mu / h)};
  SymTridiagonal<double> full = free_op;
  for (Eigen::Index i = 0; i < n; ++i) full.diag[i] += h * op.w(-radius + static_cast<double>(i + 1) * h);
  const Eigen::VectorXd mass = Eigen::VectorXd::Constant(n, h);
  return -static_cast<double>(count_below(full, mass, lambda) - count_below(free_op, mass, lambda));
}

std::string to_string(SsfMethod method) { return method == SsfMethod::Box ? "box" : "phase-shift"; }

SsfCurve ssf_curve(const EffectiveOperator& op, std::vector<double> lambdas, SsfMethod method,
                   const CountOptions& count, const PhaseOptions& phase, const BoxOptions& box) {
  op.validate();
  std::sort(lambdas.begin(), lambdas.end());
  SsfCurve curve;
  curve.method = method;
  curve.lambda = lambdas;
  curve.xi.assign(lambdas.size(), 0.0);

  const bool above = std::any_of(lambdas.begin(), lambdas.end(), [](double l) { return l > 0; });
  if (method == SsfMethod::PhaseShift && above && op.w.amplitude > 0) {
    // In the Born regime the continuous branch must coincide with the principal value.
    curve.branch_anchor = 1e3 * op.w.amplitude;
    const EffectiveOperator left{op.mu, op.w.reflected()};
    for (const auto* side : {&op, &left}) {
      const double d = halfline_phase_shift(*side, curve.branch_anchor, phase).delta;
      const double principal = std::remainder(d, 2 * std::numbers::pi);
      if (std::numbers::pi - std::abs(principal) < 1e-3 || std::abs(principal - d) > 1e-9)
        throw Error(ErrorKind::AnchorAmbiguity, "anchor phase " + std::to_string(d) + " is not on the principal branch");
    }
  }

  parallel_for(lambdas.size(), [&](std::size_t i) {
    const double l = lambdas[i];
    curve.xi[i] = method == SsfMethod::Box ? ssf_box(op, l, box.radius, box.n) : ssf_pair(op, l, count, phase);
  });
  return curve;
}

}  // namespace magstrip
