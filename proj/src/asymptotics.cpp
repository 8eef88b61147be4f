#include "magstrip/asymptotics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "magstrip/parallel.hpp"
#include "magstrip/quadrature.hpp"

namespace magstrip {

double c_alpha(double alpha) {
  if (!(alpha > 0 && alpha < 2))
    throw Error(ErrorKind::AlphaOutOfRange, "C_alpha needs 0 < alpha < 2, got " + std::to_string(alpha));
  // The t^(-alpha/2) singularity at 0 is integrated in closed form.
  auto regular = [alpha](double t) {
    if (t <= 0) return 0.0;
    const double ta = std::pow(t, alpha);
    return std::pow(t, -alpha / 2) * (std::sqrt(std::max(0.0, 1 - ta)) - 1);
  };
  const double rest = integrate_sqrt_endpoints(regular, 0.0, 1.0, 1e-14, 1e-14).value;
  return (rest + 2 / (2 - alpha)) / std::numbers::pi;
}

double theta(double beta, double lambda) {
  if (!(beta > 0)) throw Error(ErrorKind::InvalidArgument, "theta needs beta > 0");
  if (lambda == 0) throw Error(ErrorKind::InvalidArgument, "theta is undefined at lambda = 0");
  if (lambda < 0 || beta > 0.5) return 1.0;
  if (beta == 0.5) return std::abs(std::log(lambda));
  return std::pow(lambda, beta - 0.5);
}

namespace {

double negative_part(double v) { return std::max(0.0, -v); }
double positive_part(double v) { return std::max(0.0, v); }

PredictedLimits omega_sums(double alpha, const TailLimits& omega) {
  PredictedLimits out;
  for (double w : {omega.minus, omega.plus}) {
    out.Omega_minus += std::pow(negative_part(w), 1 / alpha);
    out.Omega_plus += std::pow(positive_part(w), 1 / alpha);
  }
  return out;
}

}  // namespace

PredictedLimits predicted_limits(int /*q*/, double alpha, double mu, const TailLimits& omega) {
  if (!(alpha > 1 && alpha < 2)) throw Error(ErrorKind::AlphaOutOfRange, "limit constants need 1 < alpha < 2");
  if (!(mu > 0)) throw Error(ErrorKind::InvalidArgument, "mu must be positive");
  PredictedLimits out = omega_sums(alpha, omega);
  const double scale = c_alpha(alpha) / std::sqrt(mu);
  const double angle = std::numbers::pi / alpha;
  out.below = -scale * out.Omega_minus;
  out.above = -scale * (out.Omega_minus / std::sin(angle) + out.Omega_plus * std::cos(angle) / std::sin(angle));
  return out;
}

LogLimit predicted_log_limit(int /*q*/, double mu, const TailLimits& omega) {
  if (!(mu > 0)) throw Error(ErrorKind::InvalidArgument, "mu must be positive");
  LogLimit out;
  for (double w : {omega.minus, omega.plus}) out.limit -= std::sqrt(negative_part(w / mu + 0.25));
  out.limit /= 2 * std::numbers::pi;
  out.bounded = omega.minus > -mu / 4 && omega.plus > -mu / 4;
  return out;
}

double semiclassical_volume(const LinePotential& w, double mu, double lambda) {
  if (!(lambda > 0)) throw Error(ErrorKind::InvalidArgument, "semiclassical volume needs lambda > 0");
  if (!(mu > 0)) throw Error(ErrorKind::InvalidArgument, "mu must be positive");
  const double radius = w.envelope_radius(lambda);
  if (w.amplitude == 0 || radius == 0) return 0.0;

  // sinh-graded scan of [-R, R]; jumps are bracketed by samples on both sides.
  const int n = 20001;
  const double a = std::asinh(radius / 0.05);
  std::vector<double> ys;
  ys.reserve(n + 2 * w.breakpoints.size());
  for (int i = 0; i < n; ++i) {
    const double t = -1 + 2.0 * i / (n - 1);
    ys.push_back(radius * std::sinh(a * t) / std::sinh(a));
  }
  for (double b : w.breakpoints) {
    const double e = 1e-12 * std::max(1.0, std::abs(b));
    ys.push_back(b - e);
    ys.push_back(b + e);
  }
  std::sort(ys.begin(), ys.end());

  auto g = [&](double y) { return -lambda - w(y); };
  auto root = [&](double lo, double hi) {
    const bool rising = g(lo) <= 0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
      const double m = 0.5 * (lo + hi);
      if ((g(m) > 0) == rising)
        hi = m;
      else
        lo = m;
    }
    return 0.5 * (lo + hi);
  };

  double total = 0.0;
  auto f = [&](double y) { return std::sqrt(std::max(0.0, g(y))); };
  bool open = g(ys.front()) > 0;
  double start = ys.front();
  for (std::size_t i = 0; i + 1 < ys.size(); ++i) {
    const bool inside = g(ys[i]) > 0, next = g(ys[i + 1]) > 0;
    if (!inside && next) {
      start = root(ys[i], ys[i + 1]);
      open = true;
    }
    if (inside && !next && open) {
      total += integrate_sqrt_endpoints(f, start, root(ys[i], ys[i + 1]), 1e-12, 1e-10).value;
      open = false;
    }
  }
  if (open) total += integrate_sqrt_endpoints(f, start, ys.back(), 1e-12, 1e-10).value;
  return total / (std::numbers::pi * std::sqrt(mu));
}

namespace {

struct Samples {
  Eigen::VectorXd x;  // |lambda|
  Eigen::VectorXd y;
};

Samples window(const SsfCurve& curve, double lo, double hi) {
  if (!(lo < hi)) throw Error(ErrorKind::InvalidArgument, "fit window needs lo < hi");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < curve.lambda.size(); ++i)
    if (curve.lambda[i] >= lo && curve.lambda[i] <= hi && curve.lambda[i] != 0) {
      xs.push_back(std::abs(curve.lambda[i]));
      ys.push_back(curve.xi[i]);
    }
  Samples s{Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size())),
            Eigen::Map<Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()))};
  return s;
}

}  // namespace

PowerFit fit_threshold_exponent(const SsfCurve& curve, double lo, double hi) {
  Samples s = window(curve, lo, hi);
  const Eigen::Index n = s.x.size();
  if (n < 8) throw Error(ErrorKind::Underdetermined, "need 8 samples in the window, have " + std::to_string(n));
  const bool negative = s.y[0] < 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (s.y[i] == 0 || (s.y[i] < 0) != negative)
      throw Error(ErrorKind::SignMixed, "xi changes sign or vanishes inside the fit window");

  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = std::log(s.x[i]);
    design(i, 1) = 1.0;
    rhs[i] = std::log(std::abs(s.y[i]));
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
  PowerFit fit;
  fit.exponent = coef[0];
  fit.constant = (negative ? -1.0 : 1.0) * std::exp(coef[1]);
  fit.residual = (design * coef - rhs).cwiseAbs().maxCoeff();
  fit.samples = static_cast<int>(n);
  return fit;
}

PowerFit fit_threshold_law(const SsfCurve& curve, double lo, double hi) {
  Samples s = window(curve, lo, hi);
  const Eigen::Index n = s.x.size();
  if (n < 4) throw Error(ErrorKind::Underdetermined, "need 4 samples in the window, have " + std::to_string(n));

  // Variable projection: for fixed exponent the model is linear in (constant, offset).
  auto solve = [&](double e) {
    Eigen::MatrixXd design(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      design(i, 0) = std::pow(s.x[i], e);
      design(i, 1) = 1.0;
    }
    const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(s.y);
    return std::pair{coef, (design * coef - s.y).squaredNorm()};
  };

  const int scan = 1200;
  double best_e = 0.0, best_r = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= scan; ++i) {
    const double e = -3.0 + 6.0 * i / scan;
    if (std::abs(e) < 1e-3) continue;
    const double r = solve(e).second;
    if (r < best_r) {
      best_r = r;
      best_e = e;
    }
  }
  double a = best_e - 6.0 / scan, b = best_e + 6.0 / scan;
  const double golden = (std::sqrt(5.0) - 1) / 2;
  for (int it = 0; it < 100 && b - a > 1e-12; ++it) {
    const double c = b - golden * (b - a), d = a + golden * (b - a);
    if (solve(c).second < solve(d).second)
      b = d;
    else
      a = c;
  }
  const double e = 0.5 * (a + b);
  const auto [coef, rss] = solve(e);
  if (!std::isfinite(rss) || coef[0] == 0) throw Error(ErrorKind::FitDegenerate, "power law fit degenerated");
  PowerFit fit;
  fit.exponent = e;
  fit.constant = coef[0];
  fit.offset = coef[1];
  fit.samples = static_cast<int>(n);
  for (Eigen::Index i = 0; i < n; ++i)
    fit.residual = std::max(fit.residual, std::abs(coef[0] * std::pow(s.x[i], e) + coef[1] - s.y[i]));
  return fit;
}

SsfCurve counting_corners(const std::vector<double>& energies, double lo, double hi) {
  SsfCurve out;
  out.method = SsfMethod::PhaseShift;
  std::vector<double> sorted = energies;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double binding = -sorted[i];
    if (binding >= lo && binding <= hi) {
      out.lambda.push_back(-binding);
      out.xi.push_back(-(static_cast<double>(i) + 0.5));
    }
  }
  return out;
}

EffectiveOperator effective_operator(const Band& band, const PotentialSpec& spec, double epsilon) {
  const FiberSolution sol = solve_fiber({band.context.b, band.context.L, 0.0}, band.j, band.context.solver);
  if (spec.terms.empty()) return {band.mu, LinePotential::zero()};
  return {band.mu, LinePotential::effective(spec, sol.pairs.back(), epsilon, band.context.L)};
}

std::vector<double> log_space(double lo, double hi, int n) {
  if (!(lo > 0 && hi > lo) || n < 2) throw Error(ErrorKind::InvalidArgument, "log_space needs 0 < lo < hi, n >= 2");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, double(i) / (n - 1));
  out.back() = hi;
  return out;
}

void to_json(nlohmann::json& j, const ToleranceProfile& p) {
  j = {{"lambda_lo", p.lambda_lo}, {"lambda_hi", p.lambda_hi},       {"n_lambda", p.n_lambda},
       {"exponent_tol", p.exponent_tol}, {"constant_tol", p.constant_tol}, {"log_tol", p.log_tol},
       {"trend_tol", p.trend_tol}, {"gamma", p.gamma},                  {"epsilon", p.epsilon}};
}

void from_json(const nlohmann::json& j, ToleranceProfile& p) {
  p = ToleranceProfile{};
  p.lambda_lo = j.value("lambda_lo", p.lambda_lo);
  p.lambda_hi = j.value("lambda_hi", p.lambda_hi);
  p.n_lambda = j.value("n_lambda", p.n_lambda);
  p.exponent_tol = j.value("exponent_tol", p.exponent_tol);
  p.constant_tol = j.value("constant_tol", p.constant_tol);
  p.log_tol = j.value("log_tol", p.log_tol);
  p.trend_tol = j.value("trend_tol", p.trend_tol);
  p.gamma = j.value("gamma", p.gamma);
  p.epsilon = j.value("epsilon", p.epsilon);
}

namespace {

constexpr double kMaxCornerLevels = 200;

nlohmann::json fit_json(const std::optional<PowerFit>& f) {
  if (!f) return nullptr;
  return {{"exponent", f->exponent}, {"constant", f->constant}, {"offset", f->offset},
          {"residual", f->residual}, {"samples", f->samples}};
}

template <typename T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

CheckResult relative_check(std::string name, double measured, double target, double tol) {
  const bool pass = std::abs(measured - target) <= tol * std::abs(target);
  return {std::move(name), measured, target, tol, pass};
}

CheckResult absolute_check(std::string name, double measured, double target, double tol) {
  const bool pass = std::abs(measured - target) <= tol;
  return {std::move(name), measured, target, tol, pass};
}

SsfCurve count_curve(const EffectiveOperator& op, const std::vector<double>& lambdas) {
  SsfCurve curve;
  curve.lambda.resize(lambdas.size());
  curve.xi.resize(lambdas.size());
  parallel_for(lambdas.size(), [&](std::size_t i) {
    curve.lambda[i] = -lambdas[i];
    curve.xi[i] = -static_cast<double>(count_bound_states(op, lambdas[i]));
  });
  std::reverse(curve.lambda.begin(), curve.lambda.end());
  std::reverse(curve.xi.begin(), curve.xi.end());
  return curve;
}

/// Trend exponent of |xi|; a curve that vanishes identically has no trend.
double trend(const SsfCurve& curve, double lo, double hi) {
  if (std::all_of(curve.xi.begin(), curve.xi.end(), [](double v) { return v == 0; })) return 0.0;
  return fit_threshold_exponent(curve, lo, hi).exponent;
}

}  // namespace

void to_json(nlohmann::json& j, const AsymptoticsReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"measured", c.measured}, {"target", c.target},
                      {"tolerance", c.tolerance}, {"pass", c.pass}});
  auto curve = [](const SsfCurve& c) {
    return nlohmann::json{{"lambda", c.lambda}, {"xi", c.xi}, {"method", to_string(c.method)}};
  };
  j = {{"q", r.q},
       {"alpha", r.alpha},
       {"gamma", r.gamma},
       {"mu", r.mu},
       {"c_alpha", optional_json(r.c_alpha)},
       {"omega", {{"minus", r.omega.minus}, {"plus", r.omega.plus}}},
       {"Omega_minus", r.Omega_minus},
       {"Omega_plus", r.Omega_plus},
       {"predicted_below", optional_json(r.predicted_below)},
       {"predicted_above", optional_json(r.predicted_above)},
       {"predicted_log", optional_json(r.predicted_log)},
       {"bounded_flag", r.bounded_flag},
       {"branch", r.branch},
       {"fitted_below", fit_json(r.fit_below)},
       {"fitted_above", fit_json(r.fit_above)},
       {"ols_below", fit_json(r.ols_below)},
       {"ols_above", fit_json(r.ols_above)},
       {"curves", {{"below", curve(r.below)}, {"above", curve(r.above)}}},
       {"curve_files", r.curve_files},
       {"checks", checks},
       {"errors", r.errors},
       {"verdict", r.verdict ? "pass" : "fail"}};
}

AsymptoticsReport verify_corollaries(int q, const PotentialSpec& spec, const std::vector<Band>& bands,
                                     const ToleranceProfile& profile) {
  if (q < 1 || q > static_cast<int>(bands.size()))
    throw Error(ErrorKind::InvalidArgument, "band " + std::to_string(q) + " was not sampled");
  spec.validate();
  const Band& band = bands[static_cast<std::size_t>(q - 1)];
  const double alpha = spec.alpha;

  AsymptoticsReport r;
  r.q = q;
  r.alpha = alpha;
  r.mu = band.mu;
  r.branch = std::abs(alpha - 2) < 1e-12 ? "log" : (alpha > 2 ? "bounded" : "power");
  r.gamma = profile.gamma > 0 ? profile.gamma : (alpha > 1 ? std::min((alpha - 1) / 4, 1.0) : 0.0);

  auto record = [&](auto&& body) {
    try {
      body();
    } catch (const Error& e) {
      r.errors.emplace_back(e.what());
    }
  };

  if (alpha > 1)
    r.checks.push_back({"gamma admissible", r.gamma, (alpha - 1) / 2, 1.0,
                        r.gamma > 0 && r.gamma < (alpha - 1) / 2 && r.gamma <= 1});

  const bool trivial = spec.terms.empty() || std::all_of(spec.terms.begin(), spec.terms.end(),
                                                          [](const PotentialTerm& t) { return t.c == 0; });
  std::optional<EffectiveOperator> op;
  record([&] { op = effective_operator(band, spec, profile.epsilon); });
  // The limit constants need the tail limits; the boundedness check does not.
  if (!trivial && r.branch != "bounded") record([&] {
      const FiberSolution sol = solve_fiber({band.context.b, band.context.L, 0.0}, band.j, band.context.solver);
      r.omega = tail_limits(spec, sol.pairs.back(), profile.epsilon);
    });
  if (!r.errors.empty()) op.reset();
  if (op && trivial) {
    r.checks.push_back({"vanishing perturbation", 0.0, 0.0, 0.0, true});
    r.verdict = r.errors.empty() && std::all_of(r.checks.begin(), r.checks.end(), [](auto& c) { return c.pass; });
    return r;
  }

  if (op && r.branch == "power") {
    const double lo = profile.lambda_lo > 0 ? profile.lambda_lo : 1e-5;
    const double hi = profile.lambda_hi > 0 ? profile.lambda_hi : 1e-3;
    const double target_exponent = -(1 / alpha - 0.5);
    record([&] {
      r.c_alpha = c_alpha(alpha);
      const PredictedLimits sums = omega_sums(alpha, r.omega);
      r.Omega_minus = sums.Omega_minus;
      r.Omega_plus = sums.Omega_plus;
      r.predicted_below = -*r.c_alpha * r.Omega_minus / std::sqrt(r.mu);
      if (alpha > 1) r.predicted_above = predicted_limits(q, alpha, r.mu, r.omega).above;
    });
    const auto lambdas = log_space(lo, hi, profile.n_lambda);
    record([&] {
      r.below = count_curve(*op, lambdas);
      if (r.predicted_below && *r.predicted_below != 0) {
        r.ols_below = fit_threshold_exponent(r.below, -hi, -lo);
        // Short staircases are fitted through their corners; long ones are smooth enough as sampled.
        const double levels = r.below.xi.back() - r.below.xi.front();
        if (std::abs(levels) <= kMaxCornerLevels) {
          const SsfCurve corners = counting_corners(bound_state_energies(*op, lo * (1 - 1e-9)), lo, hi);
          r.fit_below = fit_threshold_law(corners, -hi, -lo);
        } else {
          r.fit_below = fit_threshold_law(r.below, -hi, -lo);
        }
        r.checks.push_back(relative_check("below exponent", r.fit_below->exponent, target_exponent, profile.exponent_tol));
        r.checks.push_back(relative_check("below constant", r.fit_below->constant, *r.predicted_below, profile.constant_tol));
      } else if (r.predicted_below) {
        const double scaled = -r.below.xi.back() * std::pow(lo, -target_exponent);
        r.checks.push_back(absolute_check("below scaled count", scaled, 0.0, profile.constant_tol * *r.c_alpha));
      }
    });
    if (alpha > 1) record([&] {
        r.above = ssf_curve(*op, lambdas, SsfMethod::PhaseShift);
        if (r.predicted_above && *r.predicted_above != 0) {
          r.ols_above = fit_threshold_exponent(r.above, lo, hi);
          r.fit_above = fit_threshold_law(r.above, lo, hi);
          r.checks.push_back(relative_check("above exponent", r.fit_above->exponent, target_exponent, profile.exponent_tol));
          r.checks.push_back(relative_check("above constant", r.fit_above->constant, *r.predicted_above, profile.constant_tol));
        }
      });
  } else if (op && r.branch == "log") {
    const double lo = profile.lambda_lo > 0 ? profile.lambda_lo : 1e-6;
    const double hi = profile.lambda_hi > 0 ? profile.lambda_hi : 1e-2;
    const LogLimit limit = predicted_log_limit(q, r.mu, r.omega);
    r.predicted_log = limit.limit;
    r.bounded_flag = limit.bounded;
    record([&] {
      r.below = count_curve(*op, log_space(lo, hi, profile.n_lambda));
      if (limit.bounded) {
        const auto [mn, mx] = std::minmax_element(r.below.xi.begin(), r.below.xi.end());
        r.checks.push_back(absolute_check("bounded count growth", *mx - *mn, 0.0, 1.0));
      } else {
        const double measured = r.below.xi.back() / std::abs(std::log(lo));
        r.checks.push_back(relative_check("log constant", measured, limit.limit, profile.log_tol));
      }
    });
  } else if (op) {
    const double lo = profile.lambda_lo > 0 ? profile.lambda_lo : 1e-6;
    const double hi = profile.lambda_hi > 0 ? profile.lambda_hi : 1e-2;
    const auto lambdas = log_space(lo, hi, profile.n_lambda);
    record([&] {
      r.below = count_curve(*op, lambdas);
      r.checks.push_back(absolute_check("below trend", trend(r.below, -hi, -lo), 0.0, profile.trend_tol));
    });
    record([&] {
      r.above = ssf_curve(*op, lambdas, SsfMethod::PhaseShift);
      r.checks.push_back(absolute_check("above trend", trend(r.above, lo, hi), 0.0, profile.trend_tol));
    });
  }

  r.verdict = r.errors.empty() && !r.checks.empty() &&
              std::all_of(r.checks.begin(), r.checks.end(), [](const CheckResult& c) { return c.pass; });
  return r;
}

}  // namespace magstrip
