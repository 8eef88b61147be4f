#include "magstrip/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace magstrip {

namespace {

constexpr double kExponentMatch = 1e-12;

double bracket_y(double y) { return std::sqrt(1 + y * y); }

}  // namespace

double XProfile::operator()(double x) const {
  switch (kind) {
    case Kind::Constant: return 1.0;
    case Kind::CosineWindow:
      return std::abs(x) < half_width ? std::cos(std::numbers::pi * x / (2 * half_width)) : 0.0;
    case Kind::Indicator: return 0.5 * (std::tanh((x - lo) / smoothing) - std::tanh((x - hi) / smoothing));
  }
  return 0.0;
}

double YProfile::operator()(double y) const {
  switch (kind) {
    case Kind::PureTail: return std::pow(bracket_y(y), -exponent);
    case Kind::SignedTail: return y == 0 ? 0.0 : std::copysign(std::pow(bracket_y(y), -exponent), y);
    case Kind::Bump: {
      if (std::abs(y) >= radius) return 0.0;
      const double u = 1 - (y / radius) * (y / radius);
      return u * u;
    }
    case Kind::Gaussian: return std::exp(-y * y / (2 * sigma * sigma));
  }
  return 0.0;
}

std::pair<double, double> YProfile::tail_coefficients() const {
  switch (kind) {
    case Kind::PureTail: return {1.0, 1.0};
    case Kind::SignedTail: return {-1.0, 1.0};
    default: break;
  }
  throw Error(ErrorKind::NoPureTail, "profile has no power tail");
}

void PotentialSpec::validate() const {
  if (!(alpha > 0) || !std::isfinite(alpha)) throw Error(ErrorKind::Validation, "alpha must be positive");
  for (const auto& t : terms) {
    if (!std::isfinite(t.c)) throw Error(ErrorKind::Validation, "term amplitude c must be finite");
    if (t.x.kind == XProfile::Kind::CosineWindow && !(t.x.half_width > 0))
      throw Error(ErrorKind::Validation, "cosine_window half_width must be positive");
    if (t.x.kind == XProfile::Kind::Indicator && (!(t.x.smoothing > 0) || !(t.x.hi > t.x.lo)))
      throw Error(ErrorKind::Validation, "indicator needs lo < hi and smoothing > 0");
    if (t.y.has_power_tail() && !(t.y.exponent > 0))
      throw Error(ErrorKind::Validation, "tail exponent must be positive");
    if (t.y.kind == YProfile::Kind::Bump && !(t.y.radius > 0))
      throw Error(ErrorKind::Validation, "bump radius must be positive");
    if (t.y.kind == YProfile::Kind::Gaussian && !(t.y.sigma > 0))
      throw Error(ErrorKind::Validation, "gaussian sigma must be positive");
  }
}

// ---- JSON -----------------------------------------------------------------

namespace {

using nlohmann::json;

double param(const json& params, const char* key, double fallback) {
  if (!params.contains(key)) return fallback;
  if (!params.at(key).is_number()) throw Error(ErrorKind::ConfigParse, std::string("parameter '") + key + "' must be a number");
  return params.at(key).get<double>();
}

double required(const json& params, const char* key, const char* family) {
  if (!params.contains(key))
    throw Error(ErrorKind::ConfigParse, std::string(family) + " requires parameter '" + key + "'");
  return param(params, key, 0.0);
}

XProfile parse_x(const json& j) {
  const auto name = j.at("name").get<std::string>();
  const json params = j.value("params", json::object());
  XProfile x;
  if (name == "constant") {
    x.kind = XProfile::Kind::Constant;
  } else if (name == "cosine_window") {
    x.kind = XProfile::Kind::CosineWindow;
    x.half_width = required(params, "half_width", "cosine_window");
  } else if (name == "indicator") {
    x.kind = XProfile::Kind::Indicator;
    x.lo = required(params, "lo", "indicator");
    x.hi = required(params, "hi", "indicator");
    x.smoothing = param(params, "smoothing", 0.01);
  } else {
    throw Error(ErrorKind::ConfigParse, "unknown x_profile '" + name + "'");
  }
  return x;
}

YProfile parse_y(const json& j, double alpha) {
  const auto name = j.at("name").get<std::string>();
  const json params = j.value("params", json::object());
  YProfile y;
  if (name == "pure_tail" || name == "signed_tail") {
    y.kind = name == "pure_tail" ? YProfile::Kind::PureTail : YProfile::Kind::SignedTail;
    y.exponent = param(params, "exponent", alpha);
  } else if (name == "bump") {
    y.kind = YProfile::Kind::Bump;
    y.radius = required(params, "radius", "bump");
  } else if (name == "gaussian") {
    y.kind = YProfile::Kind::Gaussian;
    y.sigma = required(params, "sigma", "gaussian");
  } else {
    throw Error(ErrorKind::ConfigParse, "unknown y_profile '" + name + "'");
  }
  return y;
}

json dump_x(const XProfile& x) {
  switch (x.kind) {
    case XProfile::Kind::Constant: return {{"name", "constant"}, {"params", json::object()}};
    case XProfile::Kind::CosineWindow: return {{"name", "cosine_window"}, {"params", {{"half_width", x.half_width}}}};
    case XProfile::Kind::Indicator:
      return {{"name", "indicator"}, {"params", {{"lo", x.lo}, {"hi", x.hi}, {"smoothing", x.smoothing}}}};
  }
  return {};
}

json dump_y(const YProfile& y) {
  switch (y.kind) {
    case YProfile::Kind::PureTail: return {{"name", "pure_tail"}, {"params", {{"exponent", y.exponent}}}};
    case YProfile::Kind::SignedTail: return {{"name", "signed_tail"}, {"params", {{"exponent", y.exponent}}}};
    case YProfile::Kind::Bump: return {{"name", "bump"}, {"params", {{"radius", y.radius}}}};
    case YProfile::Kind::Gaussian: return {{"name", "gaussian"}, {"params", {{"sigma", y.sigma}}}};
  }
  return {};
}

}  // namespace

void to_json(nlohmann::json& j, const PotentialSpec& spec) {
  j = nlohmann::json::object();
  j["alpha"] = spec.alpha;
  j["terms"] = nlohmann::json::array();
  for (const auto& t : spec.terms) j["terms"].push_back({{"c", t.c}, {"x_profile", dump_x(t.x)}, {"y_profile", dump_y(t.y)}});
}

void from_json(const nlohmann::json& j, PotentialSpec& spec) {
  try {
    if (!j.is_object() || !j.contains("alpha")) throw Error(ErrorKind::ConfigParse, "potential needs field 'alpha'");
    spec.alpha = j.at("alpha").get<double>();
    spec.terms.clear();
    for (const auto& t : j.value("terms", nlohmann::json::array())) {
      PotentialTerm term;
      term.c = t.at("c").get<double>();
      term.x = parse_x(t.at("x_profile"));
      term.y = parse_y(t.at("y_profile"), spec.alpha);
      spec.terms.push_back(term);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigParse, std::string("potential: ") + e.what());
  }
}

// ---- evaluation ---------------------------------------------------------------

double potential_value(const PotentialSpec& spec, double x, double y) {
  double v = 0.0;
  for (const auto& t : spec.terms) v += t.c * t.x(x) * t.y(y);
  return v;
}

double evaluate_potential(const PotentialSpec& spec, double L, double x, double y) {
  if (std::abs(x) > L) throw Error(ErrorKind::OutOfStrip, "x = " + std::to_string(x) + " lies outside the strip");
  return potential_value(spec, x, y);
}

int sign_field(const PotentialSpec& spec, double L, double x, double y) {
  return evaluate_potential(spec, L, x, y) >= 0 ? 1 : -1;
}

namespace {

void check_tail_exponents(const PotentialSpec& spec) {
  for (const auto& t : spec.terms)
    if (t.y.has_power_tail() && t.y.exponent < spec.alpha - kExponentMatch)
      throw Error(ErrorKind::DecayViolation, "tail exponent " + std::to_string(t.y.exponent) +
                                                 " is below alpha = " + std::to_string(spec.alpha));
}

/// Limits of |y|^alpha V(x, y) as y -> -inf (first) and +inf (second).
std::pair<double, double> tail_profile(const PotentialSpec& spec, double x) {
  double minus = 0.0, plus = 0.0;
  for (const auto& t : spec.terms) {
    if (!t.y.has_power_tail() || std::abs(t.y.exponent - spec.alpha) > kExponentMatch) continue;
    const auto [cm, cp] = t.y.tail_coefficients();
    minus += t.c * t.x(x) * cm;
    plus += t.c * t.x(x) * cp;
  }
  return {minus, plus};
}

double deformed(double v, double epsilon) { return std::abs(v) / ((v >= 0 ? 1.0 : -1.0) - epsilon); }

void check_epsilon(double epsilon) {
  if (!(std::abs(epsilon) < 1)) throw Error(ErrorKind::EpsilonOutOfRange, "epsilon must lie in (-1, 1)");
}

}  // namespace

DecayCertificate verify_decay(const PotentialSpec& spec, double L, double y_max) {
  spec.validate();
  check_tail_exponents(spec);
  std::vector<double> ys;
  for (int i = 0; i <= 200; ++i) ys.push_back(10.0 * i / 200);
  for (int i = 0; i <= 400; ++i) ys.push_back(std::pow(10.0, 1 + (std::log10(y_max) - 1) * i / 400));
  const int nx = 201;
  DecayCertificate cert{0.0, 0.0, 0.0};
  for (int ix = 0; ix < nx; ++ix) {
    const double x = -L + 2 * L * ix / (nx - 1);
    for (double y : ys)
      for (double s : {-1.0, 1.0})
        cert.grid_max = std::max(cert.grid_max, std::abs(potential_value(spec, x, s * y)) * std::pow(bracket_y(y), spec.alpha));
    const auto [m, p] = tail_profile(spec, x);
    cert.tail_sup = std::max({cert.tail_sup, std::abs(m), std::abs(p)});
  }
  cert.c = std::max(cert.grid_max, cert.tail_sup);
  return cert;
}

EffectivePotentialFunction::EffectivePotentialFunction(PotentialSpec spec, const Eigenpair& psi, double epsilon)
    : spec_(std::move(spec)), x_(psi.psi.nodes()),
      weight_(trapezoid_weights(psi.psi.nodes()).cwiseProduct(psi.psi.values().cwiseAbs2())), epsilon_(epsilon) {
  check_epsilon(epsilon);
  if (spec_.terms.size() == 1) {
    const PotentialTerm& t = spec_.terms.front();
    for (int side = 0; side < 2; ++side) {
      const double sign = side == 0 ? 1.0 : -1.0;
      double a = 0.0;
      for (Eigen::Index i = 0; i < x_.size(); ++i) a += weight_[i] * deformed(sign * t.c * t.x(x_[i]), epsilon_);
      separable_weight_[static_cast<std::size_t>(side)] = a;
    }
    separable_ = true;
  }
}

double EffectivePotentialFunction::operator()(double y) const {
  if (separable_) {
    const double v = spec_.terms.front().y(y);
    return std::abs(v) * separable_weight_[v < 0 ? 1 : 0];
  }
  double w = 0.0;
  for (Eigen::Index i = 0; i < x_.size(); ++i) {
    if (weight_[i] == 0) continue;
    w += weight_[i] * deformed(potential_value(spec_, x_[i], y), epsilon_);
  }
  return w;
}

double effective_potential_at(const PotentialSpec& spec, const Eigenpair& psi, double epsilon, double y) {
  return EffectivePotentialFunction(spec, psi, epsilon)(y);
}

bool all_power_tails(const PotentialSpec& spec) {
  return std::all_of(spec.terms.begin(), spec.terms.end(), [](const auto& t) { return t.y.has_power_tail(); });
}

EffectivePotential effective_potential(const PotentialSpec& spec, const Eigenpair& psi, double epsilon,
                                       const Eigen::VectorXd& y_grid) {
  const EffectivePotentialFunction w(spec, psi, epsilon);
  EffectivePotential out;
  out.j = psi.j;
  out.epsilon = epsilon;
  out.grid = y_grid;
  out.values.resize(y_grid.size());
  for (Eigen::Index i = 0; i < y_grid.size(); ++i) out.values[i] = w(y_grid[i]);
  if (!spec.terms.empty() && all_power_tails(spec)) out.omega = tail_limits(spec, psi, epsilon);
  return out;
}

TailLimits tail_limits(const PotentialSpec& spec, const Eigenpair& psi, double epsilon) {
  check_epsilon(epsilon);
  if (!all_power_tails(spec)) throw Error(ErrorKind::NoPureTail, "every y-profile must be a power tail");
  check_tail_exponents(spec);
  const auto& x = psi.psi.nodes();
  const Eigen::VectorXd weight = trapezoid_weights(x).cwiseProduct(psi.psi.values().cwiseAbs2());
  TailLimits out;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const auto [m, p] = tail_profile(spec, x[i]);
    out.minus += weight[i] * deformed(m, epsilon);
    out.plus += weight[i] * deformed(p, epsilon);
  }
  return out;
}

}  // namespace magstrip
