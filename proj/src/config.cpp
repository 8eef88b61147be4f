#include "magstrip/config.hpp"

#include <algorithm>
#include <cmath>

#include "magstrip/csv.hpp"

namespace magstrip {

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorKind::Validation, field + ": " + why);
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

}  // namespace

int RunConfig::max_band() const { return bands.empty() ? 0 : *std::max_element(bands.begin(), bands.end()); }

void RunConfig::validate() const {
  if (!(b >= 0) || !std::isfinite(b)) invalid("b", "must be finite and >= 0");
  if (!(L > 0) || !std::isfinite(L)) invalid("L", "must be finite and > 0");
  if (grid.n < 3) invalid("grid.n", "must be >= 3");
  if (grid.n_k < 5 || grid.n_k % 2 == 0) invalid("grid.n_k", "must be odd and >= 5");
  if (!(grid.k_max >= 0)) invalid("grid.k_max", "must be >= 0 (0 selects the default)");
  if (bands.empty()) invalid("bands", "must list at least one band");
  for (int j : bands)
    if (j < 1) invalid("bands", "band index " + std::to_string(j) + " must be >= 1");
  if (!(ssf.lambda_lo > 0)) invalid("ssf.lambda_lo", "must be > 0");
  if (!(ssf.lambda_lo < ssf.lambda_hi)) invalid("ssf.lambda_hi", "must exceed ssf.lambda_lo");
  if (ssf.n_lambda < 2) invalid("ssf.n_lambda", "must be >= 2");
  if (!(std::abs(ssf.epsilon) < 1)) invalid("ssf.epsilon", "must satisfy |epsilon| < 1");
  if (ssf.method != "phase-shift" && ssf.method != "box") invalid("ssf.method", "must be 'phase-shift' or 'box'");
  if (!(effective.y_max > 0)) invalid("effective.y_max", "must be > 0");
  if (effective.n_y < 3) invalid("effective.n_y", "must be >= 3");
  if (!(mourre.delta >= 0)) invalid("mourre.delta", "must be >= 0");
  if (!(std::abs(asymptotics.epsilon) < 1)) invalid("asymptotics.epsilon", "must satisfy |epsilon| < 1");
  if (asymptotics.lambda_lo < 0 || asymptotics.lambda_hi < 0) invalid("asymptotics.lambda_lo", "must be >= 0");
  if (asymptotics.lambda_lo > 0 && asymptotics.lambda_hi > 0 && !(asymptotics.lambda_lo < asymptotics.lambda_hi))
    invalid("asymptotics.lambda_hi", "must exceed asymptotics.lambda_lo");
  if (asymptotics.n_lambda < 8) invalid("asymptotics.n_lambda", "must be >= 8");
  for (auto [name, v] : {std::pair{"asymptotics.exponent_tol", asymptotics.exponent_tol},
                         std::pair{"asymptotics.constant_tol", asymptotics.constant_tol},
                         std::pair{"asymptotics.log_tol", asymptotics.log_tol},
                         std::pair{"asymptotics.trend_tol", asymptotics.trend_tol}})
    if (!(v > 0)) invalid(name, "must be > 0");
  if (asymptotics.gamma < 0) invalid("asymptotics.gamma", "must be >= 0 (0 selects the default)");
  if (output_dir.empty()) invalid("output_dir", "must not be empty");
  try {
    potential.validate();
  } catch (const Error& e) {
    invalid("potential", e.what());
  }
}

void to_json(nlohmann::json& j, const RunConfig& c) {
  j = {{"b", c.b},
       {"L", c.L},
       {"grid", {{"n", c.grid.n}, {"n_k", c.grid.n_k}, {"k_max", c.grid.k_max}}},
       {"potential", c.potential},
       {"bands", c.bands},
       {"ssf",
        {{"lambda_lo", c.ssf.lambda_lo},
         {"lambda_hi", c.ssf.lambda_hi},
         {"n_lambda", c.ssf.n_lambda},
         {"epsilon", c.ssf.epsilon},
         {"method", c.ssf.method}}},
       {"effective", {{"y_max", c.effective.y_max}, {"n_y", c.effective.n_y}}},
       {"mourre", {{"energies", c.mourre.energies}, {"delta", c.mourre.delta}}},
       {"asymptotics", c.asymptotics},
       {"output_dir", c.output_dir.string()}};
}

void from_json(const nlohmann::json& j, RunConfig& c) {
  try {
    if (!j.is_object()) throw Error(ErrorKind::ConfigParse, "config must be a JSON object");
    c = RunConfig{};
    read(j, "b", c.b);
    read(j, "L", c.L);
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      read(g, "n", c.grid.n);
      read(g, "n_k", c.grid.n_k);
      read(g, "k_max", c.grid.k_max);
    }
    if (j.contains("potential")) c.potential = j.at("potential").get<PotentialSpec>();
    read(j, "bands", c.bands);
    if (j.contains("ssf")) {
      const auto& s = j.at("ssf");
      read(s, "lambda_lo", c.ssf.lambda_lo);
      read(s, "lambda_hi", c.ssf.lambda_hi);
      read(s, "n_lambda", c.ssf.n_lambda);
      read(s, "epsilon", c.ssf.epsilon);
      read(s, "method", c.ssf.method);
    }
    if (j.contains("effective")) {
      read(j.at("effective"), "y_max", c.effective.y_max);
      read(j.at("effective"), "n_y", c.effective.n_y);
    }
    if (j.contains("mourre")) {
      read(j.at("mourre"), "energies", c.mourre.energies);
      read(j.at("mourre"), "delta", c.mourre.delta);
    }
    if (j.contains("asymptotics")) c.asymptotics = j.at("asymptotics").get<ToleranceProfile>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigParse, e.what());
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ConfigParse, path.string() + ": " + e.what());
  }
  return j.get<RunConfig>();
}

}  // namespace magstrip
