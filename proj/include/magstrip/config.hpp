#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "magstrip/asymptotics.hpp"
#include "magstrip/potential.hpp"

namespace magstrip {

struct GridConfig {
  Eigen::Index n = 2048;  // fiber grid
  Eigen::Index n_k = 241;
  double k_max = 0.0;  // 0 selects 3 sqrt(E_m + 5 b)
};

struct SsfConfig {
  double lambda_lo = 1e-5;
  double lambda_hi = 1e-3;
  int n_lambda = 12;
  double epsilon = 0.0;
  std::string method = "phase-shift";  // or "box"
};

struct EffectiveConfig {
  double y_max = 50.0;
  int n_y = 2001;
};

struct MourreConfig {
  std::vector<double> energies;  // empty: midpoints between consecutive thresholds
  double delta = 0.0;            // 0: separation radius per energy
};

struct RunConfig {
  double b = 1.0;
  double L = 1.0;
  GridConfig grid;
  PotentialSpec potential;
  std::vector<int> bands{1};
  SsfConfig ssf;
  EffectiveConfig effective;
  MourreConfig mourre;
  ToleranceProfile asymptotics;
  std::filesystem::path output_dir = "out";

  /// Throws a validation error naming the offending field.
  void validate() const;
  int max_band() const;
};

void to_json(nlohmann::json& j, const RunConfig& c);
/// Throws a config-parse error on malformed documents.
void from_json(const nlohmann::json& j, RunConfig& c);

RunConfig load_config(const std::filesystem::path& path);

}  // namespace magstrip
