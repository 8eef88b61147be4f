#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "magstrip/band_structure.hpp"
#include "magstrip/potential.hpp"
#include "magstrip/schrodinger1d.hpp"

namespace magstrip {

/// 17 significant digits, enough to reproduce any double exactly.
std::string format_double(double v);
double parse_double(std::string_view text);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column by header name, parsed as doubles.
  std::vector<double> column(std::string_view name) const;
};

/// Comma separated, header row, LF line endings.
std::string to_csv(const CsvTable& table);
CsvTable parse_csv(std::string_view text);

/// Columns k, E_j, dE_j.
CsvTable band_table(const Band& band);
/// Columns j, threshold, mu.
CsvTable threshold_table(const std::vector<Band>& bands);
/// Columns y, w.
CsvTable effective_table(const EffectivePotential& w);
/// Columns j, epsilon, omega_minus, omega_plus.
CsvTable omega_table(const std::vector<EffectivePotential>& ws);
/// Columns lambda, xi, method.
CsvTable ssf_table(const SsfCurve& curve);

SsfCurve ssf_from_table(const CsvTable& table);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace magstrip
