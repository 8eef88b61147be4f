#include "magstrip/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace magstrip {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw Error(ErrorKind::InvalidArgument, "not a number: '" + std::string(text) + "'");
  return v;
}

std::vector<double> CsvTable::column(std::string_view name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error(ErrorKind::InvalidArgument, "no column '" + std::string(name) + "'");
  const auto c = static_cast<std::size_t>(it - header.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(parse_double(row.at(c)));
  return out;
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
  return out;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  bool first = true;
  while (!text.empty()) {
    const auto end = text.find('\n');
    std::string_view line = text.substr(0, end);
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<std::string> cells;
    for (std::size_t start = 0;;) {
      const auto comma = line.find(',', start);
      cells.emplace_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != table.header.size())
        throw Error(ErrorKind::InvalidArgument, "row has " + std::to_string(cells.size()) + " cells, header has " +
                                                    std::to_string(table.header.size()));
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

CsvTable band_table(const Band& band) {
  const std::string j = std::to_string(band.j);
  CsvTable t{{"k", "E_" + j, "dE_" + j}, {}};
  for (Eigen::Index i = 0; i < band.k.size(); ++i)
    t.rows.push_back({format_double(band.k[i]), format_double(band.energy[i]), format_double(band.slope[i])});
  return t;
}

CsvTable threshold_table(const std::vector<Band>& bands) {
  CsvTable t{{"j", "threshold", "mu"}, {}};
  for (const auto& b : bands) t.rows.push_back({std::to_string(b.j), format_double(b.threshold), format_double(b.mu)});
  return t;
}

CsvTable effective_table(const EffectivePotential& w) {
  CsvTable t{{"y", "w"}, {}};
  for (Eigen::Index i = 0; i < w.grid.size(); ++i) t.rows.push_back({format_double(w.grid[i]), format_double(w.values[i])});
  return t;
}

CsvTable omega_table(const std::vector<EffectivePotential>& ws) {
  CsvTable t{{"j", "epsilon", "omega_minus", "omega_plus"}, {}};
  for (const auto& w : ws)
    if (w.omega)
      t.rows.push_back({std::to_string(w.j), format_double(w.epsilon), format_double(w.omega->minus),
                        format_double(w.omega->plus)});
  return t;
}

CsvTable ssf_table(const SsfCurve& curve) {
  CsvTable t{{"lambda", "xi", "method"}, {}};
  const std::string method = to_string(curve.method);
  for (std::size_t i = 0; i < curve.lambda.size(); ++i)
    t.rows.push_back({format_double(curve.lambda[i]), format_double(curve.xi[i]), method});
  return t;
}

SsfCurve ssf_from_table(const CsvTable& table) {
  SsfCurve curve;
  curve.lambda = table.column("lambda");
  curve.xi = table.column("xi");
  if (!table.rows.empty()) {
    const auto c = static_cast<std::size_t>(std::find(table.header.begin(), table.header.end(), "method") - table.header.begin());
    if (c < table.header.size()) curve.method = table.rows.front()[c] == "box" ? SsfMethod::Box : SsfMethod::PhaseShift;
  }
  return curve;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ConfigParse, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

}  // namespace magstrip
