#include "magstrip/cli.hpp"

#include <chrono>
#include <ctime>

#include "magstrip/csv.hpp"

namespace magstrip {

int exit_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigParse: return kExitConfigParse;
    case ErrorKind::Validation:
    case ErrorKind::InvalidSpec:
    case ErrorKind::InvalidArgument:
    case ErrorKind::EpsilonOutOfRange:
    case ErrorKind::AlphaOutOfRange:
    case ErrorKind::DecayViolation:
    case ErrorKind::NoPureTail:
    case ErrorKind::OutOfStrip: return kExitValidation;
    case ErrorKind::NoConvergence:
    case ErrorKind::TruncationUnstable:
    case ErrorKind::MatchingFailure:
    case ErrorKind::AnchorAmbiguity:
    case ErrorKind::FitDegenerate:
    case ErrorKind::SignMixed:
    case ErrorKind::Underdetermined: return kExitNumerical;
    default: return kExitOther;
  }
}

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"bands", "effective", "ssf", "mourre", "verify"};
  return names;
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Emitter {
 public:
  Emitter(const RunConfig& config, std::ostream& log, RunResult& result)
      : dir_(config.output_dir), log_(log), result_(result) {}

  void csv(const std::string& name, const CsvTable& table) { emit(name, to_csv(table)); }

  void json(const std::string& name, nlohmann::json body) {
    body["generated_at"] = utc_timestamp();
    emit(name, body.dump(2) + "\n");
  }

 private:
  void emit(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    write_file(path, content);
    result_.files.push_back(path);
    log_ << "wrote " << path.string() << "\n";
  }

  std::filesystem::path dir_;
  std::ostream& log_;
  RunResult& result_;
};

BandContext context(const RunConfig& c) { return {c.b, c.L, SolverOptions{c.grid.n, 1e-9, true}}; }

std::vector<Band> bands_up_to(const RunConfig& c, int m) {
  const BandContext ctx = context(c);
  double k_max = c.grid.k_max;
  if (k_max == 0) {
    const FiberSolution at_zero = solve_fiber({c.b, c.L, 0.0}, m, ctx.solver);
    k_max = default_k_max(c.b, at_zero.pairs.back().energy);
  }
  return sample_bands(ctx, m, k_max, c.grid.n_k);
}

std::string tag(int j) { return std::to_string(j); }

void run_bands(const RunConfig& c, Emitter& out) {
  const auto bands = bands_up_to(c, c.max_band());
  for (int j : c.bands) out.csv("band_" + tag(j) + ".csv", band_table(bands[static_cast<std::size_t>(j - 1)]));
  out.csv("thresholds.csv", threshold_table(bands));
}

void run_effective(const RunConfig& c, Emitter& out) {
  const FiberSolution sol = solve_fiber({c.b, c.L, 0.0}, c.max_band(), context(c).solver);
  Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(c.effective.n_y, -c.effective.y_max, c.effective.y_max);
  std::vector<EffectivePotential> ws;
  for (int j : c.bands) {
    ws.push_back(effective_potential(c.potential, sol.pairs[static_cast<std::size_t>(j - 1)], c.ssf.epsilon, grid));
    out.csv("effective_" + tag(j) + ".csv", effective_table(ws.back()));
  }
  if (all_power_tails(c.potential) && !c.potential.terms.empty()) out.csv("omega.csv", omega_table(ws));
}

void run_ssf(const RunConfig& c, Emitter& out) {
  const auto bands = bands_up_to(c, c.max_band());
  const auto grid = log_space(c.ssf.lambda_lo, c.ssf.lambda_hi, c.ssf.n_lambda);
  std::vector<double> lambdas;
  for (double l : grid) lambdas.push_back(-l);
  lambdas.insert(lambdas.end(), grid.begin(), grid.end());
  const SsfMethod method = c.ssf.method == "box" ? SsfMethod::Box : SsfMethod::PhaseShift;
  for (int j : c.bands) {
    const EffectiveOperator op = effective_operator(bands[static_cast<std::size_t>(j - 1)], c.potential, c.ssf.epsilon);
    out.csv("ssf_" + tag(j) + ".csv", ssf_table(ssf_curve(op, lambdas, method)));
  }
}

void run_mourre(const RunConfig& c, Emitter& out) {
  const int m = std::max(2, c.max_band() + 1);
  const auto bands = bands_up_to(c, m);
  std::vector<double> energies = c.mourre.energies;
  if (energies.empty())
    for (std::size_t r = 0; r + 1 < bands.size(); ++r)
      energies.push_back(0.5 * (bands[r].threshold + bands[r + 1].threshold));

  nlohmann::json reports = nlohmann::json::array();
  for (double e : energies) {
    const double delta = c.mourre.delta > 0 ? c.mourre.delta : separation_delta(bands, e);
    const MourreReport r = mourre_constant(bands, e, delta);
    nlohmann::json pre = nlohmann::json::array();
    for (const auto& p : r.preimages) pre.push_back({{"r", p.r}, {"k_lo", p.k_lo}, {"k_hi", p.k_hi}});
    reports.push_back({{"energy", e},
                       {"delta", delta},
                       {"window", {r.window_lo, r.window_hi}},
                       {"n", r.n},
                       {"preimages", pre},
                       {"per_band_constants", r.per_band_constants},
                       {"mourre_constant", r.mourre_constant},
                       {"preimages_disjoint", r.preimages_disjoint}});
  }
  out.json("mourre.json", {{"b", c.b}, {"L", c.L}, {"reports", reports}});
}

bool run_verify(const RunConfig& c, Emitter& out) {
  const auto bands = bands_up_to(c, c.max_band());
  ToleranceProfile profile = c.asymptotics;
  bool all_pass = true;
  for (int j : c.bands) {
    AsymptoticsReport r = verify_corollaries(j, c.potential, bands, profile);
    const std::string below = "verify_" + tag(j) + "_below.csv", above = "verify_" + tag(j) + "_above.csv";
    out.csv(below, ssf_table(r.below));
    r.curve_files.push_back((c.output_dir / below).string());
    if (!r.above.lambda.empty()) {
      out.csv(above, ssf_table(r.above));
      r.curve_files.push_back((c.output_dir / above).string());
    }
    nlohmann::json body = r;
    body.erase("curves");
    out.json("verify_" + tag(j) + ".json", body);
    all_pass = all_pass && r.verdict;
  }
  return all_pass;
}

}  // namespace

RunResult run(const std::string& command, const RunConfig& config, std::ostream& log) {
  config.validate();
  RunResult result;
  Emitter out(config, log, result);
  if (command == "bands")
    run_bands(config, out);
  else if (command == "effective")
    run_effective(config, out);
  else if (command == "ssf")
    run_ssf(config, out);
  else if (command == "mourre")
    run_mourre(config, out);
  else if (command == "verify") {
    if (!run_verify(config, out)) result.status = kExitVerificationFailed;
  } else
    throw Error(ErrorKind::InvalidArgument, "unknown command '" + command + "'");
  return result;
}

}  // namespace magstrip
