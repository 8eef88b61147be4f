#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

#include "magstrip/cli.hpp"
#include "magstrip/csv.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string output;
  std::optional<double> alpha, b, L, epsilon;
  std::optional<int> band;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "Run configuration (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--output", o.output, "Output directory");
  cmd->add_option("--alpha", o.alpha, "Override the declared decay exponent");
  cmd->add_option("--b", o.b, "Override the field strength");
  cmd->add_option("--L", o.L, "Override the strip half-width");
  cmd->add_option("--band", o.band, "Run a single band index");
  cmd->add_option("--epsilon", o.epsilon, "Override the sign deformation");
}

magstrip::RunConfig resolve(const Overrides& o) {
  magstrip::RunConfig c = o.config.empty() ? magstrip::RunConfig{} : magstrip::load_config(o.config);
  if (!o.output.empty()) c.output_dir = o.output;
  if (o.alpha) c.potential.alpha = *o.alpha;
  if (o.b) c.b = *o.b;
  if (o.L) c.L = *o.L;
  if (o.band) c.bands = {*o.band};
  if (o.epsilon) c.ssf.epsilon = c.asymptotics.epsilon = *o.epsilon;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Band structure, effective Hamiltonians and spectral shifts of a magnetic strip"};
  app.require_subcommand(1);

  Overrides overrides;
  std::vector<std::pair<std::string, CLI::App*>> runs;
  const std::vector<std::pair<std::string, std::string>> help{
      {"bands", "Band CSVs and the thresholds table"},
      {"effective", "Effective potentials and tail limits"},
      {"ssf", "Spectral shift curves of the effective Hamiltonians"},
      {"mourre", "Mourre constants on windows between thresholds"},
      {"verify", "Threshold asymptotics report"}};
  for (const auto& [name, text] : help) {
    CLI::App* cmd = app.add_subcommand(name, text);
    add_overrides(cmd, overrides);
    runs.emplace_back(name, cmd);
  }

  double alpha = 0.0;
  CLI::App* calpha = app.add_subcommand("calpha", "Print the constant C_alpha");
  calpha->add_option("--alpha", alpha, "Decay exponent in (0, 2)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return magstrip::kExitConfigParse;
  }

  try {
    if (calpha->parsed()) {
      std::cout << magstrip::format_double(magstrip::c_alpha(alpha)) << "\n";
      return magstrip::kExitOk;
    }
    for (const auto& [name, cmd] : runs)
      if (cmd->parsed()) {
        const magstrip::RunResult r = magstrip::run(name, resolve(overrides), std::cout);
        if (r.status == magstrip::kExitVerificationFailed) std::cerr << "verification failed\n";
        return r.status;
      }
  } catch (const magstrip::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return magstrip::exit_status(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return magstrip::kExitOther;
  }
  return magstrip::kExitOther;
}
