#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "magstrip/cli.hpp"
#include "magstrip/csv.hpp"

using namespace magstrip;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("magstrip_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(MAGSTRIP_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config_path(const char* name) { return std::string(MAGSTRIP_CONFIG_DIR) + "/" + name; }

RunConfig small_free_config(const fs::path& out) {
  RunConfig c;
  c.b = 0.0;
  c.L = 1.0;
  c.grid = {512, 21, 2.0};
  c.bands = {1, 2, 3};
  c.output_dir = out;
  return c;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("doubles survive formatting exactly") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> mantissa(-1.0, 1.0);
    std::uniform_int_distribution<int> exponent(-300, 300);
    for (int i = 0; i < 2000; ++i) {
      const double v = std::ldexp(mantissa(rng), exponent(rng));
      CHECK(parse_double(format_double(v)) == v);
    }
    for (double v : {0.0, -0.0, 1.0, 0.1, std::numbers::pi, std::numeric_limits<double>::denorm_min(),
                     std::numeric_limits<double>::max()})
      CHECK(parse_double(format_double(v)) == v);
    CHECK_THROWS_AS(parse_double("1.5x"), Error);
    CHECK_THROWS_AS(parse_double(""), Error);
  }

  TEST_CASE("CSV tables round trip") {
    const auto bands = sample_bands({1.0, 1.0, {256, 1e-9, true}}, 2, 2.0, 11);
    const CsvTable t = band_table(bands[1]);
    CHECK(t.header == std::vector<std::string>{"k", "E_2", "dE_2"});
    const CsvTable back = parse_csv(to_csv(t));
    CHECK(back.header == t.header);
    const auto e = back.column("E_2");
    REQUIRE(e.size() == static_cast<std::size_t>(bands[1].energy.size()));
    for (std::size_t i = 0; i < e.size(); ++i) CHECK(e[i] == bands[1].energy[static_cast<Eigen::Index>(i)]);

    SsfCurve c;
    c.lambda = {-1e-3, -1e-4, 1e-4, 1e-3};
    c.xi = {-3.0, -5.0, 0.123456789012345678, 1.0 / 3};
    c.method = SsfMethod::Box;
    const std::string text = to_csv(ssf_table(c));
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.rfind("lambda,xi,method\n", 0) == 0);
    const SsfCurve d = ssf_from_table(parse_csv(text));
    CHECK(d.lambda == c.lambda);
    CHECK(d.xi == c.xi);
    CHECK(d.method == SsfMethod::Box);
    CHECK_THROWS_AS(parse_csv("a,b\n1\n"), Error);
    CHECK_THROWS_AS(t.column("missing"), Error);
  }

  TEST_CASE("validation names the offending field") {
    auto message = [](auto mutate) {
      RunConfig c;
      mutate(c);
      try {
        c.validate();
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Validation);
        const std::string what = e.what(), prefix = "validation: ";
        CHECK(what.rfind(prefix, 0) == 0);
        return what.substr(prefix.size());
      }
      return std::string("accepted");
    };
    CHECK(message([](RunConfig&) {}) == "accepted");
    CHECK(message([](RunConfig& c) { c.bands = {1, 0}; }).rfind("bands", 0) == 0);
    CHECK(message([](RunConfig& c) { c.bands.clear(); }).rfind("bands", 0) == 0);
    CHECK(message([](RunConfig& c) { c.ssf.lambda_hi = c.ssf.lambda_lo; }).rfind("ssf.lambda_hi", 0) == 0);
    CHECK(message([](RunConfig& c) { c.ssf.lambda_lo = -1; }).rfind("ssf.lambda_lo", 0) == 0);
    CHECK(message([](RunConfig& c) { c.ssf.epsilon = 1.0; }).rfind("ssf.epsilon", 0) == 0);
    CHECK(message([](RunConfig& c) { c.asymptotics.epsilon = -1.5; }).rfind("asymptotics.epsilon", 0) == 0);
    CHECK(message([](RunConfig& c) { c.L = 0; }).rfind("L", 0) == 0);
    CHECK(message([](RunConfig& c) { c.b = -1; }).rfind("b", 0) == 0);
    CHECK(message([](RunConfig& c) { c.grid.n_k = 10; }).rfind("grid.n_k", 0) == 0);
    CHECK(message([](RunConfig& c) { c.ssf.method = "guess"; }).rfind("ssf.method", 0) == 0);
    CHECK(message([](RunConfig& c) { c.potential.alpha = -1; }).rfind("potential", 0) == 0);
  }

  TEST_CASE("config parsing") {
    const RunConfig c = load_config(config_path("reference_alpha_1_5.json"));
    CHECK(c.b == 0.0);
    CHECK(c.potential.alpha == 1.5);
    CHECK(c.bands == std::vector<int>{1});
    const RunConfig back = nlohmann::json(c).get<RunConfig>();
    CHECK(nlohmann::json(back) == nlohmann::json(c));

    auto kind = [](const char* text) {
      try {
        nlohmann::json::parse(text).get<RunConfig>();
      } catch (const Error& e) {
        return e.kind();
      }
      return ErrorKind::InvalidSpec;
    };
    CHECK(kind(R"([1, 2])") == ErrorKind::ConfigParse);
    CHECK(kind(R"({"b": "one"})") == ErrorKind::ConfigParse);
    CHECK(kind(R"({"potential": {"terms": []}})") == ErrorKind::ConfigParse);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), Error);
  }

  TEST_CASE("bands command on the free strip") {
    const fs::path out = scratch("bands");
    std::ostringstream log;
    const RunResult r = run("bands", small_free_config(out), log);
    CHECK(r.status == kExitOk);
    CHECK(r.files.size() == 4);
    const CsvTable t = parse_csv(read_file(out / "thresholds.csv"));
    const auto z = t.column("threshold");
    REQUIRE(z.size() == 3);
    for (int j = 1; j <= 3; ++j)
      CHECK(z[j - 1] == doctest::Approx(std::pow(j * std::numbers::pi / 2, 2)).epsilon(1e-8));
    const auto mu = t.column("mu");
    for (double m : mu) CHECK(m == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(fs::exists(out / "band_2.csv"));
  }

  TEST_CASE("outputs are deterministic") {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    std::ostringstream log;
    RunConfig c = small_free_config(a);
    c.potential = nlohmann::json::parse(R"({"alpha": 1.5, "terms": [{"c": -1, "x_profile": {"name": "constant"},
                                            "y_profile": {"name": "pure_tail"}}]})").get<PotentialSpec>();
    c.effective = {20.0, 41};
    run("effective", c, log);
    run("bands", c, log);
    c.output_dir = b;
    run("effective", c, log);
    run("bands", c, log);
    for (const char* f : {"effective_1.csv", "omega.csv", "band_1.csv", "thresholds.csv"})
      CHECK(read_file(a / f) == read_file(b / f));
    const auto omega = parse_csv(read_file(a / "omega.csv"));
    for (double w : omega.column("omega_minus")) CHECK(w == doctest::Approx(-1.0).epsilon(1e-10));
  }

  TEST_CASE("mourre command") {
    const fs::path out = scratch("mourre");
    std::ostringstream log;
    RunConfig c = small_free_config(out);
    c.bands = {2};
    c.grid.k_max = 0;
    run("mourre", c, log);
    const auto j = nlohmann::json::parse(read_file(out / "mourre.json"));
    REQUIRE(j.at("reports").size() == 2);
    for (const auto& r : j.at("reports")) {
      CHECK(r.at("mourre_constant").get<double>() > 0);
      CHECK(r.at("preimages_disjoint").get<bool>());
    }
    CHECK(j.contains("generated_at"));
  }

  TEST_CASE("unknown command") {
    std::ostringstream log;
    CHECK_THROWS_AS(run("plot", RunConfig{}, log), Error);
    CHECK(commands().size() == 5);
  }

  TEST_CASE("exit status classes") {
    CHECK(exit_status(ErrorKind::ConfigParse) == 2);
    CHECK(exit_status(ErrorKind::Validation) == 3);
    CHECK(exit_status(ErrorKind::NoConvergence) == 4);
    CHECK(exit_status(ErrorKind::TruncationUnstable) == 4);
  }

  TEST_CASE("binary exit codes") {
    const fs::path dir = scratch("binary");
    const fs::path bad = dir / "bad.json", invalid = dir / "invalid.json";
    write_file(bad, "{ not json");
    write_file(invalid, R"({"bands": [0]})");
    CHECK(run_binary("calpha --alpha 1") == 0);
    CHECK(run_binary("calpha --alpha 2") == 3);
    CHECK(run_binary("bands --config " + bad.string()) == 2);
    CHECK(run_binary("bands --config " + invalid.string()) == 3);
    CHECK(run_binary("bands --nonsense") == 2);
    CHECK(run_binary("") == 2);
  }

  TEST_CASE("verify on the reference configuration") {
    const fs::path out = scratch("verify");
    CHECK(run_binary("verify --config " + config_path("reference_alpha_1_5.json") + " --output " + out.string()) == 0);
    const auto report = nlohmann::json::parse(read_file(out / "verify_1.json"));
    CHECK(report.at("verdict") == "pass");
    CHECK(report.at("branch") == "power");
    CHECK(fs::exists(out / "verify_1_below.csv"));
    CHECK(fs::exists(out / "verify_1_above.csv"));
    fs::remove_all(out.parent_path());
  }
}
