#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "qtraj/cli.hpp"

using namespace qtraj;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("qtraj_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  os << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(QTRAJ_BINARY) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string error_of(const std::string& yaml) {
  try {
    cli::parse_config(yaml, "run.yaml");
  } catch (const cli::ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* kBoxVerify = R"(state:
  kind: box
  n: 1
trajectory:
  n_samples: 200000
  sampling: uniform_random
  seed: 4
)";

}  // namespace

TEST_CASE("config defaults") {
  const auto cfg = cli::parse_config("", "empty.yaml");
  CHECK(cfg.state.kind == "box");
  CHECK(cfg.state.n == 1);
  CHECK(cfg.state.grid == kDefaultGridPoints);
  CHECK(cfg.params.T == 1.0);
  CHECK(cfg.params.c == 10.0);
  CHECK(cfg.trajectory.mode == Mode::single_pass);
  CHECK(cfg.trajectory.sampling == Sampling::uniform_grid);
  CHECK_FALSE(cfg.verify.dx.has_value());
  CHECK(cfg.verify.tolerances.l1_random == 0.02);
  CHECK(cfg.momentum.n_mu == 1024);
  CHECK(cfg.output.series.empty());
}

TEST_CASE("config sections are decoded") {
  const auto cfg = cli::parse_config(R"(state:
  kind: superposition
  L: 2
  convention: wall
  components:
    - {n: 1, coeff: [0.6, 0]}
    - {n: 3, coeff: [0, 0.8], energy: 7.5}
params: {m: 2, T: 3}
trajectory:
  mode: periodic
  direction: backward
  t0_seed: 9
  sampling: uniform_random
verify:
  dx: 0.05
  target: {kind: box, n: 2}
marginal: {T_avg: 0.5, n_t: 129}
output:
  directory: results
  series: [trajectory, histogram]
)",
                                     "run.yaml", "/data/runs");
  CHECK(cfg.state.kind == "superposition");
  CHECK(cfg.state.convention == BoxConvention::wall);
  REQUIRE(cfg.state.components.size() == 2);
  CHECK(cfg.state.components[1].coeff == Complex{0.0, 0.8});
  CHECK(cfg.state.components[1].energy == 7.5);
  CHECK_FALSE(cfg.state.components[0].energy.has_value());
  CHECK(cfg.params.m == 2.0);
  CHECK(cfg.params.hbar == 1.0);
  CHECK(cfg.trajectory.direction == Direction::backward);
  CHECK(cfg.trajectory.t0_seed == 9u);
  CHECK(cfg.verify.dx == 0.05);
  REQUIRE(cfg.verify.target.has_value());
  CHECK(cfg.verify.target->n == 2);
  CHECK(cfg.marginal.t_avg == 0.5);
  CHECK(cfg.output.directory == fs::path("/data/runs/results"));
  CHECK(cfg.output.series.size() == 2);
  const auto echo = nlohmann::json::parse(cfg.echo_json);
  CHECK(echo["params"]["m"] == 2);
}

TEST_CASE("config errors carry the offending line") {
  CHECK(error_of("state:\n  kind: box\n  colour: red\n") == "run.yaml:3: unknown key 'colour' in section 'state'");
  CHECK(error_of("bogus: 1\n").find("run.yaml:1: unknown key 'bogus'") == 0);
  CHECK(error_of("params:\n  T: fast\n") == "run.yaml:2: 'T' must be a number");
  CHECK(error_of("params:\n  T: -1\n") == "run.yaml:2: 'T' must be a positive number");
  CHECK(error_of("trajectory:\n  sampling: sometimes\n").find("run.yaml:2: 'sampling' must be one of") == 0);
  CHECK(error_of("trajectory:\n  t0: 0.1\n  t0_seed: 3\n").find("run.yaml:3:") == 0);
  CHECK(error_of("state: [1, 2\n").find("run.yaml:") == 0);
  CHECK(error_of("marginal:\n  n_t: 100\n") == "run.yaml:2: 'n_t' must be odd and at least 9");
  CHECK(error_of("output:\n  series: [trajectory, plots]\n") == "run.yaml:2: unknown series 'plots'");
  CHECK(error_of("state:\n  kind: superposition\n").find("superposition needs 'components'") != std::string::npos);
}

TEST_CASE("verify on the ground state passes") {
  const auto dir = scratch("pass");
  write_file(dir / "run.yaml", kBoxVerify);
  CHECK(run_binary("verify " + (dir / "run.yaml").string() + " -o " + (dir / "out").string()) == cli::kExitOk);
  const auto summary = nlohmann::json::parse(read_file(dir / "out" / "summary.json"));
  CHECK(summary["pass"] == true);
  CHECK(summary["metrics"]["report"]["dof"] == 49);
  CHECK(summary.contains("wall_clock_seconds"));
  CHECK(fs::exists(dir / "out" / "histogram.csv"));
  CHECK(fs::exists(dir / "out" / "trajectory.csv"));
}

TEST_CASE("verify against the wrong state exits with the failure code") {
  const auto dir = scratch("fail");
  write_file(dir / "run.yaml", std::string(kBoxVerify) + "verify:\n  target: {kind: box, n: 2}\n");
  CHECK(run_binary("verify " + (dir / "run.yaml").string() + " -o " + (dir / "out").string()) ==
        cli::kExitVerifyFailed);
  const auto summary = nlohmann::json::parse(read_file(dir / "out" / "summary.json"));
  CHECK(summary["pass"] == false);
}

TEST_CASE("validation and I/O failures map to exit codes") {
  const auto dir = scratch("codes");
  CHECK(run_binary("verify " + (dir / "missing.yaml").string()) == cli::kExitInvalid);
  write_file(dir / "bad.yaml", "state:\n  kind: box\n  spin: up\n");
  CHECK(run_binary("synth " + (dir / "bad.yaml").string()) == cli::kExitInvalid);
  write_file(dir / "ok.yaml", "state: {kind: box}\n");
  CHECK(run_binary("dance " + (dir / "ok.yaml").string()) == cli::kExitInvalid);
  CHECK(run_binary("synth") == cli::kExitInvalid);
  write_file(dir / "n0.yaml", "state: {kind: superposition, components: [{n: 1, coeff: 1}, {n: 2, coeff: 1}]}\n");
  CHECK(run_binary("synth " + (dir / "n0.yaml").string() + " -o " + (dir / "o").string()) == cli::kExitInvalid);
  write_file(dir / "blocker", "a file, not a directory");
  CHECK(run_binary("synth " + (dir / "ok.yaml").string() + " -o " + (dir / "blocker" / "out").string()) ==
        cli::kExitIo);
  write_file(dir / "tab.yaml", "state: {kind: tabulated, csv: nowhere.csv}\n");
  CHECK(run_binary("synth " + (dir / "tab.yaml").string() + " -o " + (dir / "t").string()) == cli::kExitIo);
}

TEST_CASE("every command produces its series") {
  const auto dir = scratch("all");
  {
    std::ofstream os(dir / "state.csv");
    os << "# sampled ground state\nx,re,im\n";
    for (int i = 0; i <= 200; ++i) {
      const double x = -0.5 + i / 200.0;
      os << x << ',' << std::sqrt(2.0) * std::cos(M_PI * x) << ",0\n";
    }
  }
  write_file(dir / "box.yaml", "state: {kind: box, n: 2, convention: wall}\nmomentum: {velocities: [0.5, 1.0]}\n");
  write_file(dir / "tab.yaml", "state: {kind: tabulated, csv: state.csv}\n");
  write_file(dir / "mix.yaml",
             "state:\n  kind: superposition\n  normalize: true\n  components: [{n: 1, coeff: 1}, {n: 2, coeff: 1}]\n"
             "bohm: {x0: 0.1, t_end: 0.4}\n");
  const struct {
    const char* command;
    const char* config;
    std::vector<const char*> files;
  } cases[] = {
      {"synth", "box.yaml", {"trajectory.csv"}},
      {"synth", "tab.yaml", {"trajectory.csv"}},
      {"marginal", "mix.yaml", {"marginal.csv", "trajectory.csv"}},
      {"momentum", "box.yaml", {"phi.csv"}},
      {"potential", "box.yaml", {"vbar.csv"}},
      {"potential", "mix.yaml", {"vbar.csv"}},
      {"bohm", "mix.yaml", {"comparison.csv"}},
      {"ensemble", "box.yaml", {"members.csv", "t0.csv"}},
  };
  int k = 0;
  for (const auto& c : cases) {
    const auto out = dir / ("out" + std::to_string(k++));
    CAPTURE(c.command);
    CAPTURE(c.config);
    REQUIRE(run_binary(std::string(c.command) + " " + (dir / c.config).string() + " -o " + out.string()) ==
            cli::kExitOk);
    CHECK(fs::exists(out / "summary.json"));
    for (const auto* f : c.files) {
      CAPTURE(f);
      const auto text = read_file(out / f);
      REQUIRE(!text.empty());
      // every field is a finite decimal or an explicit flag token
      std::istringstream lines(text);
      std::string line;
      std::getline(lines, line);
      while (std::getline(lines, line)) {
        std::istringstream fields(line);
        std::string field;
        while (std::getline(fields, field, ',')) {
          if (field == "inf" || field == "-inf" || field == "singular") continue;
          char* end = nullptr;
          const double v = std::strtod(field.c_str(), &end);
          REQUIRE(end == field.c_str() + field.size());
          REQUIRE(std::isfinite(v));
        }
      }
    }
  }
  // momentum command cannot run on a time-dependent state
  CHECK(run_binary("momentum " + (dir / "mix.yaml").string() + " -o " + (dir / "m").string()) == cli::kExitInvalid);
}

TEST_CASE("identical configs give byte-identical CSVs") {
  const auto dir = scratch("repeat");
  write_file(dir / "run.yaml", std::string(kBoxVerify) + "ensemble: {members: 3, seed: 17}\n");
  for (const char* command : {"verify", "ensemble"}) {
    REQUIRE(run_binary(std::string(command) + " " + (dir / "run.yaml").string() + " -o " + (dir / "a").string()) == 0);
    REQUIRE(run_binary(std::string(command) + " " + (dir / "run.yaml").string() + " -o " + (dir / "b").string()) == 0);
  }
  for (const char* f : {"trajectory.csv", "histogram.csv", "members.csv", "t0.csv"}) {
    CAPTURE(f);
    const auto a = read_file(dir / "a" / f);
    CHECK(!a.empty());
    CHECK(a == read_file(dir / "b" / f));
  }
}
