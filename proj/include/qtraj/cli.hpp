#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qtraj/errors.hpp"
#include "qtraj/trajectory.hpp"
#include "qtraj/verify.hpp"
#include "qtraj/wavefunction.hpp"

namespace qtraj::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitVerifyFailed = 3;

/// Config problems. what() is "<file>:<line>: <message>" when a line is known.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct ComponentSpec {
  int n = 1;
  Complex coeff{1.0, 0.0};
  std::optional<double> energy;  // defaults to the box energy of level n
};

struct StateSpec {
  std::string kind = "box";  // box | superposition | tabulated | plane_wave
  int n = 1;
  double L = 1.0;
  BoxConvention convention = BoxConvention::centered;
  std::size_t grid = kDefaultGridPoints;
  double k = 6.283185307179586;
  std::vector<ComponentSpec> components;
  bool normalize = false;
  std::filesystem::path csv;  // resolved against the config file's directory
  std::optional<double> energy;  // plane_wave / tabulated energy for time evolution
};

struct TrajectorySpec {
  Mode mode = Mode::single_pass;
  Direction direction = Direction::forward;
  double t0 = 0.0;
  std::optional<std::uint64_t> t0_seed;
  std::size_t n_samples = 1001;
  Sampling sampling = Sampling::uniform_grid;
  std::uint64_t seed = 1;
  double t_begin = 0.0;
  double t_end = 0.0;
};

struct VerifySpec {
  std::optional<double> dx;  // default 0.02 of the domain length
  MatchTolerances tolerances;
  std::optional<StateSpec> target;
};

struct MarginalSpec {
  double t_start = 0.0;
  std::optional<double> t_avg;  // default params.T
  std::size_t n_t = 257;
};

struct MomentumSpec {
  std::size_t n_mu = 1024;
  double mu_max = 40.0;
  std::vector<double> velocities;  // classical velocity pdf probes
};

struct PotentialSpec {
  double cutoff = 1e-4;
  double h = 1e-4;
  double residual_floor = 0.05;  // Newton check where |psi|^2 exceeds this
};

struct BohmSpec {
  std::optional<double> x0;  // default domain centre
  double t_start = 0.0;
  std::optional<double> t_end;  // default params.T
  double dt = 1e-3;
  double cutoff = 1e-6;
};

struct EnsembleSpec {
  std::size_t members = 8;
  std::uint64_t seed = 1;
};

struct OutputSpec {
  std::filesystem::path directory = "qtraj-out";
  std::vector<std::string> series;  // empty: everything the command produces
};

struct RunConfig {
  std::string source;
  StateSpec state;
  PhysicalParams params;
  TrajectorySpec trajectory;
  VerifySpec verify;
  MarginalSpec marginal;
  MomentumSpec momentum;
  PotentialSpec potential;
  BohmSpec bohm;
  EnsembleSpec ensemble;
  OutputSpec output;
  std::string echo_json;  // the parsed document, re-serialized
};

/// YAML text to RunConfig. Unknown keys and bad values throw ConfigError.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>",
                       const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"synth", "verify", "marginal", "momentum", "potential", "bohm",
                                              "ensemble"};
  return names;
}

/// Runs one command and writes its CSV series plus summary.json into the
/// output directory. Returns an exit code; diagnostics go to err.
int run(const std::string& command, const RunConfig& config, std::ostream& err);
int run(const std::string& command, const std::filesystem::path& config_path,
        const std::optional<std::filesystem::path>& output_override, std::ostream& err);

}  // namespace qtraj::cli
