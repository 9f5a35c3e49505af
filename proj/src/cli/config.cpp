#include <yaml-cpp/yaml.h>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qtraj/cli.hpp"

namespace qtraj::cli {

namespace {

using nlohmann::json;

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    std::ostringstream os;
    os << source_;
    if (at.IsDefined() && at.Mark().line >= 0) os << ':' << at.Mark().line + 1;
    os << ": " << msg;
    throw ConfigError(os.str());
  }

  void expect_map(const YAML::Node& node, const std::string& section) const {
    if (!node.IsMap()) fail(node, "section '" + section + "' must be a mapping");
  }

  void check_keys(const YAML::Node& node, const std::string& section, const std::set<std::string>& allowed) const {
    expect_map(node, section);
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in section '" + section + "'");
    }
  }

  template <class T>
  T scalar(const YAML::Node& node, const std::string& key, const char* what) const {
    if (!node.IsScalar()) fail(node, "'" + key + "' must be " + what);
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, "'" + key + "' must be " + what);
    }
  }

  double number(const YAML::Node& parent, const std::string& key, double fallback) const {
    const auto node = parent[key];
    return node ? scalar<double>(node, key, "a number") : fallback;
  }

  double positive(const YAML::Node& parent, const std::string& key, double fallback) const {
    const double v = number(parent, key, fallback);
    if (!(v > 0.0) || !std::isfinite(v)) fail(parent[key], "'" + key + "' must be a positive number");
    return v;
  }

  std::optional<double> optional_number(const YAML::Node& parent, const std::string& key) const {
    const auto node = parent[key];
    if (!node) return std::nullopt;
    return scalar<double>(node, key, "a number");
  }

  std::size_t count(const YAML::Node& parent, const std::string& key, std::size_t fallback) const {
    const auto node = parent[key];
    if (!node) return fallback;
    const auto v = scalar<long long>(node, key, "a positive integer");
    if (v <= 0) fail(node, "'" + key + "' must be a positive integer");
    return static_cast<std::size_t>(v);
  }

  std::uint64_t seed(const YAML::Node& parent, const std::string& key, std::uint64_t fallback) const {
    const auto node = parent[key];
    return node ? scalar<std::uint64_t>(node, key, "a non-negative integer") : fallback;
  }

  std::string text(const YAML::Node& parent, const std::string& key, const std::string& fallback) const {
    const auto node = parent[key];
    return node ? scalar<std::string>(node, key, "a string") : fallback;
  }

  bool flag(const YAML::Node& parent, const std::string& key, bool fallback) const {
    const auto node = parent[key];
    return node ? scalar<bool>(node, key, "true or false") : fallback;
  }

  std::string choice(const YAML::Node& parent, const std::string& key, const std::string& fallback,
                     const std::set<std::string>& options) const {
    const auto v = text(parent, key, fallback);
    if (!options.count(v)) {
      std::string list;
      for (const auto& o : options) list += (list.empty() ? "" : ", ") + o;
      fail(parent[key], "'" + key + "' must be one of: " + list);
    }
    return v;
  }

  Complex coefficient(const YAML::Node& node) const {
    if (node.IsScalar()) return {scalar<double>(node, "coeff", "a number or [re, im]"), 0.0};
    if (node.IsSequence() && node.size() == 2) {
      return {scalar<double>(node[0], "coeff", "a number or [re, im]"),
              scalar<double>(node[1], "coeff", "a number or [re, im]")};
    }
    fail(node, "'coeff' must be a number or [re, im]");
  }

 private:
  std::string source_;
};

StateSpec read_state(const Reader& r, const YAML::Node& node, const std::string& section,
                     const std::filesystem::path& base_dir) {
  r.check_keys(node, section,
               {"kind", "n", "L", "convention", "grid", "k", "components", "normalize", "csv", "energy"});
  StateSpec s;
  s.kind = r.choice(node, "kind", s.kind, {"box", "superposition", "tabulated", "plane_wave"});
  s.n = static_cast<int>(r.count(node, "n", 1));
  s.L = r.positive(node, "L", s.L);
  s.convention = r.choice(node, "convention", "centered", {"centered", "wall"}) == "wall" ? BoxConvention::wall
                                                                                          : BoxConvention::centered;
  s.grid = r.count(node, "grid", s.grid);
  if (s.grid < kMinGridPoints) r.fail(node["grid"], "'grid' must be at least " + std::to_string(kMinGridPoints));
  s.k = r.number(node, "k", s.k);
  s.normalize = r.flag(node, "normalize", false);
  s.energy = r.optional_number(node, "energy");
  if (const auto comps = node["components"]) {
    if (!comps.IsSequence() || comps.size() == 0) r.fail(comps, "'components' must be a non-empty list");
    for (const auto& c : comps) {
      r.check_keys(c, section + ".components", {"n", "coeff", "energy"});
      ComponentSpec spec;
      spec.n = static_cast<int>(r.count(c, "n", 1));
      if (c["coeff"]) spec.coeff = r.coefficient(c["coeff"]);
      spec.energy = r.optional_number(c, "energy");
      s.components.push_back(spec);
    }
  }
  if (s.kind == "superposition" && s.components.empty()) r.fail(node, "superposition needs 'components'");
  if (s.kind == "tabulated") {
    if (!node["csv"]) r.fail(node, "tabulated state needs 'csv'");
    s.csv = r.text(node, "csv", "");
    if (s.csv.is_relative()) s.csv = base_dir / s.csv;
  }
  return s;
}

json to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Map: {
      json out = json::object();
      for (const auto& kv : node) out[kv.first.as<std::string>()] = to_json(kv.second);
      return out;
    }
    case YAML::NodeType::Sequence: {
      json out = json::array();
      for (const auto& v : node) out.push_back(to_json(v));
      return out;
    }
    case YAML::NodeType::Scalar: {
      const auto s = node.Scalar();
      if (s == "true" || s == "false") return s == "true";
      char* end = nullptr;
      errno = 0;
      const long long i = std::strtoll(s.c_str(), &end, 10);
      if (!s.empty() && end == s.c_str() + s.size() && errno == 0) return i;
      errno = 0;
      const double v = std::strtod(s.c_str(), &end);
      if (!s.empty() && end == s.c_str() + s.size() && errno == 0 && std::isfinite(v)) return v;
      return s;
    }
    default:
      return nullptr;
  }
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << source << ':' << e.mark.line + 1 << ": " << e.msg;
    throw ConfigError(os.str());
  }
  const Reader r(source);
  RunConfig cfg;
  cfg.source = source;
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  r.check_keys(root, "top level",
               {"state", "params", "trajectory", "verify", "marginal", "momentum", "potential", "bohm", "ensemble",
                "output"});
  const auto section = [&](const char* name) {
    const auto node = root[name];
    return node ? node : YAML::Node(YAML::NodeType::Map);
  };

  if (root["state"]) cfg.state = read_state(r, root["state"], "state", base_dir);

  const auto params = section("params");
  r.check_keys(params, "params", {"m", "hbar", "T", "c"});
  cfg.params.m = r.positive(params, "m", cfg.params.m);
  cfg.params.hbar = r.positive(params, "hbar", cfg.params.hbar);
  cfg.params.T = r.positive(params, "T", cfg.params.T);
  cfg.params.c = r.positive(params, "c", cfg.params.c);

  const auto traj = section("trajectory");
  r.check_keys(traj, "trajectory",
               {"mode", "direction", "t0", "t0_seed", "n_samples", "sampling", "seed", "t_begin", "t_end"});
  auto& t = cfg.trajectory;
  t.mode = r.choice(traj, "mode", "single_pass", {"single_pass", "periodic"}) == "periodic" ? Mode::periodic
                                                                                           : Mode::single_pass;
  t.direction = r.choice(traj, "direction", "forward", {"forward", "backward"}) == "backward" ? Direction::backward
                                                                                            : Direction::forward;
  if (traj["t0"] && traj["t0_seed"]) r.fail(traj["t0_seed"], "give either 't0' or 't0_seed', not both");
  t.t0 = r.number(traj, "t0", 0.0);
  if (traj["t0_seed"]) t.t0_seed = r.seed(traj, "t0_seed", 0);
  t.n_samples = r.count(traj, "n_samples", t.n_samples);
  t.sampling = r.choice(traj, "sampling", "uniform_grid", {"uniform_grid", "uniform_random"}) == "uniform_random"
                   ? Sampling::uniform_random
                   : Sampling::uniform_grid;
  t.seed = r.seed(traj, "seed", t.seed);
  t.t_begin = r.number(traj, "t_begin", 0.0);
  t.t_end = r.number(traj, "t_end", 0.0);
  if (t.t_end < t.t_begin) r.fail(traj["t_end"], "'t_end' must not precede 't_begin'");

  const auto ver = section("verify");
  r.check_keys(ver, "verify", {"dx", "l1_random", "l1_grid", "chi2_sigmas", "target"});
  if (ver["dx"]) cfg.verify.dx = r.positive(ver, "dx", 0.02);
  cfg.verify.tolerances.l1_random = r.positive(ver, "l1_random", cfg.verify.tolerances.l1_random);
  cfg.verify.tolerances.l1_grid = r.positive(ver, "l1_grid", cfg.verify.tolerances.l1_grid);
  cfg.verify.tolerances.chi2_sigmas = r.positive(ver, "chi2_sigmas", cfg.verify.tolerances.chi2_sigmas);
  if (ver["target"]) cfg.verify.target = read_state(r, ver["target"], "verify.target", base_dir);

  const auto marg = section("marginal");
  r.check_keys(marg, "marginal", {"t_start", "T_avg", "n_t"});
  cfg.marginal.t_start = r.number(marg, "t_start", 0.0);
  if (marg["T_avg"]) cfg.marginal.t_avg = r.positive(marg, "T_avg", 1.0);
  cfg.marginal.n_t = r.count(marg, "n_t", cfg.marginal.n_t);
  if (cfg.marginal.n_t % 2 == 0 || cfg.marginal.n_t < 9) r.fail(marg["n_t"], "'n_t' must be odd and at least 9");

  const auto mom = section("momentum");
  r.check_keys(mom, "momentum", {"n_mu", "mu_max", "velocities"});
  cfg.momentum.n_mu = r.count(mom, "n_mu", cfg.momentum.n_mu);
  if (cfg.momentum.n_mu < 64) r.fail(mom["n_mu"], "'n_mu' must be at least 64");
  cfg.momentum.mu_max = r.positive(mom, "mu_max", cfg.momentum.mu_max);
  if (const auto vs = mom["velocities"]) {
    if (!vs.IsSequence()) r.fail(vs, "'velocities' must be a list of numbers");
    for (const auto& v : vs) cfg.momentum.velocities.push_back(r.scalar<double>(v, "velocities", "a number"));
  }

  const auto pot = section("potential");
  r.check_keys(pot, "potential", {"cutoff", "h", "residual_floor"});
  cfg.potential.cutoff = r.positive(pot, "cutoff", cfg.potential.cutoff);
  cfg.potential.h = r.positive(pot, "h", cfg.potential.h);
  cfg.potential.residual_floor = r.positive(pot, "residual_floor", cfg.potential.residual_floor);

  const auto bohm = section("bohm");
  r.check_keys(bohm, "bohm", {"x0", "t_start", "t_end", "dt", "cutoff"});
  cfg.bohm.x0 = r.optional_number(bohm, "x0");
  cfg.bohm.t_start = r.number(bohm, "t_start", 0.0);
  cfg.bohm.t_end = r.optional_number(bohm, "t_end");
  cfg.bohm.dt = r.positive(bohm, "dt", cfg.bohm.dt);
  cfg.bohm.cutoff = r.positive(bohm, "cutoff", cfg.bohm.cutoff);

  const auto ens = section("ensemble");
  r.check_keys(ens, "ensemble", {"members", "seed"});
  cfg.ensemble.members = r.count(ens, "members", cfg.ensemble.members);
  cfg.ensemble.seed = r.seed(ens, "seed", cfg.ensemble.seed);

  const auto out = section("output");
  r.check_keys(out, "output", {"directory", "series"});
  cfg.output.directory = r.text(out, "directory", cfg.output.directory.string());
  if (cfg.output.directory.is_relative()) cfg.output.directory = base_dir / cfg.output.directory;
  if (const auto series = out["series"]) {
    static const std::set<std::string> known{"trajectory", "histogram", "marginal", "phi",
                                             "vbar",       "comparison", "members", "t0"};
    if (!series.IsSequence()) r.fail(series, "'series' must be a list");
    for (const auto& s : series) {
      const auto name = r.scalar<std::string>(s, "series", "a series name");
      if (!known.count(name)) r.fail(s, "unknown series '" + name + "'");
      cfg.output.series.push_back(name);
    }
  }

  cfg.echo_json = to_json(root).dump();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string(), path.parent_path());
}

}  // namespace qtraj::cli
