#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "qtraj/bohm.hpp"
#include "qtraj/cli.hpp"
#include "qtraj/csv.hpp"
#include "qtraj/nonstationary.hpp"
#include "qtraj/observables.hpp"

namespace qtraj::cli {

namespace {

using nlohmann::json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json num(double v) {
  if (std::isfinite(v)) return v;
  return csv::number(v);
}

const char* flag_name(PdfFlag f) {
  switch (f) {
    case PdfFlag::finite:
      return "finite";
    case PdfFlag::singular:
      return "singular";
    case PdfFlag::no_preimage:
      return "no_preimage";
  }
  return "finite";
}

struct BuiltState {
  std::optional<WaveFunction> wf;  // set for stationary kinds
  TimeDependentWaveFunction psi;
  std::string label;
};

BuiltState build_state(const StateSpec& s, const PhysicalParams& params) {
  const auto stationary = [&](WaveFunction wf, double energy) {
    auto psi = superposition({wf}, {Complex{1.0, 0.0}}, {energy}, params.hbar);
    const auto label = wf.label();
    return BuiltState{std::move(wf), std::move(psi), label};
  };
  if (s.kind == "box") {
    return stationary(box_eigenstate(s.n, s.L, s.convention, s.grid), s.energy.value_or(box_energy(s.n, s.L, params)));
  }
  if (s.kind == "plane_wave") {
    const double e = params.hbar * params.hbar * s.k * s.k / (2.0 * params.m);
    return stationary(plane_wave(s.k, s.L, s.grid), s.energy.value_or(e));
  }
  if (s.kind == "tabulated") {
    std::ifstream in(s.csv);
    if (!in) throw IoError(s.csv.string() + ": cannot open state samples");
    auto samples = csv::read_state_samples(in, s.csv.string());
    return stationary(tabulated(std::move(samples.x), std::move(samples.values), s.csv.filename().string()),
                      s.energy.value_or(0.0));
  }
  std::vector<WaveFunction> states;
  std::vector<Complex> coeffs;
  std::vector<double> energies;
  double norm = 0.0;
  for (const auto& c : s.components) norm += std::norm(c.coeff);
  for (const auto& c : s.components) {
    states.push_back(box_eigenstate(c.n, s.L, s.convention, s.grid));
    coeffs.push_back(s.normalize ? c.coeff / std::sqrt(norm) : c.coeff);
    energies.push_back(c.energy.value_or(box_energy(c.n, s.L, params)));
  }
  auto psi = superposition(std::move(states), std::move(coeffs), std::move(energies), params.hbar);
  std::string label = "superposition";
  for (const auto& c : s.components) label += " n=" + std::to_string(c.n);
  return BuiltState{std::nullopt, std::move(psi), label};
}

MarginalDensity marginal_of(const BuiltState& st, const RunConfig& cfg) {
  if (st.wf) return stationary_marginal(*st.wf);
  return time_marginal(st.psi, cfg.marginal.t_start, cfg.marginal.t_avg.value_or(cfg.params.T), cfg.marginal.n_t);
}

Density density_of(const BuiltState& st, const RunConfig& cfg) {
  if (st.wf) return Density(*st.wf);
  return marginal_of(st, cfg).as_density();
}

SamplingOptions sampling_of(const RunConfig& cfg) {
  const auto& t = cfg.trajectory;
  SamplingOptions o;
  o.n = t.n_samples;
  o.sampling = t.sampling;
  o.seed = t.seed;
  o.direction = t.direction;
  o.mode = t.mode;
  o.t_begin = t.t_begin;
  o.t_end = t.t_end;
  o.t0 = t.t0;
  if (t.t0_seed) {
    std::mt19937_64 rng(*t.t0_seed);
    o.t0 = cfg.params.T * unit_uniform(rng());
  }
  return o;
}

json trajectory_summary(const Trajectory& traj) {
  return {{"n_samples", traj.samples.size()},
          {"period", traj.period},
          {"t0", traj.t0},
          {"mode", traj.mode == Mode::periodic ? "periodic" : "single_pass"},
          {"direction", traj.direction == Direction::forward ? "forward" : "backward"},
          {"sampling", traj.sampling == Sampling::uniform_random ? "uniform_random" : "uniform_grid"}};
}

json report_summary(const MatchReport& r) {
  return {{"dx", r.dx},           {"n_samples", r.n_samples}, {"l1", num(r.l1)},
          {"l1_tolerance", r.l1_tolerance}, {"chi2", num(r.chi2)},   {"dof", r.dof},
          {"chi2_low", r.chi2_low}, {"chi2_high", r.chi2_high}, {"l1_pass", r.l1_pass},
          {"chi2_pass", r.chi2_pass}, {"pass", r.pass}};
}

class Outputs {
 public:
  explicit Outputs(const OutputSpec& spec) : spec_(spec) {
    std::error_code ec;
    std::filesystem::create_directories(spec_.directory, ec);
    if (ec) throw IoError(spec_.directory.string() + ": cannot create output directory: " + ec.message());
  }

  bool wants(const std::string& series) const {
    return spec_.series.empty() || std::find(spec_.series.begin(), spec_.series.end(), series) != spec_.series.end();
  }

  template <class Fn>
  void write(const std::string& series, const std::string& file, Fn&& fn) {
    if (!wants(series)) return;
    const auto path = spec_.directory / file;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError(path.string() + ": cannot open for writing");
    fn(os);
    os.flush();
    if (!os) throw IoError(path.string() + ": write failed");
    written_.push_back(file);
  }

  void summary(const json& doc) {
    const auto path = spec_.directory / "summary.json";
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError(path.string() + ": cannot open for writing");
    os << doc.dump(2) << '\n';
    if (!os) throw IoError(path.string() + ": write failed");
  }

  const std::vector<std::string>& written() const { return written_; }

 private:
  OutputSpec spec_;
  std::vector<std::string> written_;
};

struct Outcome {
  json metrics = json::object();
  bool pass = true;
};

Outcome cmd_synth(const RunConfig& cfg, const BuiltState& st, Outputs& out) {
  const auto density = density_of(st, cfg);
  const auto traj = sample_trajectory(density, cfg.params, sampling_of(cfg));
  out.write("trajectory", "trajectory.csv", [&](std::ostream& os) { csv::write_trajectory(os, traj); });
  const auto region = superluminal_measure(density, cfg.params);
  Outcome o;
  o.metrics["trajectory"] = trajectory_summary(traj);
  o.metrics["superluminal"] = {{"c", cfg.params.c},
                               {"measure", region.total_measure},
                               {"intervals", region.intervals.size()}};
  return o;
}

Outcome cmd_verify(const RunConfig& cfg, const BuiltState& st, Outputs& out) {
  const auto density = density_of(st, cfg);
  const auto traj = sample_trajectory(density, cfg.params, sampling_of(cfg));
  DensityFunction target = density;
  std::string target_label = st.label;
  if (cfg.verify.target) {
    const auto tst = build_state(*cfg.verify.target, cfg.params);
    target = density_of(tst, cfg);
    target_label = tst.label;
  }
  const double dx = cfg.verify.dx.value_or(0.02 * density.domain().length());
  const auto report = pdf_match_report(traj, density.domain(), target, dx, cfg.verify.tolerances);
  out.write("trajectory", "trajectory.csv", [&](std::ostream& os) { csv::write_trajectory(os, traj); });
  out.write("histogram", "histogram.csv", [&](std::ostream& os) { csv::write_histogram(os, report.histogram, target); });
  Outcome o;
  o.metrics["trajectory"] = trajectory_summary(traj);
  o.metrics["target"] = target_label;
  o.metrics["report"] = report_summary(report);
  o.pass = report.pass;
  return o;
}

Outcome cmd_marginal(const RunConfig& cfg, const BuiltState& st, Outputs& out) {
  const auto p = marginal_of(st, cfg);
  const auto traj = trajectory_from_marginal(p, cfg.params, sampling_of(cfg));
  out.write("marginal", "marginal.csv", [&](std::ostream& os) { csv::write_marginal(os, p); });
  out.write("trajectory", "trajectory.csv", [&](std::ostream& os) { csv::write_trajectory(os, traj); });
  Outcome o;
  o.metrics["marginal"] = {{"t_start", p.t_start},
                           {"T_avg", p.t_avg},
                           {"n_t", st.wf ? 0 : cfg.marginal.n_t},
                           {"normalization", simpson(p.values, p.domain.spacing())}};
  o.metrics["trajectory"] = trajectory_summary(traj);
  return o;
}

const WaveFunction& require_stationary(const BuiltState& st, const std::string& command) {
  if (!st.wf) throw ConfigError(command + " needs a stationary state (box, plane_wave or tabulated)");
  return *st.wf;
}

Outcome cmd_momentum(const RunConfig& cfg, const BuiltState& st, Outputs& out) {
  const auto& wf = require_stationary(st, "momentum");
  const auto phi = momentum_amplitude(wf, cfg.momentum.n_mu, cfg.momentum.mu_max, cfg.params.hbar);
  const auto u = uncertainty_product(wf, phi);
  out.write("phi", "phi.csv", [&](std::ostream& os) { csv::write_momentum(os, phi); });
  Outcome o;
  o.metrics["uncertainty"] = {{"dx", num(u.dx)}, {"dmu", num(u.dmu)}, {"product", num(u.product)}};
  o.metrics["momentum"] = {{"n_mu", phi.mu.size()},
                           {"mu_max", cfg.momentum.mu_max},
                           {"captured_mass", phi.captured_mass},
                           {"truncated", phi.truncated},
                           {"dmu_operator", num(momentum_spread_operator(wf, cfg.params.hbar))},
                           {"phase_roundtrip", num(phase_roundtrip(wf, phi))}};
  json pdf = json::array();
  for (double v : cfg.momentum.velocities) {
    const auto r = classical_velocity_pdf(wf, v, cfg.params);
    pdf.push_back({{"v", v},
                   {"flag", flag_name(r.flag)},
                   {"value", r.flag == PdfFlag::finite ? num(r.value) : json(flag_name(r.flag))},
                   {"preimages", r.preimages}});
  }
  o.metrics["velocity_pdf"] = pdf;
  return o;
}

Outcome cmd_potential(const RunConfig& cfg, const BuiltState& st, Outputs& out) {
  Outcome o;
  EffectivePotentialTable table = st.wf ? effective_potential(*st.wf, cfg.params, cfg.potential.cutoff)
                                        : effective_potential_marginal(marginal_of(st, cfg), cfg.params,
                                                                       cfg.potential.cutoff);
  out.write("vbar", "vbar.csv", [&](std::ostream& os) { csv::write_potential(os, table); });
  std::size_t bounded = 0;
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < table.values.size(); ++i) {
    if (!table.bounded(i)) continue;
    ++bounded;
    top = std::max(top, table.values[i]);
  }
  o.metrics["potential"] = {{"cutoff", table.cutoff_density}, {"bounded_nodes", bounded}, {"max", num(top)}};
  if (!st.wf) {
    o.metrics["newton"] = "not applicable to a time-averaged density";
    return o;
  }
  std::vector<double> rel;
  double worst = 0.0;
  const auto& dom = st.wf->domain();
  for (std::size_t i = 0; i < dom.size(); ++i) {
    const double x = dom.node(i);
    if (st.wf->density(x) <= cfg.potential.residual_floor) continue;
    const auto r = newton_residual(*st.wf, cfg.params, x, cfg.potential.h, cfg.potential.cutoff);
    if (!r.evaluable) continue;
    rel.push_back(r.relative());
    worst = std::max(worst, r.relative());
  }
  json newton = {{"h", cfg.potential.h}, {"residual_floor", cfg.potential.residual_floor}, {"evaluated", rel.size()}};
  if (!rel.empty()) {
    std::nth_element(rel.begin(), rel.begin() + static_cast<std::ptrdiff_t>(rel.size() / 2), rel.end());
    newton["median_relative"] = num(rel[rel.size() / 2]);
    newton["max_relative"] = num(worst);
  }
  o.metrics["newton"] = newton;
  return o;
}

Outcome cmd_bohm(const RunConfig& cfg, const BuiltState& st, Outputs& out) {
  const auto density = density_of(st, cfg);
  const auto classical = sample_trajectory(density, cfg.params, sampling_of(cfg));
  const auto& dom = density.domain();
  const double x0 = cfg.bohm.x0.value_or(0.5 * (dom.x_min() + dom.x_max()));
  const double t_end = cfg.bohm.t_end.value_or(cfg.bohm.t_start + cfg.params.T);
  const auto bohm = bohm_trajectory(st.psi, x0, cfg.bohm.t_start, t_end, cfg.bohm.dt, cfg.params.m, cfg.bohm.cutoff);
  const auto report = compare(classical, bohm);
  out.write("comparison", "comparison.csv", [&](std::ostream& os) { csv::write_comparison(os, report); });
  Outcome o;
  o.metrics["classical"] = trajectory_summary(classical);
  o.metrics["bohm"] = {{"x0", x0},
                       {"t_start", cfg.bohm.t_start},
                       {"t_end", t_end},
                       {"dt", cfg.bohm.dt},
                       {"samples", bohm.samples.size()},
                       {"halted", bohm.halted},
                       {"halt_reason", bohm.halt_reason}};
  o.metrics["divergence"] = {{"max_gap", num(report.max_gap)},
                             {"mean_gap", num(report.mean_gap)},
                             {"t_begin", report.t_begin},
                             {"t_end", report.t_end}};
  return o;
}

Outcome cmd_ensemble(const RunConfig& cfg, const BuiltState& st, Outputs& out) {
  const auto density = density_of(st, cfg);
  const auto ens = ensemble(density, cfg.params, cfg.ensemble.members, cfg.ensemble.seed, sampling_of(cfg));
  out.write("members", "members.csv", [&](std::ostream& os) { csv::write_ensemble(os, ens); });
  out.write("t0", "t0.csv", [&](std::ostream& os) { csv::write_t0(os, ens); });
  Outcome o;
  o.metrics["ensemble"] = {{"members", ens.members.size()}, {"seed", cfg.ensemble.seed}, {"t0", ens.t0}};
  return o;
}

}  // namespace

int run(const std::string& command, const RunConfig& cfg, std::ostream& err) {
  const auto started = std::chrono::steady_clock::now();
  try {
    Outcome (*fn)(const RunConfig&, const BuiltState&, Outputs&) = nullptr;
    if (command == "synth") fn = cmd_synth;
    if (command == "verify") fn = cmd_verify;
    if (command == "marginal") fn = cmd_marginal;
    if (command == "momentum") fn = cmd_momentum;
    if (command == "potential") fn = cmd_potential;
    if (command == "bohm") fn = cmd_bohm;
    if (command == "ensemble") fn = cmd_ensemble;
    if (!fn) throw ConfigError("unknown command '" + command + "'");

    cfg.params.validate();
    const auto st = build_state(cfg.state, cfg.params);
    Outputs out(cfg.output);
    const Outcome o = fn(cfg, st, out);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
    json doc = {{"command", command},
                {"config", json::parse(cfg.echo_json)},
                {"state", st.label},
                {"params", {{"m", cfg.params.m}, {"hbar", cfg.params.hbar}, {"T", cfg.params.T}, {"c", cfg.params.c}}},
                {"metrics", o.metrics},
                {"outputs", out.written()},
                {"pass", o.pass},
                {"wall_clock_seconds", elapsed.count()}};
    out.summary(doc);
    if (!o.pass) {
      err << "verification failed; see " << (cfg.output.directory / "summary.json").string() << '\n';
      return kExitVerifyFailed;
    }
    return kExitOk;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}

int run(const std::string& command, const std::filesystem::path& config_path,
        const std::optional<std::filesystem::path>& output_override, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  if (output_override) cfg.output.directory = *output_override;
  return run(command, cfg, err);
}

}  // namespace qtraj::cli
