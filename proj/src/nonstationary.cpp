#include "qtraj/nonstationary.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "qtraj/errors.hpp"
#include "qtraj/interpolation.hpp"

namespace qtraj {

Density MarginalDensity::as_density() const {
  auto fit = std::make_shared<const MonotoneCubic>(domain.nodes(), values);
  return Density(
      domain, [fit](double x) { return std::max(0.0, (*fit)(x)); }, values, "time marginal");
}

double MarginalDensity::operator()(double x) const { return as_density()(x); }

MarginalDensity time_marginal(const TimeDependentWaveFunction& psi, double t_start, double t_avg,
                              std::size_t n_t) {
  if (!(t_avg > 0.0) || !std::isfinite(t_avg)) throw InvalidArgument("averaging window T_avg must be positive");
  if (n_t < 9 || n_t % 2 == 0) {
    throw InvalidArgument("time quadrature needs an odd point count >= 9, got " + std::to_string(n_t));
  }
  const GridDomain& dom = psi.domain();
  const double ht = t_avg / static_cast<double>(n_t - 1);

  // Per-component node amplitudes and time phases, reused across x.
  const auto comps = psi.components();
  std::vector<std::vector<Complex>> amp(comps.size());
  for (std::size_t c = 0; c < comps.size(); ++c) amp[c] = comps[c].state.amplitude_nodes();
  std::vector<std::vector<Complex>> phase(comps.size(), std::vector<Complex>(n_t));
  for (std::size_t c = 0; c < comps.size(); ++c) {
    for (std::size_t k = 0; k < n_t; ++k) {
      const double t = t_start + ht * static_cast<double>(k);
      phase[c][k] = comps[c].coefficient * std::polar(1.0, -comps[c].energy * t / psi.hbar());
    }
  }

  MarginalDensity out{dom, std::vector<double>(dom.size()), t_start, t_avg};
  std::vector<double> in_time(n_t);
  for (std::size_t i = 0; i < dom.size(); ++i) {
    for (std::size_t k = 0; k < n_t; ++k) {
      Complex sum{0.0, 0.0};
      for (std::size_t c = 0; c < comps.size(); ++c) sum += phase[c][k] * amp[c][i];
      in_time[k] = std::norm(sum);
    }
    out.values[i] = std::max(0.0, simpson(in_time, ht) / t_avg);
  }
  const double norm = simpson(out.values, dom.spacing());
  if (!(norm > 0.0)) throw InvalidArgument("time marginal integrates to zero");
  for (double& v : out.values) v /= norm;
  return out;
}

MarginalDensity stationary_marginal(const WaveFunction& wf) {
  const auto nodes = wf.density_nodes();
  return MarginalDensity{wf.domain(), std::vector<double>(nodes.begin(), nodes.end()), 0.0, 1.0};
}

Trajectory trajectory_from_marginal(const MarginalDensity& p, const PhysicalParams& params,
                                    const SamplingOptions& options) {
  return sample_trajectory(p.as_density(), params, options);
}

}  // namespace qtraj
