#include "qtraj/bohm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qtraj/errors.hpp"

namespace qtraj {

Current probability_current(const TimeDependentWaveFunction& psi, double x, double t, double mass) {
  if (!psi.domain().interior(x)) {
    std::ostringstream os;
    os << "probability current needs an interior point, got x = " << x;
    throw OutOfDomain(os.str());
  }
  const Complex amp = psi.amplitude(x, t);
  const Complex damp = psi.derivative(x, t);
  const Complex i_hbar_2m{0.0, psi.hbar() / (2.0 * mass)};
  const Complex j = i_hbar_2m * (amp * std::conj(damp) - std::conj(amp) * damp);
  return {j.real(), std::fabs(j.imag())};
}

BohmVelocity bohm_velocity(const TimeDependentWaveFunction& psi, double x, double t, double mass,
                           double node_cutoff) {
  const double p = psi.density(x, t);
  if (p < node_cutoff) return {0.0, true};
  return {probability_current(psi, x, t, mass).value / p, false};
}

BohmTrajectory bohm_trajectory(const TimeDependentWaveFunction& psi, double x0, double t_start, double t_end,
                               double dt, double mass, double node_cutoff) {
  if (!(dt > 0.0)) throw InvalidArgument("Bohm integration step must be positive");
  if (!(t_end > t_start)) throw InvalidArgument("Bohm integration span must have t_end > t_start");
  if (!psi.domain().interior(x0)) throw InvalidArgument("Bohm start position must be interior");
  const BohmVelocity v0 = bohm_velocity(psi, x0, t_start, mass, node_cutoff);
  if (v0.singular) throw InvalidArgument("Bohm start position sits on a node of the wavefunction");

  BohmTrajectory out;
  out.x0 = x0;
  out.dt = dt;
  out.samples.push_back({t_start, x0, v0.value});

  // Velocity field that reports failure instead of throwing mid-step.
  auto field = [&](double t, double x, double& v) {
    if (!psi.domain().interior(x)) return false;
    const BohmVelocity bv = bohm_velocity(psi, x, t, mass, node_cutoff);
    v = bv.value;
    return !bv.singular;
  };

  const auto steps = static_cast<std::size_t>(std::ceil((t_end - t_start) / dt - 1e-9));
  double t = t_start;
  double x = x0;
  double k1 = v0.value;
  for (std::size_t s = 0; s < steps; ++s) {
    const double t_next = (s + 1 == steps) ? t_end : t_start + static_cast<double>(s + 1) * dt;
    const double h = t_next - t;
    double k2 = 0.0;
    double k3 = 0.0;
    double k4 = 0.0;
    double v_next = 0.0;
    const bool ok = field(t + 0.5 * h, x + 0.5 * h * k1, k2) && field(t + 0.5 * h, x + 0.5 * h * k2, k3) &&
                    field(t + h, x + h * k3, k4);
    const double x_next = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!ok || !field(t_next, x_next, v_next)) {
      out.halted = true;
      std::ostringstream os;
      os << "approached a node or the domain edge near t = " << t << ", x = " << x;
      out.halt_reason = os.str();
      break;
    }
    t = t_next;
    x = x_next;
    k1 = v_next;
    out.samples.push_back({t, x, v_next});
  }
  return out;
}

namespace {

double hermite(const BohmSample& a, const BohmSample& b, double t) {
  const double h = b.t - a.t;
  const double s = (t - a.t) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2.0 * s3 - 3.0 * s2 + 1.0) * a.x + (s3 - 2.0 * s2 + s) * h * a.v + (-2.0 * s3 + 3.0 * s2) * b.x +
         (s3 - s2) * h * b.v;
}

double hermite_slope(const BohmSample& a, const BohmSample& b, double t) {
  const double h = b.t - a.t;
  const double s = (t - a.t) / h;
  const double s2 = s * s;
  return (6.0 * s2 - 6.0 * s) / h * a.x + (3.0 * s2 - 4.0 * s + 1.0) * a.v + (-6.0 * s2 + 6.0 * s) / h * b.x +
         (3.0 * s2 - 2.0 * s) * b.v;
}

}  // namespace

DivergenceReport compare(const Trajectory& classical, const BohmTrajectory& bohm) {
  if (classical.samples.empty() || bohm.samples.empty()) throw InvalidArgument("cannot compare empty trajectories");
  DivergenceReport out;
  out.t_begin = std::max(classical.samples.front().t, bohm.samples.front().t);
  out.t_end = std::min(classical.samples.back().t, bohm.samples.back().t);
  if (out.t_begin > out.t_end) throw InvalidArgument("trajectory time spans do not overlap");

  const auto& bs = bohm.samples;
  double total = 0.0;
  for (const auto& f : classical.samples) {
    if (f.t < out.t_begin || f.t > out.t_end) continue;
    double xb = bs.front().x;
    double vb = bs.front().v;
    if (bs.size() > 1) {
      auto it = std::upper_bound(bs.begin(), bs.end(), f.t, [](double t, const BohmSample& s) { return t < s.t; });
      std::size_t k = it == bs.begin() ? 0 : static_cast<std::size_t>(it - bs.begin()) - 1;
      k = std::min(k, bs.size() - 2);
      xb = hermite(bs[k], bs[k + 1], f.t);
      vb = hermite_slope(bs[k], bs[k + 1], f.t);
    }
    const double gap = std::fabs(f.x - xb);
    out.rows.push_back({f.t, f.x, xb, gap, f.v, vb});
    out.max_gap = std::max(out.max_gap, gap);
    total += gap;
  }
  if (!out.rows.empty()) out.mean_gap = total / static_cast<double>(out.rows.size());
  return out;
}

}  // namespace qtraj
