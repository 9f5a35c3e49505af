#pragma once

#include <string>
#include <vector>

#include "qtraj/trajectory.hpp"
#include "qtraj/wavefunction.hpp"

namespace qtraj {

inline constexpr double kBohmNodeCutoff = 1e-6;

struct Current {
  double value = 0.0;         // j(x, t), 1/time
  double imag_residue = 0.0;  // |Im| of the literal complex expression
};

/// j = (i hbar / 2m) [Psi dPsi*/dx - Psi* dPsi/dx] at an interior x.
/// Uses the state's analytic derivative for catalog states and the
/// interpolant's derivative for tabulated ones.
Current probability_current(const TimeDependentWaveFunction& psi, double x, double t, double mass = 1.0);

struct BohmVelocity {
  double value = 0.0;
  bool singular = false;
};

/// j / |Psi|^2; singular where |Psi|^2 < node_cutoff.
BohmVelocity bohm_velocity(const TimeDependentWaveFunction& psi, double x, double t, double mass = 1.0,
                           double node_cutoff = kBohmNodeCutoff);

struct BohmSample {
  double t;
  double x;
  double v;
};

struct BohmTrajectory {
  std::vector<BohmSample> samples;
  double x0 = 0.0;
  double dt = 0.0;
  bool halted = false;  // stopped early near a node or at the domain edge
  std::string halt_reason;
};

/// Classic RK4 on dx/dt = j/|Psi|^2 from (t_start, x0) to t_end. The last
/// step is shortened to land on t_end.
BohmTrajectory bohm_trajectory(const TimeDependentWaveFunction& psi, double x0, double t_start, double t_end,
                               double dt, double mass = 1.0, double node_cutoff = kBohmNodeCutoff);

struct ComparisonRow {
  double t;
  double x_classical;
  double x_bohm;
  double gap;
  double v_classical;
  double v_bohm;
};

struct DivergenceReport {
  double max_gap = 0.0;
  double mean_gap = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;
  std::vector<ComparisonRow> rows;
};

/// Gap |x_F(t) - x_B(t)| at every classical sample time inside the overlap
/// of the two time spans; the Bohm path is interpolated by cubic Hermite
/// using its velocities.
DivergenceReport compare(const Trajectory& classical, const BohmTrajectory& bohm);

}  // namespace qtraj
