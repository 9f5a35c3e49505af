#pragma once

#include <cstddef>
#include <vector>

#include "qtraj/grid.hpp"
#include "qtraj/trajectory.hpp"
#include "qtraj/wavefunction.hpp"

namespace qtraj {

inline constexpr std::size_t kDefaultTimePoints = 257;

/// Time-averaged position density p_X(x) = (1/T_avg) * integral of
/// |Psi(x,t)|^2 over [t_start, t_start + T_avg], tabulated on the grid.
struct MarginalDensity {
  GridDomain domain;
  std::vector<double> values;
  double t_start = 0.0;
  double t_avg = 1.0;

  /// Point evaluator interpolates the table (monotone cubic, clamped at 0);
  /// the node table is passed through untouched.
  Density as_density() const;
  double operator()(double x) const;
};

/// n_t must be odd and >= 9; the result is renormalized in x.
MarginalDensity time_marginal(const TimeDependentWaveFunction& psi, double t_start, double t_avg,
                              std::size_t n_t = kDefaultTimePoints);

/// Wraps a stationary |psi|^2 node table as a marginal (no quadrature).
MarginalDensity stationary_marginal(const WaveFunction& wf);

Trajectory trajectory_from_marginal(const MarginalDensity& p, const PhysicalParams& params,
                                    const SamplingOptions& options);

}  // namespace qtraj
