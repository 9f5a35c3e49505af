#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "qtraj/bohm.hpp"
#include "qtraj/nonstationary.hpp"
#include "qtraj/observables.hpp"
#include "qtraj/trajectory.hpp"
#include "qtraj/verify.hpp"

namespace qtraj::csv {

/// Decimal, 12 significant digits. Infinities print as "inf" / "-inf" and
/// NaN as "singular", so no field is ever a silent NaN.
std::string number(double v);

void write_trajectory(std::ostream& os, const Trajectory& traj, int member_id = 0, bool header = true);
void write_ensemble(std::ostream& os, const Ensemble& ens);
void write_t0(std::ostream& os, const Ensemble& ens);
void write_marginal(std::ostream& os, const MarginalDensity& p);
void write_momentum(std::ostream& os, const MomentumAmplitude& phi);
void write_potential(std::ostream& os, const EffectivePotentialTable& vbar);
void write_comparison(std::ostream& os, const DivergenceReport& report);
void write_histogram(std::ostream& os, const Histogram& h, const DensityFunction& target);

/// Columns x, re, im; '#' comment lines and a non-numeric header are skipped.
struct Samples {
  std::vector<double> x;
  std::vector<Complex> values;
};
Samples read_state_samples(std::istream& is, const std::string& source);

}  // namespace qtraj::csv
