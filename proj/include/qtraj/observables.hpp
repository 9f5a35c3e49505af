#pragma once

#include <cstddef>
#include <vector>

#include "qtraj/grid.hpp"
#include "qtraj/nonstationary.hpp"
#include "qtraj/wavefunction.hpp"

namespace qtraj {

inline constexpr std::size_t kDefaultMomentumPoints = 1024;
inline constexpr double kDefaultMomentumMax = 40.0;
inline constexpr double kDefaultPotentialCutoff = 1e-4;

/// Phi(mu) on a grid symmetric about mu = 0, renormalized to unit mass.
struct MomentumAmplitude {
  std::vector<double> mu;
  std::vector<Complex> values;
  double hbar = 1.0;
  double captured_mass = 1.0;  // integral of |Phi|^2 before renormalization
  bool truncated = false;      // captured_mass < 0.999

  double spacing() const { return mu[1] - mu[0]; }
};

/// Phi(mu) = (2 pi hbar)^{-1/2} * integral psi(x) exp(-i mu x / hbar) dx,
/// by composite Simpson on the position grid, mu in [-mu_max, mu_max].
MomentumAmplitude momentum_amplitude(const WaveFunction& wf, std::size_t n_mu = kDefaultMomentumPoints,
                                     double mu_max = kDefaultMomentumMax, double hbar = 1.0);

struct Uncertainty {
  double dx = 0.0;
  double dmu = 0.0;
  double product = 0.0;
};

/// Standard deviations of x under |psi|^2 and of mu under |Phi|^2.
Uncertainty uncertainty_product(const WaveFunction& wf, const MomentumAmplitude& phi);

/// Momentum spread from the position-space operator -i hbar d/dx. Free of
/// momentum-window truncation; used as a cross-check.
double momentum_spread_operator(const WaveFunction& wf, double hbar = 1.0);

enum class PdfFlag { finite, singular, no_preimage };

struct VelocityPdf {
  double value = 0.0;
  PdfFlag flag = PdfFlag::finite;
  std::vector<double> preimages;
};

/// |psi|^3 / (2 |v d|psi|/dx|) summed over every x with 1/(T|psi(x)|^2) = v.
/// Flags a stationary point of |psi| (or v = 0) as singular and a speed
/// the trajectory never attains as no-preimage.
VelocityPdf classical_velocity_pdf(const WaveFunction& wf, double v, const PhysicalParams& params);

/// V(x) = -m / (2 T^2) * p(x)^-2 on the grid; entries with p below the
/// cutoff are -infinity (unbounded).
struct EffectivePotentialTable {
  GridDomain domain;
  std::vector<double> values;
  double cutoff_density = kDefaultPotentialCutoff;

  bool bounded(std::size_t i) const;
};

/// -m / (2 T^2) / p^2 for one density value; the single formula behind both
/// the stationary and the time-marginal tables.
double effective_potential_value(double density, const PhysicalParams& params);

EffectivePotentialTable effective_potential(const WaveFunction& wf, const PhysicalParams& params,
                                            double cutoff_density = kDefaultPotentialCutoff);
EffectivePotentialTable effective_potential_marginal(const MarginalDensity& p, const PhysicalParams& params,
                                                     double cutoff_density = kDefaultPotentialCutoff);

struct NewtonResidual {
  bool evaluable = false;
  double force = 0.0;         // -dV/dx by centered difference
  double mass_accel = 0.0;    // m dv/dt from the chain rule
  double residual = 0.0;      // |force - mass_accel|

  double relative() const;
};

/// Newton's second law check at x: the centered difference of the
/// effective potential against m dv/dt = -2m/(T^2 |psi|^5) d|psi|/dx.
NewtonResidual newton_residual(const WaveFunction& wf, const PhysicalParams& params, double x, double h,
                               double cutoff_density = kDefaultPotentialCutoff);

/// Inverse transform of Phi back onto the position grid, aligned to psi by
/// the least-squares global phase; returns the sup-norm deviation.
double phase_roundtrip(const WaveFunction& wf, const MomentumAmplitude& phi);

/// psi reconstructed from Phi on the position grid (no phase alignment).
std::vector<Complex> inverse_momentum_transform(const MomentumAmplitude& phi, const GridDomain& domain);

}  // namespace qtraj
