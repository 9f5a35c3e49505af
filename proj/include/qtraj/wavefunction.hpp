#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qtraj/grid.hpp"

namespace qtraj {

using Complex = std::complex<double>;

/// Mass, reduced Planck constant, traversal period and speed cap.
/// Natural units by default.
struct PhysicalParams {
  double m = 1.0;
  double hbar = 1.0;
  double T = 1.0;
  double c = 10.0;

  void validate() const;
};

enum class BoxConvention { centered, wall };

/// Normalized stationary amplitude psi(x) on a grid domain.
///
/// The amplitude is held as a raw model plus a normalization scale and a
/// unit global phase. The density ignores the global phase entirely, so
/// multiplying by a constant phase leaves every density-derived table
/// bitwise unchanged. Copies share the underlying model.
class WaveFunction {
 public:
  using Amplitude = std::function<Complex(double)>;

  enum class DerivativeKind { analytic, interpolated };

  /// Normalizes the model by composite Simpson on the domain grid.
  /// Throws InvalidArgument for zero, non-finite or unnormalizable input.
  WaveFunction(GridDomain domain, Amplitude amplitude, Amplitude derivative, std::string label,
               DerivativeKind kind = DerivativeKind::analytic);

  const GridDomain& domain() const;
  const std::string& label() const;
  DerivativeKind derivative_kind() const;

  /// psi(x); throws OutOfDomain outside [x_min, x_max].
  Complex amplitude(double x) const;
  /// d psi / dx.
  Complex derivative(double x) const;
  /// |psi(x)|^2.
  double density(double x) const;
  /// |psi|^2 at the grid nodes.
  std::span<const double> density_nodes() const;
  /// psi at the grid nodes (global phase applied).
  std::vector<Complex> amplitude_nodes() const;

  WaveFunction with_global_phase(double theta) const;

 private:
  struct Model;
  WaveFunction(std::shared_ptr<const Model> model, Complex phase);
  void check(double x) const;

  std::shared_ptr<const Model> model_;
  Complex phase_{1.0, 0.0};
};

/// Non-negative density on a grid domain: the object the trajectory
/// engine consumes. Built from a WaveFunction (|psi|^2) or a tabulated
/// marginal. Node values are kept alongside the point evaluator.
class Density {
 public:
  Density(GridDomain domain, std::function<double(double)> evaluate, std::vector<double> nodes,
          std::string label);
  // Implicit: any state can be handed to the trajectory engine directly.
  Density(const WaveFunction& wf);  // NOLINT(google-explicit-constructor)

  double operator()(double x) const;
  const GridDomain& domain() const { return domain_; }
  std::span<const double> nodes() const { return *nodes_; }
  const std::string& label() const { return label_; }

 private:
  GridDomain domain_;
  std::function<double(double)> evaluate_;
  std::shared_ptr<const std::vector<double>> nodes_;
  std::string label_;
};

/// One term c_n psi_n(x) exp(-i E_n t / hbar).
struct Component {
  WaveFunction state;
  Complex coefficient;
  double energy;
};

/// Psi(x,t) as a superposition of stationary states.
class TimeDependentWaveFunction {
 public:
  TimeDependentWaveFunction(std::vector<Component> components, double hbar);

  const GridDomain& domain() const { return components_.front().state.domain(); }
  std::span<const Component> components() const { return components_; }
  double hbar() const { return hbar_; }
  bool stationary() const { return components_.size() == 1; }

  Complex amplitude(double x, double t) const;
  Complex derivative(double x, double t) const;
  double density(double x, double t) const;

 private:
  std::vector<Component> components_;
  double hbar_;
};

/// Box eigenstate n on a box of length L. Centered convention lives on
/// [-L/2, L/2] (cos for odd n, sin for even n); wall convention on [0, L].
WaveFunction box_eigenstate(int n, double L, BoxConvention convention = BoxConvention::centered,
                            std::size_t n_points = kDefaultGridPoints);

/// E_n = n^2 pi^2 hbar^2 / (2 m L^2).
double box_energy(int n, double L, const PhysicalParams& params = {});

/// L^{-1/2} exp(i k x) on [0, L].
WaveFunction plane_wave(double k, double L, std::size_t n_points = kDefaultGridPoints);

/// Checks sum |c|^2 = 1 and pairwise orthonormality of the states.
TimeDependentWaveFunction superposition(std::vector<WaveFunction> states, std::vector<Complex> coeffs,
                                        std::vector<double> energies, double hbar = 1.0);

/// Arbitrary samples; Re and Im interpolated separately by monotone cubic,
/// then renormalized. The domain grid has one node per sample.
WaveFunction tabulated(std::vector<double> x, std::vector<Complex> values,
                       std::string label = "tabulated");

/// |psi(x)|^2; throws OutOfDomain outside the domain.
double density(const WaveFunction& wf, double x);

/// <a|b> by composite Simpson on the shared grid.
Complex overlap(const WaveFunction& a, const WaveFunction& b);

}  // namespace qtraj
