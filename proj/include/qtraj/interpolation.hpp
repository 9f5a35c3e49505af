#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qtraj {

/// Piecewise cubic Hermite interpolant with shape-preserving slopes.
///
/// Built either from data alone (PCHIP slopes: weighted harmonic mean of
/// adjacent secants, zero at local extrema) or from data plus known nodal
/// slopes, which are then limited with the Fritsch-Carlson condition so the
/// interpolant stays monotone on every monotone cell.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);
  MonotoneCubic(std::vector<double> x, std::vector<double> y, std::vector<double> slopes);

  double operator()(double x) const;
  double derivative(double x) const;

  /// Evaluate on a known cell [x_k, x_{k+1}] without searching.
  double eval_in_cell(std::size_t k, double x) const;
  std::size_t cell(double x) const;

  std::span<const double> knots() const { return x_; }
  std::span<const double> values() const { return y_; }
  std::span<const double> slopes() const { return d_; }

 private:
  void check_knots() const;

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> d_;
};

}  // namespace qtraj
