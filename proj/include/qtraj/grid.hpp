#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qtraj {

inline constexpr std::size_t kDefaultGridPoints = 4097;
inline constexpr std::size_t kMinGridPoints = 33;

/// Uniform grid on the closed interval [x_min, x_max].
class GridDomain {
 public:
  GridDomain(double x_min, double x_max, std::size_t n_points = kDefaultGridPoints);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t size() const { return n_points_; }
  double length() const { return x_max_ - x_min_; }
  double spacing() const { return length() / static_cast<double>(n_points_ - 1); }

  /// Node i; the last node is exactly x_max.
  double node(std::size_t i) const;
  std::vector<double> nodes() const;

  bool contains(double x) const { return x >= x_min_ && x <= x_max_; }
  bool interior(double x) const { return x > x_min_ && x < x_max_; }

  /// Index of the cell [node(k), node(k+1)] holding x (clamped to the grid).
  std::size_t cell(double x) const;

  bool operator==(const GridDomain&) const = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_points_;
};

// Composite Simpson on equally spaced samples. Odd counts use the classic
// rule; even counts close the last interval with the three-point
// end correction. Two samples fall back to the trapezoid.
double simpson(std::span<const double> f, double h);

// Weights w with sum(w[i] * f[i]) == simpson(f, h).
std::vector<double> simpson_weights(std::size_t n, double h);

// Running integral from the first sample. Even-indexed entries are exact
// composite Simpson partial sums; odd entries add a single interval using
// the quadratic through three neighbouring samples.
std::vector<double> cumulative_simpson(std::span<const double> f, double h);

// sin(pi*y) and cos(pi*y) with exact zeros at the integer / half-integer
// nodes, so box states vanish exactly on walls and interior nodes.
double sin_pi(double y);
double cos_pi(double y);

}  // namespace qtraj
