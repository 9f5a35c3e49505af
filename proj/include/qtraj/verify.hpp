#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "qtraj/grid.hpp"
#include "qtraj/trajectory.hpp"

namespace qtraj {

using DensityFunction = std::function<double(double)>;

/// Right-open bins (last bin closed) spanning a domain exactly.
struct Histogram {
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  std::size_t bins() const { return counts.size(); }
  double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
  double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
  /// counts / (N * width): integrates to one by construction.
  double density(std::size_t i) const;
  std::vector<double> normalized_density() const;

  /// Adds counts of a histogram with identical edges (partial-histogram merge).
  void merge(const Histogram& other);
};

/// Bins of width dx. When dx does not divide the domain length (to 1e-9
/// relative) the last bin is narrowed to end on x_max.
Histogram histogram(std::span<const double> samples, const GridDomain& domain, double dx);

/// Empty histogram with the same binning rule.
Histogram empty_histogram(const GridDomain& domain, double dx);

/// sum over bins |density_i - target(center_i)| * width_i.
double l1_distance(const Histogram& h, const DensityFunction& target);

struct ChiSquare {
  double statistic = 0.0;
  std::size_t dof = 0;
};

/// Pearson statistic against expected counts N * (integral of target over
/// the bin), the integral taken by 4-panel Simpson.
/// Bins expecting fewer than five counts are merged outward from the
/// most populated bin; a short group left at an edge joins its inner
/// neighbour. dof = merged groups - 1.
ChiSquare chi_square(const Histogram& h, const DensityFunction& target, std::uint64_t n);

struct MatchTolerances {
  double l1_random = 0.02;
  double l1_grid = 1e-3;
  double chi2_sigmas = 4.0;
};

struct MatchReport {
  double dx = 0.0;
  std::uint64_t n_samples = 0;
  double l1 = 0.0;
  double l1_tolerance = 0.0;
  double chi2 = 0.0;
  std::size_t dof = 0;
  double chi2_low = 0.0;   // lower band edge (applied to random sampling only)
  double chi2_high = 0.0;
  bool l1_pass = false;
  bool chi2_pass = false;
  bool pass = false;
  Histogram histogram;
};

/// Histogram, L1 distance and chi-square of a sampled trajectory against a
/// target density. Random-time samples must land inside the two-sided
/// band dof +- k sqrt(2 dof); grid-time samples are deterministic, so only
/// the upper edge applies to them.
MatchReport pdf_match_report(const Trajectory& traj, const GridDomain& domain, const DensityFunction& target,
                             double dx, const MatchTolerances& tol = {});

}  // namespace qtraj
