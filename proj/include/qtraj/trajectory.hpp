#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qtraj/grid.hpp"
#include "qtraj/interpolation.hpp"
#include "qtraj/wavefunction.hpp"

namespace qtraj {

enum class Direction : int { forward = 1, backward = -1 };
enum class Mode { single_pass, periodic };
enum class Sampling { uniform_grid, uniform_random };

inline double sign(Direction d) { return static_cast<double>(static_cast<int>(d)); }

/// u(x) = integral of the density from x_min to x, tabulated on the grid
/// and interpolated with a monotone cubic whose nodal slopes are the
/// density itself.
class CumulativeMap {
 public:
  explicit CumulativeMap(const Density& density);

  const GridDomain& domain() const { return domain_; }
  std::span<const double> values() const { return fit_.values(); }

  double operator()(double x) const;

  /// Smallest x with u(x) = u; plateaus resolve to their left edge.
  double invert(double u) const;

 private:
  GridDomain domain_;
  MonotoneCubic fit_;
};

struct TrajectorySample {
  double t;
  double x;
  double v;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  double period = 1.0;  // T, the duration of one traversal
  double t0 = 0.0;
  Direction direction = Direction::forward;
  Mode mode = Mode::single_pass;
  Sampling sampling = Sampling::uniform_grid;

  std::vector<double> positions() const;
};

struct SamplingOptions {
  std::size_t n = 1001;
  Sampling sampling = Sampling::uniform_grid;
  std::uint64_t seed = 1;
  double t0 = 0.0;
  Direction direction = Direction::forward;
  Mode mode = Mode::single_pass;
  // Periodic mode only: sampled window [t_begin, t_end]. When both are
  // left equal the window defaults to one full cycle [t0, t0 + 2T].
  double t_begin = 0.0;
  double t_end = 0.0;
};

CumulativeMap cumulative(const Density& density);

/// Throws InvalidArgument for u outside [0, 1].
double invert(const CumulativeMap& g, double u);

/// Position at time t. Single-pass phases outside [0, 1] throw OutOfRange.
double position_at(const CumulativeMap& g, double t, const PhysicalParams& params, double t0,
                   Direction direction, Mode mode);

/// direction / (T * density(x)); a node returns a signed infinity.
double velocity_at(const Density& density, double x, const PhysicalParams& params,
                   Direction direction);

Trajectory sample_trajectory(const Density& density, const PhysicalParams& params,
                             const SamplingOptions& options);

struct Ensemble {
  std::vector<double> t0;
  std::vector<Trajectory> members;
};

/// Members share the density and params and differ only in t0, drawn
/// uniformly on [0, T). Periodic members are sampled on the common window
/// given by `options`; single-pass members cover their own [t0, t0 + T].
/// Member i uses its own generator seeded from (seed, i), so members can be
/// generated in any order with identical results.
Ensemble ensemble(const Density& density, const PhysicalParams& params, std::size_t n_members,
                  std::uint64_t seed, SamplingOptions options = {});

struct SuperluminalRegion {
  std::vector<std::pair<double, double>> intervals;
  double total_measure = 0.0;
};

/// {x : density(x) < 1 / (T c)}, i.e. where the synthesized speed exceeds c.
SuperluminalRegion superluminal_measure(const Density& density, const PhysicalParams& params);

/// Smallest T whose superluminal set has measure <= epsilon.
double min_period_for_cap(const Density& density, double c, double epsilon);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
double unit_uniform(std::uint64_t bits);

/// Seed for ensemble member `index` derived from a run seed.
std::uint64_t member_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace qtraj
