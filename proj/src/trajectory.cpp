#include "qtraj/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "qtraj/errors.hpp"

namespace qtraj {

namespace {

constexpr double kInvertTolerance = 1e-13;
constexpr double kPhaseSlack = 1e-12;

double clamp01(double u) { return std::min(1.0, std::max(0.0, u)); }

std::vector<double> cumulative_nodes(const Density& density) {
  const auto nodes = density.nodes();
  auto u = cumulative_simpson(nodes, density.domain().spacing());
  const double total = u.back();
  if (!(total > 0.0)) throw InvalidArgument("density integrates to zero");
  double running = 0.0;
  for (double& v : u) {
    running = std::max(running, clamp01(v / total));
    v = running;
  }
  u.front() = 0.0;
  u.back() = 1.0;
  return u;
}

// Root of f on [a, b] with f(a) < 0 < f(b): regula falsi with the Illinois
// weight halving, falling back to bisection whenever the secant step stalls.
template <typename F>
double bracketed_root(F f, double a, double b, double fa, double fb, double tol) {
  int side = 0;
  for (int iter = 0; iter < 200; ++iter) {
    double x = (a * fb - b * fa) / (fb - fa);
    const double width = b - a;
    if (!(x > a && x < b) || (iter % 4 == 3)) x = 0.5 * (a + b);
    const double fx = f(x);
    if (std::fabs(fx) <= tol || width <= 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(x)) {
      return x;
    }
    if (fx < 0.0) {
      a = x;
      fa = fx;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      b = x;
      fb = fx;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

CumulativeMap::CumulativeMap(const Density& density)
    : domain_(density.domain()),
      fit_(density.domain().nodes(), cumulative_nodes(density),
           std::vector<double>(density.nodes().begin(), density.nodes().end())) {}

double CumulativeMap::operator()(double x) const {
  if (!domain_.contains(x)) throw OutOfDomain("cumulative map evaluated outside its domain");
  return clamp01(fit_.eval_in_cell(domain_.cell(x), x));
}

double CumulativeMap::invert(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) {
    std::ostringstream os;
    os << "cannot invert cumulative map at u = " << u << " (must lie in [0, 1])";
    throw InvalidArgument(os.str());
  }
  const auto vals = fit_.values();
  const auto it = std::lower_bound(vals.begin(), vals.end(), u);
  const auto k = static_cast<std::size_t>(it - vals.begin());
  if (k == 0) return domain_.x_min();
  if (k >= vals.size()) return domain_.x_max();
  if (vals[k] == u) return domain_.node(k);

  const std::size_t cell = k - 1;
  const double a = domain_.node(cell);
  const double b = domain_.node(k);
  auto f = [&](double x) { return fit_.eval_in_cell(cell, x) - u; };
  return bracketed_root(f, a, b, vals[cell] - u, vals[k] - u, kInvertTolerance);
}

std::vector<double> Trajectory::positions() const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.x);
  return out;
}

CumulativeMap cumulative(const Density& density) { return CumulativeMap(density); }

double invert(const CumulativeMap& g, double u) { return g.invert(u); }

namespace {

struct Phase {
  double u;          // fraction fed to the inverse map
  double direction;  // effective sign of motion at this phase
};

Phase fold_phase(double t, const PhysicalParams& params, double t0, Direction direction, Mode mode) {
  double phase = (t - t0) / params.T;
  double dir = sign(direction);
  if (mode == Mode::single_pass) {
    if (phase < -kPhaseSlack || phase > 1.0 + kPhaseSlack || !std::isfinite(phase)) {
      std::ostringstream os;
      os << "single-pass phase (t - t0)/T = " << phase << " outside [0, 1]";
      throw OutOfRange(os.str());
    }
    phase = clamp01(phase);
  } else {
    phase = std::fmod(phase, 2.0);
    if (phase < 0.0) phase += 2.0;
    if (phase > 1.0) {
      phase = 2.0 - phase;
      dir = -dir;
    }
  }
  const double u = direction == Direction::forward ? phase : 1.0 - phase;
  return {u, dir};
}

}  // namespace

double position_at(const CumulativeMap& g, double t, const PhysicalParams& params, double t0,
                   Direction direction, Mode mode) {
  return g.invert(fold_phase(t, params, t0, direction, mode).u);
}

double velocity_at(const Density& density, double x, const PhysicalParams& params, Direction direction) {
  const double p = density(x);
  if (p == 0.0) return sign(direction) * std::numeric_limits<double>::infinity();
  return sign(direction) / (params.T * p);
}

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

std::uint64_t member_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over (seed, index)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

std::vector<double> sample_times(double begin, double end, const SamplingOptions& options) {
  const std::size_t n = options.n;
  std::vector<double> t(n);
  const double span = end - begin;
  if (options.sampling == Sampling::uniform_grid) {
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = begin + span * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    t.back() = end;
    return t;
  }
  std::mt19937_64 rng(options.seed);
  for (double& v : t) v = begin + span * unit_uniform(rng());
  std::sort(t.begin(), t.end());
  // Keep times strictly increasing; collisions are vanishingly rare.
  for (auto dup = std::adjacent_find(t.begin(), t.end()); dup != t.end();
       dup = std::adjacent_find(t.begin(), t.end())) {
    *dup = begin + span * unit_uniform(rng());
    std::sort(t.begin(), t.end());
  }
  return t;
}

Trajectory build(const Density& density, const CumulativeMap& g, const PhysicalParams& params,
                 const SamplingOptions& options) {
  if (options.n < 2) throw InvalidArgument("trajectory needs at least 2 samples");
  params.validate();
  double begin = options.t0;
  double end = options.t0 + params.T;
  if (options.mode == Mode::periodic) {
    if (options.t_end > options.t_begin) {
      begin = options.t_begin;
      end = options.t_end;
    } else {
      end = options.t0 + 2.0 * params.T;
    }
  }

  Trajectory traj;
  traj.period = params.T;
  traj.t0 = options.t0;
  traj.direction = options.direction;
  traj.mode = options.mode;
  traj.sampling = options.sampling;
  traj.samples.reserve(options.n);
  for (double t : sample_times(begin, end, options)) {
    const Phase ph = fold_phase(t, params, options.t0, options.direction, options.mode);
    const double x = g.invert(ph.u);
    const Direction dir = ph.direction > 0.0 ? Direction::forward : Direction::backward;
    traj.samples.push_back({t, x, velocity_at(density, x, params, dir)});
  }
  return traj;
}

}  // namespace

Trajectory sample_trajectory(const Density& density, const PhysicalParams& params,
                             const SamplingOptions& options) {
  return build(density, CumulativeMap(density), params, options);
}

Ensemble ensemble(const Density& density, const PhysicalParams& params, std::size_t n_members,
                  std::uint64_t seed, SamplingOptions options) {
  if (n_members < 1) throw InvalidArgument("ensemble needs at least one member");
  params.validate();
  if (options.mode == Mode::periodic && !(options.t_end > options.t_begin)) {
    options.t_begin = 0.0;
    options.t_end = 2.0 * params.T;
  }
  const CumulativeMap g(density);
  Ensemble out;
  out.t0.reserve(n_members);
  out.members.reserve(n_members);
  for (std::size_t i = 0; i < n_members; ++i) {
    std::mt19937_64 rng(member_seed(seed, i));
    SamplingOptions member = options;
    member.t0 = params.T * unit_uniform(rng());
    member.seed = rng();
    out.t0.push_back(member.t0);
    out.members.push_back(build(density, g, params, member));
  }
  return out;
}

SuperluminalRegion superluminal_measure(const Density& density, const PhysicalParams& params) {
  params.validate();
  const double threshold = 1.0 / (params.T * params.c);
  const GridDomain& dom = density.domain();
  const auto nodes = density.nodes();
  const std::size_t n = nodes.size();

  // Boundary between an outside node a and an inside node b.
  auto boundary = [&](double a, double b) {
    for (int iter = 0; iter < 200 && std::fabs(b - a) > 1e-15 * (1.0 + std::fabs(a)); ++iter) {
      const double mid = 0.5 * (a + b);
      if (density(mid) < threshold) {
        b = mid;
      } else {
        a = mid;
      }
    }
    return 0.5 * (a + b);
  };

  SuperluminalRegion region;
  std::size_t i = 0;
  while (i < n) {
    if (!(nodes[i] < threshold)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && nodes[j + 1] < threshold) ++j;
    const double lo = (i == 0) ? dom.x_min() : boundary(dom.node(i - 1), dom.node(i));
    const double hi = (j + 1 == n) ? dom.x_max() : boundary(dom.node(j + 1), dom.node(j));
    region.intervals.emplace_back(lo, hi);
    region.total_measure += hi - lo;
    i = j + 1;
  }
  return region;
}

double min_period_for_cap(const Density& density, double c, double epsilon) {
  if (!(c > 0.0)) throw InvalidArgument("speed cap c must be positive");
  if (!(epsilon > 0.0)) throw InvalidArgument("target measure epsilon must be positive");
  if (epsilon >= density.domain().length()) {
    throw InvalidArgument("target measure epsilon is not smaller than the domain length");
  }
  auto measure = [&](double T) {
    return superluminal_measure(density, PhysicalParams{1.0, 1.0, T, c}).total_measure;
  };
  const auto nodes = density.nodes();
  const double peak = *std::max_element(nodes.begin(), nodes.end());

  // At T_lo the threshold sits above every node, so the whole domain counts.
  double lo = 0.5 / (c * peak);
  double hi = 2.0 * lo;
  int doublings = 0;
  while (measure(hi) > epsilon) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 200) {
      throw InvalidArgument("no finite period brings the superluminal measure below epsilon");
    }
  }
  while ((hi - lo) > 1e-7 * hi) {
    const double mid = std::sqrt(lo * hi);
    if (measure(mid) > epsilon) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace qtraj
