#include "qtraj/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qtraj/errors.hpp"

namespace qtraj {

namespace {

constexpr double kMinExpected = 5.0;

}  // namespace

double Histogram::density(std::size_t i) const {
  return static_cast<double>(counts[i]) / (static_cast<double>(total) * width(i));
}

std::vector<double> Histogram::normalized_density() const {
  std::vector<double> out(bins());
  for (std::size_t i = 0; i < bins(); ++i) out[i] = density(i);
  return out;
}

void Histogram::merge(const Histogram& other) {
  if (other.edges != edges) throw InvalidArgument("cannot merge histograms with different edges");
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  total += other.total;
}

Histogram empty_histogram(const GridDomain& domain, double dx) {
  if (!(dx > 0.0) || !std::isfinite(dx)) throw InvalidArgument("histogram bin width must be positive");
  const double L = domain.length();
  const double ratio = L / dx;
  if (ratio > 1e8) throw InvalidArgument("histogram bin width is too small for the domain");
  const auto rounded = static_cast<std::size_t>(std::llround(ratio));
  Histogram h;
  if (rounded > 0 && std::fabs(static_cast<double>(rounded) - ratio) <= 1e-9 * ratio) {
    for (std::size_t i = 0; i <= rounded; ++i) {
      h.edges.push_back(domain.x_min() + L * static_cast<double>(i) / static_cast<double>(rounded));
    }
  } else {
    const auto full = static_cast<std::size_t>(std::floor(ratio));
    for (std::size_t i = 0; i <= full; ++i) h.edges.push_back(domain.x_min() + static_cast<double>(i) * dx);
    h.edges.push_back(domain.x_max());
  }
  h.edges.back() = domain.x_max();
  h.counts.assign(h.edges.size() - 1, 0);
  return h;
}

Histogram histogram(std::span<const double> samples, const GridDomain& domain, double dx) {
  if (samples.empty()) throw InvalidArgument("histogram needs at least one sample");
  Histogram h = empty_histogram(domain, dx);
  const std::size_t nb = h.bins();
  const double lo = domain.x_min();
  for (double x : samples) {
    if (!domain.contains(x)) {
      std::ostringstream os;
      os << "sample x = " << x << " lies outside the histogram domain";
      throw InvalidArgument(os.str());
    }
    auto i = static_cast<std::size_t>(std::max(0.0, std::floor((x - lo) / dx)));
    i = std::min(i, nb - 1);
    while (i > 0 && x < h.edges[i]) --i;
    while (i + 1 < nb && x >= h.edges[i + 1]) ++i;
    ++h.counts[i];
  }
  h.total = samples.size();
  return h;
}

double l1_distance(const Histogram& h, const DensityFunction& target) {
  double sum = 0.0;
  for (std::size_t i = 0; i < h.bins(); ++i) sum += std::fabs(h.density(i) - target(h.center(i))) * h.width(i);
  return sum;
}

ChiSquare chi_square(const Histogram& h, const DensityFunction& target, std::uint64_t n) {
  const std::size_t nb = h.bins();
  std::vector<double> expected(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    // Bin mass by 4-panel Simpson. The midpoint value alone biases the
    // statistic upward in low-density bins where p'' is large next to p.
    const double a = h.edges[i];
    const double w = h.width(i);
    const double mass = w / 12.0 *
                        (target(a) + 4.0 * target(a + 0.25 * w) + 2.0 * target(a + 0.5 * w) +
                         4.0 * target(a + 0.75 * w) + target(h.edges[i + 1]));
    expected[i] = static_cast<double>(n) * mass;
  }
  const auto peak = static_cast<std::size_t>(std::max_element(expected.begin(), expected.end()) - expected.begin());

  struct Group {
    double expected = 0.0;
    double observed = 0.0;
  };
  std::vector<Group> groups;

  // Walk one side from the peak outward; order of bins is given by `index`.
  auto walk = [&](auto index, std::size_t count) {
    std::vector<Group> side;
    Group open;
    for (std::size_t s = 0; s < count; ++s) {
      const std::size_t i = index(s);
      open.expected += expected[i];
      open.observed += static_cast<double>(h.counts[i]);
      if (open.expected >= kMinExpected) {
        side.push_back(open);
        open = {};
      }
    }
    if (open.expected > 0.0 || open.observed > 0.0) {
      if (side.empty()) {
        side.push_back(open);
      } else {
        side.back().expected += open.expected;
        side.back().observed += open.observed;
      }
    }
    return side;
  };

  // The peak bin starts the right-hand walk.
  auto right = walk([&](std::size_t s) { return peak + s; }, nb - peak);
  auto left = walk([&](std::size_t s) { return peak - 1 - s; }, peak);
  // A sub-threshold left remainder with no full group folds into the peak group.
  if (left.size() == 1 && left.front().expected < kMinExpected && !right.empty()) {
    right.front().expected += left.front().expected;
    right.front().observed += left.front().observed;
    left.clear();
  }
  if (!right.empty() && right.front().expected < kMinExpected) {
    throw InvalidArgument("chi-square: every bin expects fewer than five counts");
  }
  groups.insert(groups.end(), left.rbegin(), left.rend());
  groups.insert(groups.end(), right.begin(), right.end());

  ChiSquare out;
  for (const auto& g : groups) {
    if (g.expected <= 0.0) {
      if (g.observed > 0.0) out.statistic = std::numeric_limits<double>::infinity();
      continue;
    }
    const double d = g.observed - g.expected;
    out.statistic += d * d / g.expected;
  }
  out.dof = groups.size() - 1;
  return out;
}

MatchReport pdf_match_report(const Trajectory& traj, const GridDomain& domain, const DensityFunction& target,
                             double dx, const MatchTolerances& tol) {
  const auto xs = traj.positions();
  MatchReport r;
  r.histogram = histogram(xs, domain, dx);
  r.dx = dx;
  r.n_samples = xs.size();
  r.l1 = l1_distance(r.histogram, target);
  const bool random = traj.sampling == Sampling::uniform_random;
  r.l1_tolerance = random ? tol.l1_random : tol.l1_grid;
  const ChiSquare chi = chi_square(r.histogram, target, r.n_samples);
  r.chi2 = chi.statistic;
  r.dof = chi.dof;
  const double dof = static_cast<double>(chi.dof);
  const double band = tol.chi2_sigmas * std::sqrt(2.0 * dof);
  r.chi2_high = dof + band;
  r.chi2_low = random ? dof - band : 0.0;
  r.l1_pass = r.l1 < r.l1_tolerance;
  r.chi2_pass = r.chi2 <= r.chi2_high && r.chi2 >= r.chi2_low;
  r.pass = r.l1_pass && r.chi2_pass;
  return r;
}

}  // namespace qtraj
