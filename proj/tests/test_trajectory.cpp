#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "qtraj/errors.hpp"
#include "qtraj/trajectory.hpp"

using namespace qtraj;

namespace {

WaveFunction ground() { return box_eigenstate(1, 1.0, BoxConvention::centered); }

WaveFunction uniform_state() {
  std::vector<double> x(65);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i) / 64.0;
  return tabulated(x, std::vector<Complex>(x.size(), 1.0), "uniform");
}

}  // namespace

TEST_CASE("cumulative map of the ground state matches its closed form") {
  const auto g = cumulative(ground());
  const auto u = g.values();
  double worst = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    worst = std::max(worst, std::fabs(u[i] - oracle::box1_cumulative(g.domain().node(i))));
  }
  CHECK(worst < 1e-8);
  CHECK(u.front() == 0.0);
  CHECK(u.back() == 1.0);
  CHECK(g(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g(0.25) == doctest::Approx(0.75 + 1.0 / (2.0 * oracle::pi)).epsilon(1e-10));
  for (std::size_t i = 1; i < u.size(); ++i) REQUIRE(u[i] >= u[i - 1]);
}

TEST_CASE("wall convention cumulative matches the other sign of the closed form") {
  // psi = sqrt2 sin(pi x) on [0, 1]: u(x) = x - sin(2 pi x)/(2 pi)
  const auto g = cumulative(box_eigenstate(1, 1.0, BoxConvention::wall));
  for (double x : {0.1, 0.3, 0.5, 0.77}) {
    CHECK(g(x) == doctest::Approx(x - std::sin(2.0 * oracle::pi * x) / (2.0 * oracle::pi)).epsilon(1e-10));
  }
}

TEST_CASE("invert") {
  const auto g = cumulative(ground());
  CHECK(std::fabs(invert(g, 0.5)) < 1e-9);
  CHECK(invert(g, 0.909155) == doctest::Approx(0.25).epsilon(1e-5));
  const double exact = oracle::bisect_increasing(oracle::box1_cumulative, 0.909155, -0.5, 0.5);
  CHECK(std::fabs(invert(g, 0.909155) - exact) < 1e-8);
  CHECK(invert(g, 0.0) == -0.5);
  CHECK(invert(g, 1.0) == 0.5);
  CHECK_THROWS_AS(invert(g, -1e-3), InvalidArgument);
  CHECK_THROWS_AS(invert(g, 1.001), InvalidArgument);
}

TEST_CASE("invert round trip and monotonicity over random fractions") {
  const auto g = cumulative(ground());
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<double> us(10000);
  for (double& u : us) u = dist(rng);
  std::sort(us.begin(), us.end());
  double worst = 0.0;
  double prev = -1.0;
  for (double u : us) {
    const double x = invert(g, u);
    worst = std::max(worst, std::fabs(g(x) - u));
    REQUIRE(x >= prev);
    prev = x;
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("inversion on a zero-density plateau returns the left edge") {
  // density zero on [0.4, 0.6]
  std::vector<double> x(201);
  std::vector<Complex> v(201);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = static_cast<double>(i) / 200.0;
    v[i] = (x[i] >= 0.4 - 1e-12 && x[i] <= 0.6 + 1e-12) ? 0.0 : 1.0;
  }
  const auto wf = tabulated(x, v);
  const auto g = cumulative(wf);
  const double mid = g(0.5);
  CHECK(g(0.45) == mid);
  CHECK(invert(g, mid) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("position_at") {
  const auto g = cumulative(ground());
  const PhysicalParams p;
  CHECK(position_at(g, 2.0, p, 2.0, Direction::forward, Mode::single_pass) == -0.5);
  CHECK(position_at(g, 2.0, p, 2.0, Direction::backward, Mode::single_pass) == 0.5);
  CHECK(position_at(g, 2.0 + 2.0 * p.T, p, 2.0, Direction::forward, Mode::periodic) == -0.5);
  CHECK(std::fabs(position_at(g, 0.5, p, 0.0, Direction::forward, Mode::single_pass)) < 1e-9);
  CHECK(position_at(g, 1.0, p, 0.0, Direction::forward, Mode::periodic) == 0.5);
  // to-and-fro: the return leg retraces the outbound leg
  CHECK(position_at(g, 1.3, p, 0.0, Direction::forward, Mode::periodic) ==
        doctest::Approx(position_at(g, 0.7, p, 0.0, Direction::forward, Mode::single_pass)));
  CHECK_THROWS_AS(position_at(g, 1.5, p, 0.0, Direction::forward, Mode::single_pass), OutOfRange);
  CHECK_THROWS_AS(position_at(g, -0.1, p, 0.0, Direction::forward, Mode::single_pass), OutOfRange);
}

TEST_CASE("velocity_at") {
  const auto wf = ground();
  const PhysicalParams p;
  CHECK(velocity_at(wf, 0.0, p, Direction::forward) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(velocity_at(wf, 0.0, p, Direction::backward) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(std::isinf(velocity_at(wf, 0.5, p, Direction::forward)));
  CHECK(std::isinf(velocity_at(wf, -0.5, p, Direction::forward)));
}

TEST_CASE("sample_trajectory grid endpoints and median") {
  const auto wf = ground();
  SamplingOptions opt;
  opt.n = 3;
  const auto traj = sample_trajectory(wf, PhysicalParams{}, opt);
  REQUIRE(traj.samples.size() == 3);
  CHECK(traj.samples[0].x == -0.5);
  CHECK(std::fabs(traj.samples[1].x) < 1e-9);
  CHECK(traj.samples[2].x == 0.5);
  opt.n = 1;
  CHECK_THROWS_AS(sample_trajectory(wf, PhysicalParams{}, opt), InvalidArgument);
}

TEST_CASE("trajectory invariants: ordering, monotonicity, ODE and Jacobian identity") {
  const auto wf = ground();
  const PhysicalParams p{1.0, 1.0, 2.0, 10.0};
  for (auto dir : {Direction::forward, Direction::backward}) {
    SamplingOptions opt;
    opt.n = 100001;
    opt.t0 = 0.3;
    opt.direction = dir;
    const auto traj = sample_trajectory(wf, p, opt);
    const auto& s = traj.samples;
    for (std::size_t i = 1; i < s.size(); ++i) {
      REQUIRE(s[i].t > s[i - 1].t);
      REQUIRE(sign(dir) * (s[i].x - s[i - 1].x) >= 0.0);
    }
    double worst_ode = 0.0;
    double worst_jac = 0.0;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      if (wf.density(s[i].x) <= 0.05) continue;
      const double fd = (s[i + 1].x - s[i - 1].x) / (s[i + 1].t - s[i - 1].t);
      worst_ode = std::max(worst_ode, std::fabs(fd - s[i].v) / std::fabs(s[i].v));
      worst_jac = std::max(worst_jac, std::fabs(std::fabs(fd) * p.T * wf.density(s[i].x) - 1.0));
    }
    CHECK(worst_ode < 1e-4);
    CHECK(worst_jac < 1e-4);
  }
}

TEST_CASE("periodic sampling reverses velocity on the return leg") {
  SamplingOptions opt;
  opt.n = 9;
  opt.mode = Mode::periodic;
  const auto traj = sample_trajectory(ground(), PhysicalParams{}, opt);
  CHECK(traj.samples.front().t == 0.0);
  CHECK(traj.samples.back().t == 2.0);
  CHECK(traj.samples[2].v > 0.0);
  CHECK(traj.samples[6].v < 0.0);
  CHECK(traj.samples.back().x == -0.5);
}

TEST_CASE("random sampling is reproducible and sorted") {
  SamplingOptions opt;
  opt.n = 5000;
  opt.sampling = Sampling::uniform_random;
  opt.seed = 7;
  const auto a = sample_trajectory(ground(), PhysicalParams{}, opt);
  const auto b = sample_trajectory(ground(), PhysicalParams{}, opt);
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    REQUIRE(a.samples[i].t == b.samples[i].t);
    REQUIRE(a.samples[i].x == b.samples[i].x);
    if (i > 0) REQUIRE(a.samples[i].t > a.samples[i - 1].t);
  }
  CHECK(a.samples.front().t >= 0.0);
  CHECK(a.samples.back().t <= 1.0);
  opt.seed = 8;
  const auto c = sample_trajectory(ground(), PhysicalParams{}, opt);
  CHECK(c.samples[10].t != a.samples[10].t);
}

TEST_CASE("ensemble members are time translates with t0-independent velocities") {
  const auto wf = ground();
  const PhysicalParams p;
  SamplingOptions opt;
  opt.n = 257;
  opt.mode = Mode::periodic;
  const auto ens = ensemble(wf, p, 6, 99, opt);
  REQUIRE(ens.members.size() == 6);
  const auto g = cumulative(wf);
  for (std::size_t m = 0; m < ens.members.size(); ++m) {
    CHECK(ens.t0[m] >= 0.0);
    CHECK(ens.t0[m] < p.T);
    // member m equals member 0 shifted in time by t0_m - t0_0
    const double shift = ens.t0[m] - ens.t0[0];
    for (std::size_t i = 0; i < ens.members[m].samples.size(); i += 16) {
      const auto& s = ens.members[m].samples[i];
      const double shifted = position_at(g, s.t - shift, p, ens.t0[0], Direction::forward, Mode::periodic);
      CHECK(s.x == doctest::Approx(shifted).epsilon(1e-9));
      // velocity as a function of x is the same function for every member
      CHECK(std::fabs(s.v) == velocity_at(wf, s.x, p, Direction::forward));
    }
  }
}

TEST_CASE("ensemble generation order does not matter") {
  const auto wf = ground();
  SamplingOptions opt;
  opt.n = 33;
  opt.sampling = Sampling::uniform_random;
  const auto whole = ensemble(wf, PhysicalParams{}, 5, 3, opt);
  const auto again = ensemble(wf, PhysicalParams{}, 5, 3, opt);
  for (std::size_t m = 0; m < 5; ++m) {
    CHECK(whole.t0[m] == again.t0[m]);
    for (std::size_t i = 0; i < 33; ++i) REQUIRE(whole.members[m].samples[i].x == again.members[m].samples[i].x);
  }
  // a larger ensemble shares its first members
  const auto bigger = ensemble(wf, PhysicalParams{}, 8, 3, opt);
  for (std::size_t m = 0; m < 5; ++m) CHECK(bigger.t0[m] == whole.t0[m]);
}

TEST_CASE("ensemble t0 distribution is uniform (Kolmogorov-Smirnov)") {
  SamplingOptions opt;
  opt.n = 2;
  const PhysicalParams p{1.0, 1.0, 2.5, 10.0};
  const auto ens = ensemble(ground(), p, 10000, 2024, opt);
  auto t0 = ens.t0;
  std::sort(t0.begin(), t0.end());
  double ks = 0.0;
  const double n = static_cast<double>(t0.size());
  for (std::size_t i = 0; i < t0.size(); ++i) {
    const double cdf = t0[i] / p.T;
    ks = std::max({ks, std::fabs(cdf - static_cast<double>(i) / n), std::fabs(static_cast<double>(i + 1) / n - cdf)});
  }
  CHECK(ks < 0.02);
}

TEST_CASE("superluminal measure") {
  const auto wf = ground();
  const auto region = superluminal_measure(wf, PhysicalParams{1.0, 1.0, 1.0, 10.0});
  CHECK(region.total_measure == doctest::Approx(oracle::box1_superluminal_measure(1.0, 10.0)).epsilon(1e-9));
  CHECK(region.total_measure == doctest::Approx(0.14357).epsilon(1e-4));
  REQUIRE(region.intervals.size() == 2);
  CHECK(region.intervals[0].first == -0.5);
  CHECK(region.intervals[1].second == 0.5);
  CHECK(region.intervals[0].second - region.intervals[0].first == doctest::Approx(0.07178).epsilon(1e-4));

  const auto longer = superluminal_measure(wf, PhysicalParams{1.0, 1.0, 10.0, 10.0});
  CHECK(longer.total_measure < region.total_measure);
  CHECK(longer.total_measure == doctest::Approx(oracle::box1_superluminal_measure(10.0, 10.0)).epsilon(1e-9));

  const auto flat = superluminal_measure(uniform_state(), PhysicalParams{1.0, 1.0, 1.0, 10.0});
  CHECK(flat.intervals.empty());
  CHECK(flat.total_measure == 0.0);
}

TEST_CASE("min_period_for_cap") {
  const auto wf = ground();
  const double eps = 0.14357;
  const double T = min_period_for_cap(wf, 10.0, eps);
  CHECK(T == doctest::Approx(oracle::box1_period_for_measure(10.0, eps)).epsilon(1e-5));
  CHECK(T == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(min_period_for_cap(wf, 10.0, eps / 2.0) > T);
  CHECK(min_period_for_cap(uniform_state(), 10.0, 0.3) == doctest::Approx(0.1).epsilon(1e-6));
  CHECK_THROWS_AS(min_period_for_cap(wf, 10.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(min_period_for_cap(wf, 10.0, 0.0), InvalidArgument);
}
