#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "qtraj/bohm.hpp"
#include "qtraj/errors.hpp"

using namespace qtraj;

namespace {

TimeDependentWaveFunction stationary(const WaveFunction& wf, double energy) { return superposition({wf}, {1.0}, {energy}); }

TimeDependentWaveFunction moving_plane_wave() {
  const double k = 2.0 * oracle::pi;
  return stationary(plane_wave(k, 1.0), 0.5 * k * k);
}

TimeDependentWaveFunction mixed(double a, double b) {
  return superposition({box_eigenstate(1, 1.0), box_eigenstate(2, 1.0)}, {a, b}, {box_energy(1, 1.0), box_energy(2, 1.0)});
}

}  // namespace

TEST_CASE("current vanishes for real stationary states") {
  for (auto conv : {BoxConvention::centered, BoxConvention::wall}) {
    for (int n = 1; n <= 3; ++n) {
      const auto wf = box_eigenstate(n, 1.0, conv);
      const auto psi = stationary(wf, box_energy(n, 1.0));
      double worst = 0.0;
      for (std::size_t i = 1; i + 1 < wf.domain().size(); i += 3) {
        for (double t : {0.0, 0.31, 2.7}) {
          const auto j = probability_current(psi, wf.domain().node(i), t);
          worst = std::max(worst, std::fabs(j.value));
          REQUIRE(j.imag_residue < 1e-12);
        }
      }
      CHECK(worst < 1e-10);
    }
  }
  const auto psi = stationary(box_eigenstate(1, 1.0), box_energy(1, 1.0));
  CHECK(bohm_velocity(psi, 0.2, 1.0).value == 0.0);
}

TEST_CASE("plane-wave current and velocity") {
  const auto psi = moving_plane_wave();
  for (double x : {0.1, 0.5, 0.93}) {
    for (double t : {0.0, 0.4}) {
      const auto j = probability_current(psi, x, t);
      CHECK(std::fabs(j.value - 2.0 * oracle::pi) < 1e-10);
      CHECK(j.imag_residue < 1e-12);
      CHECK(bohm_velocity(psi, x, t).value == doctest::Approx(2.0 * oracle::pi).epsilon(1e-10));
    }
  }
  // hbar k / (m L) scales with mass
  CHECK(probability_current(psi, 0.5, 0.0, 2.0).value == doctest::Approx(oracle::pi).epsilon(1e-10));
}

TEST_CASE("current argument checks") {
  const auto psi = moving_plane_wave();
  CHECK_THROWS_AS(probability_current(psi, 0.0, 0.0), OutOfDomain);
  CHECK_THROWS_AS(probability_current(psi, 1.0, 0.0), OutOfDomain);
  CHECK_THROWS_AS(probability_current(psi, 1.5, 0.0), OutOfDomain);
}

TEST_CASE("continuity equation for a superposition") {
  const auto psi = mixed(0.8, 0.6);
  const double h = 1e-4;
  double worst = 0.0;
  for (double t : {0.0, 0.13, 0.5}) {
    for (double x = -0.45; x <= 0.45; x += 0.01) {
      const double drho = (psi.density(x, t + h) - psi.density(x, t - h)) / (2.0 * h);
      const double dj = (probability_current(psi, x + h, t).value - probability_current(psi, x - h, t).value) / (2.0 * h);
      worst = std::max(worst, std::fabs(drho + dj));
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("integrated current equals the rate of change of <x>") {
  const auto psi = mixed(0.8, 0.6);
  const auto mean_x = [&](double t) {
    return oracle::simpson([&](double x) { return x * psi.density(x, t); }, -0.5, 0.5, 4000);
  };
  const double t = 0.07;
  const double h = 1e-4;
  const double rate = (mean_x(t + h) - mean_x(t - h)) / (2.0 * h);
  const double flux = oracle::simpson([&](double x) { return probability_current(psi, x, t).value; }, -0.4999, 0.4999, 4000);
  CHECK(flux == doctest::Approx(rate).epsilon(1e-5));
  // the sloshing is genuinely non-zero
  CHECK(std::fabs(rate) > 0.1);
}

TEST_CASE("node of the equal-weight superposition is singular") {
  const double w = 1.0 / std::sqrt(2.0);
  const auto psi = mixed(w, w);
  CHECK(bohm_velocity(psi, -1.0 / 6.0, 0.0).singular);
  CHECK_FALSE(bohm_velocity(psi, 0.1, 0.0).singular);
  CHECK_THROWS_AS(bohm_trajectory(psi, -1.0 / 6.0, 0.0, 1.0, 1e-3), InvalidArgument);
}

TEST_CASE("Bohm trajectory argument checks") {
  const auto psi = moving_plane_wave();
  CHECK_THROWS_AS(bohm_trajectory(psi, 0.5, 0.0, 1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(bohm_trajectory(psi, 0.5, 1.0, 1.0, 1e-3), InvalidArgument);
  CHECK_THROWS_AS(bohm_trajectory(psi, 0.0, 0.0, 1.0, 1e-3), InvalidArgument);
}

TEST_CASE("stationary Bohm particle does not move") {
  const auto psi = stationary(box_eigenstate(1, 1.0), box_energy(1, 1.0));
  for (double x0 : {-0.3, 0.0, 0.41}) {
    const auto b = bohm_trajectory(psi, x0, 0.0, 2.0, 0.01);
    CHECK_FALSE(b.halted);
    REQUIRE(b.samples.size() == 201);
    CHECK(b.samples.back().t == 2.0);
    for (const auto& s : b.samples) REQUIRE(std::fabs(s.x - x0) < 1e-12);
  }
}

TEST_CASE("plane-wave Bohm trajectory moves at hbar k / m and halts at the edge") {
  const auto psi = moving_plane_wave();
  const auto b = bohm_trajectory(psi, 0.05, 0.0, 0.1, 1e-3);
  CHECK_FALSE(b.halted);
  for (const auto& s : b.samples) REQUIRE(s.x == doctest::Approx(0.05 + 2.0 * oracle::pi * s.t).epsilon(1e-10));
  for (std::size_t i = 1; i < b.samples.size(); ++i) REQUIRE(b.samples[i].t > b.samples[i - 1].t);

  const auto edge = bohm_trajectory(psi, 0.05, 0.0, 1.0, 1e-3);
  CHECK(edge.halted);
  CHECK_FALSE(edge.halt_reason.empty());
  CHECK(edge.samples.back().x < 1.0);
  CHECK(edge.samples.back().x > 0.99);
}

TEST_CASE("RK4 convergence on a sloshing superposition") {
  const double a = 0.95;
  const auto psi = mixed(a, std::sqrt(1.0 - a * a));
  const double fine = 1.0 / 25600.0;
  const auto reference = bohm_trajectory(psi, 0.0, 0.0, 0.8, fine);
  REQUIRE_FALSE(reference.halted);
  // global error: sup over the shared time points
  const auto error = [&](double dt) {
    const auto b = bohm_trajectory(psi, 0.0, 0.0, 0.8, dt);
    const auto stride = static_cast<std::size_t>(std::lround(dt / fine));
    double worst = 0.0;
    for (std::size_t i = 0; i < b.samples.size(); ++i) {
      worst = std::max(worst, std::fabs(b.samples[i].x - reference.samples[i * stride].x));
    }
    return worst;
  };
  const double ratio = error(0.01) / error(0.005);
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
  const auto end = [&](double dt) { return bohm_trajectory(psi, 0.0, 0.0, 0.8, dt).samples.back().x; };
  CHECK(std::fabs(end(2e-3) - end(1e-3)) < 1e-8);
}

TEST_CASE("compare: identical paths have zero divergence") {
  const auto wf = box_eigenstate(1, 1.0);
  SamplingOptions opt;
  opt.n = 101;
  const auto f = sample_trajectory(wf, PhysicalParams{}, opt);
  BohmTrajectory b;
  for (const auto& s : f.samples) {
    if (std::isfinite(s.v)) b.samples.push_back({s.t, s.x, s.v});
  }
  const auto r = compare(f, b);
  CHECK(r.max_gap < 1e-15);
  CHECK(r.mean_gap < 1e-15);
}

TEST_CASE("compare: disjoint spans are rejected") {
  const auto wf = box_eigenstate(1, 1.0);
  const auto f = sample_trajectory(wf, PhysicalParams{}, SamplingOptions{});
  const auto psi = stationary(wf, box_energy(1, 1.0));
  const auto b = bohm_trajectory(psi, 0.0, 5.0, 6.0, 0.1);
  CHECK_THROWS_AS(compare(f, b), InvalidArgument);
}

TEST_CASE("compare: equal slopes give a constant gap") {
  const double k = 2.0 * oracle::pi;
  const auto wf = plane_wave(k, 1.0);
  const PhysicalParams params{1.0, 1.0, 1.0 / k, 100.0};  // L / T = hbar k / m
  SamplingOptions opt;
  opt.n = 201;
  const auto f = sample_trajectory(wf, params, opt);
  const auto b = bohm_trajectory(stationary(wf, 0.5 * k * k), 0.1, 0.0, 0.14, 1e-3);
  const auto r = compare(f, b);
  REQUIRE(!r.rows.empty());
  for (const auto& row : r.rows) {
    REQUIRE(row.gap == doctest::Approx(0.1).epsilon(1e-8));
    REQUIRE(row.v_classical == doctest::Approx(row.v_bohm).epsilon(1e-8));
  }
  CHECK(r.t_end == doctest::Approx(0.14).epsilon(1e-12));
}

TEST_CASE("compare: stationary state, static Bohm vs traversing classical path") {
  const auto wf = box_eigenstate(1, 1.0);
  SamplingOptions opt;
  opt.n = 401;
  opt.mode = Mode::periodic;
  const auto f = sample_trajectory(wf, PhysicalParams{}, opt);
  const auto b = bohm_trajectory(stationary(wf, box_energy(1, 1.0)), 0.0, 0.0, 2.0, 0.01);
  const auto r = compare(f, b);
  CHECK(r.max_gap > 0.49);
  CHECK(r.max_gap <= 0.5);
  CHECK(r.mean_gap > 0.1);
  for (const auto& row : r.rows) REQUIRE(row.v_bohm == 0.0);
}
