#include <catch2/catch_amalgamated.hpp>

#include "oracle_helpers.hpp"
#include "pilotwave/pilotwave.hpp"

using namespace pw;

TEST_CASE("velocity field basics") {
  auto grid = make_grid_1d(1024, -50.0, 50.0);

  SECTION("mirror packets: velocity vanishes at the symmetry point") {
    GaussianPacketSpec a, b;
    a.center = {-3.0, 0.0};
    b.center = {3.0, 0.0};
    a.sigma = b.sigma = {1.0, 1.0};
    a.wavevector = {1.0, 0.0};
    b.wavevector = {-1.0, 0.0};
    auto psi = build_state({a, b}, grid);
    CHECK(std::abs(velocity_field(psi, {0.0, 0.0})[0]) < 1e-10);
  }

  SECTION("plane-wave limit at the envelope peak") {
    GaussianPacketSpec s;
    s.wavevector = {1.5, 0.0};
    auto psi = build_state({s}, grid);
    CHECK(velocity_field(psi, {0.0, 0.0})[0] == Catch::Approx(1.5).margin(1e-4));
  }

  SECTION("node singularity raises") {
    GaussianPacketSpec a, b;
    a.wavevector = {2.0, 0.0};
    b.wavevector = {-2.0, 0.0};
    auto psi = build_state({a, b}, grid);  // ~cos(2x): node at pi/4
    CHECK_THROWS_AS(velocity_field(psi, {kPi / 4.0, 0.0}), Error);
  }
}

TEST_CASE("conditional guidance: disjoint pointer branches (Eq. 3 regime)") {
  auto grid = make_grid_2d(256, -30.0, 30.0, 128, -15.0, 25.0);
  // Two packets overlapping in x but entangled with disjoint pointer states.
  GaussianPacketSpec one, two;
  one.center = {0.0, 0.0};
  one.sigma = two.sigma = {1.0, 1.0};
  one.wavevector = {1.5, 0.0};
  two.center = {0.0, 12.0};  // pointer displaced 12 sigma_y
  two.wavevector = {-1.5, 0.0};
  auto psi = build_state({one, two}, grid);

  // At pointer positions inside branch one's support, only branch one guides.
  for (double x : {-0.4, 0.0, 0.3})
    CHECK(velocity_field(psi, {x, 0.0})[0] == Catch::Approx(1.5).epsilon(0.01));
  // Inside branch two's pointer support the other branch takes over.
  CHECK(velocity_field(psi, {0.0, 12.0})[0] == Catch::Approx(-1.5).epsilon(0.01));
}

TEST_CASE("trajectory oracles on free packets") {
  auto grid = make_grid_1d(1024, -25.0, 25.0);

  SECTION("spreading Gaussian carries points as x0 sigma(t)/sigma0") {
    GaussianPacketSpec s;
    auto psi = build_state({s}, grid);
    auto rec = evolve(psi, Potential::zero(), 0.0, 2.0, 0.002);
    VelocityTrack track(rec);
    for (double x0 : {1.0, -0.5}) {
      auto traj = integrate_trajectory(track, rec, BohmConfig{{x0, 0.0}, 0.0}, 0.1);
      const double expected = x0 * oracle::free_gaussian_sigma(1.0, 2.0);
      CHECK(traj.positions.back()[0] == Catch::Approx(expected).margin(1e-3));
      CHECK(traj.flags.escaped == false);
    }
  }

  SECTION("moving packet: center rides at the group velocity") {
    GaussianPacketSpec s;
    s.center = {-5.0, 0.0};
    s.wavevector = {1.0, 0.0};
    auto psi = build_state({s}, grid);
    auto rec = evolve(psi, Potential::zero(), 0.0, 10.0, 0.002);
    auto traj = integrate_trajectory(rec, BohmConfig{{-5.0, 0.0}, 0.0}, 0.5);
    for (std::size_t i = 0; i < traj.times.size(); ++i)
      CHECK(traj.positions[i][0] ==
            Catch::Approx(-5.0 + traj.times[i]).margin(1e-3));
  }
}

TEST_CASE("trajectory leaving the grid is truncated and flagged") {
  auto grid = make_grid_1d(256, -20.0, 20.0);
  GaussianPacketSpec s;
  s.center = {12.0, 0.0};
  s.sigma = {1.0, 1.0};
  s.wavevector = {5.0, 0.0};
  auto psi = build_state({s}, grid);
  auto rec = evolve(psi, Potential::zero(), 0.0, 1.6, 0.002);
  auto traj = integrate_trajectory(rec, BohmConfig{{12.5, 0.0}, 0.0}, 0.1);
  CHECK(traj.flags.escaped);
  CHECK(traj.times.back() < 1.6);
}

TEST_CASE("node handling keeps trajectories finite") {
  auto grid = make_grid_1d(1024, -50.0, 50.0);
  GaussianPacketSpec a, b;
  a.wavevector = {2.0, 0.0};
  b.wavevector = {-2.0, 0.0};
  auto psi = build_state({a, b}, grid);  // standing wave with exact nodes
  EvolutionRecord rec;
  rec.t0 = 0.0;
  rec.dt = 0.01;
  rec.frames = {psi, psi, psi};
  auto traj = integrate_trajectory(rec, BohmConfig{{kPi / 4.0, 0.0}, 0.0}, 0.01);
  CHECK(traj.flags.node_encounters > 0);
  for (const auto& p : traj.positions) CHECK(std::isfinite(p[0]));
}

TEST_CASE("report_dt below record dt is rejected") {
  auto grid = make_grid_1d(256, -20.0, 20.0);
  GaussianPacketSpec s;
  auto psi = build_state({s}, grid);
  auto rec = evolve(psi, Potential::zero(), 0.0, 0.1, 0.01);
  CHECK_THROWS_AS(integrate_trajectory(rec, BohmConfig{{0.0, 0.0}, 0.0}, 0.001),
                  Error);
}

TEST_CASE("quantum-equilibrium sampling") {
  auto grid = make_grid_1d(1024, -50.0, 50.0);

  SECTION("unit Gaussian moments at n = 1e4") {
    GaussianPacketSpec s;
    auto psi = build_state({s}, grid);
    auto pts = sample_initial_positions(psi, 10000, 4242);
    double mean = 0.0, var = 0.0;
    for (const auto& p : pts) mean += p.q[0];
    mean /= static_cast<double>(pts.size());
    for (const auto& p : pts) var += sqr(p.q[0] - mean);
    var /= static_cast<double>(pts.size());
    CHECK(std::abs(mean) < 0.03);
    CHECK(std::abs(std::sqrt(var) - 1.0) < 0.03);
  }

  SECTION("same seed reproduces the same points") {
    GaussianPacketSpec s;
    auto psi = build_state({s}, grid);
    auto a = sample_initial_positions(psi, 500, 7);
    auto b = sample_initial_positions(psi, 500, 7);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].q[0] == b[i].q[0]);
    auto c = sample_initial_positions(psi, 500, 8);
    int differing = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i].q[0] != c[i].q[0]) ++differing;
    CHECK(differing > 450);
  }

  SECTION("two disjoint packets split the ensemble evenly") {
    GaussianPacketSpec a, b;
    a.center = {-10.0, 0.0};
    b.center = {10.0, 0.0};
    auto psi = build_state({a, b}, grid);
    auto pts = sample_initial_positions(psi, 10000, 99);
    std::size_t left = 0;
    for (const auto& p : pts)
      if (p.q[0] < 0.0) ++left;
    CHECK(std::abs(static_cast<double>(left) / 10000.0 - 0.5) < 0.015);
  }
}

TEST_CASE("2D sampling: product fast path and rejection fallback") {
  auto grid = make_grid_2d(128, -20.0, 20.0, 128, -20.0, 20.0);

  SECTION("product state uses per-axis inverse CDF deterministically") {
    GaussianPacketSpec s;
    s.sigma = {1.0, 2.0};
    auto psi = build_state({s}, grid, 1, {1.0, 3.0});
    auto pts = sample_initial_positions(psi, 4000, 11);
    double mx = 0.0, my = 0.0;
    for (const auto& p : pts) {
      mx += p.q[0];
      my += p.q[1];
    }
    CHECK(std::abs(mx / 4000.0) < 0.06);
    CHECK(std::abs(my / 4000.0) < 0.12);
    auto again = sample_initial_positions(psi, 4000, 11);
    CHECK(again[123].q[0] == pts[123].q[0]);
    CHECK(again[123].q[1] == pts[123].q[1]);
  }

  SECTION("entangled superposition falls back to rejection") {
    GaussianPacketSpec one, two;
    one.center = {-4.0, -4.0};
    two.center = {4.0, 4.0};
    auto psi = build_state({one, two}, grid);
    auto pts = sample_initial_positions(psi, 4000, 5);
    // Entanglement: x and y signs coincide for every draw.
    std::size_t agree = 0, upper = 0;
    for (const auto& p : pts) {
      if (p.q[0] * p.q[1] > 0.0) ++agree;
      if (p.q[0] > 0.0) ++upper;
    }
    CHECK(static_cast<double>(agree) / 4000.0 > 0.99);
    CHECK(std::abs(static_cast<double>(upper) / 4000.0 - 0.5) < 0.025);
    auto again = sample_initial_positions(psi, 4000, 5);
    CHECK(again[77].q[0] == pts[77].q[0]);
  }
}

TEST_CASE("equivariance through free spreading") {
  auto grid = make_grid_1d(1024, -40.0, 40.0);
  GaussianPacketSpec s;
  auto psi = build_state({s}, grid);
  auto rec = evolve(psi, Potential::zero(), 0.0, 3.0, 0.005);
  VelocityTrack track(rec);

  auto pts = sample_initial_positions(psi, 2000, 31415);
  std::vector<double> finals(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    auto traj = integrate_trajectory(track, rec, pts[i], 3.0, {}, i);
    finals[i] = traj.positions.back()[0];
  });
  auto res = equivariance_test(finals, rec.frames.back(), 0, 0.05);
  CHECK(res.pass);
}
