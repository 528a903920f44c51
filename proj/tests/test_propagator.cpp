#include <catch2/catch_amalgamated.hpp>

#include "oracle_helpers.hpp"
#include "pilotwave/pilotwave.hpp"

using namespace pw;

namespace {

Potential default_box() {
  Potential pot;
  pot.add(BoxTerm{});
  return pot;
}

Grid box_grid() { return make_grid_1d(224, -0.375, 1.375); }

}  // namespace

TEST_CASE("free Gaussian dispersion matches the analytic width") {
  auto grid = make_grid_1d(1024, -25.0, 25.0);
  GaussianPacketSpec s;
  auto psi = build_state({s}, grid);
  auto rec = evolve(psi, Potential::zero(), 0.0, 2.0, 0.002);
  CHECK(position_std(rec.frames.back(), 0) ==
        Catch::Approx(std::sqrt(2.0)).margin(1e-6));
  CHECK(position_std(rec.frames.back(), 0) ==
        Catch::Approx(oracle::free_gaussian_sigma(1.0, 2.0)).margin(1e-6));
  // k = 0 packet: <x> pinned by symmetric dispersion.
  CHECK(std::abs(mean_position(rec.frames.back(), 0)) < 1e-10);
}

TEST_CASE("evolve with t1 == t0 returns the initial frame only") {
  auto grid = make_grid_1d(256, -20.0, 20.0);
  GaussianPacketSpec s;
  auto psi = build_state({s}, grid);
  auto rec = evolve(psi, Potential::zero(), 0.0, 0.0, 0.01);
  REQUIRE(rec.frames.size() == 1);
  CHECK(std::abs(std::abs(overlap(rec.frames[0], psi)) - 1.0) < 1e-14);
}

TEST_CASE("spectral stepping is unitary over many steps") {
  auto grid = make_grid_1d(256, -20.0, 20.0);
  GaussianPacketSpec s;
  auto psi = build_state({s}, grid);
  auto rec = evolve(psi, Potential::zero(), 0.0, 10.0, 0.001);  // 1e4 steps
  CHECK(rec.norm_drift < 1e-9);
  CHECK_FALSE(rec.drift_flagged);
}

TEST_CASE("time reversal by conjugation recovers the initial state") {
  auto grid = make_grid_1d(512, -25.0, 25.0);
  GaussianPacketSpec s;
  s.wavevector = {1.0, 0.0};
  auto psi = build_state({s}, grid);
  WaveFunction fwd = psi;
  Stepper st(grid, psi.masses(), 0.005);
  for (int i = 0; i < 1000; ++i) st.step_inplace(fwd, Potential::zero(), 0.005 * i);
  WaveFunction back = fwd.conjugated();
  for (int i = 0; i < 1000; ++i) st.step_inplace(back, Potential::zero(), 0.005 * i);
  back = back.conjugated();
  CHECK(std::abs(overlap(back, psi)) > 1.0 - 1e-8);
}

TEST_CASE("harmonic oscillator: coherent-state mean and ground state") {
  auto grid = make_grid_1d(512, -16.0, 16.0);
  Potential pot;
  pot.add(HarmonicTerm{0.0, 1.0, 0});

  SECTION("Ehrenfest oscillation of a displaced packet") {
    GaussianPacketSpec s;
    s.center = {2.0, 0.0};
    s.sigma = {1.0 / std::sqrt(2.0), 1.0};  // oscillator width for omega = 1
    auto psi = build_state({s}, grid);
    auto rec = evolve(psi, pot, 0.0, 2.0 * kPi, 0.002);
    for (std::size_t i = 0; i < rec.frames.size(); i += 314) {
      const double t = rec.time(i);
      CHECK(mean_position(rec.frames[i], 0) ==
            Catch::Approx(2.0 * std::cos(t)).margin(1e-4));
    }
  }

  SECTION("imaginary-time relaxation hits E0 = 1/2") {
    auto gs = relax_ground_state(pot, grid, 1e-10, {.dtau = 1e-3});
    CHECK(gs.energy == Catch::Approx(0.5).margin(1e-4));
  }

  SECTION("energy is conserved under evolution") {
    GaussianPacketSpec s;
    s.center = {2.0, 0.0};
    auto psi = build_state({s}, grid);
    auto vfn = [&pot](const Point& p, double t) { return pot.value(p, t); };
    const double e0 = mean_energy(psi, vfn);
    auto rec = evolve(psi, pot, 0.0, 10.0, 0.001);
    const double e1 = mean_energy(rec.frames.back(), vfn);
    CHECK(std::abs(e1 - e0) / std::abs(e0) < 1e-6);
  }
}

TEST_CASE("soft-wall box reproduces the ideal ground state") {
  auto grid = box_grid();
  auto pot = default_box();
  auto gs = relax_ground_state(pot, grid, 1e-10);

  CHECK(gs.energy == Catch::Approx(kPi * kPi / 2.0).epsilon(0.01));

  // Density profile vs 2 sin^2(pi x), pointwise within 2% of the peak, away
  // from the walls.
  FieldView view(gs.psi);
  for (double x = 0.1; x <= 0.9; x += 0.05)
    CHECK(view.sample({x, 0.0}).rho ==
          Catch::Approx(oracle::box_density(x)).margin(0.04));

  // Midpoint density: 2 sin^2(pi/2) = 2 within 1%.
  CHECK(density(gs.psi, {0.5, 0.0}) == Catch::Approx(2.0).epsilon(0.01));

  // Symmetric potential, symmetric ground state about the box center.
  for (double d = 0.05; d < 0.45; d += 0.1)
    CHECK(std::abs(density(gs.psi, {0.5 + d, 0.0}) -
                   density(gs.psi, {0.5 - d, 0.0})) < 1e-6);
}

TEST_CASE("box ground state is stationary under real-time evolution") {
  auto grid = box_grid();
  auto pot = default_box();
  auto gs = relax_ground_state(pot, grid, 1e-10);

  // One period of the ground-state phase.
  const double period = 2.0 * kPi / gs.energy;
  const double dt = 4e-5;
  Stepper st(grid, {1.0, 1.0}, dt);
  WaveFunction psi = gs.psi;
  const auto steps = static_cast<std::size_t>(period / dt);
  for (std::size_t i = 0; i < steps; ++i) st.step_inplace(psi, pot, dt * i);
  CHECK(std::abs(overlap(psi, gs.psi)) > 1.0 - 1e-8);
}

TEST_CASE("stability guard rejects too-large dt") {
  auto grid = box_grid();
  auto pot = default_box();
  GaussianPacketSpec s;
  s.center = {0.5, 0.0};
  s.sigma = {0.05, 1.0};
  auto psi = build_state({s}, grid);
  CHECK_THROWS_AS(step(psi, pot, 0.0, 1e-4), Error);  // 1e4 * 1e-4 = 1 >= 0.5
  CHECK_NOTHROW(step(psi, pot, 0.0, 4e-5));
}

TEST_CASE("adiabatic bump keeps the instantaneous ground state") {
  auto grid = box_grid();
  Potential pot = default_box();
  BumpTerm bump;
  bump.center = 0.7;
  bump.half_width = 0.05;
  bump.strength = 0.5;
  bump.ramp = ramp_sin_squared(0.0, 2.0);
  pot.add(bump);

  auto gs = relax_ground_state(default_box(), grid, 1e-10);
  WaveFunction psi = gs.psi;
  const double dt = 4e-5;
  Stepper st(grid, {1.0, 1.0}, dt);
  for (std::size_t i = 0; i < 50000; ++i) st.step_inplace(psi, pot, dt * i);
  // Ramp returned to zero: the state must be back in the ground state.
  CHECK(std::abs(overlap(psi, gs.psi)) > 0.999);
}

TEST_CASE("spin flip interaction") {
  auto grid = make_grid_1d(4096, -50.0, 50.0);
  InteractionWindow w;
  w.target = InteractionWindow::Target::spin_flip;
  w.center = 0.0;
  w.half_width = 40.0;
  w.coupling = kPi;  // full flip after unit accumulated time

  GaussianPacketSpec s;
  s.sigma = {0.1, 1.0};
  auto psi = build_state({s}, grid, 2);

  SECTION("packet outside the window is untouched") {
    InteractionWindow far = w;
    far.center = 45.0;
    far.half_width = 2.0;
    auto out = apply_interaction(psi, far, 0.0, 0.5);
    CHECK(std::abs(std::abs(overlap(out, psi)) - 1.0) < 1e-12);
  }

  SECTION("accumulated angle pi flips the level completely") {
    WaveFunction out = psi;
    const double dt = 0.01;
    for (int i = 0; i < 100; ++i) out = apply_interaction(out, w, dt * i, dt);
    double w0 = 0.0;
    for (std::size_t i = 0; i < grid.total_points(); ++i)
      w0 += std::norm(out.at(0, i));
    w0 *= grid.spacing(0);
    CHECK(w0 < 1e-6);
    CHECK(std::abs(out.norm() - 1.0) < 1e-12);
  }

  SECTION("target mismatch on a spinless state") {
    auto plain = build_state({s}, grid, 1);
    CHECK_THROWS_AS(apply_interaction(plain, w, 0.0, 0.1), Error);
  }
}

TEST_CASE("pointer interactions: momentum kick and position shift") {
  auto grid = make_grid_2d(64, -30.0, 30.0, 128, -20.0, 20.0);
  GaussianPacketSpec s;
  s.sigma = {0.3, 1.0};
  auto psi = build_state({s}, grid);

  InteractionWindow w;
  w.center = 0.0;
  w.half_width = 20.0;

  SECTION("momentum kick lambda int = 0.3") {
    w.target = InteractionWindow::Target::pointer_kick;
    w.coupling = 0.3;
    WaveFunction out = psi;
    const double dt = 0.01;
    for (int i = 0; i < 100; ++i) out = apply_interaction(out, w, dt * i, dt);
    CHECK(mean_momentum(out, 1) - mean_momentum(psi, 1) ==
          Catch::Approx(-0.3).margin(1e-3));
    CHECK(std::abs(out.norm() - 1.0) < 1e-12);
  }

  SECTION("position displacement lambda int = 3") {
    w.target = InteractionWindow::Target::pointer_shift;
    w.coupling = 3.0;
    WaveFunction out = psi;
    const double dt = 0.01;
    for (int i = 0; i < 100; ++i) out = apply_interaction(out, w, dt * i, dt);
    CHECK(mean_position(out, 1) - mean_position(psi, 1) ==
          Catch::Approx(3.0).margin(1e-2));
    CHECK(std::abs(out.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("relax rejects time-dependent potentials") {
  auto grid = make_grid_1d(256, -10.0, 10.0);
  Potential pot;
  BumpTerm bump;
  bump.strength = 1.0;
  bump.half_width = 1.0;
  bump.ramp = ramp_sin_squared(0.0, 1.0);
  pot.add(bump);
  CHECK_THROWS_AS(relax_ground_state(pot, grid, 1e-8), Error);
}
