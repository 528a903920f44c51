#include <catch2/catch_amalgamated.hpp>

#include "oracle_helpers.hpp"
#include "pilotwave/pilotwave.hpp"

using namespace pw;

namespace {

ScenarioConfig small_crossing() {
  ScenarioConfig c = default_config("crossing");
  c.trajectories = 60;
  c.equivariance_samples = 400;
  c.plot_trajectories = 10;
  c.dump_times.clear();
  return c;
}

}  // namespace

TEST_CASE("crossing: the empty wave takes the particle") {
  auto rep = run_crossing(small_crossing());
  CHECK(rep.swap_fraction == 1.0);
  CHECK(rep.axis_crossings == 0);
  CHECK(rep.meet_time == Catch::Approx(10.0).margin(0.5));
  CHECK(rep.non_crossing.pass);
  CHECK(rep.conditions.has_environment == false);
  CHECK(rep.conditions.record_orthogonality == 0.0);
  CHECK(rep.conditions.inside_fraction == rep.swap_fraction);
  CHECK(rep.conditions.displacement_sigma == 0.0);
  CHECK(rep.norm_drift < 1e-9);
  CHECK(rep.escaped == 0);
}

TEST_CASE("crossing swap fraction is translation invariant") {
  ScenarioConfig base = small_crossing();
  base.points_x = 512;
  base.x_min = -40.0;
  base.x_max = 40.0;
  base.packet_center = -8.0;
  base.t_end = 12.0;
  base.trajectories = 40;
  base.equivariance_samples = 0;
  auto rep0 = run_crossing(base);

  ScenarioConfig shifted = base;
  shifted.offset = 3.0;
  auto rep1 = run_crossing(shifted);

  CHECK(rep0.swap_fraction == rep1.swap_fraction);
  CHECK(rep0.axis_crossings == rep1.axis_crossings);
}

TEST_CASE("crossing rejects geometry that cannot cross in time") {
  ScenarioConfig c = small_crossing();
  c.t_end = 4.0;  // packets meet only at t = 10
  c.equivariance_samples = 0;
  c.trajectories = 4;
  CHECK_THROWS_AS(run_crossing(c), Error);
}

TEST_CASE("fast recorder with the gate off reduces to the crossing") {
  // Shared reduced geometry so the two scenarios run on identical x grids.
  ScenarioConfig fast = default_config("fast_recorder");
  fast.points_x = 256;
  fast.points_y = 64;
  fast.coupling = 0.0;
  fast.trajectories = 100;
  fast.equivariance_samples = 0;
  fast.plot_trajectories = 6;
  fast.dump_times.clear();
  auto rep_fast = run_fast_recorder(fast);

  ScenarioConfig cross = default_config("crossing");
  cross.points_x = 256;
  cross.x_min = fast.x_min;
  cross.x_max = fast.x_max;
  cross.dt = fast.dt;
  cross.t_end = fast.t_end;
  cross.packet_center = fast.packet_center;
  cross.packet_sigma = fast.packet_sigma;
  cross.packet_wavevector = fast.packet_wavevector;
  cross.seed = fast.seed;
  cross.trajectories = 100;
  cross.equivariance_samples = 0;
  cross.plot_trajectories = 6;
  cross.dump_times.clear();
  auto rep_cross = run_crossing(cross);

  CHECK(rep_cross.swap_fraction == 1.0);
  CHECK(rep_fast.swap_fraction == rep_cross.swap_fraction);
}

TEST_CASE("spin recorder: record and trajectory disagree") {
  ScenarioConfig c = default_config("spin_recorder");
  c.trajectories = 60;
  c.equivariance_samples = 300;
  c.plot_trajectories = 10;
  c.dump_times.clear();
  auto rep = run_spin_recorder(c);

  CHECK(rep.flipped_weight >= 0.99);
  CHECK(rep.swap_fraction > 0.99);
  CHECK(rep.trajectory_record_mismatch > 0.99);
  CHECK(rep.non_crossing.pass);
  // Conditions: perfect record, particle inside the formerly empty wave,
  // record density did not move.
  CHECK(rep.conditions.record_orthogonality >= 0.99);
  CHECK(rep.conditions.inside_fraction == rep.swap_fraction);
  CHECK(rep.conditions.displacement_sigma <= 0.1);
}

TEST_CASE("spin recorder with zero flip angle reduces to the crossing") {
  ScenarioConfig c = default_config("spin_recorder");
  c.coupling = 0.0;
  c.trajectories = 40;
  c.equivariance_samples = 0;
  c.plot_trajectories = 6;
  c.dump_times.clear();
  auto rep = run_spin_recorder(c);
  CHECK(rep.swap_fraction == 1.0);
  CHECK(rep.trajectory_record_mismatch == 0.0);
  CHECK(rep.flipped_weight < 1e-12);
}

TEST_CASE("spin recorder rejects a misconfigured flip angle") {
  ScenarioConfig c = default_config("spin_recorder");
  c.coupling *= 0.5;  // accumulated angle pi/2: partial flip
  c.trajectories = 4;
  c.equivariance_samples = 0;
  CHECK_THROWS_AS(run_spin_recorder(c), Error);
}

TEST_CASE("protective measurement at reduced duration") {
  ScenarioConfig c = default_config("protective");
  c.t_end = 2.0;
  c.ramp_duration = 2.0;
  c.probe_strength = 0.25;
  c.equivariance_samples = 0;
  c.dump_times.clear();
  auto rep = run_protective(c);

  CHECK(rep.ground_state_energy == Catch::Approx(kPi * kPi / 2.0).epsilon(0.01));
  CHECK(rep.adiabatic_fidelity >= 0.99);
  CHECK(rep.pointer_shift_relative_error < 0.2);
  CHECK(rep.max_bohm_displacement < 0.05 * std::abs(c.point_b - c.point_a));
  CHECK(rep.pointer_shift > 0.0);

  // Prediction cross-check against the analytic density quadrature.
  const double window_density = oracle::simpson(
      [&](double x) {
        return oracle::box_density(x) * smooth_window(x, c.point_b, c.probe_half_width);
      },
      c.point_b - c.probe_half_width, c.point_b + c.probe_half_width);
  const double g_int = c.probe_strength * 0.5 * c.ramp_duration;
  CHECK(rep.pointer_shift_predicted ==
        Catch::Approx(g_int * window_density).epsilon(0.02));
}

TEST_CASE("protective with the probe off does nothing") {
  ScenarioConfig c = default_config("protective");
  c.t_end = 1.0;
  c.ramp_duration = 1.0;
  c.probe_strength = 0.0;
  c.equivariance_samples = 0;
  c.dump_times.clear();
  auto rep = run_protective(c);
  CHECK(std::abs(rep.pointer_shift) < 1e-8);
  CHECK(rep.max_bohm_displacement < 1e-6);
}

TEST_CASE("scenario reports serialize deterministically") {
  ScenarioConfig c = small_crossing();
  c.trajectories = 30;
  c.equivariance_samples = 200;
  auto rep1 = run_crossing(c);
  auto rep2 = run_crossing(c);
  CHECK(report_to_json(rep1) == report_to_json(rep2));
  CHECK(trajectories_to_csv(rep1.plot_trajectories, 1) ==
        trajectories_to_csv(rep2.plot_trajectories, 1));
}

TEST_CASE("config validation names the offending field") {
  ScenarioConfig c = small_crossing();
  c.packet_sigma = -1.0;
  try {
    run_crossing(c);
    FAIL("expected validation error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::validation_error);
    CHECK(std::string(e.what()).find("packets.sigma") != std::string::npos);
  }
}
