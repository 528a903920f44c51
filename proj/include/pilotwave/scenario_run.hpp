#pragma once

#include <limits>

#include "pilotwave/scenario.hpp"

namespace pw {
namespace detail {

// Streaming scenario propagation. Branch states are stepped one dt at a
// time; the total state (sum of in-total branches) is snapshotted into a
// short VelocityTrack ring every half trajectory-stride, and the trajectory
// ensembles advance one RK4 step per stride with stage times landing exactly
// on retained frames. Memory stays at a few frames regardless of run length.
struct EngineSetup {
  Grid grid;
  Point masses{1.0, 1.0};
  std::vector<WaveFunction> branches;
  std::vector<bool> in_total;          // branch participates in the total state
  std::vector<bool> interacting;       // branch sees the interaction windows
  Potential potential;
  std::vector<InteractionWindow> interactions;
  double dt = 0.01;
  double t_end = 1.0;
  std::size_t traj_stride = 2;         // even; trajectory step h = stride * dt
  std::size_t report_every = 1;        // record positions every N trajectory steps
  std::vector<Point> swap_points;
  std::vector<Point> eq_points;
  double window_center = 0.0;          // for min-distance tracking (x axis)
  double window_half_width = 0.0;
  double axis = 0.0;                   // symmetry axis for sign-crossing counts
  bool track_axis_crossings = false;
  bool detect_meet = false;            // capture branches when x-centroids meet
  bool pointer_series = false;         // record <p_y>, <y> every trajectory step
  std::vector<double> dump_times;
  IntegratorOptions integrator;
};

struct EngineResult {
  std::vector<WaveFunction> final_branches;
  WaveFunction final_total;
  std::vector<Trajectory> swap_trajectories;
  std::vector<double> swap_min_window_distance;
  std::vector<bool> swap_crossed_axis;
  std::vector<Point> eq_final;
  std::vector<TrajectoryFlags> eq_flags;
  double norm_drift = 0.0;
  std::size_t steps = 0;
  double meet_time = -1.0;
  std::vector<WaveFunction> branches_at_meet;
  std::vector<std::pair<double, WaveFunction>> dumps;
  std::vector<std::array<double, 3>> pointer_series;
};

inline double branch_centroid_x(const WaveFunction& b) {
  auto m = marginal_density(b, 0);
  const Axis& ax = b.grid().axis(0);
  double s = 0.0, w = 0.0;
  for (int i = 0; i < ax.points; ++i) {
    s += ax.coord(i) * m[i];
    w += m[i];
  }
  return s / w;
}

inline EngineResult stream_run(const EngineSetup& setup) {
  const Grid& grid = setup.grid;
  require(setup.traj_stride >= 2 && setup.traj_stride % 2 == 0,
          ErrorCategory::validation_error, "trajectory stride must be even");
  setup.potential.validate(grid);

  EngineResult res;
  res.final_branches = setup.branches;
  auto& branches = res.final_branches;

  Stepper stepper(grid, setup.masses, setup.dt);
  stepper.guard(setup.potential);

  auto make_total = [&]() {
    WaveFunction total;
    bool first = true;
    for (std::size_t b = 0; b < branches.size(); ++b) {
      if (!setup.in_total[b]) continue;
      total = first ? branches[b] : superpose(total, branches[b]);
      first = false;
    }
    return total;
  };

  auto window_distance = [&](std::size_t j, double x) {
    if (setup.window_half_width <= 0.0) return;
    const double d =
        std::max(0.0, std::abs(x - setup.window_center) - setup.window_half_width);
    res.swap_min_window_distance[j] = std::min(res.swap_min_window_distance[j], d);
  };

  const std::size_t half = setup.traj_stride / 2;
  const auto n_steps =
      static_cast<std::size_t>(std::llround(setup.t_end / setup.dt));
  const double h = setup.dt * static_cast<double>(setup.traj_stride);

  VelocityTrack ring;
  WaveFunction total0 = make_total();
  ring.push(0.0, std::make_shared<FieldView>(total0));

  std::vector<Point> swap_q = setup.swap_points;
  std::vector<TrajectoryFlags> swap_flags(swap_q.size());
  std::vector<char> swap_active(swap_q.size(), 1);
  res.swap_trajectories.resize(swap_q.size());
  res.swap_min_window_distance.assign(swap_q.size(),
                                      std::numeric_limits<double>::infinity());
  res.swap_crossed_axis.assign(swap_q.size(), false);
  std::vector<double> axis_sign(swap_q.size(), 0.0);
  for (std::size_t i = 0; i < swap_q.size(); ++i) {
    res.swap_trajectories[i].seed = i;
    res.swap_trajectories[i].times.push_back(0.0);
    res.swap_trajectories[i].positions.push_back(swap_q[i]);
    axis_sign[i] = swap_q[i][0] - setup.axis >= 0.0 ? 1.0 : -1.0;
    window_distance(i, swap_q[i][0]);
  }

  res.eq_final = setup.eq_points;
  res.eq_flags.assign(res.eq_final.size(), TrajectoryFlags{});
  std::vector<char> eq_active(res.eq_final.size(), 1);

  auto maybe_dump = [&](double t, const WaveFunction& total) {
    for (double td : setup.dump_times)
      if (std::abs(t - td) < 0.5 * setup.dt) res.dumps.emplace_back(t, total);
  };
  maybe_dump(0.0, total0);
  if (setup.pointer_series && grid.dims() == 2)
    res.pointer_series.push_back(
        {0.0, mean_momentum(total0, 1), mean_position(total0, 1)});

  double prev_gap = 0.0;
  if (setup.detect_meet && branches.size() >= 2)
    prev_gap = branch_centroid_x(branches[1]) - branch_centroid_x(branches[0]);

  std::size_t traj_steps_done = 0;
  for (std::size_t i = 0; i < n_steps; ++i) {
    const double t = setup.dt * static_cast<double>(i);
    for (std::size_t b = 0; b < branches.size(); ++b) {
      stepper.step_inplace(branches[b], setup.potential, t);
      if (setup.interacting[b])
        for (const auto& w : setup.interactions)
          branches[b] = apply_interaction(branches[b], w, t, setup.dt);
    }
    const double t_now = setup.dt * static_cast<double>(i + 1);

    const bool retained = (i + 1) % half == 0;
    const bool meet_check = setup.detect_meet && res.meet_time < 0.0;
    WaveFunction total;
    bool have_total = false;
    auto ensure_total = [&]() -> const WaveFunction& {
      if (!have_total) {
        total = make_total();
        have_total = true;
      }
      return total;
    };

    if (retained) {
      ring.push(t_now, std::make_shared<FieldView>(ensure_total()));
      res.norm_drift = std::max(res.norm_drift, std::abs(total.norm() - 1.0));
    }
    for (double td : setup.dump_times)
      if (std::abs(t_now - td) < 0.5 * setup.dt) {
        maybe_dump(t_now, ensure_total());
        break;
      }

    if (meet_check && branches.size() >= 2) {
      const double gap =
          branch_centroid_x(branches[1]) - branch_centroid_x(branches[0]);
      if (gap * prev_gap < 0.0 || gap == 0.0) {
        res.meet_time = t_now;
        res.branches_at_meet = branches;
      }
      prev_gap = gap;
    }

    if ((i + 1) % setup.traj_stride == 0) {
      const double ta = t_now - h;
      parallel_for(swap_q.size(), [&](std::size_t j) {
        if (!swap_active[j]) return;
        advance_rk4(ring, swap_q[j], ta, h, setup.integrator, swap_flags[j]);
        if (!grid.contains(swap_q[j])) {
          swap_flags[j].escaped = true;
          swap_active[j] = 0;
          return;
        }
        window_distance(j, swap_q[j][0]);
        if (setup.track_axis_crossings) {
          const double s = swap_q[j][0] - setup.axis >= 0.0 ? 1.0 : -1.0;
          if (s != axis_sign[j]) res.swap_crossed_axis[j] = true;
        }
      });
      parallel_for(res.eq_final.size(), [&](std::size_t j) {
        if (!eq_active[j]) return;
        advance_rk4(ring, res.eq_final[j], ta, h, setup.integrator, res.eq_flags[j]);
        if (!grid.contains(res.eq_final[j])) {
          res.eq_flags[j].escaped = true;
          eq_active[j] = 0;
        }
      });
      ++traj_steps_done;

      if (traj_steps_done % setup.report_every == 0 || i + 1 == n_steps) {
        for (std::size_t j = 0; j < swap_q.size(); ++j) {
          if (!swap_active[j]) continue;
          res.swap_trajectories[j].times.push_back(t_now);
          res.swap_trajectories[j].positions.push_back(swap_q[j]);
        }
        if (setup.pointer_series && grid.dims() == 2) {
          const WaveFunction& tt = ensure_total();
          res.pointer_series.push_back(
              {t_now, mean_momentum(tt, 1), mean_position(tt, 1)});
        }
      }
      ring.drop_before(t_now);
    }
  }

  for (std::size_t j = 0; j < swap_q.size(); ++j)
    res.swap_trajectories[j].flags = swap_flags[j];
  res.final_total = make_total();
  res.steps = n_steps;
  return res;
}

// Mirror-pair packet specs for the interferometer scenarios: packet 1 at
// offset + center moving +k, packet 2 its mirror image.
inline std::vector<GaussianPacketSpec> mirror_packets(const ScenarioConfig& c,
                                                      double pointer_sigma = 0.0) {
  GaussianPacketSpec p1, p2;
  p1.center = {c.offset + c.packet_center, 0.0};
  p1.sigma = {c.packet_sigma, pointer_sigma > 0.0 ? pointer_sigma : 1.0};
  p1.wavevector = {c.packet_wavevector, 0.0};
  p2 = p1;
  p2.center[0] = c.offset - c.packet_center;
  p2.wavevector[0] = -c.packet_wavevector;
  return {p1, p2};
}

struct SwapStats {
  double swap_fraction = 0.0;
  std::vector<TrajectorySummary> summary;
  int axis_crossings = 0;
  int classification_ties = 0;
  long node_encounters = 0;
  long clamps = 0;
  int escaped = 0;
};

// Final-velocity-sign swap classification plus branch co-location diagnostics.
inline SwapStats classify_swap(const EngineResult& er, double initial_wavevector,
                               const std::vector<const WaveFunction*>& branch_states) {
  SwapStats out;
  FieldView final_view(er.final_total);
  std::vector<FieldView> branch_views;
  branch_views.reserve(branch_states.size());
  for (const auto* b : branch_states) branch_views.emplace_back(*b);

  const double eps_rel = 1e-12;
  std::size_t n_swapped = 0;
  for (std::size_t j = 0; j < er.swap_trajectories.size(); ++j) {
    const Trajectory& tr = er.swap_trajectories[j];
    TrajectorySummary row;
    row.seed = tr.seed;
    row.start = tr.positions.front();
    row.finish = tr.positions.back();
    row.flags = tr.flags;
    row.min_window_distance = er.swap_min_window_distance[j];
    row.crossed_axis = er.swap_crossed_axis[j];

    if (!tr.flags.escaped) {
      auto local = final_view.sample(row.finish);
      const double rho = std::max(local.rho, eps_rel * final_view.max_density());
      row.final_velocity_x = local.current[0] / rho;
      row.swapped = row.final_velocity_x * initial_wavevector < 0.0;
      if (!branch_views.empty()) {
        double total_b = 0.0;
        std::vector<double> rho_b(branch_views.size());
        for (std::size_t b = 0; b < branch_views.size(); ++b) {
          rho_b[b] = branch_views[b].sample(row.finish).rho;
          total_b += rho_b[b];
        }
        row.exit_branch = -1;
        for (std::size_t b = 0; b < branch_views.size(); ++b)
          if (rho_b[b] >= 0.99 * total_b) row.exit_branch = static_cast<int>(b);
        row.classification_tie = row.exit_branch < 0;
        if (row.classification_tie) ++out.classification_ties;
      }
    }

    if (row.swapped) ++n_swapped;
    if (row.crossed_axis) ++out.axis_crossings;
    out.node_encounters += row.flags.node_encounters;
    out.clamps += row.flags.clamps;
    if (row.flags.escaped) ++out.escaped;
    out.summary.push_back(row);
  }
  out.swap_fraction = er.swap_trajectories.empty()
                          ? 0.0
                          : static_cast<double>(n_swapped) /
                                static_cast<double>(er.swap_trajectories.size());
  return out;
}

// Non-crossing over every full-length 1D trajectory of the run.
inline NonCrossingResult check_non_crossing(const std::vector<Trajectory>& trajs) {
  std::size_t longest = 0;
  for (const auto& tr : trajs) longest = std::max(longest, tr.times.size());
  std::vector<Trajectory> full;
  for (const auto& tr : trajs)
    if (tr.times.size() == longest) full.push_back(tr);
  return non_crossing_check(full);
}

inline DistributionTest equivariance_of(const EngineResult& er,
                                        const WaveFunction& final_total) {
  std::vector<double> xs;
  xs.reserve(er.eq_final.size());
  for (std::size_t j = 0; j < er.eq_final.size(); ++j)
    if (!er.eq_flags[j].escaped) xs.push_back(er.eq_final[j][0]);
  DistributionTest dt;
  if (xs.size() >= 100) dt = equivariance_test(std::move(xs), final_total, 0);
  return dt;
}

// Branch x-supports (>= 1% of branch peak) at each dump time, via short
// re-propagation of branch records is avoided: supports come from the final
// and dump states captured by the engine.
inline void append_branch_support(ScenarioReport& rep,
                                  const std::vector<WaveFunction>& branches,
                                  double t) {
  for (std::size_t b = 0; b < branches.size(); ++b) {
    auto m = marginal_density(branches[b], 0);
    double peak = 0.0;
    for (double v : m) peak = std::max(peak, v);
    const Axis& ax = branches[b].grid().axis(0);
    double lo = ax.max, hi = ax.min;
    for (int i = 0; i < ax.points; ++i)
      if (m[i] >= 0.01 * peak) {
        lo = std::min(lo, ax.coord(i));
        hi = std::max(hi, ax.coord(i));
      }
    rep.branch_support.push_back({t, static_cast<double>(b), lo, hi});
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// crossing: two mirror packets meet head-on with no recorder. Trajectories
// sampled from packet 1 exit with the formerly empty packet; the swap
// fraction is read from final velocity signs.
// ---------------------------------------------------------------------------
inline ScenarioReport run_crossing(const ScenarioConfig& cfg) {
  validate_config(cfg);
  require(cfg.scenario == "crossing", ErrorCategory::validation_error,
          "config is not a crossing scenario");
  require(!cfg.two_dimensional(), ErrorCategory::validation_error,
          "crossing runs on a 1D grid");

  const Grid grid = make_grid_1d(cfg.points_x, cfg.x_min, cfg.x_max);
  auto packets = detail::mirror_packets(cfg);
  auto build = detail::build_branches(packets, grid, 1, {1.0, 1.0});

  detail::EngineSetup setup;
  setup.grid = grid;
  setup.branches = build.branches;
  setup.in_total = {true, true};
  setup.interacting = {false, false};
  setup.dt = cfg.dt;
  setup.t_end = cfg.t_end;
  setup.traj_stride = 2;
  setup.report_every = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(cfg.report_dt / (2.0 * cfg.dt))));
  setup.axis = cfg.offset;
  setup.track_axis_crossings = true;
  setup.detect_meet = true;
  setup.dump_times = cfg.dump_times;

  // Swap ensemble from the named packet (packet 1), equivariance ensemble
  // from the full initial state.
  WaveFunction packet1 = build_state({packets[0]}, grid);
  auto swap_pts = sample_initial_positions(packet1, cfg.trajectories, cfg.seed);
  setup.swap_points.reserve(swap_pts.size());
  for (const auto& p : swap_pts) setup.swap_points.push_back(p.q);
  if (cfg.equivariance_samples > 0) {
    auto eq_pts = sample_initial_positions(build.total, cfg.equivariance_samples,
                                           splitmix64(cfg.seed ^ 0x9d2c5680ULL));
    for (const auto& p : eq_pts) setup.eq_points.push_back(p.q);
  }

  auto er = detail::stream_run(setup);

  // Geometry validation: the packets must have crossed and separated.
  const double c1 = detail::branch_centroid_x(er.final_branches[0]);
  const double c2 = detail::branch_centroid_x(er.final_branches[1]);
  require(er.meet_time > 0.0 && c1 > c2 + 2.0 * cfg.packet_sigma,
          ErrorCategory::geometry_error,
          "packets failed to fully cross within the configured time");

  ScenarioReport rep;
  rep.config = cfg;
  rep.meet_time = er.meet_time;
  rep.steps = er.steps;
  rep.norm_drift = er.norm_drift;

  std::vector<const WaveFunction*> branch_ptrs{&er.final_branches[0],
                                               &er.final_branches[1]};
  auto stats = detail::classify_swap(er, cfg.packet_wavevector, branch_ptrs);
  rep.swap_fraction = stats.swap_fraction;
  rep.summary = std::move(stats.summary);
  rep.axis_crossings = stats.axis_crossings;
  rep.classification_ties = stats.classification_ties;
  rep.node_encounters = stats.node_encounters;
  rep.clamps = stats.clamps;
  rep.escaped = stats.escaped;
  rep.equivariance = detail::equivariance_of(er, er.final_total);

  ConditionInputs ci;
  ci.has_environment = false;  // no recorder, no record
  ci.swap_fraction = rep.swap_fraction;
  rep.conditions = analyze_conditions(ci);

  const int n_plot = std::min<int>(cfg.plot_trajectories,
                                   static_cast<int>(er.swap_trajectories.size()));
  rep.plot_trajectories.assign(er.swap_trajectories.begin(),
                               er.swap_trajectories.begin() + n_plot);
  rep.non_crossing = detail::check_non_crossing(er.swap_trajectories);
  rep.dumps = std::move(er.dumps);
  detail::append_branch_support(rep, build.branches, 0.0);
  detail::append_branch_support(rep, er.final_branches, cfg.t_end);
  return rep;
}

// ---------------------------------------------------------------------------
// fast_recorder: 2D (x, y) configuration space. The window displaces the
// pointer of whatever passes it while the gate is open; the empty-wave branch
// acquires an orthogonal, spatially separated pointer record before the
// packets overlap, and Eq. (3) dynamics keep the particle with its own branch.
// ---------------------------------------------------------------------------
inline ScenarioReport run_fast_recorder(const ScenarioConfig& cfg) {
  validate_config(cfg);
  require(cfg.scenario == "fast_recorder", ErrorCategory::validation_error,
          "config is not a fast_recorder scenario");

  const Grid grid = make_grid_2d(cfg.points_x, cfg.x_min, cfg.x_max, cfg.points_y,
                                 cfg.y_min, cfg.y_max);
  const Point masses{1.0, cfg.pointer_mass};
  auto packets = detail::mirror_packets(cfg, cfg.pointer_sigma);
  auto build = detail::build_branches(packets, grid, 1, masses);

  InteractionWindow w;
  w.target = InteractionWindow::Target::pointer_shift;
  w.center = cfg.offset + cfg.window_center;
  w.half_width = cfg.window_half_width;
  w.coupling = cfg.coupling;
  w.ramp = ramp_plateau(cfg.gate_t0, cfg.gate_t1, cfg.gate_rise);

  detail::EngineSetup setup;
  setup.grid = grid;
  setup.masses = masses;
  setup.branches = build.branches;
  setup.in_total = {true, true};
  setup.interacting = {true, true};
  setup.interactions = {w};
  setup.dt = cfg.dt;
  setup.t_end = cfg.t_end;
  setup.traj_stride = 2;
  setup.report_every = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(cfg.report_dt / (2.0 * cfg.dt))));
  setup.axis = cfg.offset;
  setup.track_axis_crossings = true;
  setup.detect_meet = true;
  setup.pointer_series = true;
  setup.window_center = w.center;
  setup.window_half_width = w.half_width;
  setup.dump_times = cfg.dump_times;

  WaveFunction packet1 = build_state({packets[0]}, grid, 1, masses);
  auto swap_pts = sample_initial_positions(packet1, cfg.trajectories, cfg.seed);
  for (const auto& p : swap_pts) setup.swap_points.push_back(p.q);
  if (cfg.equivariance_samples > 0) {
    auto eq_pts = sample_initial_positions(build.total, cfg.equivariance_samples,
                                           splitmix64(cfg.seed ^ 0x9d2c5680ULL));
    for (const auto& p : eq_pts) setup.eq_points.push_back(p.q);
  }

  auto er = detail::stream_run(setup);
  require(er.meet_time > 0.0, ErrorCategory::geometry_error,
          "packets failed to overlap within the configured time");

  ScenarioReport rep;
  rep.config = cfg;
  rep.meet_time = er.meet_time;
  rep.steps = er.steps;
  rep.norm_drift = er.norm_drift;
  rep.pointer_series = std::move(er.pointer_series);

  // Branch pointer separation at overlap, in units of the initial pointer
  // width. This is the "fast" validation: the record must be spatially
  // resolved before the packets meet.
  double y1 = 0.0, y2 = 0.0;
  {
    auto m1 = marginal_density(er.branches_at_meet[0], 1);
    auto m2 = marginal_density(er.branches_at_meet[1], 1);
    const Axis& ay = grid.axis(1);
    double w1 = 0.0, w2 = 0.0;
    for (int i = 0; i < ay.points; ++i) {
      y1 += ay.coord(i) * m1[i];
      w1 += m1[i];
      y2 += ay.coord(i) * m2[i];
      w2 += m2[i];
    }
    y1 /= w1;
    y2 /= w2;
  }
  rep.branch_separation_sigma = std::abs(y2 - y1) / cfg.pointer_sigma;
  if (cfg.coupling != 0.0)
    require(rep.branch_separation_sigma >= 5.0, ErrorCategory::validation_error,
            "separation validation failed: pointer too slow for the fast regime");

  std::vector<const WaveFunction*> branch_ptrs{&er.final_branches[0],
                                               &er.final_branches[1]};
  auto stats = detail::classify_swap(er, cfg.packet_wavevector, branch_ptrs);
  rep.swap_fraction = stats.swap_fraction;
  rep.axis_crossings = stats.axis_crossings;
  rep.classification_ties = stats.classification_ties;
  rep.node_encounters = stats.node_encounters;
  rep.clamps = stats.clamps;
  rep.escaped = stats.escaped;
  rep.equivariance = detail::equivariance_of(er, er.final_total);

  // Mismatch: avoided the window but ended co-located with the record-carrying
  // branch (branch 2).
  std::size_t mismatch = 0;
  for (auto& row : stats.summary) {
    row.record_mismatch = row.min_window_distance > 3.0 * cfg.packet_sigma &&
                          row.exit_branch == 1;
    if (row.record_mismatch) ++mismatch;
  }
  rep.trajectory_record_mismatch =
      stats.summary.empty() ? 0.0
                            : static_cast<double>(mismatch) /
                                  static_cast<double>(stats.summary.size());
  rep.summary = std::move(stats.summary);

  // Pointer record observables: per-branch momentum and the environment
  // overlap at the overlap time.
  {
    const Grid& g = grid;
    auto slice_env = [&](const WaveFunction& b) {
      auto m = marginal_density(b, 0);
      int ipk = 0;
      for (int i = 1; i < g.axis(0).points; ++i)
        if (m[i] > m[ipk]) ipk = i;
      std::vector<cplx> phi(g.axis(1).points);
      double n2 = 0.0;
      for (int iy = 0; iy < g.axis(1).points; ++iy) {
        phi[iy] = b.at(0, g.index(ipk, iy));
        n2 += std::norm(phi[iy]);
      }
      const double inv = 1.0 / std::sqrt(n2);
      for (auto& v : phi) v *= inv;
      return phi;
    };
    auto phi1 = slice_env(er.branches_at_meet[0]);
    auto phi2 = slice_env(er.branches_at_meet[1]);
    cplx ov{0.0, 0.0};
    for (std::size_t i = 0; i < phi1.size(); ++i) ov += std::conj(phi2[i]) * phi1[i];

    ConditionInputs ci;
    ci.has_environment = cfg.coupling != 0.0;
    ci.env_overlap_magnitude = std::abs(ov);
    ci.env_displacement = std::abs(y2 - y1);
    ci.env_width = cfg.pointer_sigma;
    ci.swap_fraction = rep.swap_fraction;
    rep.conditions = analyze_conditions(ci);

    rep.pointer_shift = y2 - y1;
  }

  const int n_plot = std::min<int>(cfg.plot_trajectories,
                                   static_cast<int>(er.swap_trajectories.size()));
  rep.plot_trajectories.assign(er.swap_trajectories.begin(),
                               er.swap_trajectories.begin() + n_plot);
  rep.dumps = std::move(er.dumps);
  detail::append_branch_support(rep, build.branches, 0.0);
  detail::append_branch_support(rep, er.final_branches, cfg.t_end);
  return rep;
}

// ---------------------------------------------------------------------------
// spin_recorder: 1D with an internal two-level index. The window flips the
// internal level of whatever transits it (accumulated rotation pi) without
// touching any spatial density, so the guidance field is exactly that of the
// bare crossing: the trajectory and the flip record disagree.
// ---------------------------------------------------------------------------
inline ScenarioReport run_spin_recorder(const ScenarioConfig& cfg) {
  validate_config(cfg);
  require(cfg.scenario == "spin_recorder", ErrorCategory::validation_error,
          "config is not a spin_recorder scenario");
  require(!cfg.two_dimensional(), ErrorCategory::validation_error,
          "spin_recorder runs on a 1D grid");

  const Grid grid = make_grid_1d(cfg.points_x, cfg.x_min, cfg.x_max);
  auto packets = detail::mirror_packets(cfg);
  auto build = detail::build_branches(packets, grid, 2, {1.0, 1.0});

  InteractionWindow w;
  w.target = InteractionWindow::Target::spin_flip;
  w.center = cfg.offset + cfg.window_center;
  w.half_width = cfg.window_half_width;
  w.coupling = cfg.coupling;
  w.ramp = ramp_plateau(cfg.gate_t0, cfg.gate_t1, cfg.gate_rise);

  detail::EngineSetup setup;
  setup.grid = grid;
  setup.branches = build.branches;
  // Third branch: packet 2 without the recorder, reference for condition (iii).
  setup.branches.push_back(build.branches[1]);
  setup.in_total = {true, true, false};
  setup.interacting = {true, true, false};
  setup.interactions = {w};
  setup.dt = cfg.dt;
  setup.t_end = cfg.t_end;
  setup.traj_stride = 2;
  setup.report_every = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(cfg.report_dt / (2.0 * cfg.dt))));
  setup.axis = cfg.offset;
  setup.track_axis_crossings = true;
  setup.detect_meet = true;
  setup.window_center = w.center;
  setup.window_half_width = w.half_width;
  setup.dump_times = cfg.dump_times;

  WaveFunction packet1 = build_state({packets[0]}, grid, 2);
  auto swap_pts = sample_initial_positions(packet1, cfg.trajectories, cfg.seed);
  for (const auto& p : swap_pts) setup.swap_points.push_back(p.q);
  if (cfg.equivariance_samples > 0) {
    auto eq_pts = sample_initial_positions(build.total, cfg.equivariance_samples,
                                           splitmix64(cfg.seed ^ 0x9d2c5680ULL));
    for (const auto& p : eq_pts) setup.eq_points.push_back(p.q);
  }

  auto er = detail::stream_run(setup);
  require(er.meet_time > 0.0, ErrorCategory::geometry_error,
          "packets failed to overlap within the configured time");

  ScenarioReport rep;
  rep.config = cfg;
  rep.meet_time = er.meet_time;
  rep.steps = er.steps;
  rep.norm_drift = er.norm_drift;

  // Flip validation: branch 2 must end almost fully in the flipped level.
  const WaveFunction& b2 = er.final_branches[1];
  {
    double w0 = 0.0, w1 = 0.0;
    for (std::size_t i = 0; i < grid.total_points(); ++i) {
      w0 += std::norm(b2.at(0, i));
      w1 += std::norm(b2.at(1, i));
    }
    rep.flipped_weight = w1 / (w0 + w1);
  }
  if (cfg.coupling != 0.0)
    require(rep.flipped_weight >= 0.99, ErrorCategory::validation_error,
            "flip angle misconfigured: flipped weight below 0.99");

  std::vector<const WaveFunction*> branch_ptrs{&er.final_branches[0],
                                               &er.final_branches[1]};
  auto stats = detail::classify_swap(er, cfg.packet_wavevector, branch_ptrs);
  rep.swap_fraction = stats.swap_fraction;
  rep.axis_crossings = stats.axis_crossings;
  rep.classification_ties = stats.classification_ties;
  rep.node_encounters = stats.node_encounters;
  rep.clamps = stats.clamps;
  rep.escaped = stats.escaped;
  rep.equivariance = detail::equivariance_of(er, er.final_total);

  // Mismatch: trajectory stayed clear of the flip window yet ended where the
  // local density is >= 99% flipped-spin amplitude.
  FieldView final_view(er.final_total);
  std::size_t mismatch = 0;
  for (auto& row : stats.summary) {
    if (row.flags.escaped) continue;
    const Point p = row.finish;
    // Spin-resolved density at the final position.
    double rho0 = 0.0, rho1 = 0.0;
    {
      const Grid& g = grid;
      const double u = (p[0] - g.axis(0).min) / g.spacing(0);
      const int i0 = std::clamp(static_cast<int>(u), 0, g.axis(0).points - 2);
      const double frac = u - i0;
      auto interp = [&](int s) {
        const cplx v = er.final_total.at(s, i0) * (1.0 - frac) +
                       er.final_total.at(s, i0 + 1) * frac;
        return std::norm(v);
      };
      rho0 = interp(0);
      rho1 = interp(1);
    }
    const bool clear = row.min_window_distance > 3.0 * cfg.packet_sigma;
    const bool colocated = rho1 >= 0.99 * (rho0 + rho1);
    row.record_mismatch = clear && colocated;
    if (row.record_mismatch) ++mismatch;
  }
  rep.trajectory_record_mismatch =
      stats.summary.empty() ? 0.0
                            : static_cast<double>(mismatch) /
                                  static_cast<double>(stats.summary.size());
  rep.summary = std::move(stats.summary);

  // Conditions: the record is the internal level of branch 2; its spatial
  // density is compared against the no-recorder reference branch.
  {
    auto spinor_at_peak = [&](const WaveFunction& b) {
      auto m = marginal_density(b, 0);
      int ipk = 0;
      for (int i = 1; i < grid.axis(0).points; ++i)
        if (m[i] > m[ipk]) ipk = i;
      std::array<cplx, 2> chi{b.at(0, ipk), b.at(1, ipk)};
      const double n = std::sqrt(std::norm(chi[0]) + std::norm(chi[1]));
      chi[0] /= n;
      chi[1] /= n;
      return chi;
    };
    auto chi1 = spinor_at_peak(er.final_branches[0]);
    auto chi2 = spinor_at_peak(er.final_branches[1]);
    const double ov = std::abs(std::conj(chi2[0]) * chi1[0] +
                               std::conj(chi2[1]) * chi1[1]);
    const double disp = std::abs(detail::branch_centroid_x(er.final_branches[1]) -
                                 detail::branch_centroid_x(er.final_branches[2]));
    ConditionInputs ci;
    ci.has_environment = cfg.coupling != 0.0;
    ci.env_overlap_magnitude = ov;
    ci.env_displacement = disp;
    ci.env_width = cfg.packet_sigma;
    ci.swap_fraction = rep.swap_fraction;
    rep.conditions = analyze_conditions(ci);
  }

  const int n_plot = std::min<int>(cfg.plot_trajectories,
                                   static_cast<int>(er.swap_trajectories.size()));
  rep.plot_trajectories.assign(er.swap_trajectories.begin(),
                               er.swap_trajectories.begin() + n_plot);
  rep.non_crossing = detail::check_non_crossing(er.swap_trajectories);
  rep.dumps = std::move(er.dumps);
  detail::append_branch_support(rep, build.branches, 0.0);
  detail::append_branch_support(
      rep, {er.final_branches[0], er.final_branches[1]}, cfg.t_end);
  return rep;
}

// ---------------------------------------------------------------------------
// protective: particle in a box, prepared in the relaxed ground state, weakly
// and adiabatically probed by a pointer coupled to the density inside a
// window at B. The pointer momentum records the local density while the
// Bohmian position started at A barely moves.
// ---------------------------------------------------------------------------
inline ScenarioReport run_protective(const ScenarioConfig& cfg) {
  validate_config(cfg);
  require(cfg.scenario == "protective", ErrorCategory::validation_error,
          "config is not a protective scenario");

  const Grid grid_x = make_grid_1d(cfg.points_x, cfg.x_min, cfg.x_max);
  const Grid grid = make_grid_2d(cfg.points_x, cfg.x_min, cfg.x_max, cfg.points_y,
                                 cfg.y_min, cfg.y_max);
  const Point masses{1.0, cfg.pointer_mass};

  BoxTerm box;
  box.lo = cfg.box_lo;
  box.hi = cfg.box_hi;
  box.height = cfg.box_height;
  box.wall_width = cfg.box_wall_width;
  box.wall_shift = cfg.box_wall_shift;

  // Relax the box ground state on the x grid.
  Potential pot_x;
  pot_x.add(box);
  auto ground = relax_ground_state(pot_x, grid_x, 1e-10);
  ScenarioReport rep;
  rep.config = cfg;
  rep.ground_state_energy = ground.energy;

  // Product initial state: ground(x) * wide pointer Gaussian(y).
  WaveFunction psi0(grid, 1, masses);
  {
    const Axis& ay = grid.axis(1);
    std::vector<cplx> phi(ay.points);
    double n2 = 0.0;
    for (int iy = 0; iy < ay.points; ++iy) {
      const double y = ay.coord(iy);
      phi[iy] = std::exp(-sqr(y) / (4.0 * sqr(cfg.pointer_sigma)));
      n2 += std::norm(phi[iy]);
    }
    const double inv = 1.0 / std::sqrt(n2 * ay.spacing);
    for (auto& v : phi) v *= inv;
    for (int ix = 0; ix < grid.axis(0).points; ++ix)
      for (int iy = 0; iy < ay.points; ++iy)
        psi0.at(0, grid.index(ix, iy)) = ground.psi.at(0, ix) * phi[iy];
  }

  Potential pot;
  pot.add(box);
  PointerWindowTerm probe;
  probe.center = cfg.point_b;
  probe.half_width = cfg.probe_half_width;
  probe.coupling = cfg.probe_strength;
  probe.ramp = ramp_sin_squared(0.0, cfg.ramp_duration);
  if (cfg.probe_strength != 0.0) pot.add(probe);

  detail::EngineSetup setup;
  setup.grid = grid;
  setup.masses = masses;
  setup.branches = {psi0};
  setup.in_total = {true};
  setup.interacting = {false};
  setup.potential = pot;
  setup.dt = cfg.dt;
  setup.t_end = cfg.t_end;
  // Trajectory step: an even stride close to report_dt.
  {
    auto stride = static_cast<std::size_t>(std::llround(cfg.report_dt / cfg.dt));
    stride = std::max<std::size_t>(2, stride - (stride % 2));
    setup.traj_stride = stride;
  }
  setup.report_every = 1;
  setup.pointer_series = true;
  setup.dump_times = cfg.dump_times;

  // The dedicated Bohmian trajectory starts at A on the pointer median.
  setup.swap_points.push_back(Point{cfg.point_a, 0.0});
  if (cfg.equivariance_samples > 0) {
    auto eq_pts = sample_initial_positions(psi0, cfg.equivariance_samples,
                                           splitmix64(cfg.seed ^ 0x9d2c5680ULL));
    for (const auto& p : eq_pts) setup.eq_points.push_back(p.q);
  }

  const double py0 = mean_momentum(psi0, 1);
  auto er = detail::stream_run(setup);

  // Record = pointer momentum shift along the coupling direction; the phase
  // exp(-i g window(x) y) lowers <p_y> by g_int <window>.
  const double py1 = mean_momentum(er.final_total, 1);
  rep.pointer_shift = -(py1 - py0);

  // First-order prediction g_int <Pi_B> over the protected state.
  double window_density = 0.0;
  {
    const Axis& ax = grid_x.axis(0);
    for (int i = 0; i < ax.points; ++i)
      window_density += smooth_window(ax.coord(i), cfg.point_b, cfg.probe_half_width) *
                        std::norm(ground.psi.at(0, i));
    window_density *= ax.spacing;
  }
  const double g_int = cfg.probe_strength * 0.5 * cfg.ramp_duration;
  rep.pointer_shift_predicted = g_int * window_density;
  rep.pointer_shift_relative_error =
      rep.pointer_shift_predicted != 0.0
          ? std::abs(rep.pointer_shift / rep.pointer_shift_predicted - 1.0)
          : 0.0;
  if (cfg.probe_strength != 0.0)
    require(rep.pointer_shift_relative_error <= 0.5, ErrorCategory::validation_error,
            "weakness violated: first-order shift prediction off by more than 50%");

  // Adiabaticity: after ramp-down the x content must still be the ground
  // state. Fidelity of the projection onto ground(x).
  {
    const Axis& ay = grid.axis(1);
    double f2 = 0.0;
    for (int iy = 0; iy < ay.points; ++iy) {
      cplx a{0.0, 0.0};
      for (int ix = 0; ix < grid.axis(0).points; ++ix)
        a += std::conj(ground.psi.at(0, ix)) * er.final_total.at(0, grid.index(ix, iy));
      f2 += std::norm(a) * grid.spacing(0) * grid.spacing(0) * ay.spacing;
    }
    rep.adiabatic_fidelity = std::sqrt(f2);
  }
  if (cfg.probe_strength != 0.0)
    require(rep.adiabatic_fidelity >= 0.99, ErrorCategory::validation_error,
            "adiabaticity violated: final fidelity to the ground state below 0.99");

  // Bohmian displacement of the A trajectory, x axis.
  double maxdisp = 0.0;
  for (const auto& p : er.swap_trajectories[0].positions)
    maxdisp = std::max(maxdisp, std::abs(p[0] - cfg.point_a));
  rep.max_bohm_displacement = maxdisp;

  rep.equivariance = detail::equivariance_of(er, er.final_total);
  rep.pointer_series = std::move(er.pointer_series);
  rep.steps = er.steps;
  rep.norm_drift = er.norm_drift;

  // Conditions: the environment is the pointer itself.
  {
    const Axis& ay = grid.axis(1);
    // Final pointer amplitude, projected on the ground state.
    std::vector<cplx> phiT(ay.points);
    double n2 = 0.0;
    for (int iy = 0; iy < ay.points; ++iy) {
      cplx a{0.0, 0.0};
      for (int ix = 0; ix < grid.axis(0).points; ++ix)
        a += std::conj(ground.psi.at(0, ix)) * er.final_total.at(0, grid.index(ix, iy));
      phiT[iy] = a;
      n2 += std::norm(a);
    }
    for (auto& v : phiT) v /= std::sqrt(n2);
    cplx ov{0.0, 0.0};
    double ny2 = 0.0;
    std::vector<cplx> phi0(ay.points);
    for (int iy = 0; iy < ay.points; ++iy) {
      phi0[iy] = std::exp(-sqr(ay.coord(iy)) / (4.0 * sqr(cfg.pointer_sigma)));
      ny2 += std::norm(phi0[iy]);
    }
    for (int iy = 0; iy < ay.points; ++iy)
      ov += std::conj(phiT[iy]) * phi0[iy] / std::sqrt(ny2);

    ConditionInputs ci;
    ci.has_environment = cfg.probe_strength != 0.0;
    ci.env_overlap_magnitude = std::abs(ov);
    ci.env_displacement = std::abs(mean_position(er.final_total, 1));
    ci.env_width = cfg.pointer_sigma;
    ci.swap_fraction = 0.0;
    rep.conditions = analyze_conditions(ci);
  }

  auto stats = detail::classify_swap(er, 1.0, {});
  rep.summary = std::move(stats.summary);
  rep.node_encounters = stats.node_encounters;
  rep.clamps = stats.clamps;
  rep.escaped = stats.escaped;
  rep.plot_trajectories = {er.swap_trajectories[0]};
  rep.dumps = std::move(er.dumps);
  return rep;
}

inline ScenarioReport run_scenario(const ScenarioConfig& cfg) {
  if (cfg.scenario == "crossing") return run_crossing(cfg);
  if (cfg.scenario == "fast_recorder") return run_fast_recorder(cfg);
  if (cfg.scenario == "spin_recorder") return run_spin_recorder(cfg);
  if (cfg.scenario == "protective") return run_protective(cfg);
  fail(ErrorCategory::validation_error, "unknown scenario '" + cfg.scenario + "'");
}

}  // namespace pw
