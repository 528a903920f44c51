#pragma once

#include "pilotwave/analysis.hpp"
#include "pilotwave/sampling.hpp"
#include "pilotwave/scenario_config.hpp"

namespace pw {

// The three observable-empty-wave conditions, made numeric:
//   (i)   record_orthogonality: 1 - |<env state tagged by the empty branch |
//         env state of the undisturbed branch>|. 1 means a perfect record.
//   (ii)  inside_fraction: fraction of trajectories that ended up guided by
//         the formerly empty branch; identical to swap_fraction.
//   (iii) displacement_sigma: spatial displacement of the record-carrying
//         environment density between branches, in environment widths. A
//         record that moved nothing spatially scores ~0.
struct ConditionsMetrics {
  bool has_environment = false;
  double record_orthogonality = 0.0;
  double inside_fraction = 0.0;
  double displacement_sigma = 0.0;
};

// Branch-level environment summary captured by a scenario run.
struct ConditionInputs {
  bool has_environment = false;
  double env_overlap_magnitude = 1.0;   // |<env_2|env_1>|
  double env_displacement = 0.0;        // spatial centroid displacement
  double env_width = 1.0;               // sigma of the environment coordinate
  double swap_fraction = 0.0;
};

inline ConditionsMetrics analyze_conditions(const ConditionInputs& in) {
  ConditionsMetrics m;
  m.has_environment = in.has_environment;
  m.inside_fraction = in.swap_fraction;
  if (in.has_environment) {
    m.record_orthogonality = 1.0 - std::min(1.0, in.env_overlap_magnitude);
    m.displacement_sigma = in.env_displacement / in.env_width;
  }
  return m;
}

// One row per swap-ensemble trajectory in the summary table.
struct TrajectorySummary {
  std::uint64_t seed = 0;
  Point start{0.0, 0.0};
  Point finish{0.0, 0.0};
  double final_velocity_x = 0.0;
  bool swapped = false;
  int exit_branch = -1;  // -1 = tie / unclassified
  bool classification_tie = false;
  double min_window_distance = 0.0;
  bool crossed_axis = false;
  bool record_mismatch = false;
  TrajectoryFlags flags;
};

struct ScenarioReport {
  ScenarioConfig config;

  // headline metrics
  double swap_fraction = 0.0;
  double trajectory_record_mismatch = 0.0;
  double pointer_shift = 0.0;
  double pointer_shift_predicted = 0.0;
  double pointer_shift_relative_error = 0.0;
  double max_bohm_displacement = 0.0;
  ConditionsMetrics conditions;
  DistributionTest equivariance;
  NonCrossingResult non_crossing;

  // scenario-specific diagnostics
  int axis_crossings = 0;
  double branch_separation_sigma = 0.0;  // recorders, at overlap time
  double flipped_weight = 0.0;           // spin_recorder
  double adiabatic_fidelity = 1.0;       // protective
  double ground_state_energy = 0.0;      // protective
  double meet_time = 0.0;
  int classification_ties = 0;

  // deterministic runtime metadata
  std::string tool_version = kToolVersion;
  std::size_t steps = 0;
  double norm_drift = 0.0;
  long node_encounters = 0;
  long clamps = 0;
  int escaped = 0;

  std::vector<TrajectorySummary> summary;
  std::vector<Trajectory> plot_trajectories;          // first N, full time series
  std::vector<std::pair<double, WaveFunction>> dumps; // at configured times
  std::vector<std::array<double, 3>> pointer_series;  // t, <p_y>, <y>

  // per-dump-time branch supports: {t, branch, lo, hi} on the x axis
  std::vector<std::array<double, 4>> branch_support;
};

namespace detail {

// Builds the normalized total state together with its packet-lineage
// branches; the branches sum to the total exactly by construction.
struct BranchBuild {
  WaveFunction total;
  std::vector<WaveFunction> branches;
};

inline WaveFunction fill_packet_raw(const GaussianPacketSpec& s, const Grid& grid,
                                    int spin_levels, Point masses) {
  check_packet_support(s, grid);
  WaveFunction psi(grid, spin_levels, masses);
  const int nx = grid.axis(0).points;
  const int ny = grid.dims() == 2 ? grid.axis(1).points : 1;
  for (int ix = 0; ix < nx; ++ix) {
    const double x = grid.axis(0).coord(ix);
    for (int iy = 0; iy < ny; ++iy) {
      double env = -sqr(x - s.center[0]) / (4.0 * sqr(s.sigma[0]));
      double phase = s.wavevector[0] * x;
      if (grid.dims() == 2) {
        const double y = grid.axis(1).coord(iy);
        env += -sqr(y - s.center[1]) / (4.0 * sqr(s.sigma[1]));
        phase += s.wavevector[1] * y;
      }
      psi.at(s.spin_level, grid.index(ix, iy)) =
          s.weight * std::exp(env) * cplx{std::cos(phase), std::sin(phase)};
    }
  }
  return psi;
}

inline BranchBuild build_branches(const std::vector<GaussianPacketSpec>& specs,
                                  const Grid& grid, int min_spin_levels,
                                  Point masses) {
  require(!specs.empty(), ErrorCategory::empty_spec_list, "no packet specs");
  int spin_levels = min_spin_levels;
  for (const auto& s : specs) spin_levels = std::max(spin_levels, s.spin_level + 1);

  BranchBuild out;
  for (const auto& s : specs)
    out.branches.push_back(fill_packet_raw(s, grid, spin_levels, masses));
  out.total = out.branches.front();
  for (std::size_t b = 1; b < out.branches.size(); ++b)
    out.total = superpose(out.total, out.branches[b]);
  const cplx scale{1.0 / out.total.norm(), 0.0};
  out.total.scale(scale);
  for (auto& b : out.branches) b.scale(scale);
  return out;
}

}  // namespace detail

}  // namespace pw
