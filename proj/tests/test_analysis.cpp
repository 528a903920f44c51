#include <catch2/catch_amalgamated.hpp>

#include "oracle_helpers.hpp"
#include "pilotwave/pilotwave.hpp"

using namespace pw;

TEST_CASE("KS equivariance statistic") {
  auto grid = make_grid_1d(1024, -40.0, 40.0);
  GaussianPacketSpec s;
  auto psi = build_state({s}, grid);

  SECTION("direct samples from |psi|^2 pass at n = 1e4") {
    auto pts = sample_initial_positions(psi, 10000, 17);
    std::vector<double> xs;
    for (const auto& p : pts) xs.push_back(p.q[0]);
    auto res = equivariance_test(xs, psi, 0);
    CHECK(res.value < 0.02);
    CHECK(res.pass);
  }

  SECTION("degenerate point mass fails") {
    std::vector<double> xs(500, 0.35);
    auto res = equivariance_test(xs, psi, 0);
    CHECK(res.value > 0.4);
    CHECK_FALSE(res.pass);
  }

  SECTION("too few samples raises") {
    std::vector<double> xs(50, 0.0);
    CHECK_THROWS_AS(equivariance_test(xs, psi, 0), Error);
  }

  SECTION("statistic is invariant under a common translation") {
    auto pts = sample_initial_positions(psi, 2000, 3);
    std::vector<double> xs;
    for (const auto& p : pts) xs.push_back(p.q[0]);
    const double d0 = equivariance_test(xs, psi, 0).value;

    const double off = 3.0;
    auto grid2 = make_grid_1d(1024, -40.0 + off, 40.0 + off);
    GaussianPacketSpec s2;
    s2.center = {off, 0.0};
    auto psi2 = build_state({s2}, grid2);
    std::vector<double> xs2;
    for (double x : xs) xs2.push_back(x + off);
    const double d1 = equivariance_test(xs2, psi2, 0).value;
    CHECK(std::abs(d0 - d1) < 1e-12);
  }
}

namespace {

Trajectory line_traj(double x0, double slope, int n_times) {
  Trajectory t;
  for (int i = 0; i < n_times; ++i) {
    t.times.push_back(0.1 * i);
    t.positions.push_back({x0 + slope * 0.1 * i, 0.0});
  }
  return t;
}

}  // namespace

TEST_CASE("non-crossing check") {
  SECTION("order-preserving fan passes") {
    std::vector<Trajectory> trajs;
    for (int i = 0; i < 10; ++i) trajs.push_back(line_traj(i, 0.1 * i, 20));
    CHECK(non_crossing_check(trajs).pass);
  }

  SECTION("two constant trajectories pass") {
    std::vector<Trajectory> trajs{line_traj(0.0, 0.0, 5), line_traj(1.0, 0.0, 5)};
    CHECK(non_crossing_check(trajs).pass);
  }

  SECTION("artificially swapped pair fails with the violation time") {
    std::vector<Trajectory> trajs{line_traj(0.0, 0.0, 10), line_traj(1.0, 0.0, 10)};
    std::swap(trajs[0].positions[7], trajs[1].positions[7]);
    auto res = non_crossing_check(trajs);
    CHECK_FALSE(res.pass);
    CHECK(res.violation_time == Catch::Approx(0.7));
  }

  SECTION("mismatched time bases raise") {
    std::vector<Trajectory> trajs{line_traj(0.0, 0.0, 10), line_traj(1.0, 0.0, 9)};
    CHECK_THROWS_AS(non_crossing_check(trajs), Error);
  }
}

TEST_CASE("branch lineage density") {
  auto grid = make_grid_1d(512, -20.0, 20.0);
  GaussianPacketSpec one, two;
  one.center = {-6.0, 0.0};
  two.center = {6.0, 0.0};
  one.sigma = two.sigma = {1.0, 1.0};
  one.wavevector = {1.5, 0.0};
  two.wavevector = {-1.5, 0.0};

  auto build = detail::build_branches({one, two}, grid, 1, {1.0, 1.0});
  BranchSet set;
  set.names = {"packet1", "packet2"};
  set.records.push_back(evolve(build.branches[0], Potential::zero(), 0.0, 8.0, 0.01));
  set.records.push_back(evolve(build.branches[1], Potential::zero(), 0.0, 8.0, 0.01));

  SECTION("before overlap each branch carries the local density") {
    const double total =
        branch_density(set, "packet1", {-6.0, 0.0}, 0.0) +
        branch_density(set, "packet2", {-6.0, 0.0}, 0.0);
    auto direct = FieldView(build.total).sample({-6.0, 0.0}).rho;
    CHECK(total == Catch::Approx(direct).margin(1e-6));
  }

  SECTION("overlap: equal halves plus interference in the total") {
    // Packets meet at t = 4 at the origin.
    const double t = 4.0;
    const double r1 = branch_density(set, "packet1", {0.0, 0.0}, t);
    const double r2 = branch_density(set, "packet2", {0.0, 0.0}, t);
    CHECK(r1 == Catch::Approx(r2).margin(1e-6));

    auto total_frame = superpose(set.records[0].frames[400],
                                 set.records[1].frames[400]);
    const double rho_tot = FieldView(total_frame).sample({0.0, 0.0}).rho;
    // Bright fringe at the symmetry point: constructive interference.
    CHECK(rho_tot > 1.5 * (r1 + r2));
  }

  SECTION("after separation the branch sum matches the total again") {
    const double t = 8.0;
    auto total_frame = superpose(set.records[0].frames.back(),
                                 set.records[1].frames.back());
    for (double x : {-6.0, -4.0, 4.0, 6.0}) {
      const double sum = branch_density(set, "packet1", {x, 0.0}, t) +
                         branch_density(set, "packet2", {x, 0.0}, t);
      const double direct = FieldView(total_frame).sample({x, 0.0}).rho;
      CHECK(sum == Catch::Approx(direct).margin(1e-6));
    }
  }

  SECTION("unknown lineage id raises") {
    CHECK_THROWS_AS(branch_density(set, "nope", {0.0, 0.0}, 0.0), Error);
  }
}

TEST_CASE("branch propagation is linear") {
  auto grid = make_grid_1d(512, -16.0, 16.0);
  Potential pot;
  pot.add(HarmonicTerm{0.0, 0.7, 0});

  GaussianPacketSpec one, two;
  one.center = {-3.0, 0.0};
  two.center = {3.0, 0.0};
  one.wavevector = {0.5, 0.0};
  two.wavevector = {-1.0, 0.0};
  two.weight = cplx{0.3, 0.6};
  auto build = detail::build_branches({one, two}, grid, 1, {1.0, 1.0});

  auto rec_sum = evolve(build.total, pot, 0.0, 2.0, 0.002);
  auto rec_a = evolve(build.branches[0], pot, 0.0, 2.0, 0.002);
  auto rec_b = evolve(build.branches[1], pot, 0.0, 2.0, 0.002);

  auto assembled = superpose(rec_a.frames.back(), rec_b.frames.back());
  double max_err = 0.0;
  for (std::size_t i = 0; i < grid.total_points(); ++i)
    max_err = std::max(max_err,
                       std::abs(assembled.at(0, i) - rec_sum.frames.back().at(0, i)));
  CHECK(max_err < 1e-8);
}
