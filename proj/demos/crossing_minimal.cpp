// Minimal library walkthrough: free Gaussian dispersion and one Bohmian
// trajectory riding it.

#include <cstdio>

#include "pilotwave/pilotwave.hpp"

int main() {
  auto grid = pw::make_grid_1d(1024, -25.0, 25.0);
  pw::GaussianPacketSpec packet;
  packet.center = {0.0, 0.0};
  packet.sigma = {1.0, 1.0};
  auto psi = pw::build_state({packet}, grid);

  auto record = pw::evolve(psi, pw::Potential::zero(), 0.0, 2.0, 0.002);
  auto traj = pw::integrate_trajectory(record, pw::BohmConfig{{1.0, 0.0}, 0.0}, 0.2);

  std::printf("free Gaussian, sigma0 = 1, trajectory started at x0 = 1\n");
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    std::printf("t=%.1f  x=%.6f  (analytic %.6f)\n", t, traj.positions[i][0],
                std::sqrt(1.0 + 0.25 * t * t));
  }
  return 0;
}
