#pragma once

#include <algorithm>

#include "pilotwave/guidance.hpp"
#include "pilotwave/wavefunction.hpp"

namespace pw {

struct DistributionTest {
  std::string statistic = "ks";
  double value = 0.0;
  std::size_t samples = 0;
  double threshold = 0.02;
  bool pass = false;
};

// Kolmogorov-Smirnov distance between an empirical sample and the
// grid-integrated |psi|^2 CDF along one axis.
inline DistributionTest equivariance_test(std::vector<double> samples,
                                          const WaveFunction& psi, int axis,
                                          double threshold = 0.02) {
  require(samples.size() >= 100, ErrorCategory::too_few_samples,
          "equivariance test needs at least 100 samples");
  const Axis& ax = psi.grid().axis(axis);
  auto m = marginal_density(psi, axis);
  std::vector<double> cdf(m.size(), 0.0);
  for (std::size_t i = 1; i < m.size(); ++i)
    cdf[i] = cdf[i - 1] + 0.5 * (m[i - 1] + m[i]) * ax.spacing;
  for (auto& v : cdf) v /= cdf.back();

  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double x = samples[i];
    double f;
    if (x <= ax.min) {
      f = 0.0;
    } else if (x >= ax.max) {
      f = 1.0;
    } else {
      const double u = (x - ax.min) / ax.spacing;
      const auto j = static_cast<std::size_t>(u);
      const double w = u - static_cast<double>(j);
      f = cdf[j] * (1.0 - w) + cdf[j + 1] * w;
    }
    d = std::max(d, std::max((i + 1) / n - f, f - i / n));
  }
  DistributionTest out;
  out.value = d;
  out.samples = samples.size();
  out.threshold = threshold;
  out.pass = d < threshold;
  return out;
}

struct NonCrossingResult {
  bool pass = true;
  double violation_time = 0.0;
  std::size_t pair_a = 0;
  std::size_t pair_b = 0;
};

// Order preservation for 1D trajectories on a common time base. The velocity
// field is single-valued, so the flow cannot cross; a violation indicates an
// integrator fault.
inline NonCrossingResult non_crossing_check(const std::vector<Trajectory>& trajs) {
  NonCrossingResult out;
  if (trajs.size() < 2) return out;
  const std::size_t nt = trajs.front().times.size();
  for (const auto& tr : trajs)
    require(tr.times.size() == nt && std::equal(tr.times.begin(), tr.times.end(),
                                                trajs.front().times.begin()),
            ErrorCategory::time_base_mismatch,
            "trajectories must share one reporting time base");

  // Initial-order ranking; adjacent inversions catch any order violation.
  std::vector<std::size_t> order(trajs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return trajs[a].positions.front()[0] < trajs[b].positions.front()[0];
  });

  for (std::size_t k = 0; k < nt; ++k) {
    for (std::size_t j = 0; j + 1 < order.size(); ++j) {
      const auto a = order[j], b = order[j + 1];
      if (trajs[a].positions[k][0] > trajs[b].positions[k][0]) {
        out.pass = false;
        out.violation_time = trajs.front().times[k];
        out.pair_a = a;
        out.pair_b = b;
        return out;
      }
    }
  }
  return out;
}

// Packet-lineage branch states: each initial packet propagated separately
// under identical dynamics. Linearity of the evolution makes the sum of
// branches equal the full state, which scenario classification relies on.
struct BranchSet {
  std::vector<std::string> names;
  std::vector<EvolutionRecord> records;

  std::size_t find(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return i;
    fail(ErrorCategory::unknown_branch, "unknown branch lineage '" + name + "'");
  }
};

// Density of one branch at (point, t); frames are snapped to the nearest
// record time (records are dense on the propagation step).
inline double branch_density(const BranchSet& set, const std::string& name,
                             const Point& p, double t) {
  const auto b = set.find(name);
  const EvolutionRecord& rec = set.records[b];
  require(!rec.frames.empty(), ErrorCategory::unknown_branch, "empty branch record");
  const auto i = static_cast<std::size_t>(
      std::clamp(std::llround((t - rec.t0) / rec.dt), 0LL,
                 static_cast<long long>(rec.frames.size() - 1)));
  return FieldView(rec.frames[i]).sample(p).rho;
}

}  // namespace pw
