#pragma once

#include <memory>
#include <thread>

#include "pilotwave/propagator.hpp"
#include "pilotwave/wavefunction.hpp"

namespace pw {

struct BohmConfig {
  Point q{0.0, 0.0};
  double t = 0.0;
};

struct TrajectoryFlags {
  int node_encounters = 0;
  int clamps = 0;
  bool escaped = false;
};

struct Trajectory {
  std::uint64_t seed = 0;
  std::vector<double> times;
  std::vector<Point> positions;
  TrajectoryFlags flags;
};

// Guidance velocity v = j / rho from a single state; errors at nodes where
// rho falls below eps_rel * max rho.
inline Vec velocity_field(const WaveFunction& psi, const Point& p,
                          double eps_rel = 1e-12) {
  FieldView view(psi);
  auto local = view.sample(p);
  require(local.rho >= eps_rel * view.max_density(),
          ErrorCategory::node_singularity, "velocity query at a wave node");
  Vec v{0.0, 0.0};
  for (int a = 0; a < psi.grid().dims(); ++a) v[a] = local.current[a] / local.rho;
  return v;
}

// Time-ordered sequence of sampled frames. Velocity is interpolated linearly
// in time between neighbouring frames and linearly in space within a cell.
// The sequence may be the full evolution record or a short streaming window.
class VelocityTrack {
 public:
  VelocityTrack() = default;

  explicit VelocityTrack(const EvolutionRecord& rec) {
    for (std::size_t i = 0; i < rec.frames.size(); ++i)
      push(rec.time(i), std::make_shared<FieldView>(rec.frames[i]));
  }

  void push(double t, std::shared_ptr<const FieldView> view) {
    require(times_.empty() || t > times_.back(), ErrorCategory::time_base_mismatch,
            "frames must be pushed in increasing time order");
    times_.push_back(t);
    views_.push_back(std::move(view));
  }

  void drop_before(double t) {
    std::size_t k = 0;
    while (k + 1 < times_.size() && times_[k + 1] <= t) ++k;
    times_.erase(times_.begin(), times_.begin() + k);
    views_.erase(views_.begin(), views_.begin() + k);
  }

  double t_front() const { return times_.front(); }
  double t_back() const { return times_.back(); }
  const Grid& grid() const { return views_.front()->psi().grid(); }

  struct Sampled {
    Vec velocity{0.0, 0.0};
    double rho = 0.0;
    double node_eps = 0.0;
    bool node = false;
  };

  Sampled sample(const Point& p, double t, double eps_rel) const {
    // Bracketing pair (clamped at the ends).
    std::size_t hi = 1;
    while (hi + 1 < times_.size() && times_[hi] < t) ++hi;
    const std::size_t lo = hi - 1;
    const double span = times_[hi] - times_[lo];
    double w = span > 0.0 ? (t - times_[lo]) / span : 0.0;
    w = std::clamp(w, 0.0, 1.0);

    auto a = views_[lo]->sample(p);
    auto b = views_[hi]->sample(p);
    Sampled out;
    out.rho = (1.0 - w) * a.rho + w * b.rho;
    out.node_eps =
        eps_rel * std::max(views_[lo]->max_density(), views_[hi]->max_density());
    if (out.rho < out.node_eps) {
      out.node = true;
      return out;
    }
    const int dims = grid().dims();
    for (int axis = 0; axis < dims; ++axis) {
      const double va = a.rho > 0.0 ? a.current[axis] / std::max(a.rho, out.node_eps) : 0.0;
      const double vb = b.rho > 0.0 ? b.current[axis] / std::max(b.rho, out.node_eps) : 0.0;
      out.velocity[axis] = (1.0 - w) * va + w * vb;
    }
    return out;
  }

 private:
  std::vector<double> times_;
  std::vector<std::shared_ptr<const FieldView>> views_;
};

struct IntegratorOptions {
  double node_eps_rel = 1e-12;
  int max_halvings = 8;
};

namespace detail {

inline Point clamp_to_extent(const Grid& g, Point p) {
  for (int a = 0; a < g.dims(); ++a)
    p[a] = std::clamp(p[a], g.axis(a).min, g.axis(a).max);
  return p;
}

// One RK4 step over [t, t+h]. Near nodes the substep is halved (up to
// opts.max_halvings); if the density floor persists, the point moves one
// clamped Euler substep so trajectories neither blow up nor teleport.
inline void advance_rk4(const VelocityTrack& track, Point& q, double t, double h,
                        const IntegratorOptions& opts, TrajectoryFlags& flags,
                        int depth = 0) {
  const Grid& g = track.grid();
  const int dims = g.dims();

  auto eval = [&](const Point& p, double tt, bool& node) {
    auto s = track.sample(clamp_to_extent(g, p), tt, opts.node_eps_rel);
    node = node || s.node;
    return s.velocity;
  };

  bool node = false;
  Point p1 = q;
  Vec k1 = eval(p1, t, node);
  Point p2 = q, p3 = q, p4 = q;
  Vec k2{}, k3{}, k4{};
  if (!node) {
    for (int a = 0; a < dims; ++a) p2[a] = q[a] + 0.5 * h * k1[a];
    k2 = eval(p2, t + 0.5 * h, node);
  }
  if (!node) {
    for (int a = 0; a < dims; ++a) p3[a] = q[a] + 0.5 * h * k2[a];
    k3 = eval(p3, t + 0.5 * h, node);
  }
  if (!node) {
    for (int a = 0; a < dims; ++a) p4[a] = q[a] + h * k3[a];
    k4 = eval(p4, t + h, node);
  }

  if (!node) {
    for (int a = 0; a < dims; ++a)
      q[a] += h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
    return;
  }

  ++flags.node_encounters;
  if (depth < opts.max_halvings) {
    advance_rk4(track, q, t, 0.5 * h, opts, flags, depth + 1);
    advance_rk4(track, q, t + 0.5 * h, 0.5 * h, opts, flags, depth + 1);
    return;
  }

  // Clamped Euler fallback: velocity from the floored density, capped at one
  // grid cell per substep.
  auto s = track.sample(clamp_to_extent(g, q), t, opts.node_eps_rel);
  ++flags.clamps;
  for (int a = 0; a < dims; ++a) {
    double v = s.rho > 0.0 ? s.velocity[a] : 0.0;
    const double vmax = g.spacing(a) / std::abs(h);
    v = std::clamp(v, -vmax, vmax);
    q[a] += h * v;
  }
}

}  // namespace detail

// Integrates dq/dt = v(q, t) with classical RK4 sub-stepped on the record's
// frame interval; positions are reported every report_dt (a multiple of the
// record dt). A position leaving the extent truncates the trajectory and
// sets the escaped flag.
inline Trajectory integrate_trajectory(const VelocityTrack& track,
                                       const EvolutionRecord& rec,
                                       const BohmConfig& start, double report_dt,
                                       const IntegratorOptions& opts = {},
                                       std::uint64_t seed = 0) {
  require(report_dt >= rec.dt - 1e-15, ErrorCategory::validation_error,
          "report_dt must be at least the record dt");
  const Grid& g = rec.frames.front().grid();
  require(g.contains(start.q), ErrorCategory::out_of_extent,
          "trajectory start outside grid extent");
  const auto stride =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(report_dt / rec.dt)));

  Trajectory traj;
  traj.seed = seed;
  traj.times.push_back(rec.t0);
  traj.positions.push_back(start.q);

  Point q = start.q;
  for (std::size_t i = 0; i < rec.steps(); ++i) {
    detail::advance_rk4(track, q, rec.time(i), rec.dt, opts, traj.flags);
    if (!g.contains(q)) {
      traj.flags.escaped = true;
      break;
    }
    if ((i + 1) % stride == 0 || i + 1 == rec.steps()) {
      traj.times.push_back(rec.time(i + 1));
      traj.positions.push_back(q);
    }
  }
  return traj;
}

inline Trajectory integrate_trajectory(const EvolutionRecord& rec,
                                       const BohmConfig& start, double report_dt,
                                       const IntegratorOptions& opts = {},
                                       std::uint64_t seed = 0) {
  VelocityTrack track(rec);
  return integrate_trajectory(track, rec, start, report_dt, opts, seed);
}

inline int thread_budget() {
  if (const char* env = std::getenv("PW_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(hw == 0 ? 1 : std::min(hw, 8u));
}

// Applies fn(i) over [0, n) on the thread budget with a deterministic static
// partition, so results are independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const int threads = std::min<std::size_t>(thread_budget(), n == 0 ? 1 : n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([t, threads, n, &fn]() {
      for (std::size_t i = t; i < n; i += threads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace pw
