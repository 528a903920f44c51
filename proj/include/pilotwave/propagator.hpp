#pragma once

#include <fstream>
#include <functional>

#include "pilotwave/common.hpp"
#include "pilotwave/potential.hpp"
#include "pilotwave/wavefunction.hpp"

namespace pw {

// Strang split-operator stepper: exp(-i T dt/2) exp(-i V dt) exp(-i T dt/2)
// with the kinetic factor applied in the spectral basis. The kinetic phase
// table depends only on (grid, masses, dt) and is reused across steps.
class Stepper {
 public:
  Stepper(const Grid& grid, Point masses, double dt)
      : grid_(grid), masses_(masses), dt_(dt) {
    require(dt > 0.0, ErrorCategory::validation_error, "dt must be positive");
    const int nx = grid.axis(0).points;
    const int ny = grid.dims() == 2 ? grid.axis(1).points : 1;
    kinetic_half_.resize(grid.total_points());
    for (int ix = 0; ix < nx; ++ix)
      for (int iy = 0; iy < ny; ++iy) {
        double e = sqr(grid.wavenumber(0, ix)) / (2.0 * masses[0]);
        if (grid.dims() == 2) e += sqr(grid.wavenumber(1, iy)) / (2.0 * masses[1]);
        const double ph = -0.5 * e * dt;
        kinetic_half_[grid.index(ix, iy)] = cplx{std::cos(ph), std::sin(ph)};
      }
  }

  double dt() const { return dt_; }
  const Grid& grid() const { return grid_; }

  // Advances psi in place from t to t + dt. The potential is sampled at the
  // midpoint t + dt/2.
  void step_inplace(WaveFunction& psi, const Potential& pot, double t) const {
    guard(pot);
    const double tm = t + 0.5 * dt_;
    for (int s = 0; s < psi.spin_levels(); ++s) {
      auto comp = psi.component(s);
      Fft::forward(grid_, comp);
      for (std::size_t i = 0; i < comp.size(); ++i) comp[i] *= kinetic_half_[i];
      Fft::backward(grid_, comp);
      apply_potential_phase(comp, pot, tm);
      Fft::forward(grid_, comp);
      for (std::size_t i = 0; i < comp.size(); ++i) comp[i] *= kinetic_half_[i];
      Fft::backward(grid_, comp);
      psi.set_component(s, comp);
    }
    require(psi.finite(), ErrorCategory::non_finite_state,
            "non-finite amplitudes after step");
  }

  void guard(const Potential& pot) const {
    require(pot.max_abs_bound(grid_) * dt_ < 0.5, ErrorCategory::stability_guard,
            "max|V| * dt must stay below 0.5");
  }

 private:
  void apply_potential_phase(std::vector<cplx>& comp, const Potential& pot,
                             double tm) const {
    if (pot.terms().empty()) return;
    const int nx = grid_.axis(0).points;
    const int ny = grid_.dims() == 2 ? grid_.axis(1).points : 1;
    for (int ix = 0; ix < nx; ++ix) {
      const double x = grid_.axis(0).coord(ix);
      for (int iy = 0; iy < ny; ++iy) {
        Point p{x, grid_.dims() == 2 ? grid_.axis(1).coord(iy) : 0.0};
        const double ph = -pot.value(p, tm) * dt_;
        comp[grid_.index(ix, iy)] *= cplx{std::cos(ph), std::sin(ph)};
      }
    }
  }

  Grid grid_;
  Point masses_;
  double dt_;
  std::vector<cplx> kinetic_half_;
};

// One Strang step; returns psi(t + dt).
inline WaveFunction step(const WaveFunction& psi, const Potential& pot, double t,
                         double dt) {
  Stepper stepper(psi.grid(), psi.masses(), dt);
  WaveFunction out = psi;
  stepper.step_inplace(out, pot, t);
  return out;
}

// Spin rotation / pointer momentum kick generated by the window, applied as
// an exact position-diagonal unitary over one interval dt (envelope sampled
// at t + dt/2).
inline WaveFunction apply_interaction(const WaveFunction& psi,
                                      const InteractionWindow& w, double t,
                                      double dt) {
  WaveFunction out = psi;
  const Grid& g = psi.grid();
  const double env = w.ramp.value(t + 0.5 * dt);
  const int nx = g.axis(0).points;
  const int ny = g.dims() == 2 ? g.axis(1).points : 1;

  if (w.target == InteractionWindow::Target::spin_flip) {
    require(psi.spin_levels() == 2, ErrorCategory::target_mismatch,
            "spin_flip interaction needs spin_levels = 2");
    for (int ix = 0; ix < nx; ++ix) {
      const double theta = w.coupling * dt * env * w.window(g.axis(0).coord(ix));
      if (theta == 0.0) continue;
      const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
      for (int iy = 0; iy < ny; ++iy) {
        const std::size_t i = g.index(ix, iy);
        const cplx a = out.at(0, i), b = out.at(1, i);
        out.at(0, i) = c * a - s * b;
        out.at(1, i) = s * a + c * b;
      }
    }
  } else if (w.target == InteractionWindow::Target::pointer_kick) {
    require(g.dims() == 2, ErrorCategory::target_mismatch,
            "pointer_kick interaction needs a 2D grid");
    for (int ix = 0; ix < nx; ++ix) {
      const double win = w.window(g.axis(0).coord(ix));
      if (win == 0.0) continue;
      for (int iy = 0; iy < ny; ++iy) {
        const double ph = -w.coupling * dt * env * win * g.axis(1).coord(iy);
        const cplx rot{std::cos(ph), std::sin(ph)};
        for (int s = 0; s < psi.spin_levels(); ++s) out.at(s, g.index(ix, iy)) *= rot;
      }
    }
  } else {
    require(g.dims() == 2, ErrorCategory::target_mismatch,
            "pointer_shift interaction needs a 2D grid");
    if (env != 0.0) {
      // exp(-i a(x) p_y) realized along the pointer spectral axis.
      for (int s = 0; s < psi.spin_levels(); ++s) {
        auto comp = out.component(s);
        Fft::forward_axis(g, comp, 1);
        for (int ix = 0; ix < nx; ++ix) {
          const double shift = w.coupling * dt * env * w.window(g.axis(0).coord(ix));
          if (shift == 0.0) continue;
          for (int iy = 0; iy < ny; ++iy) {
            const double ph = -shift * g.wavenumber(1, iy);
            comp[g.index(ix, iy)] *= cplx{std::cos(ph), std::sin(ph)};
          }
        }
        Fft::backward_axis(g, comp, 1);
        out.set_component(s, comp);
      }
    }
  }
  return out;
}

// Dense time-ordered snapshot sequence with uniform step dt.
struct EvolutionRecord {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<WaveFunction> frames;
  double norm_drift = 0.0;
  bool drift_flagged = false;

  double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
  double t_end() const { return time(frames.size() - 1); }
  std::size_t steps() const { return frames.empty() ? 0 : frames.size() - 1; }
};

struct EvolveOptions {
  // Extra position-diagonal interactions composed after each step.
  std::vector<InteractionWindow> interactions;
  double drift_tolerance = 1e-9;
};

inline EvolutionRecord evolve(const WaveFunction& psi0, const Potential& pot,
                              double t0, double t1, double dt,
                              const EvolveOptions& opts = {}) {
  require(t1 >= t0, ErrorCategory::validation_error, "t1 must be >= t0");
  pot.validate(psi0.grid());
  EvolutionRecord rec;
  rec.t0 = t0;
  rec.dt = dt;
  rec.frames.push_back(psi0);
  if (t1 == t0) return rec;

  Stepper stepper(psi0.grid(), psi0.masses(), dt);
  const auto n_steps = static_cast<std::size_t>(std::llround((t1 - t0) / dt));
  WaveFunction psi = psi0;
  const double norm0 = psi.norm();
  for (std::size_t i = 0; i < n_steps; ++i) {
    const double t = t0 + dt * static_cast<double>(i);
    stepper.step_inplace(psi, pot, t);
    for (const auto& w : opts.interactions) psi = apply_interaction(psi, w, t, dt);
    rec.frames.push_back(psi);
    rec.norm_drift = std::max(rec.norm_drift, std::abs(psi.norm() - norm0));
  }
  rec.drift_flagged = rec.norm_drift > opts.drift_tolerance;
  return rec;
}

struct GroundState {
  WaveFunction psi;
  double energy = 0.0;
  std::size_t iterations = 0;
};

struct RelaxOptions {
  double dtau = 1e-4;
  std::size_t max_steps = 1'000'000;
  std::size_t check_every = 16;
};

// Imaginary-time relaxation with per-step renormalization. Converged when the
// relative energy change per unit imaginary time drops below `tolerance`.
inline GroundState relax_ground_state(const Potential& pot, const Grid& grid,
                                      double tolerance = 1e-10,
                                      const RelaxOptions& opts = {},
                                      Point masses = {1.0, 1.0}) {
  require(!pot.time_dependent(), ErrorCategory::validation_error,
          "imaginary-time relaxation needs a time-independent potential");
  pot.validate(grid);

  const int nx = grid.axis(0).points;
  const int ny = grid.dims() == 2 ? grid.axis(1).points : 1;
  const double dtau = opts.dtau;

  // Imaginary-time Strang factors.
  std::vector<double> kin_half(grid.total_points());
  std::vector<double> pot_full(grid.total_points());
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ny; ++iy) {
      double e = sqr(grid.wavenumber(0, ix)) / (2.0 * masses[0]);
      if (grid.dims() == 2) e += sqr(grid.wavenumber(1, iy)) / (2.0 * masses[1]);
      kin_half[grid.index(ix, iy)] = std::exp(-0.5 * e * dtau);
      Point p{grid.axis(0).coord(ix), grid.dims() == 2 ? grid.axis(1).coord(iy) : 0.0};
      pot_full[grid.index(ix, iy)] = std::exp(-pot.value(p, 0.0) * dtau);
    }

  // Node-free even seed keeps overlap with the ground state.
  WaveFunction psi(grid, 1, masses);
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ny; ++iy) {
      double v = 1.0;
      psi.at(0, grid.index(ix, iy)) = cplx{v, 0.0};
    }
  psi.normalize();

  auto pot_fn = [&pot](const Point& p, double t) { return pot.value(p, t); };
  double energy = mean_energy(psi, pot_fn);
  auto comp = psi.component(0);
  for (std::size_t it = 1; it <= opts.max_steps; ++it) {
    Fft::forward(grid, comp);
    for (std::size_t i = 0; i < comp.size(); ++i) comp[i] *= kin_half[i];
    Fft::backward(grid, comp);
    for (std::size_t i = 0; i < comp.size(); ++i) comp[i] *= pot_full[i];
    Fft::forward(grid, comp);
    for (std::size_t i = 0; i < comp.size(); ++i) comp[i] *= kin_half[i];
    Fft::backward(grid, comp);

    double n2 = 0.0;
    for (const auto& v : comp) n2 += std::norm(v);
    n2 *= cell_volume(grid);
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& v : comp) v *= inv;

    if (it % opts.check_every == 0) {
      psi.set_component(0, comp);
      const double e_new = mean_energy(psi, pot_fn);
      const double rate = std::abs(e_new - energy) /
                          (std::max(std::abs(e_new), 1.0) * dtau *
                           static_cast<double>(opts.check_every));
      energy = e_new;
      if (rate < tolerance) return GroundState{psi, energy, it};
    }
  }
  fail(ErrorCategory::non_convergence,
       "imaginary-time relaxation did not converge");
}

// Columnar frame dump: position(s) [, spin], Re(psi), Im(psi).
inline void dump_frame(const WaveFunction& psi, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), ErrorCategory::io_error, "cannot open frame dump " + path);
  const Grid& g = psi.grid();
  out << (g.dims() == 2 ? "x,y" : "x");
  if (psi.spin_levels() == 2) out << ",spin";
  out << ",re,im\n";
  char buf[160];
  const int nx = g.axis(0).points;
  const int ny = g.dims() == 2 ? g.axis(1).points : 1;
  for (int s = 0; s < psi.spin_levels(); ++s)
    for (int ix = 0; ix < nx; ++ix)
      for (int iy = 0; iy < ny; ++iy) {
        const cplx v = psi.at(s, g.index(ix, iy));
        int len = 0;
        if (g.dims() == 2)
          len = std::snprintf(buf, sizeof buf, "%.17g,%.17g", g.axis(0).coord(ix),
                              g.axis(1).coord(iy));
        else
          len = std::snprintf(buf, sizeof buf, "%.17g", g.axis(0).coord(ix));
        out.write(buf, len);
        if (psi.spin_levels() == 2) out << ',' << s;
        len = std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", v.real(), v.imag());
        out.write(buf, len);
      }
}

}  // namespace pw
