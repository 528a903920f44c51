#pragma once

#include <algorithm>
#include <numeric>

#include "pilotwave/common.hpp"
#include "pilotwave/fft.hpp"
#include "pilotwave/grid.hpp"

namespace pw {

// Gaussian packet psi ~ exp(-(x-c)^2 / (4 sigma^2) + i k x) per axis, so that
// sigma is the standard deviation of |psi|^2 in position space.
struct GaussianPacketSpec {
  Point center{0.0, 0.0};
  Point sigma{1.0, 1.0};
  Point wavevector{0.0, 0.0};
  cplx weight{1.0, 0.0};
  int spin_level = 0;
};

class WaveFunction {
 public:
  WaveFunction() = default;
  WaveFunction(Grid grid, int spin_levels, Point mass = {1.0, 1.0})
      : grid_(std::move(grid)),
        spin_levels_(spin_levels),
        mass_(mass),
        amps_(spin_levels * grid_.total_points(), cplx{0.0, 0.0}) {
    require(spin_levels == 1 || spin_levels == 2, ErrorCategory::target_mismatch,
            "spin_levels must be 1 or 2");
    for (int a = 0; a < grid_.dims(); ++a)
      require(mass_[a] > 0.0, ErrorCategory::validation_error, "mass must be positive");
  }

  const Grid& grid() const { return grid_; }
  int spin_levels() const { return spin_levels_; }
  double mass(int axis) const { return mass_[axis]; }
  Point masses() const { return mass_; }

  cplx& at(int spin, std::size_t idx) { return amps_[spin * grid_.total_points() + idx]; }
  cplx at(int spin, std::size_t idx) const { return amps_[spin * grid_.total_points() + idx]; }

  // Contiguous block of one spin component.
  std::vector<cplx> component(int spin) const {
    const std::size_t n = grid_.total_points();
    return std::vector<cplx>(amps_.begin() + spin * n, amps_.begin() + (spin + 1) * n);
  }
  void set_component(int spin, const std::vector<cplx>& data) {
    const std::size_t n = grid_.total_points();
    require(data.size() == n, ErrorCategory::target_mismatch, "component size mismatch");
    std::copy(data.begin(), data.end(), amps_.begin() + spin * n);
  }

  std::vector<cplx>& raw() { return amps_; }
  const std::vector<cplx>& raw() const { return amps_; }

  double norm_squared() const {
    double cell = grid_.spacing(0);
    if (grid_.dims() == 2) cell *= grid_.spacing(1);
    double s = 0.0;
    for (const auto& v : amps_) s += std::norm(v);
    return s * cell;
  }
  double norm() const { return std::sqrt(norm_squared()); }

  void scale(cplx factor) {
    for (auto& v : amps_) v *= factor;
  }
  void normalize() {
    const double n = norm();
    require(n > 0.0, ErrorCategory::non_finite_state, "cannot normalize zero state");
    scale(cplx{1.0 / n, 0.0});
  }

  bool finite() const {
    for (const auto& v : amps_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }

  WaveFunction conjugated() const {
    WaveFunction out = *this;
    for (auto& v : out.amps_) v = std::conj(v);
    return out;
  }

 private:
  Grid grid_;
  int spin_levels_ = 1;
  Point mass_{1.0, 1.0};
  std::vector<cplx> amps_;
};

inline void check_packet_support(const GaussianPacketSpec& spec, const Grid& grid) {
  for (int a = 0; a < grid.dims(); ++a) {
    require(spec.sigma[a] > 0.0, ErrorCategory::validation_error, "sigma must be positive");
    const double lo = spec.center[a] - 5.0 * spec.sigma[a];
    const double hi = spec.center[a] + 5.0 * spec.sigma[a];
    require(lo >= grid.axis(a).min && hi <= grid.axis(a).max,
            ErrorCategory::support_overflow,
            "packet support (center +- 5 sigma) exceeds grid extent");
  }
}

// Superposition of Gaussian packets, renormalized to unit norm.
inline WaveFunction build_state(const std::vector<GaussianPacketSpec>& specs,
                                const Grid& grid, int min_spin_levels = 1,
                                Point mass = {1.0, 1.0}) {
  require(!specs.empty(), ErrorCategory::empty_spec_list, "no packet specs given");
  int spin_levels = min_spin_levels;
  for (const auto& s : specs) {
    check_packet_support(s, grid);
    require(s.spin_level == 0 || s.spin_level == 1, ErrorCategory::target_mismatch,
            "spin_level must be 0 or 1");
    spin_levels = std::max(spin_levels, s.spin_level + 1);
  }

  WaveFunction psi(grid, spin_levels, mass);
  const int nx = grid.axis(0).points;
  const int ny = grid.dims() == 2 ? grid.axis(1).points : 1;
  for (const auto& s : specs) {
    for (int ix = 0; ix < nx; ++ix) {
      const double x = grid.axis(0).coord(ix);
      const double ex = -sqr(x - s.center[0]) / (4.0 * sqr(s.sigma[0]));
      for (int iy = 0; iy < ny; ++iy) {
        double phase = s.wavevector[0] * x;
        double env = ex;
        if (grid.dims() == 2) {
          const double y = grid.axis(1).coord(iy);
          env += -sqr(y - s.center[1]) / (4.0 * sqr(s.sigma[1]));
          phase += s.wavevector[1] * y;
        }
        psi.at(s.spin_level, grid.index(ix, iy)) +=
            s.weight * std::exp(env) * cplx{std::cos(phase), std::sin(phase)};
      }
    }
  }
  psi.normalize();
  return psi;
}

// Precomputed spectral gradients plus linear off-lattice interpolation of psi
// and grad psi. Observables (rho, j, v) are formed from the interpolated
// values. One FieldView per frame; immutable and safe to share across threads.
class FieldView {
 public:
  explicit FieldView(const WaveFunction& psi) : psi_(&psi) {
    const Grid& g = psi.grid();
    for (int s = 0; s < psi.spin_levels(); ++s) {
      auto comp = psi.component(s);
      for (int a = 0; a < g.dims(); ++a)
        grad_[a].push_back(spectral_gradient(g, comp, a));
    }
    max_density_ = 0.0;
    for (std::size_t i = 0; i < g.total_points(); ++i) {
      double rho = 0.0;
      for (int s = 0; s < psi.spin_levels(); ++s) rho += std::norm(psi.at(s, i));
      max_density_ = std::max(max_density_, rho);
    }
  }

  const WaveFunction& psi() const { return *psi_; }
  double max_density() const { return max_density_; }

  struct Local {
    double rho = 0.0;
    Vec current{0.0, 0.0};  // spin-summed, per-axis mass included
  };

  Local sample(const Point& p) const {
    const Grid& g = psi_->grid();
    require(g.contains(p), ErrorCategory::out_of_extent, "query point outside grid extent");

    int idx[2] = {0, 0};
    double w[2] = {0.0, 0.0};
    for (int a = 0; a < g.dims(); ++a) {
      const Axis& ax = g.axis(a);
      double u = (p[a] - ax.min) / ax.spacing;
      int i = static_cast<int>(std::floor(u));
      i = std::clamp(i, 0, ax.points - 2);
      idx[a] = i;
      w[a] = u - i;
    }

    Local out;
    for (int s = 0; s < psi_->spin_levels(); ++s) {
      cplx v = interp(component_span(*psi_, s), idx, w);
      out.rho += std::norm(v);
      for (int a = 0; a < g.dims(); ++a) {
        cplx dv = interp(grad_[a][s], idx, w);
        out.current[a] += std::imag(std::conj(v) * dv) / psi_->mass(a);
      }
    }
    return out;
  }

 private:
  // Cheap non-copying view over one spin block of the amplitude vector.
  struct Span {
    const cplx* data;
    std::size_t size;
    cplx operator[](std::size_t i) const { return data[i]; }
  };

  static Span component_span(const WaveFunction& psi, int s) {
    return Span{psi.raw().data() + s * psi.grid().total_points(),
                psi.grid().total_points()};
  }

  template <typename Arr>
  cplx interp(const Arr& f, const int idx[2], const double w[2]) const {
    const Grid& g = psi_->grid();
    if (g.dims() == 1) {
      return f[idx[0]] * (1.0 - w[0]) + f[idx[0] + 1] * w[0];
    }
    const std::size_t i00 = g.index(idx[0], idx[1]);
    const std::size_t i10 = g.index(idx[0] + 1, idx[1]);
    return (f[i00] * (1.0 - w[1]) + f[i00 + 1] * w[1]) * (1.0 - w[0]) +
           (f[i10] * (1.0 - w[1]) + f[i10 + 1] * w[1]) * w[0];
  }

  const WaveFunction* psi_;
  std::array<std::vector<std::vector<cplx>>, 2> grad_;
  double max_density_ = 0.0;
};

// rho(point); spin-summed, interpolated off-lattice. One-shot convenience:
// builds spectral gradients, so hot loops should hold a FieldView instead.
inline double density(const WaveFunction& psi, const Point& p) {
  return FieldView(psi).sample(p).rho;
}

// Probability current j(point) = Im(psi* grad psi)/m per axis, spin-summed.
inline Vec current(const WaveFunction& psi, const Point& p) {
  return FieldView(psi).sample(p).current;
}

// --- grid-level observables ---------------------------------------------

inline double cell_volume(const Grid& g) {
  double c = g.spacing(0);
  if (g.dims() == 2) c *= g.spacing(1);
  return c;
}

inline std::vector<double> density_grid(const WaveFunction& psi) {
  std::vector<double> rho(psi.grid().total_points(), 0.0);
  for (int s = 0; s < psi.spin_levels(); ++s)
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] += std::norm(psi.at(s, i));
  return rho;
}

// Marginal |psi|^2 along one axis (integrated over the other and spin).
inline std::vector<double> marginal_density(const WaveFunction& psi, int axis) {
  const Grid& g = psi.grid();
  const int nx = g.axis(0).points;
  const int ny = g.dims() == 2 ? g.axis(1).points : 1;
  std::vector<double> m(axis == 0 ? nx : ny, 0.0);
  auto rho = density_grid(psi);
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ny; ++iy)
      m[axis == 0 ? ix : iy] += rho[g.index(ix, iy)];
  const double other = g.dims() == 2 ? g.spacing(1 - axis) : 1.0;
  for (auto& v : m) v *= other;
  return m;
}

inline double mean_position(const WaveFunction& psi, int axis) {
  auto m = marginal_density(psi, axis);
  const Axis& ax = psi.grid().axis(axis);
  double s = 0.0, w = 0.0;
  for (int i = 0; i < ax.points; ++i) {
    s += ax.coord(i) * m[i];
    w += m[i];
  }
  return s / w;
}

inline double position_std(const WaveFunction& psi, int axis) {
  auto m = marginal_density(psi, axis);
  const Axis& ax = psi.grid().axis(axis);
  double s = 0.0, s2 = 0.0, w = 0.0;
  for (int i = 0; i < ax.points; ++i) {
    s += ax.coord(i) * m[i];
    s2 += sqr(ax.coord(i)) * m[i];
    w += m[i];
  }
  s /= w;
  return std::sqrt(std::max(0.0, s2 / w - s * s));
}

// Spectral mean momentum along one axis.
inline double mean_momentum(const WaveFunction& psi, int axis) {
  const Grid& g = psi.grid();
  const int nx = g.axis(0).points;
  const int ny = g.dims() == 2 ? g.axis(1).points : 1;
  double num = 0.0, den = 0.0;
  for (int s = 0; s < psi.spin_levels(); ++s) {
    auto hat = psi.component(s);
    Fft::forward(g, hat);
    for (int ix = 0; ix < nx; ++ix)
      for (int iy = 0; iy < ny; ++iy) {
        const double w = std::norm(hat[g.index(ix, iy)]);
        num += g.wavenumber(axis, axis == 0 ? ix : iy) * w;
        den += w;
      }
  }
  return num / den;
}

// <H> with kinetic part in the spectral basis and V sampled on the lattice.
template <typename PotentialFn>
double mean_energy(const WaveFunction& psi, PotentialFn&& V, double t = 0.0) {
  const Grid& g = psi.grid();
  const int nx = g.axis(0).points;
  const int ny = g.dims() == 2 ? g.axis(1).points : 1;
  double kin = 0.0, den = 0.0;
  for (int s = 0; s < psi.spin_levels(); ++s) {
    auto hat = psi.component(s);
    Fft::forward(g, hat);
    for (int ix = 0; ix < nx; ++ix)
      for (int iy = 0; iy < ny; ++iy) {
        double e = sqr(g.wavenumber(0, ix)) / (2.0 * psi.mass(0));
        if (g.dims() == 2) e += sqr(g.wavenumber(1, iy)) / (2.0 * psi.mass(1));
        const double w = std::norm(hat[g.index(ix, iy)]);
        kin += e * w;
        den += w;
      }
  }
  kin /= den;

  auto rho = density_grid(psi);
  double pot = 0.0;
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ny; ++iy) {
      Point p{g.axis(0).coord(ix), g.dims() == 2 ? g.axis(1).coord(iy) : 0.0};
      pot += V(p, t) * rho[g.index(ix, iy)];
    }
  pot *= cell_volume(g);
  return kin + pot / psi.norm_squared();
}

inline cplx overlap(const WaveFunction& a, const WaveFunction& b) {
  require(a.grid() == b.grid() && a.spin_levels() == b.spin_levels(),
          ErrorCategory::target_mismatch, "overlap of incompatible states");
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < a.raw().size(); ++i)
    s += std::conj(a.raw()[i]) * b.raw()[i];
  return s * cell_volume(a.grid());
}

inline WaveFunction superpose(const WaveFunction& a, const WaveFunction& b,
                              bool renormalize = false) {
  require(a.grid() == b.grid() && a.spin_levels() == b.spin_levels(),
          ErrorCategory::target_mismatch, "superposition of incompatible states");
  WaveFunction out = a;
  for (std::size_t i = 0; i < out.raw().size(); ++i) out.raw()[i] += b.raw()[i];
  if (renormalize) out.normalize();
  return out;
}

}  // namespace pw
