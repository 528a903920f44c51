#pragma once

#include "pilotwave/guidance.hpp"
#include "pilotwave/wavefunction.hpp"

namespace pw {

namespace detail {

// Inverse CDF of a piecewise-linear density given on grid nodes. The CDF is
// piecewise quadratic; each cell is inverted in closed form.
class InverseCdf {
 public:
  InverseCdf(const Axis& axis, std::vector<double> density)
      : axis_(axis), rho_(std::move(density)) {
    cdf_.resize(rho_.size(), 0.0);
    for (std::size_t i = 1; i < rho_.size(); ++i)
      cdf_[i] = cdf_[i - 1] + 0.5 * (rho_[i - 1] + rho_[i]) * axis_.spacing;
    const double total = cdf_.back();
    require(total > 0.0, ErrorCategory::non_finite_state, "density integrates to zero");
    for (auto& v : cdf_) v /= total;
    for (auto& v : rho_) v /= total;
  }

  double operator()(double u) const {
    // Find cell with cdf_[i] <= u < cdf_[i+1].
    std::size_t lo = 0, hi = cdf_.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (cdf_[mid] <= u ? lo : hi) = mid;
    }
    const double a = rho_[lo], b = rho_[lo + 1];
    const double du = (u - cdf_[lo]) / axis_.spacing;  // mass density per unit x
    double s;  // fractional offset within the cell
    const double slope = (b - a);
    if (std::abs(slope) < 1e-14 * (a + b + 1e-300)) {
      s = a > 0.0 ? du / a : 0.0;
    } else {
      // Solve a s + slope s^2 / 2 = du.
      const double disc = std::max(0.0, a * a + 2.0 * slope * du);
      s = (-a + std::sqrt(disc)) / slope;
    }
    s = std::clamp(s, 0.0, 1.0);
    return axis_.coord(static_cast<int>(lo)) + s * axis_.spacing;
  }

 private:
  Axis axis_;
  std::vector<double> rho_;
  std::vector<double> cdf_;
};

inline bool density_is_product(const Grid& g, const std::vector<double>& rho,
                               const std::vector<double>& mx,
                               const std::vector<double>& my) {
  // rho integrates to 1, so the product of marginals should reproduce it.
  double peak = 0.0;
  for (double v : rho) peak = std::max(peak, v);
  const int nx = g.axis(0).points, ny = g.axis(1).points;
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ny; ++iy)
      if (std::abs(rho[g.index(ix, iy)] - mx[ix] * my[iy]) > 1e-9 * peak)
        return false;
  return true;
}

}  // namespace detail

// Draws n configuration-space points distributed as |psi|^2. Product states
// use per-axis inverse-CDF sampling; entangled 2D states fall back to
// rejection with a cell-wise constant envelope. Each point derives its own
// counter-split stream from the master seed, so the result is deterministic
// and independent of evaluation order.
inline std::vector<BohmConfig> sample_initial_positions(const WaveFunction& psi,
                                                        std::size_t n,
                                                        std::uint64_t master_seed) {
  require(n >= 1, ErrorCategory::too_few_samples, "need at least one sample");
  const Grid& g = psi.grid();
  std::vector<BohmConfig> out(n);

  if (g.dims() == 1) {
    detail::InverseCdf icdf(g.axis(0), marginal_density(psi, 0));
    for (std::size_t i = 0; i < n; ++i) {
      UniformStream st(master_seed, 2 * i);
      out[i].q = {icdf(st.next()), 0.0};
    }
    return out;
  }

  auto rho = density_grid(psi);
  {
    const double total = psi.norm_squared();
    for (auto& v : rho) v /= total;
  }
  auto mx = marginal_density(psi, 0);
  auto my = marginal_density(psi, 1);
  {
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) sx += mx[i] * g.spacing(0);
    for (std::size_t i = 0; i < my.size(); ++i) sy += my[i] * g.spacing(1);
    for (auto& v : mx) v /= sx;
    for (auto& v : my) v /= sy;
  }

  if (detail::density_is_product(g, rho, mx, my)) {
    detail::InverseCdf ix(g.axis(0), mx), iy(g.axis(1), my);
    for (std::size_t i = 0; i < n; ++i) {
      UniformStream sx(master_seed, 2 * i);
      UniformStream sy(master_seed, 2 * i + 1);
      out[i].q = {ix(sx.next()), iy(sy.next())};
    }
    return out;
  }

  // Rejection sampling: per-cell constant envelope dominating the bilinear
  // density (max over the four cell corners).
  const int nx = g.axis(0).points, ny = g.axis(1).points;
  const std::size_t n_cells = static_cast<std::size_t>(nx - 1) * (ny - 1);
  std::vector<double> cell_cdf(n_cells);
  double total_env = 0.0;
  for (int ix = 0; ix < nx - 1; ++ix)
    for (int iy = 0; iy < ny - 1; ++iy) {
      const double m = std::max(std::max(rho[g.index(ix, iy)], rho[g.index(ix + 1, iy)]),
                                std::max(rho[g.index(ix, iy + 1)], rho[g.index(ix + 1, iy + 1)]));
      total_env += m;
      cell_cdf[static_cast<std::size_t>(ix) * (ny - 1) + iy] = total_env;
    }
  require(total_env > 0.0, ErrorCategory::non_finite_state, "zero density");
  // Acceptance rate = mass / (envelope volume); guard against degenerate states.
  const double acceptance = 1.0 / (total_env * g.spacing(0) * g.spacing(1));
  require(acceptance >= 1e-4, ErrorCategory::rejection_inefficiency,
          "rejection acceptance rate below 1e-4");

  FieldView view(psi);
  for (std::size_t i = 0; i < n; ++i) {
    UniformStream st(master_seed, i);
    for (int attempt = 0; attempt < 100000; ++attempt) {
      const double u = st.next() * total_env;
      std::size_t lo = 0, hi = n_cells - 1;
      while (hi > lo) {
        const std::size_t mid = (lo + hi) / 2;
        if (cell_cdf[mid] > u) hi = mid; else lo = mid + 1;
      }
      const int cx = static_cast<int>(lo / (ny - 1));
      const int cy = static_cast<int>(lo % (ny - 1));
      const double env = cell_cdf[lo] - (lo > 0 ? cell_cdf[lo - 1] : 0.0);
      Point p{g.axis(0).coord(cx) + st.next() * g.spacing(0),
              g.axis(1).coord(cy) + st.next() * g.spacing(1)};
      if (st.next() * env <= view.sample(p).rho) {
        out[i].q = p;
        break;
      }
      require(attempt + 1 < 100000, ErrorCategory::rejection_inefficiency,
              "rejection sampling failed to accept");
    }
  }
  return out;
}

}  // namespace pw
