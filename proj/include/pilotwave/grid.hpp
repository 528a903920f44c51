#pragma once

#include <cstddef>

#include "pilotwave/common.hpp"

namespace pw {

struct Axis {
  int points = 0;
  double min = 0.0;
  double max = 0.0;
  double spacing = 0.0;

  double coord(int i) const { return min + spacing * i; }
  double length() const { return max - min; }
};

// Uniform periodic lattice over a 1D or 2D configuration space.
// Axis 0 is the particle coordinate x, axis 1 (when present) the pointer y.
class Grid {
 public:
  Grid() = default;
  Grid(int dims, std::array<Axis, 2> axes) : dims_(dims), axes_(axes) {}

  int dims() const { return dims_; }
  const Axis& axis(int a) const { return axes_[a]; }
  double spacing(int a) const { return axes_[a].spacing; }

  std::size_t total_points() const {
    std::size_t n = axes_[0].points;
    if (dims_ == 2) n *= axes_[1].points;
    return n;
  }

  // Row-major flattening: index = ix * ny + iy.
  std::size_t index(int ix, int iy = 0) const {
    return dims_ == 2 ? static_cast<std::size_t>(ix) * axes_[1].points + iy
                      : static_cast<std::size_t>(ix);
  }

  bool contains(const Point& p) const {
    for (int a = 0; a < dims_; ++a)
      if (p[a] < axes_[a].min || p[a] > axes_[a].max) return false;
    return true;
  }

  // Angular wavenumber of spectral mode j along axis a (FFT ordering).
  double wavenumber(int a, int j) const {
    const Axis& ax = axes_[a];
    int jj = j <= ax.points / 2 - 1 ? j : j - ax.points;
    if (ax.points % 2 == 1 && j > ax.points / 2) jj = j - ax.points;
    return 2.0 * kPi * jj / ax.length();
  }

  bool operator==(const Grid& o) const {
    if (dims_ != o.dims_) return false;
    for (int a = 0; a < dims_; ++a)
      if (axes_[a].points != o.axes_[a].points || axes_[a].min != o.axes_[a].min ||
          axes_[a].max != o.axes_[a].max)
        return false;
    return true;
  }

 private:
  int dims_ = 1;
  std::array<Axis, 2> axes_{};
};

inline Grid make_grid(int dims, std::array<int, 2> points,
                      std::array<std::array<double, 2>, 2> extent) {
  require(dims == 1 || dims == 2, ErrorCategory::invalid_points,
          "dims must be 1 or 2");
  std::array<Axis, 2> axes{};
  for (int a = 0; a < dims; ++a) {
    require(points[a] >= 8, ErrorCategory::invalid_points,
            "points_per_axis must be at least 8");
    require(extent[a][0] < extent[a][1], ErrorCategory::invalid_extent,
            "axis extent min must be below max");
    axes[a] = Axis{points[a], extent[a][0], extent[a][1],
                   (extent[a][1] - extent[a][0]) / points[a]};
  }
  return Grid(dims, axes);
}

inline Grid make_grid_1d(int points, double min, double max) {
  return make_grid(1, {points, 0}, {{{min, max}, {0.0, 0.0}}});
}

inline Grid make_grid_2d(int nx, double xmin, double xmax, int ny, double ymin,
                         double ymax) {
  return make_grid(2, {nx, ny}, {{{xmin, xmax}, {ymin, ymax}}});
}

}  // namespace pw
