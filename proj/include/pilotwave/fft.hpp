#pragma once

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include "pilotwave/common.hpp"
#include "pilotwave/grid.hpp"

namespace pw {

// Shared-plan FFT front end. Plans are created with FFTW_ESTIMATE so the
// algorithm choice (and therefore the roundoff pattern) is identical from run
// to run; execution goes through fftw_execute_dft on caller buffers, which is
// thread-safe for distinct arrays.
class Fft {
 public:
  static void forward(const Grid& grid, std::vector<cplx>& data) {
    transform(grid, data, FFTW_FORWARD);
  }

  // Inverse transform, normalized by 1/N.
  static void backward(const Grid& grid, std::vector<cplx>& data) {
    transform(grid, data, FFTW_BACKWARD);
    const double inv = 1.0 / static_cast<double>(grid.total_points());
    for (auto& v : data) v *= inv;
  }

  // Transform along a single axis of a 2D field (batched 1D plans).
  static void forward_axis(const Grid& grid, std::vector<cplx>& data, int axis) {
    transform_axis(grid, data, axis, FFTW_FORWARD);
  }
  static void backward_axis(const Grid& grid, std::vector<cplx>& data, int axis) {
    transform_axis(grid, data, axis, FFTW_BACKWARD);
    const double inv = 1.0 / static_cast<double>(grid.axis(axis).points);
    for (auto& v : data) v *= inv;
  }

 private:
  static void transform_axis(const Grid& grid, std::vector<cplx>& data, int axis,
                             int sign) {
    require(grid.dims() == 2, ErrorCategory::target_mismatch,
            "axis transform applies to 2D grids");
    require(data.size() == grid.total_points(), ErrorCategory::non_finite_state,
            "fft buffer size does not match grid");
    fftw_plan plan = acquire_axis(grid, axis, sign);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, ptr, ptr);
  }

  static fftw_plan acquire_axis(const Grid& grid, int axis, int sign) {
    using Key = std::tuple<int, int, int, int>;
    static std::map<Key, fftw_plan> cache;
    static std::mutex mutex;
    static std::vector<std::unique_ptr<std::vector<cplx>>> keepalive;

    const int nx = grid.axis(0).points, ny = grid.axis(1).points;
    Key key{nx, ny, axis, sign};
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    keepalive.push_back(std::make_unique<std::vector<cplx>>(grid.total_points()));
    auto* ptr = reinterpret_cast<fftw_complex*>(keepalive.back()->data());
    // Row-major layout [ix * ny + iy]: along y stride 1 / dist ny, along x
    // stride ny / dist 1.
    int n = axis == 0 ? nx : ny;
    int howmany = axis == 0 ? ny : nx;
    int stride = axis == 0 ? ny : 1;
    int dist = axis == 0 ? 1 : ny;
    fftw_plan plan = fftw_plan_many_dft(1, &n, howmany, ptr, nullptr, stride, dist,
                                        ptr, nullptr, stride, dist, sign,
                                        FFTW_ESTIMATE | FFTW_UNALIGNED);
    require(plan != nullptr, ErrorCategory::non_finite_state,
            "fftw axis plan creation failed");
    cache.emplace(key, plan);
    return plan;
  }

  static void transform(const Grid& grid, std::vector<cplx>& data, int sign) {
    require(data.size() == grid.total_points(), ErrorCategory::non_finite_state,
            "fft buffer size does not match grid");
    fftw_plan plan = acquire(grid, sign);
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, ptr, ptr);
  }

  static fftw_plan acquire(const Grid& grid, int sign) {
    using Key = std::tuple<int, int, int, int>;
    static std::map<Key, fftw_plan> cache;
    static std::mutex mutex;
    static std::vector<cplx> scratch;

    Key key{grid.dims(), grid.axis(0).points,
            grid.dims() == 2 ? grid.axis(1).points : 1, sign};
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    // In-place plan on a scratch buffer; execute_dft reuses it on any
    // equally-aligned array. fftw_malloc-free path: plan against a vector kept
    // alive for the process lifetime.
    scratch.assign(grid.total_points(), cplx{0.0, 0.0});
    auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan =
        grid.dims() == 2
            ? fftw_plan_dft_2d(grid.axis(0).points, grid.axis(1).points, ptr,
                               ptr, sign, FFTW_ESTIMATE | FFTW_UNALIGNED)
            : fftw_plan_dft_1d(grid.axis(0).points, ptr, ptr, sign,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
    require(plan != nullptr, ErrorCategory::non_finite_state,
            "fftw plan creation failed");
    cache.emplace(key, plan);
    return plan;
  }
};

// Spectral partial derivative along `axis` of a field on `grid`.
inline std::vector<cplx> spectral_gradient(const Grid& grid,
                                           const std::vector<cplx>& field,
                                           int axis) {
  std::vector<cplx> hat = field;
  Fft::forward(grid, hat);
  const int nx = grid.axis(0).points;
  const int ny = grid.dims() == 2 ? grid.axis(1).points : 1;
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      const double k = grid.wavenumber(axis, axis == 0 ? ix : iy);
      hat[grid.index(ix, iy)] *= cplx{0.0, k};
    }
  }
  Fft::backward(grid, hat);
  return hat;
}

}  // namespace pw
