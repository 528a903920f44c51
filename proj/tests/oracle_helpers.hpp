#pragma once

// Test-only oracles, independent of the library's FFT path.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "pilotwave/grid.hpp"
#include "pilotwave/wavefunction.hpp"

namespace oracle {

// <p> by a naive O(N^2) discrete Fourier sum over a 1D array.
inline double mean_momentum_naive(const pw::WaveFunction& psi) {
  const pw::Grid& g = psi.grid();
  const int n = g.axis(0).points;
  const double L = g.axis(0).length();
  double num = 0.0, den = 0.0;
  for (int j = 0; j < n; ++j) {
    const double k = 2.0 * pw::kPi * (j <= n / 2 - 1 ? j : j - n) / L;
    std::complex<double> a{0.0, 0.0};
    for (int i = 0; i < n; ++i) {
      const double ph = -k * g.axis(0).coord(i);
      a += psi.at(0, i) * std::complex<double>{std::cos(ph), std::sin(ph)};
    }
    const double w = std::norm(a);
    num += k * w;
    den += w;
  }
  return num / den;
}

// Spreading width of a free Gaussian with |psi|^2 std sigma0 (hbar = m = 1).
inline double free_gaussian_sigma(double sigma0, double t) {
  return sigma0 * std::sqrt(1.0 + pw::sqr(t / (2.0 * sigma0 * sigma0)));
}

// Composite Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int n = 2000) {
  if (n % 2 == 1) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + h * i) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Ideal-box ground-state density 2 sin^2(pi x) on [0, 1].
inline double box_density(double x) {
  return 2.0 * pw::sqr(std::sin(pw::kPi * x));
}

}  // namespace oracle
