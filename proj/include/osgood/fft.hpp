#pragma once

#include <vector>

#include "osgood/grid_field.hpp"

namespace osgood::fft {

// Fourier coefficients c_k = (1/M) sum_x u(x) e^{-i k.x}, M = number of
// samples, same layout as the field. Plans are created under a global lock.
std::vector<cplx> forward(const GridField& u);
// u(x) = sum_k c_k e^{i k.x}.
GridField inverse(int dim, std::size_t n, const std::vector<cplx>& coeffs);

// Signed integer frequency of lattice index k on an n-point axis; the
// Nyquist index n/2 maps to -n/2.
inline long freq(std::size_t k, std::size_t n) {
  return k < n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
}

// Per-index |xi| and component lists for a dim-dimensional n-point lattice.
struct Lattice {
  int dim = 1;
  std::size_t n = 0;
  std::vector<double> radius;
  std::vector<long> xi1;
  std::vector<long> xi2;  // empty in 1D
  bool nyquist(std::size_t idx) const;
};
const Lattice& lattice(int dim, std::size_t n);

// Spectral derivative along `axis` (0 or 1); the Nyquist mode is dropped.
GridField derivative(const GridField& u, int axis);
std::vector<cplx> derivative_coeffs(const std::vector<cplx>& c, int dim, std::size_t n, int axis);

// Trigonometric interpolation onto an m-point grid (m >= n); the Nyquist
// mode is split symmetrically so real fields stay real.
GridField resample(const GridField& u, std::size_t m);
// Keeps modes |k_j| < m/2 of an n-point field (m <= n).
GridField truncate(const GridField& u, std::size_t m);

// Plancherel: ||u||^2 = (2pi)^dim sum |c_k|^2.
double l2_norm_from_coeffs(const std::vector<cplx>& c, int dim);

}  // namespace osgood::fft
