#include "osgood/grid_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "osgood/error.hpp"
#include "osgood/fft.hpp"

namespace osgood {

bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

GridField::GridField(int dim, std::size_t n) : dim_(dim), n_(n) {
  if (dim != 1 && dim != 2) throw PreconditionError("grid dimension must be 1 or 2");
  if (!is_power_of_two(n)) throw PreconditionError("grid resolution must be a power of two");
  data_.assign(dim == 1 ? n : n * n, cplx(0.0, 0.0));
}

double GridField::coord(std::size_t i) const {
  return 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n_);
}

GridField GridField::from_function(int dim, std::size_t n,
                                   const std::function<cplx(double, double)>& f) {
  GridField g(dim, n);
  if (dim == 1) {
    for (std::size_t i = 0; i < n; ++i) g[i] = f(g.coord(i), 0.0);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) g[i * n + j] = f(g.coord(i), g.coord(j));
  }
  return g;
}

GridField GridField::random_band(int dim, std::size_t n, double lo, double hi,
                                 std::uint64_t seed) {
  GridField shape(dim, n);
  const auto& lat = fft::lattice(dim, n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<cplx> c(shape.size(), cplx(0.0, 0.0));
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double r = lat.radius[k];
    const double re = normal(rng), im = normal(rng);
    if (r > lo && r < hi && !lat.nyquist(k)) c[k] = cplx(re, im);
  }
  // Symmetrize so the field is real: c(-xi) = conj(c(xi)).
  std::vector<cplx> sym(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    std::size_t mirror;
    if (dim == 1) {
      mirror = (n - k) % n;
    } else {
      const std::size_t i = k / n, j = k % n;
      mirror = ((n - i) % n) * n + (n - j) % n;
    }
    sym[k] = 0.5 * (c[k] + std::conj(c[mirror]));
  }
  GridField g = fft::inverse(dim, n, sym);
  for (auto& v : g.data()) v = cplx(v.real(), 0.0);
  return g;
}

double GridField::l2_norm() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  const double cell = std::pow(2.0 * std::numbers::pi / static_cast<double>(n_), dim_);
  return std::sqrt(s * cell);
}

double GridField::max_abs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

double GridField::max_imag() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v.imag()));
  return m;
}

GridField& GridField::operator+=(const GridField& o) {
  if (!same_shape(o)) throw PreconditionError("grid shapes differ");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

GridField& GridField::operator-=(const GridField& o) {
  if (!same_shape(o)) throw PreconditionError("grid shapes differ");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

GridField& GridField::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

GridField operator+(GridField a, const GridField& b) { return a += b; }
GridField operator-(GridField a, const GridField& b) { return a -= b; }

GridField pointwise_product(const GridField& a, const GridField& b) {
  if (!a.same_shape(b)) throw PreconditionError("grid shapes differ");
  GridField out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
  return out;
}

}  // namespace osgood
