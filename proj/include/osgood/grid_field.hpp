#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace osgood {

using cplx = std::complex<double>;

// Samples on the uniform periodic grid over [0, 2pi)^dim, n points per axis,
// row-major with the last axis fastest. n must be a power of two.
class GridField {
 public:
  GridField() = default;
  GridField(int dim, std::size_t n);

  static GridField from_function(int dim, std::size_t n,
                                 const std::function<cplx(double, double)>& f);
  // Real field whose Fourier coefficients are standard normal on
  // lo < |xi| < hi (Hermitian-symmetric) and zero elsewhere.
  static GridField random_band(int dim, std::size_t n, double lo, double hi, std::uint64_t seed);

  int dim() const { return dim_; }
  std::size_t n() const { return n_; }
  std::size_t size() const { return data_.size(); }
  double coord(std::size_t i) const;

  cplx& operator[](std::size_t i) { return data_[i]; }
  const cplx& operator[](std::size_t i) const { return data_[i]; }
  std::vector<cplx>& data() { return data_; }
  const std::vector<cplx>& data() const { return data_; }

  // L2 norm with the measure of [0, 2pi)^dim.
  double l2_norm() const;
  double max_abs() const;
  double max_imag() const;

  GridField& operator+=(const GridField& o);
  GridField& operator-=(const GridField& o);
  GridField& operator*=(double s);

  bool same_shape(const GridField& o) const { return dim_ == o.dim_ && n_ == o.n_; }

 private:
  int dim_ = 1;
  std::size_t n_ = 0;
  std::vector<cplx> data_;
};

GridField operator+(GridField a, const GridField& b);
GridField operator-(GridField a, const GridField& b);
GridField pointwise_product(const GridField& a, const GridField& b);

bool is_power_of_two(std::size_t n);

}  // namespace osgood
