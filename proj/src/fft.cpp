#include "osgood/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "osgood/error.hpp"

namespace osgood::fft {

namespace {

// Planner calls in FFTW are not thread-safe; execution on new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void transform(int dim, std::size_t n, const cplx* in, cplx* out, int sign) {
  const std::size_t total = dim == 1 ? n : n * n;
  // FFTW picks codelets by buffer alignment; fftw_malloc buffers keep that
  // choice, and so the rounding, the same on every call and thread.
  struct Buffer {
    fftw_complex* p;
    explicit Buffer(std::size_t k) : p(fftw_alloc_complex(k)) {}
    ~Buffer() { fftw_free(p); }
  };
  Buffer fin(total), fout(total);
  if (fin.p == nullptr || fout.p == nullptr) throw Error("FFTW buffer allocation failed");
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (dim == 1) {
      plan = fftw_plan_dft_1d(static_cast<int>(n), fin.p, fout.p, sign, FFTW_ESTIMATE);
    } else {
      plan = fftw_plan_dft_2d(static_cast<int>(n), static_cast<int>(n), fin.p, fout.p, sign,
                              FFTW_ESTIMATE);
    }
  }
  if (plan == nullptr) throw Error("FFTW could not create a plan");
  std::memcpy(fin.p, in, total * sizeof(cplx));
  fftw_execute(plan);
  std::memcpy(static_cast<void*>(out), fout.p, total * sizeof(cplx));
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
}

}  // namespace

std::vector<cplx> forward(const GridField& u) {
  std::vector<cplx> out(u.size());
  transform(u.dim(), u.n(), u.data().data(), out.data(), FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(u.size());
  for (auto& v : out) v *= scale;
  return out;
}

GridField inverse(int dim, std::size_t n, const std::vector<cplx>& coeffs) {
  GridField g(dim, n);
  if (coeffs.size() != g.size()) throw PreconditionError("coefficient count does not match grid");
  transform(dim, n, coeffs.data(), g.data().data(), FFTW_BACKWARD);
  return g;
}

bool Lattice::nyquist(std::size_t idx) const {
  const long half = static_cast<long>(n / 2);
  if (xi1[idx] == -half) return true;
  return dim == 2 && xi2[idx] == -half;
}

const Lattice& lattice(int dim, std::size_t n) {
  static std::mutex m;
  static std::map<std::pair<int, std::size_t>, std::unique_ptr<Lattice>> cache;
  std::lock_guard<std::mutex> lock(m);
  auto& slot = cache[{dim, n}];
  if (!slot) {
    auto lat = std::make_unique<Lattice>();
    lat->dim = dim;
    lat->n = n;
    if (dim == 1) {
      for (std::size_t k = 0; k < n; ++k) {
        const long f = freq(k, n);
        lat->xi1.push_back(f);
        lat->radius.push_back(std::abs(static_cast<double>(f)));
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const long f1 = freq(i, n), f2 = freq(j, n);
          lat->xi1.push_back(f1);
          lat->xi2.push_back(f2);
          lat->radius.push_back(std::hypot(static_cast<double>(f1), static_cast<double>(f2)));
        }
      }
    }
    slot = std::move(lat);
  }
  return *slot;
}

std::vector<cplx> derivative_coeffs(const std::vector<cplx>& c, int dim, std::size_t n, int axis) {
  const auto& lat = lattice(dim, n);
  std::vector<cplx> out(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (lat.nyquist(k)) {
      out[k] = 0.0;
      continue;
    }
    const long f = axis == 0 ? lat.xi1[k] : lat.xi2[k];
    out[k] = c[k] * cplx(0.0, static_cast<double>(f));
  }
  return out;
}

GridField derivative(const GridField& u, int axis) {
  if (axis < 0 || axis >= u.dim()) throw PreconditionError("derivative axis out of range");
  return inverse(u.dim(), u.n(), derivative_coeffs(forward(u), u.dim(), u.n(), axis));
}

namespace {

std::size_t target_index(long f, std::size_t m) {
  return f >= 0 ? static_cast<std::size_t>(f) : static_cast<std::size_t>(static_cast<long>(m) + f);
}

}  // namespace

GridField resample(const GridField& u, std::size_t m) {
  const std::size_t n = u.n();
  if (m < n) throw PreconditionError("resample target must not be coarser");
  const auto c = forward(u);
  GridField shape(u.dim(), m);
  std::vector<cplx> d(shape.size(), cplx(0.0, 0.0));
  const long half = static_cast<long>(n / 2);
  // Each axis frequency -n/2 becomes half on -n/2 and half on +n/2 when m > n.
  const auto spread = [&](long f) -> std::vector<std::pair<long, double>> {
    if (f == -half && m > n) return {{-half, 0.5}, {half, 0.5}};
    return {{f, 1.0}};
  };
  if (u.dim() == 1) {
    for (std::size_t k = 0; k < n; ++k) {
      for (auto [f, w] : spread(freq(k, n))) d[target_index(f, m)] += w * c[k];
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        for (auto [f1, w1] : spread(freq(i, n))) {
          for (auto [f2, w2] : spread(freq(j, n))) {
            d[target_index(f1, m) * m + target_index(f2, m)] += w1 * w2 * c[i * n + j];
          }
        }
      }
    }
  }
  return inverse(u.dim(), m, d);
}

GridField truncate(const GridField& u, std::size_t m) {
  const std::size_t n = u.n();
  if (m > n) throw PreconditionError("truncate target must not be finer");
  const auto c = forward(u);
  GridField shape(u.dim(), m);
  std::vector<cplx> d(shape.size(), cplx(0.0, 0.0));
  const long lim = static_cast<long>(m / 2);
  const auto keep = [&](long f) { return f > -lim && f < lim; };
  if (u.dim() == 1) {
    for (std::size_t k = 0; k < n; ++k) {
      const long f = freq(k, n);
      if (keep(f)) d[target_index(f, m)] = c[k];
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const long f1 = freq(i, n), f2 = freq(j, n);
        if (keep(f1) && keep(f2)) d[target_index(f1, m) * m + target_index(f2, m)] = c[i * n + j];
      }
    }
  }
  return inverse(u.dim(), m, d);
}

double l2_norm_from_coeffs(const std::vector<cplx>& c, int dim) {
  double s = 0.0;
  for (const auto& v : c) s += std::norm(v);
  return std::sqrt(s * std::pow(2.0 * std::numbers::pi, dim));
}

}  // namespace osgood::fft
