#pragma once

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <string>

#include "osgood/error.hpp"

namespace osgood::quad {

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

// Globally adaptive Gauss-Kronrod (7/15): the panel with the largest error
// is bisected until the summed error is below max(abs_tol, rel_tol * |value|).
// Throws ConvergenceError when `max_panels` is reached first.
template <class F>
Estimate adaptive(F&& f, double a, double b, double rel_tol = 1e-12, double abs_tol = 0.0,
                  std::size_t max_panels = 2000) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  const auto eval = [&f](double lo, double hi) {
    double err = 0.0;
    const double v = GK::integrate(f, lo, hi, 0, 0.0, &err);
    // The single-panel estimate is reported on the reference interval [-1, 1].
    return Panel{lo, hi, v, err * 0.5 * std::abs(hi - lo)};
  };
  std::priority_queue<Panel> heap;
  heap.push(eval(a, b));
  double value = heap.top().value;
  double error = heap.top().error;
  while (error > std::max(abs_tol, rel_tol * std::abs(value))) {
    if (heap.size() >= max_panels || !std::isfinite(value)) {
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "adaptive quadrature on [%.6g, %.6g] stalled: error %.3g, value %.6g", a, b,
                    error, value);
      throw ConvergenceError(msg);
    }
    const Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = eval(worst.a, mid);
    const Panel right = eval(mid, worst.b);
    heap.push(left);
    heap.push(right);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
  }
  // Re-sum to shed the drift of the running updates.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return {value, error};
}

// Fixed N-point Gauss-Legendre on [a, b].
template <unsigned N, class F>
double gauss(F&& f, double a, double b) {
  return boost::math::quadrature::gauss<double, N>::integrate(f, a, b);
}

// Composite N-point Gauss-Legendre with `panels` equal panels on [a, b].
template <unsigned N, class F>
double composite_gauss(F&& f, double a, double b, std::size_t panels) {
  using Rule = boost::math::quadrature::gauss<double, N>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  const double h = (b - a) / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + h * static_cast<double>(p);
    const double mid = lo + 0.5 * h;
    const double half = 0.5 * h;
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0.0) {
        s += w[i] * f(mid);
      } else {
        s += w[i] * (f(mid - half * x[i]) + f(mid + half * x[i]));
      }
    }
    total += s * half;
  }
  return total;
}

}  // namespace osgood::quad
