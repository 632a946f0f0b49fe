#pragma once

#include <cmath>

namespace osgood::smooth {

// S(x) = E(x) / (E(x) + E(1 - x)) with E(x) = exp(-1/x) for x > 0, else 0.
// S = 0 on x <= 0, S = 1 on x >= 1, and every derivative vanishes at both ends.
// The forms below use g = 1/x - 1/(1-x) so nothing overflows near the ends.

inline double step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double g = 1.0 / x - 1.0 / (1.0 - x);
  if (g > 0.0) {
    const double e = std::exp(-g);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(g));
}

inline double step_d1(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double s = step(x);
  const double y = 1.0 - x;
  return s * (1.0 - s) * (1.0 / (x * x) + 1.0 / (y * y));
}

inline double step_d2(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double s = step(x);
  const double y = 1.0 - x;
  const double h = 1.0 / (x * x) + 1.0 / (y * y);
  const double dh = -2.0 / (x * x * x) + 2.0 / (y * y * y);
  const double d1 = s * (1.0 - s) * h;
  return d1 * (1.0 - 2.0 * s) * h + s * (1.0 - s) * dh;
}

}  // namespace osgood::smooth
