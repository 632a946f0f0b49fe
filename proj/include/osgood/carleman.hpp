#pragma once

#include <string>
#include <vector>

#include "osgood/dyadic.hpp"
#include "osgood/report.hpp"
#include "osgood/weight.hpp"

namespace osgood {

struct CarlemanProbeConfig {
  double T = 1.0;
  std::vector<double> gamma_grid{8, 16, 32, 64, 128, 256};
  double lambda0 = 1.0;
  std::size_t grid = 64;
  int dim = 1;
  // "zero", "sine-cos" (sin^2(2 pi t / T) cos x) or "const-time" (cos x).
  std::string test_family = "sine-cos";
};

struct CarlemanGammaRow {
  double gamma = 0.0;
  double lhs = 0.0;  // time integral of ||v_t + A v + Phi'(gamma (T - t)) v||^2
  double rhs_bracket = 0.0;  // time integral of ||grad v||^2 + gamma^(1/2) ||v||^2
  double ratio_half = 0.0;  // lhs / (gamma^(1/2) rhs_bracket)
  double ratio_full = 0.0;  // lhs / (gamma rhs_bracket)
};

struct CarlemanProbeReport {
  std::string family;
  std::vector<CarlemanGammaRow> rows;
  bool trivial = false;  // both sides vanish identically
  bool feasible = false;  // some C > 0 works from gamma0 on
  double gamma0 = 0.0;
  double C = 0.0;
  // C(g) = min over gamma >= g of ratio_half, one entry per grid gamma.
  std::vector<double> frontier;
  bool ratio_nondecreasing = false;
  std::string verdict;

  VerificationReport to_report() const;
};

// Evaluates both sides of the conjugated Carleman inequality for the
// separable family v(t, x) = theta(t) psi(x) on [0, T/2]. Spatial terms are
// spectral; the time integral is adaptive Gauss-Kronrod. Throws
// PreconditionError when the table does not reach gamma_max * T, the
// coefficients are not symmetric or fall below lambda0, or the config is
// malformed. The result is heuristic evidence only.
CarlemanProbeReport probe_carleman(const CarlemanProbeConfig& cfg, const WeightTable& wt,
                                   const CoefficientField& coeffs);

}  // namespace osgood
