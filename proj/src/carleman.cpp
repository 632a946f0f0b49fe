#include "osgood/carleman.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>

#include "osgood/error.hpp"
#include "osgood/fft.hpp"
#include "osgood/quadrature.hpp"

namespace osgood {

namespace {

struct SpatialMoments {
  double P = 0.0;  // ||psi||^2
  double Q = 0.0;  // Re <psi, A psi>
  double R = 0.0;  // ||A psi||^2
  double G = 0.0;  // ||grad psi||^2
};

struct TimeProfile {
  double theta = 0.0;
  double dtheta = 0.0;
};

void check_coefficients(const CoefficientField& a, const CarlemanProbeConfig& cfg) {
  if (a.dim != cfg.dim || a.entries.size() != static_cast<std::size_t>(cfg.dim * cfg.dim)) {
    throw PreconditionError("coefficient field does not match the probe dimension");
  }
  for (const auto& e : a.entries) {
    if (e.n() != cfg.grid || e.dim() != cfg.dim) {
      throw PreconditionError("coefficient resolution does not match the probe grid");
    }
  }
  const std::size_t pts = a.entries[0].size();
  for (std::size_t i = 0; i < pts; ++i) {
    double min_eig;
    if (cfg.dim == 1) {
      min_eig = a.entries[0][i].real();
    } else {
      const double a11 = a.at(0, 0)[i].real(), a22 = a.at(1, 1)[i].real();
      const double a12 = a.at(0, 1)[i].real(), a21 = a.at(1, 0)[i].real();
      if (std::abs(a12 - a21) > 1e-14 * (1.0 + std::abs(a12))) {
        throw PreconditionError("coefficient matrix is not symmetric");
      }
      const double mean = 0.5 * (a11 + a22);
      const double rad = std::hypot(0.5 * (a11 - a22), a12);
      min_eig = mean - rad;
    }
    if (min_eig < cfg.lambda0) {
      throw PreconditionError("coefficients fall below the ellipticity constant lambda0");
    }
  }
}

SpatialMoments spatial_moments(const CoefficientField& a, const GridField& psi) {
  const int dim = psi.dim();
  const std::size_t m = 2 * psi.n();
  const auto pc = fft::forward(fft::resample(psi, m));
  std::vector<GridField> grad;
  SpatialMoments out;
  for (int k = 0; k < dim; ++k) {
    const auto gk = fft::derivative_coeffs(pc, dim, m, k);
    const double nk = fft::l2_norm_from_coeffs(gk, dim);
    out.G += nk * nk;
    grad.push_back(fft::inverse(dim, m, gk));
  }
  std::vector<cplx> apsi(pc.size(), cplx(0.0, 0.0));
  for (int j = 0; j < dim; ++j) {
    GridField flux(dim, m);
    for (int k = 0; k < dim; ++k) {
      flux += pointwise_product(fft::resample(a.at(j, k), m), grad[static_cast<std::size_t>(k)]);
    }
    const auto dj = fft::derivative_coeffs(fft::forward(flux), dim, m, j);
    for (std::size_t i = 0; i < apsi.size(); ++i) apsi[i] += dj[i];
  }
  const double vol = std::pow(2.0 * std::numbers::pi, dim);
  double p = 0.0, q = 0.0;
  for (std::size_t i = 0; i < pc.size(); ++i) {
    p += std::norm(pc[i]);
    q += (std::conj(pc[i]) * apsi[i]).real();
  }
  out.P = p * vol;
  out.Q = q * vol;
  const double r = fft::l2_norm_from_coeffs(apsi, dim);
  out.R = r * r;
  return out;
}

}  // namespace

CarlemanProbeReport probe_carleman(const CarlemanProbeConfig& cfg, const WeightTable& wt,
                                   const CoefficientField& coeffs) {
  if (!(cfg.T > 0.0)) throw PreconditionError("probe horizon T must be positive");
  if (cfg.gamma_grid.empty()) throw PreconditionError("probe needs at least one gamma");
  for (std::size_t i = 0; i < cfg.gamma_grid.size(); ++i) {
    if (!(cfg.gamma_grid[i] >= 1.0) || (i > 0 && !(cfg.gamma_grid[i] > cfg.gamma_grid[i - 1]))) {
      throw PreconditionError("gamma grid must be increasing and at least 1");
    }
  }
  if (!(cfg.lambda0 > 0.0 && cfg.lambda0 <= 1.0)) {
    throw PreconditionError("lambda0 must lie in (0, 1]");
  }
  if (cfg.gamma_grid.back() * cfg.T > wt.tau_max()) {
    throw PreconditionError("weight table reaches tau = " + std::to_string(wt.tau_max()) +
                            " but the probe needs " +
                            std::to_string(cfg.gamma_grid.back() * cfg.T));
  }
  if (!wt.has_Phi()) throw PreconditionError("probe needs a table with Phi");
  check_coefficients(coeffs, cfg);

  const double T = cfg.T;
  std::function<TimeProfile(double)> profile;
  double amplitude = 1.0;
  if (cfg.test_family == "zero") {
    amplitude = 0.0;
    profile = [](double) { return TimeProfile{0.0, 0.0}; };
  } else if (cfg.test_family == "sine-cos") {
    const double w = 2.0 * std::numbers::pi / T;
    profile = [w](double t) {
      const double s = std::sin(w * t);
      return TimeProfile{s * s, w * std::sin(2.0 * w * t)};
    };
  } else if (cfg.test_family == "const-time") {
    profile = [](double) { return TimeProfile{1.0, 0.0}; };
  } else {
    throw PreconditionError("unknown probe family '" + cfg.test_family + "'");
  }

  const GridField psi = GridField::from_function(cfg.dim, cfg.grid, [&](double x, double y) {
    return cplx(amplitude * std::cos(x) * (cfg.dim == 2 ? std::cos(y) : 1.0), 0.0);
  });
  const SpatialMoments mom = spatial_moments(coeffs, psi);

  CarlemanProbeReport rep;
  rep.family = cfg.test_family;
  rep.rows.resize(cfg.gamma_grid.size());
  std::vector<std::exception_ptr> failures(cfg.gamma_grid.size());
  // Each gamma is independent; results land in their own slot.
#pragma omp parallel for schedule(dynamic)
  for (std::size_t gi = 0; gi < cfg.gamma_grid.size(); ++gi) {
    try {
    const double gamma = cfg.gamma_grid[gi];
    const auto lhs_density = [&](double t) {
      const auto [th, dth] = profile(t);
      const double s = dth + wt.Phi1(gamma * (T - t)) * th;
      return s * s * mom.P + 2.0 * s * th * mom.Q + th * th * mom.R;
    };
    const auto rhs_density = [&](double t) {
      const double th = profile(t).theta;
      return th * th * (mom.G + std::sqrt(gamma) * mom.P);
    };
    CarlemanGammaRow row;
    row.gamma = gamma;
    if (mom.P > 0.0) {
      row.lhs = quad::adaptive(lhs_density, 0.0, 0.5 * T, 1e-10).value;
      row.rhs_bracket = quad::adaptive(rhs_density, 0.0, 0.5 * T, 1e-10).value;
    }
    if (row.rhs_bracket > 0.0) {
      row.ratio_half = row.lhs / (std::sqrt(gamma) * row.rhs_bracket);
      row.ratio_full = row.lhs / (gamma * row.rhs_bracket);
    } else {
      row.ratio_half = row.ratio_full = std::numeric_limits<double>::infinity();
    }
    rep.rows[gi] = row;
    } catch (...) {
      failures[gi] = std::current_exception();
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  rep.trivial = std::all_of(rep.rows.begin(), rep.rows.end(),
                            [](const CarlemanGammaRow& r) { return r.lhs == 0.0 && r.rhs_bracket == 0.0; });
  rep.frontier.assign(rep.rows.size(), 0.0);
  double running = std::numeric_limits<double>::infinity();
  for (std::size_t i = rep.rows.size(); i-- > 0;) {
    running = std::min(running, rep.rows[i].ratio_half);
    rep.frontier[i] = running;
  }
  rep.ratio_nondecreasing = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    if (rep.rows[i].ratio_half < rep.rows[i - 1].ratio_half) rep.ratio_nondecreasing = false;
  }
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    if (rep.frontier[i] > 0.0) {
      rep.feasible = true;
      rep.gamma0 = rep.rows[i].gamma;
      rep.C = rep.frontier[i];
      break;
    }
  }
  if (rep.trivial) {
    rep.verdict = "trivially consistent-with the Carleman inequality (both sides vanish)";
  } else if (rep.feasible) {
    rep.verdict = "consistent-with the Carleman inequality on the sampled family";
  } else {
    rep.verdict = "not consistent-with the Carleman inequality on the sampled family";
  }
  return rep;
}

VerificationReport CarlemanProbeReport::to_report() const {
  VerificationReport out("carleman");
  const std::string anchor = "conjugated Carleman inequality";
  for (const auto& r : rows) {
    char id[64];
    std::snprintf(id, sizeof id, "probe-%s-gamma-%g", family.c_str(), r.gamma);
    out.add(id, anchor, r.lhs >= 0.0 && r.rhs_bracket >= 0.0 && std::isfinite(r.lhs) &&
                            std::isfinite(r.rhs_bracket))
        .with("gamma", r.gamma)
        .with("lhs", r.lhs)
        .with("rhs_bracket", r.rhs_bracket)
        .with("ratio_half", r.ratio_half)
        .with("ratio_full", r.ratio_full);
  }
  out.add("probe-" + family + "-feasible-region", anchor, trivial || feasible, std::nullopt, verdict)
      .with("gamma0", gamma0)
      .with("C", C);
  out.add("probe-" + family + "-ratio-nondecreasing", anchor, trivial || ratio_nondecreasing);
  return out;
}

}  // namespace osgood
