#include "osgood/weight.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "osgood/error.hpp"
#include "osgood/quadrature.hpp"

namespace osgood {

namespace {

constexpr double kMaxLogT = 350.0;
constexpr double kIdentityTol = 1e-6;
constexpr int kMaxDoublings = 5;
constexpr double kEps = 2.220446049250313e-16;

double cell_integral_g(const Modulus& mu, double a, double b) {
  return quad::gauss<10>(
      [&mu](double w) {
        const double s = std::exp(-w);
        return s / mu(s);
      },
      a, b);
}

// e^w g(w) = 1 / mu(e^-w): the u-derivative of Phi along tau = phi(e^u).
double cell_integral_Phi(const Modulus& mu, double a, double b) {
  return quad::gauss<10>([&mu](double w) { return 1.0 / mu(std::exp(-w)); }, a, b);
}

}  // namespace

std::size_t WeightTable::cell_of(double u) const {
  const double pos = u / h_;
  const auto last = static_cast<double>(u_.size() - 1);
  const double i = std::clamp(std::floor(pos + 0.5), 0.0, last);
  return static_cast<std::size_t>(i);
}

void WeightTable::tabulate(std::size_t cells) {
  const double u_max = std::log(t_max_);
  h_ = u_max / static_cast<double>(cells);
  u_.assign(cells + 1, 0.0);
  phi_.assign(cells + 1, 0.0);
  for (std::size_t i = 1; i <= cells; ++i) {
    u_[i] = i == cells ? u_max : h_ * static_cast<double>(i);
    phi_[i] = phi_[i - 1] + cell_integral_g(mu_, u_[i - 1], u_[i]);
  }
  tau_max_ = phi_.back();
  Phi_.clear();
}

double WeightTable::dphi_dlog(double u) const {
  const double s = std::exp(-u);
  return s / mu_(s);
}

double WeightTable::phi_of_log(double u) const {
  if (u < -1e-15 || u > u_.back() * (1.0 + 1e-15)) {
    throw RangeError("ln t = " + std::to_string(u) + " outside the table [0, " +
                     std::to_string(u_.back()) + "]");
  }
  const std::size_t i = cell_of(u);
  if (u == u_[i]) return phi_[i];
  return phi_[i] + cell_integral_g(mu_, u_[i], u);
}

double WeightTable::phi(double t) const {
  if (t == 1.0) return 0.0;
  if (!(t >= 1.0)) throw RangeError("phi needs t >= 1");
  return phi_of_log(std::log(t));
}

double WeightTable::phi_prime(double t) const { return 1.0 / (t * t * mu_(1.0 / t)); }

double WeightTable::Phi(double tau) const {
  if (!has_Phi()) throw PreconditionError("Phi requested before build_Phi");
  const double u = invert_phi_log(*this, tau);
  const std::size_t i = cell_of(u);
  if (u == u_[i]) return Phi_[i];
  return Phi_[i] + cell_integral_Phi(mu_, u_[i], u);
}

double WeightTable::Phi1(double tau) const { return std::exp(invert_phi_log(*this, tau)); }

double WeightTable::Phi2(double tau) const {
  const double p1 = Phi1(tau);
  return p1 * p1 * mu_(1.0 / p1);
}

WeightTable build_phi(const Modulus& mu, double t_max, double quad_tol) {
  if (mu.osgood_class() != OsgoodClass::Divergent) {
    throw PreconditionError("weight functions need an Osgood (divergent) modulus; '" + mu.name() +
                            "' is " + to_string(mu.osgood_class()));
  }
  if (!(t_max >= 2.0)) throw PreconditionError("t_max must be at least 2");
  if (!(quad_tol > 0.0)) throw PreconditionError("quad_tol must be positive");
  if (std::log(t_max) > kMaxLogT) {
    throw PreconditionError("t_max above e^350 is not supported");
  }
  WeightTable wt(mu, t_max, quad_tol);
  const double u_max = std::log(t_max);
  wt.tabulate(std::max<std::size_t>(64, static_cast<std::size_t>(std::ceil(u_max * 16.0))));
  return wt;
}

double invert_phi_log(const WeightTable& wt, double tau) {
  if (tau == 0.0) return 0.0;
  if (!(tau >= 0.0 && tau <= wt.tau_max_)) {
    throw RangeError("tau = " + std::to_string(tau) + " outside [0, " +
                     std::to_string(wt.tau_max_) + "]");
  }
  const auto& phi = wt.phi_;
  const auto& u = wt.u_;
  auto it = std::upper_bound(phi.begin(), phi.end(), tau);
  std::size_t hi = static_cast<std::size_t>(it - phi.begin());
  if (hi >= phi.size()) return u.back();
  const std::size_t lo = hi - 1;
  double a = u[lo], b = u[hi];
  // Linear seed, then Newton with phi' = g kept inside the bracket.
  double x = a + (b - a) * (tau - phi[lo]) / (phi[hi] - phi[lo]);
  for (int iter = 0; iter < 60; ++iter) {
    const double f = wt.phi_of_log(x) - tau;
    if (f == 0.0) return x;
    if (f > 0.0) {
      b = x;
    } else {
      a = x;
    }
    double next = x - f / wt.dphi_dlog(x);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - x) <= 4e-16 * std::max(1.0, std::abs(x))) return next;
    x = next;
  }
  if (std::abs(wt.phi_of_log(x) - tau) > wt.quad_tol_ * std::max(1.0, tau)) {
    throw ConvergenceError("phi inversion did not converge at tau = " + std::to_string(tau));
  }
  return x;
}

double invert_phi(const WeightTable& wt, double tau) {
  if (tau == 0.0) return 1.0;
  const double u = invert_phi_log(wt, tau);
  const double t = std::exp(u);
  if (!std::isfinite(t)) throw RangeError("phi^-1(tau) overflows a double");
  return t;
}

namespace {

std::vector<double> cumulative_Phi(const Modulus& mu, const std::vector<double>& u) {
  std::vector<double> Phi(u.size(), 0.0);
  for (std::size_t i = 1; i < u.size(); ++i) {
    Phi[i] = Phi[i - 1] + cell_integral_Phi(mu, u[i - 1], u[i]);
  }
  return Phi;
}

}  // namespace

WeightTable build_Phi(const WeightTable& wt_in) {
  WeightTable wt = wt_in;
  IdentityResidual res;
  for (int d = 0; d <= kMaxDoublings; ++d) {
    if (d > 0) wt.tabulate((wt.u_.size() - 1) * 2);
    wt.Phi_ = cumulative_Phi(wt.mu_, wt.u_);
    res = phi_identity_residual(wt);
    if (res.max_relative <= kIdentityTol) return wt;
  }
  throw SelfCheckError("Phi'' identity residual " + std::to_string(res.max_relative) +
                       " at tau = " + std::to_string(res.at_tau) + " after node doubling");
}

IdentityResidual phi_identity_residual(const WeightTable& wt, int extra) {
  IdentityResidual out;
  const auto& u = wt.log_t_nodes();
  const double tau_max = wt.tau_max();
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    for (int k = 0; k <= extra; ++k) {
      const double frac = (k + 0.5) / (extra + 1.0);
      const double uc = u[i] + frac * (u[i + 1] - u[i]);
      const double tau = wt.phi_of_log(uc);
      const double h = 1e-3 * std::min(1.0, wt.dphi_dlog(uc));
      if (tau - 2.0 * h < 0.0 || tau + 2.0 * h > tau_max) continue;
      const double fd = (wt.Phi1(tau - 2.0 * h) - 8.0 * wt.Phi1(tau - h) + 8.0 * wt.Phi1(tau + h) -
                         wt.Phi1(tau + 2.0 * h)) /
                        (12.0 * h);
      const double rhs = wt.Phi2(tau);
      const double rel = std::abs(fd - rhs) / rhs;
      ++out.samples;
      if (rel > out.max_relative) {
        out.max_relative = rel;
        out.at_tau = tau;
      }
    }
  }
  return out;
}

double weight_value(const WeightTable& wt, double gamma, double T, double t) {
  if (!(gamma > 0.0 && T > 0.0)) throw PreconditionError("weight needs gamma > 0 and T > 0");
  if (!(t >= 0.0 && t <= T)) throw PreconditionError("weight needs 0 <= t <= T");
  const double tau = gamma * (T - t);
  if (tau > wt.tau_max()) {
    throw RangeError("gamma (T - t) = " + std::to_string(tau) + " exceeds tau_max = " +
                     std::to_string(wt.tau_max()));
  }
  const double expo = 2.0 / gamma * wt.Phi(tau);
  const double w = std::exp(expo);
  if (!std::isfinite(w)) {
    throw WeightOverflow("weight exponent " + std::to_string(expo) + " overflows a double");
  }
  return w;
}

VerificationReport check_weight_table(const WeightTable& wt, std::uint64_t seed) {
  VerificationReport rep("carleman");
  const std::string def = "weight-function definition";
  const auto& u = wt.log_t_nodes();
  const auto& phi = wt.phi_nodes();

  rep.add("phi-at-one", def, wt.phi(1.0) == 0.0, 0.0).with("phi(1)", wt.phi(1.0));
  {
    std::size_t bad = 0;
    for (std::size_t i = 0; i + 1 < phi.size(); ++i) bad += phi[i + 1] > phi[i] ? 0 : 1;
    rep.add("phi-increasing", def, bad == 0, 0.0).with("violations", static_cast<double>(bad));
  }
  {
    // Independent check in s-space: phi(t_i) against adaptive quadrature.
    double worst = 0.0;
    const std::size_t stride = std::max<std::size_t>(1, u.size() / 32);
    for (std::size_t i = stride; i < u.size(); i += stride) {
      const double s0 = std::exp(-u[i]);
      double ref = 0.0;
      for (double lo = s0; lo < 1.0; lo = std::min(1.0, lo * 2.0)) {
        const double hi = std::min(1.0, lo * 2.0);
        ref += quad::adaptive([&](double s) { return 1.0 / wt.mu()(s); }, lo, hi, 1e-12).value;
      }
      worst = std::max(worst, std::abs(phi[i] - ref) / std::max(ref, 1e-300));
    }
    const double tol = 10.0 * wt.quad_tol();
    rep.add("phi-matches-quadrature", def, worst <= tol, tol).with("max_relative", worst);
  }
  {
    // phi'(t) = 1/(t^2 mu(1/t)); in u = ln t this is g(u). Central differences
    // of the table at interior nodes, two Richardson levels (sixth order).
    double worst = 0.0;
    const double h = 1.0 / 128.0;
    const double tol = 10.0 * wt.quad_tol();
    const std::size_t stride = std::max<std::size_t>(1, u.size() / 32);
    for (std::size_t i = stride; i + 1 < u.size(); i += stride) {
      if (u[i] - h < 0.0 || u[i] + h > u.back()) continue;
      const auto d = [&](double step) {
        return (wt.phi_of_log(u[i] + step) - wt.phi_of_log(u[i] - step)) / (2.0 * step);
      };
      const double d1 = d(h), d2 = d(h / 2.0), d4 = d(h / 4.0);
      const double r1 = (4.0 * d2 - d1) / 3.0;
      const double r2 = (4.0 * d4 - d2) / 3.0;
      const double est = (16.0 * r2 - r1) / 15.0;
      const double exact = wt.dphi_dlog(u[i]);
      // Differences of values of size phi cannot resolve below this.
      const double floor = 64.0 * kEps * phi[i] / (exact * h / 4.0);
      worst = std::max(worst, std::abs(est - exact) / exact / std::max(1.0, floor / tol));
    }
    rep.add("phi-derivative", def, worst <= tol, tol,
            "central differences in ln t, Richardson-extrapolated; error scaled down where "
            "cancellation dominates")
        .with("max_scaled_relative", worst);
  }
  {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst = 0.0;
    const double u_max = u.back();
    for (int k = 0; k < 100; ++k) {
      // Half log-uniform, half uniform in t so both ends of the range are hit.
      const double t = (k % 2 == 0) ? std::exp(unif(rng) * u_max)
                                    : 1.0 + unif(rng) * (wt.t_max() - 1.0);
      const double back = std::exp(invert_phi_log(wt, wt.phi(std::min(t, wt.t_max()))));
      worst = std::max(worst, std::abs(back - t) / t);
    }
    rep.add("inverse-consistency", def, worst <= 1e-8, 1e-8).with("max_relative", worst);
  }
  if (wt.has_Phi()) {
    const std::string ident = "second-derivative identity for Phi";
    const auto res = phi_identity_residual(wt, 1);
    rep.add("phi-second-derivative-identity", ident, res.max_relative <= kIdentityTol, kIdentityTol)
        .with("max_relative", res.max_relative)
        .with("at_tau", res.at_tau)
        .with("samples", static_cast<double>(res.samples));
    rep.add("Phi-at-zero", def, wt.Phi(0.0) == 0.0 && wt.Phi1(0.0) == 1.0, 0.0)
        .with("Phi(0)", wt.Phi(0.0))
        .with("Phi1(0)", wt.Phi1(0.0));
    {
      const double grow = wt.Phi1(wt.tau_max()) / wt.Phi1(0.0);
      const bool witnessed = grow >= 10.0;
      rep.add("Phi1-growth", "unbounded growth of Phi'", witnessed || wt.t_max() < 10.0, 10.0,
              witnessed ? "" : "range too short to witness growth")
          .with("ratio", grow);
    }
    {
      std::size_t bad = 0;
      double prev = 0.0;
      for (std::size_t i = 0; i < phi.size(); ++i) {
        const double p2 = wt.Phi2(phi[i]);
        if (i > 0 && p2 < prev) ++bad;
        prev = p2;
      }
      rep.add("Phi2-nondecreasing", "unbounded growth of Phi''", bad == 0, 0.0)
          .with("violations", static_cast<double>(bad))
          .with("Phi2_at_tau_max", wt.Phi2(wt.tau_max()));
    }
    {
      bool exact = true;
      for (double g : {1.0, 2.0, 8.0, 64.0}) exact = exact && weight_value(wt, g, 1.0, 1.0) == 1.0;
      rep.add("weight-at-horizon", "Carleman weight", exact, 0.0);
    }
  }
  return rep;
}

void write_weight_csv(const WeightTable& wt, std::ostream& os) {
  os << "t,phi,tau,Phi,Phi1,Phi2\n";
  const auto& u = wt.log_t_nodes();
  const auto& phi = wt.phi_nodes();
  char buf[256];
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double t = std::exp(u[i]);
    const double Phi = wt.has_Phi() ? wt.Phi_nodes()[i] : std::nan("");
    const double p2 = t * t * wt.mu()(1.0 / t);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", t, phi[i], phi[i], Phi, t,
                  p2);
    os << buf;
  }
}

}  // namespace osgood
