#include "osgood/mollify.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <tuple>

#include "osgood/error.hpp"
#include "osgood/kernels.hpp"
#include "osgood/quadrature.hpp"

namespace osgood {

namespace {

double bump(double x) {
  if (std::abs(x) >= 0.5) return 0.0;
  return std::exp(-1.0 / (1.0 - 4.0 * x * x));
}

// sup over d in (0, 1] of sum_k c_k min(2^k d, 1/2) / mu(d), bounded above on
// each sample interval [d1, d2] by N(d2) / mu(d1) (N and mu both increase).
double sawtooth_seminorm(const Modulus& mu, const std::vector<double>& coeff) {
  const auto numerator = [&coeff](double d) {
    double s = 0.0;
    for (std::size_t k = 0; k < coeff.size(); ++k) {
      s += coeff[k] * std::min(std::ldexp(d, static_cast<int>(k)), 0.5);
    }
    return s;
  };
  const int per_octave = 64;
  const int octaves = static_cast<int>(coeff.size()) + 4;
  double best = 0.0;
  for (int j = 0; j < per_octave * octaves; ++j) {
    const double d1 = std::exp2(-static_cast<double>(j + 1) / per_octave);
    const double d2 = std::exp2(-static_cast<double>(j) / per_octave);
    best = std::max(best, numerator(d2) / mu(d1));
  }
  // Below the finest octave N(d) / mu(d) = (sum c_k 2^k) d / mu(d) only shrinks.
  return best;
}

}  // namespace

MollifierKernel::MollifierKernel() {
  Z_ = 2.0 * quad::adaptive(bump, 0.0, 0.5, 1e-15).value;
  mass_ = quad::composite_gauss<16>([this](double x) { return (*this)(x); }, -0.5, 0.5, 64);
}

double MollifierKernel::operator()(double x) const { return bump(x) / Z_; }

double MollifierKernel::derivative(double x) const {
  if (std::abs(x) >= 0.5) return 0.0;
  const double e = 1.0 - 4.0 * x * x;
  return (*this)(x) * (-8.0 * x / (e * e));
}

TimeFunction constant_family(double c) {
  TimeFunction f;
  f.name = "constant";
  f.value = [c](double) { return c; };
  f.lo = -1.0;
  f.hi = 1.0;
  f.window_lo = -0.5;
  f.window_hi = 0.5;
  f.breakpoints_in = [](double, double) { return std::vector<double>{}; };
  f.probes = [](double) { return std::vector<double>{0.0}; };
  f.seminorm = 0.0;
  return f;
}

TimeFunction linear_family(const Modulus& mu) {
  TimeFunction f = constant_family(0.0);
  f.name = "linear";
  f.value = [](double t) { return t; };
  f.seminorm = 1.0 / mu(1.0);
  return f;
}

TimeFunction sawtooth_family(const Modulus& mu, int levels) {
  if (levels < 0 || levels > 40) throw PreconditionError("sawtooth levels must lie in [0, 40]");
  std::vector<double> coeff;
  for (int k = 0; k <= levels; ++k) coeff.push_back(mu(std::exp2(-k)));
  TimeFunction f;
  f.name = "sawtooth";
  f.value = [coeff](double t) {
    double s = 0.0;
    for (std::size_t k = 0; k < coeff.size(); ++k) {
      const double x = std::ldexp(t, static_cast<int>(k));
      s += coeff[k] * std::abs(x - std::nearbyint(x));
    }
    return s;
  };
  f.lo = -1.0;
  f.hi = 1.0;
  f.window_lo = -0.5;
  f.window_hi = 0.5;
  const int shift = levels + 1;
  f.breakpoints_in = [shift](double lo, double hi) {
    std::vector<double> out;
    const double first = std::floor(std::ldexp(lo, shift)) + 1.0;
    for (double j = first; std::ldexp(j, -shift) < hi; j += 1.0) out.push_back(std::ldexp(j, -shift));
    return out;
  };
  // Every triangle has a valley at 0, so the sup of both quantities sits
  // within a kernel width of the origin.
  f.probes = [](double eps) {
    std::vector<double> p;
    for (int k = -8; k <= 8; ++k) p.push_back(eps * k / 8.0);
    return p;
  };
  f.seminorm = sawtooth_seminorm(mu, coeff);
  return f;
}

TimeFunction pliss_l_family(const Modulus& mu, double max_eps) {
  if (!(max_eps > 0.0 && max_eps <= 0.5)) throw PreconditionError("max_eps must lie in (0, 1/2]");
  const Modulus capped = mu.normalized() ? mu : normalize_sqrt_cap(mu);
  const auto cuts = make_cutoffs();
  const int k0 = choose_k0(capped, 200, cuts).k0;
  const double right_extent = 1.0 / 500.0;
  int N = 1000;
  PlissSequences seqs = build_sequences(capped, k0, N);
  while (seqs.a[static_cast<std::size_t>(N + 1)] < seqs.a[1] + right_extent + 0.5 * max_eps) {
    N *= 2;
    if (N > 50000000) throw RangeError("pliss-l window needs too many segments");
    seqs = build_sequences(capped, k0, N);
  }
  const auto pc = std::make_shared<const PlissConstruction>(seqs, cuts);
  const double a1 = seqs.a[1];

  TimeFunction f;
  f.name = "pliss-l";
  f.value = [pc](double t) { return pc->eval_l(t); };
  f.lo = a1 - 1.0;
  f.hi = seqs.a[static_cast<std::size_t>(N + 1)];
  f.window_lo = a1 - 0.125;
  f.window_hi = a1 + right_extent;
  // Segment ends and the edges of the two J' bumps.
  f.breakpoints_in = [pc](double lo, double hi) {
    const auto& S = pc->seqs();
    std::vector<double> out;
    const auto first = std::upper_bound(S.a.begin() + 1, S.a.begin() + S.N + 2, lo);
    int n = static_cast<int>(first - S.a.begin()) - 1;
    n = std::max(n, 1);
    for (; n <= S.N; ++n) {
      const auto i = static_cast<std::size_t>(n);
      if (S.a[i] >= hi) break;
      for (double sigma : {0.0, 1.0 / 6.0, 0.2, 1.0 / 3.0, 0.5}) {
        const double t = S.a[i] + sigma * S.r[i];
        if (t > lo && t < hi) out.push_back(t);
      }
    }
    return out;
  };
  // Extrema of J' on the first segments and the onset at a_1.
  f.probes = [pc](double eps) {
    const auto& S = pc->seqs();
    std::vector<double> p;
    for (int n = 1; n <= 3; ++n) {
      const auto i = static_cast<std::size_t>(n);
      p.push_back(S.a[i] + (1.0 / 6.0 + 1.0 / 60.0) * S.r[i]);
      p.push_back(S.a[i] + (1.0 / 3.0 + 1.0 / 12.0) * S.r[i]);
    }
    for (int k = -2; k <= 4; ++k) p.push_back(S.a[1] + eps * k / 4.0);
    return p;
  };
  f.seminorm = cmu_bound(*pc).certified;
  return f;
}

MollifiedFunction::MollifiedFunction(TimeFunction a, MollifierKernel kernel, double eps)
    : a_(std::move(a)), kernel_(kernel), eps_(eps) {}

std::pair<double, double> MollifiedFunction::value_and_derivative(double t) const {
  const double half = 0.5 * eps_;
  if (t - half < a_.lo || t + half > a_.hi) {
    throw RangeError("kernel support around t = " + std::to_string(t) + " leaves the domain");
  }
  // Pieces in x, with s = t - eps x; kinks come back in increasing s.
  std::vector<double> xs{-0.5};
  if (a_.breakpoints_in) {
    const auto kinks = a_.breakpoints_in(t - half, t + half);
    for (auto it = kinks.rbegin(); it != kinks.rend(); ++it) {
      const double x = (t - *it) / eps_;
      if (x > xs.back() && x < 0.5) xs.push_back(x);
    }
  }
  xs.push_back(0.5);

  using Wide = boost::math::quadrature::gauss<double, 16>;
  using Narrow = boost::math::quadrature::gauss<double, 4>;
  const double a0 = a_.value(t);

  // Panels of width h centred at mid; accumulates both integrands.
  const auto panel = [&](const auto& nodes, const auto& weights, double mid, double hw, double& v,
                         double& d) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const int sides = nodes[i] == 0.0 ? 1 : 2;
      for (int sgn = 0; sgn < sides; ++sgn) {
        const double x = sgn == 0 ? mid - hw * nodes[i] : mid + hw * nodes[i];
        const double e = 1.0 - 4.0 * x * x;
        if (e <= 0.0) continue;
        const double rho = std::exp(-1.0 / e) / kernel_.normalization();
        const double ax = a_.value(t - eps_ * x);
        v += weights[i] * hw * ax * rho;
        d += weights[i] * hw * (ax - a0) * rho * (-8.0 * x / (e * e));
      }
    }
  };

  // Level L: 4 * 2^L sixteen-point panels per unit of x (64 nodes over the
  // support at L = 0). Pieces narrower than one panel are smooth on their own
  // width and get 2^L four-point panels instead.
  const auto integrate = [&](int level) {
    double v = 0.0, d = 0.0;
    const double per_unit = 4.0 * std::ldexp(1.0, level);
    const long min_panels = 1L << level;
    for (std::size_t p = 0; p + 1 < xs.size(); ++p) {
      const double x0 = xs[p], x1 = xs[p + 1];
      const bool narrow = per_unit * (x1 - x0) < 1.0;
      const long panels =
          narrow ? min_panels : std::max(min_panels, static_cast<long>(std::ceil(per_unit * (x1 - x0))));
      const double h = (x1 - x0) / static_cast<double>(panels);
      for (long q = 0; q < panels; ++q) {
        const double mid = x0 + h * (static_cast<double>(q) + 0.5);
        if (narrow) {
          panel(Narrow::abscissa(), Narrow::weights(), mid, 0.5 * h, v, d);
        } else {
          panel(Wide::abscissa(), Wide::weights(), mid, 0.5 * h, v, d);
        }
      }
    }
    return std::pair<double, double>{v, d / eps_};
  };

  auto prev = integrate(0);
  for (int level = 1; level <= 10; ++level) {
    const auto cur = integrate(level);
    const double scale = std::max(1.0, std::abs(cur.first));
    if (std::abs(cur.first - prev.first) <= 1e-10 * scale &&
        std::abs(cur.second - prev.second) * eps_ <= 1e-10 * scale) {
      return cur;
    }
    prev = cur;
  }
  throw ConvergenceError("mollifier quadrature did not settle at t = " + std::to_string(t));
}

MollifiedFunction mollify_in_time(const TimeFunction& a, const MollifierKernel& kernel, double eps) {
  if (!(eps > 0.0 && eps <= 0.5)) throw PreconditionError("eps must lie in (0, 1/2]");
  if (!a.value) throw PreconditionError("time function has no evaluation handle");
  if (a.window_lo - 0.5 * eps < a.lo || a.window_hi + 0.5 * eps > a.hi) {
    throw PreconditionError("window of '" + a.name + "' is too narrow for eps = " + std::to_string(eps) +
                            ": needs eps/2 of domain on each side");
  }
  return MollifiedFunction(a, kernel, eps);
}

std::vector<double> dyadic_eps(int e_lo, int e_hi) {
  if (e_lo < 1 || e_hi < e_lo) throw PreconditionError("dyadic eps range must satisfy 1 <= lo <= hi");
  std::vector<double> out;
  for (int e = e_lo; e <= e_hi; ++e) out.push_back(std::exp2(-e));
  return out;
}

VerificationReport verify_mollifier_bounds(const TimeFunction& a, const Modulus& mu,
                                           const MollifierKernel& kernel,
                                           const std::vector<double>& eps_list) {
  if (eps_list.empty()) throw PreconditionError("eps list is empty");
  VerificationReport rep("mollify");
  const std::string anchor = "mollifier approximation bounds";
  const std::string fam = a.name;

  struct Sweep {
    double eps, err, der, C, Ct;
  };
  std::vector<Sweep> sweeps;
  double a_sup = 0.0;
  for (double eps : eps_list) {
    const auto mf = mollify_in_time(a, kernel, eps);
    std::vector<double> ts;
    const int grid = 32;
    for (int i = 0; i <= grid; ++i) ts.push_back(a.window_lo + (a.window_hi - a.window_lo) * i / grid);
    if (a.probes) {
      for (double t : a.probes(eps)) {
        if (t >= a.window_lo && t <= a.window_hi) ts.push_back(t);
      }
    }
    const auto samples = kernels::mollify_sweep(mf, ts, kernels::Backend::OpenMP);
    Sweep s{eps, 0.0, 0.0, 0.0, 0.0};
    for (const auto& m : samples) {
      s.err = std::max(s.err, std::abs(m.value - m.original));
      s.der = std::max(s.der, std::abs(m.derivative));
      a_sup = std::max(a_sup, std::abs(m.original));
    }
    s.C = s.err / mu(eps);
    s.Ct = s.der * eps / mu(eps);
    sweeps.push_back(s);
    char id[96];
    std::snprintf(id, sizeof id, "%s-eps-%.6g", fam.c_str(), eps);
    rep.add(id, anchor, std::isfinite(s.C) && std::isfinite(s.Ct))
        .with("eps", eps)
        .with("sup_error", s.err)
        .with("sup_derivative", s.der)
        .with("C", s.C)
        .with("C_tilde", s.Ct)
        .with("points", static_cast<double>(ts.size()));
  }

  // Quadrature settles to 1e-10 relative; smaller sups are noise.
  const double floor = 1e-9 * std::max(1.0, a_sup);
  const auto stability = [&](auto get_sup, auto get_const) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    int used = 0;
    for (const auto& s : sweeps) {
      if (get_sup(s) <= floor) continue;
      lo = std::min(lo, get_const(s));
      hi = std::max(hi, get_const(s));
      ++used;
    }
    return std::tuple<double, double, int>{used ? lo : 0.0, hi, used};
  };
  {
    const auto [lo, hi, used] = stability([](const Sweep& s) { return s.err; },
                                          [](const Sweep& s) { return s.C; });
    rep.add(fam + "-error-constant-stable", anchor, used == 0 || hi <= 2.0 * lo, 2.0,
            used == 0 ? "a_eps = a to quadrature accuracy; C fits 0" : "")
        .with("C_min", lo)
        .with("C_max", hi)
        .with("spread", used ? hi / lo : 1.0)
        .with("eps_used", used);
  }
  {
    const auto [lo, hi, used] = stability([](const Sweep& s) { return s.der; },
                                          [](const Sweep& s) { return s.Ct; });
    rep.add(fam + "-derivative-constant-stable", anchor, used == 0 || hi <= 2.0 * lo, 2.0,
            used == 0 ? "derivative vanishes to quadrature accuracy; C~ fits 0" : "")
        .with("C_tilde_min", lo)
        .with("C_tilde_max", hi)
        .with("spread", used ? hi / lo : 1.0)
        .with("eps_used", used);
  }
  {
    // |a_eps - a| <= [a]_mu mu(eps/2), |d a_eps| <= [a]_mu ||rho'||_1 mu(eps/2) / eps.
    const auto ratio = [](double excess, double bound) {
      if (excess <= 0.0) return 0.0;
      return bound > 0.0 ? excess / bound : std::numeric_limits<double>::infinity();
    };
    double worst_err = 0.0, worst_der = 0.0;
    for (const auto& s : sweeps) {
      const double m = mu(0.5 * s.eps);
      worst_err = std::max(worst_err, ratio(s.err - floor, a.seminorm * m));
      worst_der = std::max(worst_der, ratio(s.der * s.eps - floor, a.seminorm * kernel.derivative_l1() * m));
    }
    rep.add(fam + "-error-bound-certified", anchor, worst_err <= 1.0, 1.0)
        .with("max_ratio_to_bound", worst_err)
        .with("seminorm", a.seminorm);
    rep.add(fam + "-derivative-bound-certified", anchor, worst_der <= 1.0, 1.0)
        .with("max_ratio_to_bound", worst_der)
        .with("rho_prime_l1", kernel.derivative_l1());
  }
  {
    // Along decreasing eps the sup error may not grow by more than 5%.
    std::vector<Sweep> by_eps = sweeps;
    std::sort(by_eps.begin(), by_eps.end(), [](const Sweep& x, const Sweep& y) { return x.eps > y.eps; });
    double worst = 0.0;
    for (std::size_t i = 1; i < by_eps.size(); ++i) {
      if (by_eps[i].err <= floor) continue;
      worst = std::max(worst, by_eps[i].err / by_eps[i - 1].err);
    }
    rep.add(fam + "-error-monotone-in-eps", anchor, worst <= 1.05, 1.05).with("max_growth", worst);
  }
  return rep;
}

}  // namespace osgood
