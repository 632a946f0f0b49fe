#include "osgood/pliss.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "osgood/error.hpp"
#include "osgood/quadrature.hpp"
#include "osgood/smoothstep.hpp"

namespace osgood {

using smooth::step;
using smooth::step_d1;
using smooth::step_d2;

namespace {

constexpr int kK0Cap = 1000000;

// sigma -> 1 / (sigma^2 mu(1/sigma)), decreasing on [1, inf).
double step_size(const Modulus& mu, double sigma) { return 1.0 / (sigma * sigma * mu(1.0 / sigma)); }

void require_capped_convergent(const Modulus& mu) {
  if (mu.osgood_class() != OsgoodClass::Convergent) {
    throw PreconditionError("the construction needs a non-Osgood (convergent) modulus; '" +
                            mu.name() + "' is " + to_string(mu.osgood_class()));
  }
  if (!mu.normalized()) {
    throw PreconditionError("apply the square-root cap (normalize_sqrt_cap) before building");
  }
}

// Refines a sampled maximiser of |f| on [lo, hi] by golden-section search.
double measured_sup(double (*f)(double), double lo, double hi, int samples) {
  double best = 0.0, arg = lo;
  for (int i = 0; i <= samples; ++i) {
    const double s = lo + (hi - lo) * i / samples;
    const double v = std::abs(f(s));
    if (v > best) {
      best = v;
      arg = s;
    }
  }
  const double h = (hi - lo) / samples;
  double a = std::max(lo, arg - h), b = std::min(hi, arg + h);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  for (int it = 0; it < 100; ++it) {
    if (std::abs(f(c)) > std::abs(f(d))) {
      b = d;
    } else {
      a = c;
    }
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  return std::max(best, std::abs(f(0.5 * (a + b))));
}

// Integral of 1/mu over (0, s_hi], computed in w = ln(1/s) piece by piece.
double small_s_integral(const Modulus& mu, double s_hi) {
  const auto integrand = [&mu](double w) {
    const double s = std::exp(-w);
    return s / mu(s);
  };
  const double ln2 = std::log(2.0);
  double w = -std::log(s_hi);
  double total = 0.0;
  double last = 0.0;
  while (w < 700.0) {
    last = quad::adaptive(integrand, w, w + ln2, 1e-12).value;
    total += last;
    w += ln2;
    if (last < 1e-17 * total) return total;
  }
  throw ConvergenceError("tail integral of 1/mu near 0 not resolved before s = e^-700");
}

}  // namespace

double CutoffFamily::A(double s) { return 1.0 - step(20.0 * (s - 0.2)); }
double CutoffFamily::dA(double s) { return -20.0 * step_d1(20.0 * (s - 0.2)); }
double CutoffFamily::C(double s) { return step(12.0 * (s - 0.25)); }
double CutoffFamily::dC(double s) { return 12.0 * step_d1(12.0 * (s - 0.25)); }
double CutoffFamily::B(double s) { return step(6.0 * s) * (1.0 - step(2.0 * (s - 0.5))); }
double CutoffFamily::dB(double s) {
  const double x1 = 6.0 * s, x2 = 2.0 * (s - 0.5);
  return 6.0 * step_d1(x1) * (1.0 - step(x2)) - 2.0 * step(x1) * step_d1(x2);
}
double CutoffFamily::J(double s) {
  return -2.0 + 4.0 * step(30.0 * (s - 1.0 / 6.0)) * (1.0 - step(6.0 * (s - 1.0 / 3.0)));
}
double CutoffFamily::dJ(double s) {
  const double x1 = 30.0 * (s - 1.0 / 6.0), x2 = 6.0 * (s - 1.0 / 3.0);
  return 4.0 * (30.0 * step_d1(x1) * (1.0 - step(x2)) - 6.0 * step(x1) * step_d1(x2));
}
double CutoffFamily::d2J(double s) {
  const double x1 = 30.0 * (s - 1.0 / 6.0), x2 = 6.0 * (s - 1.0 / 3.0);
  return 4.0 * (900.0 * step_d2(x1) * (1.0 - step(x2)) - 360.0 * step_d1(x1) * step_d1(x2) -
                36.0 * step(x1) * step_d2(x2));
}

CutoffFamily make_cutoffs() {
  CutoffFamily c;
  c.J_prime_sup = measured_sup(&CutoffFamily::dJ, 0.0, 1.0, 20000);
  c.J_second_sup = measured_sup(&CutoffFamily::d2J, 0.0, 1.0, 20000);
  return c;
}

PlissSequences build_sequences(const Modulus& mu, int k0, int N) {
  require_capped_convergent(mu);
  if (N < 10) throw PreconditionError("the construction needs at least 10 segments");
  if (k0 < 1) throw PreconditionError("k0 must be positive");

  PlissSequences s;
  s.mu = mu;
  s.k0 = k0;
  s.N = N;
  s.c_lin = mu.lower_linear_constant();
  const auto n1 = static_cast<std::size_t>(N) + 2;
  s.a.assign(n1, 0.0);
  s.r.assign(n1, 0.0);
  s.z.assign(n1, 0.0);
  s.q.assign(n1, 0.0);
  s.p.assign(n1, 0.0);

  // sum_{sigma >= M} f(sigma), M = N + 1 + k0: a direct block, then
  // Euler-Maclaurin sum_{sigma >= J} f ~ int_J^inf f + f(J)/2 - f'(J)/12 with
  // int_J^inf f = int_0^{1/J} ds / mu(s).
  const double M = static_cast<double>(N + 1 + k0);
  const int direct = 1000;
  const double Jsig = M + direct;
  const double fJ = step_size(mu, Jsig);
  const double hJ = Jsig * 1e-3;
  const double dfJ = (step_size(mu, Jsig + hJ) - step_size(mu, Jsig - hJ)) / (2.0 * hJ);
  double tail = small_s_integral(mu, 1.0 / Jsig) + 0.5 * fJ - dfJ / 12.0;
  for (int j = direct - 1; j >= 0; --j) tail += step_size(mu, M + j);

  s.a[static_cast<std::size_t>(N + 1)] = -tail;
  for (int n = N; n >= 1; --n) {
    s.a[static_cast<std::size_t>(n)] = s.a[static_cast<std::size_t>(n + 1)] - step_size(mu, s.m(n));
  }
  // Consecutive nodes are within a factor two, so this difference is exact and
  // the steps agree with the nodes to the last bit.
  for (int n = 1; n <= N; ++n) {
    s.r[static_cast<std::size_t>(n)] = s.a[static_cast<std::size_t>(n + 1)] - s.a[static_cast<std::size_t>(n)];
  }
  for (int n = 1; n <= N + 1; ++n) {
    const double m = s.m(n);
    s.z[static_cast<std::size_t>(n)] = m * m * m;
  }
  s.q[1] = 0.0;
  for (int n = 2; n <= N + 1; ++n) {
    const auto i = static_cast<std::size_t>(n);
    s.q[i] = s.q[i - 1] + s.z[i] * s.r[i - 1];
  }
  for (int n = 1; n <= N; ++n) {
    const auto i = static_cast<std::size_t>(n);
    s.p[i] = (s.z[i + 1] - s.z[i]) * s.r[i];
    if (!(s.p[i] > 1.0)) {
      throw PreconditionError("k0 = " + std::to_string(k0) + " is too small: p_" + std::to_string(n) +
                              " <= 1");
    }
  }
  return s;
}

K0Choice choose_k0(const Modulus& mu, int N, const CutoffFamily& cuts) {
  require_capped_convergent(mu);
  if (N < 1) throw PreconditionError("choose_k0 needs N >= 1");
  const double d = cuts.J_prime_sup;
  if (!(d > 0.0)) throw PreconditionError("cutoff family has no measured sup |J'|");
  K0Choice out;
  out.seed = static_cast<int>(std::ceil(14.0 * d - 1.0));
  const double limit = 1.0 / (2.0 * d);
  const auto admissible = [&](int k0) {
    for (int n = 1; n <= N; ++n) {
      const double m = static_cast<double>(n + k0);
      const double r = step_size(mu, m);
      const double z = m * m * m;
      const double z_next = (m + 1.0) * (m + 1.0) * (m + 1.0);
      const double p = (z_next - z) * r;
      const double ratio = p / (r * z);
      const double chain = ratio / mu(r);
      if (!(p > 1.0) || !(ratio <= limit) || !std::isfinite(chain) || !(r * m <= 1.0)) return false;
    }
    return true;
  };
  for (int k0 = 1; k0 <= kK0Cap; ++k0) {
    if (admissible(k0)) {
      out.k0 = k0;
      return out;
    }
  }
  throw RangeError("no admissible k0 up to 10^6");
}

int default_segments(const Modulus& mu, int k0) {
  require_capped_convergent(mu);
  const double threshold = std::log(1e-16);
  double q = 0.0;
  for (int n = 1; n <= 10000000; ++n) {
    const double m = static_cast<double>(n + k0);
    if (n >= 2) q += m * m * m * step_size(mu, m - 1.0);
    const double p = (3.0 * m * m + 3.0 * m + 1.0) * step_size(mu, m);
    if (-q + 2.0 * p < threshold) return std::max(10, n);
  }
  throw RangeError("default segment count exceeds 10^7");
}

double PointEval::physical(double scaled) const {
  if (scaled == 0.0) return 0.0;
  return scaled * std::exp(log_scale);
}

PlissConstruction::PlissConstruction(PlissSequences seqs, CutoffFamily cuts, Orientation orientation)
    : seqs_(std::move(seqs)), cuts_(cuts), orientation_(orientation) {}

PlissConstruction PlissConstruction::reflected() const {
  return PlissConstruction(seqs_, cuts_,
                           orientation_ == Orientation::ConstructionTime ? Orientation::ReflectedTime
                                                                         : Orientation::ConstructionTime);
}

int PlissConstruction::segment_of(double t) const {
  if (t >= 0.0) return -1;
  const auto& a = seqs_.a;
  if (t < a[1]) {
    if (t < a[1] - 1.0) throw HorizonError("t below a_1 - 1 is outside the construction");
    return 0;
  }
  if (t >= a[static_cast<std::size_t>(seqs_.N + 1)]) {
    throw HorizonError("t = " + std::to_string(t) + " lies beyond the " + std::to_string(seqs_.N) +
                       " built segments (a_{N+1} = " +
                       std::to_string(a[static_cast<std::size_t>(seqs_.N + 1)]) + ")");
  }
  const auto it = std::upper_bound(a.begin() + 1, a.begin() + seqs_.N + 2, t);
  return static_cast<int>(it - a.begin()) - 1;
}

PointEval PlissConstruction::eval_construction(int n, double t, double x1, double x2) const {
  PointEval pe;
  pe.t = t;
  pe.x1 = x1;
  pe.x2 = x2;
  pe.segment = n;
  if (n < 0) {
    finish(pe);
    return pe;
  }
  const auto& S = seqs_;
  if (n == 0) {
    const double z = S.z[1];
    const double k = std::sqrt(z);
    const double cv = std::cos(k * x1), sv = std::sin(k * x1);
    pe.log_scale = -z * (t - S.a[1]);
    pe.u = cv;
    pe.u_t = -z * cv;
    pe.u_x1 = -k * sv;
    pe.u_x1x1 = -z * cv;
    pe.envelope = 1.0;
    pe.scale = 1.0 + 3.0 * z;
    pe.Lu = 0.0;
    pe.l = 1.0;
    finish(pe);
    return pe;
  }

  const auto i = static_cast<std::size_t>(n);
  const double zn = S.z[i], zp = S.z[i + 1], rn = S.r[i], pn = S.p[i];
  const double dt = t - S.a[i];
  const double dt_next = t - S.a[i + 1];
  const double s = dt / rn;
  const double A = CutoffFamily::A(s), B = CutoffFamily::B(s), C = CutoffFamily::C(s);
  const double dA = CutoffFamily::dA(s) / rn, dB = CutoffFamily::dB(s) / rn, dC = CutoffFamily::dC(s) / rn;
  const double Jv = CutoffFamily::J(s), dJ = CutoffFamily::dJ(s) / rn;

  // Exponents relative to -q_n. q_n - q_{n+1} is an exact difference.
  const double ev = -zn * dt;
  const double ew = ev + Jv * pn;
  const double ep = (S.q[i] - S.q[i + 1]) - zp * dt_next;
  double top = -std::numeric_limits<double>::infinity();
  if (A != 0.0) top = std::max(top, ev);
  if (B != 0.0) top = std::max(top, ew);
  if (C != 0.0) top = std::max(top, ep);
  pe.log_scale = -S.q[i] + top;

  const double Ev = A != 0.0 ? std::exp(ev - top) : 0.0;
  const double Ew = B != 0.0 ? std::exp(ew - top) : 0.0;
  const double Ep = C != 0.0 ? std::exp(ep - top) : 0.0;
  const double kn = std::sqrt(zn), kp = std::sqrt(zp);
  const double cv = std::cos(kn * x1), sv = std::sin(kn * x1);
  const double cw = std::cos(kn * x2), sw = std::sin(kn * x2);
  const double cp = std::cos(kp * x1), sp = std::sin(kp * x1);

  const double v = Ev * cv, w = Ew * cw, vp = Ep * cp;
  const double w_rate = -zn + dJ * pn;  // d/dt log w
  pe.u = A * v + B * w + C * vp;
  pe.u_t = dA * v - A * zn * v + dB * w + B * w_rate * w + dC * vp - C * zp * vp;
  pe.u_x1 = -A * kn * Ev * sv - C * kp * Ep * sp;
  pe.u_x2 = -B * kn * Ew * sw;
  pe.u_x1x1 = -A * zn * v - C * zp * vp;
  pe.u_x2x2 = -B * zn * w;
  pe.l = 1.0 + dJ * pn / zn;
  pe.Lu = dA * v + dB * w + 2.0 * B * dJ * pn * w + dC * vp;
  pe.envelope = std::abs(A) * Ev + std::abs(B) * Ew + std::abs(C) * Ep;
  pe.scale = pe.envelope * (3.0 * zp + (80.0 + cuts_.J_prime_sup * pn) / rn);

  const double direct = pe.u_t - pe.u_x1x1 - pe.l * pe.u_x2x2;
  pe.lu_mismatch = pe.scale > 0.0 ? std::abs(direct - pe.Lu) / pe.scale : 0.0;
  finish(pe);
  return pe;
}

void PlissConstruction::finish(PointEval& pe) const {
  if (pe.segment < 0) {
    pe.l = 1.0;
  } else {
    const double D = pe.u * pe.u + pe.u_x1 * pe.u_x1 + pe.u_x2 * pe.u_x2;
    const double guard = 1e-300 + 1e-14 * pe.envelope * pe.envelope;
    if (D > guard) {
      const double f = -pe.Lu / D;
      pe.b1 = f * pe.u_x1;
      pe.b2 = f * pe.u_x2;
      pe.c = f * pe.u;
    } else {
      pe.b1 = pe.b2 = pe.c = 0.0;
      pe.degenerate = std::abs(pe.Lu) > 1e-300 + 1e-14 * pe.scale;
    }
  }
  if (orientation_ == Orientation::ReflectedTime) {
    // u^R(tau) = u(-tau): d_tau flips sign, and so do b and c.
    pe.t = -pe.t;
    pe.u_t = -pe.u_t;
    pe.Lu = -pe.Lu;
    pe.b1 = -pe.b1;
    pe.b2 = -pe.b2;
    pe.c = -pe.c;
    const double res = pe.u_t + pe.u_x1x1 + pe.l * pe.u_x2x2 + pe.b1 * pe.u_x1 + pe.b2 * pe.u_x2 +
                       pe.c * pe.u;
    pe.residual = pe.scale > 0.0 ? std::abs(res) / pe.scale : std::abs(res);
  } else {
    const double res = pe.u_t - pe.u_x1x1 - pe.l * pe.u_x2x2 + pe.b1 * pe.u_x1 + pe.b2 * pe.u_x2 +
                       pe.c * pe.u;
    pe.residual = pe.scale > 0.0 ? std::abs(res) / pe.scale : std::abs(res);
  }
}

PointEval PlissConstruction::eval(double t, double x1, double x2) const {
  const double tc = orientation_ == Orientation::ReflectedTime ? -t : t;
  return eval_construction(segment_of(tc), tc, x1, x2);
}

PointEval PlissConstruction::eval_on_segment(int n, double t, double x1, double x2) const {
  if (n < 0 || n > seqs_.N) throw RangeError("segment index out of range");
  return eval_construction(n, t, x1, x2);
}

double PlissConstruction::eval_l(double t) const {
  const double tc = orientation_ == Orientation::ReflectedTime ? -t : t;
  const int n = segment_of(tc);
  if (n <= 0) return 1.0;
  const auto i = static_cast<std::size_t>(n);
  const double s = (tc - seqs_.a[i]) / seqs_.r[i];
  return 1.0 + CutoffFamily::dJ(s) * seqs_.l_amplitude(n);
}

PointEval eval_solution(const PlissConstruction& pc, double t, double x1, double x2) {
  return pc.eval(t, x1, x2);
}

double eval_l(const PlissConstruction& pc, double t) { return pc.eval_l(t); }

LowerOrder eval_lower_order(const PlissConstruction& pc, double t, double x1, double x2) {
  const auto pe = pc.eval(t, x1, x2);
  return {pe.b1, pe.b2, pe.c, pe.degenerate};
}

}  // namespace osgood

// ---------------------------------------------------------------------------
// Checks on the sequences and the built construction.

namespace osgood {

namespace {

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(uniform01(rng) * (hi - lo + 1));
}

double pow2_floor(double x) { return std::exp2(std::floor(std::log2(x))); }

// l in construction time.
double l_construction(const PlissSequences& S, double tc) {
  if (tc >= 0.0 || tc < S.a[1]) return 1.0;
  const auto it = std::upper_bound(S.a.begin() + 1, S.a.begin() + S.N + 2, tc);
  const auto i = static_cast<std::size_t>(it - S.a.begin()) - 1;
  if (static_cast<int>(i) > S.N) throw HorizonError("t beyond the built segments");
  return 1.0 + CutoffFamily::dJ((tc - S.a[i]) / S.r[i]) * S.l_amplitude(static_cast<int>(i));
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

void add_cutoff_rows(VerificationReport& rep, const CutoffFamily& cuts) {
  using CF = CutoffFamily;
  const std::string anchor = "smooth cutoffs A, B, C, J";
  double range_violation = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double s = -0.5 + 2.0 * i / 20000.0;
    for (double v : {CF::A(s), CF::B(s), CF::C(s)}) {
      range_violation = std::max({range_violation, -v, v - 1.0});
    }
    range_violation = std::max({range_violation, -2.0 - CF::J(s), CF::J(s) - 2.0});
  }
  rep.add("cutoff-ranges", anchor, range_violation <= 0.0, 0.0)
      .with("max_violation", range_violation);

  // Plateaus: value and first derivative exact on each plateau interior.
  struct Plateau {
    double (*f)(double);
    double (*df)(double);
    double lo, hi, value;
  };
  const Plateau plateaus[] = {
      {CF::A, CF::dA, -1.0, 0.2, 1.0},       {CF::A, CF::dA, 0.25, 2.0, 0.0},
      {CF::B, CF::dB, -1.0, 0.0, 0.0},       {CF::B, CF::dB, 1.0, 2.0, 0.0},
      {CF::B, CF::dB, 1.0 / 6.0, 0.5, 1.0},  {CF::C, CF::dC, -1.0, 0.25, 0.0},
      {CF::C, CF::dC, 1.0 / 3.0, 2.0, 1.0},  {CF::J, CF::dJ, -1.0, 1.0 / 6.0, -2.0},
      {CF::J, CF::dJ, 0.5, 2.0, -2.0},       {CF::J, CF::dJ, 0.2, 1.0 / 3.0, 2.0},
  };
  double value_err = 0.0, deriv_err = 0.0;
  for (const auto& p : plateaus) {
    for (int i = 0; i <= 200; ++i) {
      const double s = p.lo + (p.hi - p.lo) * i / 200.0;
      value_err = std::max(value_err, std::abs(p.f(s) - p.value));
      deriv_err = std::max(deriv_err, std::abs(p.df(s)));
    }
  }
  rep.add("cutoff-plateaus", anchor, value_err == 0.0, 0.0).with("max_error", value_err);
  rep.add("cutoff-derivatives-vanish-on-plateaus", anchor, deriv_err == 0.0, 0.0)
      .with("max_abs_derivative", deriv_err);
  rep.add("cutoff-J-prime-sup", anchor, cuts.J_prime_sup > 0.0 && std::isfinite(cuts.J_prime_sup))
      .with("J_prime_sup", cuts.J_prime_sup)
      .with("J_second_sup", cuts.J_second_sup);
}

}  // namespace

VerificationReport verify_conditions(const PlissConstruction& pc, int N) {
  const auto& S = pc.seqs();
  if (N < 1 || N > S.N) throw PreconditionError("verify_conditions: N exceeds the built segments");
  VerificationReport rep("pliss");
  add_cutoff_rows(rep, pc.cuts());

  const auto idx = [](int n) { return static_cast<std::size_t>(n); };
  const double k0 = S.k0;
  const double c = S.c_lin;

  {
    bool ok = S.a[1] > -1.0 && S.a[idx(N + 1)] < 0.0;
    for (int n = 1; n <= N; ++n) ok = ok && S.a[idx(n)] < S.a[idx(n + 1)];
    rep.add("time-nodes-increasing", "time nodes increase inside (-1, 0)", ok)
        .with("a_1", S.a[1])
        .with("a_N_plus_1", S.a[idx(N + 1)]);
  }
  {
    // Integral comparison for the decreasing step sizes:
    // int_{M}^inf f <= sum_{j >= M} f(j) <= int_{M-1}^inf f, M = N + 1 + k0.
    const double M = S.N + 1 + k0;
    const double lower = small_s_integral(S.mu, 1.0 / M);
    const double upper = small_s_integral(S.mu, 1.0 / (M - 1.0));
    const double tail = -S.a[idx(S.N + 1)];
    rep.add("time-nodes-tail-bound", "time nodes increase inside (-1, 0)",
            tail >= lower * (1.0 - 1e-10) && tail <= upper * (1.0 + 1e-10))
        .with("tail", tail)
        .with("integral_lower", lower)
        .with("integral_upper", upper);
  }
  {
    bool ok = S.z[1] > 1.0;
    for (int n = 1; n <= N; ++n) ok = ok && S.z[idx(n)] < S.z[idx(n + 1)];
    rep.add("frequencies-increasing", "frequencies exceed one and increase", ok).with("z_1", S.z[1]);
  }
  {
    double pmin = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= N; ++n) pmin = std::min(pmin, S.p[idx(n)]);
    rep.add("amplitude-exceeds-one", "amplitudes exceed one", pmin > 1.0, 1.0).with("min_p", pmin);
  }
  {
    bool ok = true;
    double worst_final = -std::numeric_limits<double>::infinity();
    for (int al = 1; al <= 3; ++al) {
      for (int be = 1; be <= 3; ++be) {
        for (int ga = 1; ga <= 3; ++ga) {
          std::vector<double> L;
          for (int n = 1; n <= N; ++n) {
            const auto i = idx(n);
            L.push_back(-S.q[i] + 2.0 * S.p[i] + al * std::log(S.z[i + 1]) + be * std::log(S.p[i]) -
                        ga * std::log(S.r[i]));
          }
          ok = ok && strictly_decreasing(L);
          worst_final = std::max(worst_final, L.back());
        }
      }
    }
    rep.add("decay-with-polynomial-weights", "solution envelope decays against polynomial weights",
            ok && worst_final < std::log(1e-16))
        .with("max_final_log", worst_final);
  }
  {
    double amp = 0.0;
    for (int n = 1; n <= N; ++n) amp = std::max(amp, S.l_amplitude(n));
    const double limit = 1.0 / (2.0 * pc.cuts().J_prime_sup);
    rep.add("parabolicity-bound", "amplitude of l - 1 within half the cutoff slope", amp <= limit,
            limit)
        .with("sup_amplitude", amp);
  }
  {
    const auto b = cmu_bound(pc);
    double chi = 0.0;
    for (int n = 1; n <= N; ++n) chi = std::max(chi, S.l_amplitude(n) / S.mu(S.r[idx(n)]));
    rep.add("coefficient-regularity-chain", "coefficient l is C^mu", std::isfinite(chi) && chi <= 7.0,
            7.0)
        .with("chain_sup", chi)
        .with("certified_seminorm", b.certified);
  }
  {
    bool ok = true;
    double worst_final = -std::numeric_limits<double>::infinity();
    double worst_slope = -std::numeric_limits<double>::infinity();
    for (int al = 1; al <= 3; ++al) {
      for (int be = 1; be <= 3; ++be) {
        for (int ga = 1; ga <= 3; ++ga) {
          std::vector<double> L;
          for (int n = 1; n <= N; ++n) {
            const auto i = idx(n);
            L.push_back(-S.p[i] + al * std::log(S.z[i + 1]) + be * std::log(S.p[i]) -
                        ga * std::log(S.r[i]));
          }
          ok = ok && strictly_decreasing(L);
          worst_final = std::max(worst_final, L.back());
          worst_slope = std::max(worst_slope, L[L.size() - 1] - L[L.size() - 2]);
        }
      }
    }
    rep.add("coefficient-decay-with-polynomial-weights",
            "lower-order coefficients decay against polynomial weights", ok && worst_slope < 0.0)
        .with("max_final_log", worst_final)
        .with("max_final_slope", worst_slope);
  }
  {
    double margin = std::numeric_limits<double>::infinity();
    for (int n = 2; n <= N; ++n) {
      const double m = n + k0;
      const double bound = 0.5 * ((m + 1.0) * m - (k0 + 3.0) * (k0 + 2.0));
      margin = std::min(margin, S.q[idx(n)] - bound);
    }
    rep.add("phase-lower-bound", "phase q_n grows quadratically", margin >= 0.0, 0.0)
        .with("min_margin", margin);
  }
  {
    double lo = std::numeric_limits<double>::infinity(), hi = lo;
    for (int n = 1; n <= N; ++n) {
      const double m = n + k0, p = S.p[idx(n)];
      lo = std::min(lo, p / (3.0 * std::sqrt(m)));
      hi = std::min(hi, (3.0 / c) * (m + 2.0) / p);
    }
    rep.add("amplitude-bounds", "amplitude between 3 sqrt(m) and (3/c)(m + 2)",
            lo >= 1.0 - 1e-12 && hi >= 1.0 - 1e-12)
        .with("min_lower_ratio", lo)
        .with("min_upper_ratio", hi);
  }
  {
    double lo = std::numeric_limits<double>::infinity(), hi = lo;
    for (int n = 1; n <= N; ++n) {
      const double m = n + k0, r = S.r[idx(n)];
      lo = std::min(lo, r * std::pow(m, 1.5));
      hi = std::min(hi, (1.0 / (c * m)) / r);
    }
    rep.add("step-bounds", "step between m^(-3/2) and 1/(c m)", lo >= 1.0 - 1e-12 && hi >= 1.0 - 1e-12)
        .with("min_lower_ratio", lo)
        .with("min_upper_ratio", hi);
  }
  {
    double worst = 0.0, chain = 0.0;
    for (int n = 1; n <= N; ++n) {
      const double m = n + k0;
      const double closed = 3.0 / m + 3.0 / (m * m) + 1.0 / (m * m * m);
      worst = std::max(worst, std::abs(S.l_amplitude(n) - closed) / closed);
      chain = std::max(chain, S.l_amplitude(n) * m);
    }
    rep.add("amplitude-ratio-identity", "amplitude ratio 3/m + 3/m^2 + 1/m^3", worst <= 1e-12, 1e-12)
        .with("max_relative_error", worst);
    rep.add("amplitude-ratio-bound", "amplitude ratio 3/m + 3/m^2 + 1/m^3", chain <= 7.0, 7.0)
        .with("max_m_times_ratio", chain);
  }
  {
    double worst = 0.0;
    for (int n = 1; n <= N; ++n) worst = std::max(worst, S.r[idx(n)] * (n + k0));
    rep.add("step-below-reciprocal", "step below 1/m", worst <= 1.0, 1.0).with("max_r_times_m", worst);
  }
  {
    double margin = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= N; ++n) {
      const double m = n + k0, r = S.r[idx(n)];
      margin = std::min(margin, (S.mu(r) / r) / (S.mu(1.0 / m) * m));
    }
    rep.add("modulus-ratio-comparison", "mu(r)/r dominates mu(1/m) m", margin >= 1.0 - 1e-12)
        .with("min_ratio", margin);
  }
  return rep;
}

RegularityBound cmu_bound(const PlissConstruction& pc) {
  const auto& S = pc.seqs();
  RegularityBound b;
  for (int n = 1; n <= S.N; ++n) {
    b.chi_sup = std::max(b.chi_sup, S.l_amplitude(n) / S.mu(S.r[static_cast<std::size_t>(n)]));
  }
  const double j1 = pc.cuts().J_prime_sup, j2 = pc.cuts().J_second_sup;
  b.within = std::max(j2, 2.0 * j1) * b.chi_sup;
  // Across segments each nonconstant end sits at least r/2 (left point) or
  // r/6 (right point) from the other, and mu(r/k) >= mu(r)/k.
  b.certified = std::max(j2, 8.0 * j1) * b.chi_sup;
  return b;
}

VerificationReport verify_cmu_regularity(const PlissConstruction& pc, int pair_count,
                                         std::uint64_t seed) {
  if (pair_count < 4) throw PreconditionError("verify_cmu_regularity needs at least 4 pairs");
  const auto& S = pc.seqs();
  const auto bound = cmu_bound(pc);
  std::mt19937_64 rng(seed);
  const auto ratio = [&](double t, double s) {
    return std::abs(l_construction(S, t) - l_construction(S, s)) / S.mu(std::abs(t - s));
  };
  const auto point = [&](int n, double sigma) {
    return S.a[static_cast<std::size_t>(n)] + sigma * S.r[static_cast<std::size_t>(n)];
  };

  double within = 0.0, cross = 0.0, near_zero = 0.0, constant = 0.0;
  const int n_within = pair_count * 2 / 5, n_cross = pair_count * 3 / 10;
  const int n_zero = (pair_count - n_within - n_cross) / 2;
  const int n_const = pair_count - n_within - n_cross - n_zero;
  for (int k = 0; k < n_within; ++k) {
    const int n = uniform_int(rng, 1, S.N);
    const double s1 = uniform01(rng);
    // Half the pairs at log-uniform separations down to 1e-4 r_n.
    const double gap = (k % 2 == 0) ? uniform01(rng) - s1 : std::pow(10.0, -4.0 * uniform01(rng));
    double s2 = s1 + gap;
    if (s2 >= 1.0 || s2 < 0.0) s2 = s1 - gap;
    if (s2 >= 1.0 || s2 < 0.0 || s2 == s1) continue;
    within = std::max(within, ratio(point(n, s1), point(n, s2)));
  }
  for (int k = 0; k < n_cross; ++k) {
    const int n = uniform_int(rng, 1, S.N - 1);
    const int m = uniform_int(rng, n + 1, S.N);
    cross = std::max(cross, ratio(point(n, uniform01(rng)), point(m, uniform01(rng))));
  }
  for (int k = 0; k < n_zero; ++k) {
    const int n = uniform_int(rng, std::max(1, S.N - 9), S.N);
    const double t = point(n, uniform01(rng));
    near_zero = std::max(near_zero, ratio(t, 1e-2 * uniform01(rng)));
  }
  for (int k = 0; k < n_const; ++k) {
    const double t = (k % 2 == 0) ? S.a[1] - 0.5 * uniform01(rng) : uniform01(rng);
    const double s = (k % 2 == 0) ? S.a[1] - 0.5 * uniform01(rng) : uniform01(rng);
    if (t != s) constant = std::max(constant, ratio(t, s));
  }
  const double sup = std::max({within, cross, near_zero, constant});
  VerificationReport rep("pliss");
  const std::string anchor = "coefficient l is C^mu";
  rep.add("cmu-within-segment", anchor, within <= 2.0 * bound.within, 2.0 * bound.within)
      .with("sup_ratio", within)
      .with("chi_sup", bound.chi_sup);
  rep.add("cmu-cross-segment", anchor, cross <= bound.certified, bound.certified).with("sup_ratio", cross);
  rep.add("cmu-near-zero", anchor, near_zero <= bound.certified, bound.certified)
      .with("sup_ratio", near_zero);
  rep.add("cmu-constant-region", anchor, constant == 0.0, 0.0).with("sup_ratio", constant);
  rep.add("cmu-empirical-seminorm", anchor, sup <= 2.0 * bound.within, 2.0 * bound.within)
      .with("sup_ratio", sup)
      .with("within_bound", bound.within)
      .with("certified_bound", bound.certified)
      .with("pairs", pair_count);
  return rep;
}

namespace {

// Construction time -> time in pc's orientation.
double view_time(const PlissConstruction& pc, double tc) {
  return pc.orientation() == Orientation::ReflectedTime ? -tc : tc;
}

// f_k * exp(L_k - L_ref).
double rescaled(double mantissa, double log_scale, double log_ref) {
  if (mantissa == 0.0) return 0.0;
  return mantissa * std::exp(log_scale - log_ref);
}

void write_export_row(std::ostream& os, bool json, std::initializer_list<double> values) {
  static const char* const names[] = {"t", "x1", "x2", "u", "l", "b1", "b2", "c", "residual",
                                      "log_abs_u"};
  std::string line = json ? "{" : "";
  char num[40];
  int i = 0;
  for (double v : values) {
    if (i > 0) line += ',';
    if (json) {
      line += '"';
      line += names[i];
      line += "\":";
    }
    if (std::isfinite(v)) {
      std::snprintf(num, sizeof num, "%.17g", v);
      line += num;
    } else {
      line += json ? "null" : (v < 0 ? "-inf" : (v > 0 ? "inf" : "nan"));
    }
    ++i;
  }
  if (json) line += '}';
  line += '\n';
  os << line;
}

}  // namespace

VerificationReport verify_solution(const PlissConstruction& pc, const SolutionCheckConfig& cfg) {
  const auto& S = pc.seqs();
  const auto idx = [](int n) { return static_cast<std::size_t>(n); };
  std::mt19937_64 rng(cfg.seed);
  VerificationReport rep("pliss");
  const std::string pde = "counterexample equation with lower-order terms";

  // Residual and the closed-form operator identity.
  {
    double worst = 0.0, worst_lu = 0.0;
    int degenerate = 0, evaluated = 0;
    for (int k = 0; k < cfg.residual_points; ++k) {
      const double pick = uniform01(rng);
      double tc;
      if (pick < 0.8) {
        const int n = uniform_int(rng, 1, S.N);
        tc = S.a[idx(n)] + uniform01(rng) * S.r[idx(n)];
      } else if (pick < 0.9) {
        tc = S.a[1] - uniform01(rng);
      } else {
        tc = uniform01(rng);
      }
      const double x1 = std::numbers::pi * (2.0 * uniform01(rng) - 1.0);
      const double x2 = std::numbers::pi * (2.0 * uniform01(rng) - 1.0);
      const auto pe = pc.eval(view_time(pc, tc), x1, x2);
      ++evaluated;
      if (pe.degenerate) {
        ++degenerate;
        continue;
      }
      worst = std::max(worst, pe.residual);
      worst_lu = std::max(worst_lu, pe.lu_mismatch);
    }
    rep.add("pde-residual", pde, worst <= 1e-10, 1e-10,
            degenerate > 0 ? "degenerate points excluded from the residual" : "")
        .with("max_relative_residual", worst)
        .with("points", evaluated)
        .with("degenerate_points", degenerate);
    rep.add("closed-form-operator", pde, worst_lu <= 1e-12, 1e-12).with("max_relative_mismatch", worst_lu);
  }

  // Fourth-order central differences at power-of-two steps on the step grid.
  {
    double err_t = 0.0, err_x1 = 0.0, err_x2 = 0.0;
    for (int k = 0; k < cfg.fd_points; ++k) {
      double tc, time_scale, kmax;
      if (k % 10 == 9) {
        tc = S.a[1] - 1e-4 * uniform01(rng);
        time_scale = 1.0 / S.z[1];
        kmax = std::sqrt(S.z[1]);
      } else {
        const int n = uniform_int(rng, 1, S.N);
        const double hi = n == S.N ? 0.9 : 1.0;
        tc = S.a[idx(n)] + hi * uniform01(rng) * S.r[idx(n)];
        time_scale = std::min(1.0 / S.z[idx(n + 1)], S.r[idx(n)] / 30.0);
        kmax = std::sqrt(S.z[idx(n + 1)]);
      }
      const double ht = pow2_floor(1e-2 * time_scale);
      const double hx = pow2_floor(1e-2 / kmax);
      const double t = ht * std::round(view_time(pc, tc) / ht);
      const double x1 = hx * std::round(std::numbers::pi * (2.0 * uniform01(rng) - 1.0) / hx);
      const double x2 = hx * std::round(std::numbers::pi * (2.0 * uniform01(rng) - 1.0) / hx);
      const auto c0 = pc.eval(t, x1, x2);
      if (c0.scale == 0.0) continue;
      const double L = c0.log_scale;
      const auto u_at = [&](double tt, double a, double b) {
        const auto pe = pc.eval(tt, a, b);
        return rescaled(pe.u, pe.log_scale, L);
      };
      const auto d1 = [](double m2, double m1, double p1, double p2, double h) {
        return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
      };
      const auto d2 = [](double m2, double m1, double z, double p1, double p2, double h) {
        return (-m2 + 16.0 * m1 - 30.0 * z + 16.0 * p1 - p2) / (12.0 * h * h);
      };
      const double fd_t = d1(u_at(t - 2 * ht, x1, x2), u_at(t - ht, x1, x2), u_at(t + ht, x1, x2),
                             u_at(t + 2 * ht, x1, x2), ht);
      const double fd_x1 = d2(u_at(t, x1 - 2 * hx, x2), u_at(t, x1 - hx, x2), c0.u,
                              u_at(t, x1 + hx, x2), u_at(t, x1 + 2 * hx, x2), hx);
      const double fd_x2 = d2(u_at(t, x1, x2 - 2 * hx), u_at(t, x1, x2 - hx), c0.u,
                              u_at(t, x1, x2 + hx), u_at(t, x1, x2 + 2 * hx), hx);
      err_t = std::max(err_t, std::abs(fd_t - c0.u_t) / c0.scale);
      err_x1 = std::max(err_x1, std::abs(fd_x1 - c0.u_x1x1) / c0.scale);
      err_x2 = std::max(err_x2, std::abs(fd_x2 - c0.u_x2x2) / c0.scale);
    }
    const std::string anchor = "closed-form derivatives of the solution";
    rep.add("fd-time-derivative", anchor, err_t <= 1e-6, 1e-6).with("max_relative_error", err_t);
    rep.add("fd-x1-second-derivative", anchor, err_x1 <= 1e-6, 1e-6).with("max_relative_error", err_x1);
    rep.add("fd-x2-second-derivative", anchor, err_x2 <= 1e-6, 1e-6).with("max_relative_error", err_x2);
  }

  // Both segment formulas at the shared node a_{n+1}.
  {
    double worst_u = 0.0, worst_d = 0.0, worst_l = 0.0;
    for (int k = 0; k < cfg.junction_points; ++k) {
      const int n = k == 0 ? 0 : uniform_int(rng, 0, S.N - 1);
      const double t = S.a[idx(n + 1)];
      const double x1 = std::numbers::pi * (2.0 * uniform01(rng) - 1.0);
      const double x2 = std::numbers::pi * (2.0 * uniform01(rng) - 1.0);
      const auto lhs = pc.eval_on_segment(n, t, x1, x2);
      const auto rhs = pc.eval_on_segment(n + 1, t, x1, x2);
      const double L = std::max(lhs.log_scale, rhs.log_scale);
      const auto diff = [&](double a, double b) {
        return std::abs(rescaled(a, lhs.log_scale, L) - rescaled(b, rhs.log_scale, L));
      };
      const double env = std::max(rescaled(lhs.envelope, lhs.log_scale, L),
                                  rescaled(rhs.envelope, rhs.log_scale, L));
      const double scale = std::max(rescaled(lhs.scale, lhs.log_scale, L),
                                    rescaled(rhs.scale, rhs.log_scale, L));
      worst_u = std::max(worst_u, diff(lhs.u, rhs.u) / env);
      const double kmax = std::sqrt(S.z[idx(n + 1)]);
      worst_d = std::max({worst_d, diff(lhs.u_t, rhs.u_t) / scale,
                          diff(lhs.u_x1, rhs.u_x1) / (kmax * env),
                          diff(lhs.u_x2, rhs.u_x2) / (kmax * env),
                          diff(lhs.u_x1x1, rhs.u_x1x1) / scale, diff(lhs.u_x2x2, rhs.u_x2x2) / scale});
      worst_l = std::max(worst_l, std::abs(lhs.l - rhs.l));
    }
    const std::string anchor = "solution is smooth across segment junctions";
    rep.add("junction-continuity-value", anchor, worst_u <= 1e-10, 1e-10).with("max_relative_jump", worst_u);
    rep.add("junction-continuity-derivatives", anchor, worst_d <= 1e-10, 1e-10)
        .with("max_relative_jump", worst_d);
    rep.add("junction-continuity-l", anchor, worst_l <= 1e-10, 1e-10).with("max_jump", worst_l);
  }

  // Parabolicity, with a share of samples at the extrema of J'.
  {
    double lmin = std::numeric_limits<double>::infinity(), lmax = -lmin;
    for (int k = 0; k < cfg.l_samples; ++k) {
      const int n = uniform_int(rng, 1, S.N);
      double sigma = uniform01(rng);
      if (k % 4 == 0) sigma = (k % 8 == 0) ? 1.0 / 6.0 + 1.0 / 60.0 : 1.0 / 3.0 + 1.0 / 12.0;
      const double tc = S.a[idx(n)] + sigma * S.r[idx(n)];
      const double l = pc.eval_l(view_time(pc, tc));
      lmin = std::min(lmin, l);
      lmax = std::max(lmax, l);
    }
    rep.add("parabolicity-samples", "coefficient l stays in [1/2, 3/2]", lmin >= 0.5 && lmax <= 1.5)
        .with("min_l", lmin)
        .with("max_l", lmax)
        .with("samples", cfg.l_samples);
  }

  // Support, plateau and non-triviality.
  {
    bool zero = true;
    for (int k = 0; k < 1000; ++k) {
      const double tc = k == 0 ? 0.0 : uniform01(rng);
      const auto pe = pc.eval(view_time(pc, tc), std::numbers::pi * (2.0 * uniform01(rng) - 1.0),
                              std::numbers::pi * (2.0 * uniform01(rng) - 1.0));
      zero = zero && pe.u == 0.0 && pe.u_t == 0.0 && pe.u_x1 == 0.0 && pe.u_x2 == 0.0 &&
             pe.u_x1x1 == 0.0 && pe.u_x2x2 == 0.0 && pe.b1 == 0.0 && pe.b2 == 0.0 && pe.c == 0.0;
    }
    rep.add("support-free-side", "solution vanishes on a half-line of time", zero);

    bool plateau = true;
    for (int k = 0; k < 1000; ++k) {
      const double tc = (k % 2 == 0) ? S.a[1] - uniform01(rng) : S.a[idx(uniform_int(rng, 1, S.N))];
      const auto pe = pc.eval(view_time(pc, tc), std::numbers::pi * (2.0 * uniform01(rng) - 1.0),
                              std::numbers::pi * (2.0 * uniform01(rng) - 1.0));
      plateau = plateau && pe.Lu == 0.0 && pe.b1 == 0.0 && pe.b2 == 0.0 && pe.c == 0.0;
    }
    rep.add("plateau-operator-zero", pde, plateau);

    const auto w = pc.eval(view_time(pc, S.a[1] - 1e-3), 0.0, 0.0);
    rep.add("non-trivial-witness", "solution vanishes on a half-line of time", w.u > 0.0)
        .with("t", w.t)
        .with("log_abs_u", w.log_scale + std::log(std::abs(w.u)));
  }

  // Envelope bound 3 exp(-q_n + 2 p_n) on each segment, compared in logs.
  {
    double margin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 2000; ++k) {
      const int n = uniform_int(rng, 1, S.N);
      const double tc = S.a[idx(n)] + uniform01(rng) * S.r[idx(n)];
      const auto pe = pc.eval(view_time(pc, tc), std::numbers::pi * (2.0 * uniform01(rng) - 1.0),
                              std::numbers::pi * (2.0 * uniform01(rng) - 1.0));
      const double bound = std::log(3.0) - S.q[idx(n)] + 2.0 * S.p[idx(n)];
      const double slack = 1e-12 * (1.0 + S.q[idx(n)]);
      if (pe.u != 0.0) {
        margin = std::min(margin, bound + slack - (pe.log_scale + std::log(std::abs(pe.u))));
      }
    }
    rep.add("decay-envelope", "solution envelope decays against polynomial weights", margin >= 0.0, 0.0)
        .with("min_log_margin", margin);
  }
  return rep;
}

ExportGrid ExportGrid::parse(const std::string& spec) {
  ExportGrid g;
  std::vector<std::string> axes;
  std::size_t start = 0;
  while (true) {
    const auto comma = spec.find(',', start);
    axes.push_back(spec.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (axes.size() < 2 || axes.size() > 3) {
    throw PreconditionError("grid spec needs 't0:t1:nt,x0:x1:nx[,y0:y1:ny]', got '" + spec + "'");
  }
  const auto axis = [&](const std::string& a, double& lo, double& hi, int& n) {
    double l = 0, h = 0;
    int count = 0;
    char tail = 0;
    if (std::sscanf(a.c_str(), "%lf:%lf:%d%c", &l, &h, &count, &tail) != 3 || count < 1) {
      throw PreconditionError("bad grid axis '" + a + "'");
    }
    lo = l;
    hi = h;
    n = count;
  };
  axis(axes[0], g.t0, g.t1, g.nt);
  axis(axes[1], g.x0, g.x1, g.nx);
  if (axes.size() == 3) axis(axes[2], g.y0, g.y1, g.ny);
  return g;
}

std::size_t export_construction(const PlissConstruction& pc, const ExportGrid& grid, std::ostream& os,
                                bool json) {
  const auto node = [](double lo, double hi, int n, int i) {
    return n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  };
  const auto& S = pc.seqs();
  const bool reflected = pc.orientation() == Orientation::ReflectedTime;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "orientation=%s mu=%s k0=%d segments=%d support=%s",
                reflected ? "reflected-time" : "construction-time", S.mu.name().c_str(), S.k0, S.N,
                reflected ? "t>=0" : "t<=0");
  if (json) {
    os << Json{{"meta", buf}}.dump() << '\n';
  } else {
    os << "# " << buf << '\n' << "t,x1,x2,u,l,b1,b2,c,residual,log_abs_u\n";
  }
  std::size_t rows = 0;
  for (int i = 0; i < grid.nt; ++i) {
    const double t = node(grid.t0, grid.t1, grid.nt, i);
    for (int j = 0; j < grid.nx; ++j) {
      const double x1 = node(grid.x0, grid.x1, grid.nx, j);
      for (int k = 0; k < grid.ny; ++k) {
        const double x2 = node(grid.y0, grid.y1, grid.ny, k);
        const auto pe = pc.eval(t, x1, x2);
        const double log_abs = pe.u == 0.0 ? -std::numeric_limits<double>::infinity()
                                           : pe.log_scale + std::log(std::abs(pe.u));
        write_export_row(os, json, {t, x1, x2, pe.physical(pe.u), pe.l, pe.b1, pe.b2, pe.c,
                                    pe.residual, log_abs});
        ++rows;
      }
    }
  }
  return rows;
}

}  // namespace osgood
