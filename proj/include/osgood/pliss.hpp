#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "osgood/modulus.hpp"
#include "osgood/report.hpp"

namespace osgood {

// Smooth cutoffs built from the smoothstep S:
//   A(s) = 1 - S(20 (s - 1/5))          1 on s <= 1/5, 0 on s >= 1/4
//   B(s) = S(6 s) (1 - S(2 (s - 1/2)))  0 off (0, 1), 1 on [1/6, 1/2]
//   C(s) = S(12 (s - 1/4))              0 on s <= 1/4, 1 on s >= 1/3
//   J(s) = -2 + 4 S(30 (s - 1/6)) (1 - S(6 (s - 1/3)))
//                                       -2 off (1/6, 1/2), 2 on [1/5, 1/3]
struct CutoffFamily {
  static double A(double s);
  static double B(double s);
  static double C(double s);
  static double J(double s);
  static double dA(double s);
  static double dB(double s);
  static double dC(double s);
  static double dJ(double s);
  static double d2J(double s);

  double J_prime_sup = 0.0;   // measured sup |J'|
  double J_second_sup = 0.0;  // measured sup |J''|
};

// Dense sampling plus golden-section refinement of sup |J'| and sup |J''|.
CutoffFamily make_cutoffs();

// Sequences of the construction, 1-based: index n is stored at [n].
//   r_n = 1 / ((n + k0)^2 mu(1 / (n + k0))), a_n = -sum_{j >= n} r_j,
//   z_n = (n + k0)^3, q_1 = 0, q_n = sum_{k=2}^n z_k r_{k-1}, p_n = (z_{n+1} - z_n) r_n.
// a, z, q are filled for n = 1..N+1; r, p for n = 1..N.
struct PlissSequences {
  Modulus mu = Modulus::from_name("sqrt");
  int k0 = 0;
  int N = 0;
  double c_lin = 0.0;
  std::vector<double> a, r, z, q, p;

  double m(int n) const { return static_cast<double>(n + k0); }
  // p_n / (r_n z_n), the amplitude of l - 1 per unit J'.
  double l_amplitude(int n) const { return p[n] / (r[n] * z[n]); }
};

// Requires a Convergent modulus with the square-root cap applied, N >= 10
// and k0 >= 1. The tail a_{N+1} comes from Euler-Maclaurin with the integral
// term evaluated in ln(1/s); the rest follows by a_n = a_{n+1} - r_n.
// Throws PreconditionError (wrong class, not normalized, p_n <= 1) or
// ConvergenceError (tail integral not resolved).
PlissSequences build_sequences(const Modulus& mu, int k0, int N);

struct K0Choice {
  int k0 = 0;
  int seed = 0;  // from 7 / (1 + k0) <= 1 / (2 sup|J'|)
};

// Smallest k0 <= 10^6 for which, on n <= N: p_n > 1, sup p_n / (r_n z_n) <=
// 1 / (2 sup|J'|), the C^mu chain value is finite and r_n (n + k0) <= 1.
// Throws PreconditionError for a non-convergent or uncapped modulus and
// RangeError when no k0 below the cap works.
K0Choice choose_k0(const Modulus& mu, int N, const CutoffFamily& cuts);

// Smallest n with exp(-q_n + 2 p_n) < 1e-16, at least 10.
int default_segments(const Modulus& mu, int k0);

enum class Orientation { ConstructionTime, ReflectedTime };

// Values at one point. u and its derivatives are stored as mantissas of
// exp(log_scale): u itself is u_m * exp(log_scale). l, b1, b2, c and the
// relative quantities are plain numbers.
struct PointEval {
  double t = 0.0, x1 = 0.0, x2 = 0.0;
  int segment = -1;  // 0: before a_1, n: [a_n, a_{n+1}), -1: support-free side
  double log_scale = 0.0;
  double u = 0.0, u_t = 0.0, u_x1 = 0.0, u_x2 = 0.0, u_x1x1 = 0.0, u_x2x2 = 0.0;
  double Lu = 0.0;  // operator applied to u, orientation-aware, same scaling as u
  double l = 1.0, b1 = 0.0, b2 = 0.0, c = 0.0;
  double scale = 0.0;        // magnitude bound of the second-order terms (scaled)
  double envelope = 0.0;     // sum of |cutoff| * exp(exponent) over the three modes (scaled)
  double residual = 0.0;     // PDE residual divided by `scale`
  double lu_mismatch = 0.0;  // |direct Lu - closed-form Lu| / scale
  bool degenerate = false;   // D <= guard while |Lu| > guard

  // Physical value of a scaled field; may overflow to +-inf or underflow to 0.
  double physical(double scaled) const;
};

class PlissConstruction {
 public:
  PlissConstruction(PlissSequences seqs, CutoffFamily cuts,
                    Orientation orientation = Orientation::ConstructionTime);

  const PlissSequences& seqs() const { return seqs_; }
  const CutoffFamily& cuts() const { return cuts_; }
  Orientation orientation() const { return orientation_; }
  PlissConstruction reflected() const;

  // Construction-time segment of t: 0 before a_1, n on [a_n, a_{n+1}), -1 on
  // t >= 0. Throws HorizonError for t in [a_{N+1}, 0) or t < a_1 - 1.
  int segment_of(double t) const;

  // Time arguments are in this construction's orientation.
  PointEval eval(double t, double x1, double x2) const;
  // Segment-n formulas evaluated at construction time t (junction checks).
  PointEval eval_on_segment(int n, double t, double x1, double x2) const;
  double eval_l(double t) const;

 private:
  PointEval eval_construction(int n, double t, double x1, double x2) const;
  void finish(PointEval& pe) const;

  PlissSequences seqs_;
  CutoffFamily cuts_;
  Orientation orientation_;
};

struct LowerOrder {
  double b1 = 0.0, b2 = 0.0, c = 0.0;
  bool degenerate = false;
};

PointEval eval_solution(const PlissConstruction& pc, double t, double x1, double x2);
double eval_l(const PlissConstruction& pc, double t);
LowerOrder eval_lower_order(const PlissConstruction& pc, double t, double x1, double x2);

// All conditions on the sequences and the bounds derived from them, n <= N.
VerificationReport verify_conditions(const PlissConstruction& pc, int N);

struct RegularityBound {
  double chi_sup = 0.0;     // sup_n p_n / (r_n z_n mu(r_n))
  double within = 0.0;      // max(sup|J''|, 2 sup|J'|) * chi_sup
  double certified = 0.0;   // max(sup|J''|, 8 sup|J'|) * chi_sup, any pair
};
RegularityBound cmu_bound(const PlissConstruction& pc);

// Stratified pairs (within a segment, across segments, near t = 0, constant
// region); passes when the sampled sup of |l(t) - l(s)| / mu(|t - s|) stays
// below twice the within-segment bound.
VerificationReport verify_cmu_regularity(const PlissConstruction& pc, int pair_count,
                                         std::uint64_t seed);

// PDE residual, closed-form vs finite-difference derivatives, junction
// continuity, parabolicity and support checks on random samples.
struct SolutionCheckConfig {
  int residual_points = 100000;
  int fd_points = 200;
  int junction_points = 200;
  int l_samples = 100000;
  std::uint64_t seed = 1;
};
VerificationReport verify_solution(const PlissConstruction& pc, const SolutionCheckConfig& cfg);

// "t0:t1:nt,x0:x1:nx,y0:y1:ny" in the construction's orientation.
struct ExportGrid {
  double t0 = 0, t1 = 0, x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  int nt = 1, nx = 1, ny = 1;
  static ExportGrid parse(const std::string& spec);
  std::size_t rows() const {
    return static_cast<std::size_t>(nt) * static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  }
};

// CSV (with a leading '#' metadata line) or JSON lines of
// t, x1, x2, u, l, b1, b2, c, residual, log_abs_u. Returns the row count.
std::size_t export_construction(const PlissConstruction& pc, const ExportGrid& grid,
                                std::ostream& os, bool json);

}  // namespace osgood
