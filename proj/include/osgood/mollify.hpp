#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "osgood/modulus.hpp"
#include "osgood/pliss.hpp"
#include "osgood/report.hpp"

namespace osgood {

// rho(x) = exp(-1 / (1 - 4 x^2)) / Z on |x| < 1/2, zero elsewhere. Even, so
// affine functions are reproduced exactly.
class MollifierKernel {
 public:
  MollifierKernel();

  double operator()(double x) const;
  double derivative(double x) const;
  double normalization() const { return Z_; }
  // Integral of rho by an independent composite rule; 1 up to ~1e-15.
  double mass() const { return mass_; }
  // ||rho'||_1 = 2 rho(0) for a unimodal even bump.
  double derivative_l1() const { return 2.0 * (*this)(0.0); }

 private:
  double Z_ = 1.0;
  double mass_ = 0.0;
};

// A scalar function of time together with what the mollifier needs to
// integrate it accurately: the points where it is not smooth and a certified
// C^mu seminorm.
struct TimeFunction {
  std::string name;
  std::function<double(double)> value;
  double lo = 0.0, hi = 0.0;                // domain
  double window_lo = 0.0, window_hi = 0.0;  // where a_eps is compared with a
  // Sorted points in (lo, hi) splitting a into pieces that are smooth on the
  // scale of their own width: kinks, or the edges of fast transitions.
  std::function<std::vector<double>(double, double)> breakpoints_in;
  // Extra evaluation points for a given eps (where the sup is expected).
  std::function<std::vector<double>(double)> probes;
  double seminorm = 0.0;  // certified sup |a(t) - a(s)| / mu(|t - s|)
};

TimeFunction constant_family(double c);
// a(t) = t on [-1, 1]; seminorm sup_{d <= 1} d / mu(d) = 1 / mu(1).
TimeFunction linear_family(const Modulus& mu);
// sum_{k=0}^{levels} mu(2^-k) tri(2^k t), tri(x) = dist(x, Z), on [-1, 1]
// with window [-1/2, 1/2]. Kinks sit on multiples of 2^-(levels+1).
TimeFunction sawtooth_family(const Modulus& mu, int levels = 16);
// The coefficient l(t) of the construction (construction time) around a_1.
// Segments are added until the window [a_1 - 1/8, a_1 + 1/500] plus a
// margin of max_eps/2 fits below a_{N+1}.
TimeFunction pliss_l_family(const Modulus& mu, double max_eps = 0.0625);

class MollifiedFunction {
 public:
  MollifiedFunction(TimeFunction a, MollifierKernel kernel, double eps);

  double eps() const { return eps_; }
  const TimeFunction& source() const { return a_; }
  // (a_eps(t), d/dt a_eps(t)) from one set of nodes. The derivative uses
  // (1/eps) int (a(t - eps x) - a(t)) rho'(x) dx.
  std::pair<double, double> value_and_derivative(double t) const;
  double value(double t) const { return value_and_derivative(t).first; }
  double derivative(double t) const { return value_and_derivative(t).second; }

 private:
  TimeFunction a_;
  MollifierKernel kernel_;
  double eps_;
};

// Throws PreconditionError for eps outside (0, 1/2] or when the window
// widened by eps/2 on each side leaves the domain. Quadrature splits the
// kernel support at breakpoints and doubles Gauss-Legendre panels until two
// levels agree to 1e-10; ConvergenceError otherwise.
MollifiedFunction mollify_in_time(const TimeFunction& a, const MollifierKernel& kernel, double eps);

// eps = 2^-e for e = e_lo..e_hi.
std::vector<double> dyadic_eps(int e_lo, int e_hi);

// Per eps: sup_t |a_eps - a| and sup_t |d a_eps| over the window grid and
// probes, the fitted C = sup|a_eps - a| / mu(eps) and
// C~ = sup|d a_eps| eps / mu(eps). Passes when both stay within a factor 2
// across the sweep (values below the quadrature floor are excluded), and
// checks the certified bounds [a]_mu mu(eps/2) and [a]_mu ||rho'||_1 mu(eps/2)/eps.
VerificationReport verify_mollifier_bounds(const TimeFunction& a, const Modulus& mu,
                                           const MollifierKernel& kernel,
                                           const std::vector<double>& eps_list);

}  // namespace osgood
