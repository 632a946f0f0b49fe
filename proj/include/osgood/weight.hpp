#pragma once

#include <iosfwd>
#include <vector>

#include "osgood/modulus.hpp"
#include "osgood/report.hpp"

namespace osgood {

// phi(t) = integral of 1/mu over [1/t, 1] and Phi(tau) = integral of phi^-1
// over [0, tau], tabulated on nodes uniform in u = ln t. Between nodes values
// are completed by a 10-point Gauss rule from the nearest node, so the table
// spacing only bounds cost, not accuracy.
class WeightTable {
 public:
  const Modulus& mu() const { return mu_; }
  double t_max() const { return t_max_; }
  double tau_max() const { return tau_max_; }
  double quad_tol() const { return quad_tol_; }
  bool has_Phi() const { return !Phi_.empty(); }
  std::size_t node_count() const { return u_.size(); }

  // Node abscissae in u = ln t and the tabulated phi / Phi there.
  const std::vector<double>& log_t_nodes() const { return u_; }
  const std::vector<double>& phi_nodes() const { return phi_; }
  const std::vector<double>& Phi_nodes() const { return Phi_; }

  // phi(t) for t in [1, t_max]; phi'(t) = 1 / (t^2 mu(1/t)).
  double phi(double t) const;
  double phi_prime(double t) const;
  // phi as a function of u = ln t and its u-derivative g(u) = e^-u / mu(e^-u).
  double phi_of_log(double u) const;
  double dphi_dlog(double u) const;

  // Needs build_Phi. Phi1 = phi^-1, Phi2 = Phi1^2 mu(1 / Phi1).
  double Phi(double tau) const;
  double Phi1(double tau) const;
  double Phi2(double tau) const;

 private:
  friend WeightTable build_phi(const Modulus&, double, double);
  friend WeightTable build_Phi(const WeightTable&);
  friend double invert_phi_log(const WeightTable&, double);

  WeightTable(Modulus mu, double t_max, double quad_tol)
      : mu_(std::move(mu)), t_max_(t_max), quad_tol_(quad_tol) {}

  std::size_t cell_of(double u) const;
  void tabulate(std::size_t cells);

  Modulus mu_;
  double t_max_ = 1.0;
  double tau_max_ = 0.0;
  double quad_tol_ = 1e-12;
  double h_ = 0.0;
  std::vector<double> u_;
  std::vector<double> phi_;
  std::vector<double> Phi_;
};

// Requires a Divergent modulus and t_max >= 2; t_max is capped at e^350 so
// that Phi stays representable. Throws PreconditionError otherwise.
WeightTable build_phi(const Modulus& mu, double t_max, double quad_tol = 1e-12);

// Returns t with phi(t) = tau; tau = 0 maps to 1 exactly. Throws RangeError
// outside [0, tau_max].
double invert_phi(const WeightTable& wt, double tau);
// Same, returning ln t (usable when t itself would overflow).
double invert_phi_log(const WeightTable& wt, double tau);

// Adds Phi. The finite-difference value of Phi'' is compared with
// Phi'^2 mu(1/Phi') at every cell midpoint; node count is doubled until the
// relative residual is below 1e-6. Throws SelfCheckError if it never is.
WeightTable build_Phi(const WeightTable& wt);

// exp((2/gamma) Phi(gamma (T - t))). Accepts 0 <= t <= T. Throws RangeError
// when gamma (T - t) > tau_max and WeightOverflow when the result overflows.
double weight_value(const WeightTable& wt, double gamma, double T, double t);

struct IdentityResidual {
  double max_relative = 0.0;
  double at_tau = 0.0;
  std::size_t samples = 0;
};

// Finite-difference Phi'' against the right side of Phi'' = Phi'^2 mu(1/Phi')
// at cell midpoints and `extra` points per cell.
IdentityResidual phi_identity_residual(const WeightTable& wt, int extra = 0);

// Inverse consistency, identity residual, Phi2 growth and endpoint checks.
VerificationReport check_weight_table(const WeightTable& wt, std::uint64_t seed);

// Columns t, phi, tau, Phi, Phi1, Phi2; one line per node.
void write_weight_csv(const WeightTable& wt, std::ostream& os);

}  // namespace osgood
