#pragma once

#include <vector>

#include "osgood/grid_field.hpp"
#include "osgood/report.hpp"

namespace osgood {

// Radial Littlewood-Paley partition on the integer frequency lattice:
// phi_0(xi) = 1 - S(|xi| - 1), phi_nu(xi) = phi_0(xi / 2^nu) - phi_0(xi / 2^(nu-1)).
struct DyadicPartition {
  int dim = 1;
  int nu_max = 0;

  static double phi0(double r);
  static double block(int nu, double r);
  // sum_{nu <= nu_max} phi_nu(r) = phi0(r / 2^nu_max).
  double partial_sum(double r) const;

  // Largest nu whose block stays inside an n-point grid: 2^(nu+1) <= n/2.
  static int max_block(std::size_t n);
  static DyadicPartition for_grid(int dim, std::size_t n);
};

// Profile bounds, plateaus, monotonicity and telescoping on sampled radii.
VerificationReport check_partition(const DyadicPartition& part, int samples);

// phi_nu(D) u. Throws PreconditionError when the block would reach the
// Nyquist frequency or the dimensions differ.
GridField lp_block(const DyadicPartition& part, const GridField& u, int nu);

// Blocks 0..nu_max from one forward transform (serial reference).
std::vector<GridField> lp_decompose(const DyadicPartition& part, const GridField& u);

struct OrthogonalityRatio {
  double ratio = 0.0;      // (sum_nu ||u_nu||^2 + ||R u||^2) / ||u||^2
  double blocks_only = 0.0;  // sum_nu ||u_nu||^2 / ||u||^2
  double remainder = 0.0;    // ||R u||^2 / ||u||^2, R = 1 - phi0(D / 2^nu_max)
  bool within_half_one = false;  // 1/2 <= ratio <= 1 (up to 1e-12)
  bool within_K2 = false;        // 1/2 <= ratio <= 2
};

// Throws PreconditionError for u == 0.
OrthogonalityRatio check_almost_orthogonality(const DyadicPartition& part, const GridField& u);

// ||d_j u_nu|| <= 2^(nu+1) ||u_nu|| for every axis and, for nu >= 1,
// ||grad u_nu|| >= 2^(nu-1) ||u_nu||. Throws PreconditionError for an empty block.
VerificationReport check_bernstein(const DyadicPartition& part, const GridField& u, int nu);

// phi_nu(D)(a w) - a phi_nu(D) w. Products are formed on a grid of twice the
// resolution so they are exact for fields resolved on the input grid; the
// result is returned on the input grid.
GridField commutator(const DyadicPartition& part, const GridField& a, const GridField& w, int nu);

// Coefficient matrix a_jk (dim x dim, symmetric) sampled on a grid.
struct CoefficientField {
  int dim = 1;
  std::vector<GridField> entries;  // row-major dim x dim
  const GridField& at(int j, int k) const { return entries[static_cast<std::size_t>(j * dim + k)]; }
  static CoefficientField identity(int dim, std::size_t n);
  static CoefficientField scalar(const GridField& a);
};

struct CommutatorEnergy {
  double ratio = 0.0;  // sum_nu ||sum_jk d_j [phi_nu, a_jk] d_k v||^2 / ||grad v||^2
  std::vector<double> per_block;  // numerators by nu
};

// Every block that meets the doubled grid contributes, so the sum over nu
// covers all frequencies of the products.
CommutatorEnergy commutator_energy(const CoefficientField& a, const GridField& v);

// One row per coefficient field with the measured ratio; rows pass when the
// ratio is finite.
VerificationReport probe_commutator_bound(const std::vector<CoefficientField>& a_family,
                                          const GridField& v);

// phi_mu * phi_nu on the lattice; identically zero for |mu - nu| >= 2.
double block_overlap_max(int mu, int nu, double r_max);

}  // namespace osgood
