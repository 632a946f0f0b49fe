#include "osgood/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "osgood/error.hpp"
#include "osgood/fft.hpp"
#include "osgood/smoothstep.hpp"

namespace osgood {

namespace {

constexpr double kSlack = 1e-12;
const std::string kPartitionAnchor = "dyadic partition of unity";
const std::string kBernsteinAnchor = "Bernstein inequalities for dyadic blocks";

void require_block_fits(std::size_t n, int nu) {
  if (nu < 0) throw PreconditionError("block index must be non-negative");
  if (nu > DyadicPartition::max_block(n)) {
    throw PreconditionError("block " + std::to_string(nu) + " reaches the Nyquist frequency of a " +
                            std::to_string(n) + "-point grid");
  }
}

std::vector<cplx> apply_multiplier(const std::vector<cplx>& c, const fft::Lattice& lat, int nu) {
  std::vector<cplx> out(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) out[k] = c[k] * DyadicPartition::block(nu, lat.radius[k]);
  return out;
}

double sq(double x) { return x * x; }

}  // namespace

double DyadicPartition::phi0(double r) { return 1.0 - smooth::step(r - 1.0); }

double DyadicPartition::block(int nu, double r) {
  if (nu == 0) return phi0(r);
  return phi0(std::ldexp(r, -nu)) - phi0(std::ldexp(r, -(nu - 1)));
}

double DyadicPartition::partial_sum(double r) const { return phi0(std::ldexp(r, -nu_max)); }

int DyadicPartition::max_block(std::size_t n) {
  int nu = 0;
  while ((std::size_t{1} << (nu + 2)) <= n / 2) ++nu;
  return nu;
}

DyadicPartition DyadicPartition::for_grid(int dim, std::size_t n) {
  return DyadicPartition{dim, max_block(n)};
}

VerificationReport check_partition(const DyadicPartition& part, int samples) {
  VerificationReport rep("dyadic");
  const double r_top = std::ldexp(4.0, part.nu_max);
  std::vector<double> r(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) r[static_cast<std::size_t>(i)] = r_top * i / (samples - 1);

  double bound_violation = 0.0, plateau = 0.0, monotone = 0.0, telescoping = 0.0, negative = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double p = DyadicPartition::phi0(r[i]);
    bound_violation = std::max({bound_violation, -p, p - 1.0});
    if (r[i] <= 1.0) plateau = std::max(plateau, std::abs(p - 1.0));
    if (r[i] >= 2.0) plateau = std::max(plateau, std::abs(p));
    if (i > 0) monotone = std::max(monotone, p - DyadicPartition::phi0(r[i - 1]));
    double sum = 0.0;
    for (int nu = 0; nu <= part.nu_max; ++nu) {
      const double b = DyadicPartition::block(nu, r[i]);
      negative = std::max(negative, -b);
      sum += b;
    }
    telescoping = std::max(telescoping, std::abs(sum - part.partial_sum(r[i])));
  }
  rep.add("profile-bounds", kPartitionAnchor, bound_violation <= 0.0, 0.0)
      .with("worst_violation", bound_violation);
  rep.add("profile-plateaus", kPartitionAnchor, plateau == 0.0, 0.0).with("worst_violation", plateau);
  rep.add("profile-radially-decreasing", kPartitionAnchor, monotone <= 0.0, 0.0)
      .with("worst_violation", monotone);
  rep.add("blocks-nonnegative", kPartitionAnchor, negative <= 0.0, 0.0)
      .with("worst_violation", negative);
  rep.add("telescoping-sum", kPartitionAnchor, telescoping <= 1e-15, 1e-15)
      .with("max_abs_error", telescoping);
  return rep;
}

GridField lp_block(const DyadicPartition& part, const GridField& u, int nu) {
  if (u.dim() != part.dim) throw PreconditionError("field and partition dimensions differ");
  require_block_fits(u.n(), nu);
  const auto& lat = fft::lattice(u.dim(), u.n());
  return fft::inverse(u.dim(), u.n(), apply_multiplier(fft::forward(u), lat, nu));
}

std::vector<GridField> lp_decompose(const DyadicPartition& part, const GridField& u) {
  if (u.dim() != part.dim) throw PreconditionError("field and partition dimensions differ");
  require_block_fits(u.n(), part.nu_max);
  const auto& lat = fft::lattice(u.dim(), u.n());
  const auto c = fft::forward(u);
  std::vector<GridField> blocks;
  blocks.reserve(static_cast<std::size_t>(part.nu_max + 1));
  for (int nu = 0; nu <= part.nu_max; ++nu) {
    blocks.push_back(fft::inverse(u.dim(), u.n(), apply_multiplier(c, lat, nu)));
  }
  return blocks;
}

OrthogonalityRatio check_almost_orthogonality(const DyadicPartition& part, const GridField& u) {
  if (u.dim() != part.dim) throw PreconditionError("field and partition dimensions differ");
  require_block_fits(u.n(), part.nu_max);
  const auto c = fft::forward(u);
  const auto& lat = fft::lattice(u.dim(), u.n());
  double total = 0.0, blocks = 0.0, rem = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double e = std::norm(c[k]);
    total += e;
    double w2 = 0.0;
    for (int nu = 0; nu <= part.nu_max; ++nu) w2 += sq(DyadicPartition::block(nu, lat.radius[k]));
    blocks += w2 * e;
    rem += sq(1.0 - part.partial_sum(lat.radius[k])) * e;
  }
  if (!(total > 0.0)) throw PreconditionError("almost-orthogonality needs a nonzero field");
  OrthogonalityRatio out;
  out.blocks_only = blocks / total;
  out.remainder = rem / total;
  out.ratio = out.blocks_only + out.remainder;
  out.within_half_one = out.ratio >= 0.5 - kSlack && out.ratio <= 1.0 + kSlack;
  out.within_K2 = out.ratio >= 0.5 - kSlack && out.ratio <= 2.0 + kSlack;
  return out;
}

VerificationReport check_bernstein(const DyadicPartition& part, const GridField& u, int nu) {
  if (u.dim() != part.dim) throw PreconditionError("field and partition dimensions differ");
  require_block_fits(u.n(), nu);
  const auto& lat = fft::lattice(u.dim(), u.n());
  const auto c = apply_multiplier(fft::forward(u), lat, nu);
  const double norm = fft::l2_norm_from_coeffs(c, u.dim());
  if (!(norm > 0.0)) throw PreconditionError("Bernstein check needs a nonzero block");

  VerificationReport rep("dyadic");
  const double upper = std::ldexp(2.0, nu);
  double grad2 = 0.0;
  for (int j = 0; j < u.dim(); ++j) {
    const double dj = fft::l2_norm_from_coeffs(fft::derivative_coeffs(c, u.dim(), u.n(), j), u.dim());
    grad2 += dj * dj;
    const double ratio = dj / norm;
    rep.add("bernstein-upper-axis" + std::to_string(j) + "-nu" + std::to_string(nu), kBernsteinAnchor,
            ratio <= upper * (1.0 + kSlack), upper)
        .with("ratio", ratio);
  }
  if (nu >= 1) {
    const double lower = std::ldexp(0.5, nu);
    const double ratio = std::sqrt(grad2) / norm;
    rep.add("bernstein-lower-nu" + std::to_string(nu), kBernsteinAnchor,
            ratio >= lower * (1.0 - kSlack), lower)
        .with("ratio", ratio);
  }
  return rep;
}

namespace {

// phi_nu(D)(a w) - a phi_nu(D) w on the grid where a and w already live.
std::vector<cplx> commutator_coeffs(const GridField& a, const GridField& w, int nu) {
  const auto& lat = fft::lattice(w.dim(), w.n());
  const auto first = apply_multiplier(fft::forward(pointwise_product(a, w)), lat, nu);
  const GridField filtered = fft::inverse(w.dim(), w.n(), apply_multiplier(fft::forward(w), lat, nu));
  auto second = fft::forward(pointwise_product(a, filtered));
  for (std::size_t k = 0; k < second.size(); ++k) second[k] = first[k] - second[k];
  return second;
}

}  // namespace

GridField commutator(const DyadicPartition& part, const GridField& a, const GridField& w, int nu) {
  if (!a.same_shape(w)) throw PreconditionError("coefficient and field resolutions differ");
  if (w.dim() != part.dim) throw PreconditionError("field and partition dimensions differ");
  require_block_fits(w.n(), nu);
  const std::size_t m = 2 * w.n();
  const GridField ap = fft::resample(a, m);
  const GridField wp = fft::resample(w, m);
  return fft::truncate(fft::inverse(w.dim(), m, commutator_coeffs(ap, wp, nu)), w.n());
}

CoefficientField CoefficientField::identity(int dim, std::size_t n) {
  CoefficientField c;
  c.dim = dim;
  for (int j = 0; j < dim; ++j) {
    for (int k = 0; k < dim; ++k) {
      GridField g(dim, n);
      if (j == k) for (auto& v : g.data()) v = 1.0;
      c.entries.push_back(std::move(g));
    }
  }
  return c;
}

CoefficientField CoefficientField::scalar(const GridField& a) {
  CoefficientField c;
  c.dim = 1;
  c.entries.push_back(a);
  return c;
}

CommutatorEnergy commutator_energy(const CoefficientField& a, const GridField& v) {
  const int dim = v.dim();
  if (a.dim != dim) throw PreconditionError("coefficient and field dimensions differ");
  for (const auto& e : a.entries) {
    if (!e.same_shape(v)) throw PreconditionError("coefficient and field resolutions differ");
  }
  const std::size_t m = 2 * v.n();
  const auto& lat = fft::lattice(dim, m);
  const auto vc = fft::forward(fft::resample(v, m));

  std::vector<GridField> grad;
  double grad2 = 0.0;
  for (int k = 0; k < dim; ++k) {
    const auto gk = fft::derivative_coeffs(vc, dim, m, k);
    const double nk = fft::l2_norm_from_coeffs(gk, dim);
    grad2 += nk * nk;
    grad.push_back(fft::inverse(dim, m, gk));
  }
  std::vector<GridField> ap;
  for (const auto& e : a.entries) ap.push_back(fft::resample(e, m));

  const double r_max = *std::max_element(lat.radius.begin(), lat.radius.end());
  int nu_top = 0;
  while (std::ldexp(0.5, nu_top + 1) < r_max) ++nu_top;

  CommutatorEnergy out;
  double total = 0.0;
  for (int nu = 0; nu <= nu_top; ++nu) {
    std::vector<cplx> acc(vc.size(), cplx(0.0, 0.0));
    for (int j = 0; j < dim; ++j) {
      for (int k = 0; k < dim; ++k) {
        const auto& ajk = ap[static_cast<std::size_t>(j * dim + k)];
        const auto c = fft::derivative_coeffs(commutator_coeffs(ajk, grad[static_cast<std::size_t>(k)], nu),
                                              dim, m, j);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += c[i];
      }
    }
    const double e = sq(fft::l2_norm_from_coeffs(acc, dim));
    out.per_block.push_back(e);
    total += e;
  }
  out.ratio = grad2 > 0.0 ? total / grad2 : 0.0;
  return out;
}

VerificationReport probe_commutator_bound(const std::vector<CoefficientField>& a_family,
                                          const GridField& v) {
  VerificationReport rep("dyadic");
  for (std::size_t i = 0; i < a_family.size(); ++i) {
    const auto e = commutator_energy(a_family[i], v);
    rep.add("commutator-ratio-" + std::to_string(i), "commutator gradient bound",
            std::isfinite(e.ratio))
        .with("ratio", e.ratio)
        .with("resolution", static_cast<double>(v.n()));
  }
  return rep;
}

double block_overlap_max(int mu, int nu, double r_max) {
  double worst = 0.0;
  const int samples = 200000;
  for (int i = 0; i <= samples; ++i) {
    const double r = r_max * i / samples;
    worst = std::max(worst, std::abs(DyadicPartition::block(mu, r) * DyadicPartition::block(nu, r)));
  }
  return worst;
}

}  // namespace osgood
