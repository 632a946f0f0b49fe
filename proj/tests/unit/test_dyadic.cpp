#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "osgood/dyadic.hpp"
#include "osgood/error.hpp"
#include "osgood/fft.hpp"
#include "test_util.hpp"

namespace osgood {
namespace {

constexpr double pi = std::numbers::pi;

GridField wave1d(std::size_t n, double k, double amp = 1.0, double offset = 0.0) {
  return GridField::from_function(1, n, [=](double x, double) {
    return cplx(offset + amp * std::cos(k * x), 0.0);
  });
}

double rel_l2(const GridField& a, const GridField& b) { return (a - b).l2_norm() / b.l2_norm(); }

TEST(Partition, ProfileExamples) {
  EXPECT_EQ(DyadicPartition::phi0(0.0), 1.0);
  EXPECT_EQ(DyadicPartition::phi0(1.0), 1.0);
  EXPECT_EQ(DyadicPartition::phi0(2.0), 0.0);
  EXPECT_EQ(DyadicPartition::block(3, 8.0), 1.0);
  EXPECT_EQ(DyadicPartition::block(3, 3.0), 0.0);
  EXPECT_EQ(DyadicPartition::max_block(1024), 8);
  EXPECT_TRUE(check_partition(DyadicPartition::for_grid(2, 256), 2000).all_passed());
}

TEST(Partition, PropertyTelescopingAndLocality) {
  testing::Gen g(23);
  for (int i = 0; i < 2000; ++i) {
    const double r = g.uniform(0.0, 600.0);
    const int K = g.integer(0, 9);
    double sum = 0.0;
    for (int nu = 0; nu <= K; ++nu) sum += DyadicPartition::block(nu, r);
    EXPECT_NEAR(sum, DyadicPartition::phi0(std::ldexp(r, -K)), 1e-15);
  }
  for (int m = 0; m <= 8; ++m)
    for (int nu = 0; nu <= 8; ++nu)
      if (std::abs(m - nu) >= 2) {
        EXPECT_EQ(block_overlap_max(m, nu, 1024.0), 0.0);
      }
  EXPECT_GT(block_overlap_max(3, 4, 1024.0), 0.0);
}

TEST(LpBlocks, BlockNearNyquistRejected) {
  const auto part = DyadicPartition::for_grid(1, 16);
  EXPECT_THROW(lp_block(part, wave1d(16, 1), part.nu_max + 1), PreconditionError);
}

TEST(LpBlocks, ReconstructionOfBandLimitedFields) {
  testing::Gen g(29);
  for (int dim : {1, 2}) {
    const std::size_t n = dim == 1 ? 512 : 64;
    const auto part = DyadicPartition::for_grid(dim, n);
    for (int i = 0; i < 5; ++i) {
      const GridField u = GridField::random_band(dim, n, 0, std::ldexp(1.0, part.nu_max), g.raw());
      GridField sum(dim, n);
      for (const auto& b : lp_decompose(part, u)) sum += b;
      EXPECT_LT(rel_l2(sum, u), 1e-12);
    }
  }
}

TEST(LpBlocks, SingleModeLandsInItsBlocks) {
  const auto part = DyadicPartition::for_grid(1, 64);
  const auto blocks = lp_decompose(part, wave1d(64, 8));
  for (int nu = 0; nu <= part.nu_max; ++nu) {
    const double want = nu == 3 ? wave1d(64, 8).l2_norm() : 0.0;
    EXPECT_NEAR(blocks[static_cast<std::size_t>(nu)].l2_norm(), want, 1e-13) << nu;
  }
}

TEST(LpBlocks, PropertyAlmostOrthogonality) {
  testing::Gen g(31);
  for (int i = 0; i < 50; ++i) {
    const int dim = 1 + i % 2;
    const std::size_t n = dim == 1 ? 256 : 64;
    const auto part = DyadicPartition::for_grid(dim, n);
    const auto u = GridField::random_band(dim, n, 0, n / 2.0 - 1.0, g.raw());
    const auto r = check_almost_orthogonality(part, u);
    EXPECT_TRUE(r.within_K2);
    EXPECT_TRUE(r.within_half_one) << r.ratio;
    EXPECT_NEAR(r.ratio, r.blocks_only + r.remainder, 1e-14);
  }
  EXPECT_THROW(check_almost_orthogonality(DyadicPartition::for_grid(1, 64), GridField(1, 64)),
               PreconditionError);
}

double bernstein_ratio(const VerificationReport& rep, const std::string& id) {
  const auto* row = rep.find(id);
  EXPECT_NE(row, nullptr) << id;
  return row ? *row->value("ratio") : NAN;
}

TEST(Bernstein, SingleModeExamples) {
  const auto part = DyadicPartition::for_grid(1, 64);
  const auto r3 = check_bernstein(part, wave1d(64, 3), 2);
  EXPECT_TRUE(r3.all_passed());
  EXPECT_NEAR(bernstein_ratio(r3, "bernstein-upper-axis0-nu2"), 3.0, 1e-12);
  const auto r1 = check_bernstein(part, wave1d(64, 1), 0);
  EXPECT_TRUE(r1.all_passed());
  EXPECT_NEAR(bernstein_ratio(r1, "bernstein-upper-axis0-nu0"), 1.0, 1e-12);
}

TEST(Bernstein, RandomBlockFourRatiosInBand) {
  const auto part = DyadicPartition::for_grid(1, 256);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto u = GridField::random_band(1, 256, 8.0, 32.0, seed);
    const auto rep = check_bernstein(part, u, 4);
    EXPECT_TRUE(rep.all_passed());
    const double r = bernstein_ratio(rep, "bernstein-upper-axis0-nu4");
    EXPECT_GE(r, 8.0);
    EXPECT_LE(r, 32.0);
  }
}

TEST(Commutator, ConstantCoefficientCommutes) {
  const auto part = DyadicPartition::for_grid(1, 256);
  const auto w = GridField::random_band(1, 256, 0, 100, 3);
  const auto c = wave1d(256, 0, 0.0, 2.5);
  for (int nu = 0; nu <= part.nu_max; ++nu)
    EXPECT_LE(commutator(part, c, w, nu).max_abs(), 1e-13 * w.max_abs());
}

// [phi_nu, cos x] cos 4x = (phi(3) - phi(4))/2 cos 3x + (phi(5) - phi(4))/2 cos 5x.
TEST(Commutator, CosineProductClosedForm) {
  const auto part = DyadicPartition::for_grid(1, 64);
  for (int nu = 0; nu <= part.nu_max; ++nu) {
    const auto f = [nu](double r) { return DyadicPartition::block(nu, r); };
    const GridField want = GridField::from_function(1, 64, [&](double x, double) {
      return cplx(0.5 * (f(3) - f(4)) * std::cos(3 * x) + 0.5 * (f(5) - f(4)) * std::cos(5 * x), 0);
    });
    const GridField got = commutator(part, wave1d(64, 1), wave1d(64, 4), nu);
    EXPECT_LE((got - want).max_abs(), 1e-14) << nu;
  }
}

// Near a block edge the commutator is nonzero; compare with the same closed
// form evaluated pointwise.
TEST(Commutator, BlockEdgeNonzero) {
  const auto part = DyadicPartition::for_grid(1, 128);
  const int nu = 3;
  const double k = 8.0;
  const auto f = [nu](double r) { return DyadicPartition::block(nu, r); };
  const GridField got = commutator(part, wave1d(128, 1), wave1d(128, k), nu);
  const GridField want = GridField::from_function(1, 128, [&](double x, double) {
    return cplx(0.5 * (f(k - 1) - f(k)) * std::cos((k - 1) * x) +
                    0.5 * (f(k + 1) - f(k)) * std::cos((k + 1) * x),
                0);
  });
  EXPECT_GT(got.l2_norm(), 0.01);
  EXPECT_LT(rel_l2(got, want), 1e-13);
}

TEST(Commutator, PropertyBilinear) {
  testing::Gen g(37);
  const auto part = DyadicPartition::for_grid(1, 128);
  for (int i = 0; i < 20; ++i) {
    const auto a = GridField::random_band(1, 128, 0, 10, g.raw());
    const auto w1 = GridField::random_band(1, 128, 0, 60, g.raw());
    const auto w2 = GridField::random_band(1, 128, 0, 60, g.raw());
    const int nu = g.integer(0, part.nu_max);
    const auto lhs = commutator(part, a, w1 + w2, nu);
    const auto rhs = commutator(part, a, w1, nu) + commutator(part, a, w2, nu);
    EXPECT_LE((lhs - rhs).max_abs(), 1e-13 * (w1.max_abs() + w2.max_abs()) * a.max_abs());
  }
}

// Dense oracle: exact Fourier coefficients by direct DFT, the commutator
// symbol sum_j a_j w_{m-j} (phi_nu(m) - phi_nu(m - j)) and Parseval.
double dense_commutator_ratio(const GridField& a, const GridField& v) {
  const long n = static_cast<long>(a.n());
  const auto dft = [n](const GridField& u) {
    std::vector<cplx> c(static_cast<std::size_t>(n));
    for (long k = -n / 2; k < n / 2; ++k) {
      cplx s = 0;
      for (long j = 0; j < n; ++j) s += u[static_cast<std::size_t>(j)] * std::polar(1.0, -2 * pi * k * j / n);
      c[static_cast<std::size_t>(k + n / 2)] = s / static_cast<double>(n);
    }
    return c;
  };
  const auto ac = dft(a), vc = dft(v);
  std::vector<cplx> wc(vc.size());
  double denom = 0.0;
  for (long k = -n / 2 + 1; k < n / 2; ++k) {
    wc[static_cast<std::size_t>(k + n / 2)] = cplx(0, static_cast<double>(k)) * vc[static_cast<std::size_t>(k + n / 2)];
    denom += std::norm(wc[static_cast<std::size_t>(k + n / 2)]);
  }
  double num = 0.0;
  for (int nu = 0; nu <= 20; ++nu) {
    for (long m = -n; m <= n; ++m) {
      cplx s = 0;
      for (long j = -n / 2; j < n / 2; ++j) {
        const long k = m - j;
        if (k <= -n / 2 || k >= n / 2) continue;
        const cplx aj = ac[static_cast<std::size_t>(j + n / 2)];
        const cplx wk = wc[static_cast<std::size_t>(k + n / 2)];
        if (aj == 0.0 || wk == 0.0) continue;
        s += aj * wk * (DyadicPartition::block(nu, std::abs(static_cast<double>(m))) -
                        DyadicPartition::block(nu, std::abs(static_cast<double>(k))));
      }
      num += std::norm(cplx(0, static_cast<double>(m)) * s);
    }
  }
  return num / denom;
}

TEST(CommutatorEnergy, MatchesDenseOracleAt256) {
  const auto a = wave1d(256, 1, 0.3, 1.0);
  for (const GridField& v : {wave1d(256, 8), GridField::random_band(1, 256, 0, 40, 5)}) {
    const double fast = commutator_energy(CoefficientField::scalar(a), v).ratio;
    const double dense = dense_commutator_ratio(a, v);
    EXPECT_GT(dense, 0.0);
    EXPECT_LT(testing::rel_err(fast, dense), 1e-10) << fast << " vs " << dense;
  }
}

TEST(CommutatorEnergy, IdentityCoefficientsGiveZero) {
  for (int dim : {1, 2}) {
    const std::size_t n = dim == 1 ? 256 : 32;
    const auto v = GridField::random_band(dim, n, 0, n / 4.0, 9);
    EXPECT_LE(commutator_energy(CoefficientField::identity(dim, n), v).ratio, 1e-26);
  }
  const auto rep = probe_commutator_bound({CoefficientField::identity(1, 64)}, wave1d(64, 8));
  EXPECT_TRUE(rep.all_passed());
}

TEST(CommutatorEnergy, BoundedAcrossResolutions) {
  std::vector<double> ratios;
  for (std::size_t n : {256u, 512u, 1024u})
    ratios.push_back(
        commutator_energy(CoefficientField::scalar(wave1d(n, 1, 0.3, 1.0)), wave1d(n, 8)).ratio);
  EXPECT_NEAR(ratios[0], ratios[1], 1e-12 * ratios[0]);
  EXPECT_NEAR(ratios[0], ratios[2], 1e-12 * ratios[0]);
}

TEST(Fft, ResampleIsExactForResolvedFields) {
  const auto u = GridField::random_band(1, 64, 0, 20, 4);
  const auto up = fft::resample(u, 256);
  for (std::size_t i = 0; i < 64; ++i) EXPECT_NEAR(std::abs(up[4 * i] - u[i]), 0.0, 1e-13);
  EXPECT_NEAR(fft::l2_norm_from_coeffs(fft::forward(u), 1), u.l2_norm(), 1e-12 * u.l2_norm());
}

}  // namespace
}  // namespace osgood
