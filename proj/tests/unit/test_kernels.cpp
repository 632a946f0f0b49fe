#include <gtest/gtest.h>

#include <cstring>
#include <numbers>

#include "osgood/error.hpp"
#include "osgood/kernels.hpp"
#include "test_util.hpp"

namespace osgood {
namespace {

using kernels::Backend;

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

TEST(Kernels, EvalPointsSerialMatchesOpenMPBitwise) {
  const Modulus mu = normalize_sqrt_cap(Modulus::from_name("sqrt"));
  const auto cuts = make_cutoffs();
  const PlissConstruction pc(build_sequences(mu, choose_k0(mu, 200, cuts).k0, 200), cuts);
  testing::Gen g(67);
  std::vector<kernels::Point> pts;
  const auto& S = pc.seqs();
  for (int i = 0; i < 5000; ++i)
    pts.push_back({g.uniform(S.a[1] - 0.01, S.a[S.N]), g.uniform(-3, 3), g.uniform(-3, 3)});
  const auto a = kernels::eval_points(pc, pts, Backend::Serial);
  const auto b = kernels::eval_points(pc, pts, Backend::OpenMP);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_TRUE(same_bits(a[i].u, b[i].u));
    EXPECT_TRUE(same_bits(a[i].residual, b[i].residual));
    EXPECT_TRUE(same_bits(a[i].c, b[i].c));
    EXPECT_TRUE(same_bits(a[i].log_scale, b[i].log_scale));
  }
}

TEST(Kernels, LpBlocksSerialMatchesOpenMPBitwise) {
  for (int dim : {1, 2}) {
    const std::size_t n = dim == 1 ? 1024 : 128;
    const auto part = DyadicPartition::for_grid(dim, n);
    const auto u = GridField::random_band(dim, n, 0, n / 2.0 - 1, 71);
    const auto a = kernels::lp_blocks(part, u, Backend::Serial);
    const auto b = kernels::lp_blocks(part, u, Backend::OpenMP);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t nu = 0; nu < a.size(); ++nu)
      EXPECT_EQ(std::memcmp(a[nu].data().data(), b[nu].data().data(), a[nu].size() * sizeof(cplx)), 0);
  }
}

TEST(Kernels, LpBlocksAgreeWithSingleBlockOperator) {
  const auto part = DyadicPartition::for_grid(1, 256);
  const auto u = GridField::random_band(1, 256, 0, 120, 73);
  const auto blocks = kernels::lp_blocks(part, u, Backend::Serial);
  for (int nu = 0; nu <= part.nu_max; ++nu)
    EXPECT_LE((blocks[static_cast<std::size_t>(nu)] - lp_block(part, u, nu)).max_abs(), 1e-14);
}

TEST(Kernels, MollifySweepSerialMatchesOpenMPBitwise) {
  const auto a = sawtooth_family(Modulus::from_name("sqrt"), 10);
  const auto mf = mollify_in_time(a, MollifierKernel(), 1.0 / 64);
  std::vector<double> ts;
  for (int i = 0; i <= 64; ++i) ts.push_back(-0.5 + i / 64.0);
  const auto s = kernels::mollify_sweep(mf, ts, Backend::Serial);
  const auto o = kernels::mollify_sweep(mf, ts, Backend::OpenMP);
  ASSERT_EQ(s.size(), o.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_TRUE(same_bits(s[i].value, o[i].value));
    EXPECT_TRUE(same_bits(s[i].derivative, o[i].derivative));
    EXPECT_EQ(s[i].original, a.value(ts[i]));
    const auto [v, d] = mf.value_and_derivative(ts[i]);
    EXPECT_TRUE(same_bits(s[i].value, v));
    EXPECT_TRUE(same_bits(s[i].derivative, d));
  }
}

TEST(Kernels, ErrorsPropagateFromWorkers) {
  const auto mf = mollify_in_time(constant_family(1.0), MollifierKernel(), 0.5);
  EXPECT_THROW(kernels::mollify_sweep(mf, {0.0, 0.95}, Backend::OpenMP), Error);
  EXPECT_THROW(kernels::mollify_sweep(mf, {0.0, 0.95}, Backend::Serial), Error);
  EXPECT_GE(kernels::max_threads(), 1);
  EXPECT_STREQ(kernels::to_string(Backend::OpenMP), "openmp");
}

}  // namespace
}  // namespace osgood
