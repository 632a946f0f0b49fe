#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "osgood/carleman.hpp"
#include "osgood/error.hpp"
#include "test_util.hpp"

namespace osgood {
namespace {

constexpr double pi = std::numbers::pi;

const WeightTable& table(double log_t_max) {
  static const WeightTable small = build_Phi(build_phi(Modulus::from_name("linear"), std::exp(33.0)));
  static const WeightTable large =
      build_Phi(build_phi(Modulus::from_name("linear"), std::exp(257.0)));
  return log_t_max < 100 ? small : large;
}

TEST(Carleman, ZeroFamilyIsTrivial) {
  CarlemanProbeConfig cfg;
  cfg.test_family = "zero";
  const auto rep = probe_carleman(cfg, table(257), CoefficientField::identity(1, 64));
  EXPECT_TRUE(rep.trivial);
  for (const auto& r : rep.rows) {
    EXPECT_EQ(r.lhs, 0.0);
    EXPECT_EQ(r.rhs_bracket, 0.0);
  }
  EXPECT_TRUE(rep.to_report().all_passed());
}

// Identity coefficients, v = cos x: the left density is pi (e^{gamma(T-t)} - 1)^2
// (linear modulus, Phi' = e^tau), the bracket is pi (1 + sqrt(gamma)).
TEST(Carleman, ConstantTimeFamilyMatchesClosedForm) {
  CarlemanProbeConfig cfg;
  cfg.test_family = "const-time";
  cfg.gamma_grid = {8, 16, 32};
  const auto rep = probe_carleman(cfg, table(33), CoefficientField::identity(1, 64));
  for (const auto& r : rep.rows) {
    const double g = r.gamma;
    const auto F = [](double u) { return std::exp(2 * u) / 2 - 2 * std::exp(u) + u; };
    const double lhs = pi / g * (F(g) - F(g / 2));
    const double rhs = pi * (1 + std::sqrt(g)) * 0.5;
    EXPECT_LT(testing::rel_err(r.lhs, lhs), 1e-8) << g;
    EXPECT_LT(testing::rel_err(r.rhs_bracket, rhs), 1e-10) << g;
  }
  EXPECT_TRUE(rep.feasible);
}

TEST(Carleman, IdentitySineCosIsConsistentAndLabelled) {
  const auto rep = probe_carleman(CarlemanProbeConfig{}, table(257), CoefficientField::identity(1, 64));
  EXPECT_TRUE(rep.feasible);
  EXPECT_TRUE(rep.ratio_nondecreasing);
  EXPECT_NE(rep.verdict.find("consistent-with"), std::string::npos);
  EXPECT_EQ(rep.verdict.find("proves"), std::string::npos);
  for (std::size_t i = 0; i < rep.frontier.size(); ++i)
    EXPECT_LE(rep.frontier[i], rep.rows[i].ratio_half);
  EXPECT_TRUE(rep.to_report().all_passed());
}

TEST(Carleman, TwoDimensionalIdentity) {
  CarlemanProbeConfig cfg;
  cfg.dim = 2;
  cfg.grid = 16;
  const auto rep = probe_carleman(cfg, table(257), CoefficientField::identity(2, 16));
  EXPECT_TRUE(rep.feasible);
}

TEST(Carleman, Preconditions) {
  CarlemanProbeConfig cfg;
  EXPECT_THROW(probe_carleman(cfg, table(33), CoefficientField::identity(1, 64)), PreconditionError);
  cfg.gamma_grid = {16, 8};
  EXPECT_THROW(probe_carleman(cfg, table(257), CoefficientField::identity(1, 64)), PreconditionError);
  cfg.gamma_grid = {8};
  cfg.test_family = "nope";
  EXPECT_THROW(probe_carleman(cfg, table(257), CoefficientField::identity(1, 64)), PreconditionError);
  cfg.test_family = "sine-cos";
  const GridField weak =
      GridField::from_function(1, 64, [](double, double) { return cplx(0.5, 0.0); });
  EXPECT_THROW(probe_carleman(cfg, table(257), CoefficientField::scalar(weak)), PreconditionError);
}

}  // namespace
}  // namespace osgood
