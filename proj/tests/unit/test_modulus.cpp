#include <gtest/gtest.h>

#include <cmath>

#include "osgood/error.hpp"
#include "osgood/modulus.hpp"
#include "test_util.hpp"

namespace osgood {
namespace {

TEST(Modulus, BuiltinValues) {
  EXPECT_DOUBLE_EQ(Modulus::from_name("linear")(0.25), 0.25);
  EXPECT_DOUBLE_EQ(Modulus::from_name("sqrt")(0.25), 0.5);
  EXPECT_NEAR(Modulus::from_name("loglinear")(0.5), 0.5 * (1 + std::log(2.0)), 1e-15);
  EXPECT_NEAR(Modulus::from_name("power:0.75")(0.5), std::pow(0.5, 0.75), 1e-15);
  EXPECT_EQ(Modulus::from_name("sqrt")(0.0), 0.0);
}

TEST(Modulus, AnalyticClasses) {
  EXPECT_EQ(Modulus::from_name("linear").osgood_class(), OsgoodClass::Divergent);
  EXPECT_EQ(Modulus::from_name("loglinear").osgood_class(), OsgoodClass::Divergent);
  EXPECT_EQ(Modulus::from_name("sqrt").osgood_class(), OsgoodClass::Convergent);
  EXPECT_EQ(Modulus::from_name("power:0.3").osgood_class(), OsgoodClass::Convergent);
}

TEST(Modulus, PowerOutsideRangeRejected) {
  EXPECT_THROW(make_builtin(BuiltinKind::Power, 1.0), PreconditionError);
  EXPECT_THROW(make_builtin(BuiltinKind::Power, 0.0), PreconditionError);
  EXPECT_THROW(Modulus::from_name("nonsense"), Error);
}

// Closed forms of the integral of 1/mu over [f, 1].
TEST(Osgood, IntegralsMatchAntiderivatives) {
  const double f = 1e-12;
  EXPECT_NEAR(osgood_integral(Modulus::from_name("sqrt"), f).value, 2.0 - 2e-6, 1e-8);
  EXPECT_NEAR(osgood_integral(Modulus::from_name("linear"), f).value, -std::log(f), 1e-8);
  EXPECT_NEAR(osgood_integral(Modulus::from_name("loglinear"), f).value, std::log1p(-std::log(f)),
              1e-9);
  for (double alpha : {0.25, 0.6, 0.9}) {
    const double want = (1.0 - std::pow(f, 1.0 - alpha)) / (1.0 - alpha);
    const Modulus mu = Modulus::from_name("power:" + std::to_string(alpha));
    EXPECT_LT(testing::rel_err(osgood_integral(mu, f).value, want), 1e-9) << alpha;
  }
}

TEST(Osgood, NumericClassMatchesAnalytic) {
  for (const char* name : {"linear", "loglinear", "sqrt", "power:0.75"}) {
    const Modulus mu = Modulus::from_name(name);
    EXPECT_EQ(osgood_integral(mu, 1e-12).classification, mu.osgood_class()) << name;
  }
}

TEST(Osgood, WrongClaimRaisesMismatch) {
  const Modulus fake =
      Modulus::custom("sqrt-claimed-divergent", [](double s) { return std::sqrt(s); },
                      OsgoodClass::Divergent);
  EXPECT_THROW(osgood_integral(fake, 1e-12), ClassificationMismatch);
}

TEST(Modulus, SqrtCapIsIdempotent) {
  const Modulus once = normalize_sqrt_cap(Modulus::from_name("power:0.3"));
  const Modulus twice = normalize_sqrt_cap(once);
  EXPECT_TRUE(once.normalized());
  testing::Gen g(3);
  for (int i = 0; i < 1000; ++i) {
    const double s = g.uniform(0.0, 1.0);
    EXPECT_EQ(once(s), twice(s));
    EXPECT_LE(once(s), std::sqrt(s));
  }
}

TEST(Modulus, CheckedPropertiesPassForBuiltins) {
  for (const char* name : {"linear", "loglinear", "sqrt", "power:0.2", "capped:power:0.9"}) {
    const auto rep = check_modulus_properties(Modulus::from_name(name), 500);
    EXPECT_TRUE(rep.all_passed()) << name;
    EXPECT_GE(rep.rows().size(), 5u);
  }
}

TEST(Modulus, CheckFlagsNonConcave) {
  const Modulus bad =
      Modulus::custom("square", [](double s) { return s * s; }, OsgoodClass::Divergent);
  const auto rep = check_modulus_properties(bad, 200);
  ASSERT_NE(rep.find("concave"), nullptr);
  EXPECT_FALSE(rep.find("concave")->pass);
}

// Concavity consequences on random points: midpoint concavity, mu(s)/s
// non-increasing, subadditivity.
TEST(Modulus, PropertyConcavityConsequences) {
  testing::Gen g(5);
  for (const char* name : {"linear", "loglinear", "sqrt", "power:0.4"}) {
    const Modulus mu = Modulus::from_name(name);
    for (int i = 0; i < 2000; ++i) {
      const double s = g.uniform(1e-9, 1.0), t = g.uniform(1e-9, 1.0);
      EXPECT_GE(mu(0.5 * (s + t)) + 1e-14, 0.5 * (mu(s) + mu(t)));
      const double lo = std::min(s, t), hi = std::max(s, t);
      EXPECT_GE(mu(lo) / lo + 1e-12 * mu(lo) / lo, mu(hi) / hi);
      if (s + t <= 1.0) {
        EXPECT_LE(mu(s + t), mu(s) + mu(t) + 1e-14);
      }
    }
  }
}

}  // namespace
}  // namespace osgood
