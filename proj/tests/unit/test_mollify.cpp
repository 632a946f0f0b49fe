#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "osgood/error.hpp"
#include "osgood/mollify.hpp"
#include "test_util.hpp"

namespace osgood {
namespace {

const MollifierKernel& kernel() {
  static const MollifierKernel k;
  return k;
}

// Moments of the bump by an unrelated rule (tanh-sinh), used as oracles.
double bump_moment(const std::function<double(double)>& weight) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const auto bump = [](double x) { return std::exp(-1.0 / (1.0 - 4.0 * x * x)); };
  const double z = 2.0 * ts.integrate(bump, 0.0, 0.5);
  return 2.0 * ts.integrate([&](double x) { return bump(x) * weight(x); }, 0.0, 0.5) / z;
}

TimeFunction smooth_family(std::string name, std::function<double(double)> f) {
  TimeFunction a = constant_family(0.0);
  a.name = std::move(name);
  a.value = std::move(f);
  return a;
}

TEST(Kernel, NormalizationAgainstTanhSinh) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const double z =
      ts.integrate([](double x) { return std::exp(-1.0 / (1.0 - 4.0 * x * x)); }, -0.5, 0.5);
  EXPECT_NEAR(kernel().normalization(), z, 1e-14);
  EXPECT_NEAR(kernel().normalization(), 0.22199690808403971, 1e-15);
  EXPECT_NEAR(kernel().mass(), 1.0, 1e-10);
  EXPECT_EQ(kernel()(0.5), 0.0);
  EXPECT_EQ(kernel()(-0.5), 0.0);
  const double l1 = 2.0 * ts.integrate([](double x) { return std::abs(kernel().derivative(x)); }, 0.0, 0.5);
  EXPECT_NEAR(kernel().derivative_l1(), l1, 1e-10);
}

TEST(Kernel, PropertyNonnegativeEven) {
  testing::Gen g(41);
  for (int i = 0; i < 1000; ++i) {
    const double x = g.uniform(-0.6, 0.6);
    EXPECT_GE(kernel()(x), 0.0);
    EXPECT_EQ(kernel()(x), kernel()(-x));
    EXPECT_EQ(kernel().derivative(x), -kernel().derivative(-x));
  }
}

TEST(Mollify, ConstantReproduced) {
  const auto m = mollify_in_time(constant_family(1.0), kernel(), 0.25);
  for (double t : {-0.5, 0.0, 0.3}) {
    EXPECT_NEAR(m.value(t), 1.0, 1e-13);
    EXPECT_NEAR(m.derivative(t), 0.0, 1e-12);
  }
}

TEST(Mollify, AffineReproduced) {
  const auto m = mollify_in_time(linear_family(Modulus::from_name("sqrt")), kernel(), 0.1);
  for (double t : {-0.4, 0.0, 0.1, 0.37}) {
    EXPECT_NEAR(m.value(t), t, 1e-14);
    EXPECT_NEAR(m.derivative(t), 1.0, 1e-12);
  }
}

// (t^2)_eps = t^2 + eps^2 m2, m2 the second moment of rho. Refinement stops
// at 1e-10 stability in the value and 1e-10/eps in the derivative.
TEST(Mollify, QuadraticMatchesSecondMoment) {
  const double m2 = bump_moment([](double x) { return x * x; });
  const auto a = smooth_family("square", [](double t) { return t * t; });
  for (double eps : {0.5, 0.0625, 1.0 / 1024}) {
    const auto m = mollify_in_time(a, kernel(), eps);
    for (double t : {-0.3, 0.0, 0.2}) {
      EXPECT_NEAR(m.value(t), t * t + eps * eps * m2, 1e-10);
      EXPECT_NEAR(m.derivative(t), 2 * t, 1e-10 / eps);
    }
  }
}

// a(t) = |t|^(1/2): a_eps(0) = eps^(1/2) int |x|^(1/2) rho(x) dx.
TEST(Mollify, SquareRootCuspAtZero) {
  TimeFunction a = smooth_family("absroot", [](double t) { return std::sqrt(std::abs(t)); });
  a.breakpoints_in = [](double lo, double hi) {
    std::vector<double> v;
    for (int k = 1; k <= 80; ++k)
      if (-std::ldexp(1.0, -k) > lo) v.insert(v.begin(), -std::ldexp(1.0, -k));
    if (lo < 0 && hi > 0) v.push_back(0.0);
    for (int k = 80; k >= 1; --k)
      if (std::ldexp(1.0, -k) < hi) v.push_back(std::ldexp(1.0, -k));
    return v;
  };
  const double eps = std::ldexp(1.0, -10);
  const double want = bump_moment([](double x) { return std::sqrt(std::abs(x)); });
  const auto m = mollify_in_time(a, kernel(), eps);
  EXPECT_NEAR(m.value(0.0), std::sqrt(eps) * want, 1e-10);
  EXPECT_NEAR(want, 0.38202796, 1e-8);
}

TEST(Mollify, Preconditions) {
  const auto a = constant_family(1.0);
  EXPECT_THROW(mollify_in_time(a, kernel(), 0.0), PreconditionError);
  EXPECT_THROW(mollify_in_time(a, kernel(), 0.75), PreconditionError);
  TimeFunction narrow = a;
  narrow.window_lo = -0.99;
  EXPECT_THROW(mollify_in_time(narrow, kernel(), 0.5), PreconditionError);
  const auto m = mollify_in_time(a, kernel(), 0.5);
  EXPECT_THROW(m.value(0.9), RangeError);
}

TEST(Mollify, PropertyLinearity) {
  testing::Gen g(43);
  const Modulus mu = Modulus::from_name("sqrt");
  const auto saw = sawtooth_family(mu, 8);
  const auto lin = linear_family(mu);
  for (int i = 0; i < 30; ++i) {
    const double al = g.uniform(-2, 2), be = g.uniform(-2, 2);
    const double eps = std::ldexp(1.0, -g.integer(2, 10));
    TimeFunction comb = saw;
    comb.value = [&](double t) { return al * saw.value(t) + be * lin.value(t); };
    const double t = g.uniform(-0.5, 0.5);
    const double lhs = mollify_in_time(comb, kernel(), eps).value(t);
    const double rhs = al * mollify_in_time(saw, kernel(), eps).value(t) +
                       be * mollify_in_time(lin, kernel(), eps).value(t);
    EXPECT_NEAR(lhs, rhs, 1e-12);
  }
}

TEST(MollifierBounds, SawtoothStable) {
  const Modulus mu = normalize_sqrt_cap(Modulus::from_name("sqrt"));
  const auto rep = verify_mollifier_bounds(sawtooth_family(mu), mu, kernel(), dyadic_eps(4, 10));
  for (const auto& r : rep.rows()) EXPECT_TRUE(r.pass) << r.check_id;
}

TEST(MollifierBounds, ConstantFitsZero) {
  const Modulus mu = Modulus::from_name("sqrt");
  const auto rep = verify_mollifier_bounds(constant_family(2.0), mu, kernel(), dyadic_eps(2, 6));
  EXPECT_TRUE(rep.all_passed());
  for (const auto& r : rep.rows())
    if (auto c = r.value("C")) {
      EXPECT_LE(*c, 1e-9);
    }
}

// For a(t) = t the derivative bound is loose: C~ = eps / mu(eps) = sqrt(eps)
// drifts with eps, so the factor-2 stability row fails while the bound holds.
TEST(MollifierBounds, LipschitzDerivativeAtMostOne) {
  const Modulus mu = Modulus::from_name("sqrt");
  const auto rep = verify_mollifier_bounds(linear_family(mu), mu, kernel(), dyadic_eps(2, 8));
  for (const auto& r : rep.rows()) {
    if (auto d = r.value("sup_derivative")) {
      EXPECT_LE(*d, 1.0 + 1e-12);
      EXPECT_NEAR(*r.value("C_tilde"), std::sqrt(*r.value("eps")), 1e-12);
    }
  }
  ASSERT_NE(rep.find("linear-derivative-bound-certified"), nullptr);
  EXPECT_TRUE(rep.find("linear-derivative-bound-certified")->pass);
  EXPECT_TRUE(rep.find("linear-error-constant-stable")->pass);
  EXPECT_FALSE(rep.find("linear-derivative-constant-stable")->pass);
}

TEST(MollifierBounds, DyadicEps) {
  const auto e = dyadic_eps(4, 6);
  ASSERT_EQ(e.size(), 3u);
  EXPECT_EQ(e[0], 0.0625);
  EXPECT_EQ(e[2], 0.015625);
}

}  // namespace
}  // namespace osgood
