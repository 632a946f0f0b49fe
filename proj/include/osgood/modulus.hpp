#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "osgood/report.hpp"

namespace osgood {

// Analytic classification of the integral of 1/mu over (0, 1].
enum class OsgoodClass { Divergent, Convergent, Unknown };

std::string to_string(OsgoodClass c);

enum class BuiltinKind { Linear, LogLinear, SquareRoot, Power };

// A modulus of continuity mu : [0,1] -> [0,1]: continuous, concave, strictly
// increasing, mu(0) = 0. Immutable; copies share the evaluation handle.
class Modulus {
 public:
  using Fn = std::function<double(double)>;

  static Modulus custom(std::string name, Fn fn, OsgoodClass claimed);

  // "linear", "loglinear", "sqrt", "power:<alpha>"; a "capped:" prefix applies
  // the square-root cap.
  static Modulus from_name(std::string_view spec);
  static std::vector<std::string> builtin_names();

  double operator()(double s) const { return (*fn_)(s); }

  const std::string& name() const { return name_; }
  OsgoodClass osgood_class() const { return claimed_; }
  bool normalized() const { return normalized_; }
  // c > 0 with mu(s) >= c s on [0, 1].
  double lower_linear_constant() const { return lower_linear_; }

 private:
  friend Modulus normalize_sqrt_cap(const Modulus& mu);
  Modulus(std::string name, Fn fn, OsgoodClass claimed, bool normalized, double lower_linear);

  std::string name_;
  std::shared_ptr<const Fn> fn_;
  OsgoodClass claimed_ = OsgoodClass::Unknown;
  bool normalized_ = false;
  double lower_linear_ = 0.0;
};

// Linear: s; LogLinear: s (1 - ln s); SquareRoot: s^(1/2); Power: s^alpha.
// Throws PreconditionError for Power with alpha outside (0, 1).
Modulus make_builtin(BuiltinKind kind, double alpha = 0.5);

struct OsgoodResult {
  double value = 0.0;  // integral of 1/mu over [eps_floor, 1]
  OsgoodClass classification = OsgoodClass::Unknown;
  double diagnostic = 0.0;  // growth slope (Divergent) or relative tail estimate (Convergent)
  double decay_rate = 0.0;  // geometric decay of dyadic increments, per level
  double power_decay = 0.0;  // algebraic decay exponent of dyadic increments
  double growth_slope = 0.0;  // slope of partial sums vs level, second half
  std::vector<double> partial_sums;  // integral over [2^-k, 1], k = 1..K
};

// Integral of 1/mu over [eps_floor, 1] plus a dyadic-increment classification.
// Throws ClassificationMismatch when the claimed and numeric classes are both
// definite and differ, ConvergenceError when the quadrature misses 1e-9.
OsgoodResult osgood_integral(const Modulus& mu, double eps_floor);

// Sampled check of the defining properties and their concavity consequences.
VerificationReport check_modulus_properties(const Modulus& mu, int sample_count);

// s -> min(mu(s), sqrt(s)); idempotent.
Modulus normalize_sqrt_cap(const Modulus& mu);

}  // namespace osgood
