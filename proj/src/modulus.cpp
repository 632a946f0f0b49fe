#include "osgood/modulus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "osgood/error.hpp"
#include "osgood/quadrature.hpp"

namespace osgood {

namespace {

constexpr double kPropertyTol = 1e-10;

// Least-squares fit y ~ c0 + c1 * x1 + c2 * x2 on centred data.
std::array<double, 3> fit3(const std::vector<double>& y, const std::vector<double>& x1,
                           const std::vector<double>& x2) {
  const std::size_t n = y.size();
  double my = 0, m1 = 0, m2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    my += y[i];
    m1 += x1[i];
    m2 += x2[i];
  }
  my /= n;
  m1 /= n;
  m2 /= n;
  double s11 = 0, s12 = 0, s22 = 0, s1y = 0, s2y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = x1[i] - m1, b = x2[i] - m2, c = y[i] - my;
    s11 += a * a;
    s12 += a * b;
    s22 += b * b;
    s1y += a * c;
    s2y += b * c;
  }
  const double det = s11 * s22 - s12 * s12;
  if (std::abs(det) < 1e-300) return {my, 0.0, 0.0};
  const double c1 = (s1y * s22 - s2y * s12) / det;
  const double c2 = (s2y * s11 - s1y * s12) / det;
  return {my - c1 * m1 - c2 * m2, c1, c2};
}

double slope(const std::vector<double>& y, const std::vector<double>& x) {
  const std::size_t n = y.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

std::vector<double> log_samples(int count, double lo_exp10, double hi_exp10) {
  std::vector<double> s(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double e = lo_exp10 + (hi_exp10 - lo_exp10) * i / (count - 1);
    s[static_cast<std::size_t>(i)] = std::pow(10.0, e);
  }
  s.back() = 1.0;
  return s;
}

}  // namespace

std::string to_string(OsgoodClass c) {
  switch (c) {
    case OsgoodClass::Divergent:
      return "Divergent";
    case OsgoodClass::Convergent:
      return "Convergent";
    case OsgoodClass::Unknown:
      break;
  }
  return "Unknown";
}

Modulus::Modulus(std::string name, Fn fn, OsgoodClass claimed, bool normalized,
                 double lower_linear)
    : name_(std::move(name)),
      fn_(std::make_shared<const Fn>(std::move(fn))),
      claimed_(claimed),
      normalized_(normalized),
      lower_linear_(lower_linear) {}

Modulus Modulus::custom(std::string name, Fn fn, OsgoodClass claimed) {
  if (!fn) throw PreconditionError("modulus '" + name + "' has no evaluation handle");
  const double at_one = fn(1.0);
  return Modulus(std::move(name), std::move(fn), claimed, false, at_one);
}

Modulus make_builtin(BuiltinKind kind, double alpha) {
  switch (kind) {
    case BuiltinKind::Linear:
      return Modulus::custom("linear", [](double s) { return s; }, OsgoodClass::Divergent);
    case BuiltinKind::LogLinear:
      return Modulus::custom(
          "loglinear", [](double s) { return s > 0.0 ? s * (1.0 - std::log(s)) : 0.0; },
          OsgoodClass::Divergent);
    case BuiltinKind::SquareRoot:
      return Modulus::custom("sqrt", [](double s) { return std::sqrt(std::max(s, 0.0)); },
                             OsgoodClass::Convergent);
    case BuiltinKind::Power: {
      if (!(alpha > 0.0 && alpha < 1.0)) {
        throw PreconditionError("power modulus needs alpha in (0, 1), got " +
                                std::to_string(alpha));
      }
      std::ostringstream name;
      name << "power:" << alpha;
      return Modulus::custom(
          name.str(), [alpha](double s) { return s > 0.0 ? std::pow(s, alpha) : 0.0; },
          OsgoodClass::Convergent);
    }
  }
  throw PreconditionError("unknown builtin modulus kind");
}

std::vector<std::string> Modulus::builtin_names() {
  return {"linear", "loglinear", "sqrt", "power:<alpha>"};
}

Modulus Modulus::from_name(std::string_view spec) {
  constexpr std::string_view capped = "capped:";
  if (spec.substr(0, capped.size()) == capped) {
    return normalize_sqrt_cap(from_name(spec.substr(capped.size())));
  }
  if (spec == "linear") return make_builtin(BuiltinKind::Linear);
  if (spec == "loglinear") return make_builtin(BuiltinKind::LogLinear);
  if (spec == "sqrt") return make_builtin(BuiltinKind::SquareRoot);
  constexpr std::string_view power = "power:";
  if (spec.substr(0, power.size()) == power) {
    const std::string arg(spec.substr(power.size()));
    std::size_t used = 0;
    double alpha = 0.0;
    try {
      alpha = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != arg.size() || arg.empty()) {
      throw PreconditionError("cannot parse power exponent '" + arg + "'");
    }
    return make_builtin(BuiltinKind::Power, alpha);
  }
  throw PreconditionError("unknown modulus '" + std::string(spec) + "'");
}

Modulus normalize_sqrt_cap(const Modulus& mu) {
  auto inner = mu.fn_;
  Modulus::Fn capped = [inner](double s) {
    return std::min((*inner)(s), std::sqrt(std::max(s, 0.0)));
  };
  // Concavity gives min(mu, sqrt)/s >= mu(1); the sampled infimum is guarded
  // from below by that value.
  double inf_ratio = std::numeric_limits<double>::infinity();
  for (double s : log_samples(512, -12.0, 0.0)) inf_ratio = std::min(inf_ratio, capped(s) / s);
  const double guard = mu(1.0) * (1.0 - 1e-12);
  const std::string name = mu.normalized() ? mu.name() : "capped:" + mu.name();
  return Modulus(name, std::move(capped), mu.osgood_class(), true,
                 std::max(inf_ratio, guard));
}

OsgoodResult osgood_integral(const Modulus& mu, double eps_floor) {
  if (!(eps_floor > 0.0 && eps_floor < 1.0)) {
    throw PreconditionError("eps_floor must lie in (0, 1)");
  }
  // s = exp(-w): the integrand e^-w / mu(e^-w) is smooth on every dyadic cell.
  const auto integrand = [&mu](double w) {
    const double s = std::exp(-w);
    return s / mu(s);
  };
  const double ln2 = std::log(2.0);
  const double w_end = -std::log(eps_floor);
  const int levels = static_cast<int>(std::floor(w_end / ln2 + 1e-12));

  OsgoodResult out;
  std::vector<double> increments;
  double total = 0.0;
  double total_err = 0.0;
  for (int k = 1; k <= levels; ++k) {
    const auto piece = quad::adaptive(integrand, (k - 1) * ln2, k * ln2, 1e-13, 1e-15);
    increments.push_back(piece.value);
    total += piece.value;
    total_err += piece.error;
    out.partial_sums.push_back(total);
  }
  if (w_end > levels * ln2) {
    const auto rest = quad::adaptive(integrand, levels * ln2, w_end, 1e-13, 1e-15);
    total += rest.value;
    total_err += rest.error;
  }
  if (total_err > 1e-9) {
    throw ConvergenceError("Osgood quadrature error " + std::to_string(total_err) +
                           " exceeds 1e-9");
  }
  out.value = total;

  OsgoodClass numeric = OsgoodClass::Unknown;
  if (levels >= 8) {
    std::vector<double> y, lk, k_lin, partial, kk;
    for (int k = levels / 2; k <= levels; ++k) {
      const double d = increments[static_cast<std::size_t>(k - 1)];
      if (d <= 0.0) continue;
      y.push_back(std::log(d));
      lk.push_back(std::log(static_cast<double>(k)));
      k_lin.push_back(static_cast<double>(k));
      partial.push_back(out.partial_sums[static_cast<std::size_t>(k - 1)]);
      kk.push_back(static_cast<double>(k));
    }
    if (y.size() >= 4) {
      // log d_k ~ c - p log k - rho k
      const auto coef = fit3(y, lk, k_lin);
      out.power_decay = -coef[1];
      out.decay_rate = -coef[2];
      out.growth_slope = slope(partial, kk);
      const double rho = out.decay_rate;
      const double p = out.power_decay;
      if (rho >= 0.01 || p >= 1.2) {
        numeric = OsgoodClass::Convergent;
        const double last = increments.back();
        const double r = std::exp(-std::max(rho, 1e-3));
        out.diagnostic = last * r / (1.0 - r) / std::max(total, 1e-300);
      } else if (std::abs(rho) <= 0.002 && p <= 1.05 && out.growth_slope > 1e-6) {
        numeric = OsgoodClass::Divergent;
        out.diagnostic = out.growth_slope;
      } else {
        out.diagnostic = rho;
      }
    }
  }
  out.classification = numeric;

  const OsgoodClass claimed = mu.osgood_class();
  if (claimed != OsgoodClass::Unknown && numeric != OsgoodClass::Unknown && claimed != numeric) {
    throw ClassificationMismatch("modulus '" + mu.name() + "' is claimed " + to_string(claimed) +
                                 " but the dyadic increments look " + to_string(numeric));
  }
  return out;
}

VerificationReport check_modulus_properties(const Modulus& mu, int sample_count) {
  if (sample_count < 16) throw PreconditionError("check needs at least 16 samples");
  VerificationReport rep("modulus");
  const auto s = log_samples(sample_count, -12.0, 0.0);
  std::vector<double> m(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) m[i] = mu(s[i]);
  const double mu1 = mu(1.0);
  const std::string anchor_def = "modulus-of-continuity definition";
  const std::string anchor_cons = "consequences of concavity";

  {
    const double at0 = std::abs(mu(0.0));
    const bool ok = at0 <= 1e-15 && mu1 <= 1.0 + kPropertyTol;
    rep.add("endpoints", anchor_def, ok, kPropertyTol).with("mu(0)", at0).with("mu(1)", mu1);
  }
  {
    double worst = 0.0;
    int violations = 0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      if (m[i + 1] > m[i]) continue;
      ++violations;
      worst = std::max(worst, (m[i] - m[i + 1]) / std::max(m[i], 1e-300));
    }
    rep.add("strictly-increasing", anchor_def, violations == 0, 0.0)
        .with("violations", violations)
        .with("worst_violation", worst);
  }
  {
    double worst = 0.0;
    const std::array<double, 3> lambdas{0.25, 0.5, 0.75};
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t j = i + 1; j < s.size(); ++j) {
        for (double lam : lambdas) {
          const double mid = mu(lam * s[i] + (1.0 - lam) * s[j]);
          const double chord = lam * m[i] + (1.0 - lam) * m[j];
          worst = std::max(worst, (chord - mid) / std::max(chord, 1e-300));
        }
      }
    }
    rep.add("concave", anchor_def, worst <= kPropertyTol, kPropertyTol)
        .with("worst_violation", worst);
  }
  {
    double worst = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double lower = s[i] * mu1;
      worst = std::max(worst, (lower - m[i]) / std::max(lower, 1e-300));
    }
    rep.add("above-chord", anchor_cons, worst <= kPropertyTol, kPropertyTol)
        .with("worst_violation", worst)
        .with("mu(1)", mu1);
  }
  {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      const double a = m[i] / s[i];
      const double b = m[i + 1] / s[i + 1];
      worst = std::max(worst, (b - a) / a);
    }
    rep.add("ratio-nonincreasing", anchor_cons, worst <= kPropertyTol, kPropertyTol)
        .with("worst_violation", worst)
        .with("ratio_at_min_s", m.front() / s.front())
        .with("ratio_at_one", m.back() / s.back());
  }
  {
    // sigma = 1/s walks [1, 1e12] upwards as s walks down.
    double worst = 0.0;
    for (std::size_t i = s.size() - 1; i > 0; --i) {
      const double sig_a = 1.0 / s[i];
      const double sig_b = 1.0 / s[i - 1];
      const double a = sig_a * sig_a * m[i];
      const double b = sig_b * sig_b * m[i - 1];
      worst = std::max(worst, (a - b) / a);
    }
    rep.add("sigma-squared-nondecreasing", anchor_cons, worst <= kPropertyTol, kPropertyTol)
        .with("worst_violation", worst);
  }
  return rep;
}

}  // namespace osgood
