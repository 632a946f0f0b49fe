#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "osgood/report.hpp"

// Desk-scale acceptance checks, one report per criterion. Wall-clock time is
// measured by the caller and never enters a report, so reports stay
// byte-identical across runs with the same seed.
namespace osgood::suite {

struct Criterion {
  int id = 0;
  std::string title;
  double time_limit = 0.0;  // seconds; 0 means no limit
};

// Criteria 1..8; determinism (9) needs the CLI and lives with it.
const std::vector<Criterion>& criteria();

VerificationReport osgood_classifier(std::uint64_t seed);
VerificationReport weight_identity(std::uint64_t seed);
VerificationReport littlewood_paley(std::uint64_t seed);
VerificationReport commutator_trend(std::uint64_t seed);
VerificationReport mollifier_bounds(std::uint64_t seed);
VerificationReport pliss_conditions(std::uint64_t seed);
VerificationReport pliss_solution(std::uint64_t seed);
VerificationReport carleman_probe(std::uint64_t seed);

// Dispatch by criterion id; throws PreconditionError for an unknown id.
VerificationReport run_criterion(int id, std::uint64_t seed);

// Least-squares slope of ys against xs.
double fitted_slope(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace osgood::suite
