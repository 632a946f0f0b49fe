#pragma once

#include <array>
#include <vector>

#include "osgood/dyadic.hpp"
#include "osgood/grid_field.hpp"
#include "osgood/mollify.hpp"
#include "osgood/pliss.hpp"

// Hot loops with two interchangeable backends. The serial versions are the
// reference; the OpenMP versions split the same per-item work across threads
// and return bit-identical results.
namespace osgood::kernels {

enum class Backend { Serial, OpenMP };

const char* to_string(Backend b);
// Threads the OpenMP backend would use (1 when built without OpenMP).
int max_threads();

using Point = std::array<double, 3>;  // t, x1, x2 in the construction's orientation

std::vector<PointEval> eval_points(const PlissConstruction& pc, const std::vector<Point>& pts,
                                   Backend backend);

// Blocks 0..nu_max of u, one inverse transform per block.
std::vector<GridField> lp_blocks(const DyadicPartition& part, const GridField& u, Backend backend);

struct MollifiedSample {
  double t = 0.0;
  double original = 0.0;    // a(t)
  double value = 0.0;       // a_eps(t)
  double derivative = 0.0;  // d/dt a_eps(t)
};

std::vector<MollifiedSample> mollify_sweep(const MollifiedFunction& mf, const std::vector<double>& ts,
                                           Backend backend);

namespace serial {
std::vector<PointEval> eval_points(const PlissConstruction& pc, const std::vector<Point>& pts);
std::vector<GridField> lp_blocks(const DyadicPartition& part, const GridField& u);
std::vector<MollifiedSample> mollify_sweep(const MollifiedFunction& mf, const std::vector<double>& ts);
}  // namespace serial

namespace omp {
std::vector<PointEval> eval_points(const PlissConstruction& pc, const std::vector<Point>& pts);
std::vector<GridField> lp_blocks(const DyadicPartition& part, const GridField& u);
std::vector<MollifiedSample> mollify_sweep(const MollifiedFunction& mf, const std::vector<double>& ts);
}  // namespace omp

}  // namespace osgood::kernels
