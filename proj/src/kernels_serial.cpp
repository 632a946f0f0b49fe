#include "osgood/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace osgood::kernels {

const char* to_string(Backend b) { return b == Backend::Serial ? "serial" : "openmp"; }

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

std::vector<PointEval> eval_points(const PlissConstruction& pc, const std::vector<Point>& pts,
                                   Backend backend) {
  return backend == Backend::Serial ? serial::eval_points(pc, pts) : omp::eval_points(pc, pts);
}

std::vector<GridField> lp_blocks(const DyadicPartition& part, const GridField& u, Backend backend) {
  return backend == Backend::Serial ? serial::lp_blocks(part, u) : omp::lp_blocks(part, u);
}

std::vector<MollifiedSample> mollify_sweep(const MollifiedFunction& mf, const std::vector<double>& ts,
                                           Backend backend) {
  return backend == Backend::Serial ? serial::mollify_sweep(mf, ts) : omp::mollify_sweep(mf, ts);
}

namespace serial {

std::vector<PointEval> eval_points(const PlissConstruction& pc, const std::vector<Point>& pts) {
  std::vector<PointEval> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(pc.eval(p[0], p[1], p[2]));
  return out;
}

std::vector<GridField> lp_blocks(const DyadicPartition& part, const GridField& u) {
  return lp_decompose(part, u);
}

std::vector<MollifiedSample> mollify_sweep(const MollifiedFunction& mf, const std::vector<double>& ts) {
  std::vector<MollifiedSample> out;
  out.reserve(ts.size());
  for (double t : ts) {
    const auto [v, d] = mf.value_and_derivative(t);
    out.push_back({t, mf.source().value(t), v, d});
  }
  return out;
}

}  // namespace serial

}  // namespace osgood::kernels
