#include <exception>

#include "osgood/kernels.hpp"

namespace osgood::kernels::omp {

namespace {

// Runs body(i) for i < count across threads; the first exception (by index)
// is rethrown after the loop.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  std::vector<std::exception_ptr> failures(count);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t i = 0; i < count; ++i) {
    try {
      body(i);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

}  // namespace

std::vector<PointEval> eval_points(const PlissConstruction& pc, const std::vector<Point>& pts) {
  std::vector<PointEval> out(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) { out[i] = pc.eval(pts[i][0], pts[i][1], pts[i][2]); });
  return out;
}

std::vector<GridField> lp_blocks(const DyadicPartition& part, const GridField& u) {
  std::vector<GridField> out(static_cast<std::size_t>(part.nu_max + 1), GridField(u.dim(), u.n()));
  parallel_for(out.size(), [&](std::size_t nu) { out[nu] = lp_block(part, u, static_cast<int>(nu)); });
  return out;
}

std::vector<MollifiedSample> mollify_sweep(const MollifiedFunction& mf, const std::vector<double>& ts) {
  std::vector<MollifiedSample> out(ts.size());
  parallel_for(ts.size(), [&](std::size_t i) {
    const auto [v, d] = mf.value_and_derivative(ts[i]);
    out[i] = {ts[i], mf.source().value(ts[i]), v, d};
  });
  return out;
}

}  // namespace osgood::kernels::omp
