#include "jacobi/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace jacobi {

std::vector<LagrangianFrame> sample_frames(const GrassmannCurve& c, const std::vector<double>& ts,
                                           Exec exec) {
  return map_indices(ts.size(), [&](std::size_t i) { return c.at(ts[i]); }, exec);
}

std::vector<Mat> sample_chart(const GrassmannCurve& c, const Chart& chart,
                              const std::vector<double>& ts, Exec exec) {
  return map_indices(
      ts.size(), [&](std::size_t i) { return chart_coords(chart, c.columns(ts[i])); }, exec);
}

std::vector<Vec> curvature_spectra(const GrassmannCurve& c, const std::vector<double>& ts,
                                   Exec exec) {
  return map_indices(ts.size(), [&](std::size_t i) { return curvature(c, ts[i]).spectrum(); },
                     exec);
}

std::vector<Inertia> velocity_inertia(const GrassmannCurve& c, const std::vector<double>& ts,
                                      Exec exec) {
  return map_indices(
      ts.size(), [&](std::size_t i) { return inertia(velocity_form(c, ts[i]).matrix); }, exec);
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace jacobi
