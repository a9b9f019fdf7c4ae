#pragma once

#include <cstddef>
#include <exception>
#include <optional>
#include <type_traits>
#include <vector>

#include "jacobi/grassmann_curve.hpp"

namespace jacobi {

enum class Exec { Serial, Parallel };

// Evaluate f(0..count-1) into a vector. Serial is the reference path; Parallel
// distributes indices over OpenMP threads and must give identical results.
// The exception from the lowest failing index is rethrown, matching Serial.
template <class F>
auto map_indices(std::size_t count, F&& f, Exec exec) {
  using T = std::decay_t<decltype(f(std::size_t{0}))>;
  std::vector<std::optional<T>> slots(count);
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < count; ++i) slots[i].emplace(f(i));
  } else {
    std::vector<std::exception_ptr> errors(count);
    const long total = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < total; ++i) {
      try {
        slots[i].emplace(f(static_cast<std::size_t>(i)));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::vector<LagrangianFrame> sample_frames(const GrassmannCurve& c, const std::vector<double>& ts,
                                           Exec exec);
std::vector<Mat> sample_chart(const GrassmannCurve& c, const Chart& chart,
                              const std::vector<double>& ts, Exec exec);
std::vector<Vec> curvature_spectra(const GrassmannCurve& c, const std::vector<double>& ts,
                                   Exec exec);
std::vector<Inertia> velocity_inertia(const GrassmannCurve& c, const std::vector<double>& ts,
                                      Exec exec);

int max_threads();

}  // namespace jacobi
