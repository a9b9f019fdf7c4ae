// Serial reference kernels against their OpenMP counterparts on the same grids.

#include <benchmark/benchmark.h>

#include <memory>

#include "jacobi/analysis.hpp"
#include "jacobi/kernels.hpp"

using namespace jacobi;

namespace {

struct Fixture {
  HamiltonianSystem sys = HamiltonianSystem::pendulum(3);
  Vec z0 = Vec::LinSpaced(6, 0.4, -0.3);
  Trajectory traj = flow(sys, z0, 6.0, 1e-3);
  GrassmannCurve curve = jacobi_curve(sys, z0, 6.0, 1e-3);
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture x;
    // Fill the curve's lazy caches outside the timed loops.
    curvature_spectra(x.curve, {0.1, 3.0, 5.9}, Exec::Serial);
    sample_frames(x.curve, {0.1, 3.0, 5.9}, Exec::Serial);
    return x;
  }();
  return f;
}

std::vector<double> grid(int count) {
  std::vector<double> ts(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) ts[i] = 0.1 + 5.8 * i / (count - 1);
  return ts;
}

Exec mode(const benchmark::State& state) { return state.range(1) ? Exec::Parallel : Exec::Serial; }

void set_label(benchmark::State& state) {
  state.SetLabel(state.range(1) ? "parallel x" + std::to_string(max_threads()) : "serial");
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SampleFrames(benchmark::State& state) {
  const auto ts = grid(static_cast<int>(state.range(0)));
  const Fixture& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(sample_frames(f.curve, ts, mode(state)));
  set_label(state);
}

void BM_CurvatureSpectra(benchmark::State& state) {
  const auto ts = grid(static_cast<int>(state.range(0)));
  const Fixture& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(curvature_spectra(f.curve, ts, mode(state)));
  set_label(state);
}

void BM_VelocityInertia(benchmark::State& state) {
  const auto ts = grid(static_cast<int>(state.range(0)));
  const Fixture& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(velocity_inertia(f.curve, ts, mode(state)));
  set_label(state);
}

void BM_FieldCurvature(benchmark::State& state) {
  const int samples = static_cast<int>(state.range(0));
  const Fixture& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        sample_field_curvature(f.sys, f.traj, samples, mode(state)));
  set_label(state);
}

void grid_args(benchmark::internal::Benchmark* b) {
  for (int count : {64, 512})
    for (int par : {0, 1}) b->Args({count, par});
  b->ArgNames({"points", "parallel"})->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_SampleFrames)->Apply(grid_args);
BENCHMARK(BM_CurvatureSpectra)->Apply(grid_args);
BENCHMARK(BM_VelocityInertia)->Apply(grid_args);
BENCHMARK(BM_FieldCurvature)->Apply(grid_args);

BENCHMARK_MAIN();
