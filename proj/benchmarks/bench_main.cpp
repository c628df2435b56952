#include <benchmark/benchmark.h>

#include "spiralctl/feedback_control.hpp"
#include "spiralctl/front_track.hpp"
#include "spiralctl/grid.hpp"
#include "spiralctl/stability.hpp"

using namespace spiralctl;

namespace {

grid::Grid2D seeded(std::size_t nx, std::size_t ny) {
  grid::Grid2D g(nx, ny);
  grid::init_pulse_seed(g, {});
  return g;
}

void BM_Step(benchmark::State& state) {
  const auto nx = static_cast<std::size_t>(state.range(0));
  grid::Grid2D g = seeded(nx, 2 * nx);
  grid::Stepper stepper({}, {}, {grid::YBoundary::periodic}, static_cast<int>(state.range(1)));
  for (auto _ : state) {
    stepper.advance(g, nullptr, 0.2);
    benchmark::DoNotOptimize(g.v.data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.v.size()));
}
BENCHMARK(BM_Step)->Args({50, 1})->Args({200, 1})->Args({200, 4});

void BM_StepWithPatch(benchmark::State& state) {
  grid::Grid2D g = seeded(200, 400);
  const model::HeterogeneityPatch patch{0.21, {0.01, 0.5}, {0.275, 0.775}, {0.0, 1e9}};
  grid::Stepper stepper({}, {patch}, {grid::YBoundary::periodic});
  for (auto _ : state) {
    stepper.advance(g, nullptr, 0.2);
    benchmark::DoNotOptimize(g.v.data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.v.size()));
}
BENCHMARK(BM_StepWithPatch);

void BM_DetectFront(benchmark::State& state) {
  const grid::Grid2D g = seeded(200, 400);
  for (auto _ : state)
    benchmark::DoNotOptimize(front::detect_front(g, 0.5, front::Travel::plus_y, {grid::YBoundary::periodic}));
}
BENCHMARK(BM_DetectFront);

void BM_ClosedLoopSpectrum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto layout = control::sparse_layout_fig4(200, 400);
  const auto sys = stability::build_modal_system(3.54, 200.0, n, layout.actuators.xs,
                                                 layout.sensors.x_sensors[0]);
  for (auto _ : state)
    benchmark::DoNotOptimize(stability::spectrum(stability::closed_loop_matrix(sys, 0.01, 0.3536)));
}
BENCHMARK(BM_ClosedLoopSpectrum)->Arg(12)->Arg(32)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
