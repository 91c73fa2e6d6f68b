// Parallel kernels against the serial reference loops on the workloads the
// library runs: two-form quadrature and the grid scan behind the zero finder.
#include <benchmark/benchmark.h>

#include <numbers>

#include "prequant/geometry.hpp"
#include "prequant/kernels.hpp"

namespace {

using namespace prequant;

const TwoFormSpec& bumpy_form() {
  static const TwoFormSpec omega{[](const Point& p) { return 1.0 + 0.5 * p.x() * p.y() * p.z(); }, std::nullopt, false};
  return omega;
}

void BM_QuadratureParallel(benchmark::State& state) {
  const ChartGrid grid{ManifoldKind::Sphere2, static_cast<int>(state.range(0))};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kernels::sum(grid.size(), [&](std::size_t k) { return bumpy_form().at(grid.point(k)) * grid.area_weight(k); }));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}

void BM_QuadratureSerial(benchmark::State& state) {
  const ChartGrid grid{ManifoldKind::Sphere2, static_cast<int>(state.range(0))};
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::reference::sum(
        grid.size(), [&](std::size_t k) { return bumpy_form().at(grid.point(k)) * grid.area_weight(k); }));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}

void BM_ScanParallel(benchmark::State& state) {
  const ChartGrid grid{ManifoldKind::Sphere2, static_cast<int>(state.range(0))};
  const ActionSpec act = make_action("rotation", GroupSpec::so3(), ManifoldKind::Sphere2);
  const AlgebraElement x{0.3, -1.2, 2.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        kernels::argmin(grid.size(), [&](std::size_t k) { return act.vector_field(x, grid.point(k)).norm(); }));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}

void BM_ScanSerial(benchmark::State& state) {
  const ChartGrid grid{ManifoldKind::Sphere2, static_cast<int>(state.range(0))};
  const ActionSpec act = make_action("rotation", GroupSpec::so3(), ManifoldKind::Sphere2);
  const AlgebraElement x{0.3, -1.2, 2.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(kernels::reference::argmin(
        grid.size(), [&](std::size_t k) { return act.vector_field(x, grid.point(k)).norm(); }));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}

BENCHMARK(BM_QuadratureParallel)->Arg(256)->Arg(512)->Arg(1024);
BENCHMARK(BM_QuadratureSerial)->Arg(256)->Arg(512)->Arg(1024);
BENCHMARK(BM_ScanParallel)->Arg(256)->Arg(512);
BENCHMARK(BM_ScanSerial)->Arg(256)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
