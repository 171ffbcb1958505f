#include <benchmark/benchmark.h>

#include <random>

#include "namo/planner.hpp"
#include "namo/render.hpp"
#include "namo/simulation.hpp"

using namespace namo;

namespace {

LayeredCostmap cluttered_map(int size, double inflation) {
  LayeredCostmap map({size, size, 0.05, {}}, inflation);
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> coord(0, size - 1), len(2, size / 4);
  std::vector<GridIndex> walls;
  for (int i = 0; i < size / 5; ++i) {
    const int c = coord(rng), r = coord(rng), l = len(rng);
    for (int k = 0; k < l; ++k) {
      const GridIndex g = i % 2 ? GridIndex{c + k, r} : GridIndex{c, r + k};
      if (map.in_bounds(g)) walls.push_back(g);
    }
  }
  map.set_static(walls);
  const ClassTable classes = ClassTable::defaults();
  for (int id = 1; id <= size / 10; ++id) {
    const int c = coord(rng), r = coord(rng);
    std::vector<GridIndex> cells;
    for (int dr = 0; dr < 6; ++dr)
      for (int dc = 0; dc < 6; ++dc)
        if (map.in_bounds({c + dc, r + dr})) cells.push_back({c + dc, r + dr});
    map.upsert_object(id, classes.at(id % 2 ? kBoxCardboard : kTrashCan), cells);
  }
  map.inflate_and_compose();
  return map;
}

void BM_PlanAstar(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const LayeredCostmap map = cluttered_map(size, 0.0);
  const auto s = *nearest_traversable_cell(map, {1, 1}, size);
  const auto g = *nearest_traversable_cell(map, {size - 2, size - 2}, size);
  for (auto _ : state) {
    benchmark::DoNotOptimize(plan_astar(map, s, g));
  }
}
BENCHMARK(BM_PlanAstar)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_InflateAndCompose(benchmark::State& state) {
  LayeredCostmap map = cluttered_map(static_cast<int>(state.range(0)), 0.25);
  for (auto _ : state) {
    map.inflate_and_compose();
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_InflateAndCompose)->Arg(100)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_RenderView(benchmark::State& state) {
  RenderScene scene;
  scene.prisms.push_back({1, transform_polygon(Pose2D::make(1.5, 0.0, 0.3), make_rectangle(-0.2, -0.2, 0.2, 0.2)), 0.4});
  scene.prisms.push_back({0, make_rectangle(3.0, -2.0, 3.2, 2.0), 1.0});
  const CameraIntrinsics intr;
  const CameraExtrinsics extr;
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_view(scene, intr, extr, Pose2D{}));
  }
}
BENCHMARK(BM_RenderView)->Unit(benchmark::kMillisecond);

void BM_PerceiveCells(benchmark::State& state) {
  RenderScene scene;
  scene.prisms.push_back({1, transform_polygon(Pose2D::make(1.5, 0.0, 0.3), make_rectangle(-0.2, -0.2, 0.2, 0.2)), 0.4});
  const CameraIntrinsics intr;
  const CameraExtrinsics extr;
  const RenderedView view = render_view(scene, intr, extr, Pose2D{});
  const GridGeometry grid{120, 120, 0.05, {-3.0, -3.0}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(perceive_cells(view.depth, view.mask, intr, extr, Pose2D{}, grid, PerceptionParams{}));
  }
}
BENCHMARK(BM_PerceiveCells)->Unit(benchmark::kMillisecond);

void BM_SorFilter(benchmark::State& state) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointCloud cloud;
  for (int i = 0; i < state.range(0); ++i) cloud.push_back({u(rng), u(rng), 0.1 * u(rng)}, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sor_filter(cloud, 10, 1.0));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SorFilter)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_RunScenario(benchmark::State& state) {
  const Scenario s = load_scenario(std::string(NAMO_SCENARIO_DIR) + "/scenario1_trapped.json");
  SimulationOptions opt;
  opt.perception = state.range(0) ? PerceptionMode::Rendered : PerceptionMode::Oracle;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_scenario(s, opt));
  }
  state.SetLabel(state.range(0) ? "rendered" : "oracle");
}
BENCHMARK(BM_RunScenario)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
