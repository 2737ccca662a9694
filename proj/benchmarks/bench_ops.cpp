#include <benchmark/benchmark.h>

#include "lstgrid/calibration.hpp"
#include "lstgrid/classifier.hpp"
#include "lstgrid/engine/scheduler.hpp"
#include "lstgrid/lst.hpp"
#include "lstgrid/synthetic.hpp"

using namespace lstgrid;
using namespace lstgrid::engine;

namespace {

struct BenchScene {
    SyntheticScene scene;
    DefaultBands ids;
    RasterGrid ndvi;

    BenchScene() : ids(default_bands(Sensor::TM)) {
        SyntheticSceneOptions o;
        o.width = o.height = 1024;
        scene = make_synthetic_scene(o);
        ndvi = RasterGrid(o.width, o.height, kDefaultNodata, 0.45);
    }
};

const BenchScene& bench_scene() {
    static const BenchScene s;
    return s;
}

void BM_LstMap(benchmark::State& state) {
    const auto& s = bench_scene();
    const auto& meta = s.scene.metadata;
    const Task task(LstMapParams::from(psi(2.0), meta.band(s.ids.thermal), EmissivityConfig{}),
                    {&s.scene.bands.at(s.ids.thermal), &s.ndvi});
    const std::vector<WorkerDescriptor> workers{WorkerDescriptor::local(static_cast<std::size_t>(state.range(0)))};
    for (auto _ : state) benchmark::DoNotOptimize(run_task(task, workers));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(s.ndvi.size()));
}
BENCHMARK(BM_LstMap)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_Histogram(benchmark::State& state) {
    const auto& s = bench_scene();
    const auto& red = s.scene.bands.at(s.ids.red);
    const std::vector<WorkerDescriptor> workers{WorkerDescriptor::local(static_cast<std::size_t>(state.range(0)))};
    for (auto _ : state) benchmark::DoNotOptimize(reduce_histogram(red, workers));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(red.size()));
}
BENCHMARK(BM_Histogram)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_ClassifyMap(benchmark::State& state) {
    const auto& s = bench_scene();
    std::vector<RasterGrid> bands;
    for (const auto& id : s.ids.classification) bands.push_back(s.scene.bands.at(id));
    const auto sigs = train_classes(bands, s.scene.training);
    for (auto _ : state) benchmark::DoNotOptimize(classify_map(bands, sigs));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(bands.front().size()));
}
BENCHMARK(BM_ClassifyMap)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
