#include <benchmark/benchmark.h>

#include "cpdtv/phantom.hpp"

using namespace cpdtv;

namespace {

void BM_GeneratePhantom(benchmark::State& state) {
    PhantomConfig cfg;
    cfg.grid = {32, 32, 8};
    for (auto _ : state)
        benchmark::DoNotOptimize(generate_phantom(cfg, static_cast<unsigned>(state.range(0))));
}
BENCHMARK(BM_GeneratePhantom)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_InjectUndersampling(benchmark::State& state) {
    PhantomConfig cfg;
    cfg.grid = {32, 32, 8};
    const ComplexTensor3 x = generate_phantom(cfg);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            inject_undersampling(x, cfg.grid, 6.0, 1, static_cast<unsigned>(state.range(0))));
}
BENCHMARK(BM_InjectUndersampling)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

} // namespace
