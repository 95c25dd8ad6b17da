#include <benchmark/benchmark.h>

#include <random>

#include "cpdtv/solver.hpp"
#include "cpdtv/tensor.hpp"

using namespace cpdtv;

namespace {

ComplexTensor3 make_tensor(Index n, Index e, Index t) {
    std::mt19937 gen(7);
    std::normal_distribution<double> dist(0.0, 1.0);
    ComplexTensor3 x(n, e, t);
    for (Index i = 0; i < x.size(); ++i)
        x.data()[i] = Complex{dist(gen), dist(gen)};
    return x;
}

void BM_TvValue(benchmark::State& state) {
    const ComplexTensor3 x = make_tensor(8192, 6, 6);
    for (auto _ : state)
        benchmark::DoNotOptimize(tv_value(x, TvDim::echo, TvVariant::smoothed_l1, 1e-3));
}
BENCHMARK(BM_TvValue);

void BM_TvGradient(benchmark::State& state) {
    const ComplexTensor3 x = make_tensor(8192, 6, 6);
    for (auto _ : state)
        benchmark::DoNotOptimize(tv_gradient(x, TvDim::echo, TvVariant::smoothed_l1, 1e-3));
}
BENCHMARK(BM_TvGradient);

void BM_Objective(benchmark::State& state) {
    const ComplexTensor3 y = make_tensor(8192, 6, 6);
    const FactorSet f = initialize_factors(y, static_cast<Index>(state.range(0)),
                                           InitStrategy::seeded_random, 1);
    SolverConfig cfg;
    cfg.rank = static_cast<Index>(state.range(0));
    cfg.lambda_e = 0.01;
    cfg.lambda_t = 0.01;
    cfg.epsilon = 1e-3;
    for (auto _ : state)
        benchmark::DoNotOptimize(objective(y, f, cfg));
}
BENCHMARK(BM_Objective)->Arg(13);

void BM_FactorGradient(benchmark::State& state) {
    const ComplexTensor3 y = make_tensor(8192, 6, 6);
    const FactorSet f = initialize_factors(y, 13, InitStrategy::seeded_random, 1);
    SolverConfig cfg;
    cfg.rank = 13;
    cfg.lambda_e = 0.01;
    cfg.lambda_t = 0.01;
    cfg.epsilon = 1e-3;
    const int mode = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(factor_gradient(y, f, mode, cfg));
}
BENCHMARK(BM_FactorGradient)->Arg(1)->Arg(2)->Arg(3);

void BM_SolveOuterIterations(benchmark::State& state) {
    const ComplexTensor3 y = make_tensor(2048, 6, 6);
    SolverConfig cfg;
    cfg.rank = 13;
    cfg.lambda_e = 0.01;
    cfg.lambda_t = 0.01;
    cfg.max_outer_iters = static_cast<int>(state.range(0));
    cfg.rel_tol = 1e-300; // run the full budget
    cfg.seed = 3;
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_cpdtv(y, cfg));
}
BENCHMARK(BM_SolveOuterIterations)->Arg(5)->Unit(benchmark::kMillisecond);

} // namespace
