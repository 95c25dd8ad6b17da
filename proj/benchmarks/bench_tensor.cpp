#include <benchmark/benchmark.h>

#include <random>

#include "cpdtv/tensor.hpp"

using namespace cpdtv;

namespace {

ComplexTensor3 make_tensor(Index n, Index e, Index t) {
    std::mt19937 gen(42);
    std::normal_distribution<double> dist(0.0, 1.0);
    ComplexTensor3 x(n, e, t);
    for (Index i = 0; i < x.size(); ++i)
        x.data()[i] = Complex{dist(gen), dist(gen)};
    return x;
}

FactorSet make_factors(Index n, Index e, Index t, Index rank) {
    std::mt19937 gen(43);
    std::normal_distribution<double> dist(0.0, 1.0);
    FactorSet f;
    f.A.resize(n, rank);
    f.B.resize(e, rank);
    f.C.resize(t, rank);
    for (ComplexMatrix* m : {&f.A, &f.B, &f.C})
        for (Index c = 0; c < rank; ++c)
            for (Index r = 0; r < m->rows(); ++r)
                (*m)(r, c) = Complex{dist(gen), dist(gen)};
    return f;
}

void BM_Unfold(benchmark::State& state) {
    const int mode = static_cast<int>(state.range(0));
    const ComplexTensor3 x = make_tensor(8192, 6, 6);
    for (auto _ : state)
        benchmark::DoNotOptimize(unfold(x, mode));
}
BENCHMARK(BM_Unfold)->Arg(1)->Arg(2)->Arg(3);

void BM_KhatriRao(benchmark::State& state) {
    const FactorSet f = make_factors(8192, 6, 6, static_cast<Index>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(khatri_rao(f.C, f.A));
}
BENCHMARK(BM_KhatriRao)->Arg(5)->Arg(13)->Arg(30);

void BM_Synthesize(benchmark::State& state) {
    const FactorSet f = make_factors(8192, 6, 6, static_cast<Index>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(cpd_synthesize(f));
}
BENCHMARK(BM_Synthesize)->Arg(5)->Arg(13)->Arg(30);

void BM_FrobeniusNorm(benchmark::State& state) {
    const ComplexTensor3 x = make_tensor(8192, 6, 6);
    for (auto _ : state)
        benchmark::DoNotOptimize(frobenius_norm(x));
}
BENCHMARK(BM_FrobeniusNorm);

} // namespace
