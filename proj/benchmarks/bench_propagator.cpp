#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "fracprop/propagator.hpp"

using namespace fracprop;

namespace {

TriangularSystem chain_system(int m) {
    std::vector<double> betas;
    for (int i = 0; i < m; ++i) betas.push_back(0.4 + 0.5 * i / m);
    TriangularSystem sys(m, 1, FracOrderVector(betas));
    for (int i = 1; i <= m; ++i) {
        sys.set_entry(i, i, PolySymbol::monomial({{2}}, 1.0 + 0.25 * i));
        for (int j = 1; j < i; ++j) sys.set_entry(i, j, PolySymbol::monomial({{1}}, 0.5));
    }
    return sys;
}

} // namespace

static void BM_PropagatorS(benchmark::State& state) {
    const auto sys = chain_system(static_cast<int>(state.range(0)));
    const std::vector<double> xi{1.3};
    const FrequencyPropagator prop(sys, xi);
    for (auto _ : state) benchmark::DoNotOptimize(prop.S(0.7));
    state.counters["terms"] = static_cast<double>(prop.term_count());
}
BENCHMARK(BM_PropagatorS)->DenseRange(1, 5)->Unit(benchmark::kMicrosecond);

static void BM_PropagatorSetup(benchmark::State& state) {
    const auto sys = chain_system(static_cast<int>(state.range(0)));
    const std::vector<double> xi{1.3};
    for (auto _ : state) benchmark::DoNotOptimize(FrequencyPropagator(sys, xi).term_count());
}
BENCHMARK(BM_PropagatorSetup)->DenseRange(1, 5)->Unit(benchmark::kMicrosecond);

static void BM_Duhamel(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    const auto sys = chain_system(m);
    const std::vector<double> xi{1.3};
    const FrequencyPropagator prop(sys, xi);
    ModeForcing h{std::vector<std::complex<double>>(m, 1.0), {}};
    for (int i = 0; i < m; ++i) h.profile.push_back(TimeProfile::exponential(1.0, -1.0));
    for (auto _ : state) benchmark::DoNotOptimize(prop.duhamel(1.0, h));
}
BENCHMARK(BM_Duhamel)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);
