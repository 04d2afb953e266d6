#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "fracprop/spectral.hpp"

using namespace fracprop;

static void BM_SolveModes(benchmark::State& state) {
    TriangularSystem sys(2, 1, FracOrderVector({0.5, 0.7}));
    sys.set_entry(1, 1, PolySymbol::monomial({{2}}, 1.0));
    sys.set_entry(2, 1, PolySymbol::monomial({{1}}, 1.0));
    sys.set_entry(2, 2, PolySymbol::monomial({{4}}, 1.0));
    const int K = static_cast<int>(state.range(0));
    SpectralField f(1, 2.0 * M_PI);
    for (int k = 1; k <= K; ++k) {
        f.modes[{k}] = 1.0 / k;
        f.modes[{-k}] = 1.0 / k;
    }
    f.real = true;
    const std::vector<double> times{0.25, 0.5, 1.0};
    for (auto _ : state) benchmark::DoNotOptimize(solve(sys, {f, f}, {}, times).lattice.size());
    state.SetItemsProcessed(state.iterations() * 2 * K);
}
BENCHMARK(BM_SolveModes)->RangeMultiplier(4)->Range(1, 64)->Unit(benchmark::kMillisecond);
