#include <benchmark/benchmark.h>

#include "fracprop/mlf.hpp"

using namespace fracprop;

// x picks the zone: series, contour, asymptotic
static void BM_MittagLeffler(benchmark::State& state) {
    const double beta = state.range(0) / 100.0;
    const double x = -static_cast<double>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(mittag_leffler(beta, 1.0, x));
}
BENCHMARK(BM_MittagLeffler)->ArgsProduct({{30, 50, 90}, {0, 5, 5000}});

static void BM_MLKernel(benchmark::State& state) {
    const MLKernelSpec spec{0.6, 2.0};
    double t = 1e-3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ml_kernel(spec, t));
        t = t < 10.0 ? t * 1.1 : 1e-3;
    }
}
BENCHMARK(BM_MLKernel);
