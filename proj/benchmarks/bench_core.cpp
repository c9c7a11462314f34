#include <benchmark/benchmark.h>

#include "gptref/born.hpp"
#include "gptref/device.hpp"
#include "gptref/morpho.hpp"
#include "gptref/quantum.hpp"

using namespace gptref;

namespace {

ReferenceDevice make_device_for(int d, int n, std::uint64_t seed) {
    GptSpace space = GptSpace::quantum_complex(d);
    return construct_depolarizing_states(random_ic_measurement(space, n, seed));
}

void BM_construct_depolarizing(benchmark::State& state) {
    GptSpace space = GptSpace::quantum_complex(2);
    ReferenceMeasurement m = random_ic_measurement(space, static_cast<int>(state.range(0)), 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(construct_depolarizing_states(m));
    }
}
BENCHMARK(BM_construct_depolarizing)->Arg(4)->Arg(8);

void BM_minimal_numeric(benchmark::State& state) {
    ReferenceDevice device = make_device_for(3, static_cast<int>(state.range(0)), 11);
    for (auto _ : state) {
        benchmark::DoNotOptimize(minimal_born_matrix_numeric(device.self_conditional));
    }
}
BENCHMARK(BM_minimal_numeric)->Arg(9)->Arg(18);

void BM_depolarizing_fit(benchmark::State& state) {
    ReferenceDevice device = make_device_for(3, 12, 13);
    for (auto _ : state) {
        benchmark::DoNotOptimize(depolarizing_fit(device));
    }
}
BENCHMARK(BM_depolarizing_fit);

void BM_wh_sic_d3(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(quantum::wh_sic(3));
    }
}
BENCHMARK(BM_wh_sic_d3);

void BM_weight_morphophoricity(benchmark::State& state) {
    ReferenceMeasurement m = construct_weight_morphophoric(
        GptSpace::quantum_complex(3), 12, Vector::Constant(12, 1.0 / 12), 17);
    for (auto _ : state) {
        benchmark::DoNotOptimize(weight_morphophoricity_check(m));
    }
}
BENCHMARK(BM_weight_morphophoricity);

}  // namespace

BENCHMARK_MAIN();
