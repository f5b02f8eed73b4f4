#include "extenso/models.hpp"

#include <benchmark/benchmark.h>

using namespace extenso;

namespace {

const ThermoSystem& gas()
{
    static const ThermoSystem s = ideal_gas(1.5, 1.0, 1.0);
    return s;
}

SampleSpec spec(int count)
{
    return SampleSpec{Box({{0.5, 5.0}, {0.5, 5.0}, {0.5, 5.0}}), count, 7, {}};
}

void extensive_function(benchmark::State& state, Execution ex)
{
    const SampleSpec s = spec(int(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(check_extensive_function(gas().entropy, gas().rho, s, 1e-9, "bench", ex));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void extensive_form(benchmark::State& state, Execution ex)
{
    const SampleSpec s = spec(int(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(check_extensive_form(gas().heat, gas().rho, s, 1e-9, "bench", ex));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK_CAPTURE(extensive_function, serial, Execution::serial)->Arg(64)->Arg(512)->UseRealTime();
BENCHMARK_CAPTURE(extensive_function, parallel, Execution::parallel)->Arg(64)->Arg(512)->UseRealTime();
BENCHMARK_CAPTURE(extensive_form, serial, Execution::serial)->Arg(64)->Arg(512)->UseRealTime();
BENCHMARK_CAPTURE(extensive_form, parallel, Execution::parallel)->Arg(64)->Arg(512)->UseRealTime();

BENCHMARK_MAIN();
