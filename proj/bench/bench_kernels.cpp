// Serial reference vs OpenMP kernels on the example surface.
//
//   build/bench_kernels --benchmark_filter=RbApply

#include <benchmark/benchmark.h>

#include <cmath>

#include "hypersurf/config.hpp"
#include "hypersurf/dimension.hpp"
#include "hypersurf/fractal.hpp"
#include "hypersurf/measure.hpp"

using namespace hypersurf;

namespace {

const FractalSystem& example() {
    static const FractalSystem sys(standard_triangle_partition(), 1, ScalingVector({0.8, 0.8, 0.75, 0.75}),
                                   Expression::parse("5 + x^3 + y^2 + sin(2*pi*x)*sin(2*pi*y)", 2),
                                   Expression::parse("5 + x^3 + y^2", 2));
    return sys;
}

Exec policy(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "omp"); }

void RbApply(benchmark::State& state) {
    const RbOperator op(example(), make_lattice(example().partition(), static_cast<int>(state.range(1))));
    const GridFunction f = op.seed();
    const Exec exec = policy(state);
    for (auto _ : state) benchmark::DoNotOptimize(op.apply(f, exec));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.size()));
    label(state);
}

void FixedPoint(benchmark::State& state) {
    const Exec exec = policy(state);
    for (auto _ : state) benchmark::DoNotOptimize(fixed_point(example(), static_cast<int>(state.range(1)), 1e-10, 1000, exec));
    label(state);
}

void SurfaceBoxCount(benchmark::State& state) {
    static const FixedPointResult r = fixed_point(example(), 10, 1e-10, 1000);
    const Exec exec = policy(state);
    const double delta = std::ldexp(1.0, -static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(box_count_surface(r.f, delta, exec));
    label(state);
}

void PieceRanges(benchmark::State& state) {
    static const FixedPointResult r = fixed_point(example(), 10, 1e-10, 1000);
    const Exec exec = policy(state);
    for (auto _ : state) benchmark::DoNotOptimize(total_oscillation(r.f, static_cast<int>(state.range(1)), exec));
    label(state);
}

void ChaosGame(benchmark::State& state) {
    const Exec exec = policy(state);
    const auto count = static_cast<std::size_t>(state.range(1));
    for (auto _ : state)
        benchmark::DoNotOptimize(chaos_game(example(), ProbabilityVector::uniform(4), count, 42, CloudMode::graph, {}, exec));
    state.SetItemsProcessed(state.iterations() * state.range(1));
    label(state);
}

}  // namespace

BENCHMARK(RbApply)->ArgsProduct({{0, 1}, {8, 10}})->Unit(benchmark::kMillisecond);
BENCHMARK(FixedPoint)->ArgsProduct({{0, 1}, {8, 10}})->Unit(benchmark::kMillisecond);
BENCHMARK(SurfaceBoxCount)->ArgsProduct({{0, 1}, {4, 8}})->Unit(benchmark::kMillisecond);
BENCHMARK(PieceRanges)->ArgsProduct({{0, 1}, {4, 8}})->Unit(benchmark::kMillisecond);
BENCHMARK(ChaosGame)->ArgsProduct({{0, 1}, {100000}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
