// Serial reference kernels against their OpenMP counterparts, plus a full CG
// solve. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "compete/grid.hpp"
#include "compete/kernels.hpp"

namespace {

using namespace compete;

kernels::Stencil square(int n) {
    const double h = 1.0 / (n + 1);
    return {2, n, n, 1.0 / (h * h), 1.0 / (h * h)};
}

std::vector<double> ramp(std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = std::sin(0.001 * static_cast<double>(k));
    return v;
}

void BM_LaplacianSerial(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto s = square(n);
    const auto in = ramp(std::size_t(n) * n);
    std::vector<double> out(in.size());
    for (auto _ : state) {
        kernels::serial::laplacian(s, in, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(in.size()));
}

void BM_LaplacianOmp(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto s = square(n);
    const auto in = ramp(std::size_t(n) * n);
    std::vector<double> out(in.size());
    for (auto _ : state) {
        kernels::laplacian(s, in, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(in.size()));
}

void BM_DotSerial(benchmark::State& state) {
    const auto a = ramp(state.range(0));
    const auto b = ramp(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::dot(a, b));
}

void BM_DotOmp(benchmark::State& state) {
    const auto a = ramp(state.range(0));
    const auto b = ramp(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(kernels::dot(a, b));
}

void BM_AxpySerial(benchmark::State& state) {
    const auto x = ramp(state.range(0));
    auto y = ramp(state.range(0));
    for (auto _ : state) {
        kernels::serial::axpy(1e-9, x, y);
        benchmark::DoNotOptimize(y.data());
    }
}

void BM_AxpyOmp(benchmark::State& state) {
    const auto x = ramp(state.range(0));
    auto y = ramp(state.range(0));
    for (auto _ : state) {
        kernels::axpy(1e-9, x, y);
        benchmark::DoNotOptimize(y.data());
    }
}

void BM_SolveSpd(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Grid grid = Grid::rectangle(1.0, 1.0, n, n);
    const LinearOperator op(grid, 1.0);
    const ScalarField rhs(grid, 1.0);
    for (auto _ : state) {
        auto r = solve_spd(op, rhs);
        benchmark::DoNotOptimize(r.solution.values().data());
    }
    state.counters["threads"] = kernels::thread_count();
}

}  // namespace

BENCHMARK(BM_LaplacianSerial)->Arg(128)->Arg(512)->Arg(1024);
BENCHMARK(BM_LaplacianOmp)->Arg(128)->Arg(512)->Arg(1024);
BENCHMARK(BM_DotSerial)->Arg(1 << 14)->Arg(1 << 20);
BENCHMARK(BM_DotOmp)->Arg(1 << 14)->Arg(1 << 20);
BENCHMARK(BM_AxpySerial)->Arg(1 << 14)->Arg(1 << 20);
BENCHMARK(BM_AxpyOmp)->Arg(1 << 14)->Arg(1 << 20);
BENCHMARK(BM_SolveSpd)->Arg(64)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
