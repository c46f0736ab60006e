// Serial reference kernels against their OpenMP counterparts, plus one full
// semi-implicit step. Sizes straddle the parallel threshold.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "vicinal/continuum.hpp"
#include "vicinal/kernels.hpp"

namespace {

using namespace vicinal;

std::vector<double> smooth(std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * std::sin(6.283185307179586 * static_cast<double>(i) / n);
    return v;
}

void BM_diff4_serial(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto f = smooth(n);
    std::vector<double> out(n);
    for (auto _ : st) {
        kernels::serial::diff4(f, 1.0 / n, out);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_diff4_omp(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto f = smooth(n);
    std::vector<double> out(n);
    for (auto _ : st) {
        kernels::diff4(f, 1.0 / n, out);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_pde_rhs_serial(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto u = smooth(n);
    std::vector<double> w(n), d4(n), out(n);
    for (auto _ : st) {
        kernels::serial::cube(u, w);
        kernels::serial::diff4(w, 1.0 / n, d4);
        kernels::serial::pde_rhs(u, d4, 1e-3, out);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_pde_rhs_omp(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const auto u = smooth(n);
    std::vector<double> w(n), d4(n), out(n);
    for (auto _ : st) {
        kernels::cube(u, w);
        kernels::diff4(w, 1.0 / n, d4);
        kernels::pde_rhs(u, d4, 1e-3, out);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_sum_squares_serial(benchmark::State& st) {
    const auto f = smooth(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(kernels::serial::sum_squares(f));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_sum_squares_omp(benchmark::State& st) {
    const auto f = smooth(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(kernels::sum_squares(f));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_semi_implicit_step(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    const PeriodicField u(make_grid(n), smooth(n));
    continuum::SolverOptions o;
    o.mobility = st.range(1) ? continuum::Mobility::Secant : continuum::Mobility::Lagged;
    const continuum::SolverState s{0.0, u, 1e-3, 0.0, 0, {}, u.min()};
    for (auto _ : st) benchmark::DoNotOptimize(continuum::semi_implicit_step(s, 1e-8, o).u.values().data());
}

} // namespace

BENCHMARK(BM_diff4_serial)->RangeMultiplier(8)->Range(256, 1 << 20);
BENCHMARK(BM_diff4_omp)->RangeMultiplier(8)->Range(256, 1 << 20);
BENCHMARK(BM_pde_rhs_serial)->RangeMultiplier(8)->Range(256, 1 << 20);
BENCHMARK(BM_pde_rhs_omp)->RangeMultiplier(8)->Range(256, 1 << 20);
BENCHMARK(BM_sum_squares_serial)->RangeMultiplier(8)->Range(256, 1 << 20);
BENCHMARK(BM_sum_squares_omp)->RangeMultiplier(8)->Range(256, 1 << 20);
BENCHMARK(BM_semi_implicit_step)->ArgsProduct({{128, 512, 4096}, {0, 1}});

BENCHMARK_MAIN();
