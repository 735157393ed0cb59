// OpenMP kernels against their serial twins. Pass --benchmark_filter=... to
// narrow; thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <vector>

#include "ellreg/besov.hpp"
#include "ellreg/fixtures.hpp"
#include "ellreg/kernels.hpp"
#include "ellreg/localize.hpp"
#include "ellreg/rng.hpp"

using namespace ellreg;

namespace {

std::vector<cplx> noise(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<cplx> v(n);
    for (auto& z : v) z = rng.complex_normal();
    return v;
}

std::vector<double> moduli(std::size_t n) {
    const auto z = noise(n, 1);
    std::vector<double> out(n);
    serial::modulus(z, 1, out);
    return out;
}

template <bool Parallel>
void power_sum(benchmark::State& state) {
    const auto v = moduli(state.range(0));
    for (auto _ : state) {
        const double s = Parallel ? kernels::power_sum(v, 1.5) : serial::power_sum(v, 1.5);
        benchmark::DoNotOptimize(s);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void modulus(benchmark::State& state) {
    const auto z = noise(2 * state.range(0), 2);
    std::vector<double> out(state.range(0));
    for (auto _ : state) {
        if (Parallel) kernels::modulus(z, 2, out);
        else serial::modulus(z, 2, out);
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void multiply_symbol(benchmark::State& state) {
    auto c = noise(state.range(0), 3);
    const auto s = noise(state.range(0), 4);
    for (auto _ : state) {
        if (Parallel) kernels::multiply_symbol(c, 1, s);
        else serial::multiply_symbol(c, 1, s);
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void axpy(benchmark::State& state) {
    const auto x = noise(state.range(0), 5);
    auto y = noise(state.range(0), 6);
    for (auto _ : state) {
        if (Parallel) kernels::axpy(cplx(0.5, -0.25), x, y);
        else serial::axpy(cplx(0.5, -0.25), x, y);
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void second_differences(benchmark::State& state) {
    const GridSpec g(2, static_cast<int>(state.range(0)), kPi);
    Rng rng(7);
    const SpectralField F = dft(random_low_modes(g, 1, 8, rng));
    const auto set = DisplacementSet::for_grid(g);
    for (auto _ : state) {
        const auto n = Parallel ? second_difference_norms(F, set, 2.0) : serial::second_difference_norms(F, set, 2.0);
        benchmark::DoNotOptimize(n.data());
    }
}

template <bool Parallel>
void patch_norms(benchmark::State& state) {
    const GridSpec g(1, static_cast<int>(state.range(0)), kPi);
    const auto part = build_partition(g, kPi / 2);
    Rng rng(8);
    const Field f = random_low_modes(g, 1, 8, rng);
    for (auto _ : state) {
        const double n = Parallel ? patch_norm(f, part, 0.5, 2.0) : serial::patch_norm(f, part, 0.5, 2.0);
        benchmark::DoNotOptimize(n);
    }
}

} // namespace

BENCHMARK(power_sum<true>)->Name("power_sum/omp")->RangeMultiplier(16)->Range(1 << 12, 1 << 20);
BENCHMARK(power_sum<false>)->Name("power_sum/serial")->RangeMultiplier(16)->Range(1 << 12, 1 << 20);
BENCHMARK(modulus<true>)->Name("modulus/omp")->RangeMultiplier(16)->Range(1 << 12, 1 << 20);
BENCHMARK(modulus<false>)->Name("modulus/serial")->RangeMultiplier(16)->Range(1 << 12, 1 << 20);
BENCHMARK(multiply_symbol<true>)->Name("multiply_symbol/omp")->RangeMultiplier(16)->Range(1 << 12, 1 << 20);
BENCHMARK(multiply_symbol<false>)->Name("multiply_symbol/serial")->RangeMultiplier(16)->Range(1 << 12, 1 << 20);
BENCHMARK(axpy<true>)->Name("axpy/omp")->RangeMultiplier(16)->Range(1 << 12, 1 << 20);
BENCHMARK(axpy<false>)->Name("axpy/serial")->RangeMultiplier(16)->Range(1 << 12, 1 << 20);
BENCHMARK(second_differences<true>)->Name("second_difference_norms/omp")->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(second_differences<false>)->Name("second_difference_norms/serial")->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(patch_norms<true>)->Name("patch_norm/omp")->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(patch_norms<false>)->Name("patch_norm/serial")->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
