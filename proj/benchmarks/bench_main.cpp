#include <benchmark/benchmark.h>

#include <random>

#include "posmt/dlat.hpp"
#include "posmt/dlat_enum.hpp"
#include "posmt/invariant.hpp"
#include "posmt/semcat.hpp"

using namespace posmt;

namespace {

model::FinModel bench_model() {
    auto th = syntax::parse_theory("sort A rel R : A rel S : A A");
    return model::parse_model("A = {0,1,2}\nR = {0,1}\nS = {(0,1),(1,2),(2,0)}\n", th.sig);
}

void BM_saturate(benchmark::State& state) {
    auto m = bench_model();
    for (auto _ : state) {
        auto C = semcat::SemCat::saturate({m}, {.n_max = static_cast<int>(state.range(0)),
                                                .max_lattice = 4096});
        benchmark::DoNotOptimize(C.total_defsets());
    }
}
BENCHMARK(BM_saturate)->Arg(1)->Arg(2)->Arg(3);

void BM_lm_compute(benchmark::State& state) {
    auto m = bench_model();
    auto C = semcat::SemCat::saturate({m}, {.n_max = 3, .max_lattice = 4096});
    for (auto _ : state) {
        auto lm = lm::lm_compute(C, 0, 1);
        benchmark::DoNotOptimize(lm.size());
    }
}
BENCHMARK(BM_lm_compute);

void BM_spectrum(benchmark::State& state) {
    std::mt19937_64 rng(5);
    auto Ls = dlat::random_distributive_lattices(rng, 20, 20);
    for (auto _ : state) {
        std::size_t acc = 0;
        for (auto& L : Ls)
            if (!L.trivial()) acc += dlat::spectrum(L).points.size();
        benchmark::DoNotOptimize(acc);
    }
}
BENCHMARK(BM_spectrum);

void BM_krull_algebraic(benchmark::State& state) {
    std::mt19937_64 rng(5);
    auto Ls = dlat::random_distributive_lattices(rng, 20, 20);
    for (auto _ : state) {
        int acc = 0;
        for (auto& L : Ls)
            if (!L.trivial()) acc += dlat::krull_dim_algebraic(L).dim;
        benchmark::DoNotOptimize(acc);
    }
}
BENCHMARK(BM_krull_algebraic);

}  // namespace

BENCHMARK_MAIN();
