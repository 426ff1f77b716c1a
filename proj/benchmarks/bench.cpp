#include <benchmark/benchmark.h>

#include <vector>

#include "spr/builder.hpp"
#include "spr/frame.hpp"
#include "spr/reconstruct.hpp"
#include "spr/rng.hpp"
#include "spr/subspace.hpp"
#include "spr/verifier.hpp"

namespace {

std::vector<int> mixed_dims(int m) {
    std::vector<int> dims(static_cast<size_t>(2 * m - 1));
    for (size_t i = 0; i < dims.size(); ++i) {
        dims[i] = 1 + static_cast<int>(i % static_cast<size_t>(m - 1));
    }
    return dims;
}

void BM_build_real_family(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    const std::vector<int> dims = mixed_dims(m);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        spr::RngState rng(seed++);
        benchmark::DoNotOptimize(spr::build_real_family(m, dims, rng));
    }
}
BENCHMARK(BM_build_real_family)->Arg(3)->Arg(5)->Arg(8);

void BM_is_full_spark(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    spr::RngState rng(1);
    const spr::Frame f = spr::stacked_orthobases(m, 2, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(spr::is_full_spark(f));
    }
}
BENCHMARK(BM_is_full_spark)->Arg(4)->Arg(6)->Arg(8);

void BM_complement_property(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    spr::RngState rng(2);
    spr::Matrix rows(2 * m - 2, m);
    for (int i = 0; i < rows.rows(); ++i) rows.row(i) = rng.gaussian_vector(m).transpose();
    const spr::Frame f(rows);  // always fails: exercises the enumeration path
    for (auto _ : state) {
        benchmark::DoNotOptimize(spr::has_complement_property(f));
    }
}
BENCHMARK(BM_complement_property)->Arg(4)->Arg(6);

void BM_measure(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    spr::RngState rng(3);
    const spr::BuiltFamily built = spr::build_real_family(m, mixed_dims(m), rng);
    const spr::Vector x = rng.gaussian_vector(m);
    for (auto _ : state) {
        benchmark::DoNotOptimize(spr::measure(built.family, x));
    }
}
BENCHMARK(BM_measure)->Arg(3)->Arg(8);

void BM_reconstruct_roundtrip(benchmark::State& state) {
    const int m = static_cast<int>(state.range(0));
    spr::RngState rng(4);
    const spr::BuiltFamily built = spr::build_real_family(m, mixed_dims(m), rng);
    const spr::Vector x = rng.gaussian_vector(m);
    const spr::MeasurementVector meas = spr::measure(built.family, x);
    for (auto _ : state) {
        benchmark::DoNotOptimize(spr::reconstruct(built.recipe, meas));
    }
}
BENCHMARK(BM_reconstruct_roundtrip)->Arg(3)->Arg(5)->Arg(8);

void BM_rank12_witness_search(benchmark::State& state) {
    spr::RngState rng(5);
    std::vector<spr::Subspace> subs;
    for (int n = 0; n < 4; ++n) {
        spr::Matrix row(1, 3);
        row.row(0) = rng.unit_vector(3).transpose();
        if (n % 2 == 0) {
            subs.push_back(spr::Subspace::direct(row));
        } else {
            subs.push_back(spr::Subspace::complement(row.row(0).transpose()));
        }
    }
    const spr::SubspaceFamily fam(3, subs);
    for (auto _ : state) {
        spr::RngState search_rng(6);
        benchmark::DoNotOptimize(spr::rank12_witness_search(fam, search_rng, 8));
    }
}
BENCHMARK(BM_rank12_witness_search);

}  // namespace

BENCHMARK_MAIN();
