#include <benchmark/benchmark.h>

#include <random>

#include "zgw/parallel/batch.hpp"

using namespace zgw;

namespace {

std::vector<std::string> payloads(std::size_t n) {
  std::mt19937_64 rng(1);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::uint8_t> code(16);
    for (auto& b : code) b = static_cast<std::uint8_t>(rng());
    out.push_back(install_code::make_install_code(code).payload_hex());
  }
  return out;
}

void BM_DeriveSerial(benchmark::State& state) {
  const auto in = payloads(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(parallel::derive_link_keys_serial(in));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_DeriveParallel(benchmark::State& state) {
  const auto in = payloads(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(parallel::derive_link_keys(in));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = parallel::max_threads();
}

const std::vector<std::uint64_t> kSeeds{1, 2, 3, 4};

void BM_SweepSerial(benchmark::State& state) {
  const auto base = scenario::builtin_scenario("office");
  for (auto _ : state) benchmark::DoNotOptimize(parallel::sweep_seeds_serial(base, kSeeds, 24));
}

void BM_SweepParallel(benchmark::State& state) {
  const auto base = scenario::builtin_scenario("office");
  for (auto _ : state) benchmark::DoNotOptimize(parallel::sweep_seeds(base, kSeeds, 24));
  state.counters["threads"] = parallel::max_threads();
}

}  // namespace

BENCHMARK(BM_DeriveSerial)->Arg(1000)->Arg(100000);
BENCHMARK(BM_DeriveParallel)->Arg(1000)->Arg(100000);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
