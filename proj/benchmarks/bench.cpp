#include <benchmark/benchmark.h>

#include "forge/block.hpp"
#include "forge/code.hpp"
#include "forge/hierarchy.hpp"
#include "forge/rng.hpp"
#include "forge/sequence.hpp"

using namespace forge;

namespace {

Block random_block(std::size_t len, std::uint32_t N, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint8_t> syms(len);
  for (auto& s : syms) s = static_cast<std::uint8_t>(rng.below(N));
  return Block(syms, N);
}

void BM_MobiusSieve(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mobius(n));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_MobiusSieve)->Arg(100000)->Arg(1000000);

void BM_CorrelationTest(benchmark::State& state) {
  const std::uint64_t N_k = static_cast<std::uint64_t>(state.range(0));
  const std::uint64_t m = 6;
  TestSequence y = mobius(correlation_required_length(m, N_k) + 1);
  CodeFamily F = enumerate_codes(2, 1);
  Block B = random_block(N_k, 2, 7);
  for (auto _ : state) {
    double ma = 0.0;
    benchmark::DoNotOptimize(correlation_test(B, y, F, 0.45, m, N_k, &ma));
  }
}
BENCHMARK(BM_CorrelationTest)->Arg(64)->Arg(256);

void BM_CodeApply(benchmark::State& state) {
  const std::size_t len = static_cast<std::size_t>(state.range(0));
  CodeFamily F = enumerate_codes(2, 2);
  const Code& f = F.codes.back();
  Block B = random_block(len, 2, 11);
  for (auto _ : state) benchmark::DoNotOptimize(f.apply(B));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(len));
}
BENCHMARK(BM_CodeApply)->Arg(1024)->Arg(65536);

void BM_FreqCount(benchmark::State& state) {
  Block C = random_block(static_cast<std::size_t>(state.range(0)), 2, 13);
  Block D = Block::from_symbols({0, 1, 1}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(freq(C, D));
}
BENCHMARK(BM_FreqCount)->Arg(1024)->Arg(65536);

}  // namespace

BENCHMARK_MAIN();
