// Serial oracles against the OpenMP engines on the same seeded operands.

#include <benchmark/benchmark.h>

#include <random>

#include "rpbf/cgemm.hpp"
#include "rpbf/metrics.hpp"
#include "rpbf/quantpack.hpp"
#include "rpbf/reference.hpp"
#include "rpbf/synthetic.hpp"

namespace {

using namespace rpbf;

void set_counters(benchmark::State& state, const GemmProblem& p) {
  state.counters["ops/s"] = benchmark::Counter(static_cast<double>(useful_ops(p)) * state.iterations(),
                                               benchmark::Counter::kIsRate);
}

GemmProblem cube(Precision precision, std::int64_t n) {
  GemmProblem p;
  p.m = p.n = p.k = static_cast<std::size_t>(n);
  p.precision = precision;
  p.k_pad = precision == Precision::one_bit ? packing_pad(p.k) : 0;
  return p;
}

void BM_half_oracle(benchmark::State& state) {
  const auto p = cube(Precision::half, state.range(0));
  std::mt19937_64 rng(1);
  const auto a = random_half_matrix(p.m, p.k, rng);
  const auto b = random_half_matrix(p.k, p.n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(oracle_cgemm_double(a, b));
  set_counters(state, p);
}

void BM_half_engine(benchmark::State& state) {
  const auto p = cube(Precision::half, state.range(0));
  std::mt19937_64 rng(1);
  const auto a = random_half_matrix(p.m, p.k, rng);
  const auto b = random_half_matrix(p.k, p.n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(gemm_half(a, b));
  set_counters(state, p);
}

void BM_onebit_oracle(benchmark::State& state) {
  const auto p = cube(Precision::one_bit, state.range(0));
  std::mt19937_64 rng(2);
  const auto a = random_bit_matrix(p.m, p.k, rng);
  const auto b = random_bit_matrix(p.n, p.k, rng);
  for (auto _ : state) benchmark::DoNotOptimize(oracle_cgemm_onebit(a, b));
  set_counters(state, p);
}

template <BitOp Op>
void BM_onebit_engine(benchmark::State& state) {
  const auto p = cube(Precision::one_bit, state.range(0));
  std::mt19937_64 rng(2);
  const auto a = random_bit_matrix(p.m, p.k, rng);
  const auto b = random_bit_matrix(p.n, p.k, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gemm_onebit(std::span(&a, 1), std::span(&b, 1), Op, default_tile_config(p.precision)));
  }
  set_counters(state, p);
}

void BM_pack_transpose(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  const auto x = random_float_matrix(n, n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(quantize_to_bits_transposed(x));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(x.size() * 2 * sizeof(float)));
}

}  // namespace

BENCHMARK(BM_half_oracle)->RangeMultiplier(2)->Range(64, 256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_half_engine)->RangeMultiplier(2)->Range(64, 1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_onebit_oracle)->RangeMultiplier(2)->Range(64, 256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_onebit_engine<BitOp::xor_>)->RangeMultiplier(2)->Range(64, 2048)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_onebit_engine<BitOp::and_>)->RangeMultiplier(2)->Range(64, 2048)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_pack_transpose)->RangeMultiplier(4)->Range(256, 4096)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
