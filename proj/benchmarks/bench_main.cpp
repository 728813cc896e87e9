#include <benchmark/benchmark.h>

#include "pseudointel/capabilities.hpp"
#include "pseudointel/distinction.hpp"
#include "pseudointel/evaluator_zoo.hpp"
#include "pseudointel/suite_io.hpp"

using namespace pseudointel;

namespace {

std::vector<SamplePair> draw(const Capability& mu, std::size_t m, std::uint64_t seed) {
  Rng rng = RandomSource(seed).child("bench").stream();
  std::vector<SamplePair> out;
  for (std::size_t i = 0; i < m; ++i) out.push_back(mu.sample(rng));
  return out;
}

void BM_Interaction(benchmark::State& state) {
  const auto mu = builtin_capability("tabular16");
  const auto e = learn_static_evaluator(draw(*mu, 32, 1), static_cast<std::size_t>(state.range(0)));
  const auto g = capability_as_blackbox(mu);
  std::uint64_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_interaction(*e, *g, RandomSource(7).child(k++), nullptr));
  }
}
BENCHMARK(BM_Interaction)->Arg(1)->Arg(8);

void BM_McDistinction(benchmark::State& state) {
  const auto mu = builtin_capability("tabular16");
  const auto e = learn_static_evaluator(draw(*mu, 32, 2), 1);
  const auto g = learn_memorizer(draw(*mu, 8, 3), Response("0"), nullptr);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        mc_distinction(*e, *g, mu, static_cast<std::size_t>(state.range(0)), 0.01, RandomSource(9), nullptr));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2);
}
BENCHMARK(BM_McDistinction)->Arg(1000)->Arg(10000);

void BM_LearnParity(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  std::vector<std::size_t> indices;
  for (std::size_t i = 1; i <= d; i += 2) indices.push_back(i);
  const auto mu = std::make_shared<ParityCapability>("p", d, indices);
  const auto samples = draw(*mu, 2 * d, 4);
  for (auto _ : state) benchmark::DoNotOptimize(learn_parity(samples, d, nullptr));
}
BENCHMARK(BM_LearnParity)->Arg(8)->Arg(32)->Arg(48);

}  // namespace

BENCHMARK_MAIN();
