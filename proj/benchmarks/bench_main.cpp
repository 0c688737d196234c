#include <benchmark/benchmark.h>

#include "rcw/deciders.hpp"
#include "rcw/equivariance.hpp"
#include "rcw/fraisse.hpp"
#include "rcw/modelzoo.hpp"
#include "rcw/reductions.hpp"
#include "rcw/subgroups.hpp"
#include "rcw/verify.hpp"

namespace {

using namespace rcw;

// Subgroup classes are cached per degree, so only the first iteration pays for
// enumeration; the rest time the equivariance checks.
void BM_DecideRc(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const unsigned jobs = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(decide_local_rc(4, m, Mode::complete, jobs).kind);
}
BENCHMARK(BM_DecideRc)->Args({6, 1})->Args({7, 1})->Args({7, 8})->Args({8, 1})->Args({8, 8})->Unit(benchmark::kMillisecond);

void BM_EnumerateSubgroups(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_subgroups(d, SubgroupFilter::all).size());
}
BENCHMARK(BM_EnumerateSubgroups)->DenseRange(4, 7)->Unit(benchmark::kMillisecond);

void BM_VerifyCertificate(benchmark::State& state) {
  const Verdict v = decide_local_rc(4, 8, Mode::complete);
  const std::string text = serialize_certificate(*v.witness);
  for (auto _ : state) benchmark::DoNotOptimize(verify_certificate(text).accepted);
}
BENCHMARK(BM_VerifyCertificate)->Unit(benchmark::kMillisecond);

void BM_SubsumDivisors(benchmark::State& state) {
  const std::vector<int> sizes{9, 9, 3, 3, 3, 1, 1, 1, 9, 3, 1};
  for (auto _ : state) benchmark::DoNotOptimize(subsum_divisors(3, 3, sizes));
}
BENCHMARK(BM_SubsumDivisors);

void BM_Reduce(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto members = random_family(n, 40, 12345);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    OracleFamily fam{members, seeded_oracle(n, seed++)};
    benchmark::DoNotOptimize(reduce(n, fam).selection.assignments.size());
  }
}
BENCHMARK(BM_Reduce)->Arg(2)->Arg(3)->Arg(4)->Arg(6)->Unit(benchmark::kMicrosecond);

void BM_FraisseStage4(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_stages(2, 4).size());
}
BENCHMARK(BM_FraisseStage4)->Unit(benchmark::kMillisecond);

void BM_FraisseExtension(benchmark::State& state) {
  const FraisseStage s = build_stages(2, 4);
  for (auto _ : state) benchmark::DoNotOptimize(check_extension_property(s).misses.size());
}
BENCHMARK(BM_FraisseExtension)->Unit(benchmark::kMillisecond);

void BM_ZooEvaluate(benchmark::State& state) {
  ZooParams p;
  p.line_sizes = {3};
  const ZooModel m = make_model(ZooKind::vlines, p);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(m, ZooPrinciple::nrc_fin, n).holds_at_bound);
}
BENCHMARK(BM_ZooEvaluate)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
