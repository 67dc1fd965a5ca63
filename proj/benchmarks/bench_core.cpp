#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "cmosb/cmosb.hpp"
#include "cmosb/protocol.hpp"

using namespace cmosb;

namespace {

void BM_PaillierEncrypt(benchmark::State& state) {
  auto s = fed::make_scheme(fed::BackendKind::Paillier, 1, static_cast<int>(state.range(0)));
  double v = 0.25;
  for (auto _ : state) benchmark::DoNotOptimize(s->encrypt(v));
}
BENCHMARK(BM_PaillierEncrypt)->Arg(512)->Arg(1024);

void BM_PaillierAdd(benchmark::State& state) {
  auto s = fed::make_scheme(fed::BackendKind::Paillier, 1, static_cast<int>(state.range(0)));
  const auto a = s->encrypt(0.5), b = s->encrypt(-0.25);
  for (auto _ : state) benchmark::DoNotOptimize(s->add(a, b));
}
BENCHMARK(BM_PaillierAdd)->Arg(512)->Arg(1024);

void BM_PaillierDecrypt(benchmark::State& state) {
  auto s = fed::make_scheme(fed::BackendKind::Paillier, 1, static_cast<int>(state.range(0)));
  const auto a = s->encrypt(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(s->decrypt(a));
}
BENCHMARK(BM_PaillierDecrypt)->Arg(512)->Arg(1024);

void BM_SplitFinding(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto ds = data::generate_synthetic(n, 5, 5, 2, 1.0, 1);
  gbdt::BinnedMatrix bins(ds.features, gbdt::quantile_binning(ds.features, 32));
  auto scheme = fed::make_scheme(fed::BackendKind::Counting, 1);
  fed::ActiveParty active(bins, {0, 1, 2, 3, 4}, *scheme);
  fed::PassiveParty passive(bins, {5, 6, 7, 8, 9}, *scheme);
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::vector<gbdt::GradientPair> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = {ds.labels[i] ? -0.5 : 0.5, 0.25};
  passive.receive_gradients(active.encrypt_gradients(0, rows, g));
  for (auto _ : state) benchmark::DoNotOptimize(fed::split_finding(rows, active, &passive, {}, {}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SplitFinding)->Arg(1000)->Arg(10000);

void BM_SboTrain(benchmark::State& state) {
  auto ds = std::make_shared<data::Dataset>(data::generate_synthetic(2000, 5, 5, 2, 1.0, 7));
  const auto ctx = fed::TrainingContext::prepare(ds, {}, 1);
  fed::TrainingConfig c;
  c.federated_rounds = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fed::sbo_train(c, ctx, 2));
}
BENCHMARK(BM_SboTrain)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_ClusterInstances(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U;
  attack::SimilarityMatrix s(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) s.set(a, b, a == b ? 1.0 : U(rng));
  for (auto _ : state) benchmark::DoNotOptimize(attack::cluster_instances(s, 2));
}
BENCHMARK(BM_ClusterInstances)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_NonDominatedSort(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U;
  std::vector<moo::Objectives> pts(static_cast<std::size_t>(state.range(0)));
  for (auto& p : pts) p = {U(rng), U(rng), U(rng)};
  for (auto _ : state) benchmark::DoNotOptimize(moo::fast_non_dominated_sort(pts));
}
BENCHMARK(BM_NonDominatedSort)->Arg(40)->Arg(400);

void BM_Hypervolume3D(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U;
  std::vector<moo::Objectives> pts;
  for (int i = 0; i < state.range(0); ++i) {
    const double a = U(rng), b = U(rng), c = U(rng), s = a + b + c;
    pts.push_back({a / s, b / s, c / s});
  }
  const std::vector<double> z{1, 1, 1};
  for (auto _ : state) benchmark::DoNotOptimize(moo::hypervolume(pts, z));
}
BENCHMARK(BM_Hypervolume3D)->Arg(20)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
