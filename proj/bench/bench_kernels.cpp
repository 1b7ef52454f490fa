// Serial reference vs OpenMP for the three parallel kernels.

#include <benchmark/benchmark.h>

#include "hero/model.hpp"
#include "hero/reference.hpp"
#include "hero/stats.hpp"
#include "hero/synth.hpp"

using namespace hero;

namespace {

struct BatchSetup {
  std::vector<LingTree> trees;
  std::vector<const LingTree*> ptrs;
  EmbeddingTable table;
  ModelParams model;

  explicit BatchSetup(int n, int d = 32) : table(d) {
    Rng rng(1);
    synth::TreeShape shape;
    shape.num_edus = 5;
    for (int i = 0; i < n; ++i) trees.push_back(synth::random_tree(rng, shape));
    for (const auto& t : trees) ptrs.push_back(&t);
    table = synth::random_table(synth::default_vocab(), d, rng);
    model = ModelParams::init({SharingMode::LEVEL_SPECIFIC, AblationMode::FULL, d}, {}, rng);
  }
};

void BM_PredictBatchSerial(benchmark::State& state) {
  BatchSetup s(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(predict_batch_serial(s.model, s.ptrs, s.table));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PredictBatchOmp(benchmark::State& state) {
  BatchSetup s(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(predict_batch(s.model, s.ptrs, s.table));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_CorpusStatsSerial(benchmark::State& state) {
  auto docs = synth::arity_corpus(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(compute_corpus_stats_serial(docs));
}

void BM_CorpusStatsOmp(benchmark::State& state) {
  auto docs = synth::arity_corpus(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(compute_corpus_stats(docs));
}

struct GradSetup {
  LingTree tree;
  EmbeddingTable table{8};
  ModelParams model;
  std::vector<double> theta, analytic;

  GradSetup() {
    Rng rng(3);
    tree = synth::random_tree(rng);
    table = synth::random_table(synth::default_vocab(), 8, rng);
    model = ModelParams::init({SharingMode::UNIFIED, AblationMode::FULL, 8}, {}, rng);
    theta = model.params.flatten();
    analytic = loss_and_gradients(model, tree, table, 1).grads.flatten();
  }
};

void BM_FiniteDiffSerial(benchmark::State& state) {
  GradSetup s;
  ScalarFn f = reference::relative_loss_fn<long double>(s.model, s.tree, s.table, 1);
  for (auto _ : state) benchmark::DoNotOptimize(finite_diff_check_serial(f, s.theta, s.analytic));
}

void BM_FiniteDiffOmp(benchmark::State& state) {
  GradSetup s;
  ScalarFn f = reference::relative_loss_fn<long double>(s.model, s.tree, s.table, 1);
  for (auto _ : state) benchmark::DoNotOptimize(finite_diff_check(f, s.theta, s.analytic));
}

}  // namespace

BENCHMARK(BM_PredictBatchSerial)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PredictBatchOmp)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CorpusStatsSerial)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CorpusStatsOmp)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FiniteDiffSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FiniteDiffOmp)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
