#include <benchmark/benchmark.h>

#include <vector>

#include "dyngraph/dyngraph.h"

using namespace dyngraph;

static void BM_PoolAllocate(benchmark::State& state) {
  Pool pool("bench", 64 * kMiB);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    if (pool.remaining() < n + Pool::kAlignment) pool.reset();
    benchmark::DoNotOptimize(pool.allocate(n));
  }
}
BENCHMARK(BM_PoolAllocate)->Arg(16)->Arg(1024);

// Construction only: renew plus N nodes, nothing evaluated.
static void BM_GraphConstruction(benchmark::State& state) {
  PoolSet pools = new_poolset(16, 16, 16);
  Model model(pools.parameters);
  auto W = model.add_parameters({32, 32});
  auto b = model.add_parameters({32});
  auto E = model.add_lookup_parameters(100, 32);
  ComputationGraph cg(pools);
  const int layers = static_cast<int>(state.range(0)) / 4;
  for (auto _ : state) {
    cg.renew();
    Expression h = lookup(cg, E, 7);
    for (int k = 0; k < layers; ++k) h = tanh(affine({parameter(cg, b), parameter(cg, W), h}));
    benchmark::DoNotOptimize(h);
  }
  state.SetItemsProcessed(state.iterations() * cg.size());
}
BENCHMARK(BM_GraphConstruction)->Arg(100)->Arg(1000);

static void BM_MlpTrainStep(benchmark::State& state) {
  const unsigned d = static_cast<unsigned>(state.range(0));
  PoolSet pools = new_poolset(16, 16, 16);
  Model model(pools.parameters);
  auto W1 = model.add_parameters({d, d});
  auto b1 = model.add_parameters({d});
  auto W2 = model.add_parameters({10, d});
  auto E = model.add_lookup_parameters(1000, d);
  Trainer trainer(model, TrainerOptions::defaults(UpdateRule::kSgd));
  ComputationGraph cg(pools);
  unsigned i = 0;
  for (auto _ : state) {
    cg.renew();
    auto h = tanh(affine({parameter(cg, b1), parameter(cg, W1), lookup(cg, E, i % 1000)}));
    auto loss = pickneglogsoftmax(parameter(cg, W2) * h, i % 10);
    benchmark::DoNotOptimize(loss.scalar_value());
    loss.backward();
    trainer.update();
    ++i;
  }
}
BENCHMARK(BM_MlpTrainStep)->Arg(64)->Arg(256);

static void BM_LstmStep(benchmark::State& state) {
  const unsigned h = static_cast<unsigned>(state.range(0));
  PoolSet pools = new_poolset(64, 64, 64);
  Model model(pools.parameters);
  RNNBuilder lstm(CellKind::kLstm, 1, h, h, model);
  ComputationGraph cg(pools);
  std::vector<real> x(h, real(0.1));
  for (auto _ : state) {
    cg.renew();
    auto s = lstm.initial_state(cg);
    for (int t = 0; t < 10; ++t) s = s.add_input(input(cg, Shape({h}), x));
    benchmark::DoNotOptimize(s.output().value());
  }
  state.SetItemsProcessed(state.iterations() * 10);
}
BENCHMARK(BM_LstmStep)->Arg(64)->Arg(256);

// Sixteen examples through one batched graph versus sixteen graphs.
static void BM_PairBatch(benchmark::State& state) {
  const bool batched = state.range(0) != 0;
  PoolSet pools = new_poolset(16, 16, 16);
  Model model(pools.parameters);
  auto E = model.add_lookup_parameters(50, 50);
  auto W = model.add_parameters({4, 100});
  auto b = model.add_parameters({4});
  Trainer trainer(model, TrainerOptions::defaults(UpdateRule::kSgd));
  ComputationGraph cg(pools);
  std::vector<unsigned> first(16), second(16), labels(16);
  for (unsigned i = 0; i < 16; ++i) {
    first[i] = (i * 3) % 50;
    second[i] = (i * 11) % 50;
    labels[i] = first[i] % 4;
  }
  for (auto _ : state) {
    if (batched) {
      cg.renew();
      auto x = concatenate({lookup_batch(cg, E, first), lookup_batch(cg, E, second)});
      auto loss = sum_batches(pickneglogsoftmax_batch(affine({parameter(cg, b), parameter(cg, W), x}), labels));
      loss.backward();
    } else {
      for (unsigned i = 0; i < 16; ++i) {
        cg.renew();
        auto x = concatenate({lookup(cg, E, first[i]), lookup(cg, E, second[i])});
        pickneglogsoftmax(affine({parameter(cg, b), parameter(cg, W), x}), labels[i]).backward();
      }
    }
    trainer.update();
  }
  state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(BM_PairBatch)->Arg(0)->Arg(1);

static void BM_TreeLstm(benchmark::State& state) {
  PoolSet pools = new_poolset(16, 16, 16);
  Model model(pools.parameters);
  WordIndex words{{"<unk>", 0}, {"good", 1}, {"bad", 2}, {"movie", 3}};
  TreeLSTMBuilder tree(model, words, 64, 64);
  ComputationGraph cg(pools);
  const Tree t = parse_tree("(2 (3 (2 good) (2 movie)) (1 (1 bad) (2 (2 movie) (2 good))))");
  for (auto _ : state) {
    cg.renew();
    benchmark::DoNotOptimize(tree.encode(cg, t).h.value());
  }
}
BENCHMARK(BM_TreeLstm);

BENCHMARK_MAIN();
