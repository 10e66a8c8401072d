// Minibatch equivalence, in the precision the tools ship with.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "dyngraph/dyngraph.h"
#include "dyngraph/tasks/models.h"
#include "dyngraph/tasks/synth.h"
#include "dyngraph/tasks/vocab.h"
#include "outcome.h"

namespace accept {

using namespace dyngraph;
using namespace dyngraph::tasks;

namespace {

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

}  // namespace

Outcome minibatch_equivalence() {
  constexpr double kTol = 1e-5;
  PoolSet pools = new_poolset(64, 64, 64);
  ComputationGraph cg(pools);
  double worst_pair = 0, worst_lm = 0;

  // Two-word classifier: sum_batches of the batched loss against the sum of
  // per-example losses.
  {
    Model model(pools.parameters, 3);
    const auto data = synth_pairs(64, 0, 50, 4, 9).train;
    std::vector<Sentence> tokens;
    for (const auto& p : data) tokens.push_back({p.first, p.second});
    const Vocab vocab = build_vocab(tokens, 1);
    PairClassifier clf(model, vocab.size(), 50, 4);
    for (unsigned batch : {1u, 4u, 16u}) {
      for (std::size_t i = 0; i + batch <= data.size(); i += batch) {
        std::vector<unsigned> a, b, y;
        double looped = 0;
        for (std::size_t k = i; k < i + batch; ++k) {
          a.push_back(vocab.id(data[k].first));
          b.push_back(vocab.id(data[k].second));
          y.push_back(data[k].label);
          cg.renew();
          looped += clf.loss(cg, a.back(), b.back(), y.back()).scalar_value();
        }
        cg.renew();
        const double batched = clf.batch_loss(cg, a, b, y).scalar_value();
        worst_pair = std::max(worst_pair, std::fabs(batched - looped));
      }
    }
  }

  // Language model: per-step batched losses under padding and masking
  // against each sentence run on its own.
  {
    Model model(pools.parameters, 4);
    const unsigned vocab = 12, pad = 11;
    LanguageModel lm(model, vocab, 16, 24);
    std::mt19937 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<std::vector<unsigned>> batch(1 + rng() % 6);
      for (auto& s : batch) {
        s.push_back(10);
        for (unsigned t = 0, n = 1 + rng() % 8; t < n; ++t) s.push_back(rng() % 10);
        s.push_back(pad);
      }
      cg.renew();
      auto steps = lm.batch_step_losses(cg, batch, pad);
      std::vector<std::vector<real>> got;
      for (auto& e : steps) got.push_back(e.value().to_vector());
      for (std::size_t b = 0; b < batch.size(); ++b) {
        cg.renew();
        auto own = lm.step_losses(cg, batch[b]);
        for (std::size_t t = 0; t < steps.size(); ++t) {
          const double want = t < own.size() ? own[t].scalar_value() : 0.0;
          worst_lm = std::max(worst_lm, std::fabs(got[t][b] - want));
        }
      }
    }
  }
  return {worst_pair <= kTol && worst_lm <= kTol,
          fmt("pairclass B in {1,4,16}: max |batched - looped| = %.2e; rnnlm masked steps: %.2e (tol %.0e)",
              worst_pair, worst_lm, kTol)};
}

}  // namespace accept
