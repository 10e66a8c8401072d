#include <algorithm>

#include "common.h"
#include "dyngraph/tasks/models.h"

DYNGRAPH_BEGIN_NAMESPACE
namespace tasks {

using namespace detail;

namespace {

void leaves(const Tree& t, std::vector<std::string>& out) {
  if (t.is_leaf()) {
    out.push_back(t.label);
    return;
  }
  for (const auto& c : t.children) leaves(c, out);
}

}  // namespace

MetricsReport run_treelstm(const TaskConfig& cfg, std::ostream& out) {
  require_serial(cfg);
  const auto data = load_split<LabeledTree>(cfg, read_trees, [&] {
    return synth_trees(pick(cfg.gen_train, 20), cfg.gen_dev, cfg.seed);
  });

  std::vector<std::vector<std::string>> tokens(data.train.size());
  int max_label = 4;
  for (std::size_t i = 0; i < data.train.size(); ++i) {
    leaves(data.train[i], tokens[i]);
    max_label = std::max(max_label, data.train[i].tag);
  }
  const Vocab vocab = build_vocab(tokens, pick(cfg.unk_threshold, 1));
  WordIndex index;
  for (unsigned i = 0; i < vocab.size(); ++i) index.emplace(vocab.token(i), i);
  const auto& eval = data.dev.empty() ? data.train : data.dev;

  Session run(cfg);
  TreeClassifier model(run.model, index, pick(cfg.embed, 128), pick(cfg.hidden, 128),
                       pick(cfg.classes, static_cast<unsigned>(max_label + 1)));
  maybe_load(cfg, run.model);
  Trainer trainer(run.model, trainer_options(cfg, UpdateRule::kAdam));
  const unsigned batch = std::max(1u, cfg.batch_size);

  MetricsReport report;
  Shuffler shuffle(cfg.seed);
  auto order = iota(data.train.size());
  mark_startup(cfg, report, out);
  for (unsigned epoch = 1; epoch <= pick(cfg.epochs, 30); ++epoch) {
    shuffle(order);
    const auto t0 = Clock::now();
    double loss = 0;
    for (std::size_t i = 0; i < order.size(); i += batch) {
      run.cg.renew();
      Expression l = model.loss(run.cg, data.train[order[i]]);
      for (std::size_t k = i + 1; k < std::min(order.size(), i + batch); ++k)
        l = l + model.loss(run.cg, data.train[order[k]]);
      loss += l.scalar_value();
      l.backward();
      trainer.update();
    }
    const double secs = seconds_since(t0);

    std::size_t correct = 0;
    for (const auto& t : eval) {
      run.cg.renew();
      correct += argmax(model.scores(run.cg, t).value()) == static_cast<unsigned>(t.tag);
    }
    const auto n = static_cast<double>(order.size());
    emit_epoch(report,
               {epoch, loss / n, static_cast<double>(correct) / static_cast<double>(eval.size()),
                n / secs},
               out);
  }
  finish(cfg, run.model, report);
  return report;
}

}  // namespace tasks
DYNGRAPH_END_NAMESPACE
