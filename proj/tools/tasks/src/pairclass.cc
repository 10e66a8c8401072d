#include <algorithm>

#include "common.h"
#include "dyngraph/parallel.h"
#include "dyngraph/tasks/models.h"

DYNGRAPH_BEGIN_NAMESPACE
namespace tasks {

using namespace detail;

MetricsReport run_pairclass(const TaskConfig& cfg, std::ostream& out) {
  if (cfg.workers > 1 && cfg.batch_size > 1)
    throw ConfigError("--workers > 1 trains one example at a time; drop --batch-size");
  const unsigned gen_classes = pick(cfg.classes, 4);
  const auto data = load_split<PairExample>(cfg, read_pairs, [&] {
    return synth_pairs(pick(cfg.gen_train, 1000), pick(cfg.gen_dev, 200), pick(cfg.gen_vocab, 50),
                       gen_classes, cfg.seed);
  });

  std::vector<std::vector<std::string>> tokens;
  unsigned classes = cfg.classes;
  for (const auto& p : data.train) {
    tokens.push_back({p.first, p.second});
    classes = std::max(classes, p.label + 1);
  }
  const Vocab vocab = build_vocab(tokens, pick(cfg.unk_threshold, 1));
  struct Encoded {
    std::vector<unsigned> first, second, label;
  };
  auto encode = [&](const std::vector<PairExample>& xs) {
    Encoded e;
    for (const auto& p : xs) {
      e.first.push_back(vocab.id(p.first));
      e.second.push_back(vocab.id(p.second));
      e.label.push_back(p.label);
    }
    return e;
  };
  const Encoded train = encode(data.train);
  const Encoded eval = encode(data.dev.empty() ? data.train : data.dev);

  Session run(cfg);
  PairClassifier model(run.model, vocab.size(), pick(cfg.embed, 50), classes);
  maybe_load(cfg, run.model);
  Trainer trainer(run.model, trainer_options(cfg, UpdateRule::kSgd));
  ParallelTrainer parallel(run.model, trainer, run.cg, cfg.workers);
  const unsigned batch = std::max(1u, cfg.batch_size);

  auto example_loss = [&](ComputationGraph& cg, std::size_t i) {
    return model.loss(cg, train.first[i], train.second[i], train.label[i]);
  };

  MetricsReport report;
  Shuffler shuffle(cfg.seed);
  auto order = iota(train.label.size());
  std::vector<unsigned> b1, b2, bl;
  mark_startup(cfg, report, out);
  for (unsigned epoch = 1; epoch <= pick(cfg.epochs, 10); ++epoch) {
    shuffle(order);
    const auto t0 = Clock::now();
    double loss = 0;
    if (batch == 1) {
      loss = parallel.train_epoch(order, example_loss);
    } else {
      for (std::size_t i = 0; i < order.size(); i += batch) {
        b1.clear();
        b2.clear();
        bl.clear();
        for (std::size_t k = i; k < std::min(order.size(), i + batch); ++k) {
          b1.push_back(train.first[order[k]]);
          b2.push_back(train.second[order[k]]);
          bl.push_back(train.label[order[k]]);
        }
        run.cg.renew();
        Expression l = model.batch_loss(run.cg, b1, b2, bl);
        loss += l.scalar_value();
        l.backward();
        trainer.update();
      }
    }
    const double secs = seconds_since(t0);

    std::size_t correct = 0;
    for (std::size_t i = 0; i < eval.label.size(); ++i) {
      run.cg.renew();
      correct += argmax(model.scores(run.cg, eval.first[i], eval.second[i]).value()) == eval.label[i];
    }
    const auto n = static_cast<double>(order.size());
    emit_epoch(report,
               {epoch, loss / n,
                static_cast<double>(correct) / static_cast<double>(eval.label.size()),
                2 * n / secs},
               out);
  }
  finish(cfg, run.model, report);
  return report;
}

}  // namespace tasks
DYNGRAPH_END_NAMESPACE
