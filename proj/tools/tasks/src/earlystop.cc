#include <limits>

#include "common.h"
#include "dyngraph/tasks/models.h"

DYNGRAPH_BEGIN_NAMESPACE
namespace tasks {

using namespace detail;

MetricsReport run_earlystop(const TaskConfig& cfg, std::ostream& out) {
  require_serial(cfg);
  if (!(cfg.threshold >= 0)) throw ConfigError("--threshold must be non-negative");
  const auto data = load_split<Document>(cfg, read_documents, [&] {
    return synth_documents(pick(cfg.gen_train, 500), pick(cfg.gen_dev, 200), cfg.seed);
  });

  std::vector<std::vector<std::string>> tokens;
  for (const auto& d : data.train) tokens.push_back(d.words);
  const Vocab vocab = build_vocab(tokens, pick(cfg.unk_threshold, 1));
  auto encode = [&](const std::vector<Document>& docs) {
    std::vector<std::vector<unsigned>> ids;
    for (const auto& d : docs) {
      ids.emplace_back();
      for (const auto& w : d.words) ids.back().push_back(vocab.id(w));
    }
    return ids;
  };
  const auto train = encode(data.train);
  const auto& eval_docs = data.dev.empty() ? data.train : data.dev;
  const auto eval = encode(eval_docs);

  Session run(cfg);
  EarlyStopClassifier model(run.model, vocab.size(), pick(cfg.embed, 50));
  maybe_load(cfg, run.model);
  Trainer trainer(run.model, trainer_options(cfg, UpdateRule::kSgd));
  const unsigned batch = std::max(1u, cfg.batch_size);

  // Accuracy and mean words read at a threshold.
  auto evaluate = [&](real threshold) {
    std::size_t correct = 0, read = 0;
    for (std::size_t i = 0; i < eval.size(); ++i) {
      run.cg.renew();
      const auto d = model.classify(run.cg, eval[i], threshold);
      correct += eval_docs[i].label * d.score > 0;
      read += d.words_read;
    }
    const auto n = static_cast<double>(eval.size());
    return std::pair{static_cast<double>(correct) / n, static_cast<double>(read) / n};
  };

  MetricsReport report;
  Shuffler shuffle(cfg.seed);
  auto order = iota(train.size());
  const unsigned epochs = pick(cfg.epochs, 10);
  mark_startup(cfg, report, out);
  for (unsigned epoch = 1; epoch <= epochs; ++epoch) {
    shuffle(order);
    const auto t0 = Clock::now();
    double loss = 0;
    std::size_t words = 0;
    for (std::size_t i = 0; i < order.size(); i += batch) {
      run.cg.renew();
      Expression l = model.loss(run.cg, train[order[i]], data.train[order[i]].label);
      words += train[order[i]].size();
      for (std::size_t k = i + 1; k < std::min(order.size(), i + batch); ++k) {
        l = l + model.loss(run.cg, train[order[k]], data.train[order[k]].label);
        words += train[order[k]].size();
      }
      loss += l.scalar_value();
      l.backward();
      trainer.update();
    }
    const double secs = seconds_since(t0);
    const auto [accuracy, read] = evaluate(static_cast<real>(cfg.threshold));
    emit_epoch(report,
               {epoch, loss / static_cast<double>(order.size()), accuracy,
                static_cast<double>(words) / secs},
               out);
    if (epoch == epochs) {
      const auto [full_accuracy, full_read] = evaluate(std::numeric_limits<real>::infinity());
      report.extras.emplace_back("words_read", read);
      report.extras.emplace_back("full_accuracy", full_accuracy);
      report.extras.emplace_back("full_words_read", full_read);
    }
  }
  finish(cfg, run.model, report);
  return report;
}

}  // namespace tasks
DYNGRAPH_END_NAMESPACE
