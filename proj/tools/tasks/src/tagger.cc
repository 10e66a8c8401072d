#include <unordered_map>

#include "common.h"
#include "dyngraph/parallel.h"
#include "dyngraph/tasks/models.h"

DYNGRAPH_BEGIN_NAMESPACE
namespace tasks {

using namespace detail;

MetricsReport run_tagger(const TaskConfig& cfg, std::ostream& out) {
  const bool chars = cfg.task == Task::kTaggerChar;
  if (cfg.workers > 1 && cfg.batch_size > 1)
    throw ConfigError("--workers > 1 trains one sentence at a time; drop --batch-size");
  const auto data = load_split<TaggedSentence>(cfg, read_tagged, [&] {
    return synth_tagger(pick(cfg.gen_train, 500), pick(cfg.gen_dev, 100), pick(cfg.gen_vocab, 300),
                        cfg.gen_rare, cfg.seed);
  });

  std::vector<std::vector<std::string>> sentences;
  for (const auto& s : data.train) sentences.push_back(s.words);
  // Rare words fall back to chars in the char model, to <unk> otherwise.
  const Vocab words = build_vocab(sentences, pick(cfg.unk_threshold, chars ? 5 : 1));
  Vocab char_vocab;
  for (const auto& s : sentences)
    for (const auto& w : s)
      for (char c : w) char_vocab.add(std::string(1, c));

  std::unordered_map<std::string, unsigned> tag_ids;
  for (const auto& s : data.train)
    for (const auto& t : s.tags) tag_ids.try_emplace(t, static_cast<unsigned>(tag_ids.size()));
  const auto num_tags = static_cast<unsigned>(tag_ids.size());
  // Tags never seen in training get an id the model cannot predict.
  auto tag_seq = [&](const TaggedSentence& s) {
    std::vector<unsigned> ids;
    for (const auto& t : s.tags) {
      auto it = tag_ids.find(t);
      ids.push_back(it == tag_ids.end() ? num_tags : it->second);
    }
    return ids;
  };
  std::vector<std::vector<unsigned>> train_tags, dev_tags;
  for (const auto& s : data.train) train_tags.push_back(tag_seq(s));
  for (const auto& s : data.dev) dev_tags.push_back(tag_seq(s));
  const bool self_eval = data.dev.empty();
  const auto& eval = self_eval ? data.train : data.dev;
  const auto& eval_tags = self_eval ? train_tags : dev_tags;

  Session run(cfg);
  Tagger::Dims dims;
  dims.embed = pick(cfg.embed, 128);
  dims.hidden = pick(cfg.hidden, 50);
  dims.mlp = pick(cfg.mlp, 32);
  dims.char_embed = pick(cfg.char_embed, 20);
  dims.char_hidden = pick(cfg.char_hidden, 50);
  Tagger tagger(run.model, words, num_tags, dims, chars ? &char_vocab : nullptr);
  maybe_load(cfg, run.model);
  Trainer trainer(run.model, trainer_options(cfg, UpdateRule::kAdam));
  ParallelTrainer parallel(run.model, trainer, run.cg, cfg.workers);
  const unsigned batch = std::max(1u, cfg.batch_size);

  auto sentence_loss = [&](ComputationGraph& cg, std::size_t i) {
    return tagger.loss(cg, data.train[i].words, train_tags[i]);
  };

  MetricsReport report;
  Shuffler shuffle(cfg.seed);
  auto order = iota(data.train.size());
  mark_startup(cfg, report, out);
  for (unsigned epoch = 1; epoch <= pick(cfg.epochs, 10); ++epoch) {
    shuffle(order);
    const auto t0 = Clock::now();
    std::size_t tokens = 0;
    for (auto i : order) tokens += data.train[i].words.size();
    double loss = 0;
    if (batch == 1) {
      loss = parallel.train_epoch(order, sentence_loss);
    } else {
      for (std::size_t i = 0; i < order.size(); i += batch) {
        run.cg.renew();
        std::vector<Expression> parts;
        for (std::size_t k = i; k < std::min(order.size(), i + batch); ++k)
          parts.push_back(sentence_loss(run.cg, order[k]));
        Expression l = parts[0];
        for (std::size_t k = 1; k < parts.size(); ++k) l = l + parts[k];
        loss += l.scalar_value();
        l.backward();
        trainer.update();
      }
    }
    const double secs = seconds_since(t0);

    std::size_t correct = 0, total = 0, rare_correct = 0, rare_total = 0;
    for (std::size_t i = 0; i < eval.size(); ++i) {
      run.cg.renew();
      const auto pred = tagger.predict(run.cg, eval[i].words);
      for (std::size_t k = 0; k < pred.size(); ++k) {
        const bool ok = pred[k] == eval_tags[i][k];
        correct += ok;
        ++total;
        if (!words.contains(eval[i].words[k])) {
          rare_correct += ok;
          ++rare_total;
        }
      }
    }
    emit_epoch(report,
               {epoch, loss / static_cast<double>(tokens),
                static_cast<double>(correct) / static_cast<double>(total),
                static_cast<double>(tokens) / secs},
               out);
    if (epoch == pick(cfg.epochs, 10)) {
      report.extras.emplace_back("rare_tokens", static_cast<double>(rare_total));
      report.extras.emplace_back(
          "rare_accuracy",
          rare_total ? static_cast<double>(rare_correct) / static_cast<double>(rare_total) : 0.0);
    }
  }
  report.extras.emplace_back("updates", static_cast<double>(parallel.updates()));
  finish(cfg, run.model, report);
  return report;
}

}  // namespace tasks
DYNGRAPH_END_NAMESPACE
