#include <cmath>

#include "common.h"
#include "dyngraph/tasks/models.h"

DYNGRAPH_BEGIN_NAMESPACE
namespace tasks {

using namespace detail;

MetricsReport run_rnnlm(const TaskConfig& cfg, std::ostream& out) {
  require_serial(cfg);
  const auto data = load_split<Sentence>(cfg, read_sentences, [&] {
    return synth_rnnlm(pick(cfg.gen_train, 400), pick(cfg.gen_dev, 50), pick(cfg.gen_vocab, 10),
                       cfg.seed);
  });

  Vocab vocab = build_vocab(data.train, pick(cfg.unk_threshold, 1));
  const unsigned bos = vocab.add("<s>");
  const unsigned eos = vocab.add("</s>");
  auto encode = [&](const Sentence& s) {
    std::vector<unsigned> ids{bos};
    for (const auto& w : s) ids.push_back(vocab.id(w));
    ids.push_back(eos);
    return ids;
  };
  std::vector<std::vector<unsigned>> train, dev;
  for (const auto& s : data.train) train.push_back(encode(s));
  for (const auto& s : data.dev) dev.push_back(encode(s));
  const auto& eval = dev.empty() ? train : dev;

  Session run(cfg);
  LanguageModel lm(run.model, vocab.size(), pick(cfg.embed, 128), pick(cfg.hidden, 256));
  maybe_load(cfg, run.model);
  Trainer trainer(run.model, trainer_options(cfg, UpdateRule::kAdam));
  const unsigned batch = std::max(1u, cfg.batch_size);

  MetricsReport report;
  Shuffler shuffle(cfg.seed);
  auto order = iota(train.size());
  std::vector<std::vector<unsigned>> group;
  mark_startup(cfg, report, out);
  for (unsigned epoch = 1; epoch <= pick(cfg.epochs, 5); ++epoch) {
    shuffle(order);
    const auto t0 = Clock::now();
    double loss = 0;
    std::size_t tokens = 0;
    for (std::size_t i = 0; i < order.size(); i += batch) {
      run.cg.renew();
      Expression l;
      if (batch == 1) {
        l = lm.loss(run.cg, train[order[i]]);
        tokens += train[order[i]].size() - 1;
      } else {
        group.clear();
        for (std::size_t k = i; k < std::min(order.size(), i + batch); ++k) {
          group.push_back(train[order[k]]);
          tokens += group.back().size() - 1;
        }
        l = lm.batch_loss(run.cg, group, eos);
      }
      loss += l.scalar_value();
      l.backward();
      trainer.update();
    }
    const double secs = seconds_since(t0);

    double nll = 0;
    std::size_t predicted = 0;
    for (const auto& s : eval) {
      run.cg.renew();
      nll += lm.loss(run.cg, s).scalar_value();
      predicted += s.size() - 1;
    }
    emit_epoch(report,
               {epoch, loss / static_cast<double>(tokens),
                std::exp(nll / static_cast<double>(predicted)),
                static_cast<double>(tokens) / secs},
               out);
  }
  report.extras.emplace_back("vocab", vocab.size());
  finish(cfg, run.model, report);
  return report;
}

}  // namespace tasks
DYNGRAPH_END_NAMESPACE
