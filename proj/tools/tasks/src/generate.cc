#include <fstream>

#include "common.h"

DYNGRAPH_BEGIN_NAMESPACE
namespace tasks {

using namespace detail;

namespace {

template <class T, class Writer>
void write_split(const Split<T>& data, Writer write, const std::filesystem::path& train_out,
                 const std::filesystem::path& dev_out) {
  auto tr = open_output(train_out);
  write(tr, data.train);
  auto dv = open_output(dev_out);
  write(dv, data.dev);
  if (!tr || !dv) throw FileError("failed writing generated corpus");
}

}  // namespace

void generate(const TaskConfig& cfg, const std::filesystem::path& train_out,
              const std::filesystem::path& dev_out) {
  switch (cfg.task) {
    case Task::kRnnlm:
      write_split(synth_rnnlm(pick(cfg.gen_train, 400), pick(cfg.gen_dev, 50),
                              pick(cfg.gen_vocab, 10), cfg.seed),
                  write_sentences, train_out, dev_out);
      return;
    case Task::kTagger:
    case Task::kTaggerChar:
      write_split(synth_tagger(pick(cfg.gen_train, 500), pick(cfg.gen_dev, 100),
                               pick(cfg.gen_vocab, 300), cfg.gen_rare, cfg.seed),
                  write_tagged, train_out, dev_out);
      return;
    case Task::kTreeLstm:
      write_split(synth_trees(pick(cfg.gen_train, 20), pick(cfg.gen_dev, 20), cfg.seed),
                  write_trees, train_out, dev_out);
      return;
    case Task::kPairclass:
      write_split(synth_pairs(pick(cfg.gen_train, 1000), pick(cfg.gen_dev, 200),
                              pick(cfg.gen_vocab, 50), pick(cfg.classes, 4), cfg.seed),
                  write_pairs, train_out, dev_out);
      return;
    case Task::kEarlystop:
      write_split(synth_documents(pick(cfg.gen_train, 500), pick(cfg.gen_dev, 200), cfg.seed),
                  write_documents, train_out, dev_out);
      return;
  }
}

}  // namespace tasks
DYNGRAPH_END_NAMESPACE
