#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <string>

#include "CLI11.hpp"
#include "dyngraph/error.h"
#include "dyngraph/tasks/tasks.h"

namespace dt = dyngraph::tasks;

namespace {

struct Flags {
  dt::TaskConfig cfg;
  std::string train, dev, save, load, trainer, sparse;
  double lr = std::numeric_limits<double>::quiet_NaN();
};

void add_data_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--seed", f.cfg.seed, "Random seed");
  cmd.add_option("--gen-train", f.cfg.gen_train, "Synthetic training size");
  cmd.add_option("--gen-dev", f.cfg.gen_dev, "Synthetic dev size");
  cmd.add_option("--gen-vocab", f.cfg.gen_vocab, "Synthetic vocabulary size");
  cmd.add_option("--gen-rare", f.cfg.gen_rare, "Tagger: fraction of one-off words")
      ->check(CLI::Range(0.0, 1.0));
  cmd.add_option("--classes", f.cfg.classes, "Number of classes (pairclass)");
}

void add_train_flags(CLI::App& cmd, Flags& f) {
  add_data_flags(cmd, f);
  cmd.add_option("--train", f.train, "Training file");
  cmd.add_option("--dev", f.dev, "Dev/test file");
  cmd.add_flag("--gen", f.cfg.gen, "Train on generated data instead of files");
  cmd.add_option("--epochs", f.cfg.epochs, "Epochs (0 = task default)");
  cmd.add_option("--batch-size", f.cfg.batch_size, "Minibatch size")->check(CLI::PositiveNumber);
  cmd.add_option("--trainer", f.trainer, "sgd, momentum, adagrad or adam");
  cmd.add_option("--lr", f.lr, "Learning rate");
  cmd.add_option("--sparse", f.sparse, "Sparse lookup updates: on or off")
      ->check(CLI::IsMember({"on", "off"}));
  cmd.add_option("--workers", f.cfg.workers, "Training contexts, 1 = serial");
  cmd.add_option("--mem", f.cfg.mem, "Pool memory in MiB: N or F,B,P");
  cmd.add_option("--save", f.save, "Write a checkpoint after training");
  cmd.add_option("--load", f.load, "Read a checkpoint before training");
  cmd.add_option("--threshold", f.cfg.threshold, "Early-stop threshold on |score|");
  cmd.add_option("--unk-threshold", f.cfg.unk_threshold,
                 "Minimum count to enter the word vocabulary");
  cmd.add_flag("--init-zero", f.cfg.init_zero, "Initialize every parameter to zero");
  cmd.add_option("--embed", f.cfg.embed, "Word embedding size");
  cmd.add_option("--hidden", f.cfg.hidden, "Hidden size");
  cmd.add_option("--mlp", f.cfg.mlp, "Tagger perceptron size");
  cmd.add_option("--char-embed", f.cfg.char_embed, "Char embedding size");
  cmd.add_option("--char-hidden", f.cfg.char_hidden, "Char LSTM hidden size");
}

void finalize(Flags& f) {
  auto& c = f.cfg;
  if (!f.train.empty()) c.train = f.train;
  if (!f.dev.empty()) c.dev = f.dev;
  if (!f.save.empty()) c.save = f.save;
  if (!f.load.empty()) c.load = f.load;
  if (!f.trainer.empty()) c.rule = dyngraph::parse_update_rule(f.trainer);
  if (!std::isnan(f.lr)) c.learning_rate = f.lr;
  if (!f.sparse.empty()) c.sparse = f.sparse == "on";
}

}  // namespace

int main(int argc, char** argv) {
  const auto start = std::chrono::steady_clock::now();
  CLI::App app{"Dynamic computation graph benchmarks"};
  app.require_subcommand(1);

  Flags flags;
  flags.cfg.start = start;
  for (const char* task : {"rnnlm", "tagger", "tagger-char", "treelstm", "pairclass", "earlystop"}) {
    auto* cmd = app.add_subcommand(task, std::string("Train and evaluate the ") + task + " task");
    add_train_flags(*cmd, flags);
  }

  std::string gen_task, out_train, out_dev;
  auto* gen = app.add_subcommand("gen", "Write a synthetic corpus for a task");
  gen->add_option("task", gen_task, "Task name")->required();
  gen->add_option("--out-train", out_train, "Training output file")->required();
  gen->add_option("--out-dev", out_dev, "Dev output file")->required();
  add_data_flags(*gen, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    finalize(flags);
    if (gen->parsed()) {
      flags.cfg.task = dt::parse_task(gen_task);
      dt::generate(flags.cfg, out_train, out_dev);
      return 0;
    }
    flags.cfg.task = dt::parse_task(app.get_subcommands().front()->get_name());
    const auto report = dt::run_task(flags.cfg, std::cout);
    for (const auto& [key, value] : report.extras) std::cout << key << '=' << value << '\n';
  } catch (const dyngraph::CallbackError& e) {
    std::cerr << "dyngraph: error on datum " << e.datum() << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "dyngraph: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
