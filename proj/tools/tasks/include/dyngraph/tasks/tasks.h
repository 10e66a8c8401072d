#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dyngraph/config.h"
#include "dyngraph/trainers.h"

DYNGRAPH_BEGIN_NAMESPACE
namespace tasks {

enum class Task { kRnnlm, kTagger, kTaggerChar, kTreeLstm, kPairclass, kEarlystop };

Task parse_task(std::string_view name);
const char* task_name(Task task);

struct TaskConfig {
  Task task = Task::kPairclass;

  // Data files. Without --train the synthetic generator is used.
  std::optional<std::filesystem::path> train, dev;
  bool gen = false;
  // Synthetic corpus sizes; 0 picks the task default.
  unsigned gen_train = 0, gen_dev = 0, gen_vocab = 0;
  // Tagger only: fraction of one-off words in generated data.
  double gen_rare = 0;

  unsigned epochs = 0;  // 0 = task default
  unsigned batch_size = 1;
  std::optional<UpdateRule> rule;
  std::optional<double> learning_rate;
  // Unset = on for a single worker, off otherwise.
  std::optional<bool> sparse;
  unsigned workers = 1;
  std::string mem = "128";
  std::uint64_t seed = 1;
  std::optional<std::filesystem::path> save, load;
  // Early-stop inference threshold on |score|.
  double threshold = 2.0;
  // Minimum token count to enter the word vocabulary; 0 = task default.
  unsigned unk_threshold = 0;
  bool init_zero = false;

  // Model sizes; 0 = task default.
  unsigned embed = 0, hidden = 0, mlp = 0, char_embed = 0, char_hidden = 0;
  unsigned classes = 0;

  // Keep a copy of every parameter after training in the report.
  bool snapshot = false;
  // Program start, for startup_secs.
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

struct EpochRecord {
  unsigned epoch = 0;
  double loss = 0;
  double metric = 0;
  double speed = 0;
};

struct MetricsReport {
  double startup_secs = 0;
  std::vector<EpochRecord> epochs;
  // Task specific extras, e.g. words read per document or rare-word accuracy.
  std::vector<std::pair<std::string, double>> extras;
  // Filled when TaskConfig::snapshot is set: (name, values) per parameter
  // and lookup table, lookup tables row-major.
  std::vector<std::pair<std::string, std::vector<real>>> parameters;

  double final_metric() const { return epochs.empty() ? 0 : epochs.back().metric; }
  double extra(std::string_view key) const;
};

// Runs one task and writes the progress lines to `out`:
//   startup_secs=<f>
//   epoch=<n> loss=<f> metric=<f> speed=<f>
// metric is dev perplexity for rnnlm and accuracy in [0, 1] otherwise. speed
// is training words per second, sentences per second for treelstm.
MetricsReport run_task(const TaskConfig& cfg, std::ostream& out);

MetricsReport run_rnnlm(const TaskConfig& cfg, std::ostream& out);
MetricsReport run_tagger(const TaskConfig& cfg, std::ostream& out);
MetricsReport run_treelstm(const TaskConfig& cfg, std::ostream& out);
MetricsReport run_pairclass(const TaskConfig& cfg, std::ostream& out);
MetricsReport run_earlystop(const TaskConfig& cfg, std::ostream& out);

// Writes synthetic train and dev files for a task.
void generate(const TaskConfig& cfg, const std::filesystem::path& train_out,
              const std::filesystem::path& dev_out);

}  // namespace tasks
DYNGRAPH_END_NAMESPACE
