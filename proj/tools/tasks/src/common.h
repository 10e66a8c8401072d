#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <random>
#include <vector>

#include "dyngraph/arena.h"
#include "dyngraph/error.h"
#include "dyngraph/graph.h"
#include "dyngraph/params.h"
#include "dyngraph/tasks/corpus.h"
#include "dyngraph/tasks/synth.h"
#include "dyngraph/tasks/tasks.h"
#include "dyngraph/trainers.h"

DYNGRAPH_BEGIN_NAMESPACE
namespace tasks::detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

inline unsigned pick(unsigned value, unsigned fallback) { return value ? value : fallback; }

// Pools, model and graph for one run. Member order is construction order.
struct Session {
  explicit Session(const TaskConfig& cfg);

  PoolSet pools;
  Model model;
  ComputationGraph cg;
};

// Trainer settings from the flags. Rejects --sparse on with several workers.
TrainerOptions trainer_options(const TaskConfig& cfg, UpdateRule fallback);

// Throws ConfigError unless the task accepts --workers > 1.
void require_serial(const TaskConfig& cfg);

// Loads a checkpoint when --load was given.
void maybe_load(const TaskConfig& cfg, Model& model);
// Saves when --save was given and copies parameters when cfg.snapshot.
void finish(const TaskConfig& cfg, const Model& model, MetricsReport& report);

std::vector<std::size_t> iota(std::size_t n);

// Reads --train/--dev, or calls `synth` under --gen.
template <class T, class Reader, class Synth>
Split<T> load_split(const TaskConfig& cfg, Reader read, Synth synth) {
  if (!cfg.train) {
    if (!cfg.gen) throw ConfigError("give --train (and optionally --dev) or --gen");
    return synth();
  }
  Split<T> out;
  auto in = open_input(*cfg.train);
  out.train = read(in);
  if (cfg.dev) {
    auto din = open_input(*cfg.dev);
    out.dev = read(din);
  }
  if (out.train.empty()) throw EmptyList("training file '" + cfg.train->string() + "' is empty");
  return out;
}

// Emits startup_secs once, right before the first training example.
void mark_startup(const TaskConfig& cfg, MetricsReport& report, std::ostream& out);
void emit_epoch(MetricsReport& report, const EpochRecord& rec, std::ostream& out);

// Shuffles the training order once per epoch.
class Shuffler {
 public:
  explicit Shuffler(std::uint64_t seed) : rng_(seed) {}
  void operator()(std::vector<std::size_t>& order);

 private:
  std::mt19937_64 rng_;
};

}  // namespace tasks::detail
DYNGRAPH_END_NAMESPACE
