#include "common.h"

#include <cinttypes>
#include <cstdio>
#include <numeric>

#include "dyngraph/error.h"

DYNGRAPH_BEGIN_NAMESPACE
namespace tasks {

namespace detail {

namespace {

InitMode init_mode(const TaskConfig& cfg) {
  return cfg.init_zero ? InitMode::kZero : InitMode::kDefault;
}

}  // namespace

Session::Session(const TaskConfig& cfg)
    : pools(new_poolset(parse_mem_flag(cfg.mem))), model(pools.parameters, cfg.seed), cg(pools) {
  model.set_init_mode(init_mode(cfg));
}

TrainerOptions trainer_options(const TaskConfig& cfg, UpdateRule fallback) {
  TrainerOptions opts = TrainerOptions::defaults(cfg.rule.value_or(fallback));
  if (cfg.learning_rate) {
    if (!(*cfg.learning_rate >= 0)) throw ConfigError("--lr must be non-negative");
    opts.learning_rate = static_cast<real>(*cfg.learning_rate);
  }
  if (cfg.workers == 0) throw ConfigError("--workers must be at least 1");
  if (cfg.workers > 1 && cfg.sparse.value_or(false))
    throw ConfigError("--sparse on cannot be combined with --workers > 1");
  opts.sparse = cfg.sparse.value_or(cfg.workers == 1);
  return opts;
}

void require_serial(const TaskConfig& cfg) {
  if (cfg.workers > 1)
    throw ConfigError(std::string("--workers > 1 is only supported for pairclass and tagger, not ") +
                      task_name(cfg.task));
}

void maybe_load(const TaskConfig& cfg, Model& model) {
  if (cfg.load) model.load(*cfg.load);
}

void finish(const TaskConfig& cfg, const Model& model, MetricsReport& report) {
  if (cfg.save) model.save(*cfg.save);
  if (!cfg.snapshot) return;
  for (const auto& p : model.parameters())
    report.parameters.emplace_back(p->name, std::vector<real>(p->values, p->values + p->size()));
  for (const auto& lp : model.lookup_parameters())
    report.parameters.emplace_back(lp->name,
                                   std::vector<real>(lp->values, lp->values + lp->size()));
}

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

void mark_startup(const TaskConfig& cfg, MetricsReport& report, std::ostream& out) {
  report.startup_secs = seconds_since(cfg.start);
  char buf[64];
  std::snprintf(buf, sizeof buf, "startup_secs=%.6f\n", report.startup_secs);
  out << buf << std::flush;
}

void emit_epoch(MetricsReport& report, const EpochRecord& rec, std::ostream& out) {
  report.epochs.push_back(rec);
  char buf[160];
  std::snprintf(buf, sizeof buf, "epoch=%u loss=%.6f metric=%.6f speed=%.2f\n", rec.epoch,
                rec.loss, rec.metric, rec.speed);
  out << buf << std::flush;
}

void Shuffler::operator()(std::vector<std::size_t>& order) {
  // Fisher-Yates with an explicit modulus so the order does not depend on
  // the standard library's distribution implementation.
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = rng_() % i;
    std::swap(order[i - 1], order[j]);
  }
}

}  // namespace detail

Task parse_task(std::string_view name) {
  if (name == "rnnlm") return Task::kRnnlm;
  if (name == "tagger") return Task::kTagger;
  if (name == "tagger-char") return Task::kTaggerChar;
  if (name == "treelstm") return Task::kTreeLstm;
  if (name == "pairclass") return Task::kPairclass;
  if (name == "earlystop") return Task::kEarlystop;
  throw ConfigError("unknown task '" + std::string(name) +
                    "' (expected rnnlm, tagger, tagger-char, treelstm, pairclass or earlystop)");
}

const char* task_name(Task task) {
  switch (task) {
    case Task::kRnnlm: return "rnnlm";
    case Task::kTagger: return "tagger";
    case Task::kTaggerChar: return "tagger-char";
    case Task::kTreeLstm: return "treelstm";
    case Task::kPairclass: return "pairclass";
    case Task::kEarlystop: return "earlystop";
  }
  return "?";
}

double MetricsReport::extra(std::string_view key) const {
  for (const auto& [k, v] : extras)
    if (k == key) return v;
  throw ConfigError("report has no entry '" + std::string(key) + "'");
}

MetricsReport run_task(const TaskConfig& cfg, std::ostream& out) {
  switch (cfg.task) {
    case Task::kRnnlm: return run_rnnlm(cfg, out);
    case Task::kTagger:
    case Task::kTaggerChar: return run_tagger(cfg, out);
    case Task::kTreeLstm: return run_treelstm(cfg, out);
    case Task::kPairclass: return run_pairclass(cfg, out);
    case Task::kEarlystop: return run_earlystop(cfg, out);
  }
  throw ConfigError("unknown task");
}

}  // namespace tasks
DYNGRAPH_END_NAMESPACE
