// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails. Usage: dyngraph_acceptance <path to dyngraph CLI> [--only 3,4]
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fcntl.h>
#include <unistd.h>

#include "dyngraph/dyngraph.h"
#include "dyngraph/tasks/models.h"
#include "dyngraph/tasks/synth.h"
#include "dyngraph/tasks/tasks.h"
#include "dyngraph/tasks/vocab.h"
#include "outcome.h"

namespace fs = std::filesystem;
using namespace dyngraph;
using namespace dyngraph::tasks;
using accept::Outcome;
using Clock = std::chrono::steady_clock;

namespace {

std::string fmt(const char* f, auto... args) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Runs a task with its progress lines discarded.
MetricsReport run_quiet(TaskConfig cfg) {
  std::ostringstream sink;
  cfg.start = Clock::now();
  return run_task(cfg, sink);
}

TaskConfig config(Task task) {
  TaskConfig cfg;
  cfg.task = task;
  cfg.gen = true;
  return cfg;
}

double max_abs_diff(const MetricsReport& a, const MetricsReport& b, bool& same_roster) {
  same_roster = a.parameters.size() == b.parameters.size();
  double worst = 0;
  for (std::size_t i = 0; same_roster && i < a.parameters.size(); ++i) {
    const auto& x = a.parameters[i].second;
    const auto& y = b.parameters[i].second;
    if (a.parameters[i].first != b.parameters[i].first || x.size() != y.size()) {
      same_roster = false;
      break;
    }
    for (std::size_t k = 0; k < x.size(); ++k) worst = std::max(worst, double(std::fabs(x[k] - y[k])));
  }
  return worst;
}

// ---------------------------------------------------------------------------

Outcome sparse_updates() {
  std::string detail;
  bool ok = true;
  for (auto rule : {UpdateRule::kSgd, UpdateRule::kAdagrad}) {
    MetricsReport r[2];
    for (int sparse = 0; sparse < 2; ++sparse) {
      auto cfg = config(Task::kTagger);
      cfg.epochs = 2;
      cfg.rule = rule;
      cfg.sparse = sparse == 1;
      cfg.snapshot = true;
      r[sparse] = run_quiet(cfg);
    }
    bool roster = false;
    const double diff = max_abs_diff(r[0], r[1], roster);
    ok = ok && roster && diff <= 1e-6;
    detail += fmt("%s max |sparse - dense| = %.2e; ", update_rule_name(rule), diff);
  }

  // Adam: a word row touched by the first sentence but not the second.
  const auto data = synth_tagger(50, 0, 300, 0, 1).train;
  std::vector<Sentence> words;
  Vocab tags;
  for (const auto& s : data) {
    words.push_back(s.words);
    for (const auto& t : s.tags) tags.add(t);
  }
  const Vocab vocab = build_vocab(words, 1);
  std::set<std::string> second(data[1].words.begin(), data[1].words.end());
  std::string probe;
  for (const auto& w : data[0].words)
    if (!second.count(w)) probe = w;
  bool moved[2] = {false, false};
  bool changed_step1[2] = {false, false};
  for (int sparse = 0; sparse < 2; ++sparse) {
    PoolSet pools = new_poolset(32, 32, 32);
    Model model(pools.parameters, 1);
    Tagger tagger(model, vocab, tags.size(), Tagger::Dims{});
    LookupParameterStorage* table = nullptr;
    for (auto& l : model.lookup_parameters())
      if (l->name == "tag.E") table = l.get();
    auto o = TrainerOptions::defaults(UpdateRule::kAdam);
    o.sparse = sparse == 1;
    Trainer trainer(model, o);
    ComputationGraph cg(pools);
    auto row = [&] {
      auto r = table->row(vocab.id(probe));
      return std::vector<real>(r.begin(), r.end());
    };
    auto step = [&](const TaggedSentence& s) {
      std::vector<unsigned> ids;
      for (const auto& t : s.tags) ids.push_back(tags.id(t));
      cg.renew();
      tagger.loss(cg, s.words, ids).backward();
      trainer.update();
    };
    const auto before = row();
    step(data[0]);
    const auto after_first = row();
    step(data[1]);
    const auto after_second = row();
    changed_step1[sparse] = after_first != before;
    moved[sparse] =
        std::memcmp(after_first.data(), after_second.data(), after_first.size() * sizeof(real)) != 0;
  }
  const bool adam_ok = !probe.empty() && changed_step1[0] && changed_step1[1] && moved[0] && !moved[1];
  ok = ok && adam_ok;
  detail += fmt("adam untouched row: dense %s, sparse %s", moved[0] ? "moved" : "unchanged",
                moved[1] ? "moved" : "bitwise unchanged");
  return {ok, detail};
}

// ---------------------------------------------------------------------------

// Read with plain syscalls so the probe itself does not touch the heap.
long resident_pages() {
  char buf[128] = {};
  const int fd = ::open("/proc/self/statm", O_RDONLY);
  if (fd < 0) return -1;
  const auto n = ::read(fd, buf, sizeof buf - 1);
  ::close(fd);
  long size = 0, resident = -1;
  if (n > 0) std::sscanf(buf, "%ld %ld", &size, &resident);
  return resident;
}

Outcome arena_behavior() {
  PoolSet pools = new_poolset(8, 8, 8);
  Model model(pools.parameters, 2);
  auto E = model.add_lookup_parameters(50, 32, "E");
  auto W = model.add_parameters({32, 32}, "W");
  auto b = model.add_parameters({32}, "b");
  auto out_w = model.add_parameters({5, 32}, "out.W");
  Trainer trainer(model, TrainerOptions::defaults(UpdateRule::kSgd));
  ComputationGraph cg(pools);

  std::size_t nodes = 0;
  unsigned long long construction_allocs = 0, cycle_allocs = 0;
  // 1 lookup + 24 * (W, b, affine, tanh) + out.W + matmul + loss = 100 nodes.
  auto cycle = [&](unsigned i) {
    const auto a0 = accept::heap_allocations();
    cg.renew();
    Expression h = lookup(cg, E, i % 50);
    for (int k = 0; k < 24; ++k) h = tanh(affine({parameter(cg, b), parameter(cg, W), h}));
    Expression loss = pickneglogsoftmax(parameter(cg, out_w) * h, i % 5);
    const auto a1 = accept::heap_allocations();
    nodes = cg.size();
    loss.scalar_value();
    loss.backward();
    trainer.update();
    construction_allocs += a1 - a0;
    cycle_allocs += accept::heap_allocations() - a0;
  };

  cycle(0);
  resident_pages();  // the probe's own first call maps a few pages
  const long rss_warm = resident_pages();
  construction_allocs = cycle_allocs = 0;
  for (unsigned i = 1; i <= 10000; ++i) cycle(i);
  const long rss_end = resident_pages();

  bool exhausted = false;
  std::string message;
  {
    PoolSet tiny{Pool("forward", 4096), Pool("backward", 4096), Pool("parameters", 4096)};
    ComputationGraph small(tiny);
    try {
      Expression x = input(small, Shape({64}), std::vector<real>(64, 1));
      for (int k = 0; k < 64; ++k) x = tanh(x);
      x.value();
    } catch (const PoolExhausted& e) {
      exhausted = e.pool() == "forward";
      message = e.what();
    }
  }
  const bool ok = nodes == 100 && construction_allocs == 0 && cycle_allocs == 0 && rss_end == rss_warm &&
                  exhausted && message.find("--mem") != std::string::npos;
  return {ok, fmt("%zu-node graphs x 10000 cycles: %llu heap allocations during construction, %llu "
                  "in full cycles; resident pages %ld -> %ld; exhaustion: %s",
                  nodes, construction_allocs, cycle_allocs, rss_warm, rss_end,
                  exhausted ? "PoolExhausted" : "not raised")};
}

// ---------------------------------------------------------------------------

Outcome tree_models() {
  // Tree LSTM through the task runner.
  const auto t0 = Clock::now();
  const auto lstm = run_quiet(config(Task::kTreeLstm));
  const double lstm_secs = seconds_since(t0);
  unsigned lstm_epoch = 0;
  for (const auto& e : lstm.epochs)
    if (e.metric == 1.0 && lstm_epoch == 0) lstm_epoch = e.epoch;

  // Tree RNN with a softmax at the root, same data and trainer.
  const auto t1 = Clock::now();
  const auto trees = synth_trees(20, 0, 1).train;
  std::set<unsigned> shapes;
  WordIndex index{{"<unk>", 0}};
  std::function<void(const Tree&)> collect = [&](const Tree& t) {
    if (t.is_leaf()) index.emplace(t.label, static_cast<unsigned>(index.size()));
    for (const auto& c : t.children) collect(c);
  };
  for (const auto& t : trees) {
    collect(t);
    shapes.insert(static_cast<unsigned>(t.node_count()));
  }
  PoolSet pools = new_poolset(32, 32, 32);
  Model model(pools.parameters, 1);
  TreeRNNBuilder rnn(model, index, 128);
  auto W = model.add_parameters({5, 128}, "out.W");
  auto b = model.add_parameters({5}, "out.b");
  Trainer trainer(model, TrainerOptions::defaults(UpdateRule::kAdam));
  ComputationGraph cg(pools);
  auto scores = [&](const Tree& t) { return affine({parameter(cg, b), parameter(cg, W), rnn.encode(cg, t)}); };
  std::vector<std::size_t> order(trees.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937 rng(1);
  unsigned rnn_epoch = 0;
  for (unsigned epoch = 1; epoch <= 30 && rnn_epoch == 0; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (auto i : order) {
      cg.renew();
      pickneglogsoftmax(scores(trees[i]), trees[i].tag).backward();
      trainer.update();
    }
    unsigned right = 0;
    for (const auto& t : trees) {
      cg.renew();
      right += argmax(scores(t).value()) == static_cast<unsigned>(t.tag);
    }
    if (right == trees.size()) rnn_epoch = epoch;
  }
  const double rnn_secs = seconds_since(t1);
  const bool ok = lstm_epoch > 0 && rnn_epoch > 0 && lstm_secs < 60 && rnn_secs < 60;
  return {ok, fmt("20 trees, %zu distinct sizes; tree LSTM 100%% train accuracy at epoch %u (%.1f s); "
                  "tree RNN at epoch %u (%.1f s)",
                  shapes.size(), lstm_epoch, lstm_secs, rnn_epoch, rnn_secs)};
}

Outcome early_stopping() {
  const auto r = run_quiet(config(Task::kEarlystop));
  const double acc = r.final_metric(), full_acc = r.extra("full_accuracy");
  const double read = r.extra("words_read"), full_read = r.extra("full_words_read");
  const bool ok = read < full_read && std::fabs(acc - full_acc) <= 0.02;
  return {ok, fmt("threshold 2: %.2f words/doc at accuracy %.4f; full read: %.2f words/doc at %.4f", read,
                  acc, full_read, full_acc)};
}

Outcome uniform_perplexity() {
  auto cfg = config(Task::kRnnlm);
  cfg.init_zero = true;
  cfg.rule = UpdateRule::kSgd;
  cfg.learning_rate = 0.0;
  cfg.epochs = 1;
  const auto r = run_quiet(cfg);
  const double v = r.extra("vocab"), ppl = r.final_metric();
  const double rel = std::fabs(ppl - v) / v;
  return {rel <= 1e-3, fmt("dev perplexity %.6f vs |V| = %.0f (rel err %.1e)", ppl, v, rel)};
}

// ---------------------------------------------------------------------------

Outcome parallel_training() {
  // W = 1 against a hand-written serial loop.
  const auto data = synth_pairs(300, 0, 50, 4, 3).train;
  std::vector<Sentence> tokens;
  for (const auto& p : data) tokens.push_back({p.first, p.second});
  const Vocab vocab = build_vocab(tokens, 1);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  auto snapshot = [](const Model& m) {
    std::vector<real> out;
    for (auto& p : m.parameters()) out.insert(out.end(), p->values, p->values + p->size());
    for (auto& l : m.lookup_parameters()) out.insert(out.end(), l->values, l->values + l->size());
    return out;
  };
  std::vector<real> serial, pooled;
  double serial_loss = 0, pooled_loss = 0;
  for (int use_pool = 0; use_pool < 2; ++use_pool) {
    PoolSet pools = new_poolset(8, 8, 8);
    Model model(pools.parameters, 4);
    PairClassifier clf(model, vocab.size(), 50, 4);
    Trainer trainer(model, TrainerOptions::defaults(UpdateRule::kSgd));
    ComputationGraph cg(pools);
    auto loss = [&](ComputationGraph& g, std::size_t i) {
      return clf.loss(g, vocab.id(data[i].first), vocab.id(data[i].second), data[i].label);
    };
    double total = 0;
    if (use_pool) {
      ParallelTrainer pt(model, trainer, cg, 1);
      for (int e = 0; e < 3; ++e) total += pt.train_epoch(order, loss);
      pooled = snapshot(model);
      pooled_loss = total;
    } else {
      for (int e = 0; e < 3; ++e)
        for (auto i : order) {
          cg.renew();
          Expression l = loss(cg, i);
          total += l.scalar_value();
          l.backward();
          trainer.update();
        }
      serial = snapshot(model);
      serial_loss = total;
    }
  }
  const bool bitwise = serial.size() == pooled.size() &&
                       std::memcmp(serial.data(), pooled.data(), serial.size() * sizeof(real)) == 0 &&
                       serial_loss == pooled_loss;

  // W = 4 against W = 1 on the toy tasks with the same epoch budget.
  std::string detail = fmt("W=1 %s serial; ", bitwise ? "bitwise equals" : "DIFFERS from");
  bool close = true;
  for (auto task : {Task::kPairclass, Task::kTagger}) {
    double acc[2];
    for (int k = 0; k < 2; ++k) {
      auto cfg = config(task);
      cfg.workers = k == 0 ? 1 : 4;
      cfg.sparse = false;
      if (task == Task::kTagger) cfg.epochs = 5;
      acc[k] = run_quiet(cfg).final_metric();
    }
    close = close && std::fabs(acc[0] - acc[1]) <= 0.02;
    detail += fmt("%s accuracy W=1 %.4f, W=4 %.4f; ", task_name(task), acc[0], acc[1]);
  }

  std::vector<real> a{1, 3}, b{3, 5}, avg(2);
  std::vector<std::span<const real>> in{a, b};
  average_gradients(in, avg);
  const bool exact = avg[0] == 2 && avg[1] == 4;
  detail += fmt("average([1,3],[3,5]) = [%g,%g]", double(avg[0]), double(avg[1]));
  return {bitwise && close && exact, detail};
}

Outcome persistence() {
  const auto dir = fs::temp_directory_path() / "dyngraph_acceptance";
  fs::create_directories(dir);
  const auto path = dir / "model.bin";

  PoolSet pools = new_poolset(8, 8, 8);
  Model trained(pools.parameters, 1);
  PairClassifier clf(trained, 50, 50, 4);
  RNNBuilder extra(CellKind::kLstm, 2, 8, 6, trained, "lstm");
  {
    Trainer t(trained, TrainerOptions::defaults(UpdateRule::kAdam));
    ComputationGraph cg(pools);
    for (unsigned i = 0; i < 50; ++i) {
      cg.renew();
      clf.loss(cg, i, (i * 7) % 50, i % 4).backward();
      t.update();
    }
  }
  trained.save(path);

  PoolSet pools2 = new_poolset(8, 8, 8);
  Model twin(pools2.parameters, 99);
  PairClassifier clf2(twin, 50, 50, 4);
  RNNBuilder extra2(CellKind::kLstm, 2, 8, 6, twin, "lstm");
  twin.load(path);
  bool bitwise = trained.parameters().size() == twin.parameters().size();
  for (std::size_t i = 0; bitwise && i < trained.parameters().size(); ++i)
    bitwise = std::memcmp(trained.parameters()[i]->values, twin.parameters()[i]->values,
                          trained.parameters()[i]->size() * sizeof(real)) == 0;
  for (std::size_t i = 0; bitwise && i < trained.lookup_parameters().size(); ++i)
    bitwise = std::memcmp(trained.lookup_parameters()[i]->values, twin.lookup_parameters()[i]->values,
                          trained.lookup_parameters()[i]->size() * sizeof(real)) == 0;

  // A model without the LSTM, and one with a different embedding size.
  int rejected = 0;
  {
    PoolSet p = new_poolset(8, 8, 8);
    Model fewer(p.parameters, 1);
    PairClassifier c(fewer, 50, 50, 4);
    try {
      fewer.load(path);
    } catch (const RosterMismatch&) {
      ++rejected;
    }
  }
  {
    PoolSet p = new_poolset(8, 8, 8);
    Model other(p.parameters, 1);
    PairClassifier c(other, 50, 40, 4);
    RNNBuilder r(CellKind::kLstm, 2, 8, 6, other, "lstm");
    try {
      other.load(path);
    } catch (const RosterMismatch&) {
      ++rejected;
    }
  }
  fs::remove_all(dir);
  return {bitwise && rejected == 2, fmt("round trip %s; %d of 2 mismatched rosters rejected",
                                        bitwise ? "bitwise identical" : "NOT identical", rejected)};
}

Outcome learning_trends() {
  auto t0 = Clock::now();
  const auto lm = run_quiet(config(Task::kRnnlm));
  const double lm_secs = seconds_since(t0);
  t0 = Clock::now();
  const auto tagger = run_quiet(config(Task::kTagger));
  const double tag_secs = seconds_since(t0);
  const double ppl = lm.final_metric(), acc = tagger.final_metric();
  const bool ok = lm.epochs.size() == 5 && ppl < 1.5 && lm_secs < 180 && tagger.epochs.size() == 10 &&
                  acc >= 0.99 && tag_secs < 180;
  return {ok, fmt("rnnlm perplexity %.4f after %zu epochs (%.1f s); tagger accuracy %.4f after %zu epochs (%.1f s)",
                  ppl, lm.epochs.size(), lm_secs, acc, tagger.epochs.size(), tag_secs)};
}

Outcome output_format(const std::string& cli) {
  if (cli.empty() || !fs::exists(cli)) return {false, "CLI binary not found: '" + cli + "'"};
  const std::regex startup(R"(^startup_secs=[0-9]+\.[0-9]{6}$)");
  const std::regex epoch(R"(^epoch=([0-9]+) loss=-?[0-9]+\.[0-9]{6} metric=[0-9]+\.[0-9]{6} speed=[0-9]+\.[0-9]{2}$)");
  bool ok = true;
  std::string detail;
  for (const char* task : {"rnnlm", "tagger", "tagger-char", "treelstm", "pairclass", "earlystop"}) {
    const std::string cmd = "\"" + cli + "\" " + task + " --gen --epochs 2 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {false, "cannot run " + cmd};
    std::vector<std::string> lines;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe)) {
      std::string line(buf);
      while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
      lines.push_back(line);
    }
    const int status = pclose(pipe);
    bool task_ok = status == 0 && lines.size() >= 3 && std::regex_match(lines[0], startup);
    double startup_secs = task_ok ? std::stod(lines[0].substr(13)) : -1;
    for (unsigned e = 1; task_ok && e <= 2; ++e) {
      std::smatch m;
      task_ok = std::regex_match(lines[e], m, epoch) && std::stoul(m[1]) == e;
    }
    task_ok = task_ok && startup_secs < 2.0;
    ok = ok && task_ok;
    detail += fmt("%s startup %.3fs%s; ", task, startup_secs, task_ok ? "" : " (BAD)");
  }
  if (!detail.empty()) detail.resize(detail.size() - 2);
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("Acceptance suite");
  std::string cli;
  std::vector<int> only;
  app.add_option("cli", cli, "Path to the dyngraph command-line tool");
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "gradient suite", accept::gradient_suite},
      {2, "minibatch equivalence", accept::minibatch_equivalence},
      {3, "sparse updates", sparse_updates},
      {4, "arena", arena_behavior},
      {5, "dynamic tree structure", tree_models},
      {6, "early-stop flow control", early_stopping},
      {7, "uniform perplexity", uniform_perplexity},
      {8, "parallel trainer", parallel_training},
      {9, "persistence", persistence},
      {10, "learning trends", learning_trends},
      {11, "output format and startup", [&] { return output_format(cli); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s [%2d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
