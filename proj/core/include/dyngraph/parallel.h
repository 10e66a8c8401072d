#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "dyngraph/graph.h"
#include "dyngraph/params.h"
#include "dyngraph/trainers.h"

DYNGRAPH_BEGIN_NAMESPACE

// Builds the scalar loss of one datum on the given (already renewed) graph.
// Called concurrently from several threads, each with its own graph.
using LossCallback = std::function<Expression(ComputationGraph& cg, std::size_t datum)>;

// out = mean of the inputs. All spans must have out.size() elements.
void average_gradients(std::span<const std::span<const real>> inputs, std::span<real> out);

// Data-parallel online training against one shared model.
//
// `workers` counts every training context, the calling thread included, so
// workers == 1 is the plain serial loop. With W > 1 the caller plus W - 1
// threads pull datum indices from one shared counter. A thread writes its
// gradient into its own slot set and marks it filled; it blocks until the
// caller has consumed the slot before starting the next datum. After each of
// its own gradients the caller averages it with every filled slot, applies
// one trainer update and clears those slots. Parameter reads and writes are
// unsynchronized relaxed atomics.
class ParallelTrainer {
 public:
  // `cg` is the caller's graph. Worker pools copy the forward and backward
  // capacities of cg's pools. Throws ConfigError when W > 1 and the trainer
  // is in sparse mode.
  ParallelTrainer(Model& model, Trainer& trainer, ComputationGraph& cg, unsigned workers);
  ~ParallelTrainer();
  ParallelTrainer(const ParallelTrainer&) = delete;
  ParallelTrainer& operator=(const ParallelTrainer&) = delete;

  // One pass over `order`. Returns the summed loss. A throwing callback
  // surfaces as CallbackError carrying the datum index.
  double train_epoch(std::span<const std::size_t> order, const LossCallback& loss);

  unsigned workers() const { return workers_; }
  // Number of trainer updates applied so far.
  std::size_t updates() const { return updates_; }

 private:
  struct Worker;

  double train_serial(std::span<const std::size_t> order, const LossCallback& loss);
  // Averages the caller's gradient (when `own`) with the filled slots into
  // the model gradients, then updates.
  void consume(bool own);

  Model* model_;
  Trainer* trainer_;
  ComputationGraph* cg_;
  unsigned workers_;
  std::size_t updates_ = 0;
  std::vector<std::unique_ptr<Worker>> pool_;
};

DYNGRAPH_END_NAMESPACE
