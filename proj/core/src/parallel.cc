#include "dyngraph/parallel.h"

#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "dyngraph/error.h"

DYNGRAPH_BEGIN_NAMESPACE

void average_gradients(std::span<const std::span<const real>> inputs, std::span<real> out) {
  if (inputs.empty()) throw EmptyList("average_gradients needs at least one input");
  for (const auto& in : inputs)
    if (in.size() != out.size()) throw LengthMismatch("gradient sizes differ");
  const std::size_t k = inputs.size();
  for (std::size_t i = 0; i < out.size(); ++i) {
    real s = 0;
    for (const auto& in : inputs) s += in[i];
    out[i] = k == 1 ? s : s / static_cast<real>(k);
  }
}

struct ParallelTrainer::Worker {
  Worker(const Model& model, const PoolSet& like)
      : pools(new_poolset(MemorySplit{like.forward.capacity(), like.backward.capacity(),
                                      gradient_slot_bytes(model)})),
        cg(pools),
        slots(model, pools.parameters) {
    cg.set_gradient_slots(&slots);
    cg.set_concurrent_parameter_reads(true);
  }

  PoolSet pools;
  ComputationGraph cg;
  GradientSlots slots;
  std::atomic<bool> filled{false};
  double loss = 0;
};

ParallelTrainer::ParallelTrainer(Model& model, Trainer& trainer, ComputationGraph& cg,
                                 unsigned workers)
    : model_(&model), trainer_(&trainer), cg_(&cg), workers_(workers) {
  if (workers == 0) throw ConfigError("--workers must be at least 1");
  if (workers == 1) return;
  if (trainer.sparse())
    throw ConfigError("sparse updates cannot be combined with --workers > 1; use --sparse off");
  trainer.set_concurrent_writes(true);
  cg.set_concurrent_parameter_reads(true);
  for (unsigned i = 1; i < workers; ++i)
    pool_.push_back(std::make_unique<Worker>(model, cg.pools()));
}

ParallelTrainer::~ParallelTrainer() = default;

double ParallelTrainer::train_serial(std::span<const std::size_t> order,
                                     const LossCallback& loss) {
  double total = 0;
  for (std::size_t datum : order) {
    cg_->renew();
    try {
      Expression e = loss(*cg_, datum);
      total += e.scalar_value();
      e.backward();
    } catch (const std::exception& ex) {
      throw CallbackError(datum, ex.what());
    }
    trainer_->update();
    ++updates_;
  }
  return total;
}

void ParallelTrainer::consume(bool own) {
  std::vector<Worker*> ready;
  for (auto& w : pool_)
    if (w->filled.load(std::memory_order_acquire)) ready.push_back(w.get());
  if (!own && ready.empty()) return;

  std::vector<std::span<const real>> in;
  for (const auto& p : model_->parameters()) {
    in.clear();
    if (own) in.push_back(p->grad_span());
    for (auto* w : ready) in.push_back(w->slots.parameter(p->id));
    average_gradients(in, p->grad_span());
  }
  for (const auto& lp : model_->lookup_parameters()) {
    in.clear();
    std::span<real> g(lp->grad, lp->size());
    if (own) in.push_back(g);
    for (auto* w : ready) in.push_back(w->slots.lookup(lp->id));
    average_gradients(in, g);
  }
  trainer_->update();
  ++updates_;
  for (auto* w : ready) {
    w->slots.zero();
    w->filled.store(false, std::memory_order_release);
  }
}

double ParallelTrainer::train_epoch(std::span<const std::size_t> order,
                                    const LossCallback& loss) {
  if (workers_ == 1) return train_serial(order, loss);

  std::atomic<std::size_t> next{0};
  std::atomic<unsigned> running{static_cast<unsigned>(pool_.size())};
  std::atomic<bool> abort{false};
  std::mutex error_mu;
  std::optional<CallbackError> error;
  auto fail = [&](std::size_t datum, const char* what) {
    std::lock_guard lock(error_mu);
    if (!error) error.emplace(datum, what);
    abort.store(true, std::memory_order_relaxed);
  };

  auto work = [&](Worker& w) {
    w.loss = 0;
    while (!abort.load(std::memory_order_relaxed)) {
      // Backpressure: the slot must be consumed before it is reused.
      while (w.filled.load(std::memory_order_acquire)) {
        if (abort.load(std::memory_order_relaxed)) break;
        std::this_thread::yield();
      }
      if (abort.load(std::memory_order_relaxed)) break;
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= order.size()) break;
      w.cg.renew();
      try {
        Expression e = loss(w.cg, order[i]);
        w.loss += e.scalar_value();
        e.backward();
      } catch (const std::exception& ex) {
        fail(order[i], ex.what());
        break;
      }
      w.filled.store(true, std::memory_order_release);
    }
    running.fetch_sub(1, std::memory_order_release);
  };

  std::vector<std::thread> threads;
  threads.reserve(pool_.size());
  for (auto& w : pool_) threads.emplace_back(work, std::ref(*w));

  double total = 0;
  try {
    while (!abort.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= order.size()) break;
      cg_->renew();
      try {
        Expression e = loss(*cg_, order[i]);
        total += e.scalar_value();
        e.backward();
      } catch (const std::exception& ex) {
        fail(order[i], ex.what());
        break;
      }
      consume(true);
    }
    // Drain the slots still in flight.
    while (!abort.load(std::memory_order_relaxed)) {
      const bool done = running.load(std::memory_order_acquire) == 0;
      consume(false);
      if (done) break;
      std::this_thread::yield();
    }
  } catch (...) {
    abort.store(true, std::memory_order_relaxed);
    for (auto& t : threads) t.join();
    throw;
  }
  for (auto& t : threads) t.join();
  if (error) {
    for (auto& w : pool_) {
      w->slots.zero();
      w->filled.store(false, std::memory_order_relaxed);
    }
    model_->zero_gradients();
    throw *error;
  }
  for (auto& w : pool_) total += w->loss;
  return total;
}

DYNGRAPH_END_NAMESPACE
