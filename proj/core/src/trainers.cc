#include "dyngraph/trainers.h"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "dyngraph/error.h"

DYNGRAPH_BEGIN_NAMESPACE

UpdateRule parse_update_rule(std::string_view name) {
  if (name == "sgd") return UpdateRule::kSgd;
  if (name == "momentum") return UpdateRule::kMomentum;
  if (name == "adagrad") return UpdateRule::kAdagrad;
  if (name == "adam") return UpdateRule::kAdam;
  throw ConfigError("unknown trainer '" + std::string(name) + "' (sgd|momentum|adagrad|adam)");
}

const char* update_rule_name(UpdateRule rule) {
  switch (rule) {
    case UpdateRule::kSgd: return "sgd";
    case UpdateRule::kMomentum: return "momentum";
    case UpdateRule::kAdagrad: return "adagrad";
    case UpdateRule::kAdam: return "adam";
  }
  return "?";
}

TrainerOptions TrainerOptions::defaults(UpdateRule rule) {
  TrainerOptions o;
  o.rule = rule;
  switch (rule) {
    case UpdateRule::kSgd:
    case UpdateRule::kAdagrad: o.learning_rate = real(0.1); break;
    case UpdateRule::kMomentum: o.learning_rate = real(0.01); break;
    case UpdateRule::kAdam: o.learning_rate = real(0.001); break;
  }
  return o;
}

Trainer::Trainer(Model& model, const TrainerOptions& options) : model_(&model), opts_(options) {
  sync_slots();
}

// Parameters may be added to the model after the trainer exists (builders
// register theirs lazily in some programs), so slots are grown on demand.
void Trainer::sync_slots() {
  const bool two = opts_.rule == UpdateRule::kAdam;
  const bool any = opts_.rule != UpdateRule::kSgd;
  auto make = [&](std::size_t n) {
    Slots s;
    if (any) s.a.assign(n, real(0));
    if (two) s.b.assign(n, real(0));
    return s;
  };
  auto params = model_->parameters();
  for (std::size_t i = param_slots_.size(); i < params.size(); ++i)
    param_slots_.push_back(make(params[i]->size()));
  auto lookups = model_->lookup_parameters();
  for (std::size_t i = lookup_slots_.size(); i < lookups.size(); ++i)
    lookup_slots_.push_back(make(lookups[i]->size()));
}

void Trainer::apply(real* theta, real* grad, Slots& s, std::size_t offset, std::size_t n) {
  const real lr = opts_.learning_rate;
  auto store = [this](real& dst, real v) {
    if (concurrent_)
      std::atomic_ref<real>(dst).store(v, std::memory_order_relaxed);
    else
      dst = v;
  };
  switch (opts_.rule) {
    case UpdateRule::kSgd:
      for (std::size_t i = 0; i < n; ++i) store(theta[i], theta[i] - lr * grad[i]);
      break;
    case UpdateRule::kMomentum: {
      real* v = s.a.data() + offset;
      for (std::size_t i = 0; i < n; ++i) {
        v[i] = opts_.momentum * v[i] - lr * grad[i];
        store(theta[i], theta[i] + v[i]);
      }
      break;
    }
    case UpdateRule::kAdagrad: {
      real* G = s.a.data() + offset;
      for (std::size_t i = 0; i < n; ++i) {
        G[i] += grad[i] * grad[i];
        store(theta[i], theta[i] - lr * grad[i] / (std::sqrt(G[i]) + opts_.adagrad_epsilon));
      }
      break;
    }
    case UpdateRule::kAdam: {
      real* m = s.a.data() + offset;
      real* v = s.b.data() + offset;
      const real b1 = opts_.beta1, b2 = opts_.beta2;
      for (std::size_t i = 0; i < n; ++i) {
        m[i] = b1 * m[i] + (1 - b1) * grad[i];
        v[i] = b2 * v[i] + (1 - b2) * grad[i] * grad[i];
        const real mhat = m[i] / bias1_;
        const real vhat = v[i] / bias2_;
        store(theta[i], theta[i] - lr * mhat / (std::sqrt(vhat) + opts_.adam_epsilon));
      }
      break;
    }
  }
}

void Trainer::update() {
  sync_slots();
  ++t_;
  if (opts_.rule == UpdateRule::kAdam) {
    bias1_ = real(1) - static_cast<real>(std::pow(static_cast<double>(opts_.beta1), static_cast<double>(t_)));
    bias2_ = real(1) - static_cast<real>(std::pow(static_cast<double>(opts_.beta2), static_cast<double>(t_)));
  }
  auto params = model_->parameters();
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = *params[k];
    apply(p.values, p.grad, param_slots_[k], 0, p.size());
    std::fill(p.grad, p.grad + p.size(), real(0));
  }
  auto lookups = model_->lookup_parameters();
  for (std::size_t k = 0; k < lookups.size(); ++k) {
    auto& lp = *lookups[k];
    if (opts_.sparse) {
      // Only touched rows can carry gradient; everything else is skipped.
      for (unsigned r : lp.touched) {
        const std::size_t off = static_cast<std::size_t>(r) * lp.dim;
        apply(lp.values + off, lp.grad + off, lookup_slots_[k], off, lp.dim);
        std::fill(lp.grad + off, lp.grad + off + lp.dim, real(0));
      }
    } else {
      apply(lp.values, lp.grad, lookup_slots_[k], 0, lp.size());
      std::fill(lp.grad, lp.grad + lp.size(), real(0));
    }
    lp.clear_touched();
  }
}

DYNGRAPH_END_NAMESPACE
