#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dyngraph/params.h"

DYNGRAPH_BEGIN_NAMESPACE

enum class UpdateRule { kSgd, kMomentum, kAdagrad, kAdam };

UpdateRule parse_update_rule(std::string_view name);
const char* update_rule_name(UpdateRule rule);

struct TrainerOptions {
  UpdateRule rule = UpdateRule::kSgd;
  real learning_rate = real(0.1);
  real momentum = real(0.9);
  real adagrad_epsilon = real(1e-8);
  real beta1 = real(0.9);
  real beta2 = real(0.999);
  real adam_epsilon = real(1e-8);
  // Lookup tables only update the rows touched since the last update.
  bool sparse = true;

  // Defaults for a rule: lr 0.1 for SGD and AdaGrad, 0.01 for momentum,
  // 0.001 for Adam.
  static TrainerOptions defaults(UpdateRule rule);
};

// Applies one online update from the gradients accumulated in a model, then
// clears them.
//
//   sgd       theta -= lr * g
//   momentum  v = mu * v - lr * g; theta += v
//   adagrad   G += g^2; theta -= lr * g / (sqrt(G) + eps)
//   adam      m = b1 m + (1 - b1) g; s = b2 s + (1 - b2) g^2;
//             theta -= lr * (m / (1 - b1^t)) / (sqrt(s / (1 - b2^t)) + eps)
//
// Sparse mode is exact for SGD and AdaGrad. Momentum and Adam keep moving
// rows whose gradient is zero, so sparse and dense runs differ for them.
class Trainer {
 public:
  Trainer(Model& model, const TrainerOptions& options);

  void update();

  void set_sparse(bool sparse) { opts_.sparse = sparse; }
  bool sparse() const { return opts_.sparse; }
  void set_learning_rate(real lr) { opts_.learning_rate = lr; }
  const TrainerOptions& options() const { return opts_; }
  // Adam step counter; increments once per update().
  unsigned long steps() const { return t_; }

  // Parameter writes become relaxed atomic stores so that graphs reading the
  // model with concurrent_parameter_reads stay race-free.
  void set_concurrent_writes(bool on) { concurrent_ = on; }

  Model& model() const { return *model_; }

 private:
  // Rule state for one parameter or one lookup table, shaped like it.
  struct Slots {
    std::vector<real> a;  // velocity, squared sum, or first moment
    std::vector<real> b;  // second moment (adam)
  };

  void sync_slots();
  void apply(real* theta, real* grad, Slots& s, std::size_t offset, std::size_t n);

  Model* model_;
  TrainerOptions opts_;
  unsigned long t_ = 0;
  real bias1_ = 1, bias2_ = 1;
  bool concurrent_ = false;
  std::vector<Slots> param_slots_;
  std::vector<Slots> lookup_slots_;
};

DYNGRAPH_END_NAMESPACE
