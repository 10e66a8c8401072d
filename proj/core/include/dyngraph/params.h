#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dyngraph/arena.h"
#include "dyngraph/tensor.h"

DYNGRAPH_BEGIN_NAMESPACE

// Values and gradient accumulator of a dense parameter. Both arrays live in
// the model's parameter pool and never move.
struct ParameterStorage {
  std::string name;
  Shape shape;
  unsigned id = 0;  // position in the model's parameter roster
  real* values = nullptr;
  real* grad = nullptr;

  std::size_t size() const { return shape.size(); }
  std::span<real> value_span() const { return {values, size()}; }
  std::span<real> grad_span() const { return {grad, size()}; }
};

// A |V| x d embedding table accessed by row. Rows are contiguous: row r
// occupies values[r * dim .. (r + 1) * dim).
struct LookupParameterStorage {
  std::string name;
  unsigned rows = 0;
  unsigned dim = 0;
  unsigned id = 0;
  real* values = nullptr;
  real* grad = nullptr;
  // Rows whose gradient may be nonzero since the last update.
  std::vector<unsigned> touched;
  std::vector<std::uint8_t> touched_flag;

  std::size_t size() const { return static_cast<std::size_t>(rows) * dim; }
  std::span<real> row(unsigned r) const { return {values + static_cast<std::size_t>(r) * dim, dim}; }
  std::span<real> grad_row(unsigned r) const {
    return {grad + static_cast<std::size_t>(r) * dim, dim};
  }
  void touch(unsigned r) {
    if (!touched_flag[r]) {
      touched_flag[r] = 1;
      touched.push_back(r);
    }
  }
  void clear_touched();
};

// Cheap handles. They stay valid for the lifetime of the owning Model.
class Parameter {
 public:
  Parameter() = default;
  explicit Parameter(ParameterStorage* s) : s_(s) {}
  ParameterStorage& storage() const { return *s_; }
  const Shape& shape() const { return s_->shape; }
  const std::string& name() const { return s_->name; }
  std::span<real> values() const { return s_->value_span(); }
  std::span<real> gradient() const { return s_->grad_span(); }
  // Copies the given values in; the size must match.
  void set_values(std::span<const real> values) const;

 private:
  ParameterStorage* s_ = nullptr;
};

class LookupParameter {
 public:
  LookupParameter() = default;
  explicit LookupParameter(LookupParameterStorage* s) : s_(s) {}
  LookupParameterStorage& storage() const { return *s_; }
  unsigned rows() const { return s_->rows; }
  unsigned dim() const { return s_->dim; }
  const std::string& name() const { return s_->name; }
  std::span<real> row(unsigned r) const { return s_->row(r); }
  std::span<real> grad_row(unsigned r) const { return s_->grad_row(r); }
  std::span<const unsigned> touched() const { return s_->touched; }
  void set_row(unsigned r, std::span<const real> values) const;

 private:
  LookupParameterStorage* s_ = nullptr;
};

enum class InitMode {
  kDefault,  // Glorot uniform for parameters, U(-0.1, 0.1) for lookup tables
  kZero,
};

// The persistent trainable state. Storage is carved from a caller-owned
// parameter pool that must outlive the model.
class Model {
 public:
  explicit Model(Pool& pool, std::uint64_t seed = 1);
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  Parameter add_parameters(const Shape& dims, std::string name = {});
  Parameter add_parameters(std::initializer_list<unsigned> dims, std::string name = {}) {
    return add_parameters(Shape(dims), std::move(name));
  }
  LookupParameter add_lookup_parameters(unsigned rows, unsigned dim, std::string name = {});

  // Zeroes every gradient and clears the touched sets.
  void zero_gradients();

  void set_init_mode(InitMode mode) { init_ = mode; }
  InitMode init_mode() const { return init_; }
  std::uint64_t seed() const { return seed_; }

  std::span<const std::unique_ptr<ParameterStorage>> parameters() const { return params_; }
  std::span<const std::unique_ptr<LookupParameterStorage>> lookup_parameters() const {
    return lookups_;
  }
  // Total number of trainable scalars.
  std::size_t scalar_count() const;

  // Binary checkpoint of the values (gradients are not stored).
  void save(const std::filesystem::path& path) const;
  // Requires an identical roster: same entries, names and shapes, in order.
  void load(const std::filesystem::path& path);

 private:
  void check_name(const std::string& name) const;
  real* claim(std::size_t n);

  Pool* pool_;
  std::uint64_t seed_;
  std::mt19937 rng_;
  InitMode init_ = InitMode::kDefault;
  std::vector<std::unique_ptr<ParameterStorage>> params_;
  std::vector<std::unique_ptr<LookupParameterStorage>> lookups_;
};

// Gradient storage that mirrors a model's roster, one buffer per entry.
// Graphs can be told to accumulate into a slot set instead of the model,
// which is how data-parallel workers keep their gradients apart.
class GradientSlots {
 public:
  GradientSlots(const Model& model, Pool& pool);

  std::span<real> parameter(unsigned id) const { return params_[id]; }
  std::span<real> lookup(unsigned id) const { return lookups_[id]; }
  void zero();

 private:
  std::vector<std::span<real>> params_;
  std::vector<std::span<real>> lookups_;
};

// Bytes of parameter pool a GradientSlots for this model needs.
std::size_t gradient_slot_bytes(const Model& model);

DYNGRAPH_END_NAMESPACE
