#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dyngraph/arena.h"
#include "dyngraph/params.h"
#include "dyngraph/tensor.h"

DYNGRAPH_BEGIN_NAMESPACE

class ComputationGraph;

// The closed op catalog. Every kind has a shape rule, a forward and a
// backward entry in the table in ops.cc.
enum class OpKind : std::uint8_t {
  kInput,
  kParameter,
  kLookup,
  kLookupBatch,
  kAdd,
  kCMult,
  kScalarMul,
  kMatMul,
  kAffine,
  kConcatenate,
  kTanh,
  kLogistic,
  kSoftmax,
  kPickNegLogSoftmax,
  kPickNegLogSoftmaxBatch,
  kSumBatches,
  kPickRange,
  kLogSoftmax,
  kPick,
};

const char* op_name(OpKind kind);

// Handle to a node of the current graph generation.
class Expression {
 public:
  Expression() = default;

  ComputationGraph& graph() const { return *cg_; }
  std::uint64_t generation() const { return generation_; }
  std::uint32_t index() const { return index_; }
  bool valid() const { return cg_ != nullptr; }

  const Shape& shape() const;
  Tensor value() const;
  // Value of a single-element expression.
  real scalar_value() const;
  void forward() const;
  void backward() const;

 private:
  friend class ComputationGraph;
  Expression(ComputationGraph* cg, std::uint64_t generation, std::uint32_t index)
      : cg_(cg), generation_(generation), index_(index) {}

  ComputationGraph* cg_ = nullptr;
  std::uint64_t generation_ = 0;
  std::uint32_t index_ = 0;
};

// Per-kind payload passed to add_node; which fields matter depends on the kind.
struct NodeArgs {
  std::span<const unsigned> indices;  // lookup ids, pick labels, range bounds
  std::span<const real> values;       // constant payload of input nodes
  Shape shape;                        // shape of input nodes
  real scalar = 0;                    // scalar_mul constant
  ParameterStorage* param = nullptr;
  LookupParameterStorage* lookup = nullptr;
};

struct Node {
  OpKind kind = OpKind::kInput;
  bool needs_grad = false;  // some parameter is upstream of this node
  std::uint32_t inputs_begin = 0;
  std::uint32_t num_inputs = 0;
  std::uint32_t aux_begin = 0;
  std::uint32_t aux_count = 0;
  std::uint32_t values_begin = 0;
  real scalar = 0;
  ParameterStorage* param = nullptr;
  LookupParameterStorage* lookup = nullptr;
  Shape shape;
  real* value = nullptr;  // forward slot, set at evaluation
  real* grad = nullptr;   // backward slot, set at backward start
};

// Define-by-run graph. Nodes are appended in construction order, which is a
// topological order; forward evaluation is lazy and incremental (a
// watermark records how far values have been computed) and backward walks
// from the loss down to node 0.
class ComputationGraph {
 public:
  explicit ComputationGraph(PoolSet& pools);
  ComputationGraph(const ComputationGraph&) = delete;
  ComputationGraph& operator=(const ComputationGraph&) = delete;

  // Drops every node, invalidates outstanding expressions and resets the
  // transient pools.
  void renew();

  Expression add_node(OpKind kind, std::span<const Expression> inputs, const NodeArgs& args = {});

  Tensor value(const Expression& e);
  void forward_to(const Expression& e);
  void backward(const Expression& e);

  std::uint64_t generation() const { return generation_; }
  std::size_t size() const { return nodes_.size(); }
  // Index of the last evaluated node, -1 when nothing has been evaluated.
  long watermark() const { return watermark_; }
  const Shape& shape(const Expression& e) const;

  const Node& node(std::size_t i) const { return nodes_[i]; }
  std::span<const std::uint32_t> inputs(const Node& n) const {
    return {edges_.data() + n.inputs_begin, n.num_inputs};
  }
  std::span<const unsigned> aux(const Node& n) const {
    return {aux_.data() + n.aux_begin, n.aux_count};
  }
  std::span<const real> constants(const Node& n) const {
    return {constants_.data() + n.values_begin, n.shape.size()};
  }

  // Redirects parameter gradients into a slot set instead of the model's
  // accumulators (no touched rows are recorded then). nullptr restores the
  // default.
  void set_gradient_slots(const GradientSlots* slots) { slots_ = slots; }
  // Parameter and lookup values are copied into the forward pool with
  // relaxed atomic loads instead of being aliased, so another thread may
  // update the model concurrently.
  void set_concurrent_parameter_reads(bool on) { concurrent_reads_ = on; }
  bool concurrent_parameter_reads() const { return concurrent_reads_; }

  // Number of forward kernel invocations since construction.
  std::uint64_t forward_calls() const { return forward_calls_; }
  PoolSet& pools() { return *pools_; }

 private:
  void check(const Expression& e) const;
  void accumulate_parameter_grad(const Node& n);

  PoolSet* pools_;
  std::uint64_t generation_ = 0;
  long watermark_ = -1;
  long backward_allocated_ = -1;  // last node with a backward slot
  bool backward_dirty_ = false;
  bool concurrent_reads_ = false;
  const GradientSlots* slots_ = nullptr;
  std::uint64_t forward_calls_ = 0;

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> edges_;
  std::vector<unsigned> aux_;
  std::vector<real> constants_;
  std::vector<TensorView> scratch_;
};

DYNGRAPH_END_NAMESPACE
