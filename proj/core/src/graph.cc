#include "dyngraph/graph.h"

#include <algorithm>
#include <cstring>

#include "dyngraph/error.h"
#include "dyngraph/ops.h"

DYNGRAPH_BEGIN_NAMESPACE

namespace {

bool is_leaf_parameter(OpKind k) {
  return k == OpKind::kParameter || k == OpKind::kLookup || k == OpKind::kLookupBatch;
}

void add_into(real* dst, const real* src, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
}

}  // namespace

ComputationGraph::ComputationGraph(PoolSet& pools) : pools_(&pools) {
  nodes_.reserve(1024);
  edges_.reserve(2048);
  aux_.reserve(1024);
  constants_.reserve(4096);
  scratch_.reserve(16);
  pools_->reset_transient();
}

void ComputationGraph::renew() {
  nodes_.clear();
  edges_.clear();
  aux_.clear();
  constants_.clear();
  ++generation_;
  watermark_ = -1;
  backward_dirty_ = false;
  pools_->reset_transient();
}

void ComputationGraph::check(const Expression& e) const {
  if (e.cg_ != this)
    throw StaleExpression("expression belongs to a different computation graph");
  if (e.generation_ != generation_)
    throw StaleExpression("expression from graph generation " + std::to_string(e.generation_) +
                          " used in generation " + std::to_string(generation_) +
                          " (it was created before the last renew())");
}

const Shape& ComputationGraph::shape(const Expression& e) const {
  check(e);
  return nodes_[e.index_].shape;
}

Expression ComputationGraph::add_node(OpKind kind, std::span<const Expression> inputs,
                                      const NodeArgs& args) {
  for (const auto& e : inputs) check(e);

  Node n;
  n.kind = kind;
  n.inputs_begin = static_cast<std::uint32_t>(edges_.size());
  n.num_inputs = static_cast<std::uint32_t>(inputs.size());
  n.aux_begin = static_cast<std::uint32_t>(aux_.size());
  n.aux_count = static_cast<std::uint32_t>(args.indices.size());
  n.scalar = args.scalar;
  n.param = args.param;
  n.lookup = args.lookup;
  n.shape = args.shape;
  n.needs_grad = is_leaf_parameter(kind);

  const auto self = static_cast<std::uint32_t>(nodes_.size());
  // Shapes go through the scratch buffer to keep construction allocation-free.
  Shape shapes[8];
  std::vector<Shape> many;
  std::span<Shape> in_shapes;
  if (inputs.size() <= 8) {
    in_shapes = std::span<Shape>(shapes, inputs.size());
  } else {
    many.resize(inputs.size());
    in_shapes = many;
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const Node& in = nodes_[inputs[i].index_];
    in_shapes[i] = in.shape;
    n.needs_grad = n.needs_grad || in.needs_grad;
  }

  aux_.insert(aux_.end(), args.indices.begin(), args.indices.end());
  if (kind == OpKind::kInput) {
    if (args.values.size() != args.shape.size()) {
      aux_.resize(n.aux_begin);
      throw LengthMismatch("input of shape " + args.shape.str() + " needs " +
                           std::to_string(args.shape.size()) + " values, got " +
                           std::to_string(args.values.size()));
    }
    n.values_begin = static_cast<std::uint32_t>(constants_.size());
    constants_.insert(constants_.end(), args.values.begin(), args.values.end());
  }

  try {
    // infer reads the payload through aux(n), so n must point at it already.
    n.shape = op_def(kind).infer(*this, n, in_shapes);
  } catch (...) {
    aux_.resize(n.aux_begin);
    if (kind == OpKind::kInput) constants_.resize(n.values_begin);
    throw;
  }

  for (const auto& e : inputs) {
    // Construction order is a topological order.
    if (e.index_ >= self) throw Error("internal error: input index not below node index");
    edges_.push_back(e.index_);
  }
  nodes_.push_back(n);
  return Expression(this, generation_, self);
}

void ComputationGraph::forward_to(const Expression& e) {
  check(e);
  for (long i = watermark_ + 1; i <= static_cast<long>(e.index_); ++i) {
    Node& n = nodes_[i];
    if (n.kind == OpKind::kParameter && !concurrent_reads_) {
      n.value = n.param->values;
    } else {
      Region r = pools_->forward.allocate(n.shape.size() * sizeof(real));
      n.value = pools_->forward.as<real>(r);
      scratch_.clear();
      for (auto in : inputs(n)) scratch_.push_back(TensorView{nodes_[in].shape, nodes_[in].value});
      op_def(n.kind).forward(OpContext{*this, n, scratch_}, TensorView{n.shape, n.value});
    }
    ++forward_calls_;
    watermark_ = i;
  }
}

Tensor ComputationGraph::value(const Expression& e) {
  forward_to(e);
  const Node& n = nodes_[e.index_];
  return Tensor(n.shape, std::vector<real>(n.value, n.value + n.shape.size()));
}

void ComputationGraph::accumulate_parameter_grad(const Node& n) {
  if (n.kind == OpKind::kParameter) {
    real* dst = slots_ ? slots_->parameter(n.param->id).data() : n.param->grad;
    add_into(dst, n.grad, n.shape.size());
    return;
  }
  auto& lp = *n.lookup;
  real* table = slots_ ? slots_->lookup(lp.id).data() : lp.grad;
  auto ids = aux(n);
  for (unsigned b = 0; b < ids.size(); ++b) {
    add_into(table + static_cast<std::size_t>(ids[b]) * lp.dim,
             n.grad + static_cast<std::size_t>(b) * lp.dim, lp.dim);
    if (!slots_) lp.touch(ids[b]);
  }
}

void ComputationGraph::backward(const Expression& e) {
  check(e);
  const Node& loss = nodes_[e.index_];
  if (loss.shape.size() != 1)
    throw NonScalarLoss("backward() needs a scalar, unbatched loss; got shape " + loss.shape.str() +
                        " (use sum_batches for batched losses)");
  forward_to(e);

  // A second backward in the same generation starts from clean node
  // gradients; parameter accumulators keep adding up.
  if (backward_dirty_) pools_->backward.reset_zeroed();
  backward_dirty_ = true;
  for (std::uint32_t i = 0; i <= e.index_; ++i) {
    Node& n = nodes_[i];
    Region r = pools_->backward.allocate(n.shape.size() * sizeof(real));
    n.grad = pools_->backward.as<real>(r);
  }
  nodes_[e.index_].grad[0] = real(1);

  for (long i = e.index_; i >= 0; --i) {
    const Node& n = nodes_[i];
    if (!n.needs_grad) continue;
    if (is_leaf_parameter(n.kind)) {
      accumulate_parameter_grad(n);
      continue;
    }
    auto in = inputs(n);
    scratch_.clear();
    for (auto j : in) scratch_.push_back(TensorView{nodes_[j].shape, nodes_[j].value});
    const OpContext ctx{*this, n, scratch_};
    const TensorView fx{n.shape, n.value};
    const TensorView dEdf{n.shape, n.grad};
    for (unsigned k = 0; k < in.size(); ++k) {
      const Node& x = nodes_[in[k]];
      if (!x.needs_grad) continue;
      op_def(n.kind).backward(ctx, fx, dEdf, k, TensorView{x.shape, x.grad});
    }
  }
}

const Shape& Expression::shape() const { return cg_->shape(*this); }
Tensor Expression::value() const { return cg_->value(*this); }
real Expression::scalar_value() const {
  // Read in place; value() would copy.
  cg_->forward_to(*this);
  const Node& n = cg_->node(index_);
  if (n.shape.size() != 1) throw BadShape("scalar_value() on expression of shape " + n.shape.str());
  return n.value[0];
}
void Expression::forward() const { cg_->forward_to(*this); }
void Expression::backward() const { cg_->backward(*this); }

DYNGRAPH_END_NAMESPACE
