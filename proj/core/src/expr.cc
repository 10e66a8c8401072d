#include "dyngraph/expr.h"

#include "dyngraph/error.h"

DYNGRAPH_BEGIN_NAMESPACE

namespace {

Expression unary(OpKind kind, const Expression& x, const NodeArgs& args = {}) {
  const Expression in[1] = {x};
  return x.graph().add_node(kind, in, args);
}

Expression binary(OpKind kind, const Expression& a, const Expression& b) {
  const Expression in[2] = {a, b};
  return a.graph().add_node(kind, in);
}

ComputationGraph& graph_of(std::span<const Expression> xs, const char* what) {
  if (xs.empty()) throw EmptyList(std::string(what) + " needs at least one argument");
  return xs[0].graph();
}

}  // namespace

Expression input(ComputationGraph& cg, const Tensor& t) { return input(cg, t.shape(), t.data()); }

Expression input(ComputationGraph& cg, const Shape& shape, std::span<const real> values) {
  NodeArgs args;
  args.shape = shape;
  args.values = values;
  return cg.add_node(OpKind::kInput, {}, args);
}

Expression input(ComputationGraph& cg, real scalar) {
  const real v[1] = {scalar};
  return input(cg, Shape({1}), v);
}

Expression zeros(ComputationGraph& cg, const Shape& shape) {
  // Small shapes go through the stack; large ones pay for one allocation.
  constexpr std::size_t kStack = 1024;
  if (shape.size() <= kStack) {
    real buf[kStack] = {};
    return input(cg, shape, std::span<const real>(buf, shape.size()));
  }
  std::vector<real> buf(shape.size(), real(0));
  return input(cg, shape, buf);
}

Expression parameter(ComputationGraph& cg, Parameter p) {
  NodeArgs args;
  args.param = &p.storage();
  return cg.add_node(OpKind::kParameter, {}, args);
}

Expression lookup(ComputationGraph& cg, LookupParameter p, unsigned index) {
  NodeArgs args;
  args.lookup = &p.storage();
  const unsigned ids[1] = {index};
  args.indices = ids;
  return cg.add_node(OpKind::kLookup, {}, args);
}

Expression lookup_batch(ComputationGraph& cg, LookupParameter p, std::span<const unsigned> indices) {
  NodeArgs args;
  args.lookup = &p.storage();
  args.indices = indices;
  return cg.add_node(OpKind::kLookupBatch, {}, args);
}

Expression add(const Expression& a, const Expression& b) { return binary(OpKind::kAdd, a, b); }
Expression cmult(const Expression& a, const Expression& b) { return binary(OpKind::kCMult, a, b); }
Expression matmul(const Expression& a, const Expression& x) { return binary(OpKind::kMatMul, a, x); }

Expression scalar_mul(const Expression& x, real c) {
  NodeArgs args;
  args.scalar = c;
  return unary(OpKind::kScalarMul, x, args);
}

Expression affine(std::span<const Expression> b_w_x) {
  return graph_of(b_w_x, "affine").add_node(OpKind::kAffine, b_w_x);
}

Expression affine(std::initializer_list<Expression> b_w_x) {
  return affine(std::span<const Expression>(b_w_x.begin(), b_w_x.size()));
}

Expression concatenate(std::span<const Expression> parts) {
  return graph_of(parts, "concatenate").add_node(OpKind::kConcatenate, parts);
}

Expression concatenate(std::initializer_list<Expression> parts) {
  return concatenate(std::span<const Expression>(parts.begin(), parts.size()));
}

Expression tanh(const Expression& x) { return unary(OpKind::kTanh, x); }
Expression logistic(const Expression& x) { return unary(OpKind::kLogistic, x); }
Expression softmax(const Expression& x) { return unary(OpKind::kSoftmax, x); }
Expression log_softmax(const Expression& x) { return unary(OpKind::kLogSoftmax, x); }

Expression pickneglogsoftmax(const Expression& x, unsigned label) {
  NodeArgs args;
  const unsigned l[1] = {label};
  args.indices = l;
  return unary(OpKind::kPickNegLogSoftmax, x, args);
}

Expression pickneglogsoftmax_batch(const Expression& x, std::span<const unsigned> labels) {
  NodeArgs args;
  args.indices = labels;
  return unary(OpKind::kPickNegLogSoftmaxBatch, x, args);
}

Expression sum_batches(const Expression& x) { return unary(OpKind::kSumBatches, x); }

Expression pick_range(const Expression& x, unsigned begin, unsigned end) {
  NodeArgs args;
  const unsigned r[2] = {begin, end};
  args.indices = r;
  return unary(OpKind::kPickRange, x, args);
}

Expression pick(const Expression& x, unsigned idx) {
  NodeArgs args;
  const unsigned i[1] = {idx};
  args.indices = i;
  return unary(OpKind::kPick, x, args);
}

DYNGRAPH_END_NAMESPACE
