#include "dyngraph/ops.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <string>

#include <Eigen/Core>

#include "dyngraph/error.h"

DYNGRAPH_BEGIN_NAMESPACE

namespace {

using ArrayMap = Eigen::Map<Eigen::Array<real, Eigen::Dynamic, 1>>;
using MatrixMap = Eigen::Map<Eigen::Matrix<real, Eigen::Dynamic, Eigen::Dynamic>>;

// Whole tensor as a flat array.
ArrayMap flat(const TensorView& t) { return ArrayMap(t.v, static_cast<Eigen::Index>(t.size())); }

// Batch element b as a flat array (broadcast for batch-1 views).
ArrayMap elem(const TensorView& t, unsigned b) {
  return ArrayMap(t.batch_ptr(b), static_cast<Eigen::Index>(t.shape.batch_size()));
}

// Batch element b as a rows x (everything else) matrix.
MatrixMap mat(const TensorView& t, unsigned b) {
  const auto rows = static_cast<Eigen::Index>(t.shape.rows());
  const auto cols = static_cast<Eigen::Index>(t.shape.batch_size() / t.shape.rows());
  return MatrixMap(t.batch_ptr(b), rows, cols);
}

// All batch elements of a vector-shaped view side by side.
MatrixMap batch_columns(const TensorView& t) {
  return MatrixMap(t.v, static_cast<Eigen::Index>(t.shape.batch_size()),
                   static_cast<Eigen::Index>(t.shape.batch()));
}

[[noreturn]] void shape_error(OpKind kind, std::span<const Shape> xs, const std::string& why) {
  std::string msg = std::string(op_name(kind)) + ": " + why + " (inputs:";
  for (const auto& s : xs) msg += " " + s.str();
  throw ShapeError(msg + ")");
}

void expect_arity(OpKind kind, std::span<const Shape> xs, std::size_t n) {
  if (xs.size() != n)
    shape_error(kind, xs, "expects " + std::to_string(n) + " inputs, got " +
                              std::to_string(xs.size()));
}

void expect_vector(OpKind kind, std::span<const Shape> xs, const Shape& s) {
  if (s.rank() != 1) shape_error(kind, xs, "expects a vector");
}

// ---------------------------------------------------------------- leaves

Shape infer_input(const ComputationGraph&, const Node& n, std::span<const Shape>) { return n.shape; }

void forward_input(const OpContext& ctx, const TensorView& fx) {
  auto c = ctx.cg.constants(ctx.node);
  std::copy(c.begin(), c.end(), fx.v);
}

Shape infer_parameter(const ComputationGraph&, const Node& n, std::span<const Shape>) {
  return n.param->shape;
}

// Copy of shared parameter memory. Relaxed atomic loads keep this well
// defined while another thread is updating the model.
void relaxed_copy(const real* src, real* dst, std::size_t n, bool concurrent) {
  if (!concurrent) {
    std::memcpy(dst, src, n * sizeof(real));
    return;
  }
  for (std::size_t i = 0; i < n; ++i)
    dst[i] = std::atomic_ref<real>(const_cast<real&>(src[i])).load(std::memory_order_relaxed);
}

void forward_parameter(const OpContext& ctx, const TensorView& fx) {
  relaxed_copy(ctx.node.param->values, fx.v, fx.size(), ctx.cg.concurrent_parameter_reads());
}

void check_rows(const LookupParameterStorage& lp, std::span<const unsigned> ids) {
  for (unsigned id : ids)
    if (id >= lp.rows)
      throw IndexOutOfBounds("lookup index " + std::to_string(id) + " out of range for '" +
                             lp.name + "' with " + std::to_string(lp.rows) + " rows");
}

Shape infer_lookup(const ComputationGraph& cg, const Node& n, std::span<const Shape>) {
  auto ids = cg.aux(n);
  check_rows(*n.lookup, ids);
  return Shape({n.lookup->dim});
}

Shape infer_lookup_batch(const ComputationGraph& cg, const Node& n, std::span<const Shape>) {
  auto ids = cg.aux(n);
  if (ids.empty()) throw EmptyBatch("lookup_batch needs at least one id");
  check_rows(*n.lookup, ids);
  return Shape({n.lookup->dim}, static_cast<unsigned>(ids.size()));
}

void forward_lookup(const OpContext& ctx, const TensorView& fx) {
  const auto& lp = *ctx.node.lookup;
  auto ids = ctx.cg.aux(ctx.node);
  const bool concurrent = ctx.cg.concurrent_parameter_reads();
  for (unsigned b = 0; b < ids.size(); ++b)
    relaxed_copy(lp.row(ids[b]).data(), fx.v + static_cast<std::size_t>(b) * lp.dim, lp.dim,
                 concurrent);
}

// ------------------------------------------------------- elementwise binary

Shape infer_same_dims_binary(const ComputationGraph&, const Node& n, std::span<const Shape> xs) {
  expect_arity(n.kind, xs, 2);
  if (!xs[0].same_dims(xs[1])) shape_error(n.kind, xs, "dimension mismatch");
  return xs[0].with_batch(broadcast_batch(n.kind, xs[0].batch(), xs[1].batch()));
}

void forward_add(const OpContext& ctx, const TensorView& fx) {
  for (unsigned b = 0; b < fx.shape.batch(); ++b)
    elem(fx, b) = elem(ctx.xs[0], b) + elem(ctx.xs[1], b);
}

void backward_add(const OpContext&, const TensorView&, const TensorView& dEdf, unsigned,
                  const TensorView& dEdxi) {
  if (dEdxi.shape.batch() == dEdf.shape.batch()) {
    flat(dEdxi) += flat(dEdf);
  } else {
    for (unsigned b = 0; b < dEdf.shape.batch(); ++b) elem(dEdxi, b) += elem(dEdf, b);
  }
}

void forward_cmult(const OpContext& ctx, const TensorView& fx) {
  for (unsigned b = 0; b < fx.shape.batch(); ++b)
    elem(fx, b) = elem(ctx.xs[0], b) * elem(ctx.xs[1], b);
}

void backward_cmult(const OpContext& ctx, const TensorView&, const TensorView& dEdf, unsigned i,
                    const TensorView& dEdxi) {
  const TensorView& other = ctx.xs[1 - i];
  for (unsigned b = 0; b < dEdf.shape.batch(); ++b) elem(dEdxi, b) += elem(dEdf, b) * elem(other, b);
}

// --------------------------------------------------------- elementwise unary

Shape infer_unary(const ComputationGraph&, const Node& n, std::span<const Shape> xs) {
  expect_arity(n.kind, xs, 1);
  return xs[0];
}

void forward_scalar_mul(const OpContext& ctx, const TensorView& fx) {
  flat(fx) = flat(ctx.xs[0]) * ctx.node.scalar;
}

void backward_scalar_mul(const OpContext& ctx, const TensorView&, const TensorView& dEdf, unsigned,
                         const TensorView& dEdxi) {
  flat(dEdxi) += flat(dEdf) * ctx.node.scalar;
}

void forward_tanh(const OpContext& ctx, const TensorView& fx) { flat(fx) = flat(ctx.xs[0]).tanh(); }

void backward_tanh(const OpContext&, const TensorView& fx, const TensorView& dEdf, unsigned,
                   const TensorView& dEdxi) {
  auto y = flat(fx);
  flat(dEdxi) += (real(1) - y.square()) * flat(dEdf);
}

void forward_logistic(const OpContext& ctx, const TensorView& fx) {
  flat(fx) = real(1) / (real(1) + (-flat(ctx.xs[0])).exp());
}

void backward_logistic(const OpContext&, const TensorView& fx, const TensorView& dEdf, unsigned,
                       const TensorView& dEdxi) {
  auto y = flat(fx);
  flat(dEdxi) += y * (real(1) - y) * flat(dEdf);
}

// ------------------------------------------------------------------ matmul

// Shape of A * x: A is [m, n], x is [n] or [n, p].
Shape matmul_shape(OpKind kind, std::span<const Shape> xs, const Shape& a, const Shape& x) {
  if (a.rank() > 2 || x.rank() > 2) shape_error(kind, xs, "matmul operands must have rank <= 2");
  if (a.cols() != x.rows()) shape_error(kind, xs, "inner dimensions differ");
  const unsigned batch = broadcast_batch(kind, a.batch(), x.batch());
  if (x.rank() == 1) return Shape({a.rows()}, batch);
  return Shape({a.rows(), x.cols()}, batch);
}

Shape infer_matmul(const ComputationGraph&, const Node& n, std::span<const Shape> xs) {
  expect_arity(n.kind, xs, 2);
  return matmul_shape(n.kind, xs, xs[0], xs[1]);
}

// out += A * x over the batch, out already has the broadcast batch.
void matmul_accumulate(const TensorView& a, const TensorView& x, const TensorView& out) {
  if (a.shape.batch() == 1 && x.shape.rank() == 1) {
    // One GEMM covers the whole batch: the columns of X are its elements.
    MatrixMap o(out.v, a.shape.rows(), out.shape.batch());
    if (x.shape.batch() == out.shape.batch()) {
      o.noalias() += mat(a, 0) * batch_columns(x);
    } else {
      o.colwise() += (mat(a, 0) * mat(x, 0)).col(0);
    }
    return;
  }
  for (unsigned b = 0; b < out.shape.batch(); ++b) mat(out, b).noalias() += mat(a, b) * mat(x, b);
}

void matmul_backward(const TensorView& a, const TensorView& x, const TensorView& dEdf, bool wrt_a,
                     const TensorView& dEdxi) {
  const unsigned batch = dEdf.shape.batch();
  if (wrt_a) {
    if (a.shape.batch() == 1 && x.shape.rank() == 1 && x.shape.batch() == batch) {
      MatrixMap g(dEdf.v, a.shape.rows(), batch);
      mat(dEdxi, 0).noalias() += g * batch_columns(x).transpose();
      return;
    }
    for (unsigned b = 0; b < batch; ++b)
      mat(dEdxi, b).noalias() += mat(dEdf, b) * mat(x, b).transpose();
  } else {
    if (a.shape.batch() == 1 && x.shape.rank() == 1 && x.shape.batch() == batch) {
      MatrixMap g(dEdf.v, a.shape.rows(), batch);
      batch_columns(dEdxi).noalias() += mat(a, 0).transpose() * g;
      return;
    }
    for (unsigned b = 0; b < batch; ++b)
      mat(dEdxi, b).noalias() += mat(a, b).transpose() * mat(dEdf, b);
  }
}

void forward_matmul(const OpContext& ctx, const TensorView& fx) {
  flat(fx).setZero();
  matmul_accumulate(ctx.xs[0], ctx.xs[1], fx);
}

void backward_matmul(const OpContext& ctx, const TensorView&, const TensorView& dEdf, unsigned i,
                     const TensorView& dEdxi) {
  matmul_backward(ctx.xs[0], ctx.xs[1], dEdf, i == 0, dEdxi);
}

// ------------------------------------------------------------------ affine

// Inputs: b, W1, x1, W2, x2, ...
Shape infer_affine(const ComputationGraph&, const Node& n, std::span<const Shape> xs) {
  if (xs.size() < 3 || xs.size() % 2 == 0)
    shape_error(n.kind, xs, "expects b followed by (W, x) pairs");
  unsigned batch = xs[0].batch();
  for (std::size_t i = 1; i < xs.size(); i += 2) {
    Shape prod = matmul_shape(n.kind, xs, xs[i], xs[i + 1]);
    if (!prod.same_dims(xs[0])) shape_error(n.kind, xs, "W*x does not match the bias dimensions");
    batch = broadcast_batch(n.kind, batch, prod.batch());
  }
  return xs[0].with_batch(batch);
}

void forward_affine(const OpContext& ctx, const TensorView& fx) {
  for (unsigned b = 0; b < fx.shape.batch(); ++b) elem(fx, b) = elem(ctx.xs[0], b);
  for (std::size_t i = 1; i < ctx.xs.size(); i += 2) {
    const TensorView& a = ctx.xs[i];
    const TensorView& x = ctx.xs[i + 1];
    if (std::max(a.shape.batch(), x.shape.batch()) == fx.shape.batch()) {
      matmul_accumulate(a, x, fx);
    } else {
      // Product is unbatched while the bias is batched.
      for (unsigned b = 0; b < fx.shape.batch(); ++b) mat(fx, b).noalias() += mat(a, 0) * mat(x, 0);
    }
  }
}

void backward_affine(const OpContext& ctx, const TensorView&, const TensorView& dEdf, unsigned i,
                     const TensorView& dEdxi) {
  if (i == 0) {
    backward_add(ctx, dEdf, dEdf, 0, dEdxi);
    return;
  }
  const bool wrt_a = (i % 2) == 1;
  const TensorView& a = ctx.xs[wrt_a ? i : i - 1];
  const TensorView& x = ctx.xs[wrt_a ? i + 1 : i];
  if (std::max(a.shape.batch(), x.shape.batch()) == dEdf.shape.batch()) {
    matmul_backward(a, x, dEdf, wrt_a, dEdxi);
    return;
  }
  for (unsigned b = 0; b < dEdf.shape.batch(); ++b) {
    if (wrt_a)
      mat(dEdxi, 0).noalias() += mat(dEdf, b) * mat(x, 0).transpose();
    else
      mat(dEdxi, 0).noalias() += mat(a, 0).transpose() * mat(dEdf, b);
  }
}

// ------------------------------------------------------------- concatenate

Shape infer_concatenate(const ComputationGraph&, const Node& n, std::span<const Shape> xs) {
  if (xs.empty()) throw EmptyList("concatenate needs at least one part");
  unsigned rows = 0;
  for (const auto& s : xs) {
    expect_vector(n.kind, xs, s);
    if (s.batch() != xs[0].batch()) shape_error(n.kind, xs, "parts have different batch counts");
    rows += s.rows();
  }
  return Shape({rows}, xs[0].batch());
}

void forward_concatenate(const OpContext& ctx, const TensorView& fx) {
  for (unsigned b = 0; b < fx.shape.batch(); ++b) {
    real* out = fx.batch_ptr(b);
    for (const auto& x : ctx.xs) {
      const std::size_t n = x.shape.batch_size();
      std::memcpy(out, x.batch_ptr(b), n * sizeof(real));
      out += n;
    }
  }
}

void backward_concatenate(const OpContext& ctx, const TensorView&, const TensorView& dEdf,
                          unsigned i, const TensorView& dEdxi) {
  std::size_t offset = 0;
  for (unsigned j = 0; j < i; ++j) offset += ctx.xs[j].shape.batch_size();
  const auto n = static_cast<Eigen::Index>(dEdxi.shape.batch_size());
  for (unsigned b = 0; b < dEdf.shape.batch(); ++b)
    elem(dEdxi, b) += ArrayMap(dEdf.batch_ptr(b) + offset, n);
}

// ----------------------------------------------------------------- softmax

Shape infer_vector_unary(const ComputationGraph&, const Node& n, std::span<const Shape> xs) {
  expect_arity(n.kind, xs, 1);
  expect_vector(n.kind, xs, xs[0]);
  return xs[0];
}

void softmax_into(const real* x, real* y, Eigen::Index n) {
  ArrayMap in(const_cast<real*>(x), n);
  ArrayMap out(y, n);
  out = (in - in.maxCoeff()).exp();
  out /= out.sum();
}

// log sum exp, stabilized by the maximum.
real log_sum_exp(const real* x, Eigen::Index n) {
  ArrayMap in(const_cast<real*>(x), n);
  const real m = in.maxCoeff();
  return m + std::log((in - m).exp().sum());
}

void forward_softmax(const OpContext& ctx, const TensorView& fx) {
  const auto n = static_cast<Eigen::Index>(fx.shape.batch_size());
  for (unsigned b = 0; b < fx.shape.batch(); ++b) softmax_into(ctx.xs[0].batch_ptr(b), fx.batch_ptr(b), n);
}

void backward_softmax(const OpContext&, const TensorView& fx, const TensorView& dEdf, unsigned,
                      const TensorView& dEdxi) {
  for (unsigned b = 0; b < fx.shape.batch(); ++b) {
    auto y = elem(fx, b);
    auto g = elem(dEdf, b);
    const real dot = (g * y).sum();
    elem(dEdxi, b) += y * (g - dot);
  }
}

void forward_log_softmax(const OpContext& ctx, const TensorView& fx) {
  const auto n = static_cast<Eigen::Index>(fx.shape.batch_size());
  for (unsigned b = 0; b < fx.shape.batch(); ++b) {
    const real lse = log_sum_exp(ctx.xs[0].batch_ptr(b), n);
    elem(fx, b) = elem(ctx.xs[0], b) - lse;
  }
}

void backward_log_softmax(const OpContext&, const TensorView& fx, const TensorView& dEdf, unsigned,
                          const TensorView& dEdxi) {
  for (unsigned b = 0; b < fx.shape.batch(); ++b) {
    auto g = elem(dEdf, b);
    elem(dEdxi, b) += g - elem(fx, b).exp() * g.sum();
  }
}

// --------------------------------------------------------- pick + nll

Shape infer_pnls(const ComputationGraph& cg, const Node& n, std::span<const Shape> xs) {
  expect_arity(n.kind, xs, 1);
  expect_vector(n.kind, xs, xs[0]);
  if (xs[0].batch() != 1)
    throw BadShape(std::string(op_name(n.kind)) + ": batched input " + xs[0].str() +
                   ", use pickneglogsoftmax_batch");
  const unsigned label = cg.aux(n)[0];
  if (label >= xs[0].rows())
    throw IndexOutOfBounds("label " + std::to_string(label) + " out of range for " + xs[0].str());
  return Shape({1});
}

Shape infer_pnls_batch(const ComputationGraph& cg, const Node& n, std::span<const Shape> xs) {
  expect_arity(n.kind, xs, 1);
  expect_vector(n.kind, xs, xs[0]);
  auto labels = cg.aux(n);
  if (labels.size() != xs[0].batch())
    throw LengthMismatch(std::string(op_name(n.kind)) + ": " + std::to_string(labels.size()) +
                         " labels for batch of " + std::to_string(xs[0].batch()));
  for (unsigned y : labels)
    if (y >= xs[0].rows())
      throw IndexOutOfBounds("label " + std::to_string(y) + " out of range for " + xs[0].str());
  return Shape({1}, xs[0].batch());
}

void forward_pnls(const OpContext& ctx, const TensorView& fx) {
  auto labels = ctx.cg.aux(ctx.node);
  const TensorView& x = ctx.xs[0];
  const auto n = static_cast<Eigen::Index>(x.shape.batch_size());
  for (unsigned b = 0; b < x.shape.batch(); ++b) {
    const real* xb = x.batch_ptr(b);
    fx.v[b] = log_sum_exp(xb, n) - xb[labels[b]];
  }
}

void backward_pnls(const OpContext& ctx, const TensorView&, const TensorView& dEdf, unsigned,
                   const TensorView& dEdxi) {
  auto labels = ctx.cg.aux(ctx.node);
  const TensorView& x = ctx.xs[0];
  const auto n = static_cast<Eigen::Index>(x.shape.batch_size());
  for (unsigned b = 0; b < x.shape.batch(); ++b) {
    const real g = dEdf.v[b];
    const real* xb = x.batch_ptr(b);
    const real lse = log_sum_exp(xb, n);
    ArrayMap in(const_cast<real*>(xb), n);
    real* d = dEdxi.batch_ptr(b);
    ArrayMap(d, n) += (in - lse).exp() * g;
    d[labels[b]] -= g;
  }
}

Shape infer_pick(const ComputationGraph& cg, const Node& n, std::span<const Shape> xs) {
  expect_arity(n.kind, xs, 1);
  expect_vector(n.kind, xs, xs[0]);
  const unsigned idx = cg.aux(n)[0];
  if (idx >= xs[0].rows())
    throw IndexOutOfBounds("pick index " + std::to_string(idx) + " out of range for " + xs[0].str());
  return Shape({1}, xs[0].batch());
}

void forward_pick(const OpContext& ctx, const TensorView& fx) {
  const unsigned idx = ctx.cg.aux(ctx.node)[0];
  for (unsigned b = 0; b < fx.shape.batch(); ++b) fx.v[b] = ctx.xs[0].batch_ptr(b)[idx];
}

void backward_pick(const OpContext& ctx, const TensorView&, const TensorView& dEdf, unsigned,
                   const TensorView& dEdxi) {
  const unsigned idx = ctx.cg.aux(ctx.node)[0];
  for (unsigned b = 0; b < dEdf.shape.batch(); ++b) dEdxi.batch_ptr(b)[idx] += dEdf.v[b];
}

// ------------------------------------------------------------- sum_batches

Shape infer_sum_batches(const ComputationGraph&, const Node& n, std::span<const Shape> xs) {
  expect_arity(n.kind, xs, 1);
  return xs[0].with_batch(1);
}

void forward_sum_batches(const OpContext& ctx, const TensorView& fx) {
  auto out = flat(fx);
  out.setZero();
  for (unsigned b = 0; b < ctx.xs[0].shape.batch(); ++b) out += elem(ctx.xs[0], b);
}

void backward_sum_batches(const OpContext&, const TensorView&, const TensorView& dEdf, unsigned,
                          const TensorView& dEdxi) {
  for (unsigned b = 0; b < dEdxi.shape.batch(); ++b) elem(dEdxi, b) += flat(dEdf);
}

// -------------------------------------------------------------- pick_range

// Rows [begin, end) along the first dimension.
Shape infer_pick_range(const ComputationGraph& cg, const Node& n, std::span<const Shape> xs) {
  expect_arity(n.kind, xs, 1);
  auto range = cg.aux(n);
  if (xs[0].rank() > 2) shape_error(n.kind, xs, "pick_range supports rank <= 2");
  if (range[0] >= range[1] || range[1] > xs[0].rows())
    throw IndexOutOfBounds("pick_range [" + std::to_string(range[0]) + ", " +
                           std::to_string(range[1]) + ") invalid for " + xs[0].str());
  const unsigned rows = range[1] - range[0];
  if (xs[0].rank() == 1) return Shape({rows}, xs[0].batch());
  return Shape({rows, xs[0].cols()}, xs[0].batch());
}

void forward_pick_range(const OpContext& ctx, const TensorView& fx) {
  const unsigned begin = ctx.cg.aux(ctx.node)[0];
  const auto rows = static_cast<Eigen::Index>(fx.shape.rows());
  for (unsigned b = 0; b < fx.shape.batch(); ++b)
    mat(fx, b) = mat(ctx.xs[0], b).middleRows(begin, rows);
}

void backward_pick_range(const OpContext& ctx, const TensorView&, const TensorView& dEdf, unsigned,
                         const TensorView& dEdxi) {
  const unsigned begin = ctx.cg.aux(ctx.node)[0];
  const auto rows = static_cast<Eigen::Index>(dEdf.shape.rows());
  for (unsigned b = 0; b < dEdf.shape.batch(); ++b)
    mat(dEdxi, b).middleRows(begin, rows) += mat(dEdf, b);
}

const OpDef kOps[] = {
    {"input", infer_input, forward_input, nullptr},
    {"parameter", infer_parameter, forward_parameter, nullptr},
    {"lookup", infer_lookup, forward_lookup, nullptr},
    {"lookup_batch", infer_lookup_batch, forward_lookup, nullptr},
    {"add", infer_same_dims_binary, forward_add, backward_add},
    {"cmult", infer_same_dims_binary, forward_cmult, backward_cmult},
    {"scalar_mul", infer_unary, forward_scalar_mul, backward_scalar_mul},
    {"matmul", infer_matmul, forward_matmul, backward_matmul},
    {"affine", infer_affine, forward_affine, backward_affine},
    {"concatenate", infer_concatenate, forward_concatenate, backward_concatenate},
    {"tanh", infer_unary, forward_tanh, backward_tanh},
    {"logistic", infer_unary, forward_logistic, backward_logistic},
    {"softmax", infer_vector_unary, forward_softmax, backward_softmax},
    {"pickneglogsoftmax", infer_pnls, forward_pnls, backward_pnls},
    {"pickneglogsoftmax_batch", infer_pnls_batch, forward_pnls, backward_pnls},
    {"sum_batches", infer_sum_batches, forward_sum_batches, backward_sum_batches},
    {"pick_range", infer_pick_range, forward_pick_range, backward_pick_range},
    {"log_softmax", infer_vector_unary, forward_log_softmax, backward_log_softmax},
    {"pick", infer_pick, forward_pick, backward_pick},
};

static_assert(sizeof(kOps) / sizeof(kOps[0]) == static_cast<std::size_t>(OpKind::kPick) + 1,
              "op table out of sync with OpKind");

}  // namespace

const OpDef& op_def(OpKind kind) { return kOps[static_cast<std::size_t>(kind)]; }

const char* op_name(OpKind kind) { return op_def(kind).name; }

unsigned broadcast_batch(OpKind kind, unsigned a, unsigned b) {
  if (a == b || b == 1) return a;
  if (a == 1) return b;
  throw ShapeError(std::string(op_name(kind)) + ": incompatible batch counts " + std::to_string(a) +
                   " and " + std::to_string(b));
}

DYNGRAPH_END_NAMESPACE
