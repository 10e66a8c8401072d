#pragma once

#include <initializer_list>
#include <span>

#include "dyngraph/graph.h"

DYNGRAPH_BEGIN_NAMESPACE

// Graph-building functions. None of them compute anything: values appear
// when value()/forward() is called on an expression that depends on them.

// Constant nodes.
Expression input(ComputationGraph& cg, const Tensor& t);
Expression input(ComputationGraph& cg, const Shape& shape, std::span<const real> values);
Expression input(ComputationGraph& cg, real scalar);
Expression zeros(ComputationGraph& cg, const Shape& shape);

// Parameter nodes. Their gradients flow into the model (or the graph's
// gradient slots).
Expression parameter(ComputationGraph& cg, Parameter p);
Expression lookup(ComputationGraph& cg, LookupParameter p, unsigned index);
Expression lookup_batch(ComputationGraph& cg, LookupParameter p, std::span<const unsigned> indices);

Expression add(const Expression& a, const Expression& b);
Expression cmult(const Expression& a, const Expression& b);
Expression scalar_mul(const Expression& x, real c);
Expression matmul(const Expression& a, const Expression& x);
// b + W1 * x1 + W2 * x2 + ...
Expression affine(std::span<const Expression> b_w_x);
Expression affine(std::initializer_list<Expression> b_w_x);
Expression concatenate(std::span<const Expression> parts);
Expression concatenate(std::initializer_list<Expression> parts);

Expression tanh(const Expression& x);
Expression logistic(const Expression& x);
Expression softmax(const Expression& x);
Expression log_softmax(const Expression& x);

Expression pickneglogsoftmax(const Expression& x, unsigned label);
Expression pickneglogsoftmax_batch(const Expression& x, std::span<const unsigned> labels);
Expression sum_batches(const Expression& x);

// Rows [begin, end) of the first dimension.
Expression pick_range(const Expression& x, unsigned begin, unsigned end);
// Element idx of a vector, per batch element.
Expression pick(const Expression& x, unsigned idx);

inline Expression operator+(const Expression& a, const Expression& b) { return add(a, b); }
inline Expression operator*(const Expression& a, const Expression& b) { return matmul(a, b); }
inline Expression operator*(const Expression& x, real c) { return scalar_mul(x, c); }
inline Expression operator*(real c, const Expression& x) { return scalar_mul(x, c); }
inline Expression operator-(const Expression& x) { return scalar_mul(x, real(-1)); }
inline Expression operator-(const Expression& a, const Expression& b) { return add(a, -b); }

DYNGRAPH_END_NAMESPACE
