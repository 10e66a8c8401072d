#pragma once

#include <span>

#include "dyngraph/graph.h"

DYNGRAPH_BEGIN_NAMESPACE

// What a kernel sees: the node being evaluated and views of its inputs'
// forward values.
struct OpContext {
  const ComputationGraph& cg;
  const Node& node;
  std::span<const TensorView> xs;
};

// One entry of the op catalog. Adding an op means adding an OpKind and a
// table entry with these three functions.
struct OpDef {
  const char* name;
  // Result shape from input shapes; throws ShapeError (or IndexOutOfBounds,
  // EmptyList, ... for payload problems) at construction time.
  Shape (*infer)(const ComputationGraph& cg, const Node& node, std::span<const Shape> xs);
  // Writes f(xs) into fx.
  void (*forward)(const OpContext& ctx, const TensorView& fx);
  // Adds dE/dxs[i] into dEdxi given dE/df. Leaf kinds have no backward.
  void (*backward)(const OpContext& ctx, const TensorView& fx, const TensorView& dEdf, unsigned i,
                   const TensorView& dEdxi);
};

const OpDef& op_def(OpKind kind);

// Result batch of combining operands with batch counts a and b: equal
// counts, or one of them 1. Throws ShapeError otherwise.
unsigned broadcast_batch(OpKind kind, unsigned a, unsigned b);

DYNGRAPH_END_NAMESPACE
