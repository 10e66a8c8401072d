#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dyngraph/expr.h"
#include "dyngraph/params.h"

DYNGRAPH_BEGIN_NAMESPACE

enum class CellKind { kSimple, kLstm, kGru };

CellKind parse_cell_kind(std::string_view name);

class RNNBuilder;

// Immutable recurrent state: one hidden vector per layer (plus a memory
// cell per layer for LSTMs). add_input returns a new state and leaves this
// one usable, so states form a tree and several continuations can share a
// prefix.
class RNNState {
 public:
  RNNState() = default;

  RNNState add_input(const Expression& x) const;
  // Folds add_input over xs and collects every output.
  std::vector<Expression> transduce(std::span<const Expression> xs) const;

  // Top-layer hidden vector.
  const Expression& output() const { return h_.back(); }
  std::span<const Expression> h() const { return h_; }
  std::span<const Expression> c() const { return c_; }
  // Steps taken from the initial state.
  unsigned depth() const { return depth_; }

 private:
  friend class RNNBuilder;

  // Parameter nodes of each layer, created once per graph and shared by
  // every state derived from the same initial state.
  struct LayerParams {
    Expression wx, wh, b;
  };

  const RNNBuilder* builder_ = nullptr;
  std::vector<LayerParams> params_;
  std::vector<Expression> h_;
  std::vector<Expression> c_;
  unsigned depth_ = 0;
};

// Stacked recurrent network. Parameters per layer:
//   simple  Wx [H x in], Wh [H x H],   b [H]
//   lstm    Wx [4H x in], Wh [4H x H], b [4H]   gates i, f, o, g
//   gru     Wx [3H x in], Wh [3H x H], b [3H]   gates z, r, candidate
// Layer 0 reads the input; layer l > 0 reads layer l-1's new hidden vector.
class RNNBuilder {
 public:
  RNNBuilder(CellKind kind, unsigned layers, unsigned input_dim, unsigned hidden_dim, Model& model,
             const std::string& name = "rnn");

  // Zero hidden (and cell) vectors in the given graph.
  RNNState initial_state(ComputationGraph& cg) const;

  CellKind kind() const { return kind_; }
  unsigned layers() const { return static_cast<unsigned>(layers_.size()); }
  unsigned input_dim() const { return input_dim_; }
  unsigned hidden_dim() const { return hidden_; }

  struct Layer {
    Parameter wx, wh, b;
  };
  std::span<const Layer> parameters() const { return layers_; }

 private:
  friend class RNNState;
  void step(const RNNState& prev, const Expression& x, RNNState& next) const;

  CellKind kind_;
  unsigned input_dim_;
  unsigned hidden_;
  std::vector<Layer> layers_;
};

DYNGRAPH_END_NAMESPACE
