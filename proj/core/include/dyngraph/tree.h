#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dyngraph/expr.h"
#include "dyngraph/params.h"

DYNGRAPH_BEGIN_NAMESPACE

// Token -> embedding row.
using WordIndex = std::unordered_map<std::string, unsigned>;

// Leaf (token, no children), unary or binary node. Internal nodes may carry
// an integer label, -1 when absent.
struct Tree {
  std::string label;
  int tag = -1;
  std::vector<Tree> children;

  bool is_leaf() const { return children.empty(); }
  std::size_t node_count() const;
};

// Parses one s-expression such as "(3 (2 good) (1 movie))". A bare token is
// a leaf. `line` is only used for error messages.
Tree parse_tree(std::string_view text, std::size_t line = 1);

// Recursive network with tanh composition:
//   leaf    -> E[token] (unknown tokens use row 0)
//   unary   -> encoding of the child
//   binary  -> tanh(W * [enc(left); enc(right)])
class TreeRNNBuilder {
 public:
  TreeRNNBuilder(Model& model, WordIndex words, unsigned hidden_dim,
                 const std::string& name = "treernn");

  Expression encode(ComputationGraph& cg, const Tree& tree) const;

  Parameter w() const { return w_; }
  LookupParameter embeddings() const { return e_; }

 private:
  Expression encode(ComputationGraph& cg, const Tree& tree, const Expression& w) const;

  WordIndex words_;
  Parameter w_;
  LookupParameter e_;
};

// Binary N-ary tree LSTM. Leaves read their token embedding and have no
// children; binary nodes read both children's (h, c) with one forget gate
// per child; unary nodes pass their child's state through.
//   leaf:   [i; o; u] = W_leaf x + b_leaf
//   binary: [i; f_l; f_r; o; u] = U [h_l; h_r] + b
//   c = sigm(i) . tanh(u) + sigm(f_l) . c_l + sigm(f_r) . c_r,  h = sigm(o) . tanh(c)
class TreeLSTMBuilder {
 public:
  struct State {
    Expression h, c;
  };

  TreeLSTMBuilder(Model& model, WordIndex words, unsigned embed_dim, unsigned hidden_dim,
                  const std::string& name = "treelstm");

  State encode(ComputationGraph& cg, const Tree& tree) const;

  unsigned hidden_dim() const { return hidden_; }
  LookupParameter embeddings() const { return e_; }

 private:
  struct Bound {
    Expression w_leaf, b_leaf, u, b;
  };
  State encode(ComputationGraph& cg, const Tree& tree, const Bound& p) const;

  WordIndex words_;
  unsigned hidden_;
  LookupParameter e_;
  Parameter w_leaf_, b_leaf_, u_, b_;
};

DYNGRAPH_END_NAMESPACE
