#include "dyngraph/tree.h"

#include <cctype>
#include <charconv>

#include "dyngraph/error.h"

DYNGRAPH_BEGIN_NAMESPACE

std::size_t Tree::node_count() const {
  std::size_t n = 1;
  for (const auto& c : children) n += c.node_count();
  return n;
}

namespace {

class TreeParser {
 public:
  TreeParser(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  Tree parse() {
    Tree t = node();
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters after tree");
    return t;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError(line_, why + " at column " + std::to_string(pos_ + 1));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string token() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')')
      ++pos_;
    if (pos_ == start) fail("expected a token");
    return std::string(text_.substr(start, pos_ - start));
  }

  Tree node() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (text_[pos_] == ')') fail("unexpected ')'");
    if (text_[pos_] != '(') return Tree{token(), -1, {}};
    ++pos_;
    Tree t;
    t.label = token();
    int tag = 0;
    auto [p, ec] = std::from_chars(t.label.data(), t.label.data() + t.label.size(), tag);
    if (ec == std::errc() && p == t.label.data() + t.label.size()) t.tag = tag;
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) fail("missing ')'");
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      t.children.push_back(node());
    }
    if (t.children.empty()) fail("node '" + t.label + "' has no children");
    return t;
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

unsigned word_id(const WordIndex& words, const std::string& token) {
  auto it = words.find(token);
  return it == words.end() ? 0u : it->second;
}

void check_arity(const Tree& t) {
  if (t.children.size() > 2)
    throw BadShape("tree node '" + t.label + "' has " + std::to_string(t.children.size()) +
                   " children; only unary and binary nodes are supported");
}

}  // namespace

Tree parse_tree(std::string_view text, std::size_t line) { return TreeParser(text, line).parse(); }

TreeRNNBuilder::TreeRNNBuilder(Model& model, WordIndex words, unsigned hidden_dim,
                               const std::string& name)
    : words_(std::move(words)) {
  if (words_.empty()) throw BadShape("TreeRNNBuilder needs a nonempty vocabulary");
  w_ = model.add_parameters({hidden_dim, 2 * hidden_dim}, name + ".W");
  e_ = model.add_lookup_parameters(static_cast<unsigned>(words_.size()), hidden_dim, name + ".E");
}

Expression TreeRNNBuilder::encode(ComputationGraph& cg, const Tree& tree) const {
  return encode(cg, tree, parameter(cg, w_));
}

Expression TreeRNNBuilder::encode(ComputationGraph& cg, const Tree& tree,
                                  const Expression& w) const {
  if (tree.is_leaf()) return lookup(cg, e_, word_id(words_, tree.label));
  check_arity(tree);
  if (tree.children.size() == 1) return encode(cg, tree.children[0], w);
  Expression e1 = encode(cg, tree.children[0], w);
  Expression e2 = encode(cg, tree.children[1], w);
  return tanh(w * concatenate({e1, e2}));
}

TreeLSTMBuilder::TreeLSTMBuilder(Model& model, WordIndex words, unsigned embed_dim,
                                 unsigned hidden_dim, const std::string& name)
    : words_(std::move(words)), hidden_(hidden_dim) {
  if (words_.empty()) throw BadShape("TreeLSTMBuilder needs a nonempty vocabulary");
  e_ = model.add_lookup_parameters(static_cast<unsigned>(words_.size()), embed_dim, name + ".E");
  w_leaf_ = model.add_parameters({3 * hidden_dim, embed_dim}, name + ".W_leaf");
  b_leaf_ = model.add_parameters({3 * hidden_dim}, name + ".b_leaf");
  u_ = model.add_parameters({5 * hidden_dim, 2 * hidden_dim}, name + ".U");
  b_ = model.add_parameters({5 * hidden_dim}, name + ".b");
}

TreeLSTMBuilder::State TreeLSTMBuilder::encode(ComputationGraph& cg, const Tree& tree) const {
  Bound p{parameter(cg, w_leaf_), parameter(cg, b_leaf_), parameter(cg, u_), parameter(cg, b_)};
  return encode(cg, tree, p);
}

TreeLSTMBuilder::State TreeLSTMBuilder::encode(ComputationGraph& cg, const Tree& tree,
                                               const Bound& p) const {
  const unsigned H = hidden_;
  if (tree.is_leaf()) {
    Expression x = lookup(cg, e_, word_id(words_, tree.label));
    Expression g = affine({p.b_leaf, p.w_leaf, x});
    Expression i = logistic(pick_range(g, 0, H));
    Expression o = logistic(pick_range(g, H, 2 * H));
    Expression u = tanh(pick_range(g, 2 * H, 3 * H));
    Expression c = cmult(i, u);
    return {cmult(o, tanh(c)), c};
  }
  check_arity(tree);
  if (tree.children.size() == 1) return encode(cg, tree.children[0], p);
  State l = encode(cg, tree.children[0], p);
  State r = encode(cg, tree.children[1], p);
  Expression g = affine({p.b, p.u, concatenate({l.h, r.h})});
  Expression i = logistic(pick_range(g, 0, H));
  Expression fl = logistic(pick_range(g, H, 2 * H));
  Expression fr = logistic(pick_range(g, 2 * H, 3 * H));
  Expression o = logistic(pick_range(g, 3 * H, 4 * H));
  Expression u = tanh(pick_range(g, 4 * H, 5 * H));
  Expression c = cmult(i, u) + cmult(fl, l.c) + cmult(fr, r.c);
  return {cmult(o, tanh(c)), c};
}

DYNGRAPH_END_NAMESPACE
