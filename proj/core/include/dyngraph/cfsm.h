#pragma once

#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dyngraph/expr.h"
#include "dyngraph/params.h"

DYNGRAPH_BEGIN_NAMESPACE

// Partition of a vocabulary into classes. Word ids are dense [0, |V|).
class ClassMap {
 public:
  // class_of[w] is the class of word w; classes must be dense [0, C).
  explicit ClassMap(std::vector<unsigned> class_of);

  // Reads "word class_id" lines. Every word in `vocabulary` (index = word
  // id) must appear; class ids are renumbered densely in increasing order.
  static ClassMap load(const std::filesystem::path& path, std::span<const std::string> vocabulary);

  unsigned num_words() const { return static_cast<unsigned>(class_of_.size()); }
  unsigned num_classes() const { return static_cast<unsigned>(members_.size()); }
  unsigned class_of(unsigned word) const { return class_of_[word]; }
  unsigned index_in_class(unsigned word) const { return index_in_class_[word]; }
  std::span<const unsigned> members(unsigned cls) const { return members_[cls]; }

 private:
  std::vector<unsigned> class_of_;
  std::vector<unsigned> index_in_class_;
  std::vector<std::vector<unsigned>> members_;
};

// Two-level softmax: p(w | h) = p(class(w) | h) * p(w | class(w), h). Each
// level is an affine map of h followed by a softmax, so a word costs
// O(C + |V_c|) instead of O(|V|).
class ClassFactoredSoftmax {
 public:
  ClassFactoredSoftmax(Model& model, unsigned hidden_dim, ClassMap classes,
                       const std::string& name = "cfsm");

  // -log p(word | h). Throws UnknownWord for ids outside the class map.
  Expression neg_log_softmax(ComputationGraph& cg, const Expression& h, unsigned word) const;
  // log p(w | h) for every word, indexed by word id.
  Expression full_log_distribution(ComputationGraph& cg, const Expression& h) const;
  // Draws a class, then a word inside it. Evaluates the graph.
  unsigned sample(ComputationGraph& cg, const Expression& h, std::mt19937& rng) const;

  const ClassMap& classes() const { return classes_; }

 private:
  Expression class_scores(ComputationGraph& cg, const Expression& h) const;
  Expression word_scores(ComputationGraph& cg, const Expression& h, unsigned cls) const;

  ClassMap classes_;
  Parameter class_w_, class_b_;
  std::vector<Parameter> word_w_, word_b_;
};

DYNGRAPH_END_NAMESPACE
