#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dyngraph/expr.h"
#include "dyngraph/params.h"
#include "dyngraph/rnn.h"
#include "dyngraph/tasks/vocab.h"
#include "dyngraph/tree.h"

DYNGRAPH_BEGIN_NAMESPACE
namespace tasks {

// Word-level LSTM language model. A sentence is given as ids including the
// <s> and </s> markers; every token after <s> is predicted.
class LanguageModel {
 public:
  LanguageModel(Model& model, unsigned vocab, unsigned embed, unsigned hidden);

  Expression loss(ComputationGraph& cg, std::span<const unsigned> sentence) const;
  // Lock-step over a batch. Shorter sentences are padded with `pad` and
  // their padded positions masked out of the loss.
  Expression batch_loss(ComputationGraph& cg, std::span<const std::vector<unsigned>> batch,
                        unsigned pad) const;
  // Per-step losses: element t is the loss of predicting token t + 1. In the
  // batched form element t has one batch entry per sentence.
  std::vector<Expression> step_losses(ComputationGraph& cg,
                                      std::span<const unsigned> sentence) const;
  std::vector<Expression> batch_step_losses(ComputationGraph& cg,
                                            std::span<const std::vector<unsigned>> batch,
                                            unsigned pad) const;

 private:
  LookupParameter embed_;
  RNNBuilder rnn_;
  Parameter out_w_, out_b_;
};

// Bidirectional LSTM tagger with an MLP per token. With a char vocabulary,
// words outside the word vocabulary are embedded by a char BiLSTM whose two
// final states are projected to the word embedding size.
class Tagger {
 public:
  struct Dims {
    unsigned embed = 128, hidden = 50, mlp = 32;
    unsigned char_embed = 20, char_hidden = 50;
  };

  Tagger(Model& model, const Vocab& words, unsigned tags, const Dims& dims,
         const Vocab* chars = nullptr);

  Expression loss(ComputationGraph& cg, std::span<const std::string> words,
                  std::span<const unsigned> tags) const;
  std::vector<unsigned> predict(ComputationGraph& cg, std::span<const std::string> words) const;
  bool uses_chars() const { return chars_ != nullptr; }

 private:
  std::vector<Expression> scores(ComputationGraph& cg, std::span<const std::string> words) const;
  Expression embed(ComputationGraph& cg, const std::string& word) const;

  const Vocab* words_;
  const Vocab* chars_;
  LookupParameter word_embed_;
  RNNBuilder fwd_, bwd_;
  Parameter mlp_w_, mlp_b_, out_w_, out_b_;
  LookupParameter char_embed_;
  std::optional<RNNBuilder> char_fwd_, char_bwd_;
  Parameter proj_w_, proj_b_;
};

// Two-word classifier: softmax(W [E[w1]; E[w2]] + b), loss
// pickneglogsoftmax of those probabilities.
class PairClassifier {
 public:
  PairClassifier(Model& model, unsigned vocab, unsigned embed, unsigned classes);

  Expression scores(ComputationGraph& cg, unsigned first, unsigned second) const;
  Expression loss(ComputationGraph& cg, unsigned first, unsigned second, unsigned label) const;
  // Batched form: one lookup_batch per position, one label per element.
  Expression batch_scores(ComputationGraph& cg, std::span<const unsigned> first,
                          std::span<const unsigned> second) const;
  Expression batch_loss(ComputationGraph& cg, std::span<const unsigned> first,
                        std::span<const unsigned> second, std::span<const unsigned> labels) const;

 private:
  Parameter w_, b_;
  LookupParameter e_;
};

// Binary classifier over a bag of words, score = W sum(E[w]) + b.
class EarlyStopClassifier {
 public:
  struct Decision {
    real score = 0;
    unsigned words_read = 0;
  };

  EarlyStopClassifier(Model& model, unsigned vocab, unsigned embed);

  // logistic(-label * score): minimized by scores with the label's sign.
  Expression loss(ComputationGraph& cg, std::span<const unsigned> words, int label) const;
  // Grows the score one word at a time and stops once |score| > threshold.
  Decision classify(ComputationGraph& cg, std::span<const unsigned> words, real threshold) const;

 private:
  Parameter w_, b_;
  LookupParameter e_;
};

// Tree LSTM encoder with a root classifier.
class TreeClassifier {
 public:
  TreeClassifier(Model& model, WordIndex words, unsigned embed, unsigned hidden, unsigned labels);

  Expression scores(ComputationGraph& cg, const Tree& tree) const;
  Expression loss(ComputationGraph& cg, const Tree& tree) const;

 private:
  TreeLSTMBuilder encoder_;
  Parameter w_, b_;
};

}  // namespace tasks
DYNGRAPH_END_NAMESPACE
