#include "dyngraph/tasks/models.h"

#include <algorithm>
#include <cmath>

#include "dyngraph/error.h"

DYNGRAPH_BEGIN_NAMESPACE
namespace tasks {

namespace {

Expression sum(std::span<const Expression> xs) {
  if (xs.empty()) throw EmptyList("cannot sum an empty list of expressions");
  Expression acc = xs[0];
  for (std::size_t i = 1; i < xs.size(); ++i) acc = acc + xs[i];
  return acc;
}

}  // namespace

LanguageModel::LanguageModel(Model& model, unsigned vocab, unsigned embed, unsigned hidden)
    : embed_(model.add_lookup_parameters(vocab, embed, "lm.E")),
      rnn_(CellKind::kLstm, 1, embed, hidden, model, "lm.lstm"),
      out_w_(model.add_parameters({vocab, hidden}, "lm.W")),
      out_b_(model.add_parameters({vocab}, "lm.b")) {}

std::vector<Expression> LanguageModel::step_losses(ComputationGraph& cg,
                                                   std::span<const unsigned> sentence) const {
  if (sentence.size() < 2) throw LengthMismatch("a sentence needs at least two markers");
  const Expression w = parameter(cg, out_w_);
  const Expression b = parameter(cg, out_b_);
  RNNState state = rnn_.initial_state(cg);
  std::vector<Expression> out;
  out.reserve(sentence.size() - 1);
  for (std::size_t t = 0; t + 1 < sentence.size(); ++t) {
    state = state.add_input(lookup(cg, embed_, sentence[t]));
    out.push_back(pickneglogsoftmax(affine({b, w, state.output()}), sentence[t + 1]));
  }
  return out;
}

Expression LanguageModel::loss(ComputationGraph& cg, std::span<const unsigned> sentence) const {
  return sum(step_losses(cg, sentence));
}

std::vector<Expression> LanguageModel::batch_step_losses(
    ComputationGraph& cg, std::span<const std::vector<unsigned>> batch, unsigned pad) const {
  if (batch.empty()) throw EmptyBatch("language model batch is empty");
  std::size_t longest = 0;
  for (const auto& s : batch) {
    if (s.size() < 2) throw LengthMismatch("a sentence needs at least two markers");
    longest = std::max(longest, s.size());
  }
  const auto n = static_cast<unsigned>(batch.size());
  const Expression w = parameter(cg, out_w_);
  const Expression b = parameter(cg, out_b_);
  RNNState state = rnn_.initial_state(cg);
  std::vector<unsigned> in(n), next(n);
  std::vector<real> mask(n);
  std::vector<Expression> out;
  out.reserve(longest - 1);
  for (std::size_t t = 0; t + 1 < longest; ++t) {
    bool padded = false;
    for (unsigned k = 0; k < n; ++k) {
      const auto& s = batch[k];
      const bool live = t + 1 < s.size();
      in[k] = t < s.size() ? s[t] : pad;
      next[k] = live ? s[t + 1] : pad;
      mask[k] = live ? real(1) : real(0);
      padded = padded || !live;
    }
    state = state.add_input(lookup_batch(cg, embed_, in));
    Expression step = pickneglogsoftmax_batch(affine({b, w, state.output()}), next);
    if (padded) step = cmult(step, input(cg, Shape({1}, n), mask));
    out.push_back(step);
  }
  return out;
}

Expression LanguageModel::batch_loss(ComputationGraph& cg,
                                     std::span<const std::vector<unsigned>> batch,
                                     unsigned pad) const {
  auto steps = batch_step_losses(cg, batch, pad);
  for (auto& s : steps) s = sum_batches(s);
  return sum(steps);
}

Tagger::Tagger(Model& model, const Vocab& words, unsigned tags, const Dims& dims,
               const Vocab* chars)
    : words_(&words),
      chars_(chars),
      word_embed_(model.add_lookup_parameters(words.size(), dims.embed, "tag.E")),
      fwd_(CellKind::kLstm, 1, dims.embed, dims.hidden, model, "tag.fwd"),
      bwd_(CellKind::kLstm, 1, dims.embed, dims.hidden, model, "tag.bwd"),
      mlp_w_(model.add_parameters({dims.mlp, 2 * dims.hidden}, "tag.mlp.W")),
      mlp_b_(model.add_parameters({dims.mlp}, "tag.mlp.b")),
      out_w_(model.add_parameters({tags, dims.mlp}, "tag.out.W")),
      out_b_(model.add_parameters({tags}, "tag.out.b")) {
  if (!chars) return;
  char_embed_ = model.add_lookup_parameters(chars->size(), dims.char_embed, "tag.C");
  char_fwd_.emplace(CellKind::kLstm, 1, dims.char_embed, dims.char_hidden, model, "tag.cfwd");
  char_bwd_.emplace(CellKind::kLstm, 1, dims.char_embed, dims.char_hidden, model, "tag.cbwd");
  proj_w_ = model.add_parameters({dims.embed, 2 * dims.char_hidden}, "tag.proj.W");
  proj_b_ = model.add_parameters({dims.embed}, "tag.proj.b");
}

Expression Tagger::embed(ComputationGraph& cg, const std::string& word) const {
  if (!chars_ || words_->contains(word)) return lookup(cg, word_embed_, words_->id(word));
  std::vector<Expression> cs;
  cs.reserve(word.size());
  for (char c : word) cs.push_back(lookup(cg, char_embed_, chars_->id(std::string(1, c))));
  RNNState f = char_fwd_->initial_state(cg);
  for (const auto& x : cs) f = f.add_input(x);
  RNNState r = char_bwd_->initial_state(cg);
  for (auto it = cs.rbegin(); it != cs.rend(); ++it) r = r.add_input(*it);
  return affine({parameter(cg, proj_b_), parameter(cg, proj_w_),
                 concatenate({f.output(), r.output()})});
}

std::vector<Expression> Tagger::scores(ComputationGraph& cg,
                                       std::span<const std::string> words) const {
  if (words.empty()) throw EmptyList("cannot tag an empty sentence");
  std::vector<Expression> xs;
  xs.reserve(words.size());
  for (const auto& w : words) xs.push_back(embed(cg, w));
  const auto fs = fwd_.initial_state(cg).transduce(xs);
  std::vector<Expression> rev(xs.rbegin(), xs.rend());
  auto bs = bwd_.initial_state(cg).transduce(rev);
  std::reverse(bs.begin(), bs.end());
  const Expression mw = parameter(cg, mlp_w_), mb = parameter(cg, mlp_b_);
  const Expression ow = parameter(cg, out_w_), ob = parameter(cg, out_b_);
  std::vector<Expression> out;
  out.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    Expression h = tanh(affine({mb, mw, concatenate({fs[i], bs[i]})}));
    out.push_back(affine({ob, ow, h}));
  }
  return out;
}

Expression Tagger::loss(ComputationGraph& cg, std::span<const std::string> words,
                        std::span<const unsigned> tags) const {
  if (words.size() != tags.size())
    throw LengthMismatch("sentence has " + std::to_string(words.size()) + " words but " +
                         std::to_string(tags.size()) + " tags");
  auto s = scores(cg, words);
  std::vector<Expression> losses;
  losses.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) losses.push_back(pickneglogsoftmax(s[i], tags[i]));
  return sum(losses);
}

std::vector<unsigned> Tagger::predict(ComputationGraph& cg,
                                      std::span<const std::string> words) const {
  auto s = scores(cg, words);
  std::vector<unsigned> out;
  out.reserve(s.size());
  for (const auto& e : s) out.push_back(argmax(e.value()));
  return out;
}

PairClassifier::PairClassifier(Model& model, unsigned vocab, unsigned embed, unsigned classes)
    : w_(model.add_parameters({classes, 2 * embed}, "pair.W")),
      b_(model.add_parameters({classes}, "pair.b")),
      e_(model.add_lookup_parameters(vocab, embed, "pair.E")) {}

Expression PairClassifier::scores(ComputationGraph& cg, unsigned first, unsigned second) const {
  const Expression w = parameter(cg, w_);
  const Expression b = parameter(cg, b_);
  return softmax(w * concatenate({lookup(cg, e_, first), lookup(cg, e_, second)}) + b);
}

Expression PairClassifier::loss(ComputationGraph& cg, unsigned first, unsigned second,
                                unsigned label) const {
  return pickneglogsoftmax(scores(cg, first, second), label);
}

Expression PairClassifier::batch_scores(ComputationGraph& cg, std::span<const unsigned> first,
                                        std::span<const unsigned> second) const {
  const Expression w = parameter(cg, w_);
  const Expression b = parameter(cg, b_);
  return softmax(w * concatenate({lookup_batch(cg, e_, first), lookup_batch(cg, e_, second)}) + b);
}

Expression PairClassifier::batch_loss(ComputationGraph& cg, std::span<const unsigned> first,
                                      std::span<const unsigned> second,
                                      std::span<const unsigned> labels) const {
  return sum_batches(pickneglogsoftmax_batch(batch_scores(cg, first, second), labels));
}

EarlyStopClassifier::EarlyStopClassifier(Model& model, unsigned vocab, unsigned embed)
    : w_(model.add_parameters({1, embed}, "early.W")),
      b_(model.add_parameters({1}, "early.b")),
      e_(model.add_lookup_parameters(vocab, embed, "early.E")) {}

Expression EarlyStopClassifier::loss(ComputationGraph& cg, std::span<const unsigned> words,
                                     int label) const {
  std::vector<Expression> xs;
  xs.reserve(words.size());
  for (unsigned w : words) xs.push_back(lookup(cg, e_, w));
  Expression score = parameter(cg, w_) * sum(xs) + parameter(cg, b_);
  return logistic(scalar_mul(score, real(-label)));
}

EarlyStopClassifier::Decision EarlyStopClassifier::classify(ComputationGraph& cg,
                                                            std::span<const unsigned> words,
                                                            real threshold) const {
  const Expression w = parameter(cg, w_);
  Expression score = parameter(cg, b_);
  Decision d;
  d.score = score.scalar_value();
  for (unsigned word : words) {
    score = score + w * lookup(cg, e_, word);
    ++d.words_read;
    d.score = score.scalar_value();
    if (std::abs(d.score) > threshold) break;
  }
  return d;
}

TreeClassifier::TreeClassifier(Model& model, WordIndex words, unsigned embed, unsigned hidden,
                               unsigned labels)
    : encoder_(model, std::move(words), embed, hidden, "tree"),
      w_(model.add_parameters({labels, hidden}, "tree.out.W")),
      b_(model.add_parameters({labels}, "tree.out.b")) {}

Expression TreeClassifier::scores(ComputationGraph& cg, const Tree& tree) const {
  return affine({parameter(cg, b_), parameter(cg, w_), encoder_.encode(cg, tree).h});
}

Expression TreeClassifier::loss(ComputationGraph& cg, const Tree& tree) const {
  if (tree.tag < 0) throw ParseError(1, "tree root has no label");
  return pickneglogsoftmax(scores(cg, tree), static_cast<unsigned>(tree.tag));
}

}  // namespace tasks
DYNGRAPH_END_NAMESPACE
