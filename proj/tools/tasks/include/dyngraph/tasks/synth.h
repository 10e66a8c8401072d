#pragma once

#include <cstdint>
#include <vector>

#include "dyngraph/tasks/corpus.h"

#include "dyngraph/config.h"

DYNGRAPH_BEGIN_NAMESPACE
namespace tasks {

// Deterministic toy corpora. Equal arguments give identical output.

template <class T>
struct Split {
  std::vector<T> train;
  std::vector<T> dev;
};

// Tokens w0..w{V-1}. A sentence starts at a random token s and runs
// s, s+1, ..., w{V-1}, then w0..w{V-1} once more. Only the first token is
// random, so a model that learns the pattern approaches perplexity 1.
Split<Sentence> synth_rnnlm(unsigned train, unsigned dev, unsigned vocab, std::uint64_t seed);

// Words are a random stem plus one of nine suffixes; the tag is a function
// of the suffix alone. `vocab` lexicon words are shared by train and dev and
// each split starts with a full pass over the lexicon. With rare_fraction >
// 0 that fraction of tokens are fresh one-off words.
Split<TaggedSentence> synth_tagger(unsigned train, unsigned dev, unsigned vocab,
                                   double rare_fraction, std::uint64_t seed);

// Binary trees over polar and neutral words with preterminals. Every
// internal node is labeled clamp(2 + sum of leaf polarities, 0, 4).
Split<LabeledTree> synth_trees(unsigned train, unsigned dev, std::uint64_t seed);

// word1 word2 label with label = index(word1) mod classes. The training split
// opens with one example per word so every word is seen.
Split<PairExample> synth_pairs(unsigned train, unsigned dev, unsigned vocab, unsigned classes,
                               std::uint64_t seed);

// Documents open with two words that reveal the label, followed by 8 to 18
// neutral words that occur equally in both classes.
Split<Document> synth_documents(unsigned train, unsigned dev, std::uint64_t seed);

}  // namespace tasks
DYNGRAPH_END_NAMESPACE
