#include "dyngraph/tasks/synth.h"

#include <algorithm>
#include <random>
#include <string>
#include <unordered_set>

#include "dyngraph/error.h"

DYNGRAPH_BEGIN_NAMESPACE
namespace tasks {

namespace {

using Rng = std::mt19937_64;

// std::uniform_int_distribution is implementation defined; this keeps the
// corpora identical across standard libraries.
unsigned below(Rng& rng, unsigned n) { return static_cast<unsigned>(rng() % n); }

std::string word(const char* prefix, unsigned i) { return prefix + std::to_string(i); }

constexpr const char* kSuffixes[] = {"ing", "ed", "ly", "er", "est", "ion", "ous", "ful", "ize"};
constexpr unsigned kNumSuffixes = 9;

std::string random_stem(Rng& rng) {
  static constexpr char kLetters[] = "bcdfghjklmnprstvwz";
  static constexpr char kVowels[] = "aeiou";
  const unsigned syllables = 1 + below(rng, 3);
  std::string s;
  for (unsigned i = 0; i < syllables; ++i) {
    s += kLetters[below(rng, sizeof(kLetters) - 1)];
    s += kVowels[below(rng, sizeof(kVowels) - 1)];
  }
  s += kLetters[below(rng, sizeof(kLetters) - 1)];
  return s;
}

}  // namespace

Split<Sentence> synth_rnnlm(unsigned train, unsigned dev, unsigned vocab, std::uint64_t seed) {
  if (vocab < 2) throw ConfigError("rnnlm corpus needs a vocabulary of at least 2");
  Rng rng(seed);
  auto make = [&](unsigned n) {
    std::vector<Sentence> out(n);
    for (auto& s : out) {
      const unsigned start = below(rng, vocab);
      for (unsigned t = start; t < vocab; ++t) s.push_back(word("w", t));
      for (unsigned t = 0; t < vocab; ++t) s.push_back(word("w", t));
    }
    return out;
  };
  Split<Sentence> out;
  out.train = make(train);
  out.dev = make(dev);
  return out;
}

Split<TaggedSentence> synth_tagger(unsigned train, unsigned dev, unsigned vocab,
                                   double rare_fraction, std::uint64_t seed) {
  if (vocab == 0) throw ConfigError("tagger corpus needs a positive vocabulary size");
  Rng rng(seed);
  std::vector<std::string> lexicon;
  std::vector<unsigned> lexicon_tag;
  std::unordered_set<std::string> seen;
  while (lexicon.size() < vocab) {
    const unsigned suffix = below(rng, kNumSuffixes);
    std::string w = random_stem(rng) + kSuffixes[suffix];
    if (!seen.insert(w).second) continue;
    lexicon.push_back(std::move(w));
    lexicon_tag.push_back(suffix);
  }
  auto make = [&](unsigned n) {
    std::vector<unsigned> cover(vocab);
    for (unsigned i = 0; i < vocab; ++i) cover[i] = i;
    std::shuffle(cover.begin(), cover.end(), rng);
    std::size_t next_cover = 0;
    std::vector<TaggedSentence> out(n);
    for (auto& s : out) {
      const unsigned len = 5 + below(rng, 11);
      for (unsigned i = 0; i < len; ++i) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        if (u < rare_fraction) {
          const unsigned suffix = below(rng, kNumSuffixes);
          // The 'q' prefix keeps one-off words out of the lexicon.
          s.words.push_back("q" + random_stem(rng) + random_stem(rng) + kSuffixes[suffix]);
          s.tags.push_back(word("T", suffix));
          continue;
        }
        const unsigned w = next_cover < cover.size() ? cover[next_cover++] : below(rng, vocab);
        s.words.push_back(lexicon[w]);
        s.tags.push_back(word("T", lexicon_tag[w]));
      }
    }
    return out;
  };
  Split<TaggedSentence> out;
  out.train = make(train);
  out.dev = make(dev);
  return out;
}

Split<LabeledTree> synth_trees(unsigned train, unsigned dev, std::uint64_t seed) {
  static const std::vector<std::string> kPositive = {"good", "great", "fine", "nice", "superb"};
  static const std::vector<std::string> kNegative = {"bad", "awful", "poor", "dull", "weak"};
  static const std::vector<std::string> kNeutral = {"the", "a", "movie", "plot",
                                                    "film", "story", "actor", "scene"};
  Rng rng(seed);
  struct Built {
    Tree tree;
    int polarity;
  };
  auto label = [](int polarity) { return std::clamp(2 + polarity, 0, 4); };
  auto leaf = [&]() {
    const unsigned kind = below(rng, 3);
    const auto& pool = kind == 0 ? kPositive : kind == 1 ? kNegative : kNeutral;
    const int polarity = kind == 0 ? 1 : kind == 1 ? -1 : 0;
    Tree pre;
    pre.tag = label(polarity);
    pre.label = std::to_string(pre.tag);
    pre.children.push_back(Tree{pool[below(rng, static_cast<unsigned>(pool.size()))], -1, {}});
    return Built{std::move(pre), polarity};
  };
  auto build = [&](auto&& self, unsigned leaves) -> Built {
    if (leaves == 1) return leaf();
    const unsigned left = 1 + below(rng, leaves - 1);
    Built l = self(self, left);
    Built r = self(self, leaves - left);
    Built b;
    b.polarity = l.polarity + r.polarity;
    b.tree.tag = label(b.polarity);
    b.tree.label = std::to_string(b.tree.tag);
    b.tree.children.push_back(std::move(l.tree));
    b.tree.children.push_back(std::move(r.tree));
    return b;
  };
  auto make = [&](unsigned n) {
    std::vector<LabeledTree> out;
    out.reserve(n);
    for (unsigned i = 0; i < n; ++i) out.push_back(build(build, 2 + below(rng, 6)).tree);
    return out;
  };
  Split<LabeledTree> out;
  out.train = make(train);
  out.dev = make(dev);
  return out;
}

Split<PairExample> synth_pairs(unsigned train, unsigned dev, unsigned vocab, unsigned classes,
                               std::uint64_t seed) {
  if (vocab == 0 || classes == 0) throw ConfigError("pair corpus needs positive vocab and classes");
  Rng rng(seed);
  auto make = [&](unsigned n, bool cover) {
    std::vector<PairExample> out(n);
    for (unsigned i = 0; i < n; ++i) {
      // In training data the first pass covers every word in both positions.
      const bool fixed = cover && i < vocab;
      const unsigned a = fixed ? i : below(rng, vocab);
      const unsigned b = fixed ? (i * 7 + 3) % vocab : below(rng, vocab);
      out[i] = {word("w", a), word("w", b), a % classes};
    }
    return out;
  };
  Split<PairExample> out;
  out.train = make(train, true);
  out.dev = make(dev, false);
  return out;
}

Split<Document> synth_documents(unsigned train, unsigned dev, std::uint64_t seed) {
  constexpr unsigned kSignal = 5, kNeutral = 20;
  Rng rng(seed);
  auto make = [&](unsigned n) {
    std::vector<Document> out(n);
    for (auto& d : out) {
      d.label = below(rng, 2) ? 1 : -1;
      const char* prefix = d.label > 0 ? "pos" : "neg";
      for (int i = 0; i < 2; ++i) d.words.push_back(word(prefix, below(rng, kSignal)));
      const unsigned rest = 8 + below(rng, 11);
      for (unsigned i = 0; i < rest; ++i) d.words.push_back(word("u", below(rng, kNeutral)));
    }
    return out;
  };
  Split<Document> out;
  out.train = make(train);
  out.dev = make(dev);
  return out;
}

}  // namespace tasks
DYNGRAPH_END_NAMESPACE
