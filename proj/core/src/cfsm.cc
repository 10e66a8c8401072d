#include "dyngraph/cfsm.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "dyngraph/error.h"

DYNGRAPH_BEGIN_NAMESPACE

ClassMap::ClassMap(std::vector<unsigned> class_of) : class_of_(std::move(class_of)) {
  if (class_of_.empty()) throw BadShape("class map needs at least one word");
  const unsigned classes = *std::max_element(class_of_.begin(), class_of_.end()) + 1;
  members_.resize(classes);
  index_in_class_.resize(class_of_.size());
  for (unsigned w = 0; w < class_of_.size(); ++w) {
    index_in_class_[w] = static_cast<unsigned>(members_[class_of_[w]].size());
    members_[class_of_[w]].push_back(w);
  }
  for (unsigned c = 0; c < classes; ++c)
    if (members_[c].empty())
      throw FormatError("class " + std::to_string(c) + " has no words; class ids must be dense");
}

ClassMap ClassMap::load(const std::filesystem::path& path, std::span<const std::string> vocabulary) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open class map '" + path.string() + "'");
  std::unordered_map<std::string, long> raw;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string word;
    long cls;
    if (!(ss >> word)) continue;
    if (!(ss >> cls) || cls < 0) throw ParseError(lineno, "expected 'word class_id'");
    raw[word] = cls;
  }
  std::map<long, unsigned> dense;
  for (const auto& [w, c] : raw) dense.emplace(c, 0);
  unsigned next = 0;
  for (auto& [c, id] : dense) id = next++;
  std::vector<unsigned> class_of(vocabulary.size());
  for (std::size_t w = 0; w < vocabulary.size(); ++w) {
    auto it = raw.find(vocabulary[w]);
    if (it == raw.end())
      throw FormatError("word '" + vocabulary[w] + "' missing from class map '" + path.string() + "'");
    class_of[w] = dense[it->second];
  }
  return ClassMap(std::move(class_of));
}

ClassFactoredSoftmax::ClassFactoredSoftmax(Model& model, unsigned hidden_dim, ClassMap classes,
                                           const std::string& name)
    : classes_(std::move(classes)) {
  class_w_ = model.add_parameters({classes_.num_classes(), hidden_dim}, name + ".class_W");
  class_b_ = model.add_parameters({classes_.num_classes()}, name + ".class_b");
  for (unsigned c = 0; c < classes_.num_classes(); ++c) {
    const auto n = static_cast<unsigned>(classes_.members(c).size());
    const std::string prefix = name + ".c" + std::to_string(c);
    word_w_.push_back(model.add_parameters({n, hidden_dim}, prefix + ".W"));
    word_b_.push_back(model.add_parameters({n}, prefix + ".b"));
  }
}

Expression ClassFactoredSoftmax::class_scores(ComputationGraph& cg, const Expression& h) const {
  return affine({parameter(cg, class_b_), parameter(cg, class_w_), h});
}

Expression ClassFactoredSoftmax::word_scores(ComputationGraph& cg, const Expression& h,
                                             unsigned cls) const {
  return affine({parameter(cg, word_b_[cls]), parameter(cg, word_w_[cls]), h});
}

Expression ClassFactoredSoftmax::neg_log_softmax(ComputationGraph& cg, const Expression& h,
                                                 unsigned word) const {
  if (word >= classes_.num_words())
    throw UnknownWord("word id " + std::to_string(word) + " is not in the class map");
  const unsigned cls = classes_.class_of(word);
  return pickneglogsoftmax(class_scores(cg, h), cls) +
         pickneglogsoftmax(word_scores(cg, h, cls), classes_.index_in_class(word));
}

Expression ClassFactoredSoftmax::full_log_distribution(ComputationGraph& cg,
                                                       const Expression& h) const {
  Expression class_logp = log_softmax(class_scores(cg, h));
  std::vector<Expression> within;
  within.reserve(classes_.num_classes());
  for (unsigned c = 0; c < classes_.num_classes(); ++c)
    within.push_back(log_softmax(word_scores(cg, h, c)));
  std::vector<Expression> per_word;
  per_word.reserve(classes_.num_words());
  for (unsigned w = 0; w < classes_.num_words(); ++w) {
    const unsigned c = classes_.class_of(w);
    per_word.push_back(pick(class_logp, c) + pick(within[c], classes_.index_in_class(w)));
  }
  return concatenate(per_word);
}

unsigned ClassFactoredSoftmax::sample(ComputationGraph& cg, const Expression& h,
                                      std::mt19937& rng) const {
  auto draw = [&rng](const Tensor& probs) {
    auto d = probs.data();
    std::discrete_distribution<unsigned> dist(d.begin(), d.end());
    return dist(rng);
  };
  const unsigned cls = draw(softmax(class_scores(cg, h)).value());
  const unsigned idx = draw(softmax(word_scores(cg, h, cls)).value());
  return classes_.members(cls)[idx];
}

DYNGRAPH_END_NAMESPACE
