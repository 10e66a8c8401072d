#include "dyngraph/tasks/vocab.h"

#include "dyngraph/error.h"

DYNGRAPH_BEGIN_NAMESPACE
namespace tasks {

Vocab::Vocab() { add(kUnkToken); }

unsigned Vocab::add(std::string_view token) {
  auto [it, inserted] = ids_.try_emplace(std::string(token), size());
  if (inserted) tokens_.emplace_back(token);
  return it->second;
}

unsigned Vocab::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

bool Vocab::contains(std::string_view token) const { return ids_.count(std::string(token)) > 0; }

std::unordered_map<std::string, unsigned> count_tokens(
    std::span<const std::vector<std::string>> sentences) {
  std::unordered_map<std::string, unsigned> counts;
  for (const auto& s : sentences)
    for (const auto& t : s) ++counts[t];
  return counts;
}

Vocab build_vocab(std::span<const std::vector<std::string>> sentences, unsigned min_count) {
  bool any = false;
  for (const auto& s : sentences) any = any || !s.empty();
  if (!any) throw EmptyList("cannot build a vocabulary from an empty corpus");
  const auto counts = count_tokens(sentences);
  Vocab v;
  for (const auto& s : sentences)
    for (const auto& t : s)
      if (counts.at(t) >= min_count) v.add(t);
  return v;
}

}  // namespace tasks
DYNGRAPH_END_NAMESPACE
