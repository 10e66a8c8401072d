#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dyngraph/config.h"

DYNGRAPH_BEGIN_NAMESPACE
namespace tasks {

// Dense token ids. Id 0 is always the unknown token.
class Vocab {
 public:
  static constexpr unsigned kUnk = 0;
  static constexpr const char* kUnkToken = "<unk>";

  Vocab();

  // Adds a token if absent and returns its id.
  unsigned add(std::string_view token);
  // Id of a token, kUnk when absent.
  unsigned id(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(unsigned id) const { return tokens_.at(id); }
  unsigned size() const { return static_cast<unsigned>(tokens_.size()); }
  std::span<const std::string> tokens() const { return tokens_; }

 private:
  std::unordered_map<std::string, unsigned> ids_;
  std::vector<std::string> tokens_;
};

// Tokens seen fewer than `min_count` times are left out (they map to the
// unknown id). Ids follow first occurrence. Throws EmptyList on an empty
// corpus.
Vocab build_vocab(std::span<const std::vector<std::string>> sentences, unsigned min_count);

// Occurrence counts.
std::unordered_map<std::string, unsigned> count_tokens(
    std::span<const std::vector<std::string>> sentences);

}  // namespace tasks
DYNGRAPH_END_NAMESPACE
