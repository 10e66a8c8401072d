#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dyngraph/tree.h"

#include "dyngraph/config.h"

DYNGRAPH_BEGIN_NAMESPACE
namespace tasks {

using Sentence = std::vector<std::string>;

struct TaggedSentence {
  std::vector<std::string> words;
  std::vector<std::string> tags;
};

// Root label is tree.tag.
using LabeledTree = Tree;

struct PairExample {
  std::string first, second;
  unsigned label = 0;
};

// Binary document; label is +1 or -1.
struct Document {
  int label = 1;
  std::vector<std::string> words;
};

// One sentence per line, whitespace tokenized. Blank lines are skipped.
std::vector<Sentence> read_sentences(std::istream& in);
// "word<TAB>tag" per line, blank line between sentences.
std::vector<TaggedSentence> read_tagged(std::istream& in);
// One s-expression per line; the root must carry a label.
std::vector<LabeledTree> read_trees(std::istream& in);
// "word1 word2 label" per line.
std::vector<PairExample> read_pairs(std::istream& in);
// "label word word ..." per line with label 1 or -1.
std::vector<Document> read_documents(std::istream& in);

void write_sentences(std::ostream& out, const std::vector<Sentence>& data);
void write_tagged(std::ostream& out, const std::vector<TaggedSentence>& data);
void write_trees(std::ostream& out, const std::vector<LabeledTree>& data);
void write_pairs(std::ostream& out, const std::vector<PairExample>& data);
void write_documents(std::ostream& out, const std::vector<Document>& data);

std::string tree_to_string(const Tree& t);

// Opens a file for reading or writing, throwing FileError on failure.
std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace tasks
DYNGRAPH_END_NAMESPACE
