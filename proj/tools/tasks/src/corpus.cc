#include "dyngraph/tasks/corpus.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "dyngraph/error.h"

DYNGRAPH_BEGIN_NAMESPACE
namespace tasks {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string t; ss >> t;) out.push_back(std::move(t));
  return out;
}

long parse_int(const std::string& s, std::size_t line) {
  long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ParseError(line, "expected an integer, got '" + s + "'");
  return v;
}

}  // namespace

std::vector<Sentence> read_sentences(std::istream& in) {
  std::vector<Sentence> out;
  for (std::string line; std::getline(in, line);) {
    auto toks = split(line);
    if (!toks.empty()) out.push_back(std::move(toks));
  }
  return out;
}

std::vector<TaggedSentence> read_tagged(std::istream& in) {
  std::vector<TaggedSentence> out;
  TaggedSentence cur;
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      if (!cur.words.empty()) out.push_back(std::move(cur));
      cur = {};
      continue;
    }
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size())
      throw ParseError(lineno, "expected 'word<TAB>tag'");
    cur.words.push_back(line.substr(0, tab));
    cur.tags.push_back(line.substr(tab + 1));
  }
  if (!cur.words.empty()) out.push_back(std::move(cur));
  return out;
}

std::vector<LabeledTree> read_trees(std::istream& in) {
  std::vector<LabeledTree> out;
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Tree t = parse_tree(line, lineno);
    if (t.tag < 0) throw ParseError(lineno, "tree root has no label");
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<PairExample> read_pairs(std::istream& in) {
  std::vector<PairExample> out;
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    auto toks = split(line);
    if (toks.empty()) continue;
    if (toks.size() != 3) throw ParseError(lineno, "expected 'word1 word2 label'");
    const long label = parse_int(toks[2], lineno);
    if (label < 0) throw ParseError(lineno, "labels must be non-negative");
    out.push_back({toks[0], toks[1], static_cast<unsigned>(label)});
  }
  return out;
}

std::vector<Document> read_documents(std::istream& in) {
  std::vector<Document> out;
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    auto toks = split(line);
    if (toks.empty()) continue;
    const long label = parse_int(toks[0], lineno);
    if (label != 1 && label != -1) throw ParseError(lineno, "document label must be 1 or -1");
    if (toks.size() < 2) throw ParseError(lineno, "document has no words");
    out.push_back({static_cast<int>(label), {toks.begin() + 1, toks.end()}});
  }
  return out;
}

void write_sentences(std::ostream& out, const std::vector<Sentence>& data) {
  for (const auto& s : data) {
    for (std::size_t i = 0; i < s.size(); ++i) out << (i ? " " : "") << s[i];
    out << '\n';
  }
}

void write_tagged(std::ostream& out, const std::vector<TaggedSentence>& data) {
  for (std::size_t k = 0; k < data.size(); ++k) {
    if (k) out << '\n';
    for (std::size_t i = 0; i < data[k].words.size(); ++i)
      out << data[k].words[i] << '\t' << data[k].tags[i] << '\n';
  }
}

std::string tree_to_string(const Tree& t) {
  if (t.is_leaf()) return t.label;
  std::string s = "(" + (t.tag >= 0 ? std::to_string(t.tag) : t.label);
  for (const auto& c : t.children) s += " " + tree_to_string(c);
  return s + ")";
}

void write_trees(std::ostream& out, const std::vector<LabeledTree>& data) {
  for (const auto& t : data) out << tree_to_string(t) << '\n';
}

void write_pairs(std::ostream& out, const std::vector<PairExample>& data) {
  for (const auto& p : data) out << p.first << ' ' << p.second << ' ' << p.label << '\n';
}

void write_documents(std::ostream& out, const std::vector<Document>& data) {
  for (const auto& d : data) {
    out << d.label;
    for (const auto& w : d.words) out << ' ' << w;
    out << '\n';
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FileError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace tasks
DYNGRAPH_END_NAMESPACE
