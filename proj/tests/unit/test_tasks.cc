#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dyngraph/error.h"
#include "dyngraph/tasks/corpus.h"
#include "dyngraph/tasks/synth.h"
#include "dyngraph/tasks/tasks.h"
#include "dyngraph/tasks/vocab.h"

using namespace dyngraph;
using namespace dyngraph::tasks;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

template <class F>
std::size_t parse_error_line(F&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("vocabulary thresholds") {
  std::vector<Sentence> corpus{{"a", "a", "a", "b"}};
  Vocab v = build_vocab(corpus, 2);
  CHECK(v.size() == 2);
  CHECK(v.token(0) == "<unk>");
  CHECK(v.id("a") == 1);
  CHECK(v.id("b") == Vocab::kUnk);
  CHECK(!v.contains("b"));

  Vocab all = build_vocab(corpus, 1);
  CHECK(all.size() == 3);
  CHECK(all.id("b") == 2);

  CHECK_THROWS_AS(build_vocab(std::vector<Sentence>{}, 1), EmptyList);
  CHECK(count_tokens(corpus).at("a") == 3);
}

TEST_CASE("readers") {
  std::istringstream sents("the cat\n\n  sat  down \n");
  auto s = read_sentences(sents);
  REQUIRE(s.size() == 2);
  CHECK(s[1] == Sentence{"sat", "down"});

  std::istringstream tagged("a\tD\ncat\tN\n\nran\tV\n");
  auto t = read_tagged(tagged);
  REQUIRE(t.size() == 2);
  CHECK(t[0].tags == std::vector<std::string>{"D", "N"});
  CHECK(t[1].words == std::vector<std::string>{"ran"});

  std::istringstream trees("(1 (0 a) (2 b))\n(3 c)\n");
  auto tr = read_trees(trees);
  REQUIRE(tr.size() == 2);
  CHECK(tr[0].tag == 1);
  CHECK(tree_to_string(tr[0]) == "(1 (0 a) (2 b))");

  std::istringstream pairs("x y 2\n");
  auto p = read_pairs(pairs);
  REQUIRE(p.size() == 1);
  CHECK(p[0].label == 2);

  std::istringstream docs("-1 foo bar\n1 baz\n");
  auto d = read_documents(docs);
  REQUIRE(d.size() == 2);
  CHECK(d[0].label == -1);
  CHECK(d[1].words == std::vector<std::string>{"baz"});
}

TEST_CASE("parse errors carry line numbers") {
  CHECK(parse_error_line([] {
          std::istringstream in("a\tD\nbroken line\n");
          read_tagged(in);
        }) == 2);
  CHECK(parse_error_line([] {
          std::istringstream in("(1 a)\n(2 (1 b)\n");
          read_trees(in);
        }) == 2);
  CHECK(parse_error_line([] {
          std::istringstream in("(1 a)\n\n(x)\n");
          read_trees(in);
        }) == 3);
  CHECK(parse_error_line([] {
          std::istringstream in("a b c\n");
          read_pairs(in);
        }) == 1);
  CHECK(parse_error_line([] {
          std::istringstream in("1 a\n0 b\n");
          read_documents(in);
        }) == 2);
  CHECK_THROWS_AS(open_input("/nonexistent/dir/file"), FileError);
}

TEST_CASE("writers round trip") {
  auto data = synth_tagger(20, 0, 40, 0.1, 5).train;
  std::stringstream ss;
  write_tagged(ss, data);
  auto back = read_tagged(ss);
  REQUIRE(back.size() == data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(back[i].words == data[i].words);
    CHECK(back[i].tags == data[i].tags);
  }
  auto trees = synth_trees(10, 0, 2).train;
  std::stringstream ts;
  write_trees(ts, trees);
  auto tback = read_trees(ts);
  REQUIRE(tback.size() == trees.size());
  for (std::size_t i = 0; i < trees.size(); ++i) CHECK(tree_to_string(tback[i]) == tree_to_string(trees[i]));
}

TEST_CASE("generators honor sizes and vocabulary") {
  auto lm = synth_rnnlm(500, 50, 10, 1);
  CHECK(lm.train.size() == 500);
  CHECK(lm.dev.size() == 50);
  std::set<std::string> words;
  for (auto& s : lm.train) words.insert(s.begin(), s.end());
  CHECK(words.size() == 10);

  auto tg = synth_tagger(500, 100, 300, 0, 1);
  CHECK(tg.train.size() == 500);
  CHECK(tg.dev.size() == 100);
  std::set<std::string> lex;
  for (auto& s : tg.train) {
    lex.insert(s.words.begin(), s.words.end());
    CHECK(s.words.size() == s.tags.size());
  }
  CHECK(lex.size() == 300);

  auto pc = synth_pairs(1000, 200, 50, 4, 1);
  CHECK(pc.train.size() == 1000);
  std::set<std::string> pw;
  for (auto& p : pc.train) {
    pw.insert(p.first);
    pw.insert(p.second);
    CHECK(p.label < 4);
  }
  CHECK(pw.size() == 50);

  auto tr = synth_trees(20, 0, 1);
  CHECK(tr.train.size() == 20);
  CHECK(tr.dev.empty());
  auto docs = synth_documents(500, 200, 1);
  CHECK(docs.train.size() == 500);
  CHECK(docs.dev.size() == 200);
}

TEST_CASE("generation is deterministic per seed") {
  auto dir = fs::temp_directory_path() / "dyngraph_test_gen";
  fs::create_directories(dir);
  for (auto task : {Task::kRnnlm, Task::kTagger, Task::kTreeLstm, Task::kPairclass, Task::kEarlystop}) {
    TaskConfig cfg;
    cfg.task = task;
    cfg.gen_train = 120;
    cfg.gen_dev = 11;
    cfg.seed = 5;
    generate(cfg, dir / "a_train", dir / "a_dev");
    generate(cfg, dir / "b_train", dir / "b_dev");
    CHECK(slurp(dir / "a_train") == slurp(dir / "b_train"));
    CHECK(slurp(dir / "a_dev") == slurp(dir / "b_dev"));
    cfg.seed = 6;
    generate(cfg, dir / "c_train", dir / "c_dev");
    CHECK(slurp(dir / "a_train") != slurp(dir / "c_train"));

    // Exactly the requested number of sentences, trees or lines.
    std::ifstream in(dir / "a_train");
    std::size_t count = 0;
    if (task == Task::kTagger) {
      count = read_tagged(in).size();
    } else {
      std::string line;
      while (std::getline(in, line)) count += !line.empty();
    }
    CHECK(count == 120);
  }
  fs::remove_all(dir);
}
