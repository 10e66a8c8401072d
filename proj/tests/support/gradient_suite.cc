// Built with DYNGRAPH_USE_DOUBLE.
#include "gradient_suite.h"

#include <functional>
#include <random>

#include "dyngraph/cfsm.h"
#include "dyngraph/rnn.h"
#include "dyngraph/tree.h"
#include "gradcheck.h"

namespace gradsuite {

using namespace dyngraph;
using namespace dyngraph::fd;

namespace {

using Rng = std::mt19937_64;

unsigned draw(Rng& rng, unsigned lo, unsigned hi) {
  return lo + static_cast<unsigned>(rng() % (hi - lo + 1));
}

// Registers the leaves a case needs and says how to rebuild them in a graph.
class Operands {
 public:
  Operands(Model& model, Rng& rng) : model_(&model), rng_(&rng) {}

  // Unbatched parameter of any rank <= 2, or a batched vector from a lookup
  // table (possibly with repeated ids).
  std::function<Expression(ComputationGraph&)> make(const Shape& dims_batch1, unsigned batch) {
    if (batch == 1) {
      Parameter p = model_->add_parameters(dims_batch1);
      return [p](ComputationGraph& cg) { return parameter(cg, p); };
    }
    const unsigned rows = draw(*rng_, 1, batch + 1);
    LookupParameter lp = model_->add_lookup_parameters(rows, dims_batch1.rows());
    std::vector<unsigned> ids(batch);
    for (auto& id : ids) id = draw(*rng_, 0, rows - 1);
    return [lp, ids](ComputationGraph& cg) { return lookup_batch(cg, lp, ids); };
  }

  std::function<Expression(ComputationGraph&)> vec(unsigned n, unsigned batch) {
    return make(Shape({n}), batch);
  }

 private:
  Model* model_;
  Rng* rng_;
};

using Leaf = std::function<Expression(ComputationGraph&)>;
// Builds one random instance of an op and returns its loss.
using CaseFactory = std::function<LossBuilder(Model&, Operands&, Rng&, std::uint64_t)>;

LossBuilder reduced(std::function<Expression(ComputationGraph&)> f, std::uint64_t seed) {
  return [f = std::move(f), seed](ComputationGraph& cg) {
    return random_functional(cg, f(cg), seed);
  };
}

unsigned batch_of(Rng& rng) { return rng() % 2 ? 1 : draw(rng, 2, 4); }

Shape random_dims(Rng& rng, bool allow_matrix) {
  if (allow_matrix && rng() % 2) return Shape({draw(rng, 1, 4), draw(rng, 2, 4)});
  return Shape({draw(rng, 1, 5)});
}

std::vector<std::pair<std::string, CaseFactory>> op_cases() {
  std::vector<std::pair<std::string, CaseFactory>> cases;

  cases.emplace_back("input", [](Model&, Operands& ops, Rng& rng, std::uint64_t s) {
    const unsigned n = draw(rng, 1, 5), b = batch_of(rng);
    Leaf x = ops.vec(n, b);
    std::vector<real> c(static_cast<std::size_t>(n) * b);
    std::uniform_real_distribution<double> u(-2, 2);
    for (auto& v : c) v = u(rng);
    return reduced([x, c, n, b](ComputationGraph& cg) {
      Expression k = input(cg, Shape({n}, b), c);
      return cmult(x(cg), k) + k;
    }, s);
  });

  cases.emplace_back("parameter", [](Model& m, Operands&, Rng& rng, std::uint64_t s) {
    Parameter p = m.add_parameters(random_dims(rng, true));
    // The same parameter enters twice; both uses add into one gradient.
    return reduced([p](ComputationGraph& cg) { return cmult(parameter(cg, p), parameter(cg, p)); },
                   s);
  });

  cases.emplace_back("lookup", [](Model& m, Operands&, Rng& rng, std::uint64_t s) {
    const unsigned rows = draw(rng, 1, 4), d = draw(rng, 1, 5);
    LookupParameter e = m.add_lookup_parameters(rows, d);
    const unsigned i = draw(rng, 0, rows - 1), j = draw(rng, 0, rows - 1);
    return reduced([e, i, j](ComputationGraph& cg) {
      return cmult(lookup(cg, e, i), lookup(cg, e, j));
    }, s);
  });

  cases.emplace_back("lookup_batch", [](Model& m, Operands&, Rng& rng, std::uint64_t s) {
    const unsigned rows = draw(rng, 1, 4), d = draw(rng, 1, 5), b = draw(rng, 1, 5);
    LookupParameter e = m.add_lookup_parameters(rows, d);
    std::vector<unsigned> ids(b);
    for (auto& id : ids) id = draw(rng, 0, rows - 1);
    return reduced([e, ids](ComputationGraph& cg) {
      Expression x = lookup_batch(cg, e, ids);
      return cmult(x, x);
    }, s);
  });

  for (const char* name : {"add", "cmult"}) {
    const bool is_add = std::string(name) == "add";
    cases.emplace_back(name, [is_add](Model&, Operands& ops, Rng& rng, std::uint64_t s) {
      const unsigned n = draw(rng, 1, 5);
      const unsigned b = draw(rng, 2, 4);
      const unsigned mode = rng() % 4;  // both 1, both b, a 1, b 1
      Leaf a = ops.vec(n, mode == 0 || mode == 2 ? 1 : b);
      Leaf c = ops.vec(n, mode == 0 || mode == 3 ? 1 : b);
      return reduced([a, c, is_add](ComputationGraph& cg) {
        return is_add ? add(a(cg), c(cg)) : cmult(a(cg), c(cg));
      }, s);
    });
  }

  cases.emplace_back("scalar_mul", [](Model&, Operands& ops, Rng& rng, std::uint64_t s) {
    Leaf x = ops.vec(draw(rng, 1, 5), batch_of(rng));
    const real c = rng() % 5 == 0 ? real(0) : real(static_cast<double>(draw(rng, 0, 400)) / 100 - 2);
    return reduced([x, c](ComputationGraph& cg) { return scalar_mul(x(cg), c); }, s);
  });

  cases.emplace_back("matmul", [](Model& m, Operands& ops, Rng& rng, std::uint64_t s) {
    const unsigned rows = draw(rng, 1, 4), inner = draw(rng, 1, 4);
    Parameter a = m.add_parameters({rows, inner});
    Leaf x = rng() % 3 == 0 ? ops.make(Shape({inner, draw(rng, 2, 3)}), 1)
                            : ops.vec(inner, batch_of(rng));
    return reduced([a, x](ComputationGraph& cg) { return matmul(parameter(cg, a), x(cg)); }, s);
  });

  cases.emplace_back("affine", [](Model& m, Operands& ops, Rng& rng, std::uint64_t s) {
    const unsigned out = draw(rng, 1, 4), pairs = draw(rng, 1, 3), b = batch_of(rng);
    Leaf bias = ops.vec(out, rng() % 2 ? 1 : b);
    std::vector<Parameter> ws;
    std::vector<Leaf> xs;
    for (unsigned k = 0; k < pairs; ++k) {
      const unsigned in = draw(rng, 1, 4);
      ws.push_back(m.add_parameters({out, in}));
      xs.push_back(ops.vec(in, rng() % 2 ? 1 : b));
    }
    return reduced([bias, ws, xs](ComputationGraph& cg) {
      std::vector<Expression> args{bias(cg)};
      for (std::size_t k = 0; k < ws.size(); ++k) {
        args.push_back(parameter(cg, ws[k]));
        args.push_back(xs[k](cg));
      }
      return affine(args);
    }, s);
  });

  cases.emplace_back("concatenate", [](Model&, Operands& ops, Rng& rng, std::uint64_t s) {
    const unsigned parts = draw(rng, 1, 4), b = batch_of(rng);
    std::vector<Leaf> xs;
    for (unsigned k = 0; k < parts; ++k) xs.push_back(ops.vec(draw(rng, 1, 3), b));
    return reduced([xs](ComputationGraph& cg) {
      std::vector<Expression> es;
      for (const auto& x : xs) es.push_back(x(cg));
      return concatenate(es);
    }, s);
  });

  for (const char* name : {"tanh", "logistic"}) {
    const bool is_tanh = std::string(name) == "tanh";
    cases.emplace_back(name, [is_tanh](Model&, Operands& ops, Rng& rng, std::uint64_t s) {
      const unsigned b = batch_of(rng);
      Leaf x = b == 1 ? ops.make(random_dims(rng, true), 1) : ops.vec(draw(rng, 1, 5), b);
      return reduced([x, is_tanh](ComputationGraph& cg) {
        return is_tanh ? tanh(x(cg)) : logistic(x(cg));
      }, s);
    });
  }

  for (const char* name : {"softmax", "log_softmax"}) {
    const bool is_log = std::string(name) == "log_softmax";
    cases.emplace_back(name, [is_log](Model&, Operands& ops, Rng& rng, std::uint64_t s) {
      Leaf x = ops.vec(draw(rng, 1, 5), batch_of(rng));
      return reduced([x, is_log](ComputationGraph& cg) {
        Expression v = scalar_mul(x(cg), 3);
        return is_log ? log_softmax(v) : softmax(v);
      }, s);
    });
  }

  cases.emplace_back("pickneglogsoftmax", [](Model&, Operands& ops, Rng& rng, std::uint64_t s) {
    const unsigned n = draw(rng, 1, 5);
    Leaf x = ops.vec(n, 1);
    const unsigned label = draw(rng, 0, n - 1);
    return reduced([x, label](ComputationGraph& cg) {
      return pickneglogsoftmax(scalar_mul(x(cg), 3), label);
    }, s);
  });

  cases.emplace_back("pickneglogsoftmax_batch", [](Model&, Operands& ops, Rng& rng,
                                                   std::uint64_t s) {
    const unsigned n = draw(rng, 1, 5), b = draw(rng, 1, 4);
    Leaf x = ops.vec(n, b);
    std::vector<unsigned> labels(b);
    for (auto& y : labels) y = draw(rng, 0, n - 1);
    return reduced([x, labels](ComputationGraph& cg) {
      return pickneglogsoftmax_batch(scalar_mul(x(cg), 3), labels);
    }, s);
  });

  cases.emplace_back("sum_batches", [](Model&, Operands& ops, Rng& rng, std::uint64_t s) {
    Leaf x = ops.vec(draw(rng, 1, 5), draw(rng, 1, 4));
    return reduced([x](ComputationGraph& cg) {
      Expression v = x(cg);
      return sum_batches(cmult(v, v));
    }, s);
  });

  cases.emplace_back("pick_range", [](Model&, Operands& ops, Rng& rng, std::uint64_t s) {
    const bool matrix = rng() % 2;
    const unsigned rows = draw(rng, 1, 5);
    Leaf x = matrix ? ops.make(Shape({rows, draw(rng, 2, 3)}), 1) : ops.vec(rows, batch_of(rng));
    const unsigned begin = draw(rng, 0, rows - 1), end = draw(rng, begin + 1, rows);
    return reduced([x, begin, end](ComputationGraph& cg) {
      return pick_range(x(cg), begin, end);
    }, s);
  });

  cases.emplace_back("pick", [](Model&, Operands& ops, Rng& rng, std::uint64_t s) {
    const unsigned n = draw(rng, 1, 5);
    Leaf x = ops.vec(n, batch_of(rng));
    const unsigned idx = draw(rng, 0, n - 1);
    return reduced([x, idx](ComputationGraph& cg) {
      Expression v = x(cg);
      return pick(cmult(v, v), idx);
    }, s);
  });

  return cases;
}

// Every builder case uses its own model, so the check covers all its cells.
std::vector<std::pair<std::string, CaseFactory>> builder_cases() {
  std::vector<std::pair<std::string, CaseFactory>> cases;
  for (auto [name, kind] : {std::pair{"rnn_simple", CellKind::kSimple},
                            std::pair{"rnn_lstm", CellKind::kLstm},
                            std::pair{"rnn_gru", CellKind::kGru}}) {
    cases.emplace_back(name, [kind](Model& m, Operands&, Rng&, std::uint64_t s) {
      auto rnn = std::make_shared<RNNBuilder>(kind, 2, 3, 4, m, "rnn");
      LookupParameter xs = m.add_lookup_parameters(4, 3, "xs");
      return reduced([rnn, xs](ComputationGraph& cg) {
        std::vector<Expression> in;
        for (unsigned t = 0; t < 4; ++t) in.push_back(lookup(cg, xs, t));
        auto outs = rnn->initial_state(cg).transduce(in);
        return concatenate(outs);
      }, s);
    });
  }

  // Seven nodes: a root over two binary nodes over four leaves. One leaf
  // token is unknown and reads row 0.
  static const char* kTree = "(0 (1 good movie) (2 bad zzz))";
  cases.emplace_back("tree_lstm", [](Model& m, Operands&, Rng&, std::uint64_t s) {
    WordIndex words{{"<unk>", 0}, {"good", 1}, {"movie", 2}, {"bad", 3}};
    auto b = std::make_shared<TreeLSTMBuilder>(m, words, 3, 4, "tl");
    auto tree = std::make_shared<Tree>(parse_tree(kTree));
    return reduced([b, tree](ComputationGraph& cg) {
      auto st = b->encode(cg, *tree);
      return concatenate({st.h, st.c});
    }, s);
  });

  cases.emplace_back("tree_rnn", [](Model& m, Operands&, Rng&, std::uint64_t s) {
    WordIndex words{{"<unk>", 0}, {"good", 1}, {"movie", 2}, {"bad", 3}};
    auto b = std::make_shared<TreeRNNBuilder>(m, words, 3, "tr");
    auto tree = std::make_shared<Tree>(parse_tree(kTree));
    return reduced([b, tree](ComputationGraph& cg) { return b->encode(cg, *tree); }, s);
  });

  cases.emplace_back("cfsm", [](Model& m, Operands&, Rng& rng, std::uint64_t s) {
    auto sm = std::make_shared<ClassFactoredSoftmax>(m, 3, ClassMap({0, 0, 1, 1, 1}), "cf");
    Parameter h = m.add_parameters({3}, "h");
    const unsigned word = draw(rng, 0, 4);
    return [sm, h, word, s](ComputationGraph& cg) {
      Expression hv = tanh(parameter(cg, h));
      return sm->neg_log_softmax(cg, hv, word) +
             random_functional(cg, sm->full_log_distribution(cg, hv), s);
    };
  });
  return cases;
}

SuiteEntry run_case(const std::string& name, const CaseFactory& factory, unsigned combos,
                    std::uint64_t seed) {
  SuiteEntry entry;
  entry.name = name;
  for (unsigned k = 0; k < combos; ++k) {
    const std::uint64_t s = seed * 7919 + k;
    Rng rng(s);
    PoolSet pools = new_poolset(MemorySplit{1 << 20, 1 << 20, 1 << 20});
    Model model(pools.parameters, s);
    ComputationGraph cg(pools);
    Operands ops(model, rng);
    LossBuilder loss = factory(model, ops, rng, s);
    randomize(model, rng);
    const GradCheck g = check_gradients(model, cg, loss);
    ++entry.combos;
    entry.cells += g.checked;
    if (!g.ok) ++entry.failures;
    if (g.worst >= entry.worst) {
      entry.worst = g.worst;
      entry.where = g.where;
    }
  }
  return entry;
}

}  // namespace

std::vector<SuiteEntry> run_gradient_suite(unsigned combos, std::uint64_t seed) {
  std::vector<SuiteEntry> out;
  std::uint64_t salt = seed;
  for (const auto& [name, f] : op_cases()) out.push_back(run_case(name, f, combos, ++salt));
  for (const auto& [name, f] : builder_cases())
    out.push_back(run_case(name, f, std::max(3u, combos / 4), ++salt));
  return out;
}

}  // namespace gradsuite
