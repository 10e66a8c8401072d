#include "dyngraph/rnn.h"

#include "dyngraph/error.h"

DYNGRAPH_BEGIN_NAMESPACE

CellKind parse_cell_kind(std::string_view name) {
  if (name == "simple") return CellKind::kSimple;
  if (name == "lstm") return CellKind::kLstm;
  if (name == "gru") return CellKind::kGru;
  throw ConfigError("unknown cell kind '" + std::string(name) + "' (simple|lstm|gru)");
}

RNNBuilder::RNNBuilder(CellKind kind, unsigned layers, unsigned input_dim, unsigned hidden_dim,
                       Model& model, const std::string& name)
    : kind_(kind), input_dim_(input_dim), hidden_(hidden_dim) {
  if (layers == 0 || input_dim == 0 || hidden_dim == 0)
    throw BadShape("RNNBuilder needs layers, input and hidden dims >= 1");
  const unsigned gates = kind == CellKind::kLstm ? 4 : kind == CellKind::kGru ? 3 : 1;
  for (unsigned l = 0; l < layers; ++l) {
    const unsigned in = l == 0 ? input_dim : hidden_dim;
    const std::string prefix = name + ".l" + std::to_string(l) + ".";
    Layer layer;
    layer.wx = model.add_parameters({gates * hidden_dim, in}, prefix + "Wx");
    layer.wh = model.add_parameters({gates * hidden_dim, hidden_dim}, prefix + "Wh");
    layer.b = model.add_parameters({gates * hidden_dim}, prefix + "b");
    layers_.push_back(layer);
  }
}

RNNState RNNBuilder::initial_state(ComputationGraph& cg) const {
  RNNState s;
  s.builder_ = this;
  const Expression zero = zeros(cg, Shape({hidden_}));
  for (const auto& layer : layers_) {
    s.params_.push_back({parameter(cg, layer.wx), parameter(cg, layer.wh), parameter(cg, layer.b)});
    s.h_.push_back(zero);
    if (kind_ == CellKind::kLstm) s.c_.push_back(zero);
  }
  return s;
}

void RNNBuilder::step(const RNNState& prev, const Expression& x, RNNState& next) const {
  const unsigned H = hidden_;
  Expression in = x;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& p = prev.params_[l];
    const Expression& h = prev.h_[l];
    switch (kind_) {
      case CellKind::kSimple: {
        next.h_[l] = tanh(affine({p.b, p.wx, in, p.wh, h}));
        break;
      }
      case CellKind::kLstm: {
        const Expression& c = prev.c_[l];
        Expression gates = affine({p.b, p.wx, in, p.wh, h});
        Expression i = logistic(pick_range(gates, 0, H));
        Expression f = logistic(pick_range(gates, H, 2 * H));
        Expression o = logistic(pick_range(gates, 2 * H, 3 * H));
        Expression g = tanh(pick_range(gates, 3 * H, 4 * H));
        Expression c_new = cmult(f, c) + cmult(i, g);
        next.c_[l] = c_new;
        next.h_[l] = cmult(o, tanh(c_new));
        break;
      }
      case CellKind::kGru: {
        Expression gx = affine({p.b, p.wx, in});
        Expression zr = logistic(pick_range(gx, 0, 2 * H) + pick_range(p.wh, 0, 2 * H) * h);
        Expression z = pick_range(zr, 0, H);
        Expression r = pick_range(zr, H, 2 * H);
        Expression cand = tanh(pick_range(gx, 2 * H, 3 * H) + pick_range(p.wh, 2 * H, 3 * H) * cmult(r, h));
        // (1 - z) * h + z * cand
        next.h_[l] = h + cmult(z, cand - h);
        break;
      }
    }
    in = next.h_[l];
  }
}

RNNState RNNState::add_input(const Expression& x) const {
  if (builder_ == nullptr) throw Error("add_input on a default-constructed RNNState");
  const Shape& s = x.shape();
  if (s.rank() != 1 || s.rows() != builder_->input_dim())
    throw ShapeError("RNN input must have dims {" + std::to_string(builder_->input_dim()) +
                     "}, got " + s.str());
  RNNState next = *this;
  next.depth_ = depth_ + 1;
  builder_->step(*this, x, next);
  return next;
}

std::vector<Expression> RNNState::transduce(std::span<const Expression> xs) const {
  if (xs.empty()) throw EmptyList("transduce needs a nonempty input sequence");
  std::vector<Expression> out;
  out.reserve(xs.size());
  RNNState s = *this;
  for (const auto& x : xs) {
    s = s.add_input(x);
    out.push_back(s.output());
  }
  return out;
}

DYNGRAPH_END_NAMESPACE
