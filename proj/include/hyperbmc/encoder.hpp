// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hyperbmc/circuit.hpp"
#include "hyperbmc/error.hpp"
#include "hyperbmc/hyperltl.hpp"
#include "hyperbmc/kripke.hpp"
#include "hyperbmc/qbf.hpp"
#include "hyperbmc/semantics.hpp"

namespace hyperbmc {

/// Number of bits in the binary code of a state index.
inline std::size_t state_bits_for(std::size_t num_states) {
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < num_states) ++bits;
  return bits;
}

/// Variables of one trace variable. Per step: one per proposition in
/// declaration order, then @halt, then the state bits (bit 0 = LSB).
struct TraceLayout {
  std::string var;
  const KripkeStructure* model = nullptr;
  std::size_t state_bits = 0;
  VarId base = 0;

  std::size_t stride() const { return model->num_aps() + 1 + state_bits; }
  VarId ap(std::size_t step, ApId a) const { return static_cast<VarId>(base + step * stride() + a); }
  VarId halt(std::size_t step) const { return static_cast<VarId>(base + step * stride() + model->num_aps()); }
  VarId state_bit(std::size_t step, std::size_t j) const {
    return static_cast<VarId>(base + step * stride() + model->num_aps() + 1 + j);
  }
};

/// Variable numbering for a quantifier prefix at bound k. Blocks follow the
/// prefix; within a block, ids run by step, then proposition, then state bit.
class VarLayout {
 public:
  VarLayout() = default;

  VarLayout(const std::vector<QuantifiedVar>& prefix, const ModelMap& models, std::size_t k) : k_(k) {
    VarId next = 0;
    for (const auto& q : prefix) {
      auto it = models.find(q.var);
      if (it == models.end() || !it->second) throw ConfigError("no model assigned to trace variable " + q.var);
      TraceLayout t{q.var, it->second.get(), state_bits_for(it->second->num_states()), next};
      next = static_cast<VarId>(next + (k + 1) * t.stride());
      index_.emplace(q.var, traces_.size());
      traces_.push_back(std::move(t));
    }
    names_.reserve(next);
    std::set<std::string> used;
    for (const auto& t : traces_) {
      for (std::size_t i = 0; i <= k; ++i) {
        for (ApId a = 0; a < t.model->num_aps(); ++a) add_name(t.model->ap_name(a) + "_" + t.var + "_" + std::to_string(i), used);
        add_name("_halt_" + t.var + "_" + std::to_string(i), used);
        for (std::size_t j = 0; j < t.state_bits; ++j)
          add_name("_sb" + std::to_string(j) + "_" + t.var + "_" + std::to_string(i), used);
      }
    }
  }

  std::size_t bound() const { return k_; }
  std::size_t num_vars() const { return names_.size(); }
  const std::vector<TraceLayout>& traces() const { return traces_; }
  const TraceLayout& trace(const std::string& var) const {
    auto it = index_.find(var);
    if (it == index_.end())
      throw ValidationError(ValidationKind::kDanglingReference, var, "unassigned trace variable '" + var + "'");
    return traces_[it->second];
  }
  const std::string& name(VarId v) const { return names_.at(v); }

  std::vector<VarId> block(const std::string& var) const {
    const auto& t = trace(var);
    std::vector<VarId> ids((k_ + 1) * t.stride());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<VarId>(t.base + i);
    return ids;
  }

  /// Step-major order across traces; within a step the state bits (MSB
  /// first) precede @halt and the propositions.
  std::vector<VarId> interleaved_order() const {
    std::vector<VarId> order;
    order.reserve(names_.size());
    for (std::size_t i = 0; i <= k_; ++i)
      for (const auto& t : traces_) {
        for (std::size_t j = t.state_bits; j-- > 0;) order.push_back(t.state_bit(i, j));
        order.push_back(t.halt(i));
        for (ApId a = 0; a < t.model->num_aps(); ++a) order.push_back(t.ap(i, a));
      }
    return order;
  }

 private:
  void add_name(std::string name, std::set<std::string>& used) {
    if (!used.insert(name).second) {
      name += "_x" + std::to_string(names_.size());
      used.insert(name);
    }
    names_.push_back(std::move(name));
  }

  std::size_t k_ = 0;
  std::vector<TraceLayout> traces_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::string> names_;
};

namespace detail {

inline NodeId state_code(Circuit& c, const TraceLayout& t, std::size_t step, StateId s) {
  std::vector<NodeId> bits;
  for (std::size_t j = 0; j < t.state_bits; ++j) {
    NodeId b = c.var(t.state_bit(step, j));
    bits.push_back(((s >> j) & 1u) ? b : c.lnot(b));
  }
  return c.land(std::move(bits));
}

}  // namespace detail

/// Circuit over t's variables that holds exactly on encodings of initialized
/// paths with k+1 states, propositions and @halt tied to the state code.
inline NodeId unroll_structure(Circuit& c, const TraceLayout& t, std::size_t k) {
  const KripkeStructure& m = *t.model;
  std::vector<NodeId> conjuncts{detail::state_code(c, t, 0, m.init())};
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<NodeId> moves;
    for (StateId s = 0; s < m.num_states(); ++s) {
      std::vector<NodeId> targets;
      for (StateId to : m.successors(s)) targets.push_back(detail::state_code(c, t, i + 1, to));
      moves.push_back(c.land(detail::state_code(c, t, i, s), c.lor(std::move(targets))));
    }
    conjuncts.push_back(c.lor(std::move(moves)));
  }
  for (std::size_t i = 0; i <= k; ++i) {
    for (ApId a = 0; a < m.num_aps(); ++a) {
      std::vector<NodeId> where;
      for (StateId s = 0; s < m.num_states(); ++s)
        if (m.has_label(s, a)) where.push_back(detail::state_code(c, t, i, s));
      conjuncts.push_back(c.iff(c.var(t.ap(i, a)), c.lor(std::move(where))));
    }
    std::vector<NodeId> halting;
    for (StateId s = 0; s < m.num_states(); ++s)
      if (m.is_halt(s)) halting.push_back(detail::state_code(c, t, i, s));
    conjuncts.push_back(c.iff(c.var(t.halt(i)), c.lor(std::move(halting))));
  }
  return c.land(std::move(conjuncts));
}

/// Translates an NNF body at step i, memoized on (subformula, step).
class BodyEncoder {
 public:
  BodyEncoder(Circuit& c, const VarLayout& layout, BoundedSemantics sem) : c_(c), layout_(layout), sem_(sem) {}

  NodeId encode(const BodyPtr& b, std::size_t i) {
    const std::size_t k = layout_.bound();
    if (i == k + 1) return c_.constant(sem_.kind == Semantics::kClassicDual);
    auto key = std::make_pair(b.get(), i);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    NodeId r;
    switch (b->op) {
      case Op::kTrue: r = Circuit::kTrue; break;
      case Op::kFalse: r = Circuit::kFalse; break;
      case Op::kAtom: r = atom(*b, i); break;
      case Op::kNegAtom: r = c_.lnot(atom(*b, i)); break;
      case Op::kAnd: r = c_.land(encode(b->lhs, i), encode(b->rhs, i)); break;
      case Op::kOr: r = c_.lor(encode(b->lhs, i), encode(b->rhs, i)); break;
      case Op::kNext:
      case Op::kUntil:
      case Op::kRelease: r = temporal(b, i); break;
      default: throw InternalError("encoder expects an NNF body");
    }
    memo_.emplace(key, r);
    return r;
  }

  /// All traces sit in a halt state at step k.
  NodeId halted() {
    std::vector<NodeId> h;
    for (const auto& t : layout_.traces()) h.push_back(c_.var(t.halt(layout_.bound())));
    return c_.land(std::move(h));
  }

 private:
  NodeId atom(const Body& b, std::size_t i) {
    const auto& t = layout_.trace(b.var);
    if (b.ap == kHaltProposition) return c_.var(t.halt(i));
    auto a = t.model->find_ap(b.ap);
    if (!a)
      throw ValidationError(ValidationKind::kDanglingReference, b.ap,
                            "proposition '" + b.ap + "' is not declared by the model of " + b.var);
    return c_.var(t.ap(i, *a));
  }

  NodeId temporal(const BodyPtr& b, std::size_t i) {
    const std::size_t k = layout_.bound();
    bool classic = sem_.kind == Semantics::kClassic || sem_.kind == Semantics::kClassicDual;
    if (i < k || classic) {
      switch (b->op) {
        case Op::kNext: return encode(b->lhs, i + 1);
        case Op::kUntil: return c_.lor(encode(b->rhs, i), c_.land(encode(b->lhs, i), encode(b, i + 1)));
        default: return c_.land(encode(b->rhs, i), c_.lor(encode(b->lhs, i), encode(b, i + 1)));
      }
    }
    const BodyPtr& exact = b->op == Op::kNext    ? b->lhs
                           : b->op == Op::kUntil ? b->rhs
                           : (sem_.paper_literal ? b->lhs : b->rhs);
    switch (sem_.kind) {
      case Semantics::kPes: return Circuit::kFalse;
      case Semantics::kOpt: return Circuit::kTrue;
      case Semantics::kHpes: return c_.land(halted(), encode(exact, k));
      case Semantics::kHopt: return c_.lor(c_.lnot(halted()), encode(exact, k));
      default: throw InternalError("unreachable semantics");
    }
  }

  Circuit& c_;
  const VarLayout& layout_;
  BoundedSemantics sem_;
  std::map<std::pair<const Body*, std::size_t>, NodeId> memo_;
};

/// Encoded bounded model-checking problem together with its variable layout.
struct Encoding {
  PrenexQBF qbf;
  VarLayout layout;
  HyperFormula formula;  // the NNF formula that was encoded
};

/// Q1 x1 ... Qn xn . K1 o1 (K2 o2 (... (Kn on body))) with o = AND for an
/// existential and -> for a universal quantifier.
inline Encoding encode(const HyperFormula& f, const ModelMap& models, std::size_t k, BoundedSemantics sem) {
  check_closed(f);
  Encoding e;
  e.formula = to_nnf(f);
  for (const auto& q : e.formula.prefix) {
    auto it = models.find(q.var);
    if (it == models.end() || !it->second) throw ConfigError("no model assigned to trace variable " + q.var);
    it->second->validate();
  }
  e.layout = VarLayout(e.formula.prefix, models, k);
  Circuit& c = e.qbf.circuit;

  NodeId m = BodyEncoder(c, e.layout, sem).encode(e.formula.body, 0);
  for (std::size_t j = e.formula.prefix.size(); j-- > 0;) {
    const auto& q = e.formula.prefix[j];
    NodeId unrolled = unroll_structure(c, e.layout.trace(q.var), k);
    m = q.quantifier == Quantifier::kExists ? c.land(unrolled, m) : c.implies(unrolled, m);
  }
  e.qbf.matrix = m;
  for (const auto& q : e.formula.prefix) e.qbf.blocks.push_back({q.quantifier, e.layout.block(q.var)});
  normalize(e.qbf);
  for (VarId v = 0; v < e.layout.num_vars(); ++v) e.qbf.var_names[v] = e.layout.name(v);
  e.qbf.order_hint = e.layout.interleaved_order();
  return e;
}

inline PrenexQBF assemble_qbf(const HyperFormula& f, const ModelMap& models, std::size_t k, BoundedSemantics sem) {
  return encode(f, models, k, sem).qbf;
}

}  // namespace hyperbmc
