// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "hyperbmc/error.hpp"
#include "hyperbmc/hyperltl.hpp"
#include "hyperbmc/kripke.hpp"
#include "hyperbmc/semantics.hpp"

// Brute-force evaluator of the bounded satisfaction relations. It enumerates
// trace prefixes explicitly and applies the rule table literally; it is the
// ground truth the encoder and solver are tested against.

namespace hyperbmc {

/// Trace variable -> assigned prefix; all prefixes have k+1 states.
using BoundedAssignment = std::map<std::string, TracePrefix>;

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

namespace detail {

// NNF body with every atom resolved to (slot, proposition index).
// Proposition index -1 stands for @halt.
struct ResolvedNode {
  Op op;
  int slot = -1;
  int ap = -1;
  int lhs = -1;
  int rhs = -1;
};

struct ResolvedBody {
  std::vector<ResolvedNode> nodes;
  int root = -1;
  std::vector<const KripkeStructure*> models;  // per slot

  ResolvedBody(const BodyPtr& nnf, const std::vector<std::string>& vars, std::vector<const KripkeStructure*> slot_models)
      : models(std::move(slot_models)) {
    root = resolve(nnf, vars);
  }

 private:
  int resolve(const BodyPtr& b, const std::vector<std::string>& vars) {
    ResolvedNode n{b->op};
    if (b->op == Op::kAtom || b->op == Op::kNegAtom) {
      auto it = std::find(vars.begin(), vars.end(), b->var);
      if (it == vars.end())
        throw ValidationError(ValidationKind::kDanglingReference, b->var, "unassigned trace variable '" + b->var + "'");
      n.slot = static_cast<int>(it - vars.begin());
      if (b->ap == kHaltProposition) {
        n.ap = -1;
      } else {
        auto ap = models[n.slot]->find_ap(b->ap);
        if (!ap)
          throw ValidationError(ValidationKind::kDanglingReference, b->ap,
                                "proposition '" + b->ap + "' is not declared by the model of " + b->var);
        n.ap = static_cast<int>(*ap);
      }
    } else if (b->op != Op::kTrue && b->op != Op::kFalse) {
      if (!is_nnf(b)) throw InternalError("oracle expects an NNF body");
      n.lhs = resolve(b->lhs, vars);
      if (b->rhs) n.rhs = resolve(b->rhs, vars);
    }
    nodes.push_back(n);
    return static_cast<int>(nodes.size() - 1);
  }
};

// Literal recursion of the bounded rules over fixed state paths.
class BoundedEvaluator {
 public:
  BoundedEvaluator(const ResolvedBody& body, std::size_t k, BoundedSemantics sem) : body_(body), k_(k), sem_(sem) {}

  bool eval(int n, std::size_t i, const std::vector<const std::vector<StateId>*>& paths) const {
    paths_ = &paths;
    return at(n, i);
  }

 private:
  bool classic() const { return sem_.kind == Semantics::kClassic || sem_.kind == Semantics::kClassicDual; }

  bool halted() const {
    for (std::size_t slot = 0; slot < paths_->size(); ++slot)
      if (!body_.models[slot]->is_halt((*(*paths_)[slot])[k_])) return false;
    return true;
  }

  bool atom(const ResolvedNode& n, std::size_t i) const {
    StateId s = (*(*paths_)[n.slot])[i];
    const auto* m = body_.models[n.slot];
    return n.ap < 0 ? m->is_halt(s) : m->has_label(s, static_cast<ApId>(n.ap));
  }

  bool at(int id, std::size_t i) const {
    const auto& n = body_.nodes[id];
    if (i == k_ + 1) return sem_.kind == Semantics::kClassicDual;  // only reachable in the classic variants
    switch (n.op) {
      case Op::kTrue: return true;
      case Op::kFalse: return false;
      case Op::kAtom: return atom(n, i);
      case Op::kNegAtom: return !atom(n, i);
      case Op::kAnd: return at(n.lhs, i) && at(n.rhs, i);
      case Op::kOr: return at(n.lhs, i) || at(n.rhs, i);
      default: break;
    }
    if (i < k_ || classic()) {
      switch (n.op) {
        case Op::kNext: return at(n.lhs, i + 1);
        case Op::kUntil: return at(n.rhs, i) || (at(n.lhs, i) && at(id, i + 1));
        case Op::kRelease: return at(n.rhs, i) && (at(n.lhs, i) || at(id, i + 1));
        default: throw InternalError("unexpected operator in NNF body");
      }
    }
    // i == k
    int exact = n.op == Op::kNext ? n.lhs
                : n.op == Op::kUntil ? n.rhs
                : (sem_.paper_literal ? n.lhs : n.rhs);
    switch (sem_.kind) {
      case Semantics::kPes: return false;
      case Semantics::kOpt: return true;
      case Semantics::kHpes: return halted() && at(exact, k_);
      case Semantics::kHopt: return !halted() || at(exact, k_);
      default: throw InternalError("unreachable semantics");
    }
  }

  const ResolvedBody& body_;
  std::size_t k_;
  BoundedSemantics sem_;
  mutable const std::vector<const std::vector<StateId>*>* paths_ = nullptr;
};

inline void check_prefix_length(const TracePrefix& p, std::size_t k, const std::string& var) {
  if (p.states.size() != k + 1)
    throw ConfigError("prefix for " + var + " has " + std::to_string(p.states.size()) + " states, expected " +
                      std::to_string(k + 1));
}

// Exact evaluation of "Q tau. body" when every other trace is fixed, by
// formula progression along the paths of tau's structure. Subtrees are merged
// on (pending obligation, step, state), which keeps large universal
// quantifications tractable where explicit enumeration is not.
class ProgressionChecker {
 public:
  ProgressionChecker(const ResolvedBody& body, std::size_t k, BoundedSemantics sem,
                     std::vector<const std::vector<StateId>*> fixed, std::size_t free_slot, Quantifier q)
      : body_(body), k_(k), sem_(sem), fixed_(std::move(fixed)), free_(free_slot), q_(q) {
    obligations_.push_back({Kind::kFalse, 0, 0});
    obligations_.push_back({Kind::kTrue, 0, 0});
  }

  bool run() {
    const auto* m = body_.models[free_];
    return value(pending(body_.root), 0, m->init());
  }

 private:
  enum class Kind : std::uint8_t { kFalse, kTrue, kAnd, kOr, kPending };
  struct Obligation {
    Kind kind;
    std::uint32_t a, b;
  };
  static constexpr std::uint32_t kF = 0, kT = 1;

  static std::uint64_t key3(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return (a << 40) ^ (b << 20) ^ c;
  }

  bool classic() const { return sem_.kind == Semantics::kClassic || sem_.kind == Semantics::kClassicDual; }

  std::uint32_t intern(Kind kind, std::uint32_t a, std::uint32_t b) {
    std::uint64_t key = (static_cast<std::uint64_t>(kind) << 60) ^ (static_cast<std::uint64_t>(a) << 30) ^ b;
    auto [it, inserted] = intern_.try_emplace(key, static_cast<std::uint32_t>(obligations_.size()));
    if (inserted) obligations_.push_back({kind, a, b});
    return it->second;
  }
  std::uint32_t conj(std::uint32_t a, std::uint32_t b) {
    if (a == kF || b == kF) return kF;
    if (a == kT) return b;
    if (b == kT || a == b) return a;
    return intern(Kind::kAnd, std::min(a, b), std::max(a, b));
  }
  std::uint32_t disj(std::uint32_t a, std::uint32_t b) {
    if (a == kT || b == kT) return kT;
    if (a == kF) return b;
    if (b == kF || a == b) return a;
    return intern(Kind::kOr, std::min(a, b), std::max(a, b));
  }
  std::uint32_t pending(int node) { return intern(Kind::kPending, static_cast<std::uint32_t>(node), 0); }
  static std::uint32_t constant(bool v) { return v ? kT : kF; }

  StateId state_of(int slot, std::size_t i, StateId free_state) const {
    return static_cast<std::size_t>(slot) == free_ ? free_state : (*fixed_[slot])[i];
  }

  bool atom(const ResolvedNode& n, std::size_t i, StateId s) const {
    StateId st = state_of(n.slot, i, s);
    const auto* m = body_.models[n.slot];
    return n.ap < 0 ? m->is_halt(st) : m->has_label(st, static_cast<ApId>(n.ap));
  }

  bool halted(StateId s) const {
    for (std::size_t slot = 0; slot < body_.models.size(); ++slot)
      if (!body_.models[slot]->is_halt(state_of(static_cast<int>(slot), k_, s))) return false;
    return true;
  }

  // Obligation on position i+1 equivalent to `node` holding at position i.
  std::uint32_t step(int id, std::size_t i, StateId s) {
    if (i == k_ + 1) return constant(sem_.kind == Semantics::kClassicDual);
    auto key = key3(static_cast<std::uint64_t>(id), i, s);
    if (auto it = step_memo_.find(key); it != step_memo_.end()) return it->second;
    const auto& n = body_.nodes[id];
    std::uint32_t r = kF;
    switch (n.op) {
      case Op::kTrue: r = kT; break;
      case Op::kFalse: r = kF; break;
      case Op::kAtom: r = constant(atom(n, i, s)); break;
      case Op::kNegAtom: r = constant(!atom(n, i, s)); break;
      case Op::kAnd: r = conj(step(n.lhs, i, s), step(n.rhs, i, s)); break;
      case Op::kOr: r = disj(step(n.lhs, i, s), step(n.rhs, i, s)); break;
      default:
        if (i < k_ || classic()) {
          if (n.op == Op::kNext) r = pending(n.lhs);
          else if (n.op == Op::kUntil) r = disj(step(n.rhs, i, s), conj(step(n.lhs, i, s), pending(id)));
          else r = conj(step(n.rhs, i, s), disj(step(n.lhs, i, s), pending(id)));
        } else {
          int exact = n.op == Op::kNext ? n.lhs : n.op == Op::kUntil ? n.rhs : (sem_.paper_literal ? n.lhs : n.rhs);
          switch (sem_.kind) {
            case Semantics::kPes: r = kF; break;
            case Semantics::kOpt: r = kT; break;
            case Semantics::kHpes: r = halted(s) ? step(exact, k_, s) : kF; break;
            case Semantics::kHopt: r = halted(s) ? step(exact, k_, s) : kT; break;
            default: throw InternalError("unreachable semantics");
          }
        }
    }
    step_memo_.emplace(key, r);
    return r;
  }

  // Rewrites an obligation on position i, given the free trace's state there.
  std::uint32_t progress(std::uint32_t r, std::size_t i, StateId s) {
    if (r == kF || r == kT) return r;
    auto key = key3(r, i, s);
    if (auto it = progress_memo_.find(key); it != progress_memo_.end()) return it->second;
    Obligation o = obligations_[r];
    std::uint32_t out;
    switch (o.kind) {
      case Kind::kPending: out = step(static_cast<int>(o.a), i, s); break;
      case Kind::kAnd: out = conj(progress(o.a, i, s), progress(o.b, i, s)); break;
      case Kind::kOr: out = disj(progress(o.a, i, s), progress(o.b, i, s)); break;
      default: out = r;
    }
    progress_memo_.emplace(key, out);
    return out;
  }

  bool value(std::uint32_t r, std::size_t i, StateId s) {
    auto key = key3(r, i, s);
    if (auto it = value_memo_.find(key); it != value_memo_.end()) return it->second;
    std::uint32_t next = progress(r, i, s);
    bool result;
    if (next == kF || next == kT) {
      result = next == kT;
    } else if (i == k_) {
      std::uint32_t beyond = progress(next, k_ + 1, 0);
      if (beyond != kF && beyond != kT) throw InternalError("unresolved obligation past the bound");
      result = beyond == kT;
    } else {
      bool universal = q_ == Quantifier::kForall;
      result = universal;
      for (StateId t : body_.models[free_]->successors(s)) {
        if (value(next, i + 1, t) != universal) {
          result = !universal;
          break;
        }
      }
    }
    value_memo_.emplace(key, result);
    return result;
  }

  const ResolvedBody& body_;
  std::size_t k_;
  BoundedSemantics sem_;
  std::vector<const std::vector<StateId>*> fixed_;
  std::size_t free_;
  Quantifier q_;
  std::vector<Obligation> obligations_;
  std::unordered_map<std::uint64_t, std::uint32_t> intern_;
  std::unordered_map<std::uint64_t, std::uint32_t> step_memo_;
  std::unordered_map<std::uint64_t, std::uint32_t> progress_memo_;
  std::unordered_map<std::uint64_t, bool> value_memo_;
};

inline const KripkeStructure& model_for(const ModelMap& models, const std::string& var) {
  auto it = models.find(var);
  if (it == models.end() || !it->second) throw ConfigError("no model assigned to trace variable " + var);
  return *it->second;
}

}  // namespace detail

/// Truth of an NNF body at step i under a complete bounded assignment.
inline bool eval_body(const ModelMap& models, const BoundedAssignment& assignment, std::size_t i, const BodyPtr& body,
                      std::size_t k, BoundedSemantics sem) {
  if (i > k) throw ConfigError("evaluation step exceeds the bound");
  std::vector<std::string> vars;
  std::vector<const KripkeStructure*> slot_models;
  std::vector<const std::vector<StateId>*> paths;
  std::set<std::string> used;
  collect_variables(body, used);
  for (const auto& v : used) {
    auto it = assignment.find(v);
    if (it == assignment.end())
      throw ValidationError(ValidationKind::kDanglingReference, v, "unassigned trace variable '" + v + "'");
  }
  for (const auto& [var, prefix] : assignment) {
    detail::check_prefix_length(prefix, k, var);
    vars.push_back(var);
    slot_models.push_back(&detail::model_for(models, var));
    paths.push_back(&prefix.states);
  }
  detail::ResolvedBody resolved(to_nnf(body), vars, slot_models);
  return detail::BoundedEvaluator(resolved, k, sem).eval(resolved.root, i, paths);
}

/// Bounded satisfaction with the variables in `fixed` pinned to the given
/// prefixes and the remaining quantifiers evaluated over all prefixes.
///
/// Falls back to progression when exactly one variable is left open and its
/// prefixes would exceed `cap`; otherwise exceeding `cap` raises ExplosionGuard.
inline bool check_bounded_with(const ModelMap& models, const HyperFormula& formula, std::size_t k,
                               BoundedSemantics sem, const BoundedAssignment& fixed,
                               std::size_t cap = kDefaultEnumerationCap) {
  check_closed(formula);
  auto nnf = to_nnf(formula);
  std::vector<std::string> vars;
  std::vector<const KripkeStructure*> slot_models;
  for (const auto& q : nnf.prefix) {
    vars.push_back(q.var);
    slot_models.push_back(&detail::model_for(models, q.var));
  }
  detail::ResolvedBody resolved(nnf.body, vars, slot_models);

  std::vector<const std::vector<StateId>*> paths(vars.size(), nullptr);
  std::vector<std::size_t> open;
  for (std::size_t slot = 0; slot < vars.size(); ++slot) {
    auto it = fixed.find(vars[slot]);
    if (it == fixed.end()) {
      open.push_back(slot);
      continue;
    }
    detail::check_prefix_length(it->second, k, vars[slot]);
    if (!is_initialized_path(*slot_models[slot], it->second.states)) return false;
    paths[slot] = &it->second.states;
  }

  std::uint64_t total = 0;
  for (auto slot : open) total += count_prefixes(*slot_models[slot], k);
  if (total > cap) {
    if (open.size() != 1) throw ExplosionGuard(static_cast<std::size_t>(total));
    return detail::ProgressionChecker(resolved, k, sem, paths, open.front(), nnf.prefix[open.front()].quantifier).run();
  }

  std::map<const KripkeStructure*, std::vector<TracePrefix>> cache;
  std::vector<const std::vector<TracePrefix>*> domains(vars.size(), nullptr);
  for (auto slot : open) {
    auto [it, inserted] = cache.try_emplace(slot_models[slot]);
    if (inserted) it->second = enumerate_prefixes(*slot_models[slot], k);
    domains[slot] = &it->second;
  }

  detail::BoundedEvaluator evaluator(resolved, k, sem);
  std::function<bool(std::size_t)> quantify = [&](std::size_t slot) -> bool {
    if (slot == vars.size()) return evaluator.eval(resolved.root, 0, paths);
    if (!domains[slot]) return quantify(slot + 1);
    bool universal = nnf.prefix[slot].quantifier == Quantifier::kForall;
    for (const auto& prefix : *domains[slot]) {
      paths[slot] = &prefix.states;
      if (quantify(slot + 1) != universal) {
        paths[slot] = nullptr;
        return !universal;
      }
    }
    paths[slot] = nullptr;
    return universal;
  };
  return quantify(0);
}

/// (T, {}, 0) |=_k f under `sem`, with T(pi) the prefixes of models[pi].
inline bool check_bounded(const ModelMap& models, const HyperFormula& formula, std::size_t k, BoundedSemantics sem,
                          std::size_t cap = kDefaultEnumerationCap) {
  check_closed(formula);
  std::uint64_t total = 0;
  for (const auto& q : formula.prefix) total += count_prefixes(detail::model_for(models, q.var), k);
  if (total > cap) throw ExplosionGuard(static_cast<std::size_t>(total));
  return check_bounded_with(models, formula, k, sem, {}, cap);
}

}  // namespace hyperbmc
