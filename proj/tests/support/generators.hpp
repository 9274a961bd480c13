// SPDX-License-Identifier: Apache-2.0
// Random instances and independent reference evaluators for the test suites.
#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hyperbmc/hyperbmc.hpp"

namespace hyperbmc::testkit {

using Rng = std::mt19937_64;

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

inline std::vector<std::string> ap_names(std::size_t n) {
  static const char* names[] = {"a", "b", "c", "d"};
  return {names, names + n};
}

/// Total structure with up to `max_states` states over the given propositions.
/// At least one state halts; halt states carry a self-loop and, when
/// `absorbing_halts` is set, no other successor.
inline KripkeStructure random_structure(Rng& rng, std::size_t max_states, const std::vector<std::string>& aps,
                                        bool absorbing_halts = true) {
  KripkeStructure k;
  for (const auto& a : aps) k.add_ap(a);
  std::size_t n = uniform(rng, 1, max_states);
  for (std::size_t s = 0; s < n; ++s) k.add_state("s" + std::to_string(s));
  k.set_init(uniform(rng, 0, n - 1));
  StateId forced = uniform(rng, 0, n - 1);
  for (StateId s = 0; s < n; ++s) {
    for (ApId a = 0; a < aps.size(); ++a)
      if (coin(rng)) k.add_label(s, a);
    bool halt = s == forced || coin(rng, 0.25);
    if (halt) {
      k.add_transition(s, s);
      k.set_halt(s);
    }
    if (halt && absorbing_halts) continue;
    std::size_t out = uniform(rng, 1, std::min<std::size_t>(n, 2));
    for (std::size_t e = 0; e < out; ++e) k.add_transition(s, uniform(rng, 0, n - 1));
  }
  k.validate();
  return k;
}

/// Acyclic structure rooted at s0 whose only loops are self-loops on halt
/// states, and whose halt states have no other successor. Every infinite path
/// therefore ends in a halt state after at most n-1 steps.
inline KripkeStructure random_acyclic_halting(Rng& rng, std::size_t max_states, const std::vector<std::string>& aps) {
  KripkeStructure k;
  for (const auto& a : aps) k.add_ap(a);
  std::size_t n = uniform(rng, 1, max_states);
  for (std::size_t s = 0; s < n; ++s) k.add_state("s" + std::to_string(s));
  k.set_init(0);
  for (StateId s = 0; s < n; ++s) {
    for (ApId a = 0; a < aps.size(); ++a)
      if (coin(rng)) k.add_label(s, a);
    bool halt = s + 1 == n || coin(rng, 0.3);
    if (halt) {
      k.add_transition(s, s);
      k.set_halt(s);
    } else {
      std::size_t out = uniform(rng, 1, 2);
      for (std::size_t e = 0; e < out; ++e) k.add_transition(s, uniform(rng, s + 1, n - 1));
    }
  }
  k.validate();
  return k;
}

/// Random body of depth at most `depth` over the given trace variables,
/// including derived operators and occasional @halt atoms.
inline BodyPtr random_body(Rng& rng, std::size_t depth, const std::vector<std::string>& vars,
                           const std::vector<std::string>& aps, bool halt_atoms = true) {
  using namespace ltl;
  auto leaf = [&]() -> BodyPtr {
    std::size_t r = uniform(rng, 0, 19);
    if (r == 0) return top();
    if (r == 1) return bottom();
    const auto& v = vars[uniform(rng, 0, vars.size() - 1)];
    if (halt_atoms && r == 2) return atom(std::string(kHaltProposition), v);
    return atom(aps[uniform(rng, 0, aps.size() - 1)], v);
  };
  if (depth == 0 || coin(rng, 0.2)) return leaf();
  auto sub = [&] { return random_body(rng, depth - 1, vars, aps, halt_atoms); };
  switch (uniform(rng, 0, 11)) {
    case 0: return lnot(sub());
    case 1: return land(sub(), sub());
    case 2: return lor(sub(), sub());
    case 3: return implies(sub(), sub());
    case 4: return iff(sub(), sub());
    case 5: return next(sub());
    case 6: return eventually(sub());
    case 7: return globally(sub());
    case 8: return until(sub(), sub());
    case 9: return release(sub(), sub());
    case 10: return weak_until(sub(), sub());
    default: return lnot(until(sub(), sub()));
  }
}

inline HyperFormula random_formula(Rng& rng, std::size_t max_quantifiers, std::size_t depth,
                                   const std::vector<std::string>& aps, bool halt_atoms = true) {
  static const char* names[] = {"A", "B", "C"};
  HyperFormula f;
  std::size_t n = uniform(rng, 1, max_quantifiers);
  std::vector<std::string> vars;
  for (std::size_t i = 0; i < n; ++i) {
    f.prefix.push_back({coin(rng) ? Quantifier::kForall : Quantifier::kExists, names[i]});
    vars.push_back(names[i]);
  }
  f.body = random_body(rng, depth, vars, aps, halt_atoms);
  return f;
}

/// One model per trace variable; variables share a model with probability 1/2.
inline ModelMap random_models(Rng& rng, const HyperFormula& f, std::size_t max_states,
                              const std::vector<std::string>& aps, bool acyclic = false) {
  ModelMap m;
  std::shared_ptr<const KripkeStructure> previous;
  for (const auto& q : f.prefix) {
    if (!previous || coin(rng)) {
      previous = std::make_shared<const KripkeStructure>(acyclic ? random_acyclic_halting(rng, max_states, aps)
                                                                 : random_structure(rng, max_states, aps));
    }
    m[q.var] = previous;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Infinite-trace ground truth on acyclic halting structures

/// Complete runs of an acyclic halting structure, each padded to `length`
/// states by repeating its final halt state.
inline std::vector<std::vector<StateId>> complete_runs(const KripkeStructure& k, std::size_t length) {
  std::vector<std::vector<StateId>> runs;
  std::vector<StateId> path{k.init()};
  std::function<void()> dfs = [&] {
    StateId s = path.back();
    if (k.is_halt(s)) {
      auto run = path;
      while (run.size() < length) run.push_back(s);
      runs.push_back(run);
      return;
    }
    for (StateId t : k.successors(s)) {
      path.push_back(t);
      dfs();
      path.pop_back();
    }
  };
  dfs();
  return runs;
}

/// LTL evaluation on infinite traces that are constant from position `last`
/// onwards. Works on the raw (non-NNF, sugared) body.
class InfiniteEvaluator {
 public:
  InfiniteEvaluator(const ModelMap& models, std::size_t last) : models_(models), last_(last) {}

  bool holds(const HyperFormula& f) {
    std::map<std::string, const std::vector<StateId>*> env;
    std::map<const KripkeStructure*, std::vector<std::vector<StateId>>> runs;
    for (const auto& q : f.prefix) {
      auto* m = models_.at(q.var).get();
      if (!runs.count(m)) runs[m] = complete_runs(*m, last_ + 1);
    }
    std::function<bool(std::size_t)> quantify = [&](std::size_t j) -> bool {
      if (j == f.prefix.size()) return eval(f.body, 0, env);
      const auto& q = f.prefix[j];
      bool universal = q.quantifier == Quantifier::kForall;
      for (const auto& r : runs.at(models_.at(q.var).get())) {
        env[q.var] = &r;
        if (quantify(j + 1) != universal) return !universal;
      }
      return universal;
    };
    return quantify(0);
  }

 private:
  bool atom(const Body& b, std::size_t i, const std::map<std::string, const std::vector<StateId>*>& env) {
    const auto& m = *models_.at(b.var);
    StateId s = (*env.at(b.var))[std::min(i, last_)];
    if (b.ap == kHaltProposition) return m.is_halt(s);
    auto a = m.find_ap(b.ap);
    return a && m.has_label(s, *a);
  }

  bool eval(const BodyPtr& b, std::size_t i, const std::map<std::string, const std::vector<StateId>*>& env) {
    auto at = [&](const BodyPtr& x, std::size_t j) { return eval(x, j, env); };
    // Beyond `last` every position looks the same, so position `last` stands for all of them.
    std::size_t horizon = last_;
    switch (b->op) {
      case Op::kTrue: return true;
      case Op::kFalse: return false;
      case Op::kAtom: return atom(*b, i, env);
      case Op::kNegAtom: return !atom(*b, i, env);
      case Op::kNot: return !at(b->lhs, i);
      case Op::kAnd: return at(b->lhs, i) && at(b->rhs, i);
      case Op::kOr: return at(b->lhs, i) || at(b->rhs, i);
      case Op::kImplies: return !at(b->lhs, i) || at(b->rhs, i);
      case Op::kIff: return at(b->lhs, i) == at(b->rhs, i);
      case Op::kNext: return at(b->lhs, std::min(i + 1, horizon));
      case Op::kEventually:
        for (std::size_t j = i; j <= horizon; ++j)
          if (at(b->lhs, j)) return true;
        return false;
      case Op::kGlobally:
        for (std::size_t j = i; j <= horizon; ++j)
          if (!at(b->lhs, j)) return false;
        return true;
      case Op::kUntil:
        for (std::size_t j = i; j <= horizon; ++j) {
          if (at(b->rhs, j)) return true;
          if (!at(b->lhs, j)) return false;
        }
        return false;
      case Op::kWeakUntil:
        for (std::size_t j = i; j <= horizon; ++j) {
          if (at(b->rhs, j)) return true;
          if (!at(b->lhs, j)) return false;
        }
        return true;
      case Op::kRelease:
        for (std::size_t j = i; j <= horizon; ++j) {
          if (!at(b->rhs, j)) return false;
          if (at(b->lhs, j)) return true;
        }
        return true;
    }
    return false;
  }

  const ModelMap& models_;
  std::size_t last_;
};

// ---------------------------------------------------------------------------
// QBF reference

/// Random closed QBF over `num_vars` variables with alternating blocks.
inline PrenexQBF random_qbf(Rng& rng, std::size_t num_vars, std::size_t max_nodes = 24) {
  PrenexQBF q;
  std::vector<VarId> vars(num_vars);
  for (VarId v = 0; v < num_vars; ++v) vars[v] = v;
  std::shuffle(vars.begin(), vars.end(), rng);
  Quantifier quant = coin(rng) ? Quantifier::kExists : Quantifier::kForall;
  std::size_t pos = 0;
  while (pos < num_vars) {
    std::size_t len = uniform(rng, 1, std::min<std::size_t>(4, num_vars - pos));
    q.blocks.push_back({quant, {vars.begin() + pos, vars.begin() + pos + len}});
    pos += len;
    quant = dual(quant);
  }
  auto& c = q.circuit;
  std::vector<NodeId> pool;
  for (VarId v = 0; v < num_vars; ++v) pool.push_back(c.var(v));
  std::size_t steps = uniform(rng, 1, max_nodes);
  for (std::size_t s = 0; s < steps; ++s) {
    auto pick = [&] {
      NodeId n = pool[uniform(rng, 0, pool.size() - 1)];
      return coin(rng, 0.3) ? c.lnot(n) : n;
    };
    std::size_t arity = uniform(rng, 2, 3);
    std::vector<NodeId> xs;
    for (std::size_t i = 0; i < arity; ++i) xs.push_back(pick());
    pool.push_back(coin(rng) ? c.land(xs) : c.lor(xs));
  }
  q.matrix = coin(rng, 0.2) ? c.lnot(pool.back()) : pool.back();
  for (VarId v = 0; v < num_vars; ++v) q.var_names[v] = "x" + std::to_string(v);
  return q;
}

/// Plain recursive evaluation over all assignments, blocks left to right.
inline bool naive_qbf_value(const PrenexQBF& q, std::map<VarId, bool> fixed = {}) {
  std::vector<std::pair<Quantifier, VarId>> order;
  for (const auto& b : q.blocks)
    for (VarId v : b.vars)
      if (!fixed.count(v)) order.emplace_back(b.quantifier, v);
  std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
    if (i == order.size())
      return q.circuit.evaluate(q.matrix, [&](VarId v) { return fixed.at(v); });
    auto [quant, v] = order[i];
    fixed[v] = false;
    bool lo = go(i + 1);
    if (quant == Quantifier::kExists && lo) return true;
    if (quant == Quantifier::kForall && !lo) return false;
    fixed[v] = true;
    return go(i + 1);
  };
  return go(0);
}

/// Structural equality up to variable naming: blocks compared by names and
/// matrices by their truth tables over the named variables.
inline bool same_qbf_by_names(const PrenexQBF& a, const PrenexQBF& b) {
  if (a.blocks.size() != b.blocks.size()) return false;
  std::map<std::string, VarId> b_ids;
  for (const auto& [v, name] : b.var_names) b_ids[name] = v;
  std::vector<std::pair<VarId, VarId>> pairs;
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    if (a.blocks[i].quantifier != b.blocks[i].quantifier) return false;
    if (a.blocks[i].vars.size() != b.blocks[i].vars.size()) return false;
    for (std::size_t j = 0; j < a.blocks[i].vars.size(); ++j) {
      auto name = a.name(a.blocks[i].vars[j]);
      if (b.name(b.blocks[i].vars[j]) != name) return false;
      pairs.emplace_back(a.blocks[i].vars[j], b.blocks[i].vars[j]);
    }
  }
  if (pairs.size() > 16) return false;
  for (std::uint32_t bits = 0; bits < (1u << pairs.size()); ++bits) {
    std::map<VarId, bool> va, vb;
    for (std::size_t j = 0; j < pairs.size(); ++j) {
      va[pairs[j].first] = (bits >> j) & 1u;
      vb[pairs[j].second] = (bits >> j) & 1u;
    }
    if (a.circuit.evaluate(a.matrix, [&](VarId v) { return va.at(v); }) !=
        b.circuit.evaluate(b.matrix, [&](VarId v) { return vb.at(v); }))
      return false;
  }
  return true;
}

/// The five-variable example: E x1. A x2. E x3 x4. A x5. four clauses.
inline PrenexQBF five_variable_example() {
  PrenexQBF q;
  auto& c = q.circuit;
  auto x = [&](int i) { return c.var(static_cast<VarId>(i - 1)); };
  auto n = [&](int i) { return c.lnot(x(i)); };
  q.matrix = c.land({c.lor({x(1), n(2), x(3)}), c.lor({n(1), x(2), n(4)}), c.lor({n(3), x(4), n(5)}),
                     c.lor({x(1), x(4), x(5)})});
  q.blocks = {{Quantifier::kExists, {0}}, {Quantifier::kForall, {1}}, {Quantifier::kExists, {2, 3}},
              {Quantifier::kForall, {4}}};
  for (VarId v = 0; v < 5; ++v) q.var_names[v] = "x" + std::to_string(v + 1);
  return q;
}

/// Grid distance by breadth-first search from the init cells to any goal cell.
inline std::optional<std::size_t> grid_distance(const GridSpec& g) {
  std::map<Cell, std::size_t> dist;
  std::vector<Cell> frontier;
  for (const auto& c : g.inits) {
    dist[c] = 0;
    frontier.push_back(c);
  }
  for (std::size_t head = 0; head < frontier.size(); ++head) {
    Cell c = frontier[head];
    if (g.goals.count(c)) return dist[c];
    const Cell deltas[] = {{0, 1}, {0, -1}, {-1, 0}, {1, 0}};
    for (Cell d : deltas) {
      Cell n{c.x + d.x, c.y + d.y};
      if (n.x < 0 || n.y < 0 || n.x >= g.width || n.y >= g.height) continue;
      if (g.obstacles.count(n) || dist.count(n)) continue;
      dist[n] = dist[c] + 1;
      frontier.push_back(n);
    }
  }
  return std::nullopt;
}

}  // namespace hyperbmc::testkit
