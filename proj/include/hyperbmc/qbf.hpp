// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hyperbmc/bdd.hpp"
#include "hyperbmc/circuit.hpp"
#include "hyperbmc/error.hpp"
#include "hyperbmc/hyperltl.hpp"

namespace hyperbmc {

struct QuantifierBlock {
  Quantifier quantifier;
  std::vector<VarId> vars;
};

/// Q1 X1 ... Qn Xn . matrix
struct PrenexQBF {
  std::vector<QuantifierBlock> blocks;
  Circuit circuit;
  NodeId matrix = Circuit::kTrue;
  /// Printable name of every block variable.
  std::map<VarId, std::string> var_names;
  /// Optional variable order for the builtin solver, root-most first.
  std::vector<VarId> order_hint;

  std::string name(VarId v) const {
    auto it = var_names.find(v);
    return it == var_names.end() ? "v" + std::to_string(v) : it->second;
  }
};

/// Drops empty blocks and merges neighbours with the same quantifier.
inline void normalize(PrenexQBF& q) {
  std::vector<QuantifierBlock> merged;
  for (auto& b : q.blocks) {
    if (b.vars.empty()) continue;
    if (!merged.empty() && merged.back().quantifier == b.quantifier)
      merged.back().vars.insert(merged.back().vars.end(), b.vars.begin(), b.vars.end());
    else
      merged.push_back(std::move(b));
  }
  q.blocks = std::move(merged);
}

struct SolveOptions {
  std::size_t node_cap = 50'000'000;
  /// Node budget for the first (block order) attempt before switching to the
  /// order hint. Ignored when the QBF carries no hint.
  std::size_t first_attempt_nodes = 4'000'000;
};

struct SolveResult {
  bool value = false;
  /// Assignment to the first block: a model when it is existential and the
  /// value is true, a countermodel when it is universal and the value is false.
  std::optional<std::map<VarId, bool>> outer_witness;
  std::size_t bdd_nodes = 0;
  bool used_order_hint = false;
};

namespace detail {

inline SolveResult solve_with_order(const PrenexQBF& q, const std::vector<VarId>& order, std::size_t cap) {
  VarId max_var = 0;
  for (VarId v : order) max_var = std::max(max_var, v);
  std::vector<std::uint32_t> level_of(static_cast<std::size_t>(max_var) + 1, UINT32_MAX);
  for (std::uint32_t l = 0; l < order.size(); ++l) level_of[order[l]] = l;

  BddManager bdd(order.size(), cap);
  auto f = bdd.from_circuit(q.circuit, q.matrix, level_of);

  // Innermost block outward; the first block stays free.
  for (std::size_t b = q.blocks.size(); b-- > 1;) {
    std::vector<bool> mask(order.size(), false);
    for (VarId v : q.blocks[b].vars) mask[level_of[v]] = true;
    f = q.blocks[b].quantifier == Quantifier::kExists ? bdd.exists(f, mask) : bdd.forall(f, mask);
  }

  SolveResult result;
  if (q.blocks.empty()) {
    if (f > BddManager::kOne) throw InternalError("matrix has unquantified variables");
    result.value = f == BddManager::kOne;
    result.bdd_nodes = bdd.size();
    return result;
  }
  const auto& outer = q.blocks.front();
  bool existential = outer.quantifier == Quantifier::kExists;
  result.value = existential ? f != BddManager::kZero : f == BddManager::kOne;

  if (result.value == existential) {
    // Smallest assignment in variable-id order, false first: the assignment
    // a DPLL search branching on the lowest unassigned variable returns.
    auto g = existential ? f : bdd.negate(f);
    std::vector<VarId> vars = outer.vars;
    std::sort(vars.begin(), vars.end());
    std::map<VarId, bool> witness;
    for (VarId v : vars) {
      auto low = bdd.restrict(g, level_of[v], false);
      if (low != BddManager::kZero) {
        g = low;
        witness[v] = false;
      } else {
        g = bdd.restrict(g, level_of[v], true);
        witness[v] = true;
      }
    }
    if (g != BddManager::kOne) throw InternalError("witness search did not reach a model");
    result.outer_witness = std::move(witness);
  }
  result.bdd_nodes = bdd.size();
  return result;
}

}  // namespace detail

/// Decides the QBF by BDD quantifier elimination.
///
/// The matrix is compiled to a BDD, each block but the first is abstracted
/// from the inside out, and the residual function over the first block gives
/// the value and the outer witness. Block order is tried first under a node
/// budget; when it runs out the order hint is used with the full cap.
inline SolveResult solve(PrenexQBF q, const SolveOptions& options = {}) {
  normalize(q);
  std::set<VarId> bound;
  std::vector<VarId> block_order;
  for (const auto& b : q.blocks)
    for (VarId v : b.vars) {
      if (!bound.insert(v).second) throw ConfigError("variable " + q.name(v) + " quantified twice");
      block_order.push_back(v);
    }
  for (VarId v : q.circuit.support(q.matrix))
    if (bound.count(v) == 0) throw ConfigError("free variable " + q.name(v) + " in matrix");

  bool hint_usable = !q.order_hint.empty() && q.order_hint != block_order;
  if (hint_usable) {
    std::set<VarId> hinted(q.order_hint.begin(), q.order_hint.end());
    hint_usable = hinted == bound && hinted.size() == q.order_hint.size();
  }
  if (!hint_usable) return detail::solve_with_order(q, block_order, options.node_cap);
  try {
    return detail::solve_with_order(q, block_order, std::min(options.first_attempt_nodes, options.node_cap));
  } catch (const ResourceLimit&) {
  }
  auto result = detail::solve_with_order(q, q.order_hint, options.node_cap);
  result.used_order_hint = true;
  return result;
}

}  // namespace hyperbmc
