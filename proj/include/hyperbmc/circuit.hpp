// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "hyperbmc/error.hpp"

namespace hyperbmc {

using NodeId = std::uint32_t;
using VarId = std::uint32_t;

enum class NodeKind : std::uint8_t { kConst, kVar, kNot, kAnd, kOr };

/// Hash-consed Boolean DAG.
///
/// Every node is created through the builders below, which fold constants,
/// flatten nested AND/OR, sort and deduplicate operands and detect
/// complementary pairs. Two requests for structurally equal nodes return the
/// same id. Children always have smaller ids than their parents.
class Circuit {
 public:
  static constexpr NodeId kFalse = 0;
  static constexpr NodeId kTrue = 1;

  Circuit() {
    nodes_.push_back({NodeKind::kConst, 0, 0, 0});
    nodes_.push_back({NodeKind::kConst, 1, 0, 0});
  }

  NodeId constant(bool value) const { return value ? kTrue : kFalse; }

  NodeId var(VarId v) {
    if (auto it = var_nodes_.find(v); it != var_nodes_.end()) return it->second;
    NodeId id = push({NodeKind::kVar, v, 0, 0}, {});
    var_nodes_.emplace(v, id);
    return id;
  }

  NodeId lnot(NodeId a) {
    const auto& n = nodes_[a];
    if (n.kind == NodeKind::kConst) return n.payload ? kFalse : kTrue;
    if (n.kind == NodeKind::kNot) return child(a, 0);
    return intern(NodeKind::kNot, std::vector<NodeId>{a});
  }

  NodeId land(std::vector<NodeId> xs) { return nary(NodeKind::kAnd, std::move(xs)); }
  NodeId lor(std::vector<NodeId> xs) { return nary(NodeKind::kOr, std::move(xs)); }
  NodeId land(NodeId a, NodeId b) { return land(std::vector<NodeId>{a, b}); }
  NodeId lor(NodeId a, NodeId b) { return lor(std::vector<NodeId>{a, b}); }
  NodeId implies(NodeId a, NodeId b) { return lor(lnot(a), b); }
  NodeId iff(NodeId a, NodeId b) { return lor(land(a, b), land(lnot(a), lnot(b))); }

  std::size_t size() const { return nodes_.size(); }
  NodeKind kind(NodeId n) const { return nodes_.at(n).kind; }
  bool const_value(NodeId n) const { return nodes_.at(n).payload != 0; }
  VarId var_of(NodeId n) const { return nodes_.at(n).payload; }
  std::span<const NodeId> children(NodeId n) const {
    const auto& node = nodes_.at(n);
    return {operands_.data() + node.first, node.count};
  }
  NodeId child(NodeId n, std::size_t i) const { return children(n)[i]; }

  bool is_var_literal(NodeId n) const {
    return kind(n) == NodeKind::kVar || (kind(n) == NodeKind::kNot && kind(child(n, 0)) == NodeKind::kVar);
  }

  /// Evaluates `root`; `value` maps variable ids to truth values.
  bool evaluate(NodeId root, const std::function<bool(VarId)>& value) const {
    std::unordered_map<NodeId, bool> memo;
    return eval(root, value, memo);
  }

  bool evaluate(NodeId root, const std::vector<bool>& assignment) const {
    return evaluate(root, [&](VarId v) { return v < assignment.size() && assignment[v]; });
  }

  /// Cofactor of `root` with the given variables fixed, built in this circuit.
  NodeId restrict(NodeId root, const std::map<VarId, bool>& fixed) {
    std::unordered_map<NodeId, NodeId> memo;
    return substitute(root, fixed, memo);
  }

  /// Variables reachable from `root`, ascending.
  std::vector<VarId> support(NodeId root) const {
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<VarId> vars;
    std::vector<NodeId> stack{root};
    while (!stack.empty()) {
      NodeId n = stack.back();
      stack.pop_back();
      if (seen[n]) continue;
      seen[n] = true;
      if (kind(n) == NodeKind::kVar) vars.push_back(var_of(n));
      for (NodeId c : children(n)) stack.push_back(c);
    }
    std::sort(vars.begin(), vars.end());
    return vars;
  }

  /// Nodes reachable from `root`.
  std::size_t cone_size(NodeId root) const {
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<NodeId> stack{root};
    std::size_t count = 0;
    while (!stack.empty()) {
      NodeId n = stack.back();
      stack.pop_back();
      if (seen[n]) continue;
      seen[n] = true;
      ++count;
      for (NodeId c : children(n)) stack.push_back(c);
    }
    return count;
  }

 private:
  struct Node {
    NodeKind kind;
    std::uint32_t payload;  // constant value or variable id
    std::uint32_t first;    // offset into operands_
    std::uint32_t count;
  };

  struct KeyHash {
    std::size_t operator()(const std::vector<NodeId>& key) const noexcept {
      std::size_t h = 0x9e3779b97f4a7c15ULL;
      for (NodeId x : key) h = (h ^ x) * 0x100000001b3ULL;
      return h;
    }
  };

  NodeId push(Node n, const std::vector<NodeId>& ops) {
    n.first = static_cast<std::uint32_t>(operands_.size());
    n.count = static_cast<std::uint32_t>(ops.size());
    operands_.insert(operands_.end(), ops.begin(), ops.end());
    nodes_.push_back(n);
    if (nodes_.size() >= UINT32_MAX) throw ResourceLimit(nodes_.size());
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  NodeId intern(NodeKind kind, std::vector<NodeId> ops) {
    ops.push_back(static_cast<NodeId>(kind));  // kind tag is part of the key
    if (auto it = table_.find(ops); it != table_.end()) return it->second;
    std::vector<NodeId> key = ops;
    ops.pop_back();
    NodeId id = push({kind, 0, 0, 0}, ops);
    table_.emplace(std::move(key), id);
    return id;
  }

  NodeId nary(NodeKind kind, std::vector<NodeId> xs) {
    const NodeId absorbing = kind == NodeKind::kAnd ? kFalse : kTrue;
    const NodeId neutral = kind == NodeKind::kAnd ? kTrue : kFalse;
    std::vector<NodeId> flat;
    flat.reserve(xs.size());
    for (NodeId x : xs) {
      if (x == absorbing) return absorbing;
      if (x == neutral) continue;
      if (nodes_[x].kind == kind) {
        auto cs = children(x);
        flat.insert(flat.end(), cs.begin(), cs.end());
      } else {
        flat.push_back(x);
      }
    }
    std::sort(flat.begin(), flat.end());
    flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
    for (NodeId x : flat)
      if (nodes_[x].kind == NodeKind::kNot && std::binary_search(flat.begin(), flat.end(), child(x, 0)))
        return absorbing;
    if (flat.empty()) return neutral;
    if (flat.size() == 1) return flat.front();
    return intern(kind, std::move(flat));
  }

  bool eval(NodeId n, const std::function<bool(VarId)>& value, std::unordered_map<NodeId, bool>& memo) const {
    const auto& node = nodes_[n];
    switch (node.kind) {
      case NodeKind::kConst: return node.payload != 0;
      case NodeKind::kVar: return value(node.payload);
      default: break;
    }
    if (auto it = memo.find(n); it != memo.end()) return it->second;
    bool r;
    if (node.kind == NodeKind::kNot) {
      r = !eval(child(n, 0), value, memo);
    } else {
      bool is_and = node.kind == NodeKind::kAnd;
      r = is_and;
      for (NodeId c : children(n)) {
        if (eval(c, value, memo) != is_and) {
          r = !is_and;
          break;
        }
      }
    }
    memo.emplace(n, r);
    return r;
  }

  NodeId substitute(NodeId n, const std::map<VarId, bool>& fixed, std::unordered_map<NodeId, NodeId>& memo) {
    switch (nodes_[n].kind) {
      case NodeKind::kConst: return n;
      case NodeKind::kVar: {
        auto it = fixed.find(nodes_[n].payload);
        return it == fixed.end() ? n : constant(it->second);
      }
      default: break;
    }
    if (auto it = memo.find(n); it != memo.end()) return it->second;
    NodeId r;
    NodeKind k = nodes_[n].kind;
    if (k == NodeKind::kNot) {
      r = lnot(substitute(child(n, 0), fixed, memo));
    } else {
      std::vector<NodeId> cs(children(n).begin(), children(n).end());
      for (auto& c : cs) c = substitute(c, fixed, memo);
      r = nary(k, std::move(cs));
    }
    memo.emplace(n, r);
    return r;
  }

  std::vector<Node> nodes_;
  std::vector<NodeId> operands_;
  std::unordered_map<std::vector<NodeId>, NodeId, KeyHash> table_;
  std::unordered_map<VarId, NodeId> var_nodes_;
};

}  // namespace hyperbmc
