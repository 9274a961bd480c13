// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "hyperbmc/circuit.hpp"
#include "hyperbmc/error.hpp"

namespace hyperbmc {

// Reduced ordered BDDs without complement edges. Levels are positions in the
// variable order; level 0 is the root-most variable. Nodes are never freed:
// a manager lives for one solve and the node cap bounds its memory.
class BddManager {
 public:
  using Ref = std::uint32_t;
  static constexpr Ref kZero = 0;
  static constexpr Ref kOne = 1;

  BddManager(std::size_t num_levels, std::size_t node_cap)
      : num_levels_(static_cast<std::uint32_t>(num_levels)), cap_(node_cap) {
    nodes_.push_back({num_levels_, 0, 0});
    nodes_.push_back({num_levels_, 1, 1});
    table_.assign(1u << 12, kEmpty);
    cache_.assign(1u << 14, CacheEntry{});
  }

  std::size_t size() const { return nodes_.size(); }
  std::uint32_t level(Ref f) const { return nodes_[f].level; }
  Ref low(Ref f) const { return nodes_[f].lo; }
  Ref high(Ref f) const { return nodes_[f].hi; }
  bool is_terminal(Ref f) const { return f <= kOne; }

  Ref var(std::uint32_t lvl) { return make(lvl, kZero, kOne); }

  Ref negate(Ref f) {
    if (f <= kOne) return f ^ 1u;
    if (Ref r; lookup(kNot, f, 0, r)) return r;
    Ref r = make(level(f), negate(low(f)), negate(high(f)));
    store(kNot, f, 0, r);
    return r;
  }

  Ref conj(Ref f, Ref g) { return apply(kAnd, f, g); }
  Ref disj(Ref f, Ref g) { return apply(kOr, f, g); }

  /// Existential (or universal) abstraction of every level flagged in `mask`.
  Ref exists(Ref f, const std::vector<bool>& mask) { return abstract(f, mask, true); }
  Ref forall(Ref f, const std::vector<bool>& mask) { return abstract(f, mask, false); }

  /// Cofactor with the variable at `lvl` fixed to `value`.
  Ref restrict(Ref f, std::uint32_t lvl, bool value) {
    ++epoch_;
    return restrict_rec(f, lvl, value);
  }

  /// Builds the BDD of `root`; `level_of[v]` is the level of variable v.
  Ref from_circuit(const Circuit& c, NodeId root, const std::vector<std::uint32_t>& level_of) {
    std::vector<Ref> value(c.size(), kEmpty);
    std::vector<NodeId> stack{root};
    while (!stack.empty()) {
      NodeId n = stack.back();
      if (value[n] != kEmpty) {
        stack.pop_back();
        continue;
      }
      bool ready = true;
      for (NodeId ch : c.children(n))
        if (value[ch] == kEmpty) {
          stack.push_back(ch);
          ready = false;
        }
      if (!ready) continue;
      stack.pop_back();
      switch (c.kind(n)) {
        case NodeKind::kConst: value[n] = c.const_value(n) ? kOne : kZero; break;
        case NodeKind::kVar: value[n] = var(level_of.at(c.var_of(n))); break;
        case NodeKind::kNot: value[n] = negate(value[c.child(n, 0)]); break;
        case NodeKind::kAnd:
        case NodeKind::kOr: {
          bool is_and = c.kind(n) == NodeKind::kAnd;
          Ref acc = is_and ? kOne : kZero;
          for (NodeId ch : c.children(n)) acc = is_and ? conj(acc, value[ch]) : disj(acc, value[ch]);
          value[n] = acc;
          break;
        }
      }
    }
    return value[root];
  }

 private:
  enum OpCode : std::uint32_t { kNone, kNot, kAnd, kOr, kExists, kForall, kRestrict };
  static constexpr Ref kEmpty = std::numeric_limits<Ref>::max();

  struct Node {
    std::uint32_t level;
    Ref lo, hi;
  };
  struct CacheEntry {
    std::uint32_t op = kNone;
    Ref a = 0, b = 0, result = 0;
  };

  static std::size_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    std::uint64_t h = a * 0x9e3779b97f4a7c15ULL ^ (b + 0x632be59bd9b4e019ULL) * 0xc2b2ae3d27d4eb4fULL ^
                      (c + 0x165667b19e3779f9ULL) * 0xff51afd7ed558ccdULL;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }

  Ref make(std::uint32_t lvl, Ref lo, Ref hi) {
    if (lo == hi) return lo;
    std::size_t mask = table_.size() - 1;
    std::size_t slot = mix(lvl, lo, hi) & mask;
    while (table_[slot] != kEmpty) {
      const Node& n = nodes_[table_[slot]];
      if (n.level == lvl && n.lo == lo && n.hi == hi) return table_[slot];
      slot = (slot + 1) & mask;
    }
    if (nodes_.size() >= cap_) throw ResourceLimit(nodes_.size());
    Ref id = static_cast<Ref>(nodes_.size());
    nodes_.push_back({lvl, lo, hi});
    table_[slot] = id;
    if (nodes_.size() * 2 > table_.size()) grow();
    return id;
  }

  void grow() {
    std::vector<Ref> bigger(table_.size() * 2, kEmpty);
    std::size_t mask = bigger.size() - 1;
    for (Ref id = 2; id < nodes_.size(); ++id) {
      const Node& n = nodes_[id];
      std::size_t slot = mix(n.level, n.lo, n.hi) & mask;
      while (bigger[slot] != kEmpty) slot = (slot + 1) & mask;
      bigger[slot] = id;
    }
    table_.swap(bigger);
    if (cache_.size() < table_.size() && cache_.size() < (1u << 24)) cache_.assign(cache_.size() * 4, CacheEntry{});
  }

  bool lookup(std::uint32_t op, Ref a, Ref b, Ref& result) const {
    const auto& e = cache_[mix(op, a, b) & (cache_.size() - 1)];
    if (e.op != op || e.a != a || e.b != b) return false;
    result = e.result;
    return true;
  }
  void store(std::uint32_t op, Ref a, Ref b, Ref result) {
    cache_[mix(op, a, b) & (cache_.size() - 1)] = {op, a, b, result};
  }

  Ref apply(OpCode op, Ref f, Ref g) {
    if (op == kAnd) {
      if (f == kZero || g == kZero) return kZero;
      if (f == kOne) return g;
      if (g == kOne || f == g) return f;
    } else {
      if (f == kOne || g == kOne) return kOne;
      if (f == kZero) return g;
      if (g == kZero || f == g) return f;
    }
    if (f > g) std::swap(f, g);
    if (Ref r; lookup(op, f, g, r)) return r;
    std::uint32_t lf = level(f), lg = level(g);
    std::uint32_t top = std::min(lf, lg);
    Ref f0 = lf == top ? low(f) : f, f1 = lf == top ? high(f) : f;
    Ref g0 = lg == top ? low(g) : g, g1 = lg == top ? high(g) : g;
    Ref lo = apply(op, f0, g0);
    Ref hi = apply(op, f1, g1);
    Ref r = make(top, lo, hi);
    store(op, f, g, r);
    return r;
  }

  Ref abstract(Ref f, const std::vector<bool>& mask, bool existential) {
    ++epoch_;
    last_quantified_ = 0;
    bool any = false;
    for (std::uint32_t l = 0; l < mask.size(); ++l)
      if (mask[l]) {
        last_quantified_ = l;
        any = true;
      }
    if (!any) return f;
    return abstract_rec(f, mask, existential);
  }

  Ref abstract_rec(Ref f, const std::vector<bool>& mask, bool existential) {
    if (f <= kOne || level(f) > last_quantified_) return f;
    std::uint32_t op = existential ? kExists : kForall;
    if (Ref r; lookup(op, f, epoch_, r)) return r;
    Ref lo = abstract_rec(low(f), mask, existential);
    Ref hi = abstract_rec(high(f), mask, existential);
    Ref r;
    if (mask[level(f)])
      r = existential ? disj(lo, hi) : conj(lo, hi);
    else
      r = make(level(f), lo, hi);
    store(op, f, epoch_, r);
    return r;
  }

  Ref restrict_rec(Ref f, std::uint32_t lvl, bool value) {
    if (f <= kOne || level(f) > lvl) return f;
    if (level(f) == lvl) return value ? high(f) : low(f);
    if (Ref r; lookup(kRestrict, f, epoch_, r)) return r;
    Ref r = make(level(f), restrict_rec(low(f), lvl, value), restrict_rec(high(f), lvl, value));
    store(kRestrict, f, epoch_, r);
    return r;
  }

  std::uint32_t num_levels_;
  std::size_t cap_;
  std::vector<Node> nodes_;
  std::vector<Ref> table_;
  std::vector<CacheEntry> cache_;
  std::uint32_t epoch_ = 0;
  std::uint32_t last_quantified_ = 0;
};

}  // namespace hyperbmc
