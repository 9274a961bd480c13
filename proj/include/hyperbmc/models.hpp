// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hyperbmc/error.hpp"
#include "hyperbmc/hyperltl.hpp"
#include "hyperbmc/kripke.hpp"

namespace hyperbmc {

// ---------------------------------------------------------------------------
// Bakery mutual exclusion

namespace detail {

enum : std::uint8_t { kNoncrit = 0, kWait = 1, kCrit = 2 };

struct BakeryState {
  std::vector<std::uint8_t> status;
  std::vector<std::uint8_t> ticket;
  std::uint32_t selected = 0;
  auto operator<=>(const BakeryState&) const = default;
};

inline BakeryState bakery_step(const BakeryState& s, std::uint32_t select, std::size_t n) {
  BakeryState t = s;
  t.selected = select;
  std::uint8_t max_ticket = *std::max_element(s.ticket.begin(), s.ticket.end());
  std::uint8_t drawn = static_cast<std::uint8_t>(std::min<std::size_t>(max_ticket + 1u, n));
  bool crit_taken = std::find(s.status.begin(), s.status.end(), kCrit) != s.status.end();

  // At most one waiting, unselected process enters: the one with the
  // smallest (ticket, pid) among all processes holding a ticket.
  if (!crit_taken) {
    std::size_t best = n;
    for (std::size_t p = 0; p < n; ++p) {
      if (s.ticket[p] == 0) continue;
      if (best == n || s.ticket[p] < s.ticket[best]) best = p;
    }
    if (best < n && s.status[best] == kWait && !((select >> best) & 1u)) t.status[best] = kCrit;
  }
  for (std::size_t p = 0; p < n; ++p) {
    if (!((select >> p) & 1u)) continue;
    if (s.status[p] == kCrit) {
      t.status[p] = kNoncrit;
      t.ticket[p] = 0;
    } else {
      t.status[p] = kWait;
      t.ticket[p] = drawn;
    }
  }
  return t;
}

inline std::string bakery_name(const BakeryState& s) {
  static const char kCode[] = {'N', 'W', 'C'};
  std::string name = "s_";
  for (auto st : s.status) name += kCode[st];
  name += '_';
  for (auto t : s.ticket) name += std::to_string(t);
  name += '_';
  for (std::size_t p = 0; p < s.status.size(); ++p) name += ((s.selected >> p) & 1u) ? '1' : '0';
  return name;
}

}  // namespace detail

/// Explicit-state Bakery protocol for n processes (2 or 3).
///
/// Each step selects a subset of processes. A selected process in its
/// critical section leaves it and returns its ticket; any other selected
/// process draws ticket max+1 (saturating at n) and waits. An unselected
/// waiting process enters when no one is critical and its (ticket, pid) is
/// the smallest held. A state carries the selection that produced it.
///
/// Propositions: selectP<i>, pause (empty selection), pcP<i>_0 / pcP<i>_1
/// (noncrit = 0, wait = 1, crit = 2).
inline KripkeStructure gen_bakery(std::size_t n) {
  if (n < 2 || n > 3) throw ConfigError("bakery supports 2 or 3 processes");
  KripkeStructure k;
  std::vector<ApId> select(n), pc0(n), pc1(n);
  for (std::size_t p = 0; p < n; ++p) select[p] = k.add_ap("selectP" + std::to_string(p));
  ApId pause = k.add_ap("pause");
  for (std::size_t p = 0; p < n; ++p) {
    pc0[p] = k.add_ap("pcP" + std::to_string(p) + "_0");
    pc1[p] = k.add_ap("pcP" + std::to_string(p) + "_1");
  }

  detail::BakeryState init{std::vector<std::uint8_t>(n, detail::kNoncrit), std::vector<std::uint8_t>(n, 0), 0};
  std::map<detail::BakeryState, StateId> ids;
  std::vector<detail::BakeryState> order;
  std::deque<detail::BakeryState> queue{init};
  ids.emplace(init, k.add_state(detail::bakery_name(init)));
  order.push_back(init);
  std::vector<std::pair<StateId, StateId>> edges;
  while (!queue.empty()) {
    auto s = queue.front();
    queue.pop_front();
    for (std::uint32_t sel = 0; sel < (1u << n); ++sel) {
      auto t = detail::bakery_step(s, sel, n);
      auto [it, inserted] = ids.try_emplace(t, 0);
      if (inserted) {
        it->second = k.add_state(detail::bakery_name(t));
        order.push_back(t);
        queue.push_back(t);
      }
      edges.emplace_back(ids.at(s), it->second);
    }
  }
  for (const auto& s : order) {
    StateId id = ids.at(s);
    if (s.selected == 0) k.add_label(id, pause);
    for (std::size_t p = 0; p < n; ++p) {
      if ((s.selected >> p) & 1u) k.add_label(id, select[p]);
      if (s.status[p] & 1u) k.add_label(id, pc0[p]);
      if (s.status[p] & 2u) k.add_label(id, pc1[p]);
    }
  }
  for (auto [a, b] : edges) k.add_transition(a, b);
  k.set_init(0);
  k.validate();
  return k;
}

// ---------------------------------------------------------------------------
// Grid path planning

struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

struct GridSpec {
  int width = 0;
  int height = 0;
  std::set<Cell> obstacles;
  std::set<Cell> inits;
  std::set<Cell> goals;
};

/// Reads a map of `.` free, `#` obstacle, `I` init, `G` goal cells. The first
/// line is the top row (y = height-1); x grows to the right.
inline GridSpec parse_grid_map(std::string_view text) {
  std::vector<std::string> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == ';') continue;
    rows.push_back(line);
  }
  if (rows.empty()) throw ConfigError("empty grid map");
  GridSpec g;
  g.height = static_cast<int>(rows.size());
  g.width = static_cast<int>(rows.front().size());
  for (int r = 0; r < g.height; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    if (static_cast<int>(row.size()) != g.width)
      throw ParseError("grid rows differ in width", static_cast<std::size_t>(r) + 1, row.size() + 1);
    for (int x = 0; x < g.width; ++x) {
      Cell c{x, g.height - 1 - r};
      switch (row[static_cast<std::size_t>(x)]) {
        case '.': break;
        case '#': g.obstacles.insert(c); break;
        case 'I': g.inits.insert(c); break;
        case 'G': g.goals.insert(c); break;
        default:
          throw ParseError(std::string("unexpected grid character '") + row[static_cast<std::size_t>(x)] + "'",
                           static_cast<std::size_t>(r) + 1, static_cast<std::size_t>(x) + 1);
      }
    }
  }
  return g;
}

inline std::string render_grid_map(const GridSpec& g) {
  std::string out;
  for (int y = g.height - 1; y >= 0; --y) {
    for (int x = 0; x < g.width; ++x) {
      Cell c{x, y};
      out += g.obstacles.count(c) ? '#' : g.inits.count(c) ? 'I' : g.goals.count(c) ? 'G' : '.';
    }
    out += '\n';
  }
  return out;
}

namespace detail {

enum class Move { kNone, kUp, kDown, kLeft, kRight };

inline char move_code(Move m) {
  switch (m) {
    case Move::kNone: return 'n';
    case Move::kUp: return 'u';
    case Move::kDown: return 'd';
    case Move::kLeft: return 'l';
    case Move::kRight: return 'r';
  }
  return '?';
}

}  // namespace detail

/// One state per reachable (cell, last move). Moves are labelled with two
/// bits: up = {}, down = {mv0}, left = {mv1}, right = {mv0, mv1}. Goal cells
/// carry `goal`, halt, and only loop on themselves. Several init cells get a
/// shared `start` state in front of them.
inline KripkeStructure gen_grid(const GridSpec& g) {
  using detail::Move;
  if (g.width <= 0 || g.height <= 0) throw ConfigError("grid needs positive width and height");
  if (g.inits.empty()) throw ConfigError("grid has no init cell");
  if (g.goals.empty()) throw ConfigError("grid has no goal cell");
  auto inside = [&](Cell c) { return c.x >= 0 && c.y >= 0 && c.x < g.width && c.y < g.height; };
  for (const auto* set : {&g.inits, &g.goals})
    for (Cell c : *set) {
      if (!inside(c)) throw ConfigError("grid cell outside the map");
      if (g.obstacles.count(c)) throw ConfigError("init or goal cell on an obstacle");
    }
  auto free = [&](Cell c) { return inside(c) && g.obstacles.count(c) == 0; };

  KripkeStructure k;
  ApId goal = k.add_ap("goal");
  ApId mv0 = k.add_ap("mv0");
  ApId mv1 = k.add_ap("mv1");

  using Key = std::pair<Cell, Move>;
  std::map<Key, StateId> ids;
  std::deque<Key> queue;
  std::vector<std::pair<StateId, StateId>> edges;
  auto name_of = [](Key key) {
    return "x" + std::to_string(key.first.x) + "y" + std::to_string(key.first.y) + "_" + detail::move_code(key.second);
  };
  auto intern = [&](Key key) {
    auto [it, inserted] = ids.try_emplace(key, 0);
    if (inserted) {
      it->second = k.add_state(name_of(key));
      queue.push_back(key);
      StateId s = it->second;
      if (g.goals.count(key.first)) {
        k.add_label(s, goal);
        k.set_halt(s);
      }
      if (key.second == Move::kDown || key.second == Move::kRight) k.add_label(s, mv0);
      if (key.second == Move::kLeft || key.second == Move::kRight) k.add_label(s, mv1);
    }
    return it->second;
  };

  if (g.inits.size() > 1) {
    StateId start = k.add_state("start");
    k.set_init(start);
    for (Cell c : g.inits) edges.emplace_back(start, intern({c, Move::kNone}));
  } else {
    k.set_init(intern({*g.inits.begin(), Move::kNone}));
  }

  const std::pair<Move, Cell> steps[] = {
      {Move::kUp, {0, 1}}, {Move::kDown, {0, -1}}, {Move::kLeft, {-1, 0}}, {Move::kRight, {1, 0}}};
  while (!queue.empty()) {
    Key key = queue.front();
    queue.pop_front();
    StateId s = ids.at(key);
    if (g.goals.count(key.first)) {
      edges.emplace_back(s, s);
      continue;
    }
    bool moved = false;
    for (auto [m, d] : steps) {
      Cell next{key.first.x + d.x, key.first.y + d.y};
      if (!free(next)) continue;
      edges.emplace_back(s, intern({next, m}));
      moved = true;
    }
    if (!moved) edges.emplace_back(s, s);
  }
  for (auto [a, b] : edges) k.add_transition(a, b);
  k.validate();
  return k;
}

/// The 10x10 map of the path-planning case study: init (0,0), goal (7,5).
inline GridSpec paper_grid_10x10() {
  GridSpec g;
  g.width = g.height = 10;
  g.inits = {{0, 0}};
  g.goals = {{7, 5}};
  g.obstacles = {{5, 0}, {7, 0}, {3, 1}, {9, 1}, {1, 3}, {3, 3}, {6, 3}, {3, 4}, {5, 4}, {6, 4},
                 {7, 4}, {1, 5}, {3, 5}, {4, 5}, {8, 5}, {1, 6}, {2, 6}, {3, 6}, {4, 6}, {6, 6},
                 {7, 6}, {8, 6}, {1, 8}, {2, 8}, {3, 8}, {1, 9}, {2, 9}, {4, 9}};
  return g;
}

// ---------------------------------------------------------------------------
// Non-repudiation protocol with a trusted third party

enum class NonRepVariant { kCorrect, kIncorrect };

/// Message exchange between sender A and receiver B through T.
///
/// Every step is one action, labelled with an action proposition such as
/// `A_m_T` (A sends m to T). `m` and `NRO` mark what B holds, `NRR` what A
/// holds; they stay set once received. A may skip instead of sending m or
/// NRO, and B may skip instead of sending NRR; a skip aborts the run. Every
/// run ends in an idle halt state without action labels.
///
/// correct:   A_m_T, A_NRO_T, T_m_B, B_NRR_T, T_NRO_B, T_NRR_A
/// incorrect: A_m_T, A_NRO_T, T_m_B, T_NRO_B, B_NRR_T, T_NRR_A
inline KripkeStructure gen_nonrepudiation(NonRepVariant variant) {
  KripkeStructure k;
  for (const char* ap : {"m", "NRO", "NRR", "A_m_B", "A_m_T", "A_NRO_B", "A_NRO_T", "A_skip", "B_NRR_A", "B_NRR_T",
                         "B_skip", "T_m_B", "T_NRO_B", "T_NRR_A", "T_skip"})
    k.add_ap(ap);

  struct Step {
    std::string action;
    std::string delivers;  // flag set by this step, may be empty
  };
  std::vector<Step> run = {{"A_m_T", ""}, {"A_NRO_T", ""}, {"T_m_B", "m"}};
  if (variant == NonRepVariant::kCorrect)
    run.insert(run.end(), {{"B_NRR_T", ""}, {"T_NRO_B", "NRO"}, {"T_NRR_A", "NRR"}});
  else
    run.insert(run.end(), {{"T_NRO_B", "NRO"}, {"B_NRR_T", ""}, {"T_NRR_A", "NRR"}});

  auto label = [&](StateId s, const std::string& action, const std::set<std::string>& flags) {
    if (!action.empty()) k.add_label(s, *k.find_ap(action));
    for (const auto& f : flags) k.add_label(s, *k.find_ap(f));
  };
  auto idle = [&](const std::string& name, const std::set<std::string>& flags) {
    StateId s = k.add_state(name);
    label(s, "", flags);
    k.set_halt(s);
    k.add_transition(s, s);
    return s;
  };

  StateId prev = k.add_state("s0");
  label(prev, "", {});
  k.set_init(prev);
  std::set<std::string> flags;
  for (std::size_t i = 0; i < run.size(); ++i) {
    // Before A's sends and before B's receipt, the acting party may skip.
    std::string actor = run[i].action.substr(0, 1);
    if (actor == "A" || actor == "B") {
      StateId skip = k.add_state("skip" + std::to_string(i + 1));
      label(skip, actor + "_skip", flags);
      k.add_transition(prev, skip);
      k.add_transition(skip, idle("abort" + std::to_string(i + 1), flags));
    }
    if (!run[i].delivers.empty()) flags.insert(run[i].delivers);
    StateId next = k.add_state("s" + std::to_string(i + 1));
    label(next, run[i].action, flags);
    k.add_transition(prev, next);
    prev = next;
  }
  k.add_transition(prev, idle("done", flags));
  k.validate();
  return k;
}

// ---------------------------------------------------------------------------
// Formula library

struct SpecEntry {
  std::string name;
  std::string formula;
  /// One role description per quantified trace variable, in prefix order.
  std::vector<std::string> roles;
  std::string notes;

  std::size_t arity() const { return roles.size(); }
};

namespace detail {

inline std::string iff_atoms(const std::string& a, const std::string& va, const std::string& b, const std::string& vb) {
  return "(" + a + "[" + va + "] <-> " + b + "[" + vb + "])";
}

inline std::string conjunction(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? " & " : "") + parts[i];
  return out;
}

}  // namespace detail

inline std::vector<std::string> builtin_spec_names() {
  return {"symmetry", "linearizability", "ni", "fairness", "shortest_path", "robustness", "mutation"};
}

/// Named formula of the case studies. `n` is the process count for symmetry.
inline SpecEntry builtin_spec(const std::string& name, std::size_t n = 2) {
  using detail::iff_atoms;
  if (name == "symmetry") {
    if (n < 2 || n > 3) throw ConfigError("symmetry supports 2 or 3 processes");
    // Swap P0 and P1; any further process maps to itself.
    auto image = [](std::size_t p) { return p == 0 ? 1 : p == 1 ? 0 : p; };
    std::vector<std::string> parts;
    for (std::size_t p = 0; p < n; ++p)
      parts.push_back(iff_atoms("selectP" + std::to_string(p), "A", "selectP" + std::to_string(image(p)), "B"));
    parts.push_back(iff_atoms("pause", "A", "pause", "B"));
    for (std::size_t p = 0; p < n; ++p)
      for (const char* bit : {"_0", "_1"})
        parts.push_back(iff_atoms("pcP" + std::to_string(p) + bit, "A", "pcP" + std::to_string(image(p)) + bit, "B"));
    return {name, "forall A. exists B. G (" + detail::conjunction(parts) + ")",
            {"bakery run", "bakery run with P0 and P1 swapped"},
            "generate the model with `gen bakery`; check with --mode falsify"};
  }
  if (name == "linearizability") {
    return {name,
            "forall M. exists S. G ((inv[M] <-> inv[S]) & (res[M] <-> res[S]) & (val[M] <-> val[S]))",
            {"concurrent implementation", "sequential specification"},
            "the implementation and the specification are separate models sharing the history propositions "
            "inv, res, val"};
  }
  if (name == "ni") {
    std::string pin_differs = "!((pin0[A] <-> pin0[B]) & (pin1[A] <-> pin1[B]))";
    std::string result_equal = "(res0[A] <-> res0[B]) & (res1[A] <-> res1[B])";
    return {name,
            "forall A. exists B. X (" + pin_differs + " & ((!terminate[A] | !terminate[B]) U (terminate[A] & "
                "terminate[B] & " + result_equal + ")))",
            {"program run", "program run with a different PIN"},
            "the PIN is chosen by the first transition, hence the leading X; see data/ni_leak.kr and "
            "data/ni_secure.kr"};
  }
  if (name == "fairness") {
    std::vector<std::string> act_a, act_b;
    for (const char* a : {"A_m_B", "A_m_T", "A_NRO_B", "A_NRO_T", "A_skip"}) act_a.push_back(iff_atoms(a, "A", a, "B"));
    for (const char* b : {"B_NRR_A", "B_NRR_T", "B_skip"}) act_b.push_back(iff_atoms(b, "A", b, "B"));
    std::string fair = "((F NRR[B]) <-> (F NRO[B]))";
    return {name,
            "exists A. forall B. (F m[A]) & (F NRR[A]) & (F NRO[A]) & ((G (" + detail::conjunction(act_a) + ")) -> " +
                fair + ") & ((G (" + detail::conjunction(act_b) + ")) -> " + fair + ")",
            {"effective protocol run", "run agreeing with A's or B's actions"},
            "generate models with `gen nonrep`; use hpes/hopt since every run halts"};
  }
  if (name == "shortest_path") {
    return {name, "exists A. forall B. (!goal[B]) U goal[A]", {"shortest path", "any path"},
            "under classic the first bound with a true QBF is the shortest distance d; pes concludes HOLDS from d+1"};
  }
  if (name == "robustness") {
    return {name, "exists A. forall B. (G ((mv0[A] <-> mv0[B]) & (mv1[A] <-> mv1[B]))) -> F (goal[A] & goal[B])",
            {"robust path", "path from any init cell"}, "strategy is the two move bits"};
  }
  if (name == "mutation") {
    return {name, "exists A. forall B. (mut[A] & !mut[B]) & ((in[A] <-> in[B]) U !(out[A] <-> out[B]))",
            {"mutant model", "original model"}, "see data/mutation_mutant.kr and data/mutation_original.kr"};
  }
  throw ConfigError("unknown builtin spec '" + name + "'");
}

}  // namespace hyperbmc
