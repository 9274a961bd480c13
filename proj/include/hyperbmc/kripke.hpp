// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hyperbmc/detail/cursor.hpp"
#include "hyperbmc/error.hpp"

namespace hyperbmc {

using StateId = std::size_t;
using ApId = std::size_t;

/// Reserved proposition that holds exactly on halt states.
inline constexpr std::string_view kHaltProposition = "@halt";

/// Finite Kripke structure with declaration-ordered states and propositions.
///
/// States and propositions are addressed by their declaration index; that
/// order fixes the variable numbering of every downstream encoding. Halt
/// states are required to carry a self-loop.
class KripkeStructure {
 public:
  ApId add_ap(const std::string& name) {
    if (!detail::is_identifier(name))
      throw ValidationError(ValidationKind::kDanglingReference, name, "invalid proposition name '" + name + "'");
    if (ap_index_.count(name) != 0)
      throw ValidationError(ValidationKind::kDuplicate, name, "duplicate proposition '" + name + "'");
    ap_index_.emplace(name, aps_.size());
    aps_.push_back(name);
    for (auto& row : label_bits_) row.push_back(false);
    return aps_.size() - 1;
  }

  StateId add_state(const std::string& name) {
    if (!detail::is_identifier(name))
      throw ValidationError(ValidationKind::kDanglingReference, name, "invalid state name '" + name + "'");
    if (state_index_.count(name) != 0)
      throw ValidationError(ValidationKind::kDuplicate, name, "duplicate state '" + name + "'");
    state_index_.emplace(name, states_.size());
    states_.push_back(name);
    succ_.emplace_back();
    label_bits_.emplace_back(aps_.size(), false);
    halt_.push_back(false);
    return states_.size() - 1;
  }

  void set_init(StateId s) {
    check_state(s);
    init_ = s;
  }

  void add_transition(StateId from, StateId to) {
    check_state(from);
    check_state(to);
    auto& out = succ_[from];
    auto it = std::lower_bound(out.begin(), out.end(), to);
    if (it == out.end() || *it != to) out.insert(it, to);
  }

  void add_label(StateId s, ApId ap) {
    check_state(s);
    if (ap >= aps_.size()) throw std::out_of_range("proposition index");
    label_bits_[s][ap] = true;
  }

  void set_halt(StateId s, bool halting = true) {
    check_state(s);
    halt_[s] = halting;
  }

  std::size_t num_states() const { return states_.size(); }
  std::size_t num_aps() const { return aps_.size(); }
  const std::vector<std::string>& states() const { return states_; }
  const std::vector<std::string>& aps() const { return aps_; }
  const std::string& state_name(StateId s) const { return states_.at(s); }
  const std::string& ap_name(ApId a) const { return aps_.at(a); }

  bool has_init() const { return init_.has_value(); }
  StateId init() const {
    if (!init_) throw ValidationError(ValidationKind::kMissing, "init", "structure has no initial state");
    return *init_;
  }

  /// Successors in ascending state order.
  const std::vector<StateId>& successors(StateId s) const { return succ_.at(s); }
  bool has_transition(StateId from, StateId to) const {
    const auto& out = succ_.at(from);
    return std::binary_search(out.begin(), out.end(), to);
  }
  std::size_t num_transitions() const {
    std::size_t n = 0;
    for (const auto& out : succ_) n += out.size();
    return n;
  }

  bool has_label(StateId s, ApId ap) const { return label_bits_.at(s).at(ap); }
  /// Propositions of `s` in declaration order.
  std::vector<ApId> label(StateId s) const {
    std::vector<ApId> out;
    for (ApId a = 0; a < aps_.size(); ++a)
      if (label_bits_.at(s)[a]) out.push_back(a);
    return out;
  }
  std::vector<std::string> label_names(StateId s) const {
    std::vector<std::string> out;
    for (ApId a : label(s)) out.push_back(aps_[a]);
    return out;
  }

  bool is_halt(StateId s) const { return halt_.at(s); }
  bool has_halt_states() const { return std::find(halt_.begin(), halt_.end(), true) != halt_.end(); }

  std::optional<StateId> find_state(std::string_view name) const {
    auto it = state_index_.find(std::string(name));
    if (it == state_index_.end()) return std::nullopt;
    return it->second;
  }
  std::optional<ApId> find_ap(std::string_view name) const {
    auto it = ap_index_.find(std::string(name));
    if (it == ap_index_.end()) return std::nullopt;
    return it->second;
  }

  /// Checks totality, init presence, and that halt states have a self-loop.
  void validate() const {
    if (states_.empty()) throw ValidationError(ValidationKind::kMissing, "states", "structure declares no states");
    if (!init_) throw ValidationError(ValidationKind::kMissing, "init", "structure has no initial state");
    for (StateId s = 0; s < states_.size(); ++s) {
      if (succ_[s].empty())
        throw ValidationError(ValidationKind::kNonTotal, states_[s], "state '" + states_[s] + "' has no successor");
      if (halt_[s] && !has_transition(s, s))
        throw ValidationError(ValidationKind::kHaltNotAbsorbing, states_[s],
                              "halt state '" + states_[s] + "' has no self-loop");
    }
  }

  friend bool operator==(const KripkeStructure& a, const KripkeStructure& b) {
    return a.states_ == b.states_ && a.aps_ == b.aps_ && a.init_ == b.init_ && a.succ_ == b.succ_ &&
           a.label_bits_ == b.label_bits_ && a.halt_ == b.halt_;
  }

 private:
  void check_state(StateId s) const {
    if (s >= states_.size()) throw std::out_of_range("state index");
  }

  std::vector<std::string> states_;
  std::vector<std::string> aps_;
  std::unordered_map<std::string, StateId> state_index_;
  std::unordered_map<std::string, ApId> ap_index_;
  std::optional<StateId> init_;
  std::vector<std::vector<StateId>> succ_;
  std::vector<std::vector<bool>> label_bits_;
  std::vector<bool> halt_;
};

/// One structure per trace variable.
using ModelMap = std::map<std::string, std::shared_ptr<const KripkeStructure>>;

/// Initialized finite path of length k+1 together with its letters.
struct TracePrefix {
  std::vector<StateId> states;
  /// Proposition names of each state, in declaration order.
  std::vector<std::vector<std::string>> letters;

  std::size_t length() const { return states.size(); }
  friend bool operator==(const TracePrefix&, const TracePrefix&) = default;
};

/// True iff `states` starts at init and follows transitions.
inline bool is_initialized_path(const KripkeStructure& k, const std::vector<StateId>& states) {
  if (states.empty() || states.front() != k.init()) return false;
  for (StateId s : states)
    if (s >= k.num_states()) return false;
  for (std::size_t i = 0; i + 1 < states.size(); ++i)
    if (!k.has_transition(states[i], states[i + 1])) return false;
  return true;
}

inline TracePrefix make_prefix(const KripkeStructure& k, std::vector<StateId> states) {
  TracePrefix p;
  p.letters.reserve(states.size());
  for (StateId s : states) p.letters.push_back(k.label_names(s));
  p.states = std::move(states);
  return p;
}

/// Number of initialized paths with k+1 states, saturating at uint64 max.
inline std::uint64_t count_prefixes(const KripkeStructure& k, std::size_t bound) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::vector<std::uint64_t> ways(k.num_states(), 0), next(k.num_states());
  ways[k.init()] = 1;
  for (std::size_t step = 0; step < bound; ++step) {
    std::fill(next.begin(), next.end(), 0);
    for (StateId s = 0; s < k.num_states(); ++s) {
      if (ways[s] == 0) continue;
      for (StateId t : k.successors(s)) next[t] = (kMax - next[t] < ways[s]) ? kMax : next[t] + ways[s];
    }
    ways.swap(next);
  }
  std::uint64_t total = 0;
  for (auto w : ways) total = (kMax - total < w) ? kMax : total + w;
  return total;
}

/// All initialized paths with k+1 states, in lexicographic state-index order.
inline std::vector<TracePrefix> enumerate_prefixes(const KripkeStructure& k, std::size_t bound,
                                                   std::size_t cap = std::numeric_limits<std::size_t>::max()) {
  auto count = count_prefixes(k, bound);
  if (count > cap) throw ExplosionGuard(static_cast<std::size_t>(std::min<std::uint64_t>(count, SIZE_MAX)));
  std::vector<TracePrefix> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<StateId> path{k.init()};
  auto dfs = [&](auto&& self) -> void {
    if (path.size() == bound + 1) {
      out.push_back(make_prefix(k, path));
      return;
    }
    for (StateId t : k.successors(path.back())) {
      path.push_back(t);
      self(self);
      path.pop_back();
    }
  };
  dfs(dfs);
  return out;
}

// ---------------------------------------------------------------------------
// `.kr` text format

namespace detail {

inline std::vector<std::string> identifier_list(Cursor& in) {
  std::vector<std::string> ids;
  while (in.at_identifier()) ids.push_back(in.identifier());
  return ids;
}

}  // namespace detail

/// Parses and validates a `.kr` document.
inline KripkeStructure parse_kripke(std::string_view text) {
  detail::Cursor in(text);
  KripkeStructure k;
  struct Pending {
    std::string name;
    std::size_t line, column;
  };
  std::vector<Pending> halts;
  std::vector<std::pair<Pending, Pending>> transitions;
  std::vector<std::pair<Pending, std::vector<Pending>>> labels;
  std::optional<Pending> init;

  auto here = [&](std::string name) { return Pending{std::move(name), in.line(), in.column()}; };
  auto positioned = [](const Pending& p, const std::string& what) {
    return std::to_string(p.line) + ":" + std::to_string(p.column) + ": " + what;
  };

  while (!in.at_end()) {
    in.skip_space();
    std::size_t line = in.line(), column = in.column();
    std::string keyword = in.identifier();
    try {
      if (keyword == "ap") {
        for (auto& name : detail::identifier_list(in)) k.add_ap(name);
      } else if (keyword == "states") {
        for (auto& name : detail::identifier_list(in)) k.add_state(name);
      } else if (keyword == "init") {
        if (init) throw ValidationError(ValidationKind::kDuplicate, "init", "duplicate init statement");
        in.skip_space();
        init = here("");
        init->name = in.identifier();
      } else if (keyword == "halt") {
        while (in.at_identifier()) {
          in.skip_space();
          auto p = here("");
          p.name = in.identifier();
          halts.push_back(std::move(p));
        }
      } else if (keyword == "label") {
        in.skip_space();
        auto state = here("");
        state.name = in.identifier();
        in.expect("{");
        std::vector<Pending> props;
        while (!in.accept("}")) {
          in.skip_space();
          auto p = here("");
          p.name = in.identifier();
          props.push_back(std::move(p));
          in.accept(",");
        }
        labels.emplace_back(std::move(state), std::move(props));
      } else if (keyword == "trans") {
        in.skip_space();
        auto from = here("");
        from.name = in.identifier();
        in.expect("->");
        in.skip_space();
        auto to = here("");
        to.name = in.identifier();
        transitions.emplace_back(std::move(from), std::move(to));
      } else {
        throw ParseError("unknown statement '" + keyword + "'", line, column);
      }
    } catch (const ValidationError& e) {
      throw ValidationError(e.kind(), e.subject(),
                            std::to_string(line) + ":" + std::to_string(column) + ": " + e.what());
    }
    in.expect(";");
  }

  auto state_of = [&](const Pending& p) {
    auto s = k.find_state(p.name);
    if (!s) throw ValidationError(ValidationKind::kDanglingReference, p.name, positioned(p, "undeclared state '" + p.name + "'"));
    return *s;
  };

  if (!init) throw ValidationError(ValidationKind::kMissing, "init", "missing init statement");
  k.set_init(state_of(*init));
  for (const auto& h : halts) k.set_halt(state_of(h));
  for (const auto& [from, to] : transitions) k.add_transition(state_of(from), state_of(to));

  std::vector<bool> labelled(k.num_states(), false);
  for (const auto& [state, props] : labels) {
    StateId s = state_of(state);
    if (labelled[s])
      throw ValidationError(ValidationKind::kDuplicate, state.name, positioned(state, "second label statement for '" + state.name + "'"));
    labelled[s] = true;
    for (const auto& p : props) {
      auto ap = k.find_ap(p.name);
      if (!ap)
        throw ValidationError(ValidationKind::kDanglingReference, p.name, positioned(p, "undeclared proposition '" + p.name + "'"));
      k.add_label(s, *ap);
    }
  }
  for (StateId s = 0; s < k.num_states(); ++s)
    if (!labelled[s])
      throw ValidationError(ValidationKind::kMissing, k.state_name(s), "state '" + k.state_name(s) + "' has no label statement");

  k.validate();
  return k;
}

/// Canonical `.kr` rendering; `parse_kripke(render_kripke(k)) == k`.
inline std::string render_kripke(const KripkeStructure& k) {
  std::ostringstream out;
  auto join = [&](const std::vector<std::string>& names, const char* sep) {
    for (std::size_t i = 0; i < names.size(); ++i) out << (i ? sep : "") << names[i];
  };
  out << "ap";
  for (const auto& a : k.aps()) out << ' ' << a;
  out << ";\nstates";
  for (const auto& s : k.states()) out << ' ' << s;
  out << ";\ninit " << k.state_name(k.init()) << ";\n";
  std::vector<std::string> halts;
  for (StateId s = 0; s < k.num_states(); ++s)
    if (k.is_halt(s)) halts.push_back(k.state_name(s));
  if (!halts.empty()) {
    out << "halt ";
    join(halts, " ");
    out << ";\n";
  }
  for (StateId s = 0; s < k.num_states(); ++s) {
    out << "label " << k.state_name(s) << " {";
    join(k.label_names(s), ",");
    out << "};\n";
  }
  for (StateId s = 0; s < k.num_states(); ++s)
    for (StateId t : k.successors(s)) out << "trans " << k.state_name(s) << " -> " << k.state_name(t) << ";\n";
  return out.str();
}

}  // namespace hyperbmc
