// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <sstream>
#include <string>

#include "hyperbmc/driver.hpp"

namespace hyperbmc {

/// `{a,b}` with propositions in declaration order.
inline std::string render_letter(const std::vector<std::string>& letter) {
  std::string out = "{";
  for (std::size_t i = 0; i < letter.size(); ++i) out += (i ? "," : "") + letter[i];
  return out + "}";
}

/// One line per trace variable: `VAR: {a,b} {a} {} ...`.
inline std::string render_witness(const std::map<std::string, TracePrefix>& witness) {
  std::ostringstream out;
  for (const auto& [var, prefix] : witness) {
    out << var << ':';
    for (const auto& letter : prefix.letters) out << ' ' << render_letter(letter);
    out << '\n';
  }
  return out.str();
}

inline std::string render_text(const Verdict& v, const std::map<std::string, std::shared_ptr<const KripkeStructure>>& models) {
  std::ostringstream out;
  out << "verdict: " << to_string(v.interpretation) << '\n';
  out << "bound: " << v.k << '\n';
  out << "semantics: " << to_string(v.semantics.kind) << (v.semantics.paper_literal ? " (literal release)" : "")
      << '\n';
  out << "encoded: " << (v.negated ? "negated formula" : "formula as given") << '\n';
  out << "qbf: " << (v.qbf_value ? "TRUE" : "FALSE") << '\n';
  out << "fragment: " << to_string(v.fragment_hint) << '\n';
  for (const auto& b : v.history)
    out << "  k=" << b.k << " qbf=" << (b.qbf_value ? "TRUE" : "FALSE") << " time=" << b.seconds << "s"
        << " bdd_nodes=" << b.bdd_nodes << '\n';
  if (v.witness) {
    out << (v.negated ? "counterexample" : "witness") << (v.witness_verified ? " (verified):\n" : " (unverified):\n");
    for (const auto& [var, prefix] : *v.witness) {
      auto it = models.find(var);
      out << "  " << var << ':';
      for (std::size_t i = 0; i < prefix.states.size(); ++i) {
        out << ' ';
        if (it != models.end()) out << it->second->state_name(prefix.states[i]);
        out << render_letter(prefix.letters[i]);
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace hyperbmc
