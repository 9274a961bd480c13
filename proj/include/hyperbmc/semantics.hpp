// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string_view>

namespace hyperbmc {

/// How pending temporal obligations are read at the bound k.
///
///   kPes / kOpt          never / always fulfilled
///   kHpes / kHopt        exact when every trace sits in a halt state at k,
///                        otherwise pessimistic / optimistic
///   kClassic             textbook BMC unrolling: every subformula at k+1 is false
///   kClassicDual         same with true at k+1; only reachable through dual()
enum class Semantics { kPes, kOpt, kHpes, kHopt, kClassic, kClassicDual };

/// Semantics plus the release-at-bound variant for the halting rules.
///
/// With `paper_literal` the halting release case tests its first operand at
/// k; the default tests the second operand, which is the value of a release
/// on a trace whose last letter repeats forever.
struct BoundedSemantics {
  Semantics kind = Semantics::kPes;
  bool paper_literal = false;
};

inline Semantics dual(Semantics s) {
  switch (s) {
    case Semantics::kPes: return Semantics::kOpt;
    case Semantics::kOpt: return Semantics::kPes;
    case Semantics::kHpes: return Semantics::kHopt;
    case Semantics::kHopt: return Semantics::kHpes;
    case Semantics::kClassic: return Semantics::kClassicDual;
    case Semantics::kClassicDual: return Semantics::kClassic;
  }
  return s;
}

inline BoundedSemantics dual(BoundedSemantics s) { return {dual(s.kind), s.paper_literal}; }

inline bool is_halting(Semantics s) { return s == Semantics::kHpes || s == Semantics::kHopt; }

inline const char* to_string(Semantics s) {
  switch (s) {
    case Semantics::kPes: return "pes";
    case Semantics::kOpt: return "opt";
    case Semantics::kHpes: return "hpes";
    case Semantics::kHopt: return "hopt";
    case Semantics::kClassic: return "classic";
    case Semantics::kClassicDual: return "classic-dual";
  }
  return "?";
}

inline std::optional<Semantics> parse_semantics(std::string_view name) {
  if (name == "pes") return Semantics::kPes;
  if (name == "opt") return Semantics::kOpt;
  if (name == "hpes") return Semantics::kHpes;
  if (name == "hopt") return Semantics::kHopt;
  if (name == "classic") return Semantics::kClassic;
  if (name == "classic-dual") return Semantics::kClassicDual;
  return std::nullopt;
}

}  // namespace hyperbmc
