// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hyperbmc/detail/cursor.hpp"
#include "hyperbmc/error.hpp"
#include "hyperbmc/kripke.hpp"

namespace hyperbmc {

enum class Op {
  kTrue,
  kFalse,
  kAtom,
  kNegAtom,
  kNot,
  kAnd,
  kOr,
  kImplies,
  kIff,
  kNext,
  kUntil,
  kRelease,
  kEventually,
  kGlobally,
  kWeakUntil,
};

struct Body;
using BodyPtr = std::shared_ptr<const Body>;

/// Quantifier-free temporal body. Unary operators keep their operand in `lhs`.
struct Body {
  Op op;
  std::string ap;
  std::string var;
  BodyPtr lhs;
  BodyPtr rhs;
};

enum class Quantifier { kForall, kExists };

struct QuantifiedVar {
  Quantifier quantifier;
  std::string var;
  friend bool operator==(const QuantifiedVar&, const QuantifiedVar&) = default;
};

struct HyperFormula {
  std::vector<QuantifiedVar> prefix;
  BodyPtr body;
};

enum class Fragment { kSyntacticSafety, kSyntacticCosafety, kNeither };

inline const char* to_string(Fragment f) {
  switch (f) {
    case Fragment::kSyntacticSafety: return "SYNTACTIC_SAFETY";
    case Fragment::kSyntacticCosafety: return "SYNTACTIC_COSAFETY";
    case Fragment::kNeither: return "NEITHER";
  }
  return "?";
}

inline Quantifier dual(Quantifier q) { return q == Quantifier::kForall ? Quantifier::kExists : Quantifier::kForall; }

// ---------------------------------------------------------------------------
// Constructors

namespace ltl {

inline BodyPtr node(Op op, BodyPtr lhs = nullptr, BodyPtr rhs = nullptr) {
  return std::make_shared<const Body>(Body{op, {}, {}, std::move(lhs), std::move(rhs)});
}
inline BodyPtr top() { return node(Op::kTrue); }
inline BodyPtr bottom() { return node(Op::kFalse); }
inline BodyPtr atom(std::string ap, std::string var) {
  return std::make_shared<const Body>(Body{Op::kAtom, std::move(ap), std::move(var), nullptr, nullptr});
}
inline BodyPtr neg_atom(std::string ap, std::string var) {
  return std::make_shared<const Body>(Body{Op::kNegAtom, std::move(ap), std::move(var), nullptr, nullptr});
}
inline BodyPtr lnot(BodyPtr a) { return node(Op::kNot, std::move(a)); }
inline BodyPtr land(BodyPtr a, BodyPtr b) { return node(Op::kAnd, std::move(a), std::move(b)); }
inline BodyPtr lor(BodyPtr a, BodyPtr b) { return node(Op::kOr, std::move(a), std::move(b)); }
inline BodyPtr implies(BodyPtr a, BodyPtr b) { return node(Op::kImplies, std::move(a), std::move(b)); }
inline BodyPtr iff(BodyPtr a, BodyPtr b) { return node(Op::kIff, std::move(a), std::move(b)); }
inline BodyPtr next(BodyPtr a) { return node(Op::kNext, std::move(a)); }
inline BodyPtr until(BodyPtr a, BodyPtr b) { return node(Op::kUntil, std::move(a), std::move(b)); }
inline BodyPtr release(BodyPtr a, BodyPtr b) { return node(Op::kRelease, std::move(a), std::move(b)); }
inline BodyPtr eventually(BodyPtr a) { return node(Op::kEventually, std::move(a)); }
inline BodyPtr globally(BodyPtr a) { return node(Op::kGlobally, std::move(a)); }
inline BodyPtr weak_until(BodyPtr a, BodyPtr b) { return node(Op::kWeakUntil, std::move(a), std::move(b)); }

}  // namespace ltl

inline bool is_unary(Op op) {
  return op == Op::kNot || op == Op::kNext || op == Op::kEventually || op == Op::kGlobally;
}
inline bool is_binary(Op op) {
  return op == Op::kAnd || op == Op::kOr || op == Op::kImplies || op == Op::kIff || op == Op::kUntil ||
         op == Op::kRelease || op == Op::kWeakUntil;
}

/// Structural equality.
inline bool equal(const BodyPtr& a, const BodyPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->op != b->op) return false;
  if (a->op == Op::kAtom || a->op == Op::kNegAtom) return a->ap == b->ap && a->var == b->var;
  return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
}

inline bool operator==(const HyperFormula& a, const HyperFormula& b) {
  return a.prefix == b.prefix && equal(a.body, b.body);
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline int precedence(Op op) {
  switch (op) {
    case Op::kIff: return 1;
    case Op::kImplies: return 2;
    case Op::kOr: return 3;
    case Op::kAnd: return 4;
    case Op::kUntil:
    case Op::kRelease:
    case Op::kWeakUntil: return 5;
    case Op::kNot:
    case Op::kNext:
    case Op::kEventually:
    case Op::kGlobally:
    case Op::kNegAtom: return 6;
    default: return 7;
  }
}

inline bool right_assoc(Op op) {
  return op == Op::kImplies || op == Op::kUntil || op == Op::kRelease || op == Op::kWeakUntil;
}

inline const char* symbol(Op op) {
  switch (op) {
    case Op::kAnd: return "&";
    case Op::kOr: return "|";
    case Op::kImplies: return "->";
    case Op::kIff: return "<->";
    case Op::kUntil: return "U";
    case Op::kRelease: return "R";
    case Op::kWeakUntil: return "W";
    case Op::kNot: return "!";
    case Op::kNext: return "X ";
    case Op::kEventually: return "F ";
    case Op::kGlobally: return "G ";
    default: return "?";
  }
}

inline void print(std::ostream& out, const BodyPtr& b, int min_prec) {
  int prec = precedence(b->op);
  bool parens = prec < min_prec;
  if (parens) out << '(';
  switch (b->op) {
    case Op::kTrue: out << "true"; break;
    case Op::kFalse: out << "false"; break;
    case Op::kAtom: out << b->ap << '[' << b->var << ']'; break;
    case Op::kNegAtom: out << '!' << b->ap << '[' << b->var << ']'; break;
    default:
      if (is_unary(b->op)) {
        out << symbol(b->op);
        print(out, b->lhs, prec);
      } else {
        bool ra = right_assoc(b->op);
        print(out, b->lhs, ra ? prec + 1 : prec);
        out << ' ' << symbol(b->op) << ' ';
        print(out, b->rhs, ra ? prec : prec + 1);
      }
  }
  if (parens) out << ')';
}

}  // namespace detail

inline std::string to_string(const BodyPtr& body) {
  std::ostringstream out;
  detail::print(out, body, 0);
  return out.str();
}

inline std::string to_string(const HyperFormula& f) {
  std::ostringstream out;
  for (const auto& q : f.prefix) out << (q.quantifier == Quantifier::kForall ? "forall " : "exists ") << q.var << ". ";
  detail::print(out, f.body, 0);
  return out.str();
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class FormulaParser {
 public:
  explicit FormulaParser(std::string_view text) : in_(text) {}

  HyperFormula parse() {
    HyperFormula f;
    std::set<std::string> bound;
    while (true) {
      auto word = in_.peek_identifier();
      if (word != "forall" && word != "exists") break;
      if (in_.char_after_identifier() == '[') break;  // a proposition named forall/exists
      in_.identifier();
      auto q = word == "forall" ? Quantifier::kForall : Quantifier::kExists;
      in_.skip_space();
      std::size_t line = in_.line(), column = in_.column();
      auto var = in_.identifier();
      if (!bound.insert(var).second)
        throw ParseError("trace variable '" + var + "' quantified twice", line, column);
      in_.expect(".");
      f.prefix.push_back({q, var});
    }
    bound_ = std::move(bound);
    f.body = parse_iff();
    if (!in_.at_end()) in_.fail("unexpected trailing input");
    return f;
  }

 private:
  BodyPtr parse_iff() {
    auto lhs = parse_implies();
    while (in_.accept("<->")) lhs = ltl::iff(lhs, parse_implies());
    return lhs;
  }

  BodyPtr parse_implies() {
    auto lhs = parse_or();
    if (in_.accept("->")) return ltl::implies(lhs, parse_implies());
    return lhs;
  }

  BodyPtr parse_or() {
    auto lhs = parse_and();
    while (in_.peek() == '|') {
      in_.expect("|");
      lhs = ltl::lor(lhs, parse_and());
    }
    return lhs;
  }

  BodyPtr parse_and() {
    auto lhs = parse_temporal();
    while (in_.peek() == '&') {
      in_.expect("&");
      lhs = ltl::land(lhs, parse_temporal());
    }
    return lhs;
  }

  BodyPtr parse_temporal() {
    auto lhs = parse_unary();
    auto word = in_.peek_identifier();
    if ((word == "U" || word == "R" || word == "W") && in_.char_after_identifier() != '[') {
      in_.identifier();
      auto rhs = parse_temporal();
      if (word == "U") return ltl::until(lhs, rhs);
      if (word == "R") return ltl::release(lhs, rhs);
      return ltl::weak_until(lhs, rhs);
    }
    return lhs;
  }

  BodyPtr parse_unary() {
    if (in_.peek() == '!') {
      in_.expect("!");
      return ltl::lnot(parse_unary());
    }
    auto word = in_.peek_identifier();
    if ((word == "X" || word == "F" || word == "G") && in_.char_after_identifier() != '[') {
      in_.identifier();
      auto operand = parse_unary();
      if (word == "X") return ltl::next(operand);
      if (word == "F") return ltl::eventually(operand);
      return ltl::globally(operand);
    }
    return parse_primary();
  }

  BodyPtr parse_primary() {
    if (in_.accept("(")) {
      auto inner = parse_iff();
      in_.expect(")");
      return inner;
    }
    std::string ap;
    if (in_.peek() == '@') {
      in_.expect("@");
      ap = "@" + in_.identifier();
      if (ap != kHaltProposition) in_.fail("unknown reserved proposition '" + ap + "'");
    } else {
      if (!in_.at_identifier()) in_.fail("expected proposition, constant, or '('");
      auto word = in_.peek_identifier();
      bool is_atom = in_.char_after_identifier() == '[';
      if (!is_atom && (word == "forall" || word == "exists")) in_.fail("quantifier after body start");
      if (!is_atom && (word == "true" || word == "false")) {
        in_.identifier();
        return word == "true" ? ltl::top() : ltl::bottom();
      }
      ap = in_.identifier();
    }
    in_.expect("[");
    in_.skip_space();
    std::size_t line = in_.line(), column = in_.column();
    auto var = in_.identifier();
    in_.expect("]");
    if (bound_.count(var) == 0) throw ParseError("unbound trace variable '" + var + "'", line, column);
    return ltl::atom(ap, var);
  }

  Cursor in_;
  std::set<std::string> bound_;
};

}  // namespace detail

/// Parses `forall A. exists B. body`; quantifiers only as a leading prefix.
inline HyperFormula parse_formula(std::string_view text) { return detail::FormulaParser(text).parse(); }

// ---------------------------------------------------------------------------
// Normalization

/// Rewrites derived operators (->, <->, F, G, W) into core ones plus Not.
inline BodyPtr desugar(const BodyPtr& b) {
  using namespace ltl;
  switch (b->op) {
    case Op::kTrue:
    case Op::kFalse:
    case Op::kAtom:
    case Op::kNegAtom: return b;
    case Op::kNot: return lnot(desugar(b->lhs));
    case Op::kNext: return next(desugar(b->lhs));
    case Op::kAnd: return land(desugar(b->lhs), desugar(b->rhs));
    case Op::kOr: return lor(desugar(b->lhs), desugar(b->rhs));
    case Op::kUntil: return until(desugar(b->lhs), desugar(b->rhs));
    case Op::kRelease: return release(desugar(b->lhs), desugar(b->rhs));
    case Op::kImplies: return lor(lnot(desugar(b->lhs)), desugar(b->rhs));
    case Op::kIff: {
      auto x = desugar(b->lhs);
      auto y = desugar(b->rhs);
      return lor(land(x, y), land(lnot(x), lnot(y)));
    }
    case Op::kEventually: return until(top(), desugar(b->lhs));
    case Op::kGlobally: return release(bottom(), desugar(b->lhs));
    case Op::kWeakUntil: {
      auto x = desugar(b->lhs);
      auto y = desugar(b->rhs);
      return release(y, lor(x, y));
    }
  }
  return b;
}

inline HyperFormula desugar(const HyperFormula& f) { return {f.prefix, desugar(f.body)}; }

namespace detail {

inline BodyPtr nnf(const BodyPtr& b, bool negated) {
  using namespace ltl;
  switch (b->op) {
    case Op::kTrue: return negated ? bottom() : b;
    case Op::kFalse: return negated ? top() : b;
    case Op::kAtom: return negated ? neg_atom(b->ap, b->var) : b;
    case Op::kNegAtom: return negated ? atom(b->ap, b->var) : b;
    case Op::kNot: return nnf(b->lhs, !negated);
    case Op::kAnd:
      return negated ? lor(nnf(b->lhs, true), nnf(b->rhs, true)) : land(nnf(b->lhs, false), nnf(b->rhs, false));
    case Op::kOr:
      return negated ? land(nnf(b->lhs, true), nnf(b->rhs, true)) : lor(nnf(b->lhs, false), nnf(b->rhs, false));
    case Op::kNext: return next(nnf(b->lhs, negated));
    case Op::kUntil:
      return negated ? release(nnf(b->lhs, true), nnf(b->rhs, true))
                     : until(nnf(b->lhs, false), nnf(b->rhs, false));
    case Op::kRelease:
      return negated ? until(nnf(b->lhs, true), nnf(b->rhs, true))
                     : release(nnf(b->lhs, false), nnf(b->rhs, false));
    default: return nnf(desugar(b), negated);
  }
}

}  // namespace detail

/// Negation normal form over TRUE/FALSE/Atom/NegAtom/And/Or/Next/Until/Release.
inline BodyPtr to_nnf(const BodyPtr& b) { return detail::nnf(b, false); }
inline HyperFormula to_nnf(const HyperFormula& f) { return {f.prefix, to_nnf(f.body)}; }

inline bool is_nnf(const BodyPtr& b) {
  switch (b->op) {
    case Op::kTrue:
    case Op::kFalse:
    case Op::kAtom:
    case Op::kNegAtom: return true;
    case Op::kNext: return is_nnf(b->lhs);
    case Op::kAnd:
    case Op::kOr:
    case Op::kUntil:
    case Op::kRelease: return is_nnf(b->lhs) && is_nnf(b->rhs);
    default: return false;
  }
}

/// Dualizes the prefix and pushes the negation of the body to the atoms.
inline HyperFormula negate(const HyperFormula& f) {
  HyperFormula out;
  for (const auto& q : f.prefix) out.prefix.push_back({dual(q.quantifier), q.var});
  out.body = detail::nnf(f.body, true);
  return out;
}

namespace detail {
inline void collect_ops(const BodyPtr& b, bool& until, bool& release) {
  if (!b) return;
  if (b->op == Op::kUntil) until = true;
  if (b->op == Op::kRelease) release = true;
  collect_ops(b->lhs, until, release);
  collect_ops(b->rhs, until, release);
}
}  // namespace detail

/// Syntactic approximation of safety/co-safety on the NNF body.
inline Fragment classify_fragment(const HyperFormula& f) {
  bool until = false, release = false;
  detail::collect_ops(to_nnf(f.body), until, release);
  if (!until) return Fragment::kSyntacticSafety;
  if (!release) return Fragment::kSyntacticCosafety;
  return Fragment::kNeither;
}

inline void collect_variables(const BodyPtr& b, std::set<std::string>& out) {
  if (!b) return;
  if (b->op == Op::kAtom || b->op == Op::kNegAtom) out.insert(b->var);
  collect_variables(b->lhs, out);
  collect_variables(b->rhs, out);
}

/// Throws unless every body variable is quantified exactly once.
inline void check_closed(const HyperFormula& f) {
  std::set<std::string> bound;
  for (const auto& q : f.prefix)
    if (!bound.insert(q.var).second)
      throw ValidationError(ValidationKind::kDuplicate, q.var, "trace variable '" + q.var + "' quantified twice");
  std::set<std::string> used;
  collect_variables(f.body, used);
  for (const auto& v : used)
    if (bound.count(v) == 0)
      throw ValidationError(ValidationKind::kDanglingReference, v, "unbound trace variable '" + v + "'");
}

}  // namespace hyperbmc
