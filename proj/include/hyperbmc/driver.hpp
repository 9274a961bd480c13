// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hyperbmc/encoder.hpp"
#include "hyperbmc/error.hpp"
#include "hyperbmc/external.hpp"
#include "hyperbmc/hyperltl.hpp"
#include "hyperbmc/kripke.hpp"
#include "hyperbmc/oracle.hpp"
#include "hyperbmc/qbf.hpp"
#include "hyperbmc/qcir.hpp"
#include "hyperbmc/semantics.hpp"

namespace hyperbmc {

enum class Interpretation { kHolds, kFails, kUnknown };

inline const char* to_string(Interpretation i) {
  switch (i) {
    case Interpretation::kHolds: return "HOLDS";
    case Interpretation::kFails: return "FAILS";
    case Interpretation::kUnknown: return "UNKNOWN";
  }
  return "?";
}

/// falsify: encode the negation under pes; prove: negation under opt;
/// raw: the formula as given under the chosen semantics.
enum class Mode { kFalsify, kProve, kRaw };

struct SolverChoice {
  bool external = false;
  std::string command;  // template with {file}
  double timeout_seconds = 600;
  std::size_t node_cap = 50'000'000;
};

struct CheckConfig {
  HyperFormula formula;
  ModelMap models;
  std::size_t k_from = 0;
  std::size_t k_max = 0;
  BoundedSemantics semantics{};
  bool negate_first = false;
  SolverChoice solver{};
  /// QCIR of each encoded bound is written here (last bound wins).
  std::optional<std::string> emit_qcir_path;
  /// Called after every bound; for progress output.
  std::function<void(std::size_t k, bool value, double seconds)> on_bound;
};

struct BoundRecord {
  std::size_t k;
  bool qbf_value;
  double seconds;
  std::size_t bdd_nodes;
};

struct Verdict {
  std::size_t k = 0;
  bool qbf_value = false;
  /// Conclusion about the formula the user supplied.
  Interpretation interpretation = Interpretation::kUnknown;
  /// Traces of the leading existential quantifiers of the encoded formula.
  std::optional<std::map<std::string, TracePrefix>> witness;
  bool witness_verified = false;
  Fragment fragment_hint = Fragment::kNeither;
  bool negated = false;
  BoundedSemantics semantics{};
  std::vector<BoundRecord> history;
};

/// Conclusion about the encoded formula licensed by its QBF value.
inline Interpretation interpret(bool qbf_value, Semantics sem) {
  if (qbf_value && (sem == Semantics::kPes || sem == Semantics::kHpes)) return Interpretation::kHolds;
  if (!qbf_value && (sem == Semantics::kOpt || sem == Semantics::kHopt)) return Interpretation::kFails;
  return Interpretation::kUnknown;
}

/// Maps a conclusion about the encoded formula back to the original one.
inline Interpretation through_negation(Interpretation i, bool negated) {
  if (!negated || i == Interpretation::kUnknown) return i;
  return i == Interpretation::kHolds ? Interpretation::kFails : Interpretation::kHolds;
}

/// Decodes the state bits of `t` into a path of its structure.
inline TracePrefix extract_witness(const std::map<VarId, bool>& assignment, const TraceLayout& t, std::size_t k) {
  auto bit = [&](VarId v) {
    auto it = assignment.find(v);
    if (it == assignment.end()) throw InvalidWitness("witness lacks variable " + std::to_string(v));
    return it->second;
  };
  std::vector<StateId> states;
  for (std::size_t i = 0; i <= k; ++i) {
    StateId s = 0;
    for (std::size_t j = 0; j < t.state_bits; ++j)
      if (bit(t.state_bit(i, j))) s |= StateId{1} << j;
    if (s >= t.model->num_states())
      throw InvalidWitness("state code " + std::to_string(s) + " out of range for " + t.var);
    states.push_back(s);
  }
  if (!is_initialized_path(*t.model, states)) throw InvalidWitness("decoded trace of " + t.var + " is not a path");
  auto prefix = make_prefix(*t.model, states);
  for (std::size_t i = 0; i <= k; ++i) {
    for (ApId a = 0; a < t.model->num_aps(); ++a)
      if (bit(t.ap(i, a)) != t.model->has_label(states[i], a))
        throw InvalidWitness("proposition bits of " + t.var + " disagree with the decoded state");
    if (bit(t.halt(i)) != t.model->is_halt(states[i]))
      throw InvalidWitness("halt bit of " + t.var + " disagrees with the decoded state");
  }
  return prefix;
}

/// Re-checks a witness with the explicit evaluator: the given traces are
/// fixed and the remaining quantifiers range over all prefixes.
inline bool verify_witness(const std::map<std::string, TracePrefix>& witness, const ModelMap& models,
                           const HyperFormula& formula, std::size_t k, BoundedSemantics sem) {
  return check_bounded_with(models, formula, k, sem, witness);
}

namespace detail {

inline std::size_t leading_existentials(const HyperFormula& f) {
  std::size_t n = 0;
  while (n < f.prefix.size() && f.prefix[n].quantifier == Quantifier::kExists) ++n;
  return n;
}

}  // namespace detail

/// Encodes and solves one bound; returns the QBF value and, when the leading
/// block is existential and the value is true, the decoded witness traces.
struct BoundOutcome {
  bool value = false;
  std::optional<std::map<std::string, TracePrefix>> witness;
  std::size_t bdd_nodes = 0;
};

inline BoundOutcome solve_bound(const HyperFormula& encoded, const ModelMap& models, std::size_t k,
                                BoundedSemantics sem, const SolverChoice& solver,
                                const std::optional<std::string>& qcir_path = std::nullopt) {
  auto e = encode(encoded, models, k, sem);
  if (qcir_path) {
    std::ofstream out(*qcir_path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + *qcir_path);
    out << emit_qcir(e.qbf);
  }
  BoundOutcome outcome;
  SolveResult r;
  if (solver.external) {
    r = run_external(solver.command, e.qbf, ExternalOptions{solver.timeout_seconds});
  } else {
    SolveOptions options;
    options.node_cap = solver.node_cap;
    r = solve(e.qbf, options);
  }
  outcome.value = r.value;
  outcome.bdd_nodes = r.bdd_nodes;
  std::size_t lead = detail::leading_existentials(e.formula);
  if (r.outer_witness && r.value && lead > 0) {
    std::map<std::string, TracePrefix> w;
    for (std::size_t j = 0; j < lead; ++j) {
      const auto& var = e.formula.prefix[j].var;
      w.emplace(var, extract_witness(*r.outer_witness, e.layout.trace(var), k));
    }
    outcome.witness = std::move(w);
  }
  return outcome;
}

/// Bounded model-checking loop from k_from to k_max; stops at the first
/// conclusive bound.
inline Verdict check(const CheckConfig& cfg) {
  if (cfg.k_from > cfg.k_max) throw ConfigError("--from exceeds -k");
  check_closed(cfg.formula);
  for (const auto& q : cfg.formula.prefix) {
    auto it = cfg.models.find(q.var);
    if (it == cfg.models.end() || !it->second) throw ConfigError("no model assigned to trace variable " + q.var);
    it->second->validate();
    if (is_halting(cfg.semantics.kind) && !it->second->has_halt_states())
      throw ConfigError(std::string(to_string(cfg.semantics.kind)) + " needs halt states; the model of " + q.var +
                        " declares none");
  }
  if (cfg.semantics.kind == Semantics::kClassicDual) throw ConfigError("classic-dual is internal only");

  HyperFormula encoded = cfg.negate_first ? negate(cfg.formula) : to_nnf(cfg.formula);
  Verdict v;
  v.negated = cfg.negate_first;
  v.semantics = cfg.semantics;
  v.fragment_hint = classify_fragment(encoded);
  for (std::size_t k = cfg.k_from; k <= cfg.k_max; ++k) {
    auto start = std::chrono::steady_clock::now();
    auto outcome = solve_bound(encoded, cfg.models, k, cfg.semantics, cfg.solver, cfg.emit_qcir_path);
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v.history.push_back({k, outcome.value, seconds, outcome.bdd_nodes});
    if (cfg.on_bound) cfg.on_bound(k, outcome.value, seconds);
    v.k = k;
    v.qbf_value = outcome.value;
    v.interpretation = through_negation(interpret(outcome.value, cfg.semantics.kind), cfg.negate_first);
    v.witness = std::move(outcome.witness);
    v.witness_verified = false;
    if (v.witness) {
      if (!verify_witness(*v.witness, cfg.models, encoded, k, cfg.semantics))
        throw InternalError("witness at k=" + std::to_string(k) + " fails independent verification");
      v.witness_verified = true;
    }
    if (v.interpretation != Interpretation::kUnknown) break;
  }
  return v;
}

}  // namespace hyperbmc
