// SPDX-License-Identifier: Apache-2.0
// hyperbmc: bounded model checking of HyperLTL formulas through QBF.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hyperbmc/hyperbmc.hpp"

namespace {

using namespace hyperbmc;
using json = nlohmann::json;

// sysexits.h values
constexpr int kExitUsage = 64;
constexpr int kExitDataErr = 65;
constexpr int kExitNoInput = 66;
constexpr int kExitUnavailable = 69;
constexpr int kExitSoftware = 70;
constexpr int kExitTempFail = 75;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot write " + path);
  out << text;
}

struct ModelOptions {
  std::vector<std::string> assignments;  // VAR=PATH
  std::string default_path;
};

ModelMap load_models(const HyperFormula& f, const ModelOptions& opts) {
  std::map<std::string, std::shared_ptr<const KripkeStructure>> by_path;
  auto load = [&](const std::string& path) {
    auto it = by_path.find(path);
    if (it != by_path.end()) return it->second;
    auto k = std::make_shared<const KripkeStructure>(parse_kripke(read_file(path)));
    by_path.emplace(path, k);
    return k;
  };
  ModelMap models;
  for (const auto& a : opts.assignments) {
    auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--model expects VAR=PATH, got '" + a + "'");
    models[a.substr(0, eq)] = load(a.substr(eq + 1));
  }
  for (const auto& q : f.prefix) {
    if (models.count(q.var)) continue;
    if (opts.default_path.empty()) throw ConfigError("no model for trace variable " + q.var);
    models[q.var] = load(opts.default_path);
  }
  return models;
}

HyperFormula load_formula(const std::string& path, const std::string& spec, std::size_t spec_n) {
  if (!path.empty() && !spec.empty()) throw ConfigError("use either --formula or --spec");
  if (!spec.empty()) return parse_formula(builtin_spec(spec, spec_n).formula);
  if (path.empty()) throw ConfigError("--formula or --spec is required");
  return parse_formula(read_file(path));
}

BoundedSemantics semantics_from(const std::string& name, bool literal) {
  auto s = parse_semantics(name);
  if (!s || *s == Semantics::kClassicDual) throw ConfigError("unknown semantics '" + name + "'");
  return {*s, literal};
}

json witness_json(const std::map<std::string, TracePrefix>& w, const ModelMap& models) {
  json out = json::object();
  for (const auto& [var, prefix] : w) {
    json steps = json::array();
    for (std::size_t i = 0; i < prefix.states.size(); ++i)
      steps.push_back({{"state", models.at(var)->state_name(prefix.states[i])}, {"letter", prefix.letters[i]}});
    out[var] = steps;
  }
  return out;
}

int exit_code_for(Interpretation i) {
  switch (i) {
    case Interpretation::kHolds: return 0;
    case Interpretation::kFails: return 1;
    case Interpretation::kUnknown: return 2;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounded model checker for HyperLTL"};
  app.require_subcommand(1);

  // check
  auto* check_cmd = app.add_subcommand("check", "Check a formula up to a bound");
  std::string formula_path, spec_name, semantics_name = "pes", mode_name = "falsify", solver_spec = "builtin";
  std::string qcir_path, witness_path, format = "text";
  std::size_t spec_n = 2, k_max = 0, k_from = 0, node_cap = 50'000'000;
  double timeout = 600;
  bool literal = false, quiet = false;
  ModelOptions model_opts;
  check_cmd->add_option("--formula", formula_path, "Formula file")->check(CLI::ExistingFile);
  check_cmd->add_option("--spec", spec_name, "Builtin formula name instead of --formula");
  check_cmd->add_option("--spec-n", spec_n, "Process count for --spec symmetry");
  check_cmd->add_option("--model", model_opts.assignments, "VAR=PATH.kr, repeatable");
  check_cmd->add_option("--model-default", model_opts.default_path, "Model for unassigned variables")
      ->check(CLI::ExistingFile);
  check_cmd->add_option("-k", k_max, "Largest bound")->required();
  check_cmd->add_option("--from", k_from, "First bound");
  check_cmd->add_option("--semantics", semantics_name, "pes|opt|hpes|hopt|classic")
      ->check(CLI::IsMember({"pes", "opt", "hpes", "hopt", "classic"}));
  check_cmd->add_option("--mode", mode_name, "falsify|prove|raw")->check(CLI::IsMember({"falsify", "prove", "raw"}));
  check_cmd->add_flag("--paper-literal", literal, "Halting release at the bound tests its first operand");
  check_cmd->add_option("--solver", solver_spec, "builtin | external | external:\"CMD {file}\"");
  check_cmd->add_option("--timeout", timeout, "External solver timeout in seconds");
  check_cmd->add_option("--node-cap", node_cap, "Builtin solver node limit");
  check_cmd->add_option("--emit-qcir", qcir_path, "Write the QCIR of the last encoded bound");
  check_cmd->add_option("--witness", witness_path, "Write witness traces");
  check_cmd->add_option("--format", format, "text|json")->check(CLI::IsMember({"text", "json"}));
  check_cmd->add_flag("-q,--quiet", quiet, "No per-bound progress on stderr");

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "Evaluate with the explicit prefix enumerator");
  std::string o_formula, o_spec, o_semantics = "pes";
  std::size_t o_k = 0, o_cap = kDefaultEnumerationCap;
  bool o_literal = false;
  ModelOptions o_models;
  oracle_cmd->add_option("--formula", o_formula, "Formula file")->check(CLI::ExistingFile);
  oracle_cmd->add_option("--spec", o_spec, "Builtin formula name");
  oracle_cmd->add_option("--model", o_models.assignments, "VAR=PATH.kr, repeatable");
  oracle_cmd->add_option("--model-default", o_models.default_path, "Model for unassigned variables");
  oracle_cmd->add_option("-k", o_k, "Bound")->required();
  oracle_cmd->add_option("--semantics", o_semantics, "pes|opt|hpes|hopt|classic");
  oracle_cmd->add_flag("--paper-literal", o_literal, "Halting release at the bound tests its first operand");
  oracle_cmd->add_option("--cap", o_cap, "Maximum number of enumerated prefixes");

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "Generate case-study models and formulas");
  gen_cmd->require_subcommand(1);
  std::string out_path = "-";
  auto* gen_bakery_cmd = gen_cmd->add_subcommand("bakery", "Bakery protocol");
  std::size_t bakery_n = 2;
  gen_bakery_cmd->add_option("--n", bakery_n, "Process count (2 or 3)");
  gen_bakery_cmd->add_option("-o", out_path, "Output .kr file");
  auto* gen_grid_cmd = gen_cmd->add_subcommand("grid", "Grid path planning");
  std::string map_path;
  bool builtin_map = false;
  gen_grid_cmd->add_option("--map", map_path, "Map file with . # I G cells")->check(CLI::ExistingFile);
  gen_grid_cmd->add_flag("--builtin-10x10", builtin_map, "Use the 10x10 case-study map");
  gen_grid_cmd->add_option("-o", out_path, "Output .kr file");
  auto* gen_nonrep_cmd = gen_cmd->add_subcommand("nonrep", "Non-repudiation protocol");
  std::string variant = "correct";
  gen_nonrep_cmd->add_option("--variant", variant, "correct|incorrect")
      ->check(CLI::IsMember({"correct", "incorrect"}));
  gen_nonrep_cmd->add_option("-o", out_path, "Output .kr file");
  auto* gen_spec_cmd = gen_cmd->add_subcommand("spec", "Print a builtin formula");
  std::string gen_spec_name;
  std::size_t gen_spec_n = 2;
  gen_spec_cmd->add_option("--name", gen_spec_name, "Formula name")->required();
  gen_spec_cmd->add_option("--n", gen_spec_n, "Process count for symmetry");
  gen_spec_cmd->add_option("-o", out_path, "Output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (check_cmd->parsed()) {
      CheckConfig cfg;
      cfg.formula = load_formula(formula_path, spec_name, spec_n);
      cfg.models = load_models(cfg.formula, model_opts);
      cfg.k_from = k_from;
      cfg.k_max = k_max;
      Mode mode = mode_name == "falsify" ? Mode::kFalsify : mode_name == "prove" ? Mode::kProve : Mode::kRaw;
      // falsify and prove fix the semantics unless one was given explicitly
      bool explicit_semantics = check_cmd->count("--semantics") > 0;
      if (mode == Mode::kFalsify && !explicit_semantics) semantics_name = "pes";
      if (mode == Mode::kProve && !explicit_semantics) semantics_name = "opt";
      cfg.semantics = semantics_from(semantics_name, literal);
      cfg.negate_first = mode != Mode::kRaw;
      if (solver_spec == "builtin") {
        cfg.solver.external = false;
      } else if (solver_spec == "external" || solver_spec.rfind("external:", 0) == 0) {
        cfg.solver.external = true;
        cfg.solver.command = solver_spec.size() > 9 ? solver_spec.substr(9) : "";
        if (cfg.solver.command.empty()) {
          const char* env = std::getenv(kSolverEnvVar);
          if (!env || !*env) throw ConfigError(std::string("no solver command given and ") + kSolverEnvVar + " is unset");
          cfg.solver.command = env;
        }
      } else {
        throw ConfigError("unknown solver '" + solver_spec + "'");
      }
      cfg.solver.timeout_seconds = timeout;
      cfg.solver.node_cap = node_cap;
      if (!qcir_path.empty()) cfg.emit_qcir_path = qcir_path;
      if (!quiet)
        cfg.on_bound = [](std::size_t k, bool value, double seconds) {
          std::cerr << "k=" << k << " qbf=" << (value ? "TRUE" : "FALSE") << " (" << seconds << " s)\n";
        };

      Verdict v = check(cfg);
      if (!witness_path.empty() && v.witness) write_output(witness_path, render_witness(*v.witness));
      if (format == "json") {
        json out = {{"schema", "hyperbmc/1"},
                    {"verdict", to_string(v.interpretation)},
                    {"bound", v.k},
                    {"qbf", v.qbf_value},
                    {"semantics", to_string(v.semantics.kind)},
                    {"paper_literal", v.semantics.paper_literal},
                    {"mode", mode_name},
                    {"negated", v.negated},
                    {"fragment", to_string(v.fragment_hint)}};
        json bounds = json::array();
        for (const auto& b : v.history)
          bounds.push_back({{"k", b.k}, {"qbf", b.qbf_value}, {"seconds", b.seconds}, {"bdd_nodes", b.bdd_nodes}});
        out["bounds"] = bounds;
        if (v.witness) {
          out["witness"] = witness_json(*v.witness, cfg.models);
          out["witness_verified"] = v.witness_verified;
        } else {
          out["witness"] = nullptr;
        }
        std::cout << out.dump(2) << '\n';
      } else {
        std::cout << render_text(v, cfg.models);
      }
      return exit_code_for(v.interpretation);
    }

    if (oracle_cmd->parsed()) {
      auto f = load_formula(o_formula, o_spec, 2);
      auto models = load_models(f, o_models);
      bool value = check_bounded(models, f, o_k, semantics_from(o_semantics, o_literal), o_cap);
      std::cout << (value ? "TRUE" : "FALSE") << '\n';
      return value ? 0 : 1;
    }

    if (gen_bakery_cmd->parsed()) {
      write_output(out_path, render_kripke(gen_bakery(bakery_n)));
    } else if (gen_grid_cmd->parsed()) {
      if (builtin_map == !map_path.empty()) throw ConfigError("use exactly one of --map and --builtin-10x10");
      auto spec = builtin_map ? paper_grid_10x10() : parse_grid_map(read_file(map_path));
      write_output(out_path, render_kripke(gen_grid(spec)));
    } else if (gen_nonrep_cmd->parsed()) {
      auto v = variant == "correct" ? NonRepVariant::kCorrect : NonRepVariant::kIncorrect;
      write_output(out_path, render_kripke(gen_nonrepudiation(v)));
    } else if (gen_spec_cmd->parsed()) {
      auto entry = builtin_spec(gen_spec_name, gen_spec_n);
      std::string text = "# " + entry.name + ": ";
      for (std::size_t i = 0; i < entry.roles.size(); ++i) text += (i ? ", " : "") + entry.roles[i];
      text += "\n# " + entry.notes + "\n" + entry.formula + "\n";
      write_output(out_path, text);
    }
    return 0;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitDataErr;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitDataErr;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SolverNotFound& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kExitUnavailable;
  } catch (const Timeout& e) {
    std::cerr << e.what() << '\n';
    return kExitTempFail;
  } catch (const ResourceLimit& e) {
    std::cerr << e.what() << '\n';
    return kExitTempFail;
  } catch (const ExplosionGuard& e) {
    std::cerr << e.what() << '\n';
    return kExitTempFail;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitSoftware;
  } catch (const std::ios_base::failure& e) {
    std::cerr << e.what() << '\n';
    return kExitNoInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSoftware;
  }
}
