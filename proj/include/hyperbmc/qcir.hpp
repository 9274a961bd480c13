// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cctype>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hyperbmc/error.hpp"
#include "hyperbmc/qbf.hpp"

// QCIR-G14 writer and a reader for the subset it writes (and/or gates,
// negated literals, prenex quantifier lines).

namespace hyperbmc {

inline std::string emit_qcir(const PrenexQBF& input) {
  PrenexQBF q = input;
  normalize(q);
  const Circuit& c = q.circuit;

  std::set<VarId> bound;
  for (const auto& b : q.blocks) bound.insert(b.vars.begin(), b.vars.end());
  std::vector<VarId> free_vars;
  for (VarId v : c.support(q.matrix))
    if (bound.count(v) == 0) free_vars.push_back(v);

  // Gate prefix must not collide with a variable name.
  std::string prefix = "g";
  auto collides = [&] {
    const std::regex gate_like(prefix + "[0-9]+");
    for (const auto& [v, name] : q.var_names)
      if (std::regex_match(name, gate_like)) return true;
    return false;
  };
  while (collides()) prefix = "_" + prefix;

  std::ostringstream out;
  out << "#QCIR-G14\n";
  auto var_list = [&](const char* keyword, const std::vector<VarId>& vars) {
    out << keyword << '(';
    for (std::size_t i = 0; i < vars.size(); ++i) out << (i ? ", " : "") << q.name(vars[i]);
    out << ")\n";
  };
  if (!free_vars.empty()) var_list("free", free_vars);
  for (const auto& b : q.blocks) var_list(b.quantifier == Quantifier::kExists ? "exists" : "forall", b.vars);

  std::unordered_map<NodeId, std::size_t> gate;
  std::vector<std::string> lines;
  auto literal = [&](NodeId n) -> std::string {
    if (c.kind(n) == NodeKind::kVar) return q.name(c.var_of(n));
    NodeId inner = c.child(n, 0);
    if (c.kind(inner) == NodeKind::kVar) return "-" + q.name(c.var_of(inner));
    return "-" + prefix + std::to_string(gate.at(inner));
  };
  auto gate_ref = [&](NodeId n) -> std::string {
    if (c.kind(n) == NodeKind::kAnd || c.kind(n) == NodeKind::kOr) return prefix + std::to_string(gate.at(n));
    return literal(n);
  };

  // Post-order DFS with children in stored order.
  std::vector<std::pair<NodeId, bool>> stack{{q.matrix, false}};
  while (!stack.empty()) {
    auto [n, expanded] = stack.back();
    stack.pop_back();
    NodeKind k = c.kind(n);
    if (k == NodeKind::kNot) {
      stack.push_back({c.child(n, 0), false});
      continue;
    }
    if (k != NodeKind::kAnd && k != NodeKind::kOr) continue;
    if (gate.count(n)) continue;
    if (!expanded) {
      stack.push_back({n, true});
      auto cs = c.children(n);
      for (auto it = cs.rbegin(); it != cs.rend(); ++it) stack.push_back({*it, false});
      continue;
    }
    std::size_t id = lines.size() + 1;
    std::string line = prefix + std::to_string(id) + (k == NodeKind::kAnd ? " = and(" : " = or(");
    bool first = true;
    for (NodeId ch : c.children(n)) {
      line += (first ? "" : ", ") + gate_ref(ch);
      first = false;
    }
    lines.push_back(line + ")");
    gate.emplace(n, id);
  }

  std::string output;
  switch (c.kind(q.matrix)) {
    case NodeKind::kConst:
      lines.push_back(prefix + "1 = " + (c.const_value(q.matrix) ? "and()" : "or()"));
      output = prefix + "1";
      break;
    case NodeKind::kVar:
      lines.push_back(prefix + "1 = and(" + literal(q.matrix) + ")");
      output = prefix + "1";
      break;
    case NodeKind::kNot:
      if (c.is_var_literal(q.matrix)) {
        lines.push_back(prefix + "1 = and(" + literal(q.matrix) + ")");
        output = prefix + "1";
      } else {
        output = literal(q.matrix);
      }
      break;
    default: output = gate_ref(q.matrix);
  }
  out << "output(" << output << ")\n";
  for (const auto& l : lines) out << l << '\n';
  return out.str();
}

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_args(const std::string& inside) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(inside);
  while (std::getline(in, cur, ',')) {
    auto t = trim(cur);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

}  // namespace detail

/// Reads a QCIR document; variables get ids in order of first declaration.
inline PrenexQBF parse_qcir(std::string_view text) {
  PrenexQBF q;
  std::unordered_map<std::string, VarId> vars;
  std::unordered_map<std::string, NodeId> gates;
  std::string output;
  std::size_t output_line = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;

  auto resolve = [&](const std::string& lit, std::size_t line) -> NodeId {
    bool neg = !lit.empty() && lit[0] == '-';
    std::string name = neg ? lit.substr(1) : lit;
    NodeId n;
    if (auto g = gates.find(name); g != gates.end()) {
      n = g->second;
    } else if (auto v = vars.find(name); v != vars.end()) {
      n = q.circuit.var(v->second);
    } else {
      throw ParseError("undefined literal '" + name + "'", line, 1);
    }
    return neg ? q.circuit.lnot(n) : n;
  };

  while (std::getline(in, raw)) {
    ++line_no;
    auto line = detail::trim(raw);
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (!header_seen && line.rfind("#QCIR-G14", 0) == 0) header_seen = true;
      continue;
    }
    if (!header_seen) throw ParseError("missing #QCIR-G14 header", line_no, 1);
    auto open = line.find('(');
    auto close = line.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
      throw ParseError("expected '(...)'", line_no, 1);
    auto inside = line.substr(open + 1, close - open - 1);
    auto eq = line.find('=');
    if (eq != std::string::npos && eq < open) {
      auto name = detail::trim(line.substr(0, eq));
      auto op = detail::trim(line.substr(eq + 1, open - eq - 1));
      std::vector<NodeId> ops;
      for (const auto& a : detail::split_args(inside)) ops.push_back(resolve(a, line_no));
      NodeId n;
      if (op == "and") n = q.circuit.land(ops);
      else if (op == "or") n = q.circuit.lor(ops);
      else throw ParseError("unsupported gate type '" + op + "'", line_no, eq + 2);
      if (!gates.emplace(name, n).second) throw ParseError("gate '" + name + "' defined twice", line_no, 1);
      continue;
    }
    auto keyword = detail::trim(line.substr(0, open));
    if (keyword == "exists" || keyword == "forall" || keyword == "free") {
      QuantifierBlock block{keyword == "forall" ? Quantifier::kForall : Quantifier::kExists, {}};
      for (const auto& name : detail::split_args(inside)) {
        VarId id = static_cast<VarId>(vars.size());
        if (!vars.emplace(name, id).second) throw ParseError("variable '" + name + "' declared twice", line_no, 1);
        q.var_names[id] = name;
        block.vars.push_back(id);
      }
      if (keyword == "free") block.quantifier = Quantifier::kExists;
      q.blocks.push_back(std::move(block));
    } else if (keyword == "output") {
      output = detail::trim(inside);
      output_line = line_no;
    } else {
      throw ParseError("unknown statement '" + keyword + "'", line_no, 1);
    }
  }
  if (output.empty()) throw ParseError("missing output statement", line_no, 1);
  q.matrix = resolve(output, output_line);
  return q;
}

}  // namespace hyperbmc
