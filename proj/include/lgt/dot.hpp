#pragma once

// Graphviz DOT rendering of values and evaluation traces. Node naming is
// deterministic from the canonical form.

#include "lgt/eval.hpp"

namespace lgt {

namespace dotdetail {

inline std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline std::string atom_label(const FlatItem& it) {
  if (it.is_abs()) return "\\\\$" + it.abs->param;
  if (it.is_arrow_atom() || (it.kind == ItemKind::Hole && it.type && it.type->is_arrow()))
    return "(->)";
  if (it.kind == ItemKind::Hole) return "<" + it.type->var + ">";
  if (it.kind == ItemKind::Ctx) return "$" + it.name;
  return esc(it.name);
}

}  // namespace dotdetail

inline void dot_graph_body(const FlatGraph& g0, std::ostringstream& os,
                           const std::string& prefix) {
  FlatGraph g = g0;
  canonicalize(g);
  std::set<int> freesUsed;
  for (auto& it : g.items)
    for (auto a : it.args)
      if (!flink_local(a)) freesUsed.insert(flink_free_index(a));
  for (int i = 0; i < g.nlocals; i++)
    os << "  " << prefix << "l" << i << " [shape=point, label=\"\"];\n";
  for (int i : freesUsed)
    os << "  " << prefix << "f" << i << " [shape=diamond, label=\""
       << dotdetail::esc(g.frees[static_cast<size_t>(i)]) << "\"];\n";
  auto linkNode = [&](FLink v) {
    if (flink_local(v)) return prefix + "l" + std::to_string(v);
    return prefix + "f" + std::to_string(flink_free_index(v));
  };
  for (size_t i = 0; i < g.items.size(); i++) {
    const FlatItem& it = g.items[i];
    std::string id = prefix + "a" + std::to_string(i);
    if (it.kind == ItemKind::Fusion) {
      os << "  " << id << " [shape=point, width=0.12, style=filled, label=\"\"];\n";
      os << "  " << id << " -> " << linkNode(it.args[0]) << " [dir=none];\n";
      os << "  " << id << " -> " << linkNode(it.args[1]) << " [dir=none];\n";
      continue;
    }
    os << "  " << id << " [shape=box, label=\"" << dotdetail::atom_label(it) << "\"];\n";
    for (size_t k = 0; k < it.args.size(); k++)
      os << "  " << id << " -> " << linkNode(it.args[k]) << " [dir=none, label=\"" << (k + 1)
         << "\"];\n";
  }
}

inline std::string dot_of_value(const TermPtr& t, const std::string& name = "g0") {
  std::ostringstream os;
  os << "digraph " << name << " {\n";
  dot_graph_body(flatten(t), os, "");
  os << "}\n";
  return os.str();
}

namespace dotdetail {

inline void expr_nodes(const ExprPtr& e, std::ostringstream& os, const std::string& id,
                       std::string& rootOut) {
  switch (e->kind) {
    case ExprKind::Graph: {
      // a graph leaf becomes its own rendered subgraph; its root handle is
      // the first atom or a placeholder when empty
      FlatGraph g = flatten(e->graph);
      canonicalize(g);
      if (g.items.empty()) {
        os << "  " << id << "empty [shape=box, label=\"()\"];\n";
        rootOut = id + "empty";
        return;
      }
      dot_graph_body(g, os, id);
      rootOut = id + "a0";
      return;
    }
    case ExprKind::App: {
      os << "  " << id << "app [shape=ellipse, label=\"@\"];\n";
      std::string f, a;
      expr_nodes(e->fn, os, id + "L", f);
      expr_nodes(e->arg, os, id + "R", a);
      os << "  " << id << "app -> " << f << " [style=dashed];\n";
      os << "  " << id << "app -> " << a << " [style=dashed];\n";
      rootOut = id + "app";
      return;
    }
    case ExprKind::Case: {
      os << "  " << id << "case [shape=ellipse, label=\"case\"];\n";
      std::string s;
      expr_nodes(e->scrut, os, id + "S", s);
      os << "  " << id << "case -> " << s << " [style=dashed];\n";
      rootOut = id + "case";
      return;
    }
  }
}

}  // namespace dotdetail

inline std::string dot_of_expr(const ExprPtr& e, const std::string& name) {
  std::ostringstream os;
  os << "digraph " << name << " {\n";
  std::string root;
  dotdetail::expr_nodes(e, os, "n", root);
  os << "}\n";
  return os.str();
}

// One digraph per trace row (initial expression plus each step result).
inline std::string dot_of_trace(const std::vector<std::pair<std::string, ExprPtr>>& trace) {
  std::ostringstream os;
  for (size_t i = 0; i < trace.size(); i++)
    os << dot_of_expr(trace[i].second, "step" + std::to_string(i));
  return os.str();
}

}  // namespace lgt
