#pragma once

// Finite diagrams of topological groups: named nodes and edges, commuting
// squares given as pairs of edge paths, and annotated rows.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "topab/extension.hpp"
#include "topab/topology.hpp"

namespace topab {

struct DiagramEdge {
  std::string from;
  std::string to;
  Homomorphism hom;
};

/// kind is "exact", "strict-exact" or "extension" (a strict-exact 0 -> X -> Y -> Z -> 0).
struct DiagramRow {
  std::vector<std::string> edges;
  std::string kind;
};

/// A set-theoretic section of the surjection `edge`.
struct DiagramSection {
  std::string edge;
  Section section;
};

/// A path lists edges in the order they are applied.
using DiagramPath = std::vector<std::string>;

struct Diagram {
  std::map<std::string, TopAbGroup> nodes;
  std::map<std::string, DiagramEdge> edges;
  std::vector<std::pair<DiagramPath, DiagramPath>> squares;
  std::vector<DiagramRow> rows;
  std::map<std::string, DiagramSection> sections;

  const TopAbGroup& node(const std::string& name) const {
    auto it = nodes.find(name);
    if (it == nodes.end()) throw Error(ErrorKind::MalformedInput, "no node " + name);
    return it->second;
  }
  const DiagramEdge& edge(const std::string& name) const {
    auto it = edges.find(name);
    if (it == edges.end()) throw Error(ErrorKind::MalformedInput, "no edge " + name);
    return it->second;
  }
  TopHom top_edge(const std::string& name) const {
    const DiagramEdge& e = edge(name);
    return TopHom(e.hom, node(e.from), node(e.to));
  }
};

struct DiagramCheck {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

namespace detail {

inline bool continuous_and_strict(const TopHom& f) { return is_continuous(f) && is_strict(f); }

}  // namespace detail

inline DiagramCheck check_diagram(const Diagram& d) {
  DiagramCheck out;
  auto fail = [&](std::string msg) { out.violations.push_back(std::move(msg)); };

  bool edges_ok = true;
  for (const auto& [name, e] : d.edges) {
    auto src = d.nodes.find(e.from);
    auto tgt = d.nodes.find(e.to);
    if (src == d.nodes.end() || tgt == d.nodes.end()) {
      fail("edge " + name + " has an unknown endpoint");
      edges_ok = false;
    } else if (!(src->second.group() == e.hom.source()) || !(tgt->second.group() == e.hom.target())) {
      fail("edge " + name + " does not match its endpoint groups");
      edges_ok = false;
    }
  }
  if (!edges_ok) return out;

  auto compose_path = [&](const DiagramPath& p, std::string& start, std::string& end) -> std::vector<Index> {
    const DiagramEdge& first = d.edge(p.front());
    start = first.from;
    std::vector<Index> table = first.hom.table();
    std::string at = first.to;
    for (std::size_t i = 1; i < p.size(); ++i) {
      const DiagramEdge& e = d.edge(p[i]);
      if (e.from != at) throw Error(ErrorKind::CompositionMismatch, "path breaks at " + p[i]);
      for (auto& x : table) x = e.hom(x);
      at = e.to;
    }
    end = at;
    return table;
  };

  for (std::size_t i = 0; i < d.squares.size(); ++i) {
    const auto& [p, q] = d.squares[i];
    const std::string label = "square " + std::to_string(i);
    if (p.empty() || q.empty()) {
      fail(label + " has an empty path");
      continue;
    }
    try {
      std::string ps, pe, qs, qe;
      const auto tp = compose_path(p, ps, pe);
      const auto tq = compose_path(q, qs, qe);
      if (ps != qs || pe != qe) fail(label + " paths have different endpoints");
      else if (tp != tq) fail(label + " does not commute");
    } catch (const Error& e) {
      fail(label + ": " + e.what());
    }
  }

  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    const DiagramRow& r = d.rows[i];
    const std::string label = "row " + std::to_string(i);
    if (r.kind != "exact" && r.kind != "strict-exact" && r.kind != "extension") {
      fail(label + " has unknown kind " + r.kind);
      continue;
    }
    if (r.edges.empty()) {
      fail(label + " is empty");
      continue;
    }
    try {
      for (std::size_t k = 0; k + 1 < r.edges.size(); ++k)
        if (!is_exact_at(d.edge(r.edges[k]).hom, d.edge(r.edges[k + 1]).hom))
          fail(label + " is not exact at " + d.edge(r.edges[k]).to);
      if (r.kind == "exact") continue;
      for (const auto& name : r.edges)
        if (!detail::continuous_and_strict(d.top_edge(name))) fail(label + ": " + name + " is not continuous and strict");
      if (r.kind == "extension") {
        if (r.edges.size() != 2) fail(label + " is not a short exact row");
        else {
          if (!is_injective(d.edge(r.edges[0]).hom)) fail(label + ": " + r.edges[0] + " is not injective");
          if (!is_surjective(d.edge(r.edges[1]).hom)) fail(label + ": " + r.edges[1] + " is not surjective");
        }
      }
    } catch (const Error& e) {
      fail(label + ": " + e.what());
    }
  }

  for (const auto& [name, s] : d.sections) {
    try {
      const Homomorphism& p = d.edge(s.edge).hom;
      const auto& t = s.section.table;
      if (t.size() != p.target().order() || t.empty() || t[0] != 0) throw Error(ErrorKind::InvalidSection, "bad table");
      for (Index b = 0; b < t.size(); ++b)
        if (t[b] >= p.source().order() || p(t[b]) != b) throw Error(ErrorKind::InvalidSection, "not a section");
    } catch (const Error& e) {
      fail("section " + name + ": " + e.what());
    }
  }
  return out;
}

}  // namespace topab
