#pragma once

// JSON forms of groups, maps, topologies, factor sets, sections, diagrams and
// verification reports. Elements are coordinate arrays. Every reader throws
// MalformedInput on shape errors.

#include <json.hpp>

#include <string>
#include <vector>

#include "topab/diagram.hpp"
#include "topab/duality.hpp"
#include "topab/extension.hpp"
#include "topab/theorems.hpp"
#include "topab/topology.hpp"

namespace topab::json {

using nlohmann::json;

namespace detail {

[[noreturn]] inline void malformed(const std::string& what) { throw Error(ErrorKind::MalformedInput, what); }

inline const json& field(const json& j, const char* key) {
  if (!j.is_object()) malformed(std::string("expected an object with key ") + key);
  auto it = j.find(key);
  if (it == j.end()) malformed(std::string("missing key ") + key);
  return *it;
}

inline const json& array(const json& j, const char* what) {
  if (!j.is_array()) malformed(std::string(what) + " must be an array");
  return j;
}

template <class T>
T get(const json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    malformed(std::string("bad value for ") + what);
  }
}

}  // namespace detail

// group-core

inline json group_to_json(const FinAbGroup& g) { return json{{"moduli", g.moduli()}}; }

inline FinAbGroup group_from_json(const json& j) {
  return FinAbGroup(detail::get<std::vector<Int>>(detail::field(j, "moduli"), "moduli"));
}

inline json element_to_json(const FinAbGroup& g, Index x) { return g.element(x).coords; }

inline Index element_from_json(const FinAbGroup& g, const json& j) {
  return g.index_of(Element{detail::get<std::vector<Int>>(j, "element")});
}

inline json subgroup_to_json(const Subgroup& s) {
  json els = json::array();
  for (Index x : s.elements()) els.push_back(element_to_json(s.parent(), x));
  return json{{"elements", els}};
}

inline Subgroup subgroup_from_json(const FinAbGroup& g, const json& j) {
  std::vector<Index> els;
  for (const auto& e : detail::array(detail::field(j, "elements"), "elements")) els.push_back(element_from_json(g, e));
  return Subgroup(g, std::move(els));
}

inline json hom_to_json(const Homomorphism& f) {
  json imgs = json::array();
  for (Index y : f.gen_images()) imgs.push_back(element_to_json(f.target(), y));
  return json{{"source", group_to_json(f.source())}, {"target", group_to_json(f.target())}, {"gen_images", imgs}};
}

inline Homomorphism hom_from_json(const json& j) {
  const FinAbGroup src = group_from_json(detail::field(j, "source"));
  const FinAbGroup tgt = group_from_json(detail::field(j, "target"));
  std::vector<Index> imgs;
  for (const auto& e : detail::array(detail::field(j, "gen_images"), "gen_images"))
    imgs.push_back(element_from_json(tgt, e));
  return Homomorphism(src, tgt, std::move(imgs));
}

// topology

inline json topgroup_to_json(const TopAbGroup& g) {
  return json{{"group", group_to_json(g.group())}, {"open_core", subgroup_to_json(g.core())}};
}

inline TopAbGroup topgroup_from_json(const json& j) {
  FinAbGroup g = group_from_json(detail::field(j, "group"));
  Subgroup core = subgroup_from_json(g, detail::field(j, "open_core"));
  return TopAbGroup(std::move(g), std::move(core));
}

// extensions

inline json cocycle_to_json(const FactorSet& h) {
  json table = json::array();
  for (Index b = 0; b < h.B.order(); ++b)
    for (Index c = 0; c < h.B.order(); ++c)
      table.push_back(json::array({element_to_json(h.B, b), element_to_json(h.B, c), element_to_json(h.A, h(b, c))}));
  return json{{"A", group_to_json(h.A)}, {"B", group_to_json(h.B)}, {"table", table}};
}

/// Pairs left out of the table are 0.
inline FactorSet cocycle_from_json(const json& j) {
  const FinAbGroup A = group_from_json(detail::field(j, "A"));
  const FinAbGroup B = group_from_json(detail::field(j, "B"));
  FactorSet h = FactorSet::zero(A, B);
  for (const auto& row : detail::array(detail::field(j, "table"), "table")) {
    if (!row.is_array() || row.size() != 3) detail::malformed("cocycle entries are [b, b', a]");
    h.at(element_from_json(B, row[0]), element_from_json(B, row[1])) = element_from_json(A, row[2]);
  }
  return h;
}

inline json section_to_json(const FinAbGroup& B, const FinAbGroup& G, const Section& s) {
  json table = json::array();
  for (Index b = 0; b < B.order(); ++b) table.push_back(json::array({element_to_json(B, b), element_to_json(G, s(b))}));
  return json{{"table", table}};
}

/// Every b must appear exactly once.
inline Section section_from_json(const FinAbGroup& B, const FinAbGroup& G, const json& j) {
  Section s{std::vector<Index>(B.order(), npos)};
  for (const auto& row : detail::array(detail::field(j, "table"), "table")) {
    if (!row.is_array() || row.size() != 2) detail::malformed("section entries are [b, g]");
    const Index b = element_from_json(B, row[0]);
    if (s.table[b] != npos) detail::malformed("section lists an element twice");
    s.table[b] = element_from_json(G, row[1]);
  }
  for (Index v : s.table)
    if (v == npos) detail::malformed("section table is incomplete");
  return s;
}

// duality

inline json dual_to_json(const DualGroup& d) {
  json chars = json::array();
  const FinAbGroup& G = d.base().group();
  for (Index y = 0; y < d.order(); ++y) {
    const Character c = d.character_at(y);
    json values = json::array();
    for (Index x = 0; x < G.order(); ++x) values.push_back(json::array({element_to_json(G, x), c.values[x]}));
    chars.push_back(json{{"param", element_to_json(G, d.param(y))}, {"values", values}, {"denominator", c.denominator}});
  }
  return json{{"structure", group_to_json(d.structure())}, {"characters", chars}};
}

// diagrams

inline json diagram_to_json(const Diagram& d) {
  json nodes = json::object();
  for (const auto& [name, g] : d.nodes) nodes[name] = topgroup_to_json(g);
  json edges = json::object();
  for (const auto& [name, e] : d.edges) edges[name] = json{{"from", e.from}, {"to", e.to}, {"hom", hom_to_json(e.hom)}};
  json squares = json::array();
  for (const auto& [p, q] : d.squares) squares.push_back(json::array({p, q}));
  json rows = json::array();
  for (const auto& r : d.rows) rows.push_back(json{{"edges", r.edges}, {"kind", r.kind}});
  json out{{"nodes", nodes}, {"edges", edges}, {"squares", squares}, {"rows", rows}};
  if (!d.sections.empty()) {
    json sections = json::object();
    for (const auto& [name, s] : d.sections) {
      const DiagramEdge& e = d.edge(s.edge);
      json sj = section_to_json(e.hom.target(), e.hom.source(), s.section);
      sj["edge"] = s.edge;
      sections[name] = sj;
    }
    out["sections"] = sections;
  }
  return out;
}

inline Diagram diagram_from_json(const json& j) {
  Diagram d;
  const json& nodes = detail::field(j, "nodes");
  if (!nodes.is_object()) detail::malformed("nodes must be an object");
  for (const auto& [name, g] : nodes.items()) d.nodes[name] = topgroup_from_json(g);
  const json& edges = detail::field(j, "edges");
  if (!edges.is_object()) detail::malformed("edges must be an object");
  for (const auto& [name, e] : edges.items()) {
    DiagramEdge edge{detail::get<std::string>(detail::field(e, "from"), "from"),
                     detail::get<std::string>(detail::field(e, "to"), "to"), hom_from_json(detail::field(e, "hom"))};
    d.edges[name] = std::move(edge);
  }
  if (j.contains("squares"))
    for (const auto& sq : detail::array(j["squares"], "squares")) {
      if (!sq.is_array() || sq.size() != 2) detail::malformed("a square is a pair of paths");
      d.squares.emplace_back(detail::get<DiagramPath>(sq[0], "path"), detail::get<DiagramPath>(sq[1], "path"));
    }
  if (j.contains("rows"))
    for (const auto& r : detail::array(j["rows"], "rows"))
      d.rows.push_back(DiagramRow{detail::get<std::vector<std::string>>(detail::field(r, "edges"), "row edges"),
                                  detail::get<std::string>(detail::field(r, "kind"), "row kind")});
  if (j.contains("sections")) {
    if (!j["sections"].is_object()) detail::malformed("sections must be an object");
    for (const auto& [name, s] : j["sections"].items()) {
      const std::string edge = detail::get<std::string>(detail::field(s, "edge"), "section edge");
      const DiagramEdge& e = d.edge(edge);
      d.sections[name] = DiagramSection{edge, section_from_json(e.hom.target(), e.hom.source(), s)};
    }
  }
  return d;
}

// reports

inline json checks_to_json(const std::vector<Check>& checks, bool with_dropped) {
  json out = json::array();
  for (const auto& c : checks) {
    json cj{{"name", c.name}, {"passed", c.passed}};
    if (with_dropped) cj["dropped"] = c.dropped;
    out.push_back(cj);
  }
  return out;
}

inline std::vector<Check> checks_from_json(const json& j) {
  std::vector<Check> out;
  for (const auto& c : detail::array(j, "checks"))
    out.push_back(Check{detail::get<std::string>(detail::field(c, "name"), "name"),
                        detail::get<bool>(detail::field(c, "passed"), "passed"),
                        c.contains("dropped") ? detail::get<bool>(c["dropped"], "dropped") : false});
  return out;
}

inline json report_to_json(const VerificationReport& r) {
  json out{{"theorem_id", r.theorem},
           {"dropped", r.dropped},
           {"instance", diagram_to_json(r.instance)},
           {"hypotheses_checked", checks_to_json(r.verdict.hypotheses, true)},
           {"model_collapse", r.model_collapse}};
  if (r.verdict.conclusion)
    out["conclusion_checked"] =
        json{{"passed", r.verdict.conclusion_holds()}, {"parts", checks_to_json(*r.verdict.conclusion, false)}};
  if (r.witness) {
    json w{{"failed_parts", json::array()}};
    for (const auto& c : *r.verdict.conclusion)
      if (!c.passed) w["failed_parts"].push_back(c.name);
    if (r.unshrunk) w["unshrunk_instance"] = diagram_to_json(*r.unshrunk);
    out["witness"] = w;
  }
  return out;
}

inline VerificationReport report_from_json(const json& j) {
  VerificationReport r;
  r.theorem = detail::get<std::string>(detail::field(j, "theorem_id"), "theorem_id");
  r.dropped = detail::get<std::vector<std::string>>(detail::field(j, "dropped"), "dropped");
  r.instance = diagram_from_json(detail::field(j, "instance"));
  r.verdict.hypotheses = checks_from_json(detail::field(j, "hypotheses_checked"));
  r.model_collapse = detail::get<std::vector<std::string>>(detail::field(j, "model_collapse"), "model_collapse");
  if (j.contains("conclusion_checked")) r.verdict.conclusion = checks_from_json(detail::field(j["conclusion_checked"], "parts"));
  if (j.contains("witness")) {
    r.witness = true;
    if (j["witness"].contains("unshrunk_instance")) r.unshrunk = diagram_from_json(j["witness"]["unshrunk_instance"]);
  }
  return r;
}

/// Parses text, mapping syntax errors to MalformedInput.
inline json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    detail::malformed(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace topab::json
