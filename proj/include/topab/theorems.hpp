#pragma once

// Per-instance verifiers for the continuity theorems. Each verifier evaluates
// every hypothesis, and evaluates the conclusion only when all hypotheses
// that were not dropped hold. Dropped hypotheses are still reported.

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "topab/diagram.hpp"
#include "topab/duality.hpp"
#include "topab/extension.hpp"
#include "topab/snake.hpp"
#include "topab/square.hpp"
#include "topab/topology.hpp"

namespace topab {

using Dropped = std::set<std::string>;

struct Check {
  std::string name;
  bool passed = false;
  bool dropped = false;

  friend bool operator==(const Check&, const Check&) = default;
};

struct Verdict {
  std::vector<Check> hypotheses;
  std::optional<std::vector<Check>> conclusion;

  bool hypotheses_hold() const {
    return std::all_of(hypotheses.begin(), hypotheses.end(), [](const Check& c) { return c.passed || c.dropped; });
  }
  bool conclusion_holds() const {
    return conclusion && std::all_of(conclusion->begin(), conclusion->end(), [](const Check& c) { return c.passed; });
  }
  bool failure() const { return conclusion && !conclusion_holds(); }
};

// ---------------------------------------------------------------------------
// Instances

/// A morphism of extensions with cores on all six groups, and optionally a
/// section of each row.
struct SquareInstance {
  ExtensionSquare square;
  Subgroup na1, ng1, nb1, na2, ng2, nb2;
  std::optional<Section> s1, s2;

  TopAbGroup A1() const { return TopAbGroup(square.top_row().A(), na1); }
  TopAbGroup G1() const { return TopAbGroup(square.top_row().G(), ng1); }
  TopAbGroup B1() const { return TopAbGroup(square.top_row().B(), nb1); }
  TopAbGroup A2() const { return TopAbGroup(square.bottom_row().A(), na2); }
  TopAbGroup G2() const { return TopAbGroup(square.bottom_row().G(), ng2); }
  TopAbGroup B2() const { return TopAbGroup(square.bottom_row().B(), nb2); }
  TopHom alpha() const { return TopHom(square.alpha(), A1(), A2()); }
  TopHom beta() const { return TopHom(square.beta(), B1(), B2()); }
  TopHom gamma() const { return TopHom(square.gamma(), G1(), G2()); }
};

/// A -f-> B -g-> C -h-> D -k-> E.
struct FiveTermRow {
  std::array<TopAbGroup, 5> groups;
  std::array<Homomorphism, 4> maps;
};

/// Two rows and the vertical maps alpha..epsilon.
struct FiveTermInstance {
  FiveTermRow top, bottom;
  std::array<Homomorphism, 5> vertical;
};

struct ExtensionInstance {
  GroupExtension extension;
  Subgroup na, ng, nb;
};

/// A -f-> B over A' -g-> B' with alpha: A -> A', beta: B -> B'.
struct InjectivitySquare {
  TopAbGroup a, b, a2, b2;
  Homomorphism f, g, alpha, beta;
};

// ---------------------------------------------------------------------------
// Registry

struct TheoremInfo {
  std::string id;
  std::string statement;
  std::vector<std::string> fixed;       // part of the instance shape, never dropped
  std::vector<std::string> hypotheses;  // droppable
  std::vector<std::string> model_collapse;
};

inline const std::vector<TheoremInfo>& theorem_registry() {
  static const std::vector<std::string> finite = {
      "locally compact, compact, first and second countable: automatic for finite groups",
      "Hausdorff = discrete = trivial open core",
  };
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> out = finite;
    out.insert(out.end(), extra.begin(), extra.end());
    return out;
  };
  static const std::vector<TheoremInfo> reg = {
      {"strictness_injectivity",
       "g alpha = beta f with all maps continuous and injective, f, g, beta strict => alpha strict",
       {"square_commutes"},
       {"maps_continuous", "f_injective", "g_injective", "alpha_injective", "beta_injective", "f_strict", "g_strict",
        "beta_strict"},
       with({"strict: f(N) = f(G) ∩ N' for continuous f"})},
      {"haus_exactness",
       "topological extension with N_A trivial (a) or N_B trivial (b) => separated and dual sequences are "
       "topological extensions",
       {"topological_extension"},
       {"case_a_or_b"},
       with({"case a, A Hausdorff compact: N_A trivial", "case b, B Hausdorff and A second countable: N_B trivial",
             "dual groups are carried discretely (compact-open topology of a finite Hausdorff group)"})},
      {"p3_generalized",
       "alpha, beta continuous and s1, s2 compatible => gamma continuous",
       {"rows_topological_extensions", "nagao_topologies"},
       {"alpha_continuous", "beta_continuous", "sections_compatible"},
       with({"sigma continuous at 0: sigma(N_B1) ⊆ N_A2", "Nagao topology: core iota(N_A) + s(N_B)"})},
      {"open_fibers",
       "sigma has open fibers => (alpha, beta continuous <=> gamma continuous) and the same for continuous strict",
       {"rows_topological_extensions", "nagao_topologies"},
       {"sigma_open_fibers"},
       with({"open fibers: sigma constant on N_B1-cosets"})},
      {"p3_discrete",
       "B1 discrete => (gamma continuous <=> alpha continuous, and continuous strict <=> alpha, beta continuous "
       "strict); A2 indiscrete => (gamma continuous <=> beta continuous)",
       {"rows_topological_extensions"},
       {"b1_discrete_or_a2_indiscrete"},
       with({"B1 discrete: N_B1 trivial", "A2 indiscrete: N_A2 = A2"})},
      {"five_lemma_nagao",
       "alpha, beta continuous and (B1 discrete, or N_A2 trivial and E1 in a haus_exactness case) => gamma_Haus "
       "well defined and continuous; if G2 Hausdorff, gamma continuous <=> alpha, beta continuous",
       {"rows_topological_extensions"},
       {"alpha_continuous", "beta_continuous", "case_a_or_b"},
       with({"case b, A2 Hausdorff compact: N_A2 trivial", "E1 haus_exactness case: N_A1 trivial or N_B1 trivial",
             "gamma_Haus well defined: gamma(N_G1) ⊆ N_G2"})},
      {"five_lemma_topological",
       "strict exact rows, beta and delta topological isomorphisms, epsilon injective, alpha surjective, D_i "
       "discrete (a) or N_B_i trivial (b) => gamma bijective, gamma_Haus well defined, continuous and surjective; "
       "if C2 Hausdorff, gamma a continuous bijection",
       {"rows_strict_exact", "diagram_commutes"},
       {"beta_topological_iso", "delta_topological_iso", "epsilon_injective", "alpha_surjective", "case_a_or_b"},
       with({"case b, B_i Hausdorff compact: N_B_i trivial", "gamma_Haus well defined: gamma(N_C1) ⊆ N_C2"})},
      {"five_lemma_topological_relaxed",
       "as five_lemma_topological with beta and delta only continuous bijections",
       {"rows_strict_exact", "diagram_commutes"},
       {"beta_continuous_bijection", "delta_continuous_bijection", "epsilon_injective", "alpha_surjective",
        "case_a_or_b"},
       with({"case b, B_i Hausdorff compact: N_B_i trivial", "gamma_Haus well defined: gamma(N_C1) ⊆ N_C2"})},
  };
  return reg;
}

inline const TheoremInfo& theorem_info(const std::string& id) {
  for (const auto& t : theorem_registry())
    if (t.id == id) return t;
  throw Error(ErrorKind::UnknownTheorem, "no theorem named " + id);
}

inline Dropped validate_dropped(const std::string& theorem, const std::vector<std::string>& dropped) {
  const TheoremInfo& info = theorem_info(theorem);
  Dropped out;
  for (const auto& h : dropped) {
    if (std::find(info.hypotheses.begin(), info.hypotheses.end(), h) == info.hypotheses.end()) {
      const bool fixed = std::find(info.fixed.begin(), info.fixed.end(), h) != info.fixed.end();
      throw Error(ErrorKind::UnknownHypothesis,
                  h + (fixed ? " is part of the instance shape and cannot be dropped" : " is not a hypothesis of ") +
                      (fixed ? "" : theorem));
    }
    out.insert(h);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Predicates on raw homs and cores

namespace detail {

inline bool continuous(const Homomorphism& f, const Subgroup& ns, const Subgroup& nt) {
  return is_continuous(TopHom(f, TopAbGroup(f.source(), ns), TopAbGroup(f.target(), nt)));
}

inline bool continuous_strict(const TopHom& f) { return is_continuous(f) && is_strict(f); }

inline bool continuous_strict(const Homomorphism& f, const Subgroup& ns, const Subgroup& nt) {
  return continuous_strict(TopHom(f, TopAbGroup(f.source(), ns), TopAbGroup(f.target(), nt)));
}

inline bool topological_iso(const TopHom& f) { return is_bijective(f.map()) && continuous_strict(f); }

inline bool continuous_bijection(const TopHom& f) { return is_bijective(f.map()) && is_continuous(f); }

struct HausMap {
  bool well_defined = false;
  bool continuous = false;
  bool surjective = false;
};

inline HausMap haus_map(const TopHom& f) {
  try {
    const TopHom h = separation_hom(f);
    return {true, is_continuous(h), is_surjective(h.map())};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotWellDefined) throw;
    return {};
  }
}

inline bool rows_topological(const SquareInstance& x) {
  return is_topological_extension(x.square.top_row(), x.na1, x.ng1, x.nb1) &&
         is_topological_extension(x.square.bottom_row(), x.na2, x.ng2, x.nb2);
}

inline bool nagao_core(const GroupExtension& e, const std::optional<Section>& s, const Subgroup& na,
                       const Subgroup& ng, const Subgroup& nb) {
  if (!s) return false;
  if (topologizing_violation(na, nb, factor_set_from_section(e, *s))) return false;
  return nagao_core_elements(e, *s, na, nb) == ng.elements();
}

inline bool nagao_topologies(const SquareInstance& x) {
  return nagao_core(x.square.top_row(), x.s1, x.na1, x.ng1, x.nb1) &&
         nagao_core(x.square.bottom_row(), x.s2, x.na2, x.ng2, x.nb2);
}

class VerdictBuilder {
 public:
  explicit VerdictBuilder(const Dropped& dropped) : dropped_(dropped) {}

  void hypothesis(std::string name, bool passed) {
    const bool d = dropped_.count(name) > 0;
    v_.hypotheses.push_back(Check{std::move(name), passed, d});
  }
  bool gate() const { return v_.hypotheses_hold(); }
  void part(std::string name, bool passed) {
    if (!v_.conclusion) v_.conclusion.emplace();
    v_.conclusion->push_back(Check{std::move(name), passed, false});
  }
  Verdict done() { return std::move(v_); }

 private:
  const Dropped& dropped_;
  Verdict v_;
};

/// 0 -> B/Im f -> C -> Im h -> 0 with quotient and subspace topologies.
inline bool reduction_row_is_extension(const FiveTermRow& r) {
  try {
    const QuotientSpace q = quotient_space(r.groups[1], image(r.maps[0]));
    const Subspace im = subspace(r.groups[3], image(r.maps[2]));
    const FinAbGroup& qg = q.group.group();
    std::vector<Index> gens(qg.rank());
    for (std::size_t i = 0; i < gens.size(); ++i) gens[i] = r.maps[1](q.quotient.lifts[i]);
    const Homomorphism g_bar(qg, r.groups[2].group(), std::move(gens));
    const Homomorphism h_bar = corestrict(r.maps[2], im.structure);
    Extension(GroupExtension(g_bar, h_bar), q.group, r.groups[2], im.group);
    return true;
  } catch (const Error&) {
    return false;
  }
}

inline bool row_strict_exact(const FiveTermRow& r) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (!(r.maps[i].source() == r.groups[i].group()) || !(r.maps[i].target() == r.groups[i + 1].group()))
      return false;
    if (!continuous_strict(TopHom(r.maps[i], r.groups[i], r.groups[i + 1]))) return false;
  }
  for (std::size_t i = 0; i + 1 < 4; ++i)
    if (!is_exact_at(r.maps[i], r.maps[i + 1])) return false;
  return true;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Verifiers

inline Verdict verify_strictness_injectivity(const InjectivitySquare& x, const Dropped& dropped = {}) {
  detail::VerdictBuilder v(dropped);
  const TopHom f(x.f, x.a, x.b), g(x.g, x.a2, x.b2), alpha(x.alpha, x.a, x.a2), beta(x.beta, x.b, x.b2);
  v.hypothesis("square_commutes", compose(x.g, x.alpha) == compose(x.beta, x.f));
  v.hypothesis("maps_continuous", is_continuous(f) && is_continuous(g) && is_continuous(alpha) && is_continuous(beta));
  v.hypothesis("f_injective", is_injective(x.f));
  v.hypothesis("g_injective", is_injective(x.g));
  v.hypothesis("alpha_injective", is_injective(x.alpha));
  v.hypothesis("beta_injective", is_injective(x.beta));
  v.hypothesis("f_strict", detail::continuous_strict(f));
  v.hypothesis("g_strict", detail::continuous_strict(g));
  v.hypothesis("beta_strict", detail::continuous_strict(beta));
  if (v.gate()) v.part("alpha_strict", detail::continuous_strict(alpha));
  return v.done();
}

inline Verdict verify_haus_exactness(const ExtensionInstance& x, const Dropped& dropped = {}) {
  detail::VerdictBuilder v(dropped);
  const bool topological = is_topological_extension(x.extension, x.na, x.ng, x.nb);
  v.hypothesis("topological_extension", topological);
  v.hypothesis("case_a_or_b", x.na.is_trivial() || x.nb.is_trivial());
  if (!v.gate()) return v.done();
  const GroupExtension& alg = x.extension;
  const Extension e(alg, TopAbGroup(alg.A(), x.na), TopAbGroup(alg.G(), x.ng), TopAbGroup(alg.B(), x.nb));

  bool separated = false;
  try {
    const Separation sa = separation(e.A()), sg = separation(e.G()), sb = separation(e.B());
    const TopHom i = separation_hom(e.iota(), sa, sg);
    const TopHom p = separation_hom(e.pi(), sg, sb);
    Extension(GroupExtension(i.map(), p.map()), sa.group, sg.group, sb.group);
    separated = true;
  } catch (const Error&) {
  }
  v.part("separated_sequence_extension", separated);
  v.part("dual_sequence_extension", dual_extension(e).topological);
  v.part("snake_sequence_exact", snake_haus_sequence(e).exact);
  return v.done();
}

inline Verdict verify_p3_generalized(const SquareInstance& x, const Dropped& dropped = {}) {
  detail::VerdictBuilder v(dropped);
  v.hypothesis("rows_topological_extensions", detail::rows_topological(x));
  v.hypothesis("nagao_topologies", detail::nagao_topologies(x));
  v.hypothesis("alpha_continuous", is_continuous(x.alpha()));
  v.hypothesis("beta_continuous", is_continuous(x.beta()));
  const bool have_sections = x.s1 && x.s2;
  v.hypothesis("sections_compatible", have_sections && is_compatible(sigma(x.square, *x.s1, *x.s2), x.nb1, x.na2));
  if (!v.gate()) return v.done();
  v.part("gamma_continuous", is_continuous(x.gamma()));
  v.part("psi_sum_identity", psi_sum_holds(x.square, *x.s2, psi_maps(x.square, *x.s1, *x.s2)));
  return v.done();
}

inline Verdict verify_open_fibers(const SquareInstance& x, const Dropped& dropped = {}) {
  detail::VerdictBuilder v(dropped);
  v.hypothesis("rows_topological_extensions", detail::rows_topological(x));
  v.hypothesis("nagao_topologies", detail::nagao_topologies(x));
  const bool have_sections = x.s1 && x.s2;
  v.hypothesis("sigma_open_fibers", have_sections && has_open_fibers(sigma(x.square, *x.s1, *x.s2), x.B1()));
  if (!v.gate()) return v.done();
  const bool ac = is_continuous(x.alpha()), bc = is_continuous(x.beta()), gc = is_continuous(x.gamma());
  const bool as = ac && is_strict(x.alpha()), bs = bc && is_strict(x.beta()), gs = gc && is_strict(x.gamma());
  v.part("continuity_iff", (ac && bc) == gc);
  v.part("strictness_iff", (as && bs) == gs);
  return v.done();
}

inline Verdict verify_p3_discrete(const SquareInstance& x, const Dropped& dropped = {}) {
  detail::VerdictBuilder v(dropped);
  v.hypothesis("rows_topological_extensions", detail::rows_topological(x));
  const bool b1_discrete = x.nb1.is_trivial();
  const bool a2_indiscrete = x.na2.is_whole();
  v.hypothesis("b1_discrete_or_a2_indiscrete", b1_discrete || a2_indiscrete);
  if (!v.gate()) return v.done();
  const bool all = dropped.count("b1_discrete_or_a2_indiscrete") > 0;
  const bool ac = is_continuous(x.alpha()), bc = is_continuous(x.beta()), gc = is_continuous(x.gamma());
  if (b1_discrete || all) {
    const bool as = ac && is_strict(x.alpha()), bs = bc && is_strict(x.beta()), gs = gc && is_strict(x.gamma());
    v.part("continuity_iff_alpha", gc == ac);
    v.part("strictness_iff", gs == (as && bs));
  }
  if (a2_indiscrete || all) v.part("continuity_iff_beta", gc == bc);
  return v.done();
}

inline Verdict verify_five_lemma_nagao(const SquareInstance& x, const Dropped& dropped = {}) {
  detail::VerdictBuilder v(dropped);
  v.hypothesis("rows_topological_extensions", detail::rows_topological(x));
  const bool ac = is_continuous(x.alpha()), bc = is_continuous(x.beta());
  v.hypothesis("alpha_continuous", ac);
  v.hypothesis("beta_continuous", bc);
  const bool case_a = x.nb1.is_trivial();
  const bool case_b = x.na2.is_trivial() && (x.na1.is_trivial() || x.nb1.is_trivial());
  v.hypothesis("case_a_or_b", case_a || case_b);
  if (!v.gate()) return v.done();
  const auto haus = detail::haus_map(x.gamma());
  v.part("gamma_haus_well_defined", haus.well_defined);
  v.part("gamma_haus_continuous", haus.well_defined && haus.continuous);
  v.part("hausdorff_iff", !x.ng2.is_trivial() || is_continuous(x.gamma()) == (ac && bc));
  return v.done();
}

inline Verdict verify_topological_five_lemma(const FiveTermInstance& x, const Dropped& dropped = {},
                                             bool relaxed = false) {
  detail::VerdictBuilder v(dropped);
  const auto& r1 = x.top;
  const auto& r2 = x.bottom;
  bool commutes = true;
  for (std::size_t i = 0; i < 5; ++i)
    if (!(x.vertical[i].source() == r1.groups[i].group()) || !(x.vertical[i].target() == r2.groups[i].group()))
      commutes = false;
  for (std::size_t i = 0; commutes && i < 4; ++i)
    if (!(compose(x.vertical[i + 1], r1.maps[i]) == compose(r2.maps[i], x.vertical[i]))) commutes = false;
  v.hypothesis("rows_strict_exact", detail::row_strict_exact(r1) && detail::row_strict_exact(r2));
  v.hypothesis("diagram_commutes", commutes);
  if (!commutes) return v.done();
  auto vert = [&](std::size_t i) { return TopHom(x.vertical[i], r1.groups[i], r2.groups[i]); };
  if (relaxed) {
    v.hypothesis("beta_continuous_bijection", detail::continuous_bijection(vert(1)));
    v.hypothesis("delta_continuous_bijection", detail::continuous_bijection(vert(3)));
  } else {
    v.hypothesis("beta_topological_iso", detail::topological_iso(vert(1)));
    v.hypothesis("delta_topological_iso", detail::topological_iso(vert(3)));
  }
  v.hypothesis("epsilon_injective", is_injective(x.vertical[4]));
  v.hypothesis("alpha_surjective", is_surjective(x.vertical[0]));
  const bool case_a = r1.groups[3].core().is_trivial() && r2.groups[3].core().is_trivial();
  const bool case_b = r1.groups[1].core().is_trivial() && r2.groups[1].core().is_trivial();
  v.hypothesis("case_a_or_b", case_a || case_b);
  if (!v.gate()) return v.done();
  const TopHom gamma = vert(2);
  const bool bij = is_bijective(gamma.map());
  const auto haus = detail::haus_map(gamma);
  v.part("gamma_bijective", bij);
  v.part("gamma_haus_well_defined", haus.well_defined);
  v.part("gamma_haus_continuous", haus.well_defined && haus.continuous);
  v.part("gamma_haus_surjective", haus.well_defined && haus.surjective);
  v.part("reduction_rows_extensions", detail::reduction_row_is_extension(r1) && detail::reduction_row_is_extension(r2));
  v.part("hausdorff_continuous_bijection", !r2.groups[2].core().is_trivial() || (is_continuous(gamma) && bij));
  return v.done();
}

// ---------------------------------------------------------------------------
// Diagram form of each instance kind

namespace detail {

inline void put_edge(Diagram& d, const std::string& name, const std::string& from, const std::string& to,
                     const Homomorphism& h) {
  d.edges[name] = DiagramEdge{from, to, h};
}

}  // namespace detail

inline Diagram to_diagram(const SquareInstance& x) {
  Diagram d;
  d.nodes = {{"A1", x.A1()}, {"G1", x.G1()}, {"B1", x.B1()}, {"A2", x.A2()}, {"G2", x.G2()}, {"B2", x.B2()}};
  const auto& e1 = x.square.top_row();
  const auto& e2 = x.square.bottom_row();
  detail::put_edge(d, "iota1", "A1", "G1", e1.iota());
  detail::put_edge(d, "pi1", "G1", "B1", e1.pi());
  detail::put_edge(d, "iota2", "A2", "G2", e2.iota());
  detail::put_edge(d, "pi2", "G2", "B2", e2.pi());
  detail::put_edge(d, "alpha", "A1", "A2", x.square.alpha());
  detail::put_edge(d, "gamma", "G1", "G2", x.square.gamma());
  detail::put_edge(d, "beta", "B1", "B2", x.square.beta());
  d.squares = {{{"iota1", "gamma"}, {"alpha", "iota2"}}, {{"gamma", "pi2"}, {"pi1", "beta"}}};
  d.rows = {{{"iota1", "pi1"}, "extension"}, {{"iota2", "pi2"}, "extension"}};
  if (x.s1) d.sections["s1"] = DiagramSection{"pi1", *x.s1};
  if (x.s2) d.sections["s2"] = DiagramSection{"pi2", *x.s2};
  return d;
}

inline SquareInstance square_instance(const Diagram& d) {
  GroupExtension e1(d.edge("iota1").hom, d.edge("pi1").hom);
  GroupExtension e2(d.edge("iota2").hom, d.edge("pi2").hom);
  ExtensionSquare sq(e1, e2, d.edge("alpha").hom, d.edge("beta").hom, d.edge("gamma").hom);
  SquareInstance x{sq,
                   d.node("A1").core(), d.node("G1").core(), d.node("B1").core(),
                   d.node("A2").core(), d.node("G2").core(), d.node("B2").core(),
                   std::nullopt, std::nullopt};
  if (auto it = d.sections.find("s1"); it != d.sections.end()) {
    validate_section(e1, it->second.section);
    x.s1 = it->second.section;
  }
  if (auto it = d.sections.find("s2"); it != d.sections.end()) {
    validate_section(e2, it->second.section);
    x.s2 = it->second.section;
  }
  return x;
}

inline Diagram to_diagram(const FiveTermInstance& x) {
  static const char* letters = "ABCDE";
  static const std::array<const char*, 4> maps = {"f", "g", "h", "k"};
  static const std::array<const char*, 5> vert = {"alpha", "beta", "gamma", "delta", "epsilon"};
  Diagram d;
  for (int row = 1; row <= 2; ++row) {
    const FiveTermRow& r = row == 1 ? x.top : x.bottom;
    const std::string suffix = std::to_string(row);
    for (std::size_t i = 0; i < 5; ++i) d.nodes[std::string(1, letters[i]) + suffix] = r.groups[i];
    DiagramRow dr{{}, "strict-exact"};
    for (std::size_t i = 0; i < 4; ++i) {
      const std::string name = maps[i] + suffix;
      detail::put_edge(d, name, std::string(1, letters[i]) + suffix, std::string(1, letters[i + 1]) + suffix,
                       r.maps[i]);
      dr.edges.push_back(name);
    }
    d.rows.push_back(dr);
  }
  for (std::size_t i = 0; i < 5; ++i)
    detail::put_edge(d, vert[i], std::string(1, letters[i]) + "1", std::string(1, letters[i]) + "2", x.vertical[i]);
  for (std::size_t i = 0; i < 4; ++i)
    d.squares.push_back({{std::string(maps[i]) + "1", vert[i + 1]}, {vert[i], std::string(maps[i]) + "2"}});
  return d;
}

inline FiveTermInstance five_term_instance(const Diagram& d) {
  static const char* letters = "ABCDE";
  static const std::array<const char*, 4> maps = {"f", "g", "h", "k"};
  static const std::array<const char*, 5> vert = {"alpha", "beta", "gamma", "delta", "epsilon"};
  FiveTermInstance x;
  for (int row = 1; row <= 2; ++row) {
    FiveTermRow& r = row == 1 ? x.top : x.bottom;
    const std::string suffix = std::to_string(row);
    for (std::size_t i = 0; i < 5; ++i) r.groups[i] = d.node(std::string(1, letters[i]) + suffix);
    for (std::size_t i = 0; i < 4; ++i) r.maps[i] = d.edge(maps[i] + suffix).hom;
  }
  for (std::size_t i = 0; i < 5; ++i) x.vertical[i] = d.edge(vert[i]).hom;
  return x;
}

inline Diagram to_diagram(const ExtensionInstance& x) {
  Diagram d;
  const auto& e = x.extension;
  d.nodes = {{"A", TopAbGroup(e.A(), x.na)}, {"G", TopAbGroup(e.G(), x.ng)}, {"B", TopAbGroup(e.B(), x.nb)}};
  detail::put_edge(d, "iota", "A", "G", e.iota());
  detail::put_edge(d, "pi", "G", "B", e.pi());
  d.rows = {{{"iota", "pi"}, "extension"}};
  return d;
}

inline ExtensionInstance extension_instance(const Diagram& d) {
  return ExtensionInstance{GroupExtension(d.edge("iota").hom, d.edge("pi").hom), d.node("A").core(),
                           d.node("G").core(), d.node("B").core()};
}

inline Diagram to_diagram(const InjectivitySquare& x) {
  Diagram d;
  d.nodes = {{"A", x.a}, {"B", x.b}, {"A'", x.a2}, {"B'", x.b2}};
  detail::put_edge(d, "f", "A", "B", x.f);
  detail::put_edge(d, "g", "A'", "B'", x.g);
  detail::put_edge(d, "alpha", "A", "A'", x.alpha);
  detail::put_edge(d, "beta", "B", "B'", x.beta);
  d.squares = {{{"f", "beta"}, {"alpha", "g"}}};
  return d;
}

inline InjectivitySquare injectivity_square(const Diagram& d) {
  return InjectivitySquare{d.node("A"), d.node("B"), d.node("A'"), d.node("B'"),
                           d.edge("f").hom, d.edge("g").hom, d.edge("alpha").hom, d.edge("beta").hom};
}

// ---------------------------------------------------------------------------
// Reports

struct VerificationReport {
  std::string theorem;
  std::vector<std::string> dropped;
  Diagram instance;
  Verdict verdict;
  bool witness = false;
  std::vector<std::string> model_collapse;
  std::optional<Diagram> unshrunk;  // search mode: the instance as first found
};

/// Rebuilds the instance from its diagram and runs the theorem's verifier.
inline Verdict verify_instance(const std::string& theorem, const Diagram& d, const Dropped& dropped) {
  if (theorem == "strictness_injectivity") return verify_strictness_injectivity(injectivity_square(d), dropped);
  if (theorem == "haus_exactness") return verify_haus_exactness(extension_instance(d), dropped);
  if (theorem == "p3_generalized") return verify_p3_generalized(square_instance(d), dropped);
  if (theorem == "open_fibers") return verify_open_fibers(square_instance(d), dropped);
  if (theorem == "p3_discrete") return verify_p3_discrete(square_instance(d), dropped);
  if (theorem == "five_lemma_nagao") return verify_five_lemma_nagao(square_instance(d), dropped);
  if (theorem == "five_lemma_topological") return verify_topological_five_lemma(five_term_instance(d), dropped);
  if (theorem == "five_lemma_topological_relaxed")
    return verify_topological_five_lemma(five_term_instance(d), dropped, true);
  throw Error(ErrorKind::UnknownTheorem, "no theorem named " + theorem);
}

inline VerificationReport verify(const std::string& theorem, const Diagram& d,
                                 const std::vector<std::string>& dropped = {}) {
  const Dropped set = validate_dropped(theorem, dropped);
  VerificationReport r{theorem, dropped, d, verify_instance(theorem, d, set), false,
                       theorem_info(theorem).model_collapse, std::nullopt};
  r.witness = r.verdict.failure();
  return r;
}

}  // namespace topab
