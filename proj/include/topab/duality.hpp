#pragma once

// Characters of finite abelian groups with values in (1/e)Z/Z, e the group
// exponent. The character with parameter k is x -> sum_i k_i x_i (e/m_i) / e.
// Continuous characters are the ones vanishing on the open core.

#include <vector>

#include "topab/extension.hpp"
#include "topab/topology.hpp"

namespace topab {

struct Character {
  FinAbGroup group;
  Int denominator = 1;       // the exponent of group
  std::vector<Int> values;   // numerators, indexed by element

  friend bool operator==(const Character&, const Character&) = default;
};

inline Int character_value(const FinAbGroup& g, Index k, Index x) {
  const Int e = g.exponent();
  Int v = 0;
  for (std::size_t i = 0; i < g.rank(); ++i) {
    const Int m = g.moduli()[i];
    v = (v + g.coord(k, i) * g.coord(x, i) % m * (e / m)) % e;
  }
  return v;
}

inline Character character(const FinAbGroup& g, Index k) {
  Character c{g, g.exponent(), std::vector<Int>(g.order())};
  for (Index x = 0; x < g.order(); ++x) c.values[x] = character_value(g, k, x);
  return c;
}

class DualGroup {
 public:
  DualGroup() = default;

  explicit DualGroup(TopAbGroup base) : base_(std::move(base)) {
    const FinAbGroup& g = base_.group();
    std::vector<Index> params;
    for (Index k = 0; k < g.order(); ++k) {
      bool kills = true;
      for (Index n : base_.core().elements())
        if (character_value(g, k, n) != 0) {
          kills = false;
          break;
        }
      if (kills) params.push_back(k);
    }
    const SubgroupStructure st = structure_of(Subgroup(g, params));
    structure_ = st.group;
    param_to_structure_ = st.coords;
    structure_to_param_ = st.inclusion.table();
  }

  const TopAbGroup& base() const { return base_; }
  const FinAbGroup& structure() const { return structure_; }
  TopAbGroup top() const { return TopAbGroup::discrete(structure_); }
  Index order() const { return structure_.order(); }

  /// Parameter in the base group of the character at structure index y.
  Index param(Index y) const { return structure_to_param_[y]; }
  /// npos when the parameter gives a discontinuous character.
  Index index_of_param(Index k) const { return param_to_structure_[k]; }

  Character character_at(Index y) const { return character(base_.group(), param(y)); }
  std::vector<Character> characters() const {
    std::vector<Character> out;
    for (Index y = 0; y < order(); ++y) out.push_back(character_at(y));
    return out;
  }

  /// Structure index of the continuous character with these values (denominator = exponent of base).
  Index index_of_values(const std::vector<Int>& generator_values) const {
    const FinAbGroup& g = base_.group();
    const Int e = g.exponent();
    std::vector<Int> k(g.rank());
    for (std::size_t i = 0; i < g.rank(); ++i) {
      const Int unit = e / g.moduli()[i];
      if (generator_values[i] % unit != 0) throw Error(ErrorKind::IllDefined, "values are not a character");
      k[i] = generator_values[i] / unit;
    }
    const Index y = index_of_param(g.reduce(k));
    if (y == npos) throw Error(ErrorKind::NotContinuous, "character does not vanish on the open core");
    return y;
  }

 private:
  TopAbGroup base_;
  FinAbGroup structure_;
  std::vector<Index> param_to_structure_;
  std::vector<Index> structure_to_param_;
};

inline DualGroup dual_group(const TopAbGroup& g) { return DualGroup(g); }

/// f* : H* -> G*, chi -> chi o f.
inline Homomorphism dual_hom(const TopHom& f, const DualGroup& src_dual, const DualGroup& tgt_dual) {
  if (!is_continuous(f)) throw Error(ErrorKind::NotContinuous, "only continuous maps dualize");
  const FinAbGroup& G = f.source().group();
  const FinAbGroup& H = f.target().group();
  const Int eg = G.exponent();
  const Int eh = H.exponent();
  const FinAbGroup& D = tgt_dual.structure();
  std::vector<Index> gens(D.rank());
  for (std::size_t j = 0; j < D.rank(); ++j) {
    const Index k = tgt_dual.param(D.generator(j));
    std::vector<Int> vals(G.rank());
    for (std::size_t i = 0; i < G.rank(); ++i) {
      const Int v = character_value(H, k, f(G.generator(i)));
      if (v * eg % eh != 0) throw std::logic_error("pulled back character has the wrong order");
      vals[i] = v * eg / eh;
    }
    gens[j] = src_dual.index_of_values(vals);
  }
  return Homomorphism(D, src_dual.structure(), std::move(gens));
}

inline Homomorphism dual_hom(const TopHom& f) { return dual_hom(f, dual_group(f.source()), dual_group(f.target())); }

/// g -> (chi -> chi(g)), into the dual of the dual.
inline TopHom evaluation(const TopAbGroup& g, const DualGroup& d, const DualGroup& dd) {
  const FinAbGroup& G = g.group();
  const FinAbGroup& D = d.structure();
  const Int eg = G.exponent();
  const Int ed = D.exponent();
  std::vector<Index> gens(G.rank());
  for (std::size_t i = 0; i < G.rank(); ++i) {
    std::vector<Int> vals(D.rank());
    for (std::size_t j = 0; j < D.rank(); ++j) {
      const Int v = character_value(G, d.param(D.generator(j)), G.generator(i));
      if (v * ed % eg != 0) throw std::logic_error("evaluation character has the wrong order");
      vals[j] = v * ed / eg;
    }
    gens[i] = dd.index_of_values(vals);
  }
  return TopHom(Homomorphism(G, dd.structure(), std::move(gens)), g, dd.top());
}

inline TopHom evaluation(const TopAbGroup& g) {
  const DualGroup d = dual_group(g);
  return evaluation(g, d, dual_group(d.top()));
}

/// 0 -> B* -> G* -> A* -> 0 for a topological extension.
struct DualSequence {
  DualGroup A_dual, G_dual, B_dual;
  Homomorphism pi_dual;    // B* -> G*
  Homomorphism iota_dual;  // G* -> A*
  bool exact = false;
  bool topological = false;  // exact with continuous strict maps (all groups discrete)
  bool case_a = false;       // N_A trivial
  bool case_b = false;       // N_B trivial
};

inline DualSequence dual_extension(const Extension& e) {
  DualSequence out;
  out.A_dual = dual_group(e.A());
  out.G_dual = dual_group(e.G());
  out.B_dual = dual_group(e.B());
  out.pi_dual = dual_hom(e.pi(), out.G_dual, out.B_dual);
  out.iota_dual = dual_hom(e.iota(), out.A_dual, out.G_dual);
  out.exact = is_injective(out.pi_dual) && is_exact_at(out.pi_dual, out.iota_dual) && is_surjective(out.iota_dual);
  const TopHom p(out.pi_dual, out.B_dual.top(), out.G_dual.top());
  const TopHom i(out.iota_dual, out.G_dual.top(), out.A_dual.top());
  out.topological = out.exact && is_continuous(p) && is_strict(p) && is_continuous(i) && is_strict(i);
  out.case_a = e.A().core().is_trivial();
  out.case_b = e.B().core().is_trivial();
  return out;
}

inline bool duals_isomorphic(const TopAbGroup& g1, const TopAbGroup& g2) {
  return dual_group(g1).structure() == dual_group(g2).structure();
}

}  // namespace topab
