#pragma once

// The snake sequence attached to separating a topological extension
//
//   0 -> A  -iota->  G  -pi->  B  -> 0
//        |f          |q_G      |q_B
//   0 -> K  ------> G_Haus --> B_Haus -> 0      K = ker pi_Haus
//
// giving 0 -> ker f -> cl{0_G} -> cl{0_B} -> coker f -> 0.

#include <array>
#include <stdexcept>
#include <vector>

#include "topab/extension.hpp"
#include "topab/topology.hpp"

namespace topab {

struct SnakeSequence {
  SubgroupStructure ker_f;         // inside A
  SubgroupStructure closure_g;     // N_G inside G
  SubgroupStructure closure_b;     // N_B inside B
  Quotient coker_f;                // K / f(A)
  Homomorphism f;                  // A -> K
  Homomorphism alpha;              // ker f -> N_G
  Homomorphism pi_restricted;      // N_G -> N_B
  Homomorphism connecting;         // N_B -> coker f
  std::array<bool, 4> exact_at{};  // at ker f, N_G, N_B, coker f
  bool exact = false;
};

inline SnakeSequence snake_haus_sequence(const Extension& e) {
  const GroupExtension& alg = e.algebraic();
  const Separation sg = separation(e.G());
  const Separation sb = separation(e.B());
  const TopHom pi_haus = separation_hom(e.pi(), sg, sb);

  SnakeSequence out;
  const SubgroupStructure k = structure_of(kernel(pi_haus.map()));
  out.f = corestrict(compose(sg.projection.map(), alg.iota()), k);
  out.ker_f = structure_of(kernel(out.f));
  out.closure_g = structure_of(e.G().core());
  out.closure_b = structure_of(e.B().core());
  out.coker_f = quotient(k.group, image(out.f));

  out.alpha = corestrict(compose(alg.iota(), out.ker_f.inclusion), out.closure_g);
  out.pi_restricted = corestrict(compose(alg.pi(), out.closure_g.inclusion), out.closure_b);

  // lift n to G, push to G_Haus (it lands in K), project to coker f
  const FinAbGroup& nb = out.closure_b.group;
  const FinAbGroup& G = alg.G();
  auto connect = [&](Index g) {
    const Index in_k = k.coords[sg.projection(g)];
    if (in_k == npos) throw std::logic_error("lift does not land in ker pi_Haus");
    return out.coker_f.projection(in_k);
  };
  std::vector<Index> gens(nb.rank());
  for (std::size_t i = 0; i < nb.rank(); ++i) {
    const Index target = out.closure_b.inclusion(nb.generator(i));
    Index value = npos;
    for (Index g = 0; g < G.order(); ++g) {
      if (alg.pi()(g) != target) continue;
      const Index v = connect(g);
      if (value == npos) value = v;
      else if (value != v) throw std::logic_error("connecting map depends on the lift");
    }
    gens[i] = value;
  }
  out.connecting = Homomorphism(nb, out.coker_f.group, std::move(gens));

  out.exact_at[0] = is_injective(out.alpha);
  out.exact_at[1] = is_exact_at(out.alpha, out.pi_restricted);
  out.exact_at[2] = is_exact_at(out.pi_restricted, out.connecting);
  out.exact_at[3] = is_surjective(out.connecting);
  out.exact = out.exact_at[0] && out.exact_at[1] && out.exact_at[2] && out.exact_at[3];
  return out;
}

}  // namespace topab
