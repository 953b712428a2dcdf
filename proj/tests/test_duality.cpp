#include <gtest/gtest.h>

#include <map>
#include <set>

#include "oracles.hpp"
#include "topab/duality.hpp"
#include "topab/family.hpp"

using namespace topab;

namespace {

const FinAbGroup Z2 = make_group({2}), Z4 = make_group({4}), V4 = make_group({2, 2});

std::vector<TopAbGroup> topgroups(Int n) {
  std::vector<TopAbGroup> out;
  for (const auto& g : all_groups_up_to_order(n))
    for (const auto& s : all_subgroups(g)) out.emplace_back(g, s);
  return out;
}

std::vector<Int> invariants_of_characters(const std::vector<std::vector<Int>>& chars, Int e) {
  std::map<std::vector<Int>, Index> index;
  for (Index i = 0; i < chars.size(); ++i) index[chars[i]] = i;
  auto add = [&](Index a, Index b) {
    std::vector<Int> s(chars[a].size());
    for (std::size_t x = 0; x < s.size(); ++x) s[x] = (chars[a][x] + chars[b][x]) % e;
    return index.at(s);
  };
  const Index zero = index.at(std::vector<Int>(chars[0].size(), 0));
  std::vector<Int> orders;
  for (Index i = 0; i < chars.size(); ++i) orders.push_back(oracle::order_in(i, add, zero));
  return oracle::invariant_factors(orders);
}

bool same_fraction(Int a, Int da, Int b, Int db) { return (a * db - b * da) % (da * db) == 0; }

}  // namespace

TEST(DualGroup, Examples) {
  const DualGroup d4 = dual_group(TopAbGroup::discrete(Z4));
  EXPECT_EQ(d4.order(), 4u);
  EXPECT_EQ(d4.structure(), Z4);
  const DualGroup h4 = dual_group(TopAbGroup(Z4, Subgroup(Z4, {0, 2})));
  EXPECT_EQ(h4.order(), 2u);
  for (const auto& c : h4.characters()) EXPECT_EQ(c.values[2], 0);
  EXPECT_EQ(dual_group(TopAbGroup::indiscrete(V4)).order(), 1u);
  EXPECT_TRUE(h4.top().core().is_trivial());
}

TEST(DualGroup, MatchesBruteForceUpToOrder16) {
  for (const auto& t : topgroups(16)) {
    const DualGroup d = dual_group(t);
    const auto ref = oracle::continuous_characters(t);
    ASSERT_EQ(d.order() * t.core().size(), t.group().order());
    ASSERT_EQ(ref.size(), d.order());
    std::vector<std::vector<Int>> lib;
    for (const auto& c : d.characters()) {
      EXPECT_EQ(c.denominator, t.group().exponent());
      lib.push_back(c.values);
    }
    std::sort(lib.begin(), lib.end());
    ASSERT_EQ(lib, ref);
    ASSERT_EQ(d.structure().moduli(), invariants_of_characters(ref, t.group().exponent()));
    ASSERT_EQ(d.structure(), separation(t).group.group());
    // the structure index respects pointwise addition
    const Int e = t.group().exponent();
    for (Index y = 0; y < d.order(); ++y)
      for (Index z = 0; z < d.order(); ++z) {
        const auto s = d.character_at(d.structure().add(y, z)).values;
        const auto a = d.character_at(y).values, b = d.character_at(z).values;
        for (Index x = 0; x < t.group().order(); ++x) ASSERT_EQ(s[x], (a[x] + b[x]) % e);
      }
  }
}

TEST(DualHom, Examples) {
  const TopAbGroup d4 = TopAbGroup::discrete(Z4), d2 = TopAbGroup::discrete(Z2);
  EXPECT_EQ(dual_hom(identity(d4)), Homomorphism::identity(Z4));
  const Homomorphism p = dual_hom(TopHom(Homomorphism(Z4, Z2, std::vector<Index>{1}), d4, d2));
  EXPECT_EQ(p.source(), Z2);
  EXPECT_EQ(p.target(), Z4);
  EXPECT_TRUE(is_injective(p));
  EXPECT_EQ(dual_hom(TopHom(Homomorphism::zero(Z4, Z2), d4, d2)), Homomorphism::zero(Z2, Z4));
  try {
    dual_hom(TopHom(Homomorphism::identity(Z2), TopAbGroup::indiscrete(Z2), d2));
    FAIL() << "expected NotContinuous";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotContinuous);
  }
}

TEST(DualHom, IsPrecompositionAndDefinedIffContinuous) {
  const auto gs = topgroups(8);
  std::size_t checked = 0;
  for (const auto& g : gs)
    for (const auto& h : gs) {
      const DualGroup dg = dual_group(g), dh = dual_group(h);
      const auto og = oracle::open_masks(g.group(), g.core().elements());
      const auto oh = oracle::open_masks(h.group(), h.core().elements());
      for (const auto& f : all_homs(g.group(), h.group())) {
        const TopHom t(f, g, h);
        const bool cont = oracle::continuous(f, og, oh);
        Homomorphism d;
        try {
          d = dual_hom(t, dg, dh);
          ASSERT_TRUE(cont);
        } catch (const Error& e) {
          ASSERT_EQ(e.kind(), ErrorKind::NotContinuous);
          ASSERT_FALSE(cont);
          continue;
        }
        const Int eg = g.group().exponent(), eh = h.group().exponent();
        for (Index y = 0; y < dh.order(); ++y) {
          const auto chi = dh.character_at(y).values;
          const auto pulled = dg.character_at(d(y)).values;
          for (Index x = 0; x < g.group().order(); ++x) ASSERT_TRUE(same_fraction(pulled[x], eg, chi[f(x)], eh));
        }
        ++checked;
      }
    }
  EXPECT_GT(checked, 1000u);
}

TEST(DualHom, ContravariantFunctor) {
  const auto gs = topgroups(4);
  for (const auto& a : gs)
    for (const auto& b : gs)
      for (const auto& c : gs)
        for (const auto& f : all_homs(a.group(), b.group())) {
          const TopHom tf(f, a, b);
          if (!is_continuous(tf)) continue;
          for (const auto& g : all_homs(b.group(), c.group())) {
            const TopHom tg(g, b, c);
            if (!is_continuous(tg)) continue;
            EXPECT_EQ(dual_hom(compose(tg, tf)), compose(dual_hom(tf), dual_hom(tg)));
          }
        }
  for (const auto& a : gs) {
    const DualGroup d = dual_group(a);
    EXPECT_EQ(dual_hom(identity(a)), Homomorphism::identity(d.structure()));
  }
}

TEST(Evaluation, Examples) {
  const TopHom d = evaluation(TopAbGroup::discrete(Z4));
  EXPECT_TRUE(is_bijective(d.map()));
  const TopHom i = evaluation(TopAbGroup::indiscrete(V4));
  EXPECT_EQ(i.target().group().order(), 1u);
  const TopHom h = evaluation(TopAbGroup(Z4, Subgroup(Z4, {0, 2})));
  EXPECT_EQ(kernel(h.map()).elements(), (std::vector<Index>{0, 2}));
}

TEST(Evaluation, KernelIsCoreAndSeparationIsDoubleDual) {
  for (const auto& t : topgroups(16)) {
    const TopHom ev = evaluation(t);
    ASSERT_EQ(kernel(ev.map()), t.core());
    ASSERT_TRUE(is_surjective(ev.map()));
    ASSERT_TRUE(is_continuous(ev));
    // x is killed iff every continuous character vanishes at x
    const auto chars = oracle::continuous_characters(t);
    for (Index x = 0; x < t.group().order(); ++x) {
      bool all_zero = true;
      for (const auto& c : chars) all_zero = all_zero && c[x] == 0;
      ASSERT_EQ(all_zero, t.core().contains(x));
    }
    // induced map G_Haus -> G** is an isomorphism
    const Separation s = separation(t);
    const TopHom induced = separation_hom(ev, s, separation(ev.target()));
    ASSERT_TRUE(is_bijective(induced.map()));
    // q_G dualizes to an isomorphism
    ASSERT_TRUE(is_bijective(dual_hom(s.projection)));
  }
}

TEST(DualExtension, Examples) {
  const GroupExtension z4(Homomorphism(Z2, Z4, std::vector<Index>{2}), Homomorphism(Z4, Z2, std::vector<Index>{1}));
  const Extension d(z4, TopAbGroup::discrete(Z2), TopAbGroup::discrete(Z4), TopAbGroup::discrete(Z2));
  const DualSequence s = dual_extension(d);
  EXPECT_TRUE(s.exact);
  EXPECT_TRUE(s.topological);
  EXPECT_EQ(s.B_dual.structure(), Z2);
  EXPECT_EQ(s.G_dual.structure(), Z4);
  EXPECT_EQ(s.A_dual.structure(), Z2);
  EXPECT_TRUE(s.case_a && s.case_b);
  const FinAbGroup one;
  const GroupExtension e(Homomorphism::identity(Z2), Homomorphism::zero(Z2, one));
  const Extension x(e, TopAbGroup::indiscrete(Z2), TopAbGroup::indiscrete(Z2), TopAbGroup::discrete(one));
  const DualSequence sx = dual_extension(x);
  EXPECT_EQ(sx.A_dual.order(), 1u);
  EXPECT_TRUE(sx.exact);
  EXPECT_FALSE(sx.case_a);
  EXPECT_TRUE(sx.case_b);
}

TEST(DualExtension, ExactOnEveryTopologicalExtension) {
  std::size_t checked = 0;
  for (const auto& A : all_groups_up_to_order(4))
    for (const auto& B : all_groups_up_to_order(4))
      for (const auto& h : cocycle_class_representatives(A, B)) {
        const GroupExtension e = realize(h).extension;
        for (const auto& na : all_subgroups(A))
          for (const auto& nb : all_subgroups(B))
            for (const auto& ng : topological_extension_cores(e, na, nb)) {
              const Extension x(e, TopAbGroup(A, na), TopAbGroup(e.G(), ng), TopAbGroup(B, nb));
              const DualSequence s = dual_extension(x);
              EXPECT_TRUE(s.exact);
              EXPECT_TRUE(s.topological);
              EXPECT_EQ(s.A_dual.order() * s.B_dual.order(), s.G_dual.order());
              ++checked;
            }
      }
  EXPECT_GT(checked, 100u);
}

TEST(DualsIsomorphic, Examples) {
  const FinAbGroup one;
  EXPECT_FALSE(duals_isomorphic(TopAbGroup::discrete(one), TopAbGroup::discrete(Z2)));
  for (const auto& t : topgroups(8)) EXPECT_TRUE(duals_isomorphic(t, separation(t).group));
  // Nagao topologies with A discrete from different topologizing sections
  const GroupExtension v4(Homomorphism(Z2, V4, std::vector<Index>{2}), Homomorphism(V4, Z2, std::vector<Index>{0, 1}));
  const TopAbGroup a = TopAbGroup::discrete(Z2), b = TopAbGroup::indiscrete(Z2);
  const Extension n1 = nagao_topology(v4, Section{{0, 1}}, a, b);
  const Extension n2 = nagao_topology(v4, Section{{0, 3}}, a, b);
  EXPECT_FALSE(n1.G().core() == n2.G().core());
  EXPECT_TRUE(duals_isomorphic(n1.G(), n2.G()));
}
