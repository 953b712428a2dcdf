#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "topab/family.hpp"
#include "topab/group.hpp"

using namespace topab;

namespace {

Element el(std::vector<Int> c) { return Element{std::move(c)}; }

std::vector<Element> elements_of(const Subgroup& s) {
  std::vector<Element> out;
  for (Index x : s.elements()) out.push_back(s.parent().element(x));
  return out;
}

}  // namespace

TEST(MakeGroup, Examples) {
  auto t = make_group({});
  EXPECT_EQ(t.order(), 1u);
  EXPECT_EQ(t.exponent(), 1);
  auto k = make_group({2, 2});
  EXPECT_EQ(k.order(), 4u);
  EXPECT_EQ(k.exponent(), 2);
  auto c = make_group({4});
  EXPECT_EQ(c.order(), 4u);
  EXPECT_EQ(c.exponent(), 4);
}

TEST(MakeGroup, RejectsNonPositive) {
  try {
    make_group({2, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonPositiveModulus);
  }
  EXPECT_THROW(make_group({-3}), Error);
}

TEST(MakeGroup, IndexOrderIsLexicographic) {
  auto g = make_group({2, 3, 2});
  for (Index x = 0; x + 1 < g.order(); ++x) EXPECT_LT(g.element(x), g.element(x + 1));
  for (Index x = 0; x < g.order(); ++x) EXPECT_EQ(g.index_of(g.element(x)), x);
  EXPECT_THROW(g.index_of(el({0, 3, 0})), Error);
  EXPECT_THROW(g.index_of(el({0, 1})), Error);
}

TEST(SubgroupGenerated, Examples) {
  auto z4 = make_group({4});
  EXPECT_EQ(elements_of(subgroup_generated(z4, {el({2})})), (std::vector<Element>{el({0}), el({2})}));
  EXPECT_EQ(elements_of(subgroup_generated(z4, {})), (std::vector<Element>{el({0})}));
  auto v = make_group({2, 2});
  EXPECT_EQ(subgroup_generated(v, {el({1, 0}), el({0, 1})}).size(), 4u);
  EXPECT_THROW(subgroup_generated(z4, {el({4})}), Error);
}

TEST(SubgroupGenerated, Idempotent) {
  for (const auto& g : all_groups_up_to_order(16))
    for (const auto& s : all_subgroups(g)) EXPECT_EQ(subgroup_generated(g, elements_of(s)), s);
}

TEST(SubgroupCtor, RejectsNonSubgroups) {
  auto z4 = make_group({4});
  try {
    Subgroup(z4, {0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotASubgroup);
  }
  EXPECT_THROW(Subgroup(z4, {2}), Error);
}

TEST(MakeHom, Examples) {
  auto z2 = make_group({2});
  auto z4 = make_group({4});
  try {
    make_hom(z2, z4, {el({1})});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IllDefined);
  }
  auto f = make_hom(z2, z4, {el({2})});
  EXPECT_EQ(elements_of(image(f)), (std::vector<Element>{el({0}), el({2})}));
  auto g = make_hom(z4, z2, {el({1})});
  EXPECT_TRUE(is_surjective(g));
  EXPECT_EQ(elements_of(kernel(g)), (std::vector<Element>{el({0}), el({2})}));
}

TEST(MakeHom, TablesAreAdditiveExhaustively) {
  const auto groups = all_groups_up_to_order(8);
  for (const auto& g : groups)
    for (const auto& h : groups)
      for (const auto& f : all_homs(g, h))
        for (Index x = 0; x < g.order(); ++x)
          for (Index y = 0; y < g.order(); ++y) ASSERT_EQ(f(g.add(x, y)), h.add(f(x), f(y)));
}

TEST(Compose, MismatchAndValues) {
  auto z2 = make_group({2});
  auto z4 = make_group({4});
  auto f = make_hom(z2, z4, {el({2})});
  auto g = make_hom(z4, z2, {el({1})});
  EXPECT_TRUE(is_bijective(compose(Homomorphism::identity(z4), Homomorphism::identity(z4))));
  EXPECT_EQ(compose(g, f), Homomorphism::zero(z2, z2));
  try {
    compose(f, f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CompositionMismatch);
  }
}

TEST(Quotient, Examples) {
  auto z4 = make_group({4});
  auto q = quotient(z4, Subgroup(z4, {0, 2}));
  EXPECT_EQ(q.group.moduli(), (std::vector<Int>{2}));
  EXPECT_EQ(q.projection(1), 1u);
  auto v = make_group({2, 2});
  auto t = quotient(v, Subgroup::trivial(v));
  EXPECT_EQ(t.group.order(), 4u);
  EXPECT_TRUE(is_bijective(t.projection));
}

TEST(Quotient, OrderKernelAndCanonicalForm) {
  for (const auto& g : all_groups_up_to_order(24)) {
    for (const auto& k : all_subgroups(g)) {
      auto q = quotient(g, k);
      ASSERT_EQ(q.group.order() * k.size(), g.order());
      ASSERT_EQ(kernel(q.projection), k);
      ASSERT_TRUE(is_surjective(q.projection));
      std::vector<Int> coset_orders;
      for (Index x = 0; x < g.order(); ++x) {
        bool is_rep = true;
        for (Index y : k.elements())
          if (g.add(x, y) < x) is_rep = false;
        if (!is_rep) continue;
        Int n = 1;
        for (Index y = x; !k.contains(y); y = g.add(y, x)) ++n;
        coset_orders.push_back(n);
      }
      ASSERT_EQ(q.group.moduli(), oracle::invariant_factors(coset_orders));
      for (std::size_t i = 0; i < q.lifts.size(); ++i) ASSERT_EQ(q.projection(q.lifts[i]), q.group.generator(i));
    }
  }
}

TEST(Quotient, ChainsFactor) {
  for (const auto& g : all_groups_up_to_order(16)) {
    const auto subs = all_subgroups(g);
    for (const auto& k : subs)
      for (const auto& l : subs) {
        if (!k.is_subset_of(l)) continue;
        auto qk = quotient(g, k);
        auto ql = quotient(g, l);
        auto induced = induced_on_quotients(Homomorphism::identity(g), qk, k, ql);
        ASSERT_EQ(compose(induced, qk.projection), ql.projection);
      }
  }
}

TEST(StructureOf, InclusionIsInjectiveOntoSubgroup) {
  for (const auto& g : all_groups_up_to_order(24))
    for (const auto& s : all_subgroups(g)) {
      auto st = structure_of(s);
      ASSERT_EQ(st.group.order(), s.size());
      ASSERT_TRUE(is_injective(st.inclusion));
      ASSERT_EQ(image(st.inclusion), s);
      for (Index y = 0; y < st.group.order(); ++y) ASSERT_EQ(st.coords[st.inclusion(y)], y);
    }
}

TEST(CanonicalForm, NonCanonicalInputs) {
  EXPECT_EQ(canonical_form(make_group({2, 3})).group.moduli(), (std::vector<Int>{6}));
  EXPECT_EQ(canonical_form(make_group({4, 2})).group.moduli(), (std::vector<Int>{2, 4}));
  EXPECT_EQ(canonical_form(make_group({6, 4, 1})).group.moduli(), (std::vector<Int>{2, 12}));
  EXPECT_EQ(canonical_form(make_group({1, 1})).group.moduli(), (std::vector<Int>{}));
  EXPECT_TRUE(isomorphic(make_group({3, 5}), make_group({15})));
  EXPECT_FALSE(isomorphic(make_group({2, 2}), make_group({4})));
}

TEST(CanonicalForm, RandomMultiFactor) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Int> moduli;
    Int order = 1;
    const int rank = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < rank; ++i) {
      const Int m = 1 + static_cast<Int>(rng() % 12);
      if (order * m > 4096) break;
      order *= m;
      moduli.push_back(m);
    }
    auto g = make_group(moduli);
    auto c = canonical_form(g);
    ASSERT_TRUE(is_bijective(c.projection));
    ASSERT_EQ(c.group.moduli(),
              oracle::invariant_factors(g.order(), [&](Index x) { return g.element_order(x); }));
  }
}

TEST(IsExactAt, Examples) {
  auto z2 = make_group({2});
  auto z4 = make_group({4});
  auto i = make_hom(z2, z4, {el({2})});
  auto p = make_hom(z4, z2, {el({1})});
  EXPECT_TRUE(is_exact_at(i, p));
  auto zero = Homomorphism::zero(z2, z2);
  auto id = Homomorphism::identity(z2);
  EXPECT_TRUE(is_exact_at(zero, id));
  EXPECT_FALSE(is_exact_at(zero, zero));
  EXPECT_FALSE(is_exact_at(id, id));
  EXPECT_THROW(is_exact_at(i, i), Error);
}

TEST(FromTable, RejectsNonAdditive) {
  auto z4 = make_group({4});
  EXPECT_THROW(Homomorphism::from_table(z4, z4, {0, 1, 3, 2}), Error);
  auto f = Homomorphism::from_table(z4, z4, {0, 3, 2, 1});
  EXPECT_EQ(f, make_hom(z4, z4, {el({3})}));
}
