#pragma once

// Enumeration of small instances: groups up to isomorphism, homomorphisms,
// and factor sets (exhaustive, by cohomology class, or sampled).

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "topab/extension.hpp"
#include "topab/group.hpp"

namespace topab {

namespace detail {

inline std::vector<std::pair<Int, int>> factorize(Int n) {
  std::vector<std::pair<Int, int>> out;
  for (Int p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      int e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      out.emplace_back(p, e);
    }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

/// Partitions of n, parts descending, in reverse lexicographic order ([n] first).
inline std::vector<std::vector<int>> partitions(int n, int max_part) {
  if (n == 0) return {{}};
  std::vector<std::vector<int>> out;
  for (int first = std::min(n, max_part); first >= 1; --first)
    for (auto& rest : partitions(n - first, first)) {
      rest.insert(rest.begin(), first);
      out.push_back(std::move(rest));
    }
  return out;
}

}  // namespace detail

/// One group per isomorphism class of order <= n, in invariant-factor form,
/// ordered by order, then rank, then moduli.
inline std::vector<FinAbGroup> all_groups_up_to_order(Int n) {
  std::vector<FinAbGroup> out;
  for (Int order = 1; order <= n; ++order) {
    const auto f = detail::factorize(order);
    std::vector<std::vector<Int>> forms{{}};
    for (const auto& [p, e] : f) {
      std::vector<std::vector<Int>> next;
      for (const auto& form : forms)
        for (const auto& part : detail::partitions(e, e)) {
          // part is descending; invariant factors are built largest first
          std::vector<Int> merged(std::max(form.size(), part.size()), 1);
          for (std::size_t i = 0; i < form.size(); ++i) merged[i] *= form[i];
          for (std::size_t i = 0; i < part.size(); ++i) {
            Int v = 1;
            for (int k = 0; k < part[i]; ++k) v *= p;
            merged[i] *= v;
          }
          next.push_back(std::move(merged));
        }
      forms = std::move(next);
    }
    for (auto& form : forms) std::reverse(form.begin(), form.end());
    std::sort(forms.begin(), forms.end(), [](const auto& a, const auto& b) {
      return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    for (auto& form : forms) out.emplace_back(std::move(form));
  }
  return out;
}

/// Every homomorphism G -> H, lexicographic in the generator images.
inline std::vector<Homomorphism> all_homs(const FinAbGroup& g, const FinAbGroup& h) {
  std::vector<std::vector<Index>> choices(g.rank());
  for (std::size_t i = 0; i < g.rank(); ++i)
    for (Index y = 0; y < h.order(); ++y)
      if (h.mul(g.moduli()[i], y) == 0) choices[i].push_back(y);
  std::vector<Homomorphism> out;
  std::vector<std::size_t> pos(g.rank(), 0);
  for (;;) {
    std::vector<Index> imgs(g.rank());
    for (std::size_t i = 0; i < g.rank(); ++i) imgs[i] = choices[i][pos[i]];
    out.emplace_back(g, h, std::move(imgs));
    std::size_t i = g.rank();
    while (i > 0) {
      --i;
      if (++pos[i] < choices[i].size()) break;
      pos[i] = 0;
      if (i == 0) return out;
    }
    if (g.rank() == 0) return out;
  }
}

inline constexpr double kCocycleBudget = 1e6;

/// Every normalized symmetric cocycle, by exhaustive search over symmetric
/// normalized tables, lexicographic in the entries h(b,c), 0 < b <= c.
/// Throws BudgetExceeded above |A|^((|B|-1)^2) = 10^6 candidate tables.
inline std::vector<FactorSet> all_cocycles(const FinAbGroup& A, const FinAbGroup& B) {
  const Index n = B.order();
  double candidates = 1;
  for (Index i = 0; i < (n - 1) * (n - 1); ++i) candidates *= A.order();
  if (candidates > kCocycleBudget)
    throw Error(ErrorKind::BudgetExceeded, "cocycle table space exceeds the enumeration budget");
  std::vector<std::pair<Index, Index>> slots;
  for (Index b = 1; b < n; ++b)
    for (Index c = b; c < n; ++c) slots.emplace_back(b, c);
  std::vector<FactorSet> out;
  FactorSet h = FactorSet::zero(A, B);
  // Backtracking; a triple is checked as soon as all its entries are set.
  std::vector<std::size_t> slot_of(static_cast<std::size_t>(n) * n, 0);
  for (std::size_t k = 0; k < slots.size(); ++k) {
    slot_of[slots[k].first * n + slots[k].second] = k + 1;
    slot_of[slots[k].second * n + slots[k].first] = k + 1;
  }
  auto ready = [&](Index b, Index c, std::size_t filled) { return slot_of[b * n + c] <= filled; };
  std::function<void(std::size_t)> go = [&](std::size_t k) {
    for (Index b = 0; b < n; ++b)
      for (Index c = 0; c < n; ++c)
        for (Index d = 0; d < n; ++d) {
          const Index bc = B.add(b, c), cd = B.add(c, d);
          if (!ready(b, c, k) || !ready(bc, d, k) || !ready(c, d, k) || !ready(b, cd, k)) continue;
          if (A.add(h(b, c), h(bc, d)) != A.add(h(c, d), h(b, cd))) return;
        }
    if (k == slots.size()) {
      out.push_back(h);
      return;
    }
    const auto [b, c] = slots[k];
    for (Index a = 0; a < A.order(); ++a) {
      h.at(b, c) = a;
      h.at(c, b) = a;
      go(k + 1);
    }
    h.at(b, c) = 0;
    h.at(c, b) = 0;
  };
  go(0);
  return out;
}

/// delta c (b,b') = c(b) + c(b') - c(b+b'), for c: B -> A with c(0) = 0.
inline FactorSet coboundary(const FinAbGroup& A, const FinAbGroup& B, const std::vector<Index>& c) {
  FactorSet h = FactorSet::zero(A, B);
  for (Index b = 0; b < B.order(); ++b)
    for (Index d = 0; d < B.order(); ++d) h.at(b, d) = A.sub(A.add(c[b], c[d]), c[B.add(b, d)]);
  return h;
}

inline FactorSet add_factor_sets(const FactorSet& x, const FactorSet& y) {
  FactorSet out = x;
  for (std::size_t i = 0; i < out.table.size(); ++i) out.table[i] = x.A.add(x.table[i], y.table[i]);
  return out;
}

/// Carry cocycle: h(b,b') = sum_j [b_j + b'_j >= m_j] a_j, with a_j in A.
inline FactorSet carry_cocycle(const FinAbGroup& A, const FinAbGroup& B, const std::vector<Index>& a) {
  FactorSet h = FactorSet::zero(A, B);
  for (Index b = 0; b < B.order(); ++b)
    for (Index d = 0; d < B.order(); ++d) {
      Index v = 0;
      for (std::size_t j = 0; j < B.rank(); ++j)
        if (B.coord(b, j) + B.coord(d, j) >= B.moduli()[j]) v = A.add(v, a[j]);
      h.at(b, d) = v;
    }
  return h;
}

/// One cocycle per cohomology class: carry cocycles with a_j running over
/// the smallest representatives of A / m_j A.
inline std::vector<FactorSet> cocycle_class_representatives(const FinAbGroup& A, const FinAbGroup& B) {
  std::vector<std::vector<Index>> reps(B.rank());
  for (std::size_t j = 0; j < B.rank(); ++j) {
    std::vector<bool> in_mA(A.order(), false);
    for (Index x = 0; x < A.order(); ++x) in_mA[A.mul(B.moduli()[j], x)] = true;
    std::vector<bool> covered(A.order(), false);
    for (Index x = 0; x < A.order(); ++x) {
      if (covered[x]) continue;
      reps[j].push_back(x);
      for (Index y = 0; y < A.order(); ++y)
        if (in_mA[y]) covered[A.add(x, y)] = true;
    }
  }
  std::vector<FactorSet> out;
  std::vector<std::size_t> pos(B.rank(), 0);
  for (;;) {
    std::vector<Index> a(B.rank());
    for (std::size_t j = 0; j < B.rank(); ++j) a[j] = reps[j][pos[j]];
    out.push_back(carry_cocycle(A, B, a));
    std::size_t j = B.rank();
    bool done = true;
    while (j > 0) {
      --j;
      if (++pos[j] < reps[j].size()) {
        done = false;
        break;
      }
      pos[j] = 0;
    }
    if (done) return out;
  }
}

/// Every cocycle, as class representative plus coboundary, deduplicated and
/// sorted by table. Agrees with all_cocycles where both run.
inline std::vector<FactorSet> all_cocycles_constructive(const FinAbGroup& A, const FinAbGroup& B) {
  const auto reps = cocycle_class_representatives(A, B);
  std::vector<std::vector<Index>> tables;
  const Index n = B.order();
  std::vector<Index> c(n, 0);
  for (;;) {
    const FactorSet d = coboundary(A, B, c);
    for (const auto& r : reps) tables.push_back(add_factor_sets(r, d).table);
    Index b = n - 1;
    for (; b >= 1; --b) {
      if (++c[b] < A.order()) break;
      c[b] = 0;
    }
    if (b == 0) break;
  }
  std::sort(tables.begin(), tables.end());
  tables.erase(std::unique(tables.begin(), tables.end()), tables.end());
  std::vector<FactorSet> out;
  for (auto& t : tables) out.push_back(FactorSet{A, B, std::move(t)});
  return out;
}

/// Uniform sample: a random class representative plus a random coboundary.
inline FactorSet sample_cocycle(const FinAbGroup& A, const FinAbGroup& B, std::mt19937_64& rng) {
  const auto reps = cocycle_class_representatives(A, B);
  std::vector<Index> c(B.order(), 0);
  for (Index b = 1; b < B.order(); ++b) c[b] = static_cast<Index>(rng() % A.order());
  const auto& r = reps[rng() % reps.size()];
  return add_factor_sets(r, coboundary(A, B, c));
}

/// All cocycles when within budget, otherwise `samples` seeded draws.
struct CocycleFamily {
  std::vector<FactorSet> cocycles;
  bool sampled = false;
};

inline CocycleFamily cocycle_family(const FinAbGroup& A, const FinAbGroup& B, std::size_t samples, std::uint64_t seed) {
  try {
    return {all_cocycles(A, B), false};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::BudgetExceeded) throw;
  }
  std::mt19937_64 rng(seed);
  CocycleFamily out{{}, true};
  for (std::size_t i = 0; i < samples; ++i) out.cocycles.push_back(sample_cocycle(A, B, rng));
  return out;
}

}  // namespace topab
