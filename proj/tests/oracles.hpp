#pragma once

// Brute-force references used only by the tests. None of these call into the
// library's structural algorithms: they work on raw element sets and tables.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "topab/group.hpp"
#include "topab/topology.hpp"

namespace oracle {

using topab::Index;
using topab::Int;

/// Invariant factors from the multiset of element orders, via p-rank counts.
inline std::vector<Int> invariant_factors(const std::vector<Int>& orders) {
  const Int n = static_cast<Int>(orders.size());
  std::vector<Int> primes;
  Int m = n;
  for (Int p = 2; p * p <= m; ++p)
    if (m % p == 0) {
      primes.push_back(p);
      while (m % p == 0) m /= p;
    }
  if (m > 1) primes.push_back(m);
  // For each prime: exponents of the cyclic p-factors, largest first.
  std::vector<std::vector<Int>> parts;
  for (Int p : primes) {
    std::vector<Int> torsion;  // |{x : p^k x = 0}| for k = 0,1,...
    Int pk = 1;
    for (;;) {
      Int c = 0;
      for (Int o : orders)
        if (pk % o == 0) ++c;
      torsion.push_back(c);
      if (torsion.size() > 1 && torsion.back() == torsion[torsion.size() - 2]) break;
      pk *= p;
    }
    // number of factors of order >= p^k is log_p(t_k / t_{k-1})
    std::vector<Int> at_least;
    for (std::size_t k = 1; k < torsion.size(); ++k) {
      Int q = torsion[k] / torsion[k - 1], r = 0;
      while (q > 1) {
        q /= p;
        ++r;
      }
      at_least.push_back(r);
    }
    std::vector<Int> exps;
    for (std::size_t k = 0; k < at_least.size(); ++k) {
      const Int next = k + 1 < at_least.size() ? at_least[k + 1] : 0;
      for (Int c = 0; c < at_least[k] - next; ++c) exps.push_back(static_cast<Int>(k + 1));
    }
    std::sort(exps.rbegin(), exps.rend());
    std::vector<Int> powers;
    for (Int e : exps) {
      Int v = 1;
      for (Int i = 0; i < e; ++i) v *= p;
      powers.push_back(v);
    }
    parts.push_back(powers);
  }
  std::size_t len = 0;
  for (const auto& pp : parts) len = std::max(len, pp.size());
  std::vector<Int> out(len, 1);
  for (const auto& pp : parts)
    for (std::size_t i = 0; i < pp.size(); ++i) out[i] *= pp[i];
  std::reverse(out.begin(), out.end());
  return out;
}

inline std::vector<Int> invariant_factors(Index order, const std::function<Int(Index)>& element_order) {
  std::vector<Int> orders(order);
  for (Index x = 0; x < order; ++x) orders[x] = element_order(x);
  return invariant_factors(orders);
}

/// Order of x in a group given only by its addition function.
inline Int order_in(Index x, const std::function<Index(Index, Index)>& add, Index zero = 0) {
  Int k = 1;
  for (Index y = x; y != zero; y = add(y, x)) ++k;
  return k;
}

using Mask = std::uint64_t;

inline Mask bit(Index x) { return Mask{1} << x; }

/// Every subset U (as a mask) with U + N = U, for a group of order <= 20.
inline std::vector<Mask> open_masks(const topab::FinAbGroup& g, const std::vector<Index>& core) {
  const Index n = g.order();
  std::vector<Mask> out;
  for (Mask u = 0; u < (Mask{1} << n); ++u) {
    bool ok = true;
    for (Index x = 0; x < n && ok; ++x)
      if (u >> x & 1)
        for (Index c : core)
          if (!(u >> g.add(x, c) & 1)) {
            ok = false;
            break;
          }
    if (ok) out.push_back(u);
  }
  return out;
}

struct TopOracle {
  std::vector<Mask> src_opens, tgt_opens;
};

/// Preimage of every open is open.
inline bool continuous(const topab::Homomorphism& f, const std::vector<Mask>& src_opens,
                       const std::vector<Mask>& tgt_opens) {
  for (Mask v : tgt_opens) {
    Mask pre = 0;
    for (Index x = 0; x < f.source().order(); ++x)
      if (v >> f(x) & 1) pre |= bit(x);
    if (!std::binary_search(src_opens.begin(), src_opens.end(), pre)) return false;
  }
  return true;
}

/// Image of every open U equals image(f) ∩ V for some open V.
inline bool strict(const topab::Homomorphism& f, const std::vector<Mask>& src_opens,
                   const std::vector<Mask>& tgt_opens) {
  Mask img = 0;
  for (Index x = 0; x < f.source().order(); ++x) img |= bit(f(x));
  for (Mask u : src_opens) {
    Mask fu = 0;
    for (Index x = 0; x < f.source().order(); ++x)
      if (u >> x & 1) fu |= bit(f(x));
    bool found = false;
    for (Mask v : tgt_opens)
      if ((v & img) == fu) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

/// Closure of a set S: points all of whose open neighbourhoods meet S.
inline Mask closure(Mask s, Index n, const std::vector<Mask>& opens) {
  Mask out = 0;
  for (Index x = 0; x < n; ++x) {
    bool meets_all = true;
    for (Mask u : opens)
      if ((u >> x & 1) && !(u & s)) {
        meets_all = false;
        break;
      }
    if (meets_all) out |= bit(x);
  }
  return out;
}

/// Brute force: every additive map G -> (1/e)Z/Z killing the core, as a value table.
inline std::vector<std::vector<Int>> continuous_characters(const topab::TopAbGroup& t) {
  const topab::FinAbGroup& g = t.group();
  const Int e = g.exponent();
  std::vector<std::vector<Int>> out;
  std::vector<Int> v(g.rank(), 0);
  for (;;) {
    bool ok = true;
    for (std::size_t i = 0; i < g.rank(); ++i) ok = ok && (g.moduli()[i] * v[i]) % e == 0;
    if (ok) {
      std::vector<Int> table(g.order());
      for (Index x = 0; x < g.order(); ++x) {
        Int s = 0;
        for (std::size_t i = 0; i < g.rank(); ++i) s += g.coord(x, i) * v[i];
        table[x] = s % e;
      }
      bool kills = true;
      for (Index n : t.core().elements()) kills = kills && table[n] == 0;
      if (kills) out.push_back(table);
    }
    std::size_t i = 0;
    for (; i < g.rank(); ++i) {
      if (++v[i] < e) break;
      v[i] = 0;
    }
    if (i == g.rank()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace oracle
