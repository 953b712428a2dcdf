#pragma once

// Group topologies on finite abelian groups. Every such topology is the set
// of unions of cosets of one subgroup N, the open core (also the closure of
// zero), so a topological group is just a pair (G, N).

#include <algorithm>
#include <cstdint>
#include <vector>

#include "topab/group.hpp"

namespace topab {

class TopAbGroup {
 public:
  TopAbGroup() = default;
  TopAbGroup(FinAbGroup group, Subgroup core) : group_(std::move(group)), core_(std::move(core)) {
    if (!(core_.parent() == group_)) throw Error(ErrorKind::NotASubgroup, "open core belongs to another group");
  }

  static TopAbGroup discrete(const FinAbGroup& g) { return TopAbGroup(g, Subgroup::trivial(g)); }
  static TopAbGroup indiscrete(const FinAbGroup& g) { return TopAbGroup(g, Subgroup::whole(g)); }

  const FinAbGroup& group() const { return group_; }
  const Subgroup& core() const { return core_; }

  friend bool operator==(const TopAbGroup& a, const TopAbGroup& b) {
    return a.group_ == b.group_ && a.core_ == b.core_;
  }

 private:
  FinAbGroup group_;
  Subgroup core_;
};

class TopHom {
 public:
  TopHom() = default;
  TopHom(Homomorphism map, TopAbGroup source, TopAbGroup target)
      : map_(std::move(map)), source_(std::move(source)), target_(std::move(target)) {
    if (!(map_.source() == source_.group()) || !(map_.target() == target_.group()))
      throw Error(ErrorKind::CompositionMismatch, "hom does not match the topological groups");
  }

  const Homomorphism& map() const { return map_; }
  const TopAbGroup& source() const { return source_; }
  const TopAbGroup& target() const { return target_; }
  Index operator()(Index x) const { return map_(x); }

 private:
  Homomorphism map_;
  TopAbGroup source_;
  TopAbGroup target_;
};

inline TopHom compose(const TopHom& g, const TopHom& f) {
  return TopHom(compose(g.map(), f.map()), f.source(), g.target());
}

inline TopHom identity(const TopAbGroup& g) { return TopHom(Homomorphism::identity(g.group()), g, g); }

/// Cosets of the open core, each sorted, ordered by smallest element.
inline std::vector<std::vector<Index>> cosets(const TopAbGroup& g) {
  std::vector<bool> seen(g.group().order(), false);
  std::vector<std::vector<Index>> out;
  for (Index x = 0; x < g.group().order(); ++x) {
    if (seen[x]) continue;
    std::vector<Index> c;
    for (Index n : g.core().elements()) {
      const Index y = g.group().add(x, n);
      seen[y] = true;
      c.push_back(y);
    }
    std::sort(c.begin(), c.end());
    out.push_back(std::move(c));
  }
  return out;
}

/// Every open set: all unions of cosets of the core. Limited to 2^20 sets.
inline std::vector<std::vector<Index>> open_sets(const TopAbGroup& g) {
  const auto cs = cosets(g);
  if (cs.size() > 20) throw Error(ErrorKind::BudgetExceeded, "too many cosets to list open sets");
  std::vector<std::vector<Index>> out;
  for (std::uint32_t pick = 0; pick < (std::uint32_t{1} << cs.size()); ++pick) {
    std::vector<Index> u;
    for (std::size_t i = 0; i < cs.size(); ++i)
      if (pick >> i & 1) u.insert(u.end(), cs[i].begin(), cs[i].end());
    std::sort(u.begin(), u.end());
    out.push_back(std::move(u));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline bool is_continuous(const TopHom& f) {
  for (Index n : f.source().core().elements())
    if (!f.target().core().contains(f(n))) return false;
  return true;
}

/// f(N_src) = f(G) ∩ N_tgt. Only defined for continuous f.
inline bool is_strict(const TopHom& f) {
  if (!is_continuous(f)) throw Error(ErrorKind::NotContinuous, "strictness asked of a discontinuous map");
  const Subgroup img = image(f.map());
  const Subgroup lhs = image_of(f.map(), f.source().core());
  return lhs == intersection(img, f.target().core());
}

namespace detail {

inline bool set_is_open(const std::vector<std::vector<Index>>& opens, const std::vector<Index>& sorted) {
  return std::binary_search(opens.begin(), opens.end(), sorted);
}

}  // namespace detail

/// Preimage of every open set is open.
inline bool is_continuous_oracle(const TopHom& f) {
  const auto src_opens = open_sets(f.source());
  for (const auto& v : open_sets(f.target())) {
    std::vector<bool> in(f.target().group().order(), false);
    for (Index y : v) in[y] = true;
    std::vector<Index> pre;
    for (Index x = 0; x < f.source().group().order(); ++x)
      if (in[f(x)]) pre.push_back(x);
    if (!detail::set_is_open(src_opens, pre)) return false;
  }
  return true;
}

/// Image of every open set is open in the image, under the subspace topology.
inline bool is_strict_oracle(const TopHom& f) {
  if (!is_continuous_oracle(f)) throw Error(ErrorKind::NotContinuous, "strictness asked of a discontinuous map");
  const Subgroup img = image(f.map());
  const auto tgt_opens = open_sets(f.target());
  std::vector<std::vector<Index>> relative;
  for (const auto& v : tgt_opens) {
    std::vector<Index> r;
    for (Index y : v)
      if (img.contains(y)) r.push_back(y);
    relative.push_back(std::move(r));
  }
  std::sort(relative.begin(), relative.end());
  for (const auto& u : open_sets(f.source())) {
    std::vector<Index> fu;
    for (Index x : u) fu.push_back(f(x));
    std::sort(fu.begin(), fu.end());
    fu.erase(std::unique(fu.begin(), fu.end()), fu.end());
    if (!detail::set_is_open(relative, fu)) return false;
  }
  return true;
}

/// Closure of {0}: the intersection of all closed sets containing zero.
inline Subgroup closure_of_zero(const TopAbGroup& g) {
  const Index n = g.group().order();
  std::vector<bool> in(n, true);
  for (const auto& u : open_sets(g)) {
    std::vector<bool> open(n, false);
    for (Index x : u) open[x] = true;
    if (open[0]) continue;
    for (Index x = 0; x < n; ++x)
      if (open[x]) in[x] = false;
  }
  std::vector<Index> out;
  for (Index x = 0; x < n; ++x)
    if (in[x]) out.push_back(x);
  return Subgroup(g.group(), std::move(out));
}

inline bool is_hausdorff(const TopAbGroup& g) { return g.core().is_trivial(); }
inline bool is_discrete(const TopAbGroup& g) { return g.core().is_trivial(); }
inline bool is_indiscrete(const TopAbGroup& g) { return g.core().is_whole(); }

/// Every subgroup of finite index is open; here every subgroup has finite
/// index, so the core must sit inside each subgroup, the trivial one included.
inline bool has_property_P(const TopAbGroup& g) { return g.core().is_trivial(); }

struct Separation {
  TopAbGroup group;   // G / N, discrete
  TopHom projection;  // q_G
  Quotient quotient;
};

inline Separation separation(const TopAbGroup& g) {
  Quotient q = quotient(g.group(), g.core());
  TopAbGroup haus = TopAbGroup::discrete(q.group);
  TopHom proj(q.projection, g, haus);
  return Separation{haus, proj, std::move(q)};
}

/// The induced map G_Haus -> H_Haus. Needs only f(N_src) ⊆ N_tgt.
inline TopHom separation_hom(const TopHom& f, const Separation& src, const Separation& tgt) {
  const Homomorphism m = induced_on_quotients(f.map(), src.quotient, f.source().core(), tgt.quotient);
  return TopHom(m, src.group, tgt.group);
}

inline TopHom separation_hom(const TopHom& f) {
  return separation_hom(f, separation(f.source()), separation(f.target()));
}

inline TopAbGroup product_top(const TopAbGroup& g, const TopAbGroup& h) {
  std::vector<Int> moduli = g.group().moduli();
  moduli.insert(moduli.end(), h.group().moduli().begin(), h.group().moduli().end());
  FinAbGroup p(moduli);
  const Index hn = h.group().order();
  std::vector<Index> core;
  for (Index a : g.core().elements())
    for (Index b : h.core().elements()) core.push_back(a * hn + b);
  std::sort(core.begin(), core.end());
  return TopAbGroup(p, Subgroup::unchecked(p, std::move(core)));
}

struct Subspace {
  TopAbGroup group;
  TopHom inclusion;
  SubgroupStructure structure;
};

inline Subspace subspace(const TopAbGroup& g, const Subgroup& s) {
  if (!(s.parent() == g.group())) throw Error(ErrorKind::NotASubgroup, "subgroup of a different group");
  SubgroupStructure st = structure_of(s);
  const Subgroup open = intersection(s, g.core());
  std::vector<Index> core;
  for (Index x : open.elements()) core.push_back(st.coords[x]);
  std::sort(core.begin(), core.end());
  TopAbGroup top(st.group, Subgroup::unchecked(st.group, std::move(core)));
  TopHom inc(st.inclusion, top, g);
  return Subspace{top, inc, std::move(st)};
}

inline TopAbGroup subspace_top(const TopAbGroup& g, const Subgroup& s) { return subspace(g, s).group; }

struct QuotientSpace {
  TopAbGroup group;
  TopHom projection;
  Quotient quotient;
};

inline QuotientSpace quotient_space(const TopAbGroup& g, const Subgroup& k) {
  Quotient q = quotient(g.group(), k);
  TopAbGroup top(q.group, image_of(q.projection, g.core()));
  TopHom proj(q.projection, g, top);
  return QuotientSpace{top, proj, std::move(q)};
}

inline TopAbGroup quotient_top(const TopAbGroup& g, const Subgroup& k) { return quotient_space(g, k).group; }

}  // namespace topab
