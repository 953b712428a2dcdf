#pragma once

// Extensions 0 -> A -> G -> B -> 0, factor sets, twisted groups A x_h B,
// sections, and the topologies sections induce on the middle term.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "topab/group.hpp"
#include "topab/topology.hpp"

namespace topab {

/// Normalized symmetric 2-cocycle h: B x B -> A, stored row-major.
struct FactorSet {
  FinAbGroup A;
  FinAbGroup B;
  std::vector<Index> table;

  static FactorSet zero(const FinAbGroup& a, const FinAbGroup& b) {
    return FactorSet{a, b, std::vector<Index>(static_cast<std::size_t>(b.order()) * b.order(), 0)};
  }

  Index operator()(Index b, Index c) const { return table[static_cast<std::size_t>(b) * B.order() + c]; }
  Index& at(Index b, Index c) { return table[static_cast<std::size_t>(b) * B.order() + c]; }

  friend bool operator==(const FactorSet&, const FactorSet&) = default;
};

struct CocycleCheck {
  bool ok = true;
  std::string reason;
  std::vector<Index> where;  // first offending pair or triple

  explicit operator bool() const { return ok; }
};

inline CocycleCheck validate_cocycle(const FactorSet& h) {
  const Index n = h.B.order();
  const FinAbGroup& A = h.A;
  const FinAbGroup& B = h.B;
  if (h.table.size() != static_cast<std::size_t>(n) * n) return {false, "table size", {}};
  for (Index v : h.table)
    if (v >= A.order()) return {false, "value outside A", {}};
  for (Index b = 0; b < n; ++b)
    if (h(b, 0) != 0 || h(0, b) != 0) return {false, "normalization", {b}};
  for (Index b = 0; b < n; ++b)
    for (Index c = 0; c < n; ++c)
      if (h(b, c) != h(c, b)) return {false, "symmetry", {b, c}};
  for (Index b = 0; b < n; ++b)
    for (Index c = 0; c < n; ++c)
      for (Index d = 0; d < n; ++d) {
        const Index lhs = A.add(h(b, c), h(B.add(b, c), d));
        const Index rhs = A.add(h(c, d), h(b, B.add(c, d)));
        if (lhs != rhs) return {false, "cocycle identity", {b, c, d}};
      }
  return {};
}

/// A x B under (a,b) + (a',b') = (a+a'+h(b,b'), b+b'). Elements are pair
/// indices a*|B| + b, i.e. indices of the product group A x B.
class TwistedGroup {
 public:
  explicit TwistedGroup(FactorSet h) : h_(std::move(h)) {
    const auto check = validate_cocycle(h_);
    if (!check) throw Error(ErrorKind::InvalidCocycle, check.reason);
    const Index n = order();
    std::vector<Index> gens;
    for (std::size_t i = 0; i < h_.A.rank(); ++i)
      if (h_.A.moduli()[i] > 1) gens.push_back(pair(h_.A.generator(i), 0));
    for (std::size_t i = 0; i < h_.B.rank(); ++i)
      if (h_.B.moduli()[i] > 1) gens.push_back(pair(0, h_.B.generator(i)));
    const auto st = detail::compute_structure(
        n, [&](Index x, Index y) { return add(x, y); }, [](Index x) { return x; }, gens);
    structure_ = FinAbGroup(st.invariants);
    to_structure_ = st.canon;
    from_structure_.assign(n, 0);
    for (Index x = 0; x < n; ++x) from_structure_[to_structure_[x]] = x;
  }

  const FactorSet& factor_set() const { return h_; }
  const FinAbGroup& A() const { return h_.A; }
  const FinAbGroup& B() const { return h_.B; }
  Index order() const { return h_.A.order() * h_.B.order(); }

  Index pair(Index a, Index b) const { return a * h_.B.order() + b; }
  Index a_of(Index x) const { return x / h_.B.order(); }
  Index b_of(Index x) const { return x % h_.B.order(); }

  Index add(Index x, Index y) const {
    const Index a = h_.A.add(h_.A.add(a_of(x), a_of(y)), h_(b_of(x), b_of(y)));
    return pair(a, h_.B.add(b_of(x), b_of(y)));
  }
  Index neg(Index x) const {
    const Index b = b_of(x);
    const Index nb = h_.B.neg(b);
    // (a,b) + (a',-b) = (a + a' + h(b,-b), 0)
    return pair(h_.A.neg(h_.A.add(a_of(x), h_(b, nb))), nb);
  }

  /// Canonical invariant-factor group isomorphic to this one.
  const FinAbGroup& structure() const { return structure_; }
  Index to_structure(Index x) const { return to_structure_[x]; }
  Index from_structure(Index y) const { return from_structure_[y]; }

  /// a -> (a,0), as a hom into the canonical structure.
  Homomorphism inclusion() const {
    std::vector<Index> gens(h_.A.rank());
    for (std::size_t i = 0; i < gens.size(); ++i) gens[i] = to_structure(pair(h_.A.generator(i), 0));
    return Homomorphism(h_.A, structure_, std::move(gens));
  }

  /// (a,b) -> b, from the canonical structure.
  Homomorphism projection() const {
    std::vector<Index> gens(structure_.rank());
    for (std::size_t i = 0; i < gens.size(); ++i) gens[i] = b_of(from_structure(structure_.generator(i)));
    return Homomorphism(structure_, h_.B, std::move(gens));
  }

 private:
  FactorSet h_;
  FinAbGroup structure_;
  std::vector<Index> to_structure_;
  std::vector<Index> from_structure_;
};

inline TwistedGroup twisted_group(const FinAbGroup& A, const FinAbGroup& B, const FactorSet& h) {
  if (!(h.A == A) || !(h.B == B)) throw Error(ErrorKind::InvalidCocycle, "factor set has other groups");
  return TwistedGroup(h);
}

/// Algebraic extension 0 -> A -iota-> G -pi-> B -> 0.
class GroupExtension {
 public:
  GroupExtension() = default;
  GroupExtension(Homomorphism iota, Homomorphism pi) : iota_(std::move(iota)), pi_(std::move(pi)) {
    if (!(iota_.target() == pi_.source())) throw Error(ErrorKind::NotAnExtension, "iota and pi do not compose");
    if (!is_injective(iota_)) throw Error(ErrorKind::NotAnExtension, "iota is not injective");
    if (!is_surjective(pi_)) throw Error(ErrorKind::NotAnExtension, "pi is not surjective");
    if (!is_exact_at(iota_, pi_)) throw Error(ErrorKind::NotAnExtension, "not exact at the middle");
    iota_inv_.assign(G().order(), npos);
    for (Index a = 0; a < A().order(); ++a) iota_inv_[iota_(a)] = a;
  }

  const FinAbGroup& A() const { return iota_.source(); }
  const FinAbGroup& G() const { return iota_.target(); }
  const FinAbGroup& B() const { return pi_.target(); }
  const Homomorphism& iota() const { return iota_; }
  const Homomorphism& pi() const { return pi_; }

  /// npos outside the image of iota.
  Index iota_inverse(Index g) const { return iota_inv_[g]; }

 private:
  Homomorphism iota_;
  Homomorphism pi_;
  std::vector<Index> iota_inv_;
};

/// A topological extension: iota and pi continuous and strict.
class Extension {
 public:
  Extension() = default;
  Extension(GroupExtension alg, TopAbGroup A, TopAbGroup G, TopAbGroup B)
      : alg_(std::move(alg)), A_(std::move(A)), G_(std::move(G)), B_(std::move(B)) {
    if (!(A_.group() == alg_.A()) || !(G_.group() == alg_.G()) || !(B_.group() == alg_.B()))
      throw Error(ErrorKind::NotAnExtension, "topologies sit on other groups");
    const TopHom i = iota();
    const TopHom p = pi();
    if (!is_continuous(i) || !is_strict(i)) throw Error(ErrorKind::NotAnExtension, "iota is not a topological embedding");
    if (!is_continuous(p) || !is_strict(p)) throw Error(ErrorKind::NotAnExtension, "pi is not a quotient map");
  }

  const GroupExtension& algebraic() const { return alg_; }
  const TopAbGroup& A() const { return A_; }
  const TopAbGroup& G() const { return G_; }
  const TopAbGroup& B() const { return B_; }
  TopHom iota() const { return TopHom(alg_.iota(), A_, G_); }
  TopHom pi() const { return TopHom(alg_.pi(), G_, B_); }

 private:
  GroupExtension alg_;
  TopAbGroup A_;
  TopAbGroup G_;
  TopAbGroup B_;
};

/// True when the cores make 0 -> A -> G -> B -> 0 a topological extension.
inline bool is_topological_extension(const GroupExtension& e, const Subgroup& na, const Subgroup& ng,
                                     const Subgroup& nb) {
  for (Index a = 0; a < e.A().order(); ++a)
    if (na.contains(a) != ng.contains(e.iota()(a))) return false;
  std::vector<bool> hit(e.B().order(), false);
  Index count = 0;
  for (Index g : ng.elements()) {
    const Index b = e.pi()(g);
    if (!nb.contains(b)) return false;
    if (!hit[b]) {
      hit[b] = true;
      ++count;
    }
  }
  return count == nb.size();
}

/// Every core on G making the sequence a topological extension.
inline std::vector<Subgroup> topological_extension_cores(const GroupExtension& e, const Subgroup& na,
                                                         const Subgroup& nb) {
  std::vector<Subgroup> out;
  for (auto& s : all_subgroups(e.G()))
    if (is_topological_extension(e, na, s, nb)) out.push_back(std::move(s));
  return out;
}

struct Section {
  std::vector<Index> table;  // b -> s(b) in G

  Index operator()(Index b) const { return table[b]; }
  friend bool operator==(const Section&, const Section&) = default;
};

inline void validate_section(const GroupExtension& e, const Section& s) {
  if (s.table.size() != e.B().order()) throw Error(ErrorKind::InvalidSection, "table size differs from |B|");
  if (s(0) != 0) throw Error(ErrorKind::InvalidSection, "s(0) must be 0");
  for (Index b = 0; b < e.B().order(); ++b) {
    if (s(b) >= e.G().order()) throw Error(ErrorKind::InvalidSection, "value outside G");
    if (e.pi()(s(b)) != b) throw Error(ErrorKind::InvalidSection, "pi(s(b)) != b for b = " + std::to_string(b));
  }
}

/// Fibers of pi, each in index order.
inline std::vector<std::vector<Index>> fibers(const GroupExtension& e) {
  std::vector<std::vector<Index>> out(e.B().order());
  for (Index g = 0; g < e.G().order(); ++g) out[e.pi()(g)].push_back(g);
  return out;
}

/// Visits every section in lexicographic order of (s(1), s(2), ...).
template <class Fn>
void for_each_section(const GroupExtension& e, Fn&& fn) {
  const auto fib = fibers(e);
  const Index n = e.B().order();
  Section s{std::vector<Index>(n, 0)};
  std::vector<std::size_t> pos(n, 0);
  for (Index b = 1; b < n; ++b) s.table[b] = fib[b][0];
  for (;;) {
    fn(static_cast<const Section&>(s));
    Index b = n - 1;
    for (; b >= 1; --b) {
      if (++pos[b] < fib[b].size()) {
        s.table[b] = fib[b][pos[b]];
        break;
      }
      pos[b] = 0;
      s.table[b] = fib[b][0];
    }
    if (b == 0) return;
  }
}

inline std::vector<Section> enumerate_sections(const GroupExtension& e) {
  std::vector<Section> out;
  for_each_section(e, [&](const Section& s) { out.push_back(s); });
  return out;
}

inline FactorSet factor_set_from_section(const GroupExtension& e, const Section& s) {
  validate_section(e, s);
  const FinAbGroup& G = e.G();
  const FinAbGroup& B = e.B();
  FactorSet h = FactorSet::zero(e.A(), B);
  for (Index b = 0; b < B.order(); ++b)
    for (Index c = 0; c < B.order(); ++c) {
      const Index g = G.sub(G.add(s(b), s(c)), s(B.add(b, c)));
      const Index a = e.iota_inverse(g);
      if (a == npos) throw Error(ErrorKind::NotAnExtension, "defect outside the image of iota");
      h.at(b, c) = a;
    }
  return h;
}

/// theta_s: (a,b) -> iota(a) + s(b), from the twisted group onto G.
struct Theta {
  std::vector<Index> forward;   // pair index -> G
  std::vector<Index> backward;  // G -> pair index
};

inline Theta theta(const GroupExtension& e, const Section& s, const TwistedGroup& t) {
  validate_section(e, s);
  const FinAbGroup& G = e.G();
  Theta out;
  out.forward.resize(t.order());
  out.backward.assign(G.order(), npos);
  for (Index x = 0; x < t.order(); ++x) {
    const Index g = G.add(e.iota()(t.a_of(x)), s(t.b_of(x)));
    if (out.backward[g] != npos) throw Error(ErrorKind::InvalidSection, "theta is not injective");
    out.forward[x] = g;
    out.backward[g] = x;
  }
  for (Index x = 0; x < t.order(); ++x)
    for (Index y = 0; y < t.order(); ++y)
      if (out.forward[t.add(x, y)] != G.add(out.forward[x], out.forward[y]))
        throw Error(ErrorKind::InvalidSection, "theta is not additive");
  return out;
}

inline Theta theta(const GroupExtension& e, const Section& s) {
  return theta(e, s, TwistedGroup(factor_set_from_section(e, s)));
}

/// First pair (b,b') in N_B x N_B with h(b,b') outside N_A.
inline std::optional<std::pair<Index, Index>> topologizing_violation(const Subgroup& na, const Subgroup& nb,
                                                                     const FactorSet& h) {
  for (Index b : nb.elements())
    for (Index c : nb.elements())
      if (!na.contains(h(b, c))) return std::make_pair(b, c);
  return std::nullopt;
}

inline bool is_topologizing(const TopAbGroup& A, const TopAbGroup& B, const FactorSet& h) {
  const auto check = validate_cocycle(h);
  if (!check) throw Error(ErrorKind::InvalidCocycle, check.reason);
  return !topologizing_violation(A.core(), B.core(), h).has_value();
}

/// theta_s(N_A x N_B); a subgroup whenever s is topologizing.
inline std::vector<Index> nagao_core_elements(const GroupExtension& e, const Section& s, const Subgroup& na,
                                              const Subgroup& nb) {
  std::vector<Index> out;
  for (Index a : na.elements())
    for (Index b : nb.elements()) out.push_back(e.G().add(e.iota()(a), s(b)));
  std::sort(out.begin(), out.end());
  return out;
}

inline Extension nagao_topology(const GroupExtension& e, const Section& s, const TopAbGroup& A,
                                const TopAbGroup& B) {
  const FactorSet h = factor_set_from_section(e, s);
  if (auto bad = topologizing_violation(A.core(), B.core(), h))
    throw Error(ErrorKind::NotTopologizing, "h(" + std::to_string(bad->first) + "," + std::to_string(bad->second) +
                                                ") leaves the core of A");
  Subgroup core(e.G(), nagao_core_elements(e, s, A.core(), B.core()));
  return Extension(e, A, TopAbGroup(e.G(), std::move(core)), B);
}

struct SectionComparison {
  bool cores_equal = false;
  bool difference_continuous = false;  // f(b) = iota^-1(s1(b) - s2(b)) maps N_B into N_A
};

inline SectionComparison compare_sections(const GroupExtension& e, const TopAbGroup& A, const TopAbGroup& B,
                                          const Section& s1, const Section& s2) {
  for (const Section* s : {&s1, &s2})
    if (topologizing_violation(A.core(), B.core(), factor_set_from_section(e, *s)))
      throw Error(ErrorKind::NotTopologizing, "section is not topologizing");
  SectionComparison out;
  out.cores_equal = nagao_core_elements(e, s1, A.core(), B.core()) == nagao_core_elements(e, s2, A.core(), B.core());
  out.difference_continuous = true;
  for (Index b : B.core().elements()) {
    const Index a = e.iota_inverse(e.G().sub(s1(b), s2(b)));
    if (!A.core().contains(a)) out.difference_continuous = false;
  }
  return out;
}

inline bool same_topology(const GroupExtension& e, const TopAbGroup& A, const TopAbGroup& B, const Section& s1,
                          const Section& s2) {
  const auto c = compare_sections(e, A, B, s1, s2);
  if (c.cores_equal != c.difference_continuous)
    throw std::logic_error("section comparison criteria disagree");
  return c.cores_equal;
}

/// The extension realized by a factor set: G is the canonical form of A x_h B.
struct Realization {
  TwistedGroup twisted;
  GroupExtension extension;
  Section section;  // b -> (0,b); its factor set is h again
};

inline Realization realize(const FactorSet& h) {
  TwistedGroup t(h);
  GroupExtension e(t.inclusion(), t.projection());
  Section s{std::vector<Index>(h.B.order())};
  for (Index b = 0; b < h.B.order(); ++b) s.table[b] = t.to_structure(t.pair(0, b));
  return Realization{std::move(t), std::move(e), std::move(s)};
}

}  // namespace topab
