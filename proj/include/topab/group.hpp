#pragma once

// Finite abelian groups as direct sums of cyclic groups, with elements
// addressed by a mixed-radix index (first coordinate most significant, so
// index order is lexicographic coordinate order).

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "topab/detail/smith.hpp"
#include "topab/error.hpp"

namespace topab {

using Int = std::int64_t;
using Index = std::uint32_t;
using detail::npos;

struct Element {
  std::vector<Int> coords;

  friend bool operator==(const Element&, const Element&) = default;
  friend auto operator<=>(const Element&, const Element&) = default;
};

class FinAbGroup {
 public:
  static constexpr Index kMaxOrder = Index{1} << 24;
  static constexpr Index kTableOrder = 64;

  FinAbGroup() : FinAbGroup(std::vector<Int>{}) {}

  explicit FinAbGroup(std::vector<Int> moduli) : moduli_(std::move(moduli)) {
    Int order = 1;
    exponent_ = 1;
    for (Int m : moduli_) {
      if (m < 1) throw Error(ErrorKind::NonPositiveModulus, "modulus " + std::to_string(m) + " < 1");
      order *= m;
      if (order > static_cast<Int>(kMaxOrder)) throw Error(ErrorKind::MalformedInput, "group order too large");
      exponent_ = std::lcm(exponent_, m);
    }
    order_ = static_cast<Index>(order);
    strides_.assign(moduli_.size(), 1);
    for (std::size_t i = moduli_.size(); i-- > 1;) strides_[i - 1] = strides_[i] * static_cast<Index>(moduli_[i]);
    if (order_ <= kTableOrder) build_tables();
  }

  const std::vector<Int>& moduli() const { return moduli_; }
  std::size_t rank() const { return moduli_.size(); }
  Index order() const { return order_; }
  Int exponent() const { return exponent_; }
  static constexpr Index zero() { return 0; }

  Int coord(Index x, std::size_t i) const { return (x / strides_[i]) % static_cast<Index>(moduli_[i]); }

  Index add(Index x, Index y) const {
    if (add_) return (*add_)[x * order_ + y];
    return add_slow(x, y);
  }
  Index neg(Index x) const {
    if (neg_) return (*neg_)[x];
    Index out = 0;
    for (std::size_t i = 0; i < moduli_.size(); ++i) {
      const Index m = static_cast<Index>(moduli_[i]);
      out += ((m - coord(x, i)) % m) * strides_[i];
    }
    return out;
  }
  Index sub(Index x, Index y) const { return add(x, neg(y)); }

  Index mul(Int k, Index x) const {
    Index out = 0;
    for (std::size_t i = 0; i < moduli_.size(); ++i) {
      const Int m = moduli_[i];
      out += static_cast<Index>(detail::mod(detail::mod(k, m) * coord(x, i), m)) * strides_[i];
    }
    return out;
  }

  /// Index of the i-th standard generator (1 in coordinate i).
  Index generator(std::size_t i) const { return moduli_[i] == 1 ? 0 : strides_[i]; }

  Element element(Index x) const {
    Element e;
    e.coords.resize(moduli_.size());
    for (std::size_t i = 0; i < moduli_.size(); ++i) e.coords[i] = coord(x, i);
    return e;
  }

  Index index_of(const Element& e) const {
    if (e.coords.size() != moduli_.size())
      throw Error(ErrorKind::ElementNotInGroup, "element has " + std::to_string(e.coords.size()) +
                                                    " coordinates, group has rank " + std::to_string(rank()));
    Index out = 0;
    for (std::size_t i = 0; i < moduli_.size(); ++i) {
      if (e.coords[i] < 0 || e.coords[i] >= moduli_[i])
        throw Error(ErrorKind::ElementNotInGroup, "coordinate out of range");
      out += static_cast<Index>(e.coords[i]) * strides_[i];
    }
    return out;
  }

  /// Reduces arbitrary integer coordinates into canonical form.
  Index reduce(const std::vector<Int>& coords) const {
    if (coords.size() != moduli_.size()) throw Error(ErrorKind::ElementNotInGroup, "wrong number of coordinates");
    Index out = 0;
    for (std::size_t i = 0; i < moduli_.size(); ++i)
      out += static_cast<Index>(detail::mod(coords[i], moduli_[i])) * strides_[i];
    return out;
  }

  Int element_order(Index x) const {
    Int out = 1;
    for (std::size_t i = 0; i < moduli_.size(); ++i) {
      const Int c = coord(x, i);
      out = std::lcm(out, moduli_[i] / std::gcd(moduli_[i], c));
    }
    return out;
  }

  friend bool operator==(const FinAbGroup& a, const FinAbGroup& b) { return a.moduli_ == b.moduli_; }

 private:
  Index add_slow(Index x, Index y) const {
    Index out = 0;
    for (std::size_t i = 0; i < moduli_.size(); ++i) {
      const Index m = static_cast<Index>(moduli_[i]);
      out += ((coord(x, i) + coord(y, i)) % m) * strides_[i];
    }
    return out;
  }

  void build_tables() {
    auto add = std::make_shared<std::vector<Index>>(static_cast<std::size_t>(order_) * order_);
    auto neg = std::make_shared<std::vector<Index>>(order_);
    for (Index x = 0; x < order_; ++x) {
      for (Index y = 0; y < order_; ++y) (*add)[x * order_ + y] = add_slow(x, y);
      for (Index y = 0; y < order_; ++y)
        if ((*add)[x * order_ + y] == 0) (*neg)[x] = y;
    }
    add_ = std::move(add);
    neg_ = std::move(neg);
  }

  std::vector<Int> moduli_;
  std::vector<Index> strides_;
  Index order_ = 1;
  Int exponent_ = 1;
  std::shared_ptr<const std::vector<Index>> add_;
  std::shared_ptr<const std::vector<Index>> neg_;
};

inline FinAbGroup make_group(std::vector<Int> moduli) { return FinAbGroup(std::move(moduli)); }

/// A subgroup stored as its canonical (sorted, deduplicated) element set.
class Subgroup {
 public:
  Subgroup() : Subgroup(FinAbGroup{}, {0}) {}

  Subgroup(FinAbGroup parent, std::vector<Index> elements) : parent_(std::move(parent)) {
    std::sort(elements.begin(), elements.end());
    elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
    member_.assign(parent_.order(), false);
    for (Index x : elements) {
      if (x >= parent_.order()) throw Error(ErrorKind::ElementNotInGroup, "subgroup element out of range");
      member_[x] = true;
    }
    elements_ = std::move(elements);
    if (elements_.empty() || !member_[0]) throw Error(ErrorKind::NotASubgroup, "missing zero element");
    for (Index x : elements_) {
      if (!member_[parent_.neg(x)]) throw Error(ErrorKind::NotASubgroup, "not closed under negation");
      for (Index y : elements_)
        if (!member_[parent_.add(x, y)]) throw Error(ErrorKind::NotASubgroup, "not closed under addition");
    }
  }

  static Subgroup trivial(const FinAbGroup& g) { return Subgroup(g, {0}, Trusted{}); }
  static Subgroup whole(const FinAbGroup& g) {
    std::vector<Index> all(g.order());
    std::iota(all.begin(), all.end(), Index{0});
    return Subgroup(g, std::move(all), Trusted{});
  }
  /// Skips closure validation; caller guarantees a sorted subgroup.
  static Subgroup unchecked(const FinAbGroup& g, std::vector<Index> sorted) {
    return Subgroup(g, std::move(sorted), Trusted{});
  }

  const FinAbGroup& parent() const { return parent_; }
  const std::vector<Index>& elements() const { return elements_; }
  Index size() const { return static_cast<Index>(elements_.size()); }
  bool contains(Index x) const { return member_[x]; }
  bool is_trivial() const { return elements_.size() == 1; }
  bool is_whole() const { return elements_.size() == parent_.order(); }

  bool is_subset_of(const Subgroup& other) const {
    for (Index x : elements_)
      if (!other.contains(x)) return false;
    return true;
  }

  /// Bit mask of members; requires parent order <= 64.
  std::uint64_t mask() const {
    std::uint64_t m = 0;
    for (Index x : elements_) m |= std::uint64_t{1} << x;
    return m;
  }

  friend bool operator==(const Subgroup& a, const Subgroup& b) {
    return a.parent_ == b.parent_ && a.elements_ == b.elements_;
  }

 private:
  struct Trusted {};
  Subgroup(FinAbGroup parent, std::vector<Index> sorted, Trusted) : parent_(std::move(parent)), elements_(std::move(sorted)) {
    member_.assign(parent_.order(), false);
    for (Index x : elements_) member_[x] = true;
  }

  FinAbGroup parent_;
  std::vector<Index> elements_;
  std::vector<bool> member_;
};

inline Subgroup subgroup_closure(const FinAbGroup& g, std::span<const Index> gens) {
  std::vector<bool> seen(g.order(), false);
  std::vector<Index> out{0};
  seen[0] = true;
  for (std::size_t head = 0; head < out.size(); ++head) {
    const Index x = out[head];
    for (Index s : gens) {
      const Index y = g.add(x, s);
      if (!seen[y]) {
        seen[y] = true;
        out.push_back(y);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return Subgroup::unchecked(g, std::move(out));
}

inline Subgroup subgroup_generated(const FinAbGroup& g, const std::vector<Element>& gens) {
  std::vector<Index> idx;
  idx.reserve(gens.size());
  for (const auto& e : gens) idx.push_back(g.index_of(e));
  return subgroup_closure(g, idx);
}

/// Greedy small generating set, in index order.
inline std::vector<Index> generating_set(const Subgroup& s) {
  std::vector<Index> gens;
  Subgroup span = Subgroup::trivial(s.parent());
  for (Index x : s.elements()) {
    if (span.contains(x)) continue;
    gens.push_back(x);
    span = subgroup_closure(s.parent(), gens);
    if (span.size() == s.size()) break;
  }
  return gens;
}

inline Subgroup intersection(const Subgroup& a, const Subgroup& b) {
  std::vector<Index> out;
  for (Index x : a.elements())
    if (b.contains(x)) out.push_back(x);
  return Subgroup::unchecked(a.parent(), std::move(out));
}

inline Subgroup subgroup_sum(const Subgroup& a, const Subgroup& b) {
  std::vector<bool> seen(a.parent().order(), false);
  std::vector<Index> out;
  for (Index x : a.elements())
    for (Index y : b.elements()) {
      const Index z = a.parent().add(x, y);
      if (!seen[z]) {
        seen[z] = true;
        out.push_back(z);
      }
    }
  std::sort(out.begin(), out.end());
  return Subgroup::unchecked(a.parent(), std::move(out));
}

class Homomorphism {
 public:
  Homomorphism() = default;

  /// Defines the map on standard generators; rejects ill-defined assignments.
  Homomorphism(FinAbGroup source, FinAbGroup target, std::vector<Index> gen_images)
      : source_(std::move(source)), target_(std::move(target)), gen_images_(std::move(gen_images)) {
    if (gen_images_.size() != source_.rank())
      throw Error(ErrorKind::IllDefined, "need one image per source generator");
    for (std::size_t i = 0; i < gen_images_.size(); ++i) {
      if (gen_images_[i] >= target_.order()) throw Error(ErrorKind::ElementNotInGroup, "image out of range");
      if (target_.mul(source_.moduli()[i], gen_images_[i]) != 0)
        throw Error(ErrorKind::IllDefined, "generator " + std::to_string(i) + " of order " +
                                               std::to_string(source_.moduli()[i]) + " sent to element of order " +
                                               std::to_string(target_.element_order(gen_images_[i])));
    }
    totalize();
  }

  Homomorphism(FinAbGroup source, FinAbGroup target, const std::vector<Element>& gen_images)
      : Homomorphism(source, target, to_indices(target, gen_images)) {}

  /// Builds from a full table, verifying additivity.
  static Homomorphism from_table(FinAbGroup source, FinAbGroup target, std::vector<Index> table) {
    if (table.size() != source.order()) throw Error(ErrorKind::IllDefined, "table size mismatch");
    for (Index x = 0; x < source.order(); ++x)
      for (Index y = 0; y < source.order(); ++y)
        if (table[source.add(x, y)] != target.add(table[x], table[y]))
          throw Error(ErrorKind::IllDefined, "table is not additive");
    std::vector<Index> gens(source.rank());
    for (std::size_t i = 0; i < source.rank(); ++i) gens[i] = table[source.generator(i)];
    Homomorphism h;
    h.source_ = std::move(source);
    h.target_ = std::move(target);
    h.gen_images_ = std::move(gens);
    h.table_ = std::move(table);
    return h;
  }

  static Homomorphism identity(const FinAbGroup& g) {
    std::vector<Index> gens(g.rank());
    for (std::size_t i = 0; i < g.rank(); ++i) gens[i] = g.generator(i);
    return Homomorphism(g, g, std::move(gens));
  }

  static Homomorphism zero(const FinAbGroup& source, const FinAbGroup& target) {
    return Homomorphism(source, target, std::vector<Index>(source.rank(), 0));
  }

  const FinAbGroup& source() const { return source_; }
  const FinAbGroup& target() const { return target_; }
  const std::vector<Index>& gen_images() const { return gen_images_; }
  const std::vector<Index>& table() const { return table_; }
  Index operator()(Index x) const { return table_[x]; }

  friend bool operator==(const Homomorphism& a, const Homomorphism& b) {
    return a.source_ == b.source_ && a.target_ == b.target_ && a.table_ == b.table_;
  }

 private:
  static std::vector<Index> to_indices(const FinAbGroup& g, const std::vector<Element>& es) {
    std::vector<Index> out;
    out.reserve(es.size());
    for (const auto& e : es) out.push_back(g.index_of(e));
    return out;
  }

  void totalize() {
    table_.assign(source_.order(), 0);
    // Walk indices in order: x differs from a smaller index by one generator.
    for (Index x = 1; x < source_.order(); ++x) {
      std::size_t i = source_.rank();
      while (i-- > 0)
        if (source_.coord(x, i) != 0) break;
      table_[x] = target_.add(table_[source_.sub(x, source_.generator(i))], gen_images_[i]);
    }
  }

  FinAbGroup source_;
  FinAbGroup target_;
  std::vector<Index> gen_images_;
  std::vector<Index> table_{0};
};

inline Homomorphism make_hom(const FinAbGroup& source, const FinAbGroup& target, const std::vector<Element>& gen_images) {
  return Homomorphism(source, target, gen_images);
}

/// g after f.
inline Homomorphism compose(const Homomorphism& g, const Homomorphism& f) {
  if (!(f.target() == g.source())) throw Error(ErrorKind::CompositionMismatch, "target of f differs from source of g");
  std::vector<Index> gens(f.source().rank());
  for (std::size_t i = 0; i < gens.size(); ++i) gens[i] = g(f.gen_images()[i]);
  return Homomorphism(f.source(), g.target(), std::move(gens));
}

inline Homomorphism add_homs(const Homomorphism& f, const Homomorphism& g) {
  std::vector<Index> gens(f.source().rank());
  for (std::size_t i = 0; i < gens.size(); ++i) gens[i] = f.target().add(f.gen_images()[i], g.gen_images()[i]);
  return Homomorphism(f.source(), f.target(), std::move(gens));
}

inline Subgroup image_of(const Homomorphism& f, const Subgroup& s) {
  std::vector<Index> out;
  out.reserve(s.size());
  for (Index x : s.elements()) out.push_back(f(x));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return Subgroup::unchecked(f.target(), std::move(out));
}

inline Subgroup preimage(const Homomorphism& f, const Subgroup& t) {
  std::vector<Index> out;
  for (Index x = 0; x < f.source().order(); ++x)
    if (t.contains(f(x))) out.push_back(x);
  return Subgroup::unchecked(f.source(), std::move(out));
}

inline Subgroup kernel(const Homomorphism& f) { return preimage(f, Subgroup::trivial(f.target())); }
inline Subgroup image(const Homomorphism& f) { return image_of(f, Subgroup::whole(f.source())); }
inline bool is_injective(const Homomorphism& f) { return kernel(f).is_trivial(); }
inline bool is_surjective(const Homomorphism& f) { return image(f).size() == f.target().order(); }
inline bool is_bijective(const Homomorphism& f) { return is_injective(f) && is_surjective(f); }

/// Exactness of  . -f-> . -g-> .  at the middle term.
inline bool is_exact_at(const Homomorphism& f, const Homomorphism& g) {
  if (!(f.target() == g.source())) throw Error(ErrorKind::CompositionMismatch, "target of f differs from source of g");
  return image(f) == kernel(g);
}

struct Quotient {
  FinAbGroup group;         // canonical invariant-factor form
  Homomorphism projection;  // surjective, kernel = the subgroup quotiented out
  std::vector<Index> lifts; // a preimage for each canonical generator
};

inline Quotient quotient(const FinAbGroup& g, const Subgroup& k) {
  if (!(k.parent() == g)) throw Error(ErrorKind::NotASubgroup, "subgroup of a different group");
  std::vector<Index> rep(g.order(), npos);
  for (Index x = 0; x < g.order(); ++x) {
    if (rep[x] != npos) continue;
    for (Index y : k.elements()) rep[g.add(x, y)] = x;
  }
  std::vector<Index> gens;
  for (std::size_t i = 0; i < g.rank(); ++i)
    if (g.moduli()[i] > 1) gens.push_back(g.generator(i));
  const auto st = detail::compute_structure(
      g.order(), [&](Index a, Index b) { return g.add(a, b); }, [&](Index a) { return rep[a]; }, gens);
  FinAbGroup q(st.invariants);
  std::vector<Index> images(g.rank());
  for (std::size_t i = 0; i < g.rank(); ++i) images[i] = st.canon[g.generator(i)];
  return Quotient{q, Homomorphism(g, q, std::move(images)), st.lifts};
}

struct SubgroupStructure {
  FinAbGroup group;         // canonical form of the subgroup
  Homomorphism inclusion;   // injective, image = the subgroup
  std::vector<Index> coords; // parent index -> structure index, npos outside
};

inline SubgroupStructure structure_of(const Subgroup& s) {
  const FinAbGroup& g = s.parent();
  const auto gens = generating_set(s);
  const auto st = detail::compute_structure(
      g.order(), [&](Index a, Index b) { return g.add(a, b); }, [](Index a) { return a; }, gens);
  FinAbGroup c(st.invariants);
  return SubgroupStructure{c, Homomorphism(c, g, st.lifts), st.canon};
}

/// Canonical invariant-factor form of a group, with an isomorphism onto it.
inline Quotient canonical_form(const FinAbGroup& g) { return quotient(g, Subgroup::trivial(g)); }

inline bool isomorphic(const FinAbGroup& a, const FinAbGroup& b) {
  return canonical_form(a).group == canonical_form(b).group;
}

/// Rewrites f with codomain the structure group of a subgroup containing its image.
inline Homomorphism corestrict(const Homomorphism& f, const SubgroupStructure& s) {
  std::vector<Index> gens(f.source().rank());
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const Index c = s.coords[f.gen_images()[i]];
    if (c == npos) throw Error(ErrorKind::NotWellDefined, "image leaves the subgroup");
    gens[i] = c;
  }
  return Homomorphism(f.source(), s.group, std::move(gens));
}

/// The map G/K -> H/L induced by f; requires f(K) in L.
inline Homomorphism induced_on_quotients(const Homomorphism& f, const Quotient& from, const Subgroup& k,
                                         const Quotient& to) {
  for (Index x : k.elements())
    if (to.projection(f(x)) != 0) throw Error(ErrorKind::NotWellDefined, "f does not descend to the quotients");
  std::vector<Index> gens(from.group.rank());
  for (std::size_t i = 0; i < gens.size(); ++i) gens[i] = to.projection(f(from.lifts[i]));
  return Homomorphism(from.group, to.group, std::move(gens));
}

/// Every subgroup once, ordered by size and then by element list.
inline std::vector<Subgroup> all_subgroups(const FinAbGroup& g) {
  std::vector<std::vector<Index>> found{{0}};
  std::vector<std::vector<Index>> frontier{{0}};
  std::set<std::vector<Index>> seen{{0}};
  while (!frontier.empty()) {
    std::vector<std::vector<Index>> next;
    for (const auto& s : frontier) {
      std::vector<bool> in(g.order(), false);
      for (Index x : s) in[x] = true;
      const auto gens = generating_set(Subgroup::unchecked(g, s));
      for (Index x = 1; x < g.order(); ++x) {
        if (in[x]) continue;
        auto more = gens;
        more.push_back(x);
        auto t = subgroup_closure(g, more).elements();
        if (seen.insert(t).second) {
          found.push_back(t);
          next.push_back(std::move(t));
        }
      }
    }
    frontier = std::move(next);
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  std::vector<Subgroup> out;
  out.reserve(found.size());
  for (auto& e : found) out.push_back(Subgroup::unchecked(g, std::move(e)));
  return out;
}

/// All elements, in index order.
inline std::vector<Index> all_elements(const FinAbGroup& g) {
  std::vector<Index> out(g.order());
  std::iota(out.begin(), out.end(), Index{0});
  return out;
}

}  // namespace topab
