#pragma once

// Exhaustive sweeps of the theorem verifiers over families of small
// instances, with hypothesis dropping and witness collection.
//
// Square families: one extension per cohomology class for every pair of
// groups (A, B) of order <= max_group_order, every ordered pair of such
// extensions, and every gamma: G1 -> G2 with gamma iota1(A1) inside
// iota2(A2); alpha and beta are induced. Cores run over all subgroups.
//
// The sweep engine evaluates hypotheses and conclusions on byte tables.
// Instances that agree on the data a predicate reads are counted together:
// a section class on D is the set of sections with the same values on D,
// and every class on D holds |A|^(|B| - |D|) sections.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "topab/family.hpp"
#include "topab/json.hpp"
#include "topab/theorems.hpp"

namespace topab {

struct FamilySpec {
  Int max_group_order = 4;
  std::optional<std::uint64_t> max_cocycle_count;  // cohomology classes per (A, B); empty for all
  std::uint64_t seed = 0;
  std::vector<std::string> generators{"pad-middle", "pad-left", "pad-right"};
};

struct SearchTask {
  std::string theorem;
  std::vector<std::string> dropped;
  FamilySpec family;
  bool stop_at_first = false;
  std::size_t max_witnesses = 10;
};

struct SearchCounts {
  std::uint64_t instances_enumerated = 0;
  std::uint64_t instances_sampled = 0;
  std::uint64_t hypotheses_failed = 0;
  std::uint64_t conclusions_checked = 0;
  std::uint64_t conclusion_failures = 0;
  std::uint64_t psi_checked = 0;
  std::uint64_t psi_failures = 0;

  SearchCounts& operator+=(const SearchCounts& o) {
    instances_enumerated += o.instances_enumerated;
    instances_sampled += o.instances_sampled;
    hypotheses_failed += o.hypotheses_failed;
    conclusions_checked += o.conclusions_checked;
    conclusion_failures += o.conclusion_failures;
    psi_checked += o.psi_checked;
    psi_failures += o.psi_failures;
    return *this;
  }
  friend bool operator==(const SearchCounts&, const SearchCounts&) = default;
};

struct SearchSummary {
  SearchTask task;
  std::vector<std::pair<std::string, std::uint64_t>> family_sizes;
  SearchCounts counts;
  std::size_t witnesses = 0;
  bool stopped_early = false;
  std::vector<std::string> model_collapse;
};

struct SearchResult {
  SearchSummary summary;
  std::vector<VerificationReport> witnesses;
};

struct RunOptions {
  unsigned threads = 0;    // 0: TOPAB_THREADS, else hardware concurrency
  bool reference = false;  // evaluate every instance with the per-instance verifiers
  bool shrink = true;
};

inline const std::vector<std::string>& known_generators() {
  static const std::vector<std::string> g{"pad-middle", "pad-left", "pad-right"};
  return g;
}

/// Pads an extension square to two five-term rows: "pad-middle" gives
/// 0 -> A -> G -> B -> 0, "pad-left" A -> G -> B -> 0 -> 0 and
/// "pad-right" 0 -> 0 -> A -> G -> B.
inline FiveTermInstance pad_square(const SquareInstance& x, const std::string& generator) {
  const TopAbGroup Z = TopAbGroup::discrete(FinAbGroup{});
  auto row = [&](const GroupExtension& e, const TopAbGroup& A, const TopAbGroup& G, const TopAbGroup& B) {
    FiveTermRow r;
    if (generator == "pad-middle") {
      r.groups = {Z, A, G, B, Z};
      r.maps = {Homomorphism::zero(Z.group(), A.group()), e.iota(), e.pi(), Homomorphism::zero(B.group(), Z.group())};
    } else if (generator == "pad-left") {
      r.groups = {A, G, B, Z, Z};
      r.maps = {e.iota(), e.pi(), Homomorphism::zero(B.group(), Z.group()), Homomorphism::identity(Z.group())};
    } else if (generator == "pad-right") {
      r.groups = {Z, Z, A, G, B};
      r.maps = {Homomorphism::identity(Z.group()), Homomorphism::zero(Z.group(), A.group()), e.iota(), e.pi()};
    } else {
      throw Error(ErrorKind::MalformedInput, "unknown row generator " + generator);
    }
    return r;
  };
  FiveTermInstance out;
  out.top = row(x.square.top_row(), x.A1(), x.G1(), x.B1());
  out.bottom = row(x.square.bottom_row(), x.A2(), x.G2(), x.B2());
  const Homomorphism z = Homomorphism::identity(FinAbGroup{});
  const auto& sq = x.square;
  if (generator == "pad-middle") out.vertical = {z, sq.alpha(), sq.gamma(), sq.beta(), z};
  else if (generator == "pad-left") out.vertical = {sq.alpha(), sq.gamma(), sq.beta(), z, z};
  else out.vertical = {z, z, sq.alpha(), sq.gamma(), sq.beta()};
  return out;
}

namespace search_detail {

using Mask = std::uint64_t;
using u8 = std::uint8_t;
using u64 = std::uint64_t;
inline constexpr u8 kNone = 0xFF;
inline constexpr u64 kSectionBudget = 100000;

inline Mask bit(Index x) { return Mask{1} << x; }
inline bool subset(Mask a, Mask b) { return (a & ~b) == 0; }
inline int count(Mask m) { return std::popcount(m); }

inline Mask image(const std::vector<u8>& table, Mask m) {
  Mask out = 0;
  for (; m; m &= m - 1) out |= bit(table[std::countr_zero(m)]);
  return out;
}

inline std::vector<u8> table_of(const Homomorphism& f) {
  std::vector<u8> t(f.source().order());
  for (Index x = 0; x < t.size(); ++x) t[x] = static_cast<u8>(f(x));
  return t;
}

inline Homomorphism hom_of(const FinAbGroup& s, const FinAbGroup& t, const std::vector<u8>& table) {
  std::vector<Index> gens(s.rank());
  for (std::size_t i = 0; i < gens.size(); ++i) gens[i] = table[s.generator(i)];
  return Homomorphism(s, t, std::move(gens));
}

struct Subgroups {
  std::vector<Subgroup> list;
  std::vector<Mask> mask;

  int size() const { return static_cast<int>(list.size()); }
  int whole() const { return size() - 1; }
  int id(Mask m) const {
    auto it = std::find(mask.begin(), mask.end(), m);
    return it == mask.end() ? -1 : static_cast<int>(it - mask.begin());
  }
};

/// Sorted by size, so id 0 is the trivial subgroup and the last id the whole group.
inline Subgroups subgroups_of(const FinAbGroup& g) {
  Subgroups out;
  out.list = all_subgroups(g);
  for (const auto& s : out.list) {
    Mask m = 0;
    for (Index x : s.elements()) m |= bit(x);
    out.mask.push_back(m);
  }
  return out;
}

struct Classes {
  std::vector<Index> elems;  // D minus 0, ascending
  u64 count = 1;
  u64 weight = 1;
  std::vector<u8> value;  // value[c * |B| + b]: the representative, which picks the first lift off D
};

struct Ext {
  GroupExtension e;
  Index nA = 0, nB = 0, nG = 0;
  std::vector<u8> iota, pi, iota_inv, addG, subG, addA, addB;
  Subgroups SA, SB, SG;
  std::vector<std::vector<u8>> fib;
  u64 ns = 1;
  std::vector<Classes> cls;          // indexed by D >> 1
  std::vector<u8> theta_f, theta_b;  // per section
  std::vector<u8> h0;                // per section: h(0, b)
  std::vector<std::vector<int>> nagao;
  std::vector<u64> ntopo;
  std::vector<std::vector<int>> topcores;
  std::vector<std::vector<u8>> coset;  // [ia][g]: least element of g + iota(N_A)

  Mask full() const { return bit(nB) - 1; }
  const Classes& classes(Mask d) const { return cls[d >> 1]; }
  int q(int ia, int ib) const { return ia * SB.size() + ib; }

  u64 restrict(Mask d, u64 c, Mask sub) const {
    const auto& el = classes(d).elems;
    u64 digits[64];
    for (std::size_t k = el.size(); k-- > 0;) {
      digits[k] = c % nA;
      c /= nA;
    }
    u64 out = 0;
    for (std::size_t k = 0; k < el.size(); ++k)
      if (sub & bit(el[k])) out = out * nA + digits[k];
    return out;
  }

  Section section(Mask d, u64 c) const {
    Section s{std::vector<Index>(nB)};
    for (Index b = 0; b < nB; ++b) s.table[b] = classes(d).value[c * nB + b];
    return s;
  }

  bool row_topological(int ia, int ib, int ig) const {
    const Mask ng = SG.mask[ig];
    for (Index a = 0; a < nA; ++a)
      if (((SA.mask[ia] >> a) & 1) != ((ng >> iota[a]) & 1)) return false;
    return image(pi, ng) == SB.mask[ib];
  }
};

inline Ext make_ext(GroupExtension e) {
  Ext x;
  x.e = std::move(e);
  const auto& A = x.e.A();
  const auto& B = x.e.B();
  const auto& G = x.e.G();
  x.nA = A.order();
  x.nB = B.order();
  x.nG = G.order();
  if (x.nG > 64) throw Error(ErrorKind::BudgetExceeded, "middle group above order 64");
  for (Index i = 1; i < x.nB; ++i) {
    x.ns *= x.nA;
    if (x.ns > kSectionBudget) throw Error(ErrorKind::BudgetExceeded, "too many sections per extension");
  }
  x.iota = table_of(x.e.iota());
  x.pi = table_of(x.e.pi());
  for (Index g = 0; g < x.nG; ++g) {
    const Index v = x.e.iota_inverse(g);
    x.iota_inv.push_back(v == npos ? kNone : static_cast<u8>(v));
  }
  for (Index p = 0; p < x.nG; ++p)
    for (Index r = 0; r < x.nG; ++r) {
      x.addG.push_back(static_cast<u8>(G.add(p, r)));
      x.subG.push_back(static_cast<u8>(G.sub(p, r)));
    }
  for (Index p = 0; p < x.nA; ++p)
    for (Index r = 0; r < x.nA; ++r) x.addA.push_back(static_cast<u8>(A.add(p, r)));
  for (Index p = 0; p < x.nB; ++p)
    for (Index r = 0; r < x.nB; ++r) x.addB.push_back(static_cast<u8>(B.add(p, r)));
  x.SA = subgroups_of(A);
  x.SB = subgroups_of(B);
  x.SG = subgroups_of(G);
  for (const auto& f : fibers(x.e)) {
    std::vector<u8> v(f.begin(), f.end());
    x.fib.push_back(std::move(v));
  }

  x.cls.resize(std::size_t{1} << (x.nB - 1));
  for (Mask d = 1; d <= x.full(); d += 2) {
    Classes& c = x.cls[d >> 1];
    for (Index b = 1; b < x.nB; ++b)
      if (d & bit(b)) {
        c.elems.push_back(b);
        c.count *= x.nA;
      } else {
        c.weight *= x.nA;
      }
    c.value.assign(c.count * x.nB, 0);
    for (u64 k = 0; k < c.count; ++k) {
      u64 rest = k;
      for (Index b = 0; b < x.nB; ++b) c.value[k * x.nB + b] = x.fib[b][0];
      for (std::size_t j = c.elems.size(); j-- > 0;) {
        c.value[k * x.nB + c.elems[j]] = x.fib[c.elems[j]][rest % x.nA];
        rest /= x.nA;
      }
    }
  }

  const Classes& all = x.classes(x.full());
  for (u64 s = 0; s < x.ns; ++s) {
    const Section sec = x.section(x.full(), s);
    const Theta th = theta(x.e, sec);
    for (Index v : th.forward) x.theta_f.push_back(static_cast<u8>(v));
    for (Index v : th.backward) x.theta_b.push_back(static_cast<u8>(v));
    for (Index b = 0; b < x.nB; ++b)
      x.h0.push_back(x.iota_inv[x.subG[x.addG[all.value[s * x.nB] * x.nG + all.value[s * x.nB + b]] * x.nG +
                                       all.value[s * x.nB + b]]]);
  }

  const int nSA = x.SA.size(), nSB = x.SB.size();
  x.nagao.resize(nSA * nSB);
  x.ntopo.resize(nSA * nSB);
  x.topcores.resize(nSA * nSB);
  for (int ia = 0; ia < nSA; ++ia) {
    const Mask na = x.SA.mask[ia];
    std::vector<u8> cos(x.nG);
    for (Index g = 0; g < x.nG; ++g) {
      Index least = g;
      for (Index a = 0; a < x.nA; ++a)
        if (na & bit(a)) least = std::min<Index>(least, x.addG[g * x.nG + x.iota[a]]);
      cos[g] = static_cast<u8>(least);
    }
    x.coset.push_back(std::move(cos));
    for (int ib = 0; ib < nSB; ++ib) {
      const Mask nb = x.SB.mask[ib];
      const Classes& c = x.classes(nb);
      auto& out = x.nagao[x.q(ia, ib)];
      out.assign(c.count, -1);
      for (u64 k = 0; k < c.count; ++k) {
        const u8* s = &c.value[k * x.nB];
        bool ok = true;
        for (Index b : c.elems)
          for (Index d : c.elems) {
            const u8 h = x.iota_inv[x.subG[x.addG[s[b] * x.nG + s[d]] * x.nG + s[x.addB[b * x.nB + d]]]];
            if (h == kNone || !(na & bit(h))) ok = false;
          }
        if (!ok) continue;
        Mask core = 0;
        for (Index a = 0; a < x.nA; ++a)
          if (na & bit(a))
            for (Index b = 0; b < x.nB; ++b)
              if (nb & bit(b)) core |= bit(x.addG[x.iota[a] * x.nG + s[b]]);
        out[k] = x.SG.id(core);
        if (out[k] < 0) throw std::logic_error("Nagao core is not a subgroup");
        ++x.ntopo[x.q(ia, ib)];
      }
      for (int ig = 0; ig < x.SG.size(); ++ig)
        if (x.row_topological(ia, ib, ig)) x.topcores[x.q(ia, ib)].push_back(ig);
    }
  }
  return x;
}

struct Sq {
  const Ext* e1 = nullptr;
  const Ext* e2 = nullptr;
  std::vector<u8> alpha, beta, gamma;
  std::vector<Mask> aimg, bimg, gimg;
  Mask aall = 0, ball = 0, gall = 0;
  bool a_bij = false, b_bij = false, g_bij = false, b_inj = false;

  bool gc(int ig1, int ig2) const { return subset(gimg[ig1], e2->SG.mask[ig2]); }
  bool gs(int ig1, int ig2) const { return gimg[ig1] == (gall & e2->SG.mask[ig2]); }
  bool ac(int ia1, int ia2) const { return subset(aimg[ia1], e2->SA.mask[ia2]); }
  bool as(int ia1, int ia2) const { return aimg[ia1] == (aall & e2->SA.mask[ia2]); }
  bool bc(int ib1, int ib2) const { return subset(bimg[ib1], e2->SB.mask[ib2]); }
  bool bs(int ib1, int ib2) const { return bimg[ib1] == (ball & e2->SB.mask[ib2]); }

  ExtensionSquare square() const {
    return ExtensionSquare(e1->e, e2->e, hom_of(e1->e.A(), e2->e.A(), alpha), hom_of(e1->e.B(), e2->e.B(), beta),
                           hom_of(e1->e.G(), e2->e.G(), gamma));
  }

  SquareInstance instance(int ia1, int ib1, int ig1, int ia2, int ib2, int ig2) const {
    return SquareInstance{square(),          e1->SA.list[ia1], e1->SG.list[ig1], e1->SB.list[ib1],
                          e2->SA.list[ia2],  e2->SG.list[ig2], e2->SB.list[ib2], std::nullopt, std::nullopt};
  }
};

inline Mask full_mask(Index n) { return n == 64 ? ~Mask{0} : bit(n) - 1; }

inline void finish_square(Sq& q) {
  const Ext& a = *q.e1;
  const Ext& b = *q.e2;
  for (const Mask m : a.SA.mask) q.aimg.push_back(image(q.alpha, m));
  for (const Mask m : a.SB.mask) q.bimg.push_back(image(q.beta, m));
  for (const Mask m : a.SG.mask) q.gimg.push_back(image(q.gamma, m));
  q.aall = q.aimg.back();
  q.ball = q.bimg.back();
  q.gall = q.gimg.back();
  q.a_bij = a.nA == b.nA && q.aall == full_mask(b.nA);
  q.b_bij = a.nB == b.nB && q.ball == full_mask(b.nB);
  q.g_bij = a.nG == b.nG && q.gall == full_mask(b.nG);
  q.b_inj = static_cast<Index>(count(q.ball)) == a.nB;
}

/// Every gamma: G1 -> G2 carrying iota1(A1) into iota2(A2), lexicographic in
/// the generator images.
template <class Fn>
void for_each_square(const Ext& e1, const Ext& e2, Fn&& fn) {
  const FinAbGroup& G1 = e1.e.G();
  const FinAbGroup& G2 = e2.e.G();
  const std::size_t r = G1.rank();
  std::vector<std::vector<Index>> choices(r);
  for (std::size_t i = 0; i < r; ++i)
    for (Index y = 0; y < G2.order(); ++y)
      if (G2.mul(G1.moduli()[i], y) == 0) choices[i].push_back(y);
  // multiples[i][k] = k * image of generator i
  std::vector<std::size_t> pos(r, 0);
  std::vector<std::vector<u8>> coords(G1.order(), std::vector<u8>(r));
  for (Index x = 0; x < G1.order(); ++x)
    for (std::size_t i = 0; i < r; ++i) coords[x][i] = static_cast<u8>(G1.coord(x, i));
  Sq q;
  q.e1 = &e1;
  q.e2 = &e2;
  q.gamma.assign(e1.nG, 0);
  std::vector<std::vector<u8>> mult(r);
  for (;;) {
    for (std::size_t i = 0; i < r; ++i) {
      mult[i].assign(G1.moduli()[i], 0);
      for (Int k = 1; k < G1.moduli()[i]; ++k)
        mult[i][k] = e2.addG[mult[i][k - 1] * e2.nG + choices[i][pos[i]]];
    }
    for (Index x = 0; x < e1.nG; ++x) {
      u8 v = 0;
      for (std::size_t i = 0; i < r; ++i) v = e2.addG[v * e2.nG + mult[i][coords[x][i]]];
      q.gamma[x] = v;
    }
    bool ok = true;
    for (Index a = 0; a < e1.nA && ok; ++a) ok = e2.iota_inv[q.gamma[e1.iota[a]]] != kNone;
    if (ok) {
      q.alpha.assign(e1.nA, 0);
      q.beta.assign(e1.nB, 0);
      for (Index a = 0; a < e1.nA; ++a) q.alpha[a] = e2.iota_inv[q.gamma[e1.iota[a]]];
      for (Index b = 0; b < e1.nB; ++b) q.beta[b] = e2.pi[q.gamma[e1.fib[b][0]]];
      q.aimg.clear();
      q.bimg.clear();
      q.gimg.clear();
      finish_square(q);
      if (!fn(static_cast<const Sq&>(q))) return;
    }
    std::size_t i = r;
    while (i > 0) {
      --i;
      if (++pos[i] < choices[i].size()) break;
      pos[i] = 0;
      if (i == 0) return;
    }
    if (r == 0) return;
  }
}

struct Ctx {
  std::string theorem;
  Dropped dropped;
  std::vector<std::string> generators;
  std::size_t cap = 10;
  bool stop_at_first = false;
  bool reference = false;

  bool drop(const char* h) const { return dropped.count(h) > 0; }
};

struct UnitOut {
  SearchCounts counts;
  std::vector<Diagram> found;
  u64 squares = 0;
  bool stopped = false;
};

template <class Make>
void record(const Ctx& c, UnitOut& out, Make&& make) {
  if (out.found.size() < c.cap) out.found.push_back(make());
  if (c.stop_at_first) out.stopped = true;
}

/// Reference path: one verifier call per instance.
inline void tally(const Ctx& c, UnitOut& out, const Verdict& v, const std::function<Diagram()>& make) {
  ++out.counts.instances_enumerated;
  if (!v.conclusion) {
    ++out.counts.hypotheses_failed;
    return;
  }
  ++out.counts.conclusions_checked;
  if (!v.conclusion_holds()) {
    ++out.counts.conclusion_failures;
    record(c, out, make);
  }
}

// ---------------------------------------------------------------------------
// psi identity over every section pair of a square

inline u64 psi_pass(const Sq& q, std::vector<u8>* bad_pairs) {
  const Ext& E1 = *q.e1;
  const Ext& E2 = *q.e2;
  const Index nA1 = E1.nA, nB1 = E1.nB, nA2 = E2.nA, nB2 = E2.nB, nG2 = E2.nG;
  const Classes& S1 = E1.classes(E1.full());
  const Classes& S2 = E2.classes(E2.full());
  u64 bad = 0;
  std::vector<u8> gt1(nA1 * nB1), gs1(nB1), sg(nB1);
  for (u64 s1 = 0; s1 < E1.ns; ++s1) {
    const u8* T1 = &E1.theta_f[s1 * nA1 * nB1];
    for (Index x = 0; x < nA1 * nB1; ++x) gt1[x] = q.gamma[T1[x]];
    for (Index b = 0; b < nB1; ++b) gs1[b] = q.gamma[S1.value[s1 * nB1 + b]];
    for (u64 s2 = 0; s2 < E2.ns; ++s2) {
      const u8* s2v = &S2.value[s2 * nB2];
      const u8* TB = &E2.theta_b[s2 * nG2];
      const u8* H0 = &E2.h0[s2 * nB2];
      for (Index b = 0; b < nB1; ++b) sg[b] = E2.iota_inv[E2.subG[gs1[b] * nG2 + s2v[q.beta[b]]]];
      bool ok = true;
      for (Index a = 0; a < nA1 && ok; ++a)
        for (Index b = 0; b < nB1; ++b) {
          const Index lhs = TB[gt1[a * nB1 + b]];
          const Index a2 = E2.addA[E2.addA[q.alpha[a] * nA2 + sg[b]] * nA2 + H0[q.beta[b]]];
          if (lhs != a2 * nB2 + q.beta[b]) {
            ok = false;
            break;
          }
        }
      if (!ok) {
        ++bad;
        if (bad_pairs) {
          bad_pairs->resize(E1.ns * E2.ns, 0);
          (*bad_pairs)[s1 * E2.ns + s2] = 1;
        }
      }
    }
  }
  return bad;
}

inline SquareInstance with_sections(const Sq& q, int ia1, int ib1, int ig1, int ia2, int ib2, int ig2,
                                    const Section& s1, const Section& s2) {
  SquareInstance x = q.instance(ia1, ib1, ig1, ia2, ib2, ig2);
  x.s1 = s1;
  x.s2 = s2;
  return x;
}

// ---------------------------------------------------------------------------
// p3_generalized

/// Every instance on its own: used where psi fails somewhere in the square.
inline void p3_direct(const Ctx& c, const Sq& q, const std::vector<u8>& psi_bad, UnitOut& out) {
  const Ext& E1 = *q.e1;
  const Ext& E2 = *q.e2;
  const bool dA = c.drop("alpha_continuous"), dB = c.drop("beta_continuous"), dC = c.drop("sections_compatible");
  const Classes& S1 = E1.classes(E1.full());
  const Classes& S2 = E2.classes(E2.full());
  for (int ib1 = 0; ib1 < E1.SB.size(); ++ib1)
    for (int ia2 = 0; ia2 < E2.SA.size(); ++ia2)
      for (int ib2 = 0; ib2 < E2.SB.size(); ++ib2)
        for (int ia1 = 0; ia1 < E1.SA.size(); ++ia1) {
          const Mask NB1 = E1.SB.mask[ib1];
          const auto& cos = E2.coset[ia2];
          const bool hyp_ab = (q.ac(ia1, ia2) || dA) && (q.bc(ib1, ib2) || dB);
          for (u64 s1 = 0; s1 < E1.ns; ++s1) {
            const int ng1 = E1.nagao[E1.q(ia1, ib1)][E1.restrict(E1.full(), s1, NB1)];
            if (ng1 < 0) continue;
            for (u64 s2 = 0; s2 < E2.ns; ++s2) {
              const int ng2 = E2.nagao[E2.q(ia2, ib2)][E2.restrict(E2.full(), s2, E2.SB.mask[ib2])];
              if (ng2 < 0) continue;
              ++out.counts.instances_enumerated;
              bool compat = true;
              for (Index b : E1.classes(NB1).elems)
                if (cos[q.gamma[S1.value[s1 * E1.nB + b]]] != cos[S2.value[s2 * E2.nB + q.beta[b]]]) compat = false;
              if (!hyp_ab || !(compat || dC)) {
                ++out.counts.hypotheses_failed;
                continue;
              }
              ++out.counts.conclusions_checked;
              const bool psi_ok = psi_bad.empty() || !psi_bad[s1 * E2.ns + s2];
              if (q.gc(ng1, ng2) && psi_ok) continue;
              ++out.counts.conclusion_failures;
              record(c, out, [&] {
                return to_diagram(with_sections(q, ia1, ib1, ng1, ia2, ib2, ng2, E1.section(E1.full(), s1),
                                                E2.section(E2.full(), s2)));
              });
              if (out.stopped) return;
            }
          }
        }
}

inline void p3_square(const Ctx& c, const Sq& q, UnitOut& out) {
  const Ext& E1 = *q.e1;
  const Ext& E2 = *q.e2;
  std::vector<u8> psi_bad;
  const u64 bad = psi_pass(q, &psi_bad);
  out.counts.psi_checked += E1.ns * E2.ns;
  out.counts.psi_failures += bad;
  if (bad) {
    p3_direct(c, q, psi_bad, out);
    return;
  }
  const bool dA = c.drop("alpha_continuous"), dB = c.drop("beta_continuous"), dC = c.drop("sections_compatible");
  struct V {
    u64 code;
    int ng;
    u64 cls;
  };
  std::vector<u64> code1;
  std::vector<V> vs;
  for (int ib1 = 0; ib1 < E1.SB.size(); ++ib1) {
    const Mask NB1 = E1.SB.mask[ib1];
    const Classes& U = E1.classes(NB1);
    const Mask bN = q.bimg[ib1];
    for (int ia2 = 0; ia2 < E2.SA.size(); ++ia2) {
      const auto& cos = E2.coset[ia2];
      code1.assign(U.count, 0);
      for (u64 k = 0; k < U.count; ++k)
        for (Index b : U.elems) code1[k] = code1[k] << 8 | cos[q.gamma[U.value[k * E1.nB + b]]];
      for (int ib2 = 0; ib2 < E2.SB.size(); ++ib2) {
        const Mask NB2 = E2.SB.mask[ib2];
        const u64 T2 = E2.ntopo[E2.q(ia2, ib2)] * E2.classes(NB2).weight;
        if (T2 == 0) continue;
        const Mask D2 = NB2 | bN;
        const Classes& W = E2.classes(D2);
        const auto& nag2 = E2.nagao[E2.q(ia2, ib2)];
        vs.clear();
        for (u64 k = 0; k < W.count; ++k) {
          const int ng = nag2[E2.restrict(D2, k, NB2)];
          if (ng < 0) continue;
          u64 code = 0;
          for (Index b : U.elems) code = code << 8 | cos[W.value[k * E2.nB + q.beta[b]]];
          vs.push_back(V{code, ng, k});
        }
        std::stable_sort(vs.begin(), vs.end(), [](const V& x, const V& y) { return x.code < y.code; });
        const u64 w = U.weight * W.weight;
        for (int ia1 = 0; ia1 < E1.SA.size(); ++ia1) {
          const u64 T1 = E1.ntopo[E1.q(ia1, ib1)] * U.weight;
          if (T1 == 0) continue;
          const u64 total = T1 * T2;
          out.counts.instances_enumerated += total;
          if (!(q.ac(ia1, ia2) || dA) || !(q.bc(ib1, ib2) || dB)) {
            out.counts.hypotheses_failed += total;
            continue;
          }
          const auto& nag1 = E1.nagao[E1.q(ia1, ib1)];
          u64 pass = 0, fail = 0;
          for (u64 k = 0; k < U.count; ++k) {
            const int ng1 = nag1[k];
            if (ng1 < 0) continue;
            auto lo = vs.begin(), hi = vs.end();
            if (!dC) {
              lo = std::lower_bound(vs.begin(), vs.end(), code1[k], [](const V& v, u64 x) { return v.code < x; });
              hi = std::upper_bound(lo, vs.end(), code1[k], [](u64 x, const V& v) { return x < v.code; });
            }
            for (auto it = lo; it != hi; ++it) {
              pass += w;
              if (q.gc(ng1, it->ng)) continue;
              fail += w;
              if (out.found.size() < c.cap && !out.stopped)
                record(c, out, [&] {
                  return to_diagram(
                      with_sections(q, ia1, ib1, ng1, ia2, ib2, it->ng, E1.section(NB1, k), E2.section(D2, it->cls)));
                });
            }
          }
          out.counts.hypotheses_failed += total - pass;
          out.counts.conclusions_checked += pass;
          out.counts.conclusion_failures += fail;
          if (out.stopped) return;
        }
      }
    }
  }
}

inline void p3_reference(const Ctx& c, const Sq& q, UnitOut& out) {
  const Ext& E1 = *q.e1;
  const Ext& E2 = *q.e2;
  const ExtensionSquare sq = q.square();
  const auto s1s = enumerate_sections(E1.e);
  const auto s2s = enumerate_sections(E2.e);
  const bool open = c.theorem == "open_fibers";
  if (!open)
    for (const auto& s1 : s1s)
      for (const auto& s2 : s2s) {
        ++out.counts.psi_checked;
        if (!psi_sum_holds(sq, s2, psi_maps(sq, s1, s2))) ++out.counts.psi_failures;
      }
  for (int ib1 = 0; ib1 < E1.SB.size(); ++ib1)
    for (int ia2 = 0; ia2 < E2.SA.size(); ++ia2)
      for (int ib2 = 0; ib2 < E2.SB.size(); ++ib2)
        for (int ia1 = 0; ia1 < E1.SA.size(); ++ia1)
          for (const auto& s1 : s1s) {
            const auto& na1 = E1.SA.list[ia1];
            const auto& nb1 = E1.SB.list[ib1];
            if (topologizing_violation(na1, nb1, factor_set_from_section(E1.e, s1))) continue;
            const Subgroup ng1(E1.e.G(), nagao_core_elements(E1.e, s1, na1, nb1));
            for (const auto& s2 : s2s) {
              const auto& na2 = E2.SA.list[ia2];
              const auto& nb2 = E2.SB.list[ib2];
              if (topologizing_violation(na2, nb2, factor_set_from_section(E2.e, s2))) continue;
              const Subgroup ng2(E2.e.G(), nagao_core_elements(E2.e, s2, na2, nb2));
              SquareInstance x{sq, na1, ng1, nb1, na2, ng2, nb2, s1, s2};
              const Verdict v = open ? verify_open_fibers(x, c.dropped) : verify_p3_generalized(x, c.dropped);
              tally(c, out, v, [&] { return to_diagram(x); });
              if (out.stopped) return;
            }
          }
}

// ---------------------------------------------------------------------------
// open_fibers

inline void open_fibers_square(const Ctx& c, const Sq& q, UnitOut& out) {
  const Ext& E1 = *q.e1;
  const Ext& E2 = *q.e2;
  const bool dropped = c.drop("sigma_open_fibers");
  const Classes& S1 = E1.classes(E1.full());
  const Mask K = q.ball;
  const Classes& KC = E2.classes(K);
  const int nSG1 = E1.SG.size(), nSG2 = E2.SG.size();
  const int nSA1 = E1.SA.size();

  struct Entry {
    int ng;
    u64 weight;
    u64 first;  // a section (s1) or class (s2) realizing it
  };
  using Hist = std::vector<Entry>;
  auto add = [](Hist& h, int ng, u64 w, u64 first) {
    for (auto& e : h)
      if (e.ng == ng) {
        e.weight += w;
        return;
      }
    h.push_back(Entry{ng, w, first});
  };

  for (int ib1 = 0; ib1 < E1.SB.size(); ++ib1) {
    const Mask NB1 = E1.SB.mask[ib1];
    std::vector<Index> rep(E1.nB), R;
    for (Index b = 0; b < E1.nB; ++b) {
      Index least = b;
      for (Index n = 0; n < E1.nB; ++n)
        if (NB1 & bit(n)) least = std::min<Index>(least, E1.addB[b * E1.nB + n]);
      rep[b] = least;
      if (least != b) R.push_back(b);
    }
    // sigma has open fibers iff gamma s1(b) - gamma s1(rep b) = s2 beta(b) - s2 beta(rep b) on R
    std::vector<u64> code1(E1.ns);
    for (u64 s = 0; s < E1.ns; ++s)
      for (Index b : R) {
        const u8* v = &S1.value[s * E1.nB];
        code1[s] = code1[s] << 8 | E2.subG[q.gamma[v[b]] * E2.nG + q.gamma[v[rep[b]]]];
      }
    std::vector<u64> codes = code1;
    std::sort(codes.begin(), codes.end());
    codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
    const std::size_t nblk = codes.size();
    auto block_of = [&](u64 code) -> int {
      auto it = std::lower_bound(codes.begin(), codes.end(), code);
      return it != codes.end() && *it == code ? static_cast<int>(it - codes.begin()) : -1;
    };

    // W1[blk * nSA1 + ia1], plus totals per ia1
    std::vector<Hist> W1(nblk * nSA1), W1tot(nSA1);
    for (u64 s = 0; s < E1.ns; ++s) {
      const int blk = block_of(code1[s]);
      const u64 r = E1.restrict(E1.full(), s, NB1);
      for (int ia1 = 0; ia1 < nSA1; ++ia1) {
        const int ng = E1.nagao[E1.q(ia1, ib1)][r];
        if (ng < 0) continue;
        add(W1[blk * nSA1 + ia1], ng, 1, s);
        add(W1tot[ia1], ng, 1, s);
      }
    }
    std::vector<int> kblock(KC.count);
    for (u64 k = 0; k < KC.count; ++k) {
      u64 code = 0;
      for (Index b : R) {
        const u8* v = &KC.value[k * E2.nB];
        code = code << 8 | E2.subG[v[q.beta[b]] * E2.nG + v[q.beta[rep[b]]]];
      }
      kblock[k] = block_of(code);
    }

    std::vector<Hist> W2(nblk);
    Hist W2tot;
    for (int ia2 = 0; ia2 < E2.SA.size(); ++ia2)
      for (int ib2 = 0; ib2 < E2.SB.size(); ++ib2) {
        const Mask NB2 = E2.SB.mask[ib2];
        const u64 T2 = E2.ntopo[E2.q(ia2, ib2)] * E2.classes(NB2).weight;
        if (T2 == 0) continue;
        const Mask D2 = NB2 | K;
        const Classes& W = E2.classes(D2);
        for (auto& h : W2) h.clear();
        W2tot.clear();
        for (u64 k = 0; k < W.count; ++k) {
          const int ng = E2.nagao[E2.q(ia2, ib2)][E2.restrict(D2, k, NB2)];
          if (ng < 0) continue;
          add(W2tot, ng, W.weight, k);
          const int blk = kblock[E2.restrict(D2, k, K)];
          if (blk >= 0) add(W2[blk], ng, W.weight, k);
        }
        const bool bc = q.bc(ib1, ib2);
        const bool bcs = bc && q.bs(ib1, ib2);
        for (int ia1 = 0; ia1 < nSA1; ++ia1) {
          const u64 T1 = E1.ntopo[E1.q(ia1, ib1)] * E1.classes(NB1).weight;
          if (T1 == 0) continue;
          const u64 total = T1 * T2;
          out.counts.instances_enumerated += total;
          const bool ac = q.ac(ia1, ia2);
          const bool acs = ac && q.as(ia1, ia2);
          u64 pass = 0, fail = 0;
          auto pairs = [&](const Hist& h1, const Hist& h2) {
            for (const auto& x : h1)
              for (const auto& y : h2) {
                const u64 w = x.weight * y.weight;
                pass += w;
                const bool gc = q.gc(x.ng, y.ng);
                const bool gcs = gc && q.gs(x.ng, y.ng);
                if ((ac && bc) == gc && (acs && bcs) == gcs) continue;
                fail += w;
                if (out.found.size() < c.cap && !out.stopped)
                  record(c, out, [&] {
                    return to_diagram(with_sections(q, ia1, ib1, x.ng, ia2, ib2, y.ng, E1.section(E1.full(), x.first),
                                                    E2.section(D2, y.first)));
                  });
              }
          };
          if (dropped) pairs(W1tot[ia1], W2tot);
          else
            for (std::size_t blk = 0; blk < nblk; ++blk) pairs(W1[blk * nSA1 + ia1], W2[blk]);
          out.counts.hypotheses_failed += total - pass;
          out.counts.conclusions_checked += pass;
          out.counts.conclusion_failures += fail;
          if (out.stopped) return;
        }
      }
  }
  (void)nSG1;
  (void)nSG2;
}

// ---------------------------------------------------------------------------
// Theorems on squares with free middle cores

/// Visits (Q, N_G1, N_G2) with both rows topological extensions, in the
/// order ia1, ib1, ia2, ib2, then the two middle cores.
template <class Fn>
void for_each_core_choice(const Sq& q, Fn&& fn) {
  const Ext& E1 = *q.e1;
  const Ext& E2 = *q.e2;
  for (int ia1 = 0; ia1 < E1.SA.size(); ++ia1)
    for (int ib1 = 0; ib1 < E1.SB.size(); ++ib1)
      for (int ia2 = 0; ia2 < E2.SA.size(); ++ia2)
        for (int ib2 = 0; ib2 < E2.SB.size(); ++ib2)
          if (!fn(ia1, ib1, ia2, ib2, E1.topcores[E1.q(ia1, ib1)], E2.topcores[E2.q(ia2, ib2)])) return;
}

inline void p3_discrete_square(const Ctx& c, const Sq& q, UnitOut& out) {
  const bool dropped = c.drop("b1_discrete_or_a2_indiscrete");
  for_each_core_choice(q, [&](int ia1, int ib1, int ia2, int ib2, const auto& tc1, const auto& tc2) {
    const u64 n = tc1.size() * tc2.size();
    out.counts.instances_enumerated += n;
    const bool b1d = ib1 == 0;
    const bool a2i = ia2 == q.e2->SA.whole();
    if (!(b1d || a2i || dropped)) {
      out.counts.hypotheses_failed += n;
      return true;
    }
    out.counts.conclusions_checked += n;
    const bool ac = q.ac(ia1, ia2), bc = q.bc(ib1, ib2);
    const bool acs = ac && q.as(ia1, ia2), bcs = bc && q.bs(ib1, ib2);
    for (int g1 : tc1)
      for (int g2 : tc2) {
        const bool gc = q.gc(g1, g2);
        const bool gcs = gc && q.gs(g1, g2);
        bool ok = true;
        if (b1d || dropped) ok = ok && gc == ac && gcs == (acs && bcs);
        if (a2i || dropped) ok = ok && gc == bc;
        if (ok) continue;
        ++out.counts.conclusion_failures;
        record(c, out, [&] { return to_diagram(q.instance(ia1, ib1, g1, ia2, ib2, g2)); });
        if (out.stopped) return false;
      }
    return true;
  });
}

inline void five_lemma_nagao_square(const Ctx& c, const Sq& q, UnitOut& out) {
  const bool dA = c.drop("alpha_continuous"), dB = c.drop("beta_continuous"), dCase = c.drop("case_a_or_b");
  for_each_core_choice(q, [&](int ia1, int ib1, int ia2, int ib2, const auto& tc1, const auto& tc2) {
    const u64 n = tc1.size() * tc2.size();
    out.counts.instances_enumerated += n;
    const bool ac = q.ac(ia1, ia2), bc = q.bc(ib1, ib2);
    const bool case_a = ib1 == 0;
    const bool case_b = ia2 == 0 && (ia1 == 0 || ib1 == 0);
    if (!(ac || dA) || !(bc || dB) || !(case_a || case_b || dCase)) {
      out.counts.hypotheses_failed += n;
      return true;
    }
    out.counts.conclusions_checked += n;
    for (int g1 : tc1)
      for (int g2 : tc2) {
        const bool gc = q.gc(g1, g2);
        const bool hiff = g2 != 0 || gc == (ac && bc);
        if (gc && hiff) continue;
        ++out.counts.conclusion_failures;
        record(c, out, [&] { return to_diagram(q.instance(ia1, ib1, g1, ia2, ib2, g2)); });
        if (out.stopped) return false;
      }
    return true;
  });
}

inline void five_term_square(const Ctx& c, const Sq& q, UnitOut& out, bool relaxed) {
  const Ext& E1 = *q.e1;
  const Ext& E2 = *q.e2;
  const char* iso_b = relaxed ? "beta_continuous_bijection" : "beta_topological_iso";
  const char* iso_d = relaxed ? "delta_continuous_bijection" : "delta_topological_iso";
  const bool dBeta = c.drop(iso_b), dDelta = c.drop(iso_d), dEps = c.drop("epsilon_injective"),
             dAlpha = c.drop("alpha_surjective"), dCase = c.drop("case_a_or_b");
  auto iso = [&](bool bij, bool cont, bool strict) { return bij && cont && (relaxed || strict); };
  for (const auto& gen : c.generators) {
    const int placement = gen == "pad-middle" ? 0 : gen == "pad-left" ? 1 : 2;
    bool stop = false;
    for_each_core_choice(q, [&](int ia1, int ib1, int ia2, int ib2, const auto& tc1, const auto& tc2) {
      const bool ac = q.ac(ia1, ia2), bc = q.bc(ib1, ib2);
      const bool as = ac && q.as(ia1, ia2), bs = bc && q.bs(ib1, ib2);
      for (int g1 : tc1)
        for (int g2 : tc2) {
          ++out.counts.instances_enumerated;
          const bool gc = q.gc(g1, g2), gs = gc && q.gs(g1, g2);
          bool h_beta = true, h_delta = true, h_eps = true, h_alpha = true, h_case = true;
          // the vertical map in the middle slot, with its cores and images
          bool v_bij, v_c;
          Mask v_all, n2, full2;
          bool reduction;
          if (placement == 0) {
            h_beta = iso(q.a_bij, ac, as);
            h_delta = iso(q.b_bij, bc, bs);
            h_case = (ib1 == 0 && ib2 == 0) || (ia1 == 0 && ia2 == 0);
            v_bij = q.g_bij;
            v_c = gc;
            v_all = q.gall;
            n2 = E2.SG.mask[g2];
            full2 = full_mask(E2.nG);
            reduction = E1.row_topological(ia1, ib1, g1) && E2.row_topological(ia2, ib2, g2);
          } else if (placement == 1) {
            h_beta = iso(q.g_bij, gc, gs);
            h_alpha = q.aall == full_mask(E2.nA);
            v_bij = q.b_bij;
            v_c = bc;
            v_all = q.ball;
            n2 = E2.SB.mask[ib2];
            full2 = full_mask(E2.nB);
            reduction = image(E1.pi, E1.SG.mask[g1]) == E1.SB.mask[ib1] &&
                        image(E2.pi, E2.SG.mask[g2]) == E2.SB.mask[ib2];
          } else {
            h_delta = iso(q.g_bij, gc, gs);
            h_eps = q.b_inj;
            v_bij = q.a_bij;
            v_c = ac;
            v_all = q.aall;
            n2 = E2.SA.mask[ia2];
            full2 = full_mask(E2.nA);
            reduction = image(E1.iota, E1.SA.mask[ia1]) == (image(E1.iota, full_mask(E1.nA)) & E1.SG.mask[g1]) &&
                        image(E2.iota, E2.SA.mask[ia2]) == (image(E2.iota, full_mask(E2.nA)) & E2.SG.mask[g2]);
          }
          if (!(h_beta || dBeta) || !(h_delta || dDelta) || !(h_eps || dEps) || !(h_alpha || dAlpha) ||
              !(h_case || dCase)) {
            ++out.counts.hypotheses_failed;
            continue;
          }
          ++out.counts.conclusions_checked;
          const int sum = count(v_all) * count(n2) / count(v_all & n2);
          const bool surj = v_c && sum == count(full2);
          const bool hcb = count(n2) != 1 || (v_c && v_bij);
          if (v_bij && v_c && surj && reduction && hcb) continue;
          ++out.counts.conclusion_failures;
          record(c, out, [&] { return to_diagram(pad_square(q.instance(ia1, ib1, g1, ia2, ib2, g2), gen)); });
          if (out.stopped) {
            stop = true;
            return false;
          }
        }
      return true;
    });
    if (stop) return;
  }
}

inline void free_core_reference(const Ctx& c, const Sq& q, UnitOut& out) {
  const ExtensionSquare sq = q.square();
  std::vector<std::string> gens{""};
  const bool five = c.theorem.rfind("five_lemma_topological", 0) == 0;
  const bool relaxed = c.theorem == "five_lemma_topological_relaxed";
  if (five) gens = c.generators;
  for (const auto& gen : gens) {
    bool stop = false;
    for_each_core_choice(q, [&](int ia1, int ib1, int ia2, int ib2, const auto& tc1, const auto& tc2) {
      for (int g1 : tc1)
        for (int g2 : tc2) {
          SquareInstance x{sq,
                           q.e1->SA.list[ia1], q.e1->SG.list[g1], q.e1->SB.list[ib1],
                           q.e2->SA.list[ia2], q.e2->SG.list[g2], q.e2->SB.list[ib2],
                           std::nullopt, std::nullopt};
          if (five) {
            const FiveTermInstance f = pad_square(x, gen);
            tally(c, out, verify_topological_five_lemma(f, c.dropped, relaxed), [&] { return to_diagram(f); });
          } else if (c.theorem == "p3_discrete") {
            tally(c, out, verify_p3_discrete(x, c.dropped), [&] { return to_diagram(x); });
          } else {
            tally(c, out, verify_five_lemma_nagao(x, c.dropped), [&] { return to_diagram(x); });
          }
          if (out.stopped) {
            stop = true;
            return false;
          }
        }
      return true;
    });
    if (stop) return;
  }
}

// ---------------------------------------------------------------------------
// Units

struct Family {
  std::vector<FinAbGroup> groups;
  std::vector<Ext> exts;
};

inline Family build_family(const FamilySpec& spec, bool with_extensions) {
  if (spec.max_group_order < 1) throw Error(ErrorKind::MalformedInput, "max_group_order must be at least 1");
  if (spec.max_group_order > 8) throw Error(ErrorKind::BudgetExceeded, "max_group_order above 8");
  Family f;
  f.groups = all_groups_up_to_order(spec.max_group_order);
  if (!with_extensions) return f;
  for (const auto& A : f.groups)
    for (const auto& B : f.groups) {
      auto reps = cocycle_class_representatives(A, B);
      if (spec.max_cocycle_count && reps.size() > *spec.max_cocycle_count) reps.resize(*spec.max_cocycle_count);
      for (const auto& h : reps) f.exts.push_back(make_ext(realize(h).extension));
    }
  return f;
}

inline void square_unit(const Ctx& c, const Ext& e1, const Ext& e2, UnitOut& out) {
  for_each_square(e1, e2, [&](const Sq& q) {
    ++out.squares;
    const std::string& t = c.theorem;
    if (c.reference) {
      if (t == "p3_generalized" || t == "open_fibers") p3_reference(c, q, out);
      else free_core_reference(c, q, out);
    } else if (t == "p3_generalized") {
      p3_square(c, q, out);
    } else if (t == "open_fibers") {
      open_fibers_square(c, q, out);
    } else if (t == "p3_discrete") {
      p3_discrete_square(c, q, out);
    } else if (t == "five_lemma_nagao") {
      five_lemma_nagao_square(c, q, out);
    } else {
      five_term_square(c, q, out, t == "five_lemma_topological_relaxed");
    }
    return !out.stopped;
  });
}

inline void haus_unit(const Ctx& c, const Ext& e, UnitOut& out) {
  for (int ia = 0; ia < e.SA.size(); ++ia)
    for (int ib = 0; ib < e.SB.size(); ++ib)
      for (int ig : e.topcores[e.q(ia, ib)]) {
        const ExtensionInstance x{e.e, e.SA.list[ia], e.SG.list[ig], e.SB.list[ib]};
        tally(c, out, verify_haus_exactness(x, c.dropped), [&] { return to_diagram(x); });
        if (out.stopped) return;
      }
}

struct HomData {
  Homomorphism hom;
  std::vector<u8> table;
  std::vector<Mask> img;  // image of each subgroup of the source
  Mask all = 0;
  bool injective = false;
};

inline std::vector<HomData> hom_data(const FinAbGroup& s, const FinAbGroup& t, const Subgroups& ss) {
  std::vector<HomData> out;
  for (auto& h : all_homs(s, t)) {
    HomData d{h, table_of(h), {}, 0, false};
    for (Mask m : ss.mask) d.img.push_back(image(d.table, m));
    d.all = d.img.back();
    d.injective = static_cast<Index>(count(d.all)) == s.order();
    out.push_back(std::move(d));
  }
  return out;
}

/// Unit (A, B): every A', B', then f, beta, alpha, g with g alpha = beta f,
/// then cores on B, B', A, A'.
inline void injectivity_unit(const Ctx& c, const Family& fam, std::size_t ai, std::size_t bi, UnitOut& out) {
  const FinAbGroup& A = fam.groups[ai];
  const FinAbGroup& B = fam.groups[bi];
  const Subgroups SA = subgroups_of(A), SB = subgroups_of(B);
  const bool dCont = c.drop("maps_continuous"), dfi = c.drop("f_injective"), dgi = c.drop("g_injective"),
             dai = c.drop("alpha_injective"), dbi = c.drop("beta_injective"), dfs = c.drop("f_strict"),
             dgs = c.drop("g_strict"), dbs = c.drop("beta_strict");
  const auto fs = hom_data(A, B, SA);
  for (const auto& A2 : fam.groups)
    for (const auto& B2 : fam.groups) {
      const Subgroups SA2 = subgroups_of(A2), SB2 = subgroups_of(B2);
      const auto betas = hom_data(B, B2, SB);
      const auto alphas = hom_data(A, A2, SA);
      const auto gs = hom_data(A2, B2, SA2);
      const u64 cores = static_cast<u64>(SA.size()) * SB.size() * SA2.size() * SB2.size();
      for (const auto& f : fs)
        for (const auto& beta : betas) {
          std::vector<u8> bf(A.order());
          for (Index x = 0; x < A.order(); ++x) bf[x] = beta.table[f.table[x]];
          for (const auto& alpha : alphas)
            for (const auto& g : gs) {
              bool commutes = true;
              for (std::size_t i = 0; i < A.rank() && commutes; ++i) {
                const Index x = A.generator(i);
                commutes = g.table[alpha.table[x]] == bf[x];
              }
              if (!commutes) continue;
              out.counts.instances_enumerated += cores;
              if (!(f.injective || dfi) || !(g.injective || dgi) || !(alpha.injective || dai) ||
                  !(beta.injective || dbi)) {
                out.counts.hypotheses_failed += cores;
                continue;
              }
              for (int nb = 0; nb < SB.size(); ++nb)
                for (int nb2 = 0; nb2 < SB2.size(); ++nb2) {
                  const u64 inner = static_cast<u64>(SA.size()) * SA2.size();
                  const bool bc = subset(beta.img[nb], SB2.mask[nb2]);
                  const bool bstrict = bc && beta.img[nb] == (beta.all & SB2.mask[nb2]);
                  if (!(bc || dCont) || !(bstrict || dbs)) {
                    out.counts.hypotheses_failed += inner;
                    continue;
                  }
                  for (int na = 0; na < SA.size(); ++na) {
                    const bool fc = subset(f.img[na], SB.mask[nb]);
                    const bool fstrict = fc && f.img[na] == (f.all & SB.mask[nb]);
                    if (!(fc || dCont) || !(fstrict || dfs)) {
                      out.counts.hypotheses_failed += SA2.size();
                      continue;
                    }
                    for (int na2 = 0; na2 < SA2.size(); ++na2) {
                      const bool gc = subset(g.img[na2], SB2.mask[nb2]);
                      const bool gstrict = gc && g.img[na2] == (g.all & SB2.mask[nb2]);
                      const bool ac = subset(alpha.img[na], SA2.mask[na2]);
                      if (!((gc && ac) || dCont) || !(gstrict || dgs)) {
                        ++out.counts.hypotheses_failed;
                        continue;
                      }
                      ++out.counts.conclusions_checked;
                      if (ac && alpha.img[na] == (alpha.all & SA2.mask[na2])) continue;
                      ++out.counts.conclusion_failures;
                      record(c, out, [&] {
                        return to_diagram(InjectivitySquare{
                            TopAbGroup(A, SA.list[na]), TopAbGroup(B, SB.list[nb]), TopAbGroup(A2, SA2.list[na2]),
                            TopAbGroup(B2, SB2.list[nb2]), f.hom, g.hom, alpha.hom, beta.hom});
                      });
                      if (out.stopped) return;
                    }
                  }
                }
            }
        }
    }
}

inline void injectivity_reference(const Ctx& c, const Family& fam, std::size_t ai, std::size_t bi, UnitOut& out) {
  const FinAbGroup& A = fam.groups[ai];
  const FinAbGroup& B = fam.groups[bi];
  for (const auto& A2 : fam.groups)
    for (const auto& B2 : fam.groups)
      for (const auto& f : all_homs(A, B))
        for (const auto& beta : all_homs(B, B2))
          for (const auto& alpha : all_homs(A, A2))
            for (const auto& g : all_homs(A2, B2)) {
              if (!(compose(g, alpha) == compose(beta, f))) continue;
              for (const auto& nb : all_subgroups(B))
                for (const auto& nb2 : all_subgroups(B2))
                  for (const auto& na : all_subgroups(A))
                    for (const auto& na2 : all_subgroups(A2)) {
                      const InjectivitySquare x{TopAbGroup(A, na), TopAbGroup(B, nb), TopAbGroup(A2, na2),
                                                TopAbGroup(B2, nb2), f, g, alpha, beta};
                      tally(c, out, verify_strictness_injectivity(x, c.dropped), [&] { return to_diagram(x); });
                      if (out.stopped) return;
                    }
            }
}

inline unsigned thread_count(unsigned requested) {
  if (requested) return requested;
  if (const char* env = std::getenv("TOPAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs units 0..n-1 on a pool; results land in unit order. With
/// stop_at_first, units after the first stopping unit are discarded.
template <class Fn>
std::vector<UnitOut> run_units(std::size_t n, unsigned threads, bool stop_at_first, Fn&& fn) {
  std::vector<UnitOut> outs(n);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> first_stop{n};
  std::mutex err_mu;
  std::exception_ptr err;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || (stop_at_first && i > first_stop.load())) return;
      try {
        fn(i, outs[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
      if (outs[i].stopped) {
        std::size_t cur = first_stop.load();
        while (i < cur && !first_stop.compare_exchange_weak(cur, i)) {
        }
      }
    }
  };
  const unsigned t = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (t == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < t; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (err) std::rethrow_exception(err);
  if (stop_at_first && first_stop.load() < n) outs.resize(first_stop.load() + 1);
  return outs;
}

// ---------------------------------------------------------------------------
// Witness shrinking

/// Re-derives the middle cores of a diagram carrying sections from the
/// Nagao topology; false if a section stops being topologizing.
inline bool renagao(Diagram& d) {
  for (const auto& [name, s] : d.sections) {
    const std::string row = name == "s1" ? "1" : "2";
    const Homomorphism& iota = d.edge("iota" + row).hom;
    const Homomorphism& pi = d.edge("pi" + row).hom;
    const GroupExtension e(iota, pi);
    const Subgroup& na = d.node("A" + row).core();
    const Subgroup& nb = d.node("B" + row).core();
    if (topologizing_violation(na, nb, factor_set_from_section(e, s.section))) return false;
    d.nodes["G" + row] = TopAbGroup(e.G(), Subgroup(e.G(), nagao_core_elements(e, s.section, na, nb)));
  }
  return true;
}

/// Greedily replaces node cores by smaller subgroups while the instance stays
/// a conclusion failure.
inline Diagram shrink(const std::string& theorem, const Diagram& d, const Dropped& dropped) {
  const bool nagao = !d.sections.empty();
  auto fails = [&](const Diagram& x) {
    try {
      return verify_instance(theorem, x, dropped).failure();
    } catch (const Error&) {
      return false;
    }
  };
  Diagram cur = d;
  std::vector<std::string> names;
  for (const auto& [name, node] : d.nodes)
    if (!(nagao && (name == "G1" || name == "G2"))) names.push_back(name);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& name : names) {
      const TopAbGroup node = cur.node(name);
      for (const auto& s : all_subgroups(node.group())) {
        if (s.size() >= node.core().size() || !s.is_subset_of(node.core())) continue;
        Diagram cand = cur;
        cand.nodes[name] = TopAbGroup(node.group(), s);
        if (nagao && !renagao(cand)) continue;
        if (fails(cand)) {
          cur = std::move(cand);
          changed = true;
          break;
        }
      }
    }
  }
  return cur;
}

}  // namespace search_detail

// ---------------------------------------------------------------------------

inline void validate_task(const SearchTask& task) {
  validate_dropped(task.theorem, task.dropped);
  for (const auto& g : task.family.generators)
    if (std::find(known_generators().begin(), known_generators().end(), g) == known_generators().end())
      throw Error(ErrorKind::MalformedInput, "unknown row generator " + g);
}

inline SearchResult run_search(const SearchTask& task, const RunOptions& opts = {}) {
  using namespace search_detail;
  validate_task(task);
  const TheoremInfo& info = theorem_info(task.theorem);
  Ctx c;
  c.theorem = task.theorem;
  c.dropped = Dropped(task.dropped.begin(), task.dropped.end());
  c.generators = task.family.generators;
  c.cap = task.stop_at_first ? 1 : task.max_witnesses;
  c.stop_at_first = task.stop_at_first;
  c.reference = opts.reference;

  const bool injectivity = task.theorem == "strictness_injectivity";
  const bool haus = task.theorem == "haus_exactness";
  const Family fam = build_family(task.family, !injectivity);
  const unsigned threads = thread_count(opts.threads);

  std::vector<UnitOut> outs;
  SearchResult result;
  auto& sizes = result.summary.family_sizes;
  sizes.emplace_back("groups", fam.groups.size());
  if (injectivity) {
    const std::size_t ng = fam.groups.size();
    outs = run_units(ng * ng, threads, c.stop_at_first, [&](std::size_t i, UnitOut& out) {
      if (c.reference) injectivity_reference(c, fam, i / ng, i % ng, out);
      else injectivity_unit(c, fam, i / ng, i % ng, out);
    });
  } else if (haus) {
    sizes.emplace_back("extensions", fam.exts.size());
    outs = run_units(fam.exts.size(), threads, c.stop_at_first,
                     [&](std::size_t i, UnitOut& out) { haus_unit(c, fam.exts[i], out); });
  } else {
    sizes.emplace_back("extensions", fam.exts.size());
    const std::size_t ne = fam.exts.size();
    outs = run_units(ne * ne, threads, c.stop_at_first, [&](std::size_t i, UnitOut& out) {
      square_unit(c, fam.exts[i / ne], fam.exts[i % ne], out);
    });
    u64 squares = 0;
    for (const auto& o : outs) squares += o.squares;
    sizes.emplace_back("squares", squares);
    if (task.theorem.rfind("five_lemma_topological", 0) == 0)
      sizes.emplace_back("row_generators", task.family.generators.size());
  }

  std::vector<Diagram> found;
  for (auto& o : outs) {
    result.summary.counts += o.counts;
    result.summary.stopped_early = result.summary.stopped_early || o.stopped;
    for (auto& d : o.found)
      if (found.size() < c.cap) found.push_back(std::move(d));
  }

  std::set<std::string> seen;
  for (const auto& d : found) {
    VerificationReport first = verify(task.theorem, d, task.dropped);
    if (!first.verdict.failure()) throw std::logic_error("sweep reported an instance that does not replay as a failure");
    const Diagram small = opts.shrink ? shrink(task.theorem, d, c.dropped) : d;
    VerificationReport r = verify(task.theorem, small, task.dropped);
    if (!r.verdict.failure()) throw std::logic_error("shrunk witness does not replay as a failure");
    r.witness = true;
    if (opts.shrink) r.unshrunk = d;
    if (!seen.insert(json::diagram_to_json(small).dump()).second) continue;
    result.witnesses.push_back(std::move(r));
  }
  result.summary.task = task;
  result.summary.witnesses = result.witnesses.size();
  result.summary.model_collapse = info.model_collapse;
  return result;
}

}  // namespace topab
