#pragma once

// Morphisms of extensions
//
//   0 -> A1 -> G1 -> B1 -> 0
//        |a    |g    |b
//   0 -> A2 -> G2 -> B2 -> 0
//
// and the section-comparison map sigma(b) = iota2^-1(gamma s1(b) - s2 beta(b)).

#include <vector>

#include "topab/extension.hpp"

namespace topab {

class ExtensionSquare {
 public:
  ExtensionSquare() = default;
  ExtensionSquare(GroupExtension e1, GroupExtension e2, Homomorphism alpha, Homomorphism beta, Homomorphism gamma)
      : e1_(std::move(e1)), e2_(std::move(e2)), alpha_(std::move(alpha)), beta_(std::move(beta)), gamma_(std::move(gamma)) {
    if (!(alpha_.source() == e1_.A()) || !(alpha_.target() == e2_.A()) || !(beta_.source() == e1_.B()) ||
        !(beta_.target() == e2_.B()) || !(gamma_.source() == e1_.G()) || !(gamma_.target() == e2_.G()))
      throw Error(ErrorKind::CompositionMismatch, "vertical maps do not match the rows");
    if (!(compose(gamma_, e1_.iota()) == compose(e2_.iota(), alpha_)))
      throw Error(ErrorKind::NotWellDefined, "left square does not commute");
    if (!(compose(e2_.pi(), gamma_) == compose(beta_, e1_.pi())))
      throw Error(ErrorKind::NotWellDefined, "right square does not commute");
  }

  const GroupExtension& top_row() const { return e1_; }
  const GroupExtension& bottom_row() const { return e2_; }
  const Homomorphism& alpha() const { return alpha_; }
  const Homomorphism& beta() const { return beta_; }
  const Homomorphism& gamma() const { return gamma_; }

 private:
  GroupExtension e1_;
  GroupExtension e2_;
  Homomorphism alpha_;
  Homomorphism beta_;
  Homomorphism gamma_;
};

/// Table B1 -> A2. The difference lies in iota2(A2) because pi2 gamma = beta pi1.
inline std::vector<Index> sigma(const ExtensionSquare& sq, const Section& s1, const Section& s2) {
  const auto& e1 = sq.top_row();
  const auto& e2 = sq.bottom_row();
  std::vector<Index> out(e1.B().order());
  for (Index b = 0; b < e1.B().order(); ++b) {
    const Index g = e2.G().sub(sq.gamma()(s1(b)), s2(sq.beta()(b)));
    const Index a = e2.iota_inverse(g);
    if (a == npos) throw Error(ErrorKind::ValueOutsideIota2Image, "gamma s1(b) - s2 beta(b) outside iota2(A2)");
    out[b] = a;
  }
  return out;
}

/// sigma(N_B1) ⊆ N_A2.
inline bool is_compatible(const std::vector<Index>& sigma_table, const Subgroup& nb1, const Subgroup& na2) {
  for (Index b : nb1.elements())
    if (!na2.contains(sigma_table[b])) return false;
  return true;
}

/// Every fiber of sigma is a union of N_B1-cosets.
inline bool has_open_fibers(const std::vector<Index>& sigma_table, const TopAbGroup& b1) {
  const FinAbGroup& B = b1.group();
  for (Index b = 0; b < B.order(); ++b)
    for (Index n : b1.core().elements())
      if (sigma_table[B.add(b, n)] != sigma_table[b]) return false;
  return true;
}

/// Maps A1 x B1 -> A2 x B2 on pair indices.
struct PsiMaps {
  std::vector<Index> psi;   // theta_s2^-1 gamma theta_s1
  std::vector<Index> psi1;  // (alpha(a), 0)
  std::vector<Index> psi2;  // (sigma(b), beta(b))
};

inline PsiMaps psi_maps(const ExtensionSquare& sq, const Section& s1, const Section& s2) {
  const auto& e1 = sq.top_row();
  const auto& e2 = sq.bottom_row();
  const TwistedGroup t1(factor_set_from_section(e1, s1));
  const TwistedGroup t2(factor_set_from_section(e2, s2));
  const Theta th1 = theta(e1, s1, t1);
  const Theta th2 = theta(e2, s2, t2);
  const auto sg = sigma(sq, s1, s2);
  PsiMaps out;
  out.psi.resize(t1.order());
  out.psi1.resize(t1.order());
  out.psi2.resize(t1.order());
  for (Index x = 0; x < t1.order(); ++x) {
    const Index a = t1.a_of(x);
    const Index b = t1.b_of(x);
    out.psi[x] = th2.backward[sq.gamma()(th1.forward[x])];
    out.psi1[x] = t2.pair(sq.alpha()(a), 0);
    out.psi2[x] = t2.pair(sg[b], sq.beta()(b));
  }
  return out;
}

/// psi = psi1 +_{s2} psi2 pointwise.
inline bool psi_sum_holds(const ExtensionSquare& sq, const Section& s2, const PsiMaps& m) {
  const TwistedGroup t2(factor_set_from_section(sq.bottom_row(), s2));
  for (std::size_t x = 0; x < m.psi.size(); ++x)
    if (m.psi[x] != t2.add(m.psi1[x], m.psi2[x])) return false;
  return true;
}

/// s2 = gamma s1 eta, with eta the first-in-index-order section of a surjective beta.
inline Section compatible_partner(const ExtensionSquare& sq, const Section& s1) {
  const auto& B1 = sq.top_row().B();
  const auto& B2 = sq.bottom_row().B();
  std::vector<Index> eta(B2.order(), npos);
  for (Index b = 0; b < B1.order(); ++b) {
    const Index c = sq.beta()(b);
    if (eta[c] == npos) eta[c] = b;
  }
  Section s2{std::vector<Index>(B2.order())};
  for (Index c = 0; c < B2.order(); ++c) {
    if (eta[c] == npos) throw Error(ErrorKind::HypothesisViolation, "beta is not surjective");
    s2.table[c] = sq.gamma()(s1(eta[c]));
  }
  validate_section(sq.bottom_row(), s2);
  return s2;
}

}  // namespace topab
