#ifndef LOOPTWIST_FOX_HPP
#define LOOPTWIST_FOX_HPP

// Generic Fox pairings on free-group rings: bilinear extension from a
// generator table, derived and homological forms, and the generic twist
// map t_{r,C} = exp(sigma_eta(r (log C)^2, -)) modulo a power of the
// augmentation ideal.

#include <cstdlib>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "looptwist/expansion.hpp"
#include "looptwist/word.hpp"

namespace looptwist {

// A Fox pairing is determined by its values on pairs of positive
// generators; values involving inverse generators follow from the axioms
//   eta(ab,c) = a eta(b,c) + eps(b) eta(a,c)
//   eta(a,bc) = eta(a,b) c + eps(b) eta(a,c)
// applied to x x^{-1} = 1, so no inconsistent table can be built.
struct FoxPairing {
  int rank = 0;
  std::map<std::pair<int, int>, RingElement> table;  // positive gens only

  const RingElement& gen_value(int i, int j) const {
    static const RingElement zero;
    auto it = table.find({i, j});
    return it == table.end() ? zero : it->second;
  }
};

namespace detail {

// eta on a pair of letters (signed generators)
inline RingElement fox_letters(const FoxPairing& P, int l1, int l2) {
  RingElement v = P.gen_value(std::abs(l1), std::abs(l2));
  if (l1 < 0) v = scale(mul(ring_of(gen_word(l1)), v), -1);
  if (l2 < 0) v = scale(mul(v, ring_of(gen_word(l2))), -1);
  return v;
}

}  // namespace detail

// the unique bilinear extension satisfying both Fox axioms:
// eta(u, v) = sum_{p,q} u_{<p} eta(u_p, v_q) v_{>q} on words
inline RingElement extend_pairing(const FoxPairing& P, const RingElement& x,
                                  const RingElement& y) {
  RingElement out;
  for (const auto& [u, cu] : x.terms)
    for (const auto& [v, cv] : y.terms) {
      Rational c = cu * cv;
      for (std::size_t p = 0; p < u.ls.size(); ++p)
        for (std::size_t q = 0; q < v.ls.size(); ++q) {
          RingElement mid = detail::fox_letters(P, u.ls[p], v.ls[q]);
          if (mid.terms.empty()) continue;
          GroupWord pre{std::vector<int>(u.ls.begin(), u.ls.begin() + p)};
          GroupWord post{std::vector<int>(v.ls.begin() + q + 1, v.ls.end())};
          out = add(out, scale(mul(ring_of(pre), mul(mid, ring_of(post))), c));
        }
    }
  return out;
}

// derived form: on group-like arguments (words) u, v
//   sigma_eta(u, v) = sum_w c_w  v w^{-1} u w   where eta(u,v) = sum c_w w,
// extended bilinearly; sigma_eta(a,-) is a derivation for every a
inline RingElement derived_form(const FoxPairing& P, const RingElement& a,
                                const RingElement& b) {
  RingElement out;
  for (const auto& [u, cu] : a.terms)
    for (const auto& [v, cv] : b.terms) {
      RingElement mid =
          extend_pairing(P, ring_of(u), ring_of(v));
      for (const auto& [w, c] : mid.terms)
        out.add_term(mul(mul(v, inverse(w)), mul(u, w)), cu * cv * c);
    }
  return out;
}

// homological form eps(eta(a,b)) on augmentation-zero arguments;
// descends to I/I^2
inline Rational homological_form(const FoxPairing& P, const RingElement& a,
                                 const RingElement& b) {
  if (augmentation(a) != 0 || augmentation(b) != 0)
    throw std::invalid_argument(
        "homological_form requires augmentation-zero arguments");
  return augmentation(extend_pairing(P, a, b));
}

// ---------------------------------------------------------------------------
// The generic twist map.
// ---------------------------------------------------------------------------
struct TwistEndomorphism {
  int rank = 0;
  int trunc = 0;                    // everything is modulo I^trunc
  std::vector<RingElement> images;  // canonical representatives
};

// t_{r,C} = exp(sigma_eta(r (log C)^2, -)) mod I^N. The exponential
// terminates by weak nilpotence: iteration stops once the derivation's
// image of every generator lies in I^N, with a hard cap of N(N+1) steps.
inline TwistEndomorphism generic_twist(const FoxPairing& P, const GroupWord& C,
                                       const Rational& r, int N) {
  RingElement cm1 = sub(ring_of(C), ring_one());
  if (homological_form(P, cm1, cm1) != 0)
    throw std::domain_error("generic_twist requires an isotropic class");
  Expansion th0 = exponential_expansion_free(P.rank, N);
  // the derived form drops two filtration degrees, so (log C)^2 must be
  // accurate modulo I^{N+2} for the twist to be correct modulo I^N
  Expansion th_ext = exponential_expansion_free(P.rank, N + 2);
  RingElement lc = detail::ring_log(th_ext, C, N + 2);
  RingElement L = detail::reduce_mod_In(th_ext, scale(mul(lc, lc), r));
  TwistEndomorphism E;
  E.rank = P.rank;
  E.trunc = N;
  for (int i = 1; i <= P.rank; ++i) {
    RingElement image = ring_of(gen_word(i));
    RingElement term = image;
    Rational fact = 1;
    int k = 0;
    while (true) {
      term = detail::reduce_mod_In(th0, derived_form(P, L, term));
      if (term.terms.empty()) break;
      if (++k > N * (N + 1))
        throw std::logic_error("generic_twist: exponential did not terminate");
      fact *= k;
      image = add(image, scale(term, 1 / fact));
    }
    E.images.push_back(detail::reduce_mod_In(th0, image));
  }
  return E;
}

// apply the endomorphism to a word / ring element, modulo I^trunc
inline RingElement apply_twist(const TwistEndomorphism& E, const GroupWord& w) {
  Expansion th0 = exponential_expansion_free(E.rank, E.trunc);
  RingElement out = ring_one();
  for (int l : w.ls) {
    const RingElement& im = E.images.at(std::abs(l) - 1);
    out = detail::reduce_mod_In(
        th0, mul(out, l > 0 ? im : detail::ring_inverse_mod(th0, im, E.trunc)));
  }
  return out;
}

inline RingElement apply_twist(const TwistEndomorphism& E,
                               const RingElement& x) {
  RingElement out;
  for (const auto& [w, c] : x.terms) out = add(out, scale(apply_twist(E, w), c));
  return out;
}

// two endomorphisms agree mod I^trunc iff the coordinates of all images match
inline bool twists_equal(const TwistEndomorphism& A,
                         const TwistEndomorphism& B) {
  if (A.rank != B.rank || A.trunc != B.trunc) return false;
  Expansion th0 = exponential_expansion_free(A.rank, A.trunc);
  for (int i = 0; i < A.rank; ++i)
    if (!sub(apply_expansion(th0, A.images[i]),
             apply_expansion(th0, B.images[i]))
             .is_zero())
      return false;
  return true;
}

}  // namespace looptwist

#endif
