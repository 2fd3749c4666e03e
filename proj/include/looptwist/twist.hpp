#ifndef LOOPTWIST_TWIST_HPP
#define LOOPTWIST_TWIST_HPP

// Generalized Dehn twists t_{r,gamma} = exp(r sigma((log gamma)^2)) as
// truncated automorphisms in theta_0 coordinates: construction through the
// geometric sigma, composition/inversion, nilpotent-quotient actions by
// insertion, the Johnson-type degree, structural (Hopf / boundary / eta)
// checks, and the diagrammatic logarithm through the Xi isomorphism.

#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "looptwist/diagrams.hpp"
#include "looptwist/expansion.hpp"
#include "looptwist/surface.hpp"
#include "looptwist/word.hpp"

namespace looptwist {

// ---------------------------------------------------------------------------
// L-truncation.
// ---------------------------------------------------------------------------
// The polynomial obtained by expanding L(gamma) = (1/2)(log gamma)^2 in
// powers of (gamma - 1) and discarding terms of (gamma-1)-order >= m,
// returned as a combination of powers of the class. Leading term
// (gamma-1)^2 / 2, and invariant under gamma -> gamma^{-1}.
inline ClassCombo L_truncation(const ConjClass& gamma, int m) {
  if (m < 2) throw std::invalid_argument("L_truncation needs order >= 2");
  // log(1+u) = sum_k (-1)^{k+1} u^k / k with u = gamma - 1
  std::vector<Rational> lg(m, 0), c(m, 0);
  for (int k = 1; k < m; ++k) lg[k] = rat(k % 2 ? 1 : -1, k);
  for (int i = 1; i < m; ++i)
    for (int j = 1; i + j < m; ++j) c[i + j] += lg[i] * lg[j] / 2;
  // re-expand (gamma-1)^j = sum_i binom(j,i) (-1)^{j-i} gamma^i
  std::vector<Rational> pow_coeff(m, 0);
  for (int j = 2; j < m; ++j) {
    if (c[j] == 0) continue;
    Rational binom = 1;
    for (int i = 0; i <= j; ++i) {
      pow_coeff[i] += c[j] * binom * ((j - i) % 2 ? -1 : 1);
      binom = binom * (j - i) / (i + 1);
    }
  }
  ClassCombo out;
  GroupWord g = gamma.word(), p;
  for (int i = 0; i < m; ++i) {
    out.add_term(class_of(p), pow_coeff[i]);
    p = mul(p, g);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Truncated automorphisms in theta_0 coordinates.
// ---------------------------------------------------------------------------
struct TruncatedAutomorphism {
  int genus = 0;
  int trunc = 0;                      // everything modulo tensor degree trunc
  std::vector<TensorElement> images;  // group-like images of the generators
  std::string recipe;                 // construction provenance

  int nletters() const { return 2 * genus; }
};

inline TruncatedAutomorphism identity_automorphism(int genus, int N) {
  TruncatedAutomorphism u{genus, N, {}, "identity"};
  for (int l = 1; l <= 2 * genus; ++l)
    u.images.push_back(t_exp(tensor_letter(2 * genus, N, l)));
  return u;
}

// the automorphism as a letter-substitution endomorphism: since every
// algebra endomorphism commutes with polynomials, u(X_j) = log u(exp X_j)
inline TensorEndo endo_of(const TruncatedAutomorphism& u) {
  TensorEndo E{u.nletters(), u.trunc, {}};
  for (const auto& im : u.images) E.letter_images.push_back(t_log(im));
  return E;
}

namespace detail {

// memoized monomial-image table for one fixed endomorphism; the image of a
// monomial is the product of its letter images, built by prefix sharing
struct EndoCache {
  TensorEndo U;
  std::map<Monomial, TensorElement> memo;

  explicit EndoCache(TensorEndo e) : U(std::move(e)) {}

  const TensorElement& image(const Monomial& m) {
    auto it = memo.find(m);
    if (it != memo.end()) return it->second;
    TensorElement r =
        m.empty() ? tensor_one(U.nletters, U.trunc)
                  : mul(image(Monomial(m.begin(), m.end() - 1)),
                        U.letter_images.at(m.back() - 1));
    return memo.emplace(m, std::move(r)).first->second;
  }

  TensorElement apply(const TensorElement& x) {
    TensorElement r = tensor_zero(U.nletters, U.trunc);
    for (const auto& [m, q] : x.terms) r = add(r, scale(image(m), q));
    return r;
  }
};

}  // namespace detail

inline TensorElement apply_automorphism(const TruncatedAutomorphism& u,
                                        const GroupWord& w) {
  TensorElement r = tensor_one(u.nletters(), u.trunc);
  for (int l : w.ls) {
    const TensorElement& im = u.images.at(std::abs(l) - 1);
    r = mul(r, l > 0 ? im : tensor_inverse(im));
  }
  return r;
}

inline TensorElement apply_automorphism(const TruncatedAutomorphism& u,
                                        const TensorElement& x) {
  detail::EndoCache cache(endo_of(u));
  return cache.apply(x);
}

// the automorphism induced in coordinates by a free-group substitution
inline TruncatedAutomorphism substitution_automorphism(
    int genus, const std::vector<GroupWord>& phi, int N,
    const std::string& recipe = "substitution") {
  Expansion th0 = exponential_expansion(genus, N);
  TruncatedAutomorphism u{genus, N, {}, recipe};
  for (const auto& w : phi) u.images.push_back(apply_expansion(th0, w));
  return u;
}

inline TruncatedAutomorphism compose(const TruncatedAutomorphism& u,
                                     const TruncatedAutomorphism& v) {
  if (u.genus != v.genus || u.trunc != v.trunc)
    throw std::invalid_argument("automorphism frame mismatch");
  detail::EndoCache cache(endo_of(u));
  TruncatedAutomorphism r{u.genus, u.trunc, {},
                          "(" + u.recipe + ") o (" + v.recipe + ")"};
  for (const auto& im : v.images) r.images.push_back(cache.apply(im));
  return r;
}

inline bool aut_equal(const TruncatedAutomorphism& u,
                      const TruncatedAutomorphism& v) {
  if (u.genus != v.genus || u.trunc != v.trunc) return false;
  for (int j = 0; j < u.nletters(); ++j)
    if (!sub(u.images[j], v.images[j]).is_zero()) return false;
  return true;
}

// inverse by successive valuation-raising correction: starting from the
// inverse of the degree-1 symbol, V <- V - V(E) kills the error
// E_j = U(V(X_j)) - X_j one valuation at a time
inline TruncatedAutomorphism aut_inverse(const TruncatedAutomorphism& u) {
  int n = u.nletters(), N = u.trunc;
  TensorEndo U = endo_of(u);
  // degree-1 symbol M: u(X_j) = sum_i M[i][j] X_i + higher
  std::vector<std::vector<Rational>> M(n, std::vector<Rational>(2 * n, 0));
  for (int j = 0; j < n; ++j) {
    for (const auto& [m, q] : U.letter_images[j].graded_part(1).terms)
      M[m[0] - 1][j] = q;
    M[j][n + j] = 1;
  }
  for (int col = 0; col < n; ++col) {  // invert M by elimination
    int pr = -1;
    for (int r2 = col; r2 < n; ++r2)
      if (M[r2][col] != 0) {
        pr = r2;
        break;
      }
    if (pr < 0)
      throw std::domain_error("degree-1 symbol is not invertible");
    std::swap(M[col], M[pr]);
    Rational inv = 1 / M[col][col];
    for (int k = 0; k < 2 * n; ++k) M[col][k] *= inv;
    for (int r2 = 0; r2 < n; ++r2) {
      if (r2 == col || M[r2][col] == 0) continue;
      Rational f = M[r2][col];
      for (int k = 0; k < 2 * n; ++k) M[r2][k] -= f * M[col][k];
    }
  }
  TensorEndo V{n, N, {}};
  for (int j = 0; j < n; ++j) {
    TensorElement t = tensor_zero(n, N);
    for (int i = 0; i < n; ++i) t.add_term({i + 1}, M[i][n + j]);
    V.letter_images.push_back(t);
  }
  detail::EndoCache ucache(U);
  for (int pass = 0; pass <= N; ++pass) {
    detail::EndoCache vcache(V);
    std::vector<TensorElement> err;
    bool done = true;
    for (int j = 0; j < n; ++j) {
      TensorElement e =
          sub(ucache.apply(V.letter_images[j]), tensor_letter(n, N, j + 1));
      if (!e.is_zero()) done = false;
      err.push_back(std::move(e));
    }
    if (done) break;
    if (pass == N)
      throw std::logic_error("inverse iteration did not terminate");
    for (int j = 0; j < n; ++j)
      V.letter_images[j] = sub(V.letter_images[j], vcache.apply(err[j]));
  }
  TruncatedAutomorphism r{u.genus, N, {}, "(" + u.recipe + ")^{-1}"};
  for (int j = 0; j < n; ++j)
    r.images.push_back(t_exp(V.letter_images[j]));
  return r;
}

// ---------------------------------------------------------------------------
// The twist derivation and the generalized twist.
// ---------------------------------------------------------------------------
// values of the derivation 2r sigma(L(gamma)) on the generators, transported
// to theta_0 coordinates; the geometric sigma is exact at the ring level, so
// only the L-truncation order limits accuracy
struct DerivationRep {
  int trunc = 0;
  TensorDerivation values;
};

namespace detail {

// Leibniz extension of a derivation given on positive generators,
// with D(x^{-1}) = -x^{-1} D(x) x^{-1}
inline RingElement ring_leibniz(const std::vector<RingElement>& dgen,
                                const RingElement& x) {
  RingElement out;
  for (const auto& [w, cw] : x.terms)
    for (std::size_t p = 0; p < w.ls.size(); ++p) {
      int l = w.ls[p];
      RingElement mid = dgen.at(std::abs(l) - 1);
      if (mid.terms.empty()) continue;
      if (l < 0)
        mid = scale(mul(ring_of(gen_word(l)), mul(mid, ring_of(gen_word(l)))),
                    -1);
      GroupWord pre{std::vector<int>(w.ls.begin(), w.ls.begin() + p)};
      GroupWord post{std::vector<int>(w.ls.begin() + p + 1, w.ls.end())};
      out = add(out, scale(mul(ring_of(pre), mul(mid, ring_of(post))), cw));
    }
  return out;
}

}  // namespace detail

// the derivation of t_{r,gamma} in theta_0 coordinates, modulo degree N.
// Since sigma drops two filtration degrees, L is truncated at order N + 2.
inline DerivationRep twist_derivation(const SurfaceModel& S,
                                      const ConjClass& gamma,
                                      const Rational& r, int N) {
  int n = (int)S.alphabet.size();
  ClassCombo L = combo_scale(L_truncation(gamma, N + 2), 2 * r);
  Expansion th0 = exponential_expansion(n / 2, N);
  std::vector<RingElement> dgen(n);
  for (int i = 1; i <= n; ++i) dgen[i - 1] = sigma_action(S, L, gen_word(i));
  DerivationRep D;
  D.trunc = N;
  D.values = derivation_zero(n, N);
  for (int j = 1; j <= n; ++j) {
    RingElement rj = expansion_preimage(th0, tensor_letter(n, N, j));
    D.values.images[j - 1] =
        apply_expansion(th0, detail::ring_leibniz(dgen, rj));
  }
  return D;
}

// t_{r,gamma} = exp(r sigma((log gamma)^2)) modulo degree N. The
// exponential terminates by weak nilpotence of the derivation on the
// truncated algebra; exceeding the hard cap N(N+1) is an internal error.
inline TruncatedAutomorphism generalized_twist(const SurfaceModel& S,
                                               const ConjClass& gamma,
                                               const Rational& r, int N) {
  if (N < 2) throw std::invalid_argument("generalized_twist needs N >= 2");
  int n = (int)S.alphabet.size();
  DerivationRep D = twist_derivation(S, gamma, r, N);
  std::ostringstream rc;
  rc << "twist r=" << r.get_str() << " gamma=";
  for (int l : gamma.rep) rc << l << ",";
  TruncatedAutomorphism u{n / 2, N, {}, rc.str()};
  for (int j = 1; j <= n; ++j) {
    TensorElement img = t_exp(tensor_letter(n, N, j));
    TensorElement term = img;
    Rational fact = 1;
    int k = 0;
    while (true) {
      term = apply_derivation(D.values, term);
      if (term.is_zero()) break;
      if (++k > N * (N + 1))
        throw std::logic_error(
            "generalized_twist: exponential did not terminate");
      fact *= k;
      img = add(img, scale(term, 1 / fact));
    }
    u.images.push_back(img);
  }
  return u;
}

// the classical twist along a simple curve, as a coordinate automorphism
inline TruncatedAutomorphism classical_automorphism(const SurfaceModel& S,
                                                    const GroupWord& C,
                                                    int N) {
  return substitution_automorphism((int)S.alphabet.size() / 2,
                                   classical_twist_images(S, C), N,
                                   "classical twist");
}

// ---------------------------------------------------------------------------
// Nilpotent-quotient action by insertion.
// ---------------------------------------------------------------------------
struct InsertionReport {
  bool matches = false;   // t_gamma(l) = insertion word mod Gamma_{2k}
  GroupWord insertion;    // the insertion word itself
};

// compares the twist image of l with the crossing-insertion word modulo
// Gamma_{2k}: both are expanded in theta_0 coordinates truncated at degree
// 2k, where equality mod Gamma_{2k} is equality of coordinates
inline InsertionReport nilpotent_quotient_action(
    const SurfaceModel& S, const TruncatedAutomorphism& u,
    const ConjClass& gamma, const GroupWord& ell, int k) {
  int n = (int)S.alphabet.size();
  Expansion probe = exponential_expansion(n / 2, k + 1);
  if (!in_gamma_k(probe, gamma.word(), k))
    throw std::invalid_argument(
        "nilpotent_quotient_action: class has nilpotency class below k");
  if (u.trunc < 2 * k)
    throw std::invalid_argument(
        "nilpotent_quotient_action: truncation order below 2k");
  InsertionReport rep;
  rep.insertion = insertion_twist_word(S, gamma.word(), ell);
  Expansion th0 = exponential_expansion(n / 2, 2 * k);
  TensorElement lhs = truncate(apply_automorphism(u, ell), 2 * k);
  TensorElement rhs = apply_expansion(th0, rep.insertion);
  rep.matches = sub(lhs, rhs).is_zero();
  return rep;
}

// ---------------------------------------------------------------------------
// Johnson-type degree and structural checks.
// ---------------------------------------------------------------------------
// the largest k < N such that u is the identity on coordinates of
// degree <= k; the identity returns N - 1
inline int johnson_degree(const TruncatedAutomorphism& u) {
  TensorEndo E = endo_of(u);
  int best = u.trunc - 1;
  for (int j = 0; j < u.nletters(); ++j) {
    TensorElement d =
        sub(E.letter_images[j], tensor_letter(u.nletters(), u.trunc, j + 1));
    if (!d.is_zero()) best = std::min(best, d.valuation() - 1);
  }
  return best;
}

struct StructureReport {
  bool grouplike = false;        // all generator images group-like
  bool fixes_boundary = false;   // u(zeta) = zeta mod degree N
  bool eta_equivariant = false;  // eta(u x, u y) = u eta(x, y) mod N - 2

  bool all() const { return grouplike && fixes_boundary && eta_equivariant; }
};

inline StructureReport structure_checks(const SurfaceModel& S,
                                        const TruncatedAutomorphism& u) {
  int n = u.nletters(), N = u.trunc;
  Expansion th0 = exponential_expansion(n / 2, N);
  StructureReport rep;
  rep.grouplike = true;
  for (const auto& im : u.images) rep.grouplike &= is_grouplike(im);
  GroupWord zeta = boundary_based_word(S);
  rep.fixes_boundary =
      sub(apply_automorphism(u, zeta), apply_expansion(th0, zeta)).is_zero();
  // eta-equivariance on generator pairs, modulo degree N - 2 (eta drops two
  // filtration degrees, so deeper coordinates of the images are invisible)
  rep.eta_equivariant = true;
  std::vector<RingElement> reps;
  for (const auto& im : u.images)
    reps.push_back(expansion_preimage(th0, im));
  for (int i = 1; i <= n && rep.eta_equivariant; ++i)
    for (int j = 1; j <= n && rep.eta_equivariant; ++j) {
      TensorElement lhs =
          apply_expansion(th0, eta_pairing(S, reps[i - 1], reps[j - 1]));
      RingElement base = eta_pairing_words(S, gen_word(i), gen_word(j));
      TensorElement rhs = tensor_zero(n, N);
      for (const auto& [w, c] : base.terms)
        rhs = add(rhs, scale(apply_automorphism(u, w), c));
      if (!sub(truncate(lhs, N - 2), truncate(rhs, N - 2)).is_zero())
        rep.eta_equivariant = false;
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Diagrammatic logarithm.
// ---------------------------------------------------------------------------
// Xi^{-1}(log(theta o u o theta^{-1})), one diagram combination per
// derivation degree d = 0 .. N - 3. The logarithm exists whenever the
// degree-1 symbol is unipotent (true for twists). The bound is sharp: the
// symplectic condition on the degree-d part of the log lives in tensor
// degree d + 2, so data truncated at N only pins degrees d <= N - 3.
inline std::map<int, DiagramCombo> diagram_log(const TruncatedAutomorphism& u,
                                               const Expansion& th) {
  int n = u.nletters(), N = u.trunc;
  if (th.rank() != n || th.trunc != N)
    throw std::invalid_argument("diagram_log: expansion frame mismatch");
  Expansion th0 = exponential_expansion(n / 2, N);
  // transported endomorphism V = theta o u o theta^{-1} on letters
  TensorEndo V{n, N, {}};
  {
    detail::EndoCache ucache(endo_of(u));
    for (int j = 1; j <= n; ++j) {
      RingElement rj = expansion_preimage(th, tensor_letter(n, N, j));
      TensorElement acc = tensor_zero(n, N);
      for (const auto& [w, c] : rj.terms) {
        RingElement moved =
            expansion_preimage(th0, ucache.apply(apply_expansion(th0, w)));
        acc = add(acc, scale(apply_expansion(th, moved), c));
      }
      V.letter_images.push_back(acc);
    }
  }
  // unipotence of the degree-1 symbol: (M - I)^n = 0
  {
    std::vector<std::vector<Rational>> M(n, std::vector<Rational>(n, 0));
    for (int j = 0; j < n; ++j) {
      for (const auto& [m, q] : V.letter_images[j].graded_part(1).terms)
        M[m[0] - 1][j] = q;
      M[j][j] -= 1;
    }
    auto matmul = [&](const std::vector<std::vector<Rational>>& A,
                      const std::vector<std::vector<Rational>>& B) {
      std::vector<std::vector<Rational>> C(n, std::vector<Rational>(n, 0));
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
          for (int j = 0; j < n; ++j) C[i][j] += A[i][k] * B[k][j];
      return C;
    };
    std::vector<std::vector<Rational>> P = M;
    for (int k = 1; k < n; ++k) P = matmul(P, M);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (P[i][j] != 0)
          throw std::domain_error(
              "diagram_log: degree-1 symbol is not unipotent");
  }
  // log V = sum_k (-1)^{k+1} (V - I)^k / k on each letter
  detail::EndoCache vcache(V);
  TensorDerivation D = derivation_zero(n, N);
  int cap = N * N * (n + 1);
  for (int j = 0; j < n; ++j) {
    TensorElement t = tensor_letter(n, N, j + 1);
    for (int k = 1;; ++k) {
      t = sub(vcache.apply(t), t);
      if (t.is_zero()) break;
      if (k > cap)
        throw std::logic_error("diagram_log: logarithm did not terminate");
      D.images[j] = add(D.images[j], scale(t, rat(k % 2 ? 1 : -1, k)));
    }
  }
  // split by derivation degree and pull back through Xi
  std::map<int, DiagramCombo> out;
  for (int d = 0; d <= N - 3; ++d) {
    TensorDerivation Dd = derivation_zero(n, d + 3);
    bool nonzero = false;
    for (int j = 0; j < n; ++j) {
      Dd.images[j] = truncate(D.images[j].graded_part(d + 1), d + 3);
      nonzero |= !Dd.images[j].is_zero();
    }
    if (nonzero) out.emplace(d, xi_inverse(n / 2, d, Dd));
  }
  return out;
}

// the degreewise prediction (1/2) glue(log theta([gamma]), log theta([gamma]))
// for the diagrammatic logarithm of t_gamma
inline std::map<int, DiagramCombo> twist_diagram_prediction(
    const ConjClass& gamma, const Expansion& th) {
  int N = th.trunc, g = th.rank() / 2;
  TensorElement lg = t_log(apply_expansion(th, gamma.word()));
  std::vector<LieElement> parts;
  for (int d = 0; d < N; ++d)
    parts.push_back(tensor_to_lie(lg.graded_part(d)));
  std::map<int, DiagramCombo> out;
  for (int d = 0; d <= N - 3; ++d) {
    DiagramCombo acc = diagram_zero(g, d);
    for (int i = 1; i < N; ++i) {
      int j = d + 2 - i;
      if (j < 1 || j >= N) continue;
      if (parts[i].is_zero() || parts[j].is_zero()) continue;
      acc = diagram_add(acc, diagram_scale(glue(g, parts[i], parts[j]),
                                           rat(1, 2)));
    }
    if (!acc.is_zero()) out.emplace(d, acc);
  }
  return out;
}

}  // namespace looptwist

#endif
