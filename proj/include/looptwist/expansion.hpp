#ifndef LOOPTWIST_EXPANSION_HPP
#define LOOPTWIST_EXPANSION_HPP

// Expansions of the free surface group into the truncated tensor algebra:
// the exponential reference expansion theta_0, symplectic correction,
// coordinate transport in both directions, and lower-central-series /
// augmentation-filtration detection through tensor coordinates.

#include <cstdlib>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "looptwist/tensor.hpp"
#include "looptwist/word.hpp"

namespace looptwist {

struct Expansion {
  int genus = 0;  // 0 when built for a plain free group of arbitrary rank
  int trunc = 0;
  std::vector<TensorElement> images;  // images[i] = theta(x_{i+1})
  bool symplectic = false;            // set by make_symplectic

  int rank() const { return (int)images.size(); }
};

// exponential expansion of a free group of the given rank: x_i -> exp(X_i)
inline Expansion exponential_expansion_free(int rank, int trunc) {
  Expansion th;
  th.trunc = trunc;
  for (int l = 1; l <= rank; ++l)
    th.images.push_back(t_exp(tensor_letter(rank, trunc, l)));
  return th;
}

inline Expansion exponential_expansion(int genus, int trunc) {
  Expansion th = exponential_expansion_free(2 * genus, trunc);
  th.genus = genus;
  return th;
}

// multiplicative inverse of a group-like (unit constant term) element
inline TensorElement tensor_inverse(const TensorElement& x) {
  if (x.get({}) != 1) throw std::domain_error("inverse requires unit constant");
  TensorElement u = sub(x, tensor_one(x.nletters, x.trunc));
  TensorElement r = tensor_one(x.nletters, x.trunc);
  TensorElement p = tensor_one(x.nletters, x.trunc);
  for (int k = 1; k < x.trunc; ++k) {
    p = scale(mul(p, u), -1);
    if (p.is_zero()) break;
    r = add(r, p);
  }
  return r;
}

inline TensorElement apply_expansion(const Expansion& th, const GroupWord& w) {
  TensorElement r = tensor_one(th.rank(), th.trunc);
  for (int l : w.ls) {
    const TensorElement& im = th.images.at(std::abs(l) - 1);
    r = mul(r, l > 0 ? im : tensor_inverse(im));
  }
  return r;
}

inline TensorElement apply_expansion(const Expansion& th,
                                     const RingElement& x) {
  TensorElement r = tensor_zero(th.rank(), th.trunc);
  for (const auto& [w, c] : x.terms) r = add(r, scale(apply_expansion(th, w), c));
  return r;
}

// Inverse transport: the unique ring element supported on products of
// (x_i - 1), whose theta-image matches the given tensor mod degree N.
// Triangular because theta((x_{i1}-1)...(x_{id}-1)) = X_{i1}..X_{id} + higher.
inline RingElement expansion_preimage(const Expansion& th,
                                      const TensorElement& t) {
  RingElement out;
  TensorElement rem = t;
  for (int d = 0; d < th.trunc; ++d) {
    TensorElement part = rem.graded_part(d);
    for (const auto& [m, c] : part.terms) {
      RingElement basis = ring_one();
      for (int l : m)
        basis = mul(basis, sub(ring_of(gen_word(l)), ring_one()));
      out = add(out, scale(basis, c));
      rem = sub(rem, scale(apply_expansion(th, basis), c));
    }
    if (!rem.graded_part(d).is_zero())
      throw std::logic_error("triangular preimage failed");
  }
  return out;
}

// standard boundary word for genus g
inline GroupWord standard_zeta(int genus) {
  GroupWord z;
  for (int i = 1; i <= genus; ++i)
    for (int l : {2 * i - 1, 2 * i, -(2 * i - 1), -(2 * i)})
      reduce_append(z.ls, l);
  return z;
}

namespace detail {

// abelianization of a word as a degree-1 tensor
inline TensorElement word_h1(int nletters, int trunc,
                             const std::vector<int>& ls, int from, int to) {
  TensorElement r = tensor_zero(nletters, trunc);
  for (int p = from; p < to; ++p)
    r.add_term({std::abs(ls[p])}, ls[p] > 0 ? 1 : -1);
  return r;
}

}  // namespace detail

// Degree-by-degree symplectic correction: at degree d >= 3, the defect
// c_d = (log theta(zeta) + omega)_d is cancelled by multiplying each
// generator image by exp(u_i) with u_i in Lie degree d-1. The linearized
// effect of a correction basis element is exact at degree d (quadratic
// terms live in degree >= 2d-2 > d) and depends only on the homology
// classes of the zeta-word affixes around each occurrence:
//   effect(i,u) = sum_{p: z_p = +i} ( h(z_{<=p}) u + u h(z_{>p}) )
//               - sum_{p: z_p = -i} ( h(z_{<p}) u + u h(z_{>=p}) ).
// The defect is recomputed exactly after every degree; failure to vanish
// is an internal error.
inline Expansion make_symplectic(const Expansion& th0) {
  if (th0.genus <= 0)
    throw std::invalid_argument("make_symplectic needs a surface expansion");
  Expansion th = th0;
  int g = th.genus, n = 2 * g, N = th.trunc;
  GroupWord zeta = standard_zeta(g);
  TensorElement omega_t = lie_to_tensor(omega_element(g, N));
  auto defect = [&](int d) {
    return add(t_log(apply_expansion(th, zeta)), omega_t).graded_part(d);
  };
  if (!defect(2).is_zero())
    throw std::logic_error("degree-2 defect nonzero: input is not a valid "
                           "expansion for the symplectic correction");
  for (int d = 3; d < N; ++d) {
    TensorElement c = defect(d);
    if (c.is_zero()) continue;
    // unknowns: (generator i, Lyndon word w of degree d-1), ordered by
    // (i, lex) for a deterministic pivot rule
    struct Col {
      int gen;
      Monomial w;
      TensorElement effect;
    };
    std::vector<Col> cols;
    auto lw = lyndon_words(n, d - 1);
    for (int i = 1; i <= n; ++i)
      for (const auto& w : lw) {
        TensorElement u = lyndon_expand(n, N, w);
        TensorElement eff = tensor_zero(n, N);
        for (std::size_t p = 0; p < zeta.ls.size(); ++p) {
          if (zeta.ls[p] == i) {
            eff = add(eff,
                      add(mul(detail::word_h1(n, N, zeta.ls, 0, (int)p + 1), u),
                          mul(u, detail::word_h1(n, N, zeta.ls, (int)p + 1,
                                                 (int)zeta.ls.size()))));
          } else if (zeta.ls[p] == -i) {
            eff = sub(eff,
                      add(mul(detail::word_h1(n, N, zeta.ls, 0, (int)p), u),
                          mul(u, detail::word_h1(n, N, zeta.ls, (int)p,
                                                 (int)zeta.ls.size()))));
          }
        }
        cols.push_back(Col{i, w, eff.graded_part(d)});
      }
    // row support: union of all appearing monomials
    std::map<Monomial, int> row_of;
    auto note = [&](const TensorElement& t) {
      for (const auto& [m, q] : t.terms)
        if (!row_of.count(m)) {
          int idx = (int)row_of.size();
          row_of[m] = idx;
        }
    };
    note(c);
    for (const auto& col : cols) note(col.effect);
    int R = (int)row_of.size(), C = (int)cols.size();
    std::vector<std::vector<Rational>> M(R, std::vector<Rational>(C + 1, 0));
    for (int j = 0; j < C; ++j)
      for (const auto& [m, q] : cols[j].effect.terms) M[row_of[m]][j] = q;
    for (const auto& [m, q] : c.terms) M[row_of[m]][C] = -q;
    // Gaussian elimination, first usable column per row scan order
    std::vector<int> pivot_col(R, -1);
    int rank = 0;
    for (int j = 0; j < C && rank < R; ++j) {
      int pr = -1;
      for (int r = rank; r < R; ++r)
        if (M[r][j] != 0) {
          pr = r;
          break;
        }
      if (pr < 0) continue;
      std::swap(M[rank], M[pr]);
      Rational inv = 1 / M[rank][j];
      for (int k = j; k <= C; ++k) M[rank][k] *= inv;
      for (int r = 0; r < R; ++r) {
        if (r == rank || M[r][j] == 0) continue;
        Rational f = M[r][j];
        for (int k = j; k <= C; ++k) M[r][k] -= f * M[rank][k];
      }
      pivot_col[rank] = j;
      ++rank;
    }
    for (int r = rank; r < R; ++r)
      if (M[r][C] != 0)
        throw std::logic_error("symplectic correction solve infeasible");
    std::vector<Rational> lambda(C, 0);
    for (int r = 0; r < rank; ++r) lambda[pivot_col[r]] = M[r][C];
    // apply the corrections
    std::vector<TensorElement> u_of(n, tensor_zero(n, N));
    for (int j = 0; j < C; ++j)
      if (lambda[j] != 0)
        u_of[cols[j].gen - 1] =
            add(u_of[cols[j].gen - 1],
                scale(lyndon_expand(n, N, cols[j].w), lambda[j]));
    for (int i = 0; i < n; ++i)
      if (!u_of[i].is_zero()) th.images[i] = mul(th.images[i], t_exp(u_of[i]));
    if (!defect(d).is_zero())
      throw std::logic_error("symplectic correction failed to cancel defect");
  }
  th.symplectic = true;
  return th;
}

// memoized symplectic expansion (deterministic; cached per (genus, order))
inline const Expansion& symplectic_expansion(int genus, int trunc) {
  static std::map<std::pair<int, int>, Expansion> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(genus, trunc);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, make_symplectic(exponential_expansion(genus, trunc)))
             .first;
  return it->second;
}

namespace detail {

// canonical representative modulo I^N through theta_0 coordinates
inline RingElement reduce_mod_In(const Expansion& th0, const RingElement& x) {
  return expansion_preimage(th0, apply_expansion(th0, x));
}

// log C = sum_{k>=1} (-1)^{k+1} (C-1)^k / k, truncated modulo I^N
inline RingElement ring_log(const Expansion& th0, const GroupWord& C, int N) {
  RingElement u = sub(ring_of(C), ring_one());
  RingElement p = ring_one(), out;
  for (int k = 1; k < N; ++k) {
    p = reduce_mod_In(th0, mul(p, u));
    if (p.terms.empty()) break;
    out = add(out, scale(p, rat(k % 2 ? 1 : -1, k)));
  }
  return out;
}

// multiplicative inverse modulo I^N: x^{-1} = sum_k (1-x)^k for eps(x)=1
inline RingElement ring_inverse_mod(const Expansion& th0, const RingElement& x,
                                    int N) {
  if (augmentation(x) != 1)
    throw std::domain_error("inverse mod I^N requires augmentation 1");
  RingElement s = sub(ring_one(), x);
  RingElement p = ring_one(), out = ring_one();
  for (int k = 1; k < N; ++k) {
    p = reduce_mod_In(th0, mul(p, s));
    if (p.terms.empty()) break;
    out = add(out, p);
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Transport of free-group endomorphisms to tensor coordinates.
// ---------------------------------------------------------------------------
struct TensorEndo {
  int nletters = 0;
  int trunc = 0;
  std::vector<TensorElement> letter_images;  // image of each letter
};

inline TensorElement apply_endo(const TensorEndo& U, const TensorElement& x) {
  TensorElement r = tensor_zero(U.nletters, U.trunc);
  for (const auto& [m, q] : x.terms) {
    TensorElement p = tensor_one(U.nletters, U.trunc);
    for (int l : m) p = mul(p, U.letter_images.at(l - 1));
    r = add(r, scale(p, q));
  }
  return r;
}

// theta . phi . theta^{-1} for a free-group substitution phi given by its
// generator images
inline TensorEndo transport_substitution(const Expansion& th,
                                         const std::vector<GroupWord>& phi) {
  TensorEndo U;
  U.nletters = th.rank();
  U.trunc = th.trunc;
  for (int l = 1; l <= U.nletters; ++l) {
    RingElement pre =
        expansion_preimage(th, tensor_letter(U.nletters, U.trunc, l));
    RingElement moved;
    for (const auto& [w, c] : pre.terms)
      moved.add_term(apply_substitution(phi, w), c);
    U.letter_images.push_back(apply_expansion(th, moved));
  }
  return U;
}

// ---------------------------------------------------------------------------
// Nilpotency data and filtration detection.
// ---------------------------------------------------------------------------
// theta([gamma]) = 1 + {gamma}_k + higher: returns (k, {gamma}_k)
inline std::pair<int, LieElement> gamma_leading(const ConjClass& gamma,
                                                const Expansion& th) {
  if (gamma.trivial())
    throw std::invalid_argument("gamma_leading of the trivial class");
  TensorElement lg = t_log(apply_expansion(th, gamma.word()));
  int k = lg.valuation();
  if (k >= th.trunc)
    throw std::invalid_argument(
        "class is trivial modulo the truncation order");
  return {k, tensor_to_lie(lg.graded_part(k))};
}

// w in Gamma_k (lower central series) detection via theta_0 coordinates
inline bool in_gamma_k(const Expansion& th0, const GroupWord& w, int k) {
  return t_log(apply_expansion(th0, w)).valuation() >= k;
}

// x in I^m detection via theta_0 coordinates
inline bool in_augmentation_power(const Expansion& th0, const RingElement& x,
                                  int m) {
  return apply_expansion(th0, x).valuation() >= m;
}

}  // namespace looptwist

#endif
