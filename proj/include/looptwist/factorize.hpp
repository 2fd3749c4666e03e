#ifndef LOOPTWIST_FACTORIZE_HPP
#define LOOPTWIST_FACTORIZE_HPP

// Constructive approximation of boundary-fixing, eta-preserving truncated
// automorphisms by products of rational twist powers: exact symplectic
// factorization into transvections over Q, realization of integral Lie
// elements by commutator words, decomposition of leading diagram terms
// into glue-pairs, and the stage-by-stage approximation driver.

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "looptwist/twist.hpp"

namespace looptwist {

using Matrix = std::vector<std::vector<Rational>>;

// ---------------------------------------------------------------------------
// Exact symplectic factorization into unit transvections h -> h + w(c,h) c.
// ---------------------------------------------------------------------------
namespace detail {

inline HVector hv_basis(int n, int k) {
  HVector e;
  e.c.assign(n, Rational(0));
  e.c[k] = 1;
  return e;
}

inline Matrix mat_identity(int n) {
  Matrix I(n, std::vector<Rational>(n, 0));
  for (int i = 0; i < n; ++i) I[i][i] = 1;
  return I;
}

inline Matrix mat_mul(const Matrix& A, const Matrix& B) {
  int n = (int)A.size();
  Matrix C(n, std::vector<Rational>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      if (A[i][k] == 0) continue;
      for (int j = 0; j < n; ++j) C[i][j] += A[i][k] * B[k][j];
    }
  return C;
}

inline Matrix mat_inverse(const Matrix& A) {
  int n = (int)A.size();
  Matrix M = A, I = mat_identity(n);
  for (int col = 0; col < n; ++col) {
    int pr = -1;
    for (int r = col; r < n; ++r)
      if (M[r][col] != 0) {
        pr = r;
        break;
      }
    if (pr < 0) throw std::invalid_argument("matrix is singular");
    std::swap(M[col], M[pr]);
    std::swap(I[col], I[pr]);
    Rational inv = 1 / M[col][col];
    for (int j = 0; j < n; ++j) {
      M[col][j] *= inv;
      I[col][j] *= inv;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || M[r][col] == 0) continue;
      Rational f = M[r][col];
      for (int j = 0; j < n; ++j) {
        M[r][j] -= f * M[col][j];
        I[r][j] -= f * I[col][j];
      }
    }
  }
  return I;
}

inline HVector mat_apply(const Matrix& A, const HVector& h) {
  int n = (int)A.size();
  HVector r;
  r.c.assign(n, Rational(0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r.c[i] += A[i][j] * h.c[j];
  return r;
}

}  // namespace detail

// the matrix of h -> h + omega(c, h) c
inline Matrix transvection_matrix(const HVector& c) {
  int n = c.dim();
  Matrix T = detail::mat_identity(n);
  for (int j = 0; j < n; ++j) {
    Rational w = omega_form(c, detail::hv_basis(n, j));
    if (w == 0) continue;
    for (int i = 0; i < n; ++i) T[i][j] += w * c.c[i];
  }
  return T;
}

inline bool is_symplectic_matrix(const Matrix& M) {
  int n = (int)M.size();
  for (int i = 0; i < n; ++i)
    if ((int)M[i].size() != n) return false;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      HVector ci, cj;
      ci.c.assign(n, Rational(0));
      cj.c.assign(n, Rational(0));
      for (int k = 0; k < n; ++k) {
        ci.c[k] = M[k][i];
        cj.c[k] = M[k][j];
      }
      if (omega_form(ci, cj) !=
          omega_form(detail::hv_basis(n, i), detail::hv_basis(n, j)))
        return false;
    }
  return true;
}

namespace detail {

inline mpz_class z_isqrt(const mpz_class& v) {
  mpz_class r;
  mpz_sqrt(r.get_mpz_t(), v.get_mpz_t());
  return r;
}

// split a (probable) prime p = 1 mod 4 as s^2 + t^2: find z with
// z^2 = -1 mod p, then run the Euclidean descent on (p, z) until the
// remainders drop below sqrt(p)
inline std::pair<mpz_class, mpz_class> two_squares_prime(const mpz_class& p) {
  mpz_class e = (p - 1) / 4, z = 0;
  for (mpz_class r = 2; r < 1000; ++r) {
    mpz_class c;
    mpz_powm(c.get_mpz_t(), r.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    if ((c * c) % p == p - 1) {
      z = c;
      break;
    }
  }
  if (z == 0) throw std::logic_error("two_squares_prime: no root of -1 found");
  mpz_class a = p, b = z, bound = z_isqrt(p);
  while (b > bound) {
    mpz_class t = a % b;
    a = b;
    b = t;
  }
  mpz_class rest = p - b * b, t = z_isqrt(rest);
  if (t * t != rest)
    throw std::logic_error("two_squares_prime: descent failed");
  return {b, t};
}

// write a non-negative integer as a sum of at most four squares:
// peel a large square, then search the remainder for 0, a square, twice a
// square, or a probable prime = 1 mod 4 (split by two_squares_prime)
inline std::vector<mpz_class> four_squares_z(const mpz_class& n) {
  if (n < 0) throw std::invalid_argument("four_squares_z needs n >= 0");
  if (n == 0) return {};
  if (n % 4 == 0) {
    std::vector<mpz_class> inner = four_squares_z(n / 4);
    for (mpz_class& s : inner) s *= 2;
    return inner;
  }
  mpz_class d0 = z_isqrt(n);
  for (mpz_class d = d0; d >= 0 && d0 - d < 3000; --d) {
    mpz_class m = n - d * d;
    if (m == 0) return {d};
    mpz_class c0 = z_isqrt(m);
    for (mpz_class c = c0; c >= 0 && c0 - c < 3000; --c) {
      mpz_class p = m - c * c;
      if (p == 0) return {d, c};
      if (p == 1) return {d, c, 1};
      if (p == 2) return {d, c, 1, 1};
      mpz_class r = z_isqrt(p);
      if (r * r == p) return {d, c, r};
      if (r * r == p - 1) return {d, c, r, 1};
      if (p % 4 == 1 &&
          mpz_probab_prime_p(p.get_mpz_t(), 30) != 0) {
        auto [s, t] = two_squares_prime(p);
        return {d, c, s, t};
      }
    }
  }
  throw std::logic_error("four_squares_z: search failed");
}

// write a positive rational as a sum of at most four squares of rationals:
// p/q = (sum of four integer squares of pq) / q^2
inline std::vector<Rational> four_squares(const Rational& t) {
  if (t <= 0) throw std::invalid_argument("four_squares needs t > 0");
  Rational tc = t;
  tc.canonicalize();
  mpz_class n = tc.get_num() * tc.get_den();
  mpz_class q = tc.get_den();
  std::vector<mpz_class> sq = four_squares_z(n);
  std::vector<Rational> out;
  for (const mpz_class& s : sq)
    if (s != 0) out.push_back(Rational(s) / Rational(q));
  return out;
}

// SL2 toolbox: plane vectors (x, y) with T_{(x,y)} = [[1-xy, x^2],
// [-y^2, 1+xy]]; lists compose by matrix product left to right
using PlaneVecs = std::vector<std::pair<Rational, Rational>>;

inline Matrix plane_matrix(const PlaneVecs& L) {
  Matrix M = mat_identity(2);
  for (const auto& [x, y] : L) {
    Matrix T = {{1 - x * y, x * x}, {-y * y, 1 + x * y}};
    M = mat_mul(M, T);
  }
  return M;
}

inline void plane_extend(PlaneVecs& L, const PlaneVecs& more) {
  L.insert(L.end(), more.begin(), more.end());
}

inline PlaneVecs sl2_minus_identity() {
  // K = T_{(0,1)} T_{(1,1)} has K^3 = -I
  PlaneVecs K = {{0, 1}, {1, 1}};
  PlaneVecs out;
  for (int i = 0; i < 3; ++i) plane_extend(out, K);
  return out;
}

inline PlaneVecs sl2_w() {  // [[0,1],[-1,0]] = L(-1) U(1) L(-1)
  return {{0, 1}, {1, 0}, {0, 1}};
}

inline PlaneVecs sl2_w_inverse() {  // w^{-1} = -I . w
  PlaneVecs out = sl2_minus_identity();
  plane_extend(out, sl2_w());
  return out;
}

// U(t) = [[1, t], [0, 1]] for arbitrary rational t
inline PlaneVecs sl2_upper(const Rational& t) {
  PlaneVecs out;
  if (t == 0) return out;
  if (t > 0) {
    for (const Rational& s : four_squares(t)) out.push_back({s, 0});
    return out;
  }
  // U(-s^2) = (-I) . T_{(0, 2/s)} T_{(s, 2/s)}
  for (const Rational& s : four_squares(-t)) {
    plane_extend(out, sl2_minus_identity());
    out.push_back({0, 2 / s});
    out.push_back({s, 2 / s});
  }
  return out;
}

// L(t) = [[1, 0], [t, 1]] for arbitrary rational t
inline PlaneVecs sl2_lower(const Rational& t) {
  PlaneVecs out;
  if (t == 0) return out;
  if (t < 0) {
    for (const Rational& s : four_squares(-t)) out.push_back({0, s});
    return out;
  }
  // L(t) = w^{-1} U(-t) w
  out = sl2_w_inverse();
  plane_extend(out, sl2_upper(-t));
  plane_extend(out, sl2_w());
  return out;
}

inline PlaneVecs sl2_factor(const Matrix& A) {
  if (A[0][0] * A[1][1] - A[0][1] * A[1][0] != 1)
    throw std::invalid_argument("sl2_factor needs determinant 1");
  PlaneVecs out;
  if (A != mat_identity(2)) {
    Rational r = A[1][0];
    if (r != 0) {
      out = sl2_upper((A[0][0] - 1) / r);
      plane_extend(out, sl2_lower(r));
      plane_extend(out, sl2_upper((A[1][1] - 1) / r));
    } else {
      // shift by w to make the lower-left entry nonzero: A = (A w) w^{-1}
      Matrix B = {{-A[0][1], A[0][0]}, {-A[1][1], A[1][0]}};
      out = sl2_factor(B);
      plane_extend(out, sl2_w_inverse());
    }
  }
  if (plane_matrix(out) != A)
    throw std::logic_error("sl2_factor: internal verification failed");
  return out;
}

}  // namespace detail

// Ordered list c_1, ..., c_p of rational homology vectors whose transvection
// product T_{c_1} T_{c_2} ... T_{c_p} (matrix product, leftmost applied last
// to vectors' arguments in composition order T_{c_1} o ... o T_{c_p}) equals
// M exactly. Column-by-column elementary symplectic reduction; the final
// a_g/b_g plane is handled by the SL2 toolbox; correctness by roundtrip.
inline std::vector<HVector> symplectic_factor(const Matrix& M) {
  using namespace detail;
  int n = (int)M.size();
  if (n == 0 || n % 2 != 0 || !is_symplectic_matrix(M))
    throw std::invalid_argument("symplectic_factor needs a symplectic matrix");
  int g = n / 2;
  Matrix R = mat_inverse(M);
  std::vector<HVector> used;  // in order of application while reducing R to I
  auto apply = [&](const HVector& c) {
    R = mat_mul(transvection_matrix(c), R);
    used.push_back(c);
  };
  auto column = [&](int j) {
    HVector u;
    u.c.assign(n, Rational(0));
    for (int i = 0; i < n; ++i) u.c[i] = R[i][j];
    return u;
  };
  // find w with omega(w, u) = 1, omega(v, w) = 1 and omega(w, f) = omega(u, f)
  // for every already-fixed basis direction f < fixed; empty result = unsolvable
  auto find_mid = [&](const HVector& u, const HVector& v,
                      int fixed) -> std::vector<HVector> {
    std::vector<std::vector<Rational>> rows;
    auto func_row = [&](const HVector& a, bool left, const Rational& rhs) {
      // left: omega(w, a) = rhs; otherwise omega(a, w) = rhs
      std::vector<Rational> row(n + 1, 0);
      for (int k = 0; k < n; ++k) {
        Rational w0 = omega_form(hv_basis(n, k), a);
        row[k] = left ? w0 : -w0;
      }
      row[n] = rhs;
      rows.push_back(row);
    };
    func_row(u, true, 1);
    func_row(v, false, 1);
    for (int f = 0; f < fixed; ++f)
      func_row(hv_basis(n, f), true, omega_form(u, hv_basis(n, f)));
    // Gaussian solve; free variables zero
    int R2 = (int)rows.size(), rank = 0;
    std::vector<int> pivot(R2, -1);
    for (int col = 0; col < n && rank < R2; ++col) {
      int pr = -1;
      for (int r = rank; r < R2; ++r)
        if (rows[r][col] != 0) {
          pr = r;
          break;
        }
      if (pr < 0) continue;
      std::swap(rows[rank], rows[pr]);
      Rational inv = 1 / rows[rank][col];
      for (int k = col; k <= n; ++k) rows[rank][k] *= inv;
      for (int r = 0; r < R2; ++r) {
        if (r == rank || rows[r][col] == 0) continue;
        Rational f = rows[r][col];
        for (int k = col; k <= n; ++k) rows[r][k] -= f * rows[rank][k];
      }
      pivot[rank] = col;
      ++rank;
    }
    for (int r = rank; r < R2; ++r)
      if (rows[r][n] != 0) return {};  // inconsistent
    HVector w;
    w.c.assign(n, Rational(0));
    for (int r = 0; r < rank; ++r) w.c[pivot[r]] = rows[r][n];
    return {w};
  };
  // map column j of R to the basis vector e_j by at most two transvections
  // orthogonal to the first `fixed` basis directions (possibly via a detour)
  auto move_column = [&](int j, int fixed) {
    HVector target = hv_basis(n, j);
    HVector u = column(j);
    if (u.c == target.c) return;
    auto two_step = [&](const HVector& from, const HVector& to) -> bool {
      auto ws = find_mid(from, to, fixed);
      if (ws.empty()) return false;
      HVector c1, c2;
      c1.c.assign(n, Rational(0));
      c2.c.assign(n, Rational(0));
      for (int k = 0; k < n; ++k) {
        c1.c[k] = ws[0].c[k] - from.c[k];
        c2.c[k] = to.c[k] - ws[0].c[k];
      }
      apply(c1);
      apply(c2);
      return true;
    };
    if (two_step(u, target)) return;
    // detour through a perturbed intermediate with the same fixed pairings
    for (int k = fixed; k < n; ++k)
      for (int sgn : {1, -1}) {
        HVector z = target;
        z.c[k] += sgn;
        bool same = true;
        for (int f = 0; f < fixed && same; ++f)
          same = omega_form(z, hv_basis(n, f)) ==
                 omega_form(u, hv_basis(n, f));
        if (!same) continue;
        std::vector<HVector> saved = used;
        Matrix savedR = R;
        if (two_step(u, z) && two_step(z, target)) return;
        used = saved;
        R = savedR;
      }
    throw std::logic_error("symplectic_factor: column move failed");
  };
  for (int i = 0; i + 1 < g; ++i) {
    move_column(2 * i, 2 * i);
    move_column(2 * i + 1, 2 * i + 1);
  }
  // last plane: R is the identity outside the (a_g, b_g) block
  int p = n - 2;
  Matrix B = {{R[p][p], R[p][p + 1]}, {R[p + 1][p], R[p + 1][p + 1]}};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      bool inblk = i >= p && j >= p;
      if (!inblk && R[i][j] != (i == j ? 1 : 0))
        throw std::logic_error("symplectic_factor: residual is not blocked");
    }
  detail::PlaneVecs L = detail::sl2_factor(detail::mat_inverse(B));
  for (auto it = L.rbegin(); it != L.rend(); ++it) {
    HVector c;
    c.c.assign(n, Rational(0));
    c.c[p] = it->first;
    c.c[p + 1] = it->second;
    apply(c);
  }
  if (R != mat_identity(n))
    throw std::logic_error("symplectic_factor: reduction failed");
  std::vector<HVector> out(used.rbegin(), used.rend());
  // roundtrip verification
  Matrix P = mat_identity(n);
  for (const HVector& c : out) P = mat_mul(P, transvection_matrix(c));
  if (P != M) throw std::logic_error("symplectic_factor: roundtrip failed");
  return out;
}

// ---------------------------------------------------------------------------
// Realizing integral Lie elements by words.
// ---------------------------------------------------------------------------
namespace detail {

inline GroupWord comm_word(const BExpr& e) {
  if (e.color > 0) return gen_word(e.color);
  GroupWord u = comm_word(e.ch[0]), v = comm_word(e.ch[1]);
  return mul(mul(u, v), mul(inverse(u), inverse(v)));
}

}  // namespace detail

// A word in Gamma_k whose gamma_leading is exactly (k, x): Lyndon basis
// brackets map to group commutators via the standard factorization, sums
// to products, integer multiples to repeated factors.
inline GroupWord realize_lie_word(const LieElement& x) {
  GroupWord out;
  int deg = -1;
  for (const auto& [w, q] : x.terms) {
    if (q.get_den() != 1)
      throw std::invalid_argument("realize_lie_word needs integer coefficients");
    if (deg < 0)
      deg = (int)w.size();
    else if ((int)w.size() != deg)
      throw std::invalid_argument("realize_lie_word needs a homogeneous element");
    if (abs(q.get_num()) > 1000)
      throw std::invalid_argument("realize_lie_word: coefficient too large");
    GroupWord ww = w.size() == 1 ? gen_word(w[0])
                                 : detail::comm_word(be_of_lyndon(w));
    long cnt = q.get_num().get_si();
    GroupWord piece = cnt > 0 ? ww : inverse(ww);
    for (long i = 0; i < std::abs(cnt); ++i) out = mul(out, piece);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Decomposition of leading diagram terms into glue-pairs.
// ---------------------------------------------------------------------------
struct LeadingTerm {
  Rational r;
  LieElement x;  // integral, degree m+1
  LieElement y;  // integral, degree m+1 (even) or m+2 (odd); y = x when even
};

// Even degree n = 2m: T = sum_i r_i glue(x_i, x_i).
// Odd degree n = 2m+1: T = sum_i 2 r_i glue(x_i, y_i).
struct LeadingDecomposition {
  int genus = 0;
  int degree = 0;
  bool even = true;
  std::vector<LeadingTerm> terms;
};

// Decompose a homogeneous diagram combination as above: express T in the
// span of glue-pairs of Lyndon-basis brackets by an exact linear solve,
// then (even case) peel the symmetric coefficient matrix into rank-one
// squares and clear denominators into the integral lattice.
inline LeadingDecomposition decompose_leading(const DiagramCombo& T) {
  int g = T.genus, n = T.degree, nl = 2 * g;
  LeadingDecomposition out{g, n, n % 2 == 0, {}};
  if (T.is_zero()) return out;
  int m = n / 2, d1 = m + 1, d2 = n + 2 - d1, trunc = n + 3;
  auto lw1 = lyndon_words(nl, d1);
  auto lw2 = lyndon_words(nl, d2);
  auto lie_of = [&](const Monomial& w) {
    LieElement e = lie_zero(nl, trunc);
    e.add_term(w, 1);
    return e;
  };
  struct Col {
    int i, j;
  };
  std::vector<Col> cols;
  std::vector<DiagramCombo> gl;
  for (int i = 0; i < (int)lw1.size(); ++i)
    for (int j = out.even ? i : 0; j < (int)lw2.size(); ++j) {
      DiagramCombo c = glue(g, lie_of(lw1[i]), lie_of(lw2[j]));
      if (c.is_zero()) continue;
      cols.push_back({i, j});
      gl.push_back(std::move(c));
    }
  // exact linear solve T = sum_c lambda_c gl[c] over the key coordinates
  std::map<std::string, int> row_of;
  auto note = [&](const DiagramCombo& c) {
    for (const auto& [k, q] : c.terms)
      if (!row_of.count(k)) {
        int idx = (int)row_of.size();
        row_of[k] = idx;
      }
  };
  note(T);
  for (const auto& c : gl) note(c);
  int R = (int)row_of.size(), C = (int)cols.size();
  std::vector<std::vector<Rational>> A(R, std::vector<Rational>(C + 1, 0));
  for (int j = 0; j < C; ++j)
    for (const auto& [k, q] : gl[j].terms) A[row_of[k]][j] = q;
  for (const auto& [k, q] : T.terms) A[row_of[k]][C] = q;
  std::vector<int> pivot;
  int rank = 0;
  for (int col = 0; col < C && rank < R; ++col) {
    int pr = -1;
    for (int r = rank; r < R; ++r)
      if (A[r][col] != 0) {
        pr = r;
        break;
      }
    if (pr < 0) continue;
    std::swap(A[rank], A[pr]);
    Rational inv = 1 / A[rank][col];
    for (int k = col; k <= C; ++k) A[rank][k] *= inv;
    for (int r = 0; r < R; ++r) {
      if (r == rank || A[r][col] == 0) continue;
      Rational f = A[r][col];
      for (int k = col; k <= C; ++k) A[r][k] -= f * A[rank][k];
    }
    pivot.push_back(col);
    ++rank;
  }
  for (int r = rank; r < R; ++r)
    if (A[r][C] != 0)
      throw std::domain_error("decompose_leading: input is not in the span "
                              "of glue-pairs");
  std::vector<Rational> lambda(C, 0);
  for (int r = 0; r < rank; ++r) lambda[pivot[r]] = A[r][C];

  auto clear_int = [&](LieElement& x) {  // scale to integral; return factor
    mpz_class lcd = 1;
    for (const auto& [w, q] : x.terms) mpz_lcm(lcd.get_mpz_t(), lcd.get_mpz_t(),
                                               q.get_den().get_mpz_t());
    if (lcd != 1) {
      LieElement sx = scale(x, Rational(lcd));
      x = sx;
    }
    return Rational(lcd);
  };

  if (!out.even) {
    for (int c = 0; c < C; ++c) {
      if (lambda[c] == 0) continue;
      LeadingTerm t;
      t.x = lie_of(lw1[cols[c].i]);
      t.y = lie_of(lw2[cols[c].j]);
      t.r = lambda[c] / 2;
      out.terms.push_back(std::move(t));
    }
    return out;
  }
  // even: symmetric coefficient matrix over the degree-(m+1) Lyndon basis
  int B1 = (int)lw1.size();
  std::vector<std::vector<Rational>> S(B1, std::vector<Rational>(B1, 0));
  for (int c = 0; c < C; ++c) {
    if (lambda[c] == 0) continue;
    int i = cols[c].i, j = cols[c].j;
    if (i == j)
      S[i][i] = lambda[c];
    else {
      S[i][j] = lambda[c] / 2;
      S[j][i] = lambda[c] / 2;
    }
  }
  // rank-one peeling: S = sum r z z^T with rational z
  for (int guard = 0; guard <= B1; ++guard) {
    int p = -1, q = -1;
    for (int i = 0; i < B1 && p < 0; ++i)
      if (S[i][i] != 0) p = q = i;
    for (int i = 0; i < B1 && p < 0; ++i)
      for (int j = i + 1; j < B1 && p < 0; ++j)
        if (S[i][j] != 0) {
          p = i;
          q = j;
        }
    if (p < 0) break;  // S exhausted
    if (guard == B1)
      throw std::logic_error("decompose_leading: peeling did not terminate");
    // probe vector v = e_p (+ e_q when the diagonal vanishes)
    std::vector<Rational> Sv(B1, 0);
    Rational r0 = 0;
    for (int i = 0; i < B1; ++i) {
      Sv[i] = S[i][p];
      if (p != q) Sv[i] += S[i][q];
    }
    r0 = Sv[p];
    if (p != q) r0 += Sv[q];
    std::vector<Rational> z(B1, 0);
    for (int i = 0; i < B1; ++i) z[i] = Sv[i] / r0;
    for (int i = 0; i < B1; ++i)
      for (int j = 0; j < B1; ++j) S[i][j] -= r0 * z[i] * z[j];
    LeadingTerm t;
    t.x = lie_zero(nl, trunc);
    for (int i = 0; i < B1; ++i)
      if (z[i] != 0) t.x.add_term(lw1[i], z[i]);
    Rational f = clear_int(t.x);
    t.r = r0 / (f * f);
    t.y = t.x;
    out.terms.push_back(std::move(t));
  }
  return out;
}

// re-glue a decomposition (testing oracle lives with the tests; this is the
// evaluation used by both tests and the driver)
inline DiagramCombo reglue(const LeadingDecomposition& D) {
  DiagramCombo out = diagram_zero(D.genus, D.degree);
  for (const auto& t : D.terms) {
    Rational f = D.even ? t.r : 2 * t.r;
    out = diagram_add(out, diagram_scale(glue(D.genus, t.x, t.y), f));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Twist words and the approximation driver.
// ---------------------------------------------------------------------------
struct TwistFactor {
  Rational r;
  ConjClass gamma;
};

// evaluates to t_{r_1,g_1} o t_{r_2,g_2} o ... (left factor outermost)
struct TwistWord {
  std::vector<TwistFactor> factors;
};

inline TruncatedAutomorphism evaluate_twist_word(const SurfaceModel& S,
                                                 const TwistWord& W, int N) {
  TruncatedAutomorphism out = identity_automorphism(S.genus, N);
  std::map<std::pair<std::vector<int>, Rational>, TruncatedAutomorphism> cache;
  for (const TwistFactor& f : W.factors) {
    auto key = std::make_pair(f.gamma.rep, f.r);
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache.emplace(key, generalized_twist(S, f.gamma, f.r, N)).first;
    out = compose(out, it->second);
  }
  return out;
}

struct FactorizationReport {
  std::vector<int> stage_degrees;  // johnson degree after each stage 0..target
  int residual_degree = -1;
  std::string summary;
};

// Stage-by-stage approximation: stage 0 matches the homology action with
// transvection twists t_{l^2/2, C} for c = l [C] (exponent derived from the
// degree-0 symbol: the twist derivation contributes 2r omega([C],h)[C], so
// r = l^2/2 reproduces h + omega(c,h)c); stage n >= 1 cancels the degree-n
// diagram log with twists along realized curves (even n) or twist-pair
// differences (odd n). After stage n the residual has johnson degree >= n+1.
inline std::pair<TwistWord, FactorizationReport> approximate_by_twists(
    const SurfaceModel& S, const TruncatedAutomorphism& u, int target) {
  int g = u.genus, n = 2 * g, N = u.trunc;
  // diagram_log resolves derivation degrees up to N - 3, so that is the
  // deepest stage the truncated data can support
  if (target < 0 || target > N - 3)
    throw std::invalid_argument(
        "approximate_by_twists: target too deep for the truncation order");
  StructureReport sr = structure_checks(S, u);
  if (!sr.fixes_boundary || !sr.eta_equivariant)
    throw std::invalid_argument(
        "approximate_by_twists: input must fix the boundary and preserve eta");
  TwistWord W;
  FactorizationReport rep;
  TruncatedAutomorphism ev = identity_automorphism(g, N);
  std::map<std::pair<std::vector<int>, Rational>, TruncatedAutomorphism> cache;
  auto push = [&](const Rational& r, const ConjClass& gamma) {
    W.factors.push_back({r, gamma});
    auto key = std::make_pair(gamma.rep, r);
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache.emplace(key, generalized_twist(S, gamma, r, N)).first;
    ev = compose(ev, it->second);
  };
  // stage 0: the homology action
  {
    TensorEndo E = endo_of(u);
    Matrix M = detail::mat_identity(n);
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) M[i][j] = 0;
      for (const auto& [mo, q] : E.letter_images[j].graded_part(1).terms)
        M[mo[0] - 1][j] = q;
    }
    if (M != detail::mat_identity(n)) {
      for (const HVector& c : symplectic_factor(M)) {
        // c = l v with v primitive integral
        mpz_class lcd = 1, gcd = 0;
        for (const Rational& q : c.c)
          mpz_lcm(lcd.get_mpz_t(), lcd.get_mpz_t(), q.get_den().get_mpz_t());
        std::vector<mpz_class> vi;
        for (const Rational& q : c.c) {
          mpz_class s = q.get_num() * (lcd / q.get_den());
          mpz_gcd(gcd.get_mpz_t(), gcd.get_mpz_t(), s.get_mpz_t());
          vi.push_back(s);
        }
        if (gcd == 0) continue;  // zero vector: identity transvection
        Rational l = Rational(gcd) / Rational(lcd);
        LieElement h1 = lie_zero(n, 3);
        for (int k = 0; k < n; ++k)
          h1.add_term({k + 1}, Rational(vi[k] / gcd));
        push(l * l / 2, class_of(realize_lie_word(h1)));
      }
    }
  }
  TruncatedAutomorphism res = compose(aut_inverse(ev), u);
  int jd = johnson_degree(res);
  if (jd < 1)
    throw std::logic_error(
        "approximate_by_twists: stage 0 did not fix the homology action");
  rep.stage_degrees.push_back(jd);
  // higher stages
  const Expansion& th = symplectic_expansion(g, N);
  for (int stage = 1; stage <= target; ++stage) {
    std::map<int, DiagramCombo> dl = diagram_log(res, th);
    if (!dl.empty() && dl.begin()->first < stage)
      throw std::logic_error(
          "approximate_by_twists: residual below the current stage");
    auto it = dl.find(stage);
    if (it != dl.end()) {
      LeadingDecomposition D = decompose_leading(it->second);
      for (const LeadingTerm& t : D.terms) {
        GroupWord C = realize_lie_word(t.x);
        if (D.even) {
          push(t.r, class_of(C));
        } else {
          GroupWord Y = realize_lie_word(t.y);
          push(-t.r, class_of(C));
          push(t.r, class_of(mul(Y, C)));
        }
      }
      res = compose(aut_inverse(ev), u);
    }
    jd = johnson_degree(res);
    if (jd < stage + 1) {
      std::ostringstream os;
      os << "approximate_by_twists: stage " << stage
         << " residual degree " << jd << " did not improve";
      throw std::logic_error(os.str());
    }
    rep.stage_degrees.push_back(jd);
  }
  rep.residual_degree = jd;
  std::ostringstream os;
  os << "factors=" << W.factors.size() << " residual_degree=" << jd
     << " target=" << target;
  rep.summary = os.str();
  return {std::move(W), std::move(rep)};
}

}  // namespace looptwist

#endif
