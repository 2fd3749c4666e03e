#ifndef LOOPTWIST_DIAGRAMS_HPP
#define LOOPTWIST_DIAGRAMS_HPP

// The diagram space of H-colored uni-trivalent trees modulo AS, IHX and
// multilinearity, materialized as an explicit quotient per (genus, degree);
// the map Xi onto symplectic derivations, root-to-root gluing, and the
// diagram bracket.

#include <array>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "looptwist/tensor.hpp"

namespace looptwist {

// value-semantic binary branch: a leaf carries an H basis letter, an
// internal node carries an ordered pair of children (the planar order,
// together with the edge to the parent, encodes the vertex orientation)
struct BExpr {
  int color = 0;  // > 0 for a leaf
  std::vector<BExpr> ch;
};

inline BExpr be_leaf(int color) { return BExpr{color, {}}; }
inline BExpr be_node(BExpr l, BExpr r) {
  return BExpr{0, {std::move(l), std::move(r)}};
}

// branch of a Lyndon word under the standard bracketing
inline BExpr be_of_lyndon(const Monomial& w) {
  if (w.size() == 1) return be_leaf(w[0]);
  int split = -1;
  for (int s = 1; s < (int)w.size(); ++s)
    if (is_lyndon(Monomial(w.begin() + s, w.end()))) {
      split = s;
      break;
    }
  if (split < 0) throw std::invalid_argument("not a Lyndon word");
  return be_node(be_of_lyndon(Monomial(w.begin(), w.begin() + split)),
                 be_of_lyndon(Monomial(w.begin() + split, w.end())));
}

namespace detail {

// unrooted tree: leaves have color > 0 and one neighbor nb[0]; trivalent
// vertices have color 0 and neighbors nb[0..2] in cyclic order
struct TreeGraph {
  std::vector<int> color;
  std::vector<std::array<int, 3>> nb;
};

inline int tg_add_branch(TreeGraph& A, const BExpr& e, int parent) {
  int v = (int)A.color.size();
  A.color.push_back(e.color);
  A.nb.push_back({parent, -1, -1});
  if (e.color == 0) {
    int l = tg_add_branch(A, e.ch[0], v);
    int r = tg_add_branch(A, e.ch[1], v);
    A.nb[v] = {parent, l, r};
  }
  return v;
}

// planted tree: root leaf color + branch
inline TreeGraph tg_of_planted(int root_color, const BExpr& branch) {
  TreeGraph A;
  A.color.push_back(root_color);
  A.nb.push_back({-1, -1, -1});
  int top = tg_add_branch(A, branch, 0);
  A.nb[0][0] = top;
  return A;
}

inline TreeGraph tg_join(const BExpr& a, const BExpr& b) {
  if (a.color > 0) return tg_of_planted(a.color, b);
  if (b.color > 0) return tg_of_planted(b.color, a);
  TreeGraph A;
  int ta = tg_add_branch(A, a, -1);
  int tb = tg_add_branch(A, b, -1);
  A.nb[ta][0] = tb;
  A.nb[tb][0] = ta;
  return A;
}

// encode the subtree entered at v from parent p; branch swaps needed to
// sort the encoding flip the AS sign
inline std::string tg_enc(const TreeGraph& A, int v, int p, int& sign) {
  if (A.color[v] > 0) return "c" + std::to_string(A.color[v]);
  int i = A.nb[v][0] == p ? 0 : A.nb[v][1] == p ? 1 : 2;
  std::string s1 = tg_enc(A, A.nb[v][(i + 1) % 3], v, sign);
  std::string s2 = tg_enc(A, A.nb[v][(i + 2) % 3], v, sign);
  if (s1 == s2) sign = 0;  // swapping equal branches is an odd automorphism
  if (s2 < s1) {
    std::swap(s1, s2);
    sign = -sign;
  }
  return "(" + s1 + "," + s2 + ")";
}

// canonical key over all leaf rootings; sign 0 when the tree has an
// orientation-reversing symmetry (and hence vanishes by AS)
inline std::pair<std::string, int> tg_canonical(const TreeGraph& A) {
  std::string best;
  int best_sign = 0;
  bool dead = false;
  std::map<std::string, int> seen;
  for (int v = 0; v < (int)A.color.size(); ++v) {
    if (A.color[v] <= 0) continue;
    int sign = 1;
    std::string s = "c" + std::to_string(A.color[v]) + "|" +
                    tg_enc(A, A.nb[v][0], v, sign);
    if (sign == 0) dead = true;  // equal-branch automorphism
    auto [it, fresh] = seen.emplace(s, sign);
    if (!fresh && it->second != sign) dead = true;  // odd re-rooting symmetry
    if (best.empty() || s < best) {
      best = s;
      best_sign = sign;
    }
  }
  return {best, dead ? 0 : best_sign};
}

inline int tg_degree(const TreeGraph& A) {
  int d = 0;
  for (int c : A.color)
    if (c == 0) ++d;
  return d;
}

// re-root: branch hanging at v when entered from parent p
inline BExpr tg_branch(const TreeGraph& A, int v, int p) {
  if (A.color[v] > 0) return be_leaf(A.color[v]);
  int i = A.nb[v][0] == p ? 0 : A.nb[v][1] == p ? 1 : 2;
  return be_node(tg_branch(A, A.nb[v][(i + 1) % 3], v),
                 tg_branch(A, A.nb[v][(i + 2) % 3], v));
}

// comm of a branch as a tensor (iterated commutators of letters)
inline TensorElement te_branch(int nletters, int trunc, const BExpr& e) {
  if (e.color > 0) return tensor_letter(nletters, trunc, e.color);
  TensorElement l = te_branch(nletters, trunc, e.ch[0]);
  TensorElement r = te_branch(nletters, trunc, e.ch[1]);
  return sub(mul(l, r), mul(r, l));
}

inline std::string branch_display(const BExpr& e) {
  if (e.color > 0) return letter_name(e.color);
  return "[" + branch_display(e.ch[0]) + "," + branch_display(e.ch[1]) + "]";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// The reduced basis of T_d per genus: enumeration + AS/IHX quotient.
// ---------------------------------------------------------------------------
struct DiagramBasis {
  int genus = 0;
  int degree = 0;
  std::vector<std::string> keys;              // canonical nonvanishing trees
  std::map<std::string, int> index;           // key -> position
  std::vector<detail::TreeGraph> rep;         // sign +1 representative
  // reduced row echelon form of the IHX relation rows: pivot -> full row
  std::map<int, std::map<int, Rational>> rref;
  int dim = 0;
};

namespace detail {

inline std::vector<BExpr> branch_shapes(int internal) {
  if (internal == 0) return {be_leaf(-1)};
  std::vector<BExpr> out;
  for (int i = 0; i < internal; ++i)
    for (const BExpr& l : branch_shapes(i))
      for (const BExpr& r : branch_shapes(internal - 1 - i))
        out.push_back(be_node(l, r));
  return out;
}

inline void assign_colors(BExpr& e, const std::vector<int>& cols, int& pos) {
  if (e.ch.empty()) {
    e.color = cols[pos++];
  } else {
    assign_colors(e.ch[0], cols, pos);
    assign_colors(e.ch[1], cols, pos);
  }
}

// all whole-branch Jacobi rewrites ((X,Y),B) -> (X,(Y,B)), (Y,(X,B))
inline void jacobi_variants(const BExpr& e,
                            std::vector<std::array<BExpr, 3>>& out) {
  if (e.color > 0) return;
  if (e.ch[0].color == 0) {
    const BExpr &X = e.ch[0].ch[0], &Y = e.ch[0].ch[1], &B = e.ch[1];
    out.push_back({e, be_node(X, be_node(Y, B)), be_node(Y, be_node(X, B))});
  }
  for (int i = 0; i < 2; ++i) {
    std::vector<std::array<BExpr, 3>> sub;
    jacobi_variants(e.ch[i], sub);
    for (auto& t : sub)
      for (int k = 0; k < 3; ++k) {
        BExpr wrapped = e;
        wrapped.ch[i] = t[k];
        t[k] = wrapped;
      }
    out.insert(out.end(), sub.begin(), sub.end());
  }
}

}  // namespace detail

inline const DiagramBasis& diagram_basis(int genus, int degree) {
  static std::map<std::pair<int, int>, DiagramBasis> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(genus, degree);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  using namespace detail;
  DiagramBasis B;
  B.genus = genus;
  B.degree = degree;
  int n = 2 * genus;
  // enumerate all planted colored trees of this degree
  for (const BExpr& shape : branch_shapes(degree)) {
    int leaves = degree + 1;
    std::vector<int> cols(leaves, 1);
    while (true) {
      for (int root = 1; root <= n; ++root) {
        BExpr b = shape;
        int pos = 0;
        assign_colors(b, cols, pos);
        TreeGraph A = tg_of_planted(root, b);
        auto [k, s] = tg_canonical(A);
        if (s == 0 || B.index.count(k)) continue;
        if (s < 0) continue;  // wait for the +1 representative
        B.index[k] = (int)B.keys.size();
        B.keys.push_back(k);
        B.rep.push_back(A);
      }
      int i = leaves - 1;
      while (i >= 0 && cols[i] == n) cols[i--] = 1;
      if (i < 0) break;
      ++cols[i];
    }
  }
  // IHX relations: Jacobi rewrites under every leaf rooting
  std::vector<std::map<int, Rational>> rows;
  auto key_coord = [&](const TreeGraph& A) -> std::pair<int, int> {
    auto [k, s] = tg_canonical(A);
    if (s == 0) return {-1, 0};
    auto f = B.index.find(k);
    if (f == B.index.end())
      throw std::logic_error("diagram enumeration missed a tree");
    return {f->second, s};
  };
  for (const TreeGraph& A : B.rep)
    for (int v = 0; v < (int)A.color.size(); ++v) {
      if (A.color[v] <= 0) continue;
      BExpr b = tg_branch(A, A.nb[v][0], v);
      std::vector<std::array<BExpr, 3>> vars;
      jacobi_variants(b, vars);
      for (const auto& t : vars) {
        std::map<int, Rational> row;
        int coef[3] = {1, -1, 1};
        for (int k = 0; k < 3; ++k) {
          auto [idx, s] = key_coord(tg_of_planted(A.color[v], t[k]));
          if (idx >= 0) {
            row[idx] += s * coef[k];
            if (row[idx] == 0) row.erase(idx);
          }
        }
        if (!row.empty()) rows.push_back(std::move(row));
      }
    }
  // reduced row echelon form
  for (auto& row : rows) {
    for (const auto& [p, pivot_row] : B.rref) {
      auto f = row.find(p);
      if (f == row.end()) continue;
      Rational c = f->second;
      for (const auto& [j, q] : pivot_row) {
        row[j] -= c * q;
        if (row[j] == 0) row.erase(j);
      }
    }
    if (row.empty()) continue;
    int p = row.begin()->first;
    Rational inv = 1 / row.begin()->second;
    for (auto& [j, q] : row) q *= inv;
    for (auto& [p2, r2] : B.rref) {
      auto f = r2.find(p);
      if (f == r2.end()) continue;
      Rational c = f->second;
      for (const auto& [j, q] : row) {
        r2[j] -= c * q;
        if (r2[j] == 0) r2.erase(j);
      }
    }
    B.rref[p] = std::move(row);
  }
  B.dim = (int)B.keys.size() - (int)B.rref.size();
  return cache.emplace(key, std::move(B)).first->second;
}

inline int diagram_dim(int genus, int degree) {
  return diagram_basis(genus, degree).dim;
}

// ---------------------------------------------------------------------------
// Diagram combinations in the reduced basis.
// ---------------------------------------------------------------------------
struct DiagramCombo {
  int genus = 0;
  int degree = 0;
  std::map<std::string, Rational> terms;  // on non-pivot canonical keys

  bool is_zero() const { return terms.empty(); }
};

namespace detail {

inline DiagramCombo reduce_raw(int genus, int degree,
                               const std::map<int, Rational>& raw) {
  const DiagramBasis& B = diagram_basis(genus, degree);
  std::map<int, Rational> v = raw;
  for (const auto& [p, row] : B.rref) {
    auto f = v.find(p);
    if (f == v.end()) continue;
    Rational c = f->second;
    for (const auto& [j, q] : row) {
      v[j] -= c * q;
      if (v[j] == 0) v.erase(j);
    }
  }
  DiagramCombo out;
  out.genus = genus;
  out.degree = degree;
  for (const auto& [j, q] : v)
    if (q != 0) out.terms[B.keys[j]] = q;
  return out;
}

}  // namespace detail

// a single raw tree, canonicalized and reduced
inline DiagramCombo tree_diagram(int genus, int root_color,
                                 const BExpr& branch) {
  using namespace detail;
  TreeGraph A = tg_of_planted(root_color, branch);
  auto [k, s] = tg_canonical(A);
  std::map<int, Rational> raw;
  if (s != 0) {
    const DiagramBasis& B = diagram_basis(genus, tg_degree(A));
    auto f = B.index.find(k);
    if (f == B.index.end())
      throw std::logic_error("diagram enumeration missed a tree");
    raw[f->second] = s;
  }
  return detail::reduce_raw(genus, tg_degree(A), raw);
}

inline DiagramCombo diagram_zero(int genus, int degree) {
  return DiagramCombo{genus, degree, {}};
}

inline DiagramCombo diagram_add(const DiagramCombo& x, const DiagramCombo& y) {
  if (x.genus != y.genus || x.degree != y.degree)
    throw std::invalid_argument("diagram degree or genus mismatch");
  DiagramCombo r = x;
  for (const auto& [k, q] : y.terms) {
    r.terms[k] += q;
    if (r.terms[k] == 0) r.terms.erase(k);
  }
  return r;
}

inline DiagramCombo diagram_scale(const DiagramCombo& x, const Rational& s) {
  DiagramCombo r;
  r.genus = x.genus;
  r.degree = x.degree;
  if (s != 0)
    for (const auto& [k, q] : x.terms) r.terms[k] = q * s;
  return r;
}

inline DiagramCombo diagram_sub(const DiagramCombo& x, const DiagramCombo& y) {
  return diagram_add(x, diagram_scale(y, -1));
}

// ---------------------------------------------------------------------------
// Root-to-root gluing of Lie elements.
// ---------------------------------------------------------------------------
namespace detail {

inline int lie_homogeneous_degree(const LieElement& x) {
  int d = -1;
  for (const auto& [w, q] : x.terms) {
    if (d < 0) d = (int)w.size();
    if ((int)w.size() != d)
      throw std::invalid_argument("glue requires homogeneous Lie elements");
  }
  return d;
}

}  // namespace detail

// glue(x, y): the sum over Lyndon terms of the trees obtained by joining
// the two bracket trees root to root; symmetric and bilinear
inline DiagramCombo glue(int genus, const LieElement& x, const LieElement& y) {
  using namespace detail;
  int dx = lie_homogeneous_degree(x), dy = lie_homogeneous_degree(y);
  if (dx < 1 || dy < 1)
    throw std::invalid_argument("glue requires nonzero Lie elements");
  int degree = dx + dy - 2;
  const DiagramBasis& B = diagram_basis(genus, degree);
  std::map<int, Rational> raw;
  for (const auto& [wx, cx] : x.terms)
    for (const auto& [wy, cy] : y.terms) {
      TreeGraph A = tg_join(be_of_lyndon(wx), be_of_lyndon(wy));
      auto [k, s] = tg_canonical(A);
      if (s == 0) continue;
      auto f = B.index.find(k);
      if (f == B.index.end())
        throw std::logic_error("diagram enumeration missed a tree");
      raw[f->second] += s * cx * cy;
      if (raw[f->second] == 0) raw.erase(f->second);
    }
  return reduce_raw(genus, degree, raw);
}

// ---------------------------------------------------------------------------
// Xi: diagrams -> symplectic derivations, and its inverse.
// ---------------------------------------------------------------------------
namespace detail {

// Xi of a single representative tree, as a derivation of T(H):
// sum over leaves v of  h |-> omega(col(v), h) comm(T_v)
inline TensorDerivation xi_tree(int genus, const TreeGraph& A, int trunc) {
  int n = 2 * genus;
  TensorDerivation D = derivation_zero(n, trunc);
  for (int v = 0; v < (int)A.color.size(); ++v) {
    if (A.color[v] <= 0) continue;
    TensorElement tv = te_branch(n, trunc, tg_branch(A, A.nb[v][0], v));
    for (int j = 1; j <= n; ++j) {
      Rational w = omega_form_letters(A.color[v], j);
      if (w != 0) D.images[j - 1] = add(D.images[j - 1], scale(tv, w));
    }
  }
  return D;
}

}  // namespace detail

inline TensorDerivation xi(const DiagramCombo& x, int trunc = -1) {
  const DiagramBasis& B = diagram_basis(x.genus, x.degree);
  if (trunc < 0) trunc = x.degree + 3;
  TensorDerivation D = derivation_zero(2 * x.genus, trunc);
  for (const auto& [k, q] : x.terms) {
    TensorDerivation t = detail::xi_tree(x.genus, B.rep[B.index.at(k)], trunc);
    for (int l = 0; l < 2 * x.genus; ++l)
      D.images[l] = add(D.images[l], scale(t.images[l], q));
  }
  return D;
}

// solve Xi(combo) = delta in the reduced basis; the images of delta must be
// homogeneous of degree (degree+1)
inline DiagramCombo xi_inverse(int genus, int degree,
                               const TensorDerivation& delta) {
  const DiagramBasis& B = diagram_basis(genus, degree);
  int n = 2 * genus, trunc = degree + 3;
  for (const auto& im : delta.images)
    for (const auto& [m, q] : im.terms)
      if ((int)m.size() != degree + 1)
        throw std::invalid_argument(
            "xi_inverse: derivation images must be homogeneous of matching "
            "degree");
  // columns: quotient basis keys (non-pivot indices)
  std::vector<int> cols;
  for (int j = 0; j < (int)B.keys.size(); ++j)
    if (!B.rref.count(j)) cols.push_back(j);
  // rows: (letter, monomial) coordinates
  std::map<std::pair<int, Monomial>, int> row_of;
  std::vector<std::map<int, Rational>> mat;  // row -> col -> coeff
  std::vector<Rational> rhs;
  auto coord = [&](int letter, const Monomial& m) {
    auto f = row_of.find({letter, m});
    if (f == row_of.end()) {
      f = row_of.emplace(std::make_pair(letter, m), (int)mat.size()).first;
      mat.push_back({});
      rhs.push_back(0);
    }
    return f->second;
  };
  for (int jc = 0; jc < (int)cols.size(); ++jc) {
    TensorDerivation D = detail::xi_tree(genus, B.rep[cols[jc]], trunc);
    for (int l = 1; l <= n; ++l)
      for (const auto& [m, q] : D.images[l - 1].terms) mat[coord(l, m)][jc] = q;
  }
  for (int l = 1; l <= n; ++l)
    for (const auto& [m, q] : delta.images[l - 1].terms) rhs[coord(l, m)] = q;
  // dense elimination
  int R = (int)mat.size(), C = (int)cols.size();
  std::vector<std::vector<Rational>> M(R, std::vector<Rational>(C + 1, 0));
  for (int r = 0; r < R; ++r) {
    for (const auto& [j, q] : mat[r]) M[r][j] = q;
    M[r][C] = rhs[r];
  }
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
      throw std::domain_error("xi_inverse: derivation is not in the image");
  DiagramCombo out = diagram_zero(genus, degree);
  for (int r = 0; r < rank; ++r)
    if (M[r][C] != 0) out.terms[B.keys[cols[pivot_col[r]]]] = M[r][C];
  return out;
}

// ---------------------------------------------------------------------------
// The diagram bracket [T, T'] = sum omega(v, v') T_v -- T_{v'}.
// ---------------------------------------------------------------------------
namespace detail {

// tree obtained by deleting leaves v of A and v' of Ap and joining the
// dangling ends
inline TreeGraph tg_bracket_glue(const TreeGraph& A, int v, const TreeGraph& Ap,
                                 int vp) {
  TreeGraph R;
  std::vector<int> mapA(A.color.size(), -1), mapB(Ap.color.size(), -1);
  auto copy_in = [&R](const TreeGraph& S, int skip, std::vector<int>& mp) {
    for (int i = 0; i < (int)S.color.size(); ++i) {
      if (i == skip) continue;
      mp[i] = (int)R.color.size();
      R.color.push_back(S.color[i]);
      R.nb.push_back(S.nb[i]);
    }
  };
  copy_in(A, v, mapA);
  copy_in(Ap, vp, mapB);
  int join_a = -1, join_b = -1;
  for (int i = 0; i < (int)A.color.size(); ++i) {
    if (i == v) continue;
    for (int s = 0; s < 3; ++s) {
      int& t = R.nb[mapA[i]][s];
      if (t < 0) continue;
      if (t == v) {
        join_a = mapA[i];
        t = -2;  // dangling, fixed below
      } else {
        t = mapA[t];
      }
    }
  }
  for (int i = 0; i < (int)Ap.color.size(); ++i) {
    if (i == vp) continue;
    for (int s = 0; s < 3; ++s) {
      int& t = R.nb[mapB[i]][s];
      if (t < 0) continue;
      if (t == vp) {
        join_b = mapB[i];
        t = -2;
      } else {
        t = mapB[t];
      }
    }
  }
  for (int s = 0; s < 3; ++s) {
    if (R.nb[join_a][s] == -2) R.nb[join_a][s] = join_b;
    if (R.nb[join_b][s] == -2) R.nb[join_b][s] = join_a;
  }
  return R;
}

}  // namespace detail

inline DiagramCombo diagram_bracket(const DiagramCombo& x,
                                    const DiagramCombo& y) {
  using namespace detail;
  if (x.genus != y.genus)
    throw std::invalid_argument("diagram genus mismatch");
  int genus = x.genus, degree = x.degree + y.degree;
  const DiagramBasis& Bx = diagram_basis(genus, x.degree);
  const DiagramBasis& By = diagram_basis(genus, y.degree);
  const DiagramBasis& Bo = diagram_basis(genus, degree);
  std::map<int, Rational> raw;
  for (const auto& [kx, cx] : x.terms)
    for (const auto& [ky, cy] : y.terms) {
      const TreeGraph& A = Bx.rep[Bx.index.at(kx)];
      const TreeGraph& Ap = By.rep[By.index.at(ky)];
      for (int v = 0; v < (int)A.color.size(); ++v) {
        if (A.color[v] <= 0) continue;
        for (int vp = 0; vp < (int)Ap.color.size(); ++vp) {
          if (Ap.color[vp] <= 0) continue;
          Rational w = omega_form_letters(A.color[v], Ap.color[vp]);
          if (w == 0) continue;
          auto [k, s] = tg_canonical(tg_bracket_glue(A, v, Ap, vp));
          if (s == 0) continue;
          auto f = Bo.index.find(k);
          if (f == Bo.index.end())
            throw std::logic_error("diagram enumeration missed a tree");
          raw[f->second] += w * s * cx * cy;
          if (raw[f->second] == 0) raw.erase(f->second);
        }
      }
    }
  return reduce_raw(genus, degree, raw);
}

// ---------------------------------------------------------------------------
// Printing.
// ---------------------------------------------------------------------------
inline std::string print_diagram(const DiagramCombo& x) {
  using namespace detail;
  if (x.terms.empty()) return "0";
  const DiagramBasis& B = diagram_basis(x.genus, x.degree);
  std::string out;
  bool first = true;
  for (const auto& [k, q] : x.terms) {
    if (!first) out += " + ";
    first = false;
    const TreeGraph& A = B.rep[B.index.at(k)];
    int root = -1;
    for (int v = 0; v < (int)A.color.size() && root < 0; ++v)
      if (A.color[v] > 0) root = v;
    out += to_string(q) + "*(" + letter_name(A.color[root]) + "-" +
           branch_display(tg_branch(A, A.nb[root][0], root)) + ")";
  }
  return out;
}

}  // namespace looptwist

#endif
