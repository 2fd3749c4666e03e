#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "looptwist/diagrams.hpp"

using namespace looptwist;

namespace {

LieElement lie_letter(int n, int trunc, int l) {
  LieElement e = lie_zero(n, trunc);
  e.add_term({l}, 1);
  return e;
}

LieElement lie_word(int n, int trunc, const Monomial& w, const Rational& c = 1) {
  LieElement e = lie_zero(n, trunc);
  e.add_term(w, c);
  return e;
}

bool same_derivation(const TensorDerivation& a, const TensorDerivation& b) {
  if (a.nletters() != b.nletters()) return false;
  for (int l = 0; l < a.nletters(); ++l)
    if (!sub(a.images[l], b.images[l]).is_zero()) return false;
  return true;
}

// independent oracle: dimension of the degree-d part of Der_omega, from the
// kernel of the "apply to omega" linear map on H -> L_{d+1}
int der_omega_dim(int g, int d) {
  int n = 2 * g, trunc = d + 3;
  auto lw = lyndon_words(n, d + 1);
  TensorElement omega_t = lie_to_tensor(omega_element(g, trunc));
  std::vector<TensorElement> cols;
  for (int j = 1; j <= n; ++j)
    for (const auto& w : lw) {
      TensorDerivation D = derivation_zero(n, trunc);
      D.images[j - 1] = lyndon_expand(n, trunc, w);
      cols.push_back(apply_derivation(D, omega_t));
    }
  // rank by elimination over the monomial coordinates
  std::map<Monomial, int> row_of;
  for (const auto& c : cols)
    for (const auto& [m, q] : c.terms)
      if (!row_of.count(m)) {
        int i = (int)row_of.size();
        row_of[m] = i;
      }
  int R = (int)row_of.size(), C = (int)cols.size();
  std::vector<std::vector<Rational>> M(R, std::vector<Rational>(C, 0));
  for (int j = 0; j < C; ++j)
    for (const auto& [m, q] : cols[j].terms) M[row_of[m]][j] = q;
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
    for (int k = j; k < C; ++k) M[rank][k] *= inv;
    for (int r = 0; r < R; ++r) {
      if (r == rank || M[r][j] == 0) continue;
      Rational f = M[r][j];
      for (int k = j; k < C; ++k) M[r][k] -= f * M[rank][k];
    }
    ++rank;
  }
  return C - rank;
}

// the quotient-basis keys of T_d (non-pivot canonical trees)
std::vector<std::string> quotient_keys(int g, int d) {
  const DiagramBasis& B = diagram_basis(g, d);
  std::vector<std::string> out;
  for (int j = 0; j < (int)B.keys.size(); ++j)
    if (!B.rref.count(j)) out.push_back(B.keys[j]);
  return out;
}

DiagramCombo random_combo(std::mt19937& rng, int g, int d) {
  std::uniform_int_distribution<int> coeff(-3, 3);
  DiagramCombo out = diagram_zero(g, d);
  for (const auto& k : quotient_keys(g, d)) {
    int c = coeff(rng);
    if (c != 0) out.terms[k] = c;
  }
  return out;
}

}  // namespace

TEST_CASE("AS, multilinearity and IHX") {
  // AS: swapping the two branches at a vertex negates the tree
  DiagramCombo t = tree_diagram(2, 1, be_node(be_leaf(2), be_leaf(3)));
  DiagramCombo ts = tree_diagram(2, 1, be_node(be_leaf(3), be_leaf(2)));
  CHECK_FALSE(t.is_zero());
  CHECK(diagram_add(t, ts).is_zero());
  // a tree with an orientation-reversing symmetry vanishes
  CHECK(tree_diagram(2, 1, be_node(be_leaf(2), be_leaf(2))).is_zero());

  // multilinearity: a sum color at a leaf splits into two trees
  LieElement a1 = lie_letter(4, 3, 1), a2 = lie_letter(4, 3, 3),
             b1 = lie_letter(4, 3, 2);
  LieElement s = a1;
  s.add_term({3}, 1);  // A1 + A2
  CHECK(diagram_sub(glue(2, s, b1),
                    diagram_add(glue(2, a1, b1), glue(2, a2, b1)))
            .is_zero());

  // IHX as the Jacobi rewrite: ((X,Y),B) - (X,(Y,B)) + (Y,(X,B)) = 0
  BExpr X = be_leaf(1), Y = be_leaf(2), Bb = be_leaf(3);
  DiagramCombo i1 = tree_diagram(2, 4, be_node(be_node(X, Y), Bb));
  DiagramCombo i2 = tree_diagram(2, 4, be_node(X, be_node(Y, Bb)));
  DiagramCombo i3 = tree_diagram(2, 4, be_node(Y, be_node(X, Bb)));
  CHECK(diagram_add(diagram_sub(i1, i2), i3).is_zero());
  CHECK_FALSE(i1.is_zero());  // the relation is between nonzero trees
}

TEST_CASE("glue") {
  // degree 0: strut
  LieElement a1 = lie_letter(2, 3, 1), b1 = lie_letter(2, 3, 2);
  DiagramCombo strut = glue(1, a1, b1);
  CHECK(strut.degree == 0);
  CHECK(strut.terms.size() == 1);
  // symmetry
  CHECK(diagram_sub(strut, glue(1, b1, a1)).is_zero());
  // polarization: glue(x+y,x+y) - glue(x,x) - glue(y,y) = 2 glue(x,y)
  std::mt19937 rng(1201);
  for (int it = 0; it < 6; ++it) {
    std::uniform_int_distribution<int> coeff(-2, 2);
    LieElement x = lie_zero(2, 4), y = lie_zero(2, 4);
    for (const auto& w : lyndon_words(2, 2)) {
      x.add_term(w, coeff(rng));
      y.add_term(w, coeff(rng));
    }
    if (x.is_zero() || y.is_zero()) continue;
    LieElement xy = x;
    for (const auto& [w, q] : y.terms) xy.add_term(w, q);
    if (xy.is_zero()) continue;
    DiagramCombo lhs = diagram_sub(
        diagram_sub(glue(1, xy, xy), glue(1, x, x)), glue(1, y, y));
    CHECK(diagram_sub(lhs, diagram_scale(glue(1, x, y), 2)).is_zero());
  }
}

TEST_CASE("xi") {
  // strut A1 -- B1: h -> omega(A1,h) B1 + omega(B1,h) A1
  LieElement a1 = lie_letter(2, 3, 1), b1 = lie_letter(2, 3, 2);
  TensorDerivation D = xi(glue(1, a1, b1));
  TensorDerivation expect = derivation_zero(2, 3);
  // omega(A1,B1) = 1, omega(B1,A1) = -1
  expect.images[0] = tensor_letter(2, 3, 1);           // D(A1) = -(-1) A1
  expect.images[1] = tensor_letter(2, 3, 2);           // D(B1) = B1
  expect.images[0] = scale(tensor_letter(2, 3, 1), omega_form_letters(2, 1));
  expect.images[1] = scale(tensor_letter(2, 3, 2), omega_form_letters(1, 2));
  CHECK(same_derivation(D, expect));

  // xi lands in Der_omega for random combos across the tested range
  std::mt19937 rng(1301);
  for (auto [g, d] : std::vector<std::pair<int, int>>{
           {1, 0}, {1, 1}, {1, 2}, {2, 0}, {2, 1}}) {
    for (int it = 0; it < 3; ++it) {
      DiagramCombo c = random_combo(rng, g, d);
      CHECK(check_symplectic(xi(c), g));
    }
  }
}

TEST_CASE("xi_inverse") {
  // degree 0: the symmetric tensor A1 x B1 + B1 x A1 is the strut A1--B1
  TensorDerivation delta = derivation_zero(2, 3);
  delta.images[0] = scale(tensor_letter(2, 3, 1), omega_form_letters(2, 1));
  delta.images[1] = scale(tensor_letter(2, 3, 2), omega_form_letters(1, 2));
  LieElement a1 = lie_letter(2, 3, 1), b1 = lie_letter(2, 3, 2);
  CHECK(diagram_sub(xi_inverse(1, 0, delta), glue(1, a1, b1)).is_zero());

  // roundtrip on random combos of degree <= 2
  std::mt19937 rng(1409);
  for (auto [g, d] : std::vector<std::pair<int, int>>{
           {1, 0}, {1, 2}, {2, 0}, {2, 1}}) {
    for (int it = 0; it < 3; ++it) {
      DiagramCombo c = random_combo(rng, g, d);
      CHECK(diagram_sub(xi_inverse(g, d, xi(c)), c).is_zero());
    }
  }

  // a non-symplectic derivation is rejected
  TensorDerivation bad = derivation_zero(2, 3);
  bad.images[0] = tensor_letter(2, 3, 1);  // A1 -> A1, B1 -> 0
  CHECK_THROWS_AS(xi_inverse(1, 0, bad), std::domain_error);
}

TEST_CASE("rank equalities") {
  for (auto [g, d] : std::vector<std::pair<int, int>>{
           {1, 0}, {1, 1}, {1, 2}, {2, 0}, {2, 1}}) {
    INFO("genus " << g << " degree " << d);
    int dim_t = diagram_dim(g, d);
    int dim_der = der_omega_dim(g, d);
    CHECK(dim_t == dim_der);
    // xi is injective on the quotient basis: the roundtrip through
    // xi_inverse succeeds on every basis element (tested above on combos);
    // surjectivity follows from the dimension equality
    if (d == 0) CHECK(dim_t == g * (2 * g + 1));  // sp(2g)
  }
  CHECK(diagram_dim(1, 1) == 0);  // Lambda^3 of a 2-dim space
}

TEST_CASE("diagram bracket") {
  std::mt19937 rng(1511);
  // antisymmetry and Jacobi on degree-0 struts (g = 1 and 2)
  for (int g : {1, 2}) {
    for (int it = 0; it < 4; ++it) {
      DiagramCombo x = random_combo(rng, g, 0), y = random_combo(rng, g, 0),
                   z = random_combo(rng, g, 0);
      CHECK(diagram_add(diagram_bracket(x, y), diagram_bracket(y, x))
                .is_zero());
      DiagramCombo jac = diagram_add(
          diagram_add(diagram_bracket(x, diagram_bracket(y, z)),
                      diagram_bracket(y, diagram_bracket(z, x))),
          diagram_bracket(z, diagram_bracket(x, y)));
      CHECK(jac.is_zero());
    }
  }

  // xi transports the diagram bracket to the derivation bracket
  for (auto [g, dx, dy] : std::vector<std::array<int, 3>>{
           {1, 0, 0}, {1, 0, 2}, {2, 0, 1}, {2, 1, 1}}) {
    for (int it = 0; it < 3; ++it) {
      DiagramCombo x = random_combo(rng, g, dx), y = random_combo(rng, g, dy);
      int trunc = dx + dy + 3;
      TensorDerivation lhs = xi(diagram_bracket(x, y), trunc);
      TensorDerivation rhs =
          derivation_bracket(xi(x, trunc), xi(y, trunc));
      CHECK(same_derivation(lhs, rhs));
    }
  }
}
