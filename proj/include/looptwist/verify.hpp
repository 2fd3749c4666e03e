#ifndef LOOPTWIST_VERIFY_HPP
#define LOOPTWIST_VERIFY_HPP

// The acceptance suite: ten exact checks covering the full pipeline. Every
// comparison is exact rational equality; the seed pins every randomized
// sample, so a rerun with the same seed is byte-identical.

#include <random>
#include <sstream>

#include "looptwist/factorize.hpp"
#include "looptwist/fox.hpp"
#include "looptwist/shadow.hpp"

namespace looptwist {

struct CriterionResult {
  int index = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace verify_detail {

inline GroupWord random_word(std::mt19937& rng, int gens, int maxlen,
                             int minlen = 0) {
  std::uniform_int_distribution<int> len(minlen, maxlen), g(1, gens), s(0, 1);
  GroupWord w;
  int n = len(rng);
  for (int i = 0; i < n; ++i) reduce_append(w.ls, s(rng) ? g(rng) : -g(rng));
  return w;
}

inline FoxPairing surface_pairing(const SurfaceModel& S) {
  FoxPairing P;
  P.rank = S.alphabet.size();
  for (int i = 1; i <= P.rank; ++i)
    for (int j = 1; j <= P.rank; ++j) {
      RingElement v = eta_pairing_words(S, gen_word(i), gen_word(j));
      if (!v.terms.empty()) P.table[{i, j}] = v;
    }
  return P;
}

inline bool same_ring(const RingElement& a, const RingElement& b) {
  return sub(a, b).terms.empty();
}

// homological intersection number of two words via their letter counts
inline Rational homology_omega(int genus, const GroupWord& x,
                               const GroupWord& y) {
  std::vector<Rational> hx(2 * genus, 0), hy(2 * genus, 0);
  for (int l : x.ls) hx[std::abs(l) - 1] += (l > 0 ? 1 : -1);
  for (int l : y.ls) hy[std::abs(l) - 1] += (l > 0 ? 1 : -1);
  Rational w = 0;
  for (int i = 0; i < genus; ++i)
    w += hx[2 * i] * hy[2 * i + 1] - hx[2 * i + 1] * hy[2 * i];
  return w;
}

// (gamma - 1)^m as a combination of powers of the class
inline ClassCombo power_combo(const ConjClass& gamma, int m) {
  ClassCombo out;
  GroupWord g = gamma.word(), p;
  Rational binom = 1;
  for (int i = 0; i <= m; ++i) {
    out.add_term(class_of(p), binom * ((m - i) % 2 ? -1 : 1));
    binom = binom * (m - i) / (i + 1);
    p = mul(p, g);
  }
  return out;
}

inline LieElement random_lie(std::mt19937& rng, int nletters, int degree,
                             int trunc) {
  auto lw = lyndon_words(nletters, degree);
  std::uniform_int_distribution<int> coeff(-2, 2);
  LieElement x = lie_zero(nletters, trunc);
  while (x.is_zero())
    for (const Monomial& w : lw) x.add_term(w, coeff(rng));
  return x;
}

inline bool same_derivation(const TensorDerivation& a,
                            const TensorDerivation& b) {
  if (a.nletters() != b.nletters()) return false;
  for (int l = 0; l < a.nletters(); ++l)
    if (!sub(a.images[l], b.images[l]).is_zero()) return false;
  return true;
}

}  // namespace verify_detail

// 1. The figure-eight sigma value on the pair of pants.
inline CriterionResult criterion_figure_eight_sigma() {
  CriterionResult r{1, "figure-eight sigma value on the pair of pants"};
  FigureEightReport rep = figure_eight_report(0);
  const ReportItem& item = rep.items.at(0);
  bool display_ok =
      item.detail == "-1 * r1 r3 R1 r2 R4 R2 r1  1 * r2 r4 R2 r1 R3";
  r.passed = item.passed && display_ok;
  r.detail = item.detail;
  return r;
}

// 2. Generalized twist vs transported classical twist, mod degree 6.
inline CriterionResult criterion_classical_comparison(int trunc) {
  CriterionResult r{2, "generalized twist equals the classical twist"};
  int N = std::max(6, trunc);
  std::ostringstream os;
  bool ok = true;
  for (int g : {1, 2}) {
    SurfaceModel S = build_surface(g, 1);
    Alphabet al = surface_alphabet(g);
    std::vector<std::string> curves = {"a1", "b1"};
    if (g == 2) curves.push_back("a1 b1 A1 B1");  // separating on genus 2
    for (const std::string& t : curves) {
      GroupWord C = parse_word(al, t);
      bool eq = aut_equal(generalized_twist(S, class_of(C), rat(1, 2), N),
                          classical_automorphism(S, C, N));
      ok = ok && eq;
      os << "g=" << g << " C=" << t << (eq ? " ok; " : " MISMATCH; ");
    }
  }
  r.passed = ok;
  r.detail = os.str() + "mod degree " + std::to_string(N);
  return r;
}

// 3. Insertion formula for a class-2 curve mod Gamma_4 on genus 2.
inline CriterionResult criterion_insertion_formula() {
  CriterionResult r{3, "insertion formula mod Gamma_4 on genus 2"};
  SurfaceModel S = build_surface(2, 1);
  Alphabet al = surface_alphabet(2);
  ConjClass comm = class_of(parse_word(al, "a1 b1 A1 B1"));
  TruncatedAutomorphism t = generalized_twist(S, comm, rat(1, 2), 4);
  InsertionReport rep =
      nilpotent_quotient_action(S, t, comm, parse_word(al, "a1"), 2);
  r.passed = rep.matches;
  r.detail = "insertion word " +
             print_word(al, rep.insertion) +
             (rep.matches ? " matches the twist image" : " MISMATCH");
  return r;
}

// 4. Diagrammatic logarithm of a twist equals half the self-gluing of the
// logarithm, through diagram degree 3, with a symplectic expansion at N = 6.
inline CriterionResult criterion_diagram_log() {
  CriterionResult r{4, "diagram log equals half the self-glued logarithm"};
  SurfaceModel S = build_surface(1, 1);
  Alphabet al = surface_alphabet(1);
  const Expansion& th = symplectic_expansion(1, 6);
  std::ostringstream os;
  bool ok = true;
  for (const char* t : {"a1", "b1", "a1 b1"}) {
    ConjClass gamma = class_of(parse_word(al, t));
    TruncatedAutomorphism u = generalized_twist(S, gamma, rat(1, 2), 6);
    std::map<int, DiagramCombo> dl = diagram_log(u, th);
    std::map<int, DiagramCombo> pred = twist_diagram_prediction(gamma, th);
    bool eq = true;
    for (int d = 0; d <= 3; ++d) {
      bool in_dl = dl.count(d), in_pred = pred.count(d);
      if (in_dl != in_pred) eq = false;
      if (in_dl && in_pred && !diagram_sub(dl[d], pred[d]).is_zero())
        eq = false;
    }
    ok = ok && eq;
    os << t << (eq ? " ok; " : " MISMATCH; ");
  }
  r.passed = ok;
  r.detail = os.str() + "degrees 0..3";
  return r;
}

// 5. Twist-word refactorization and symplectic factor roundtrips.
inline CriterionResult criterion_factorization(unsigned seed) {
  CriterionResult r{5, "twist refactorization and symplectic roundtrips"};
  std::ostringstream os;
  bool ok = true;

  SurfaceModel S = build_surface(1, 1);
  int N = 6;
  TruncatedAutomorphism u = compose(
      generalized_twist(S, class_of(gen_word(1)), rat(1, 3), N),
      compose(generalized_twist(S, class_of(mul(gen_word(1), gen_word(2))),
                                rat(1, 2), N),
              generalized_twist(S, class_of(gen_word(2)), rat(1, 5), N)));
  auto [W, rep] = approximate_by_twists(S, u, 3);
  TruncatedAutomorphism res =
      compose(aut_inverse(evaluate_twist_word(S, W, N)), u);
  int deg = johnson_degree(res);
  bool part1 = deg >= 4 && rep.residual_degree >= 4;
  ok = ok && part1;
  os << "three-twist product: " << W.factors.size()
     << " factors, residual degree " << deg << (part1 ? "; " : " TOO LOW; ");

  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> pick(0, 4);
  const Rational pool[5] = {rat(-1), rat(0), rat(1), rat(1, 2), rat(2)};
  int trips = 0, good = 0;
  while (trips < 20) {
    for (int g = 1; g <= 3 && trips < 20; ++g) {
      int n = 2 * g;
      Matrix M = detail::mat_identity(n);
      for (int f = 0; f < 4; ++f) {
        std::vector<Rational> c(n, 0);
        for (int i = 0; i < n; ++i) c[i] = pool[pick(rng)];
        M = detail::mat_mul(M, transvection_matrix(HVector{c}));
      }
      Matrix P = detail::mat_identity(n);
      for (const HVector& f : symplectic_factor(M))
        P = detail::mat_mul(P, transvection_matrix(f));
      ++trips;
      if (P == M) ++good;
    }
  }
  ok = ok && good == 20;
  os << good << "/20 symplectic roundtrips exact";
  r.passed = ok;
  r.detail = os.str();
  return r;
}

// 6. Power-series identities and coefficient spot checks.
inline CriterionResult criterion_series() {
  CriterionResult r{6, "power-series identities to order 16"};
  const int N = 16;
  bool comp_ok = true;
  {
    // substituting x := -2 cosh u into (arccosh(-x/2))^2 must give u^2
    auto f = series_arccosh_sq_neg(N);
    auto s = scale(series_cosh(N), -2);
    s.set(0, s.get(0) + 2);
    auto c = compose(f, s);
    for (int d = 0; d < N; ++d)
      if (c.get(d) != (d == 2 ? Rational(1) : Rational(0))) comp_ok = false;
  }
  bool chi_ok = true;
  {
    // chi against the closed-form sum (x/4) sum_i i!i!/(2i+1)! (4-x^2)^i
    auto chi = series_chi(N);
    TruncatedSeries q = TruncatedSeries::zero("x", -2, N);
    q.set(1, 4);
    q.set(2, -1);
    TruncatedSeries xq = TruncatedSeries::zero("x", -2, N);
    xq.set(0, rat(-1, 2));
    xq.set(1, rat(1, 4));
    TruncatedSeries acc = TruncatedSeries::zero("x", -2, N);
    TruncatedSeries pw = TruncatedSeries::constant("x", -2, N, 1);
    Rational c = 1;
    for (int i = 0; i < N; ++i) {
      if (i > 0) {
        c *= rat(i * i, (2 * i) * (2 * i + 1));
        pw = mul(pw, q);
      }
      acc = add(acc, scale(pw, c));
    }
    chi_ok = mul(xq, acc).coeff == chi.coeff;
    // and the derivative route: chi = (1/2) d/dx (arccosh(-x/2))^2
    auto der = scale(derive(series_arccosh_sq_neg(N + 1)), rat(1, 2));
    for (const auto& [d, a] : chi.coeff)
      if (der.get(d) != a) chi_ok = false;
  }
  bool spots = series_arccosh_sq_neg(3).get(1) == -1 &&
               series_arccosh_sq_neg(3).get(2) == rat(-1, 12) &&
               series_fraction(3).get(0) == rat(1, 2) &&
               series_fraction(3).get(1) == 0 &&
               series_fraction(3).get(2) == rat(1, 12) &&
               series_boundary_term(4).get(2) == 2 &&
               series_boundary_term(4).get(3) == 2 &&
               series_arcsinh_prefactor(6).get(0) == 1;
  r.passed = comp_ok && chi_ok && spots;
  std::ostringstream os;
  os << "composition " << (comp_ok ? "ok" : "FAIL") << ", chi "
     << (chi_ok ? "ok" : "FAIL") << ", spot checks "
     << (spots ? "ok" : "FAIL");
  r.detail = os.str();
  return r;
}

// 7. eta / sigma property suite, >= 100 seeded samples per property.
inline CriterionResult criterion_eta_sigma(unsigned seed) {
  CriterionResult r{7, "eta / sigma property suite"};
  using namespace verify_detail;
  std::mt19937 rng(seed + 1);
  int fox = 0, omega = 0, deriv = 0, zeta = 0, geom = 0, equiv = 0;
  const int SAMPLES = 100;
  for (int g : {1, 2}) {
    SurfaceModel S = build_surface(g, 1);
    FoxPairing P = surface_pairing(S);
    GroupWord z = boundary_based_word(S);
    Alphabet al = surface_alphabet(g);
    std::vector<std::vector<GroupWord>> twists;
    for (const char* t : {"a1", "b1", "a1 b1"})
      twists.push_back(classical_twist_images(S, parse_word(al, t)));
    for (int it = 0; it < SAMPLES / 2; ++it) {
      GroupWord a = random_word(rng, 2 * g, 6);
      GroupWord b = random_word(rng, 2 * g, 6);
      GroupWord c = random_word(rng, 2 * g, 6);
      RingElement ra = ring_of(a), rb = ring_of(b), rc = ring_of(c);
      // both Fox axioms
      if (same_ring(extend_pairing(P, mul(ra, rb), rc),
                    add(mul(ra, extend_pairing(P, rb, rc)),
                        extend_pairing(P, ra, rc))) &&
          same_ring(extend_pairing(P, ra, mul(rb, rc)),
                    add(mul(extend_pairing(P, ra, rb), rc),
                        extend_pairing(P, ra, rc))))
        ++fox;
      // augmentation of eta is the homological intersection form
      if (augmentation(eta_pairing_words(S, a, b)) == homology_omega(g, a, b))
        ++omega;
      // derivation law of the derived form in the second slot
      if (same_ring(derived_form(P, ra, mul(rb, rc)),
                    add(mul(derived_form(P, ra, rb), rc),
                        mul(rb, derived_form(P, ra, rc)))))
        ++deriv;
      // sigma of any class kills the boundary word
      ClassCombo K;
      K.add_term(class_of(a), 1);
      if (sigma_action(S, K, z).is_zero()) ++zeta;
      // geometric sigma is the derived form of the surface pairing
      if (same_ring(derived_form(P, ring_of(a), ring_of(b)),
                    sigma_action(S, K, b)))
        ++geom;
      // classical twists preserve eta
      const std::vector<GroupWord>& im = twists[it % twists.size()];
      RingElement lhs;
      for (const auto& [w, cf] : eta_pairing_words(S, a, b).terms)
        lhs.add_term(apply_substitution(im, w), cf);
      RingElement rhs = eta_pairing_words(S, apply_substitution(im, a),
                                          apply_substitution(im, b));
      if (same_ring(lhs, rhs)) ++equiv;
    }
  }
  r.passed = fox == SAMPLES && omega == SAMPLES && deriv == SAMPLES &&
             zeta == SAMPLES && geom == SAMPLES && equiv == SAMPLES;
  std::ostringstream os;
  os << "fox " << fox << ", omega " << omega << ", derivation " << deriv
     << ", zeta " << zeta << ", geometric " << geom << ", equivariance "
     << equiv << " of " << SAMPLES << " each";
  r.detail = os.str();
  return r;
}

// 8. Twist structure suite mod degree 5 over 5 seeded curves.
inline CriterionResult criterion_twist_structure(unsigned seed) {
  CriterionResult r{8, "twist structure suite mod degree 5"};
  using namespace verify_detail;
  SurfaceModel S = build_surface(1, 1);
  Expansion th0 = exponential_expansion(1, 6);
  std::mt19937 rng(seed + 2);
  int structure = 0, squares = 0, cubes = 0, filtration = 0;
  const int CURVES = 5, N = 5;
  for (int it = 0; it < CURVES; ++it) {
    GroupWord C = random_word(rng, 2, 3, 1);
    ConjClass gamma = class_of(C);
    if (gamma.trivial()) gamma = class_of(gen_word(1));
    TruncatedAutomorphism t = generalized_twist(S, gamma, rat(1, 2), N);
    // Hopf group-likeness and zeta-fixing (and eta-equivariance)
    if (structure_checks(S, t).all()) ++structure;
    // power laws t_{gamma^2} = t^4 and t_{gamma^3} = t^9
    TruncatedAutomorphism p = identity_automorphism(1, N);
    for (int i = 0; i < 4; ++i) p = compose(p, t);
    ConjClass g2 = class_of(power(gamma.word(), 2));
    if (aut_equal(generalized_twist(S, g2, rat(1, 2), N), p)) ++squares;
    for (int i = 4; i < 9; ++i) p = compose(p, t);
    ConjClass g3 = class_of(power(gamma.word(), 3));
    if (aut_equal(generalized_twist(S, g3, rat(1, 2), N), p)) ++cubes;
    // filtration bound: sigma((gamma-1)^m) raises the order by m - 2
    bool filt = true;
    for (int m = 2; m <= 4 && filt; ++m) {
      ClassCombo K = power_combo(gamma, m);
      for (int n = 1; m + n <= 6 && filt; ++n) {
        RingElement v = ring_one();
        for (int i = 0; i < n; ++i)
          v = mul(v, sub(ring_of(random_word(rng, 2, 3, 1)), ring_one()));
        if (!in_augmentation_power(th0, sigma_action_ring(S, K, v), m + n - 2))
          filt = false;
      }
    }
    if (filt) ++filtration;
  }
  r.passed = structure == CURVES && squares == CURVES && cubes == CURVES &&
             filtration == CURVES;
  std::ostringstream os;
  os << "structure " << structure << ", squares " << squares << ", cubes "
     << cubes << ", filtration " << filtration << " of " << CURVES
     << " curves";
  r.detail = os.str();
  return r;
}

// 9. Jacobi-diagram rank equalities and bracket transport.
inline CriterionResult criterion_diagrams(unsigned seed) {
  CriterionResult r{9, "Jacobi-diagram ranks and bracket transport"};
  using namespace verify_detail;
  bool ranks = true;
  std::ostringstream os;
  for (auto [g, d] : std::vector<std::pair<int, int>>{
           {1, 0}, {1, 1}, {1, 2}, {2, 0}, {2, 1}}) {
    // oracle: dimension of the degree-d symplectic derivations, as the
    // kernel rank of the "apply to omega" map
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
    std::map<Monomial, int> row_of;
    for (const auto& c : cols)
      for (const auto& [m, q] : c.terms)
        if (!row_of.count(m)) row_of.emplace(m, (int)row_of.size());
    int R = (int)row_of.size(), C = (int)cols.size();
    std::vector<std::vector<Rational>> M(R, std::vector<Rational>(C, 0));
    for (int j = 0; j < C; ++j)
      for (const auto& [m, q] : cols[j].terms) M[row_of[m]][j] = q;
    int rank = 0;
    for (int j = 0; j < C && rank < R; ++j) {
      int pr = -1;
      for (int row = rank; row < R && pr < 0; ++row)
        if (M[row][j] != 0) pr = row;
      if (pr < 0) continue;
      std::swap(M[pr], M[rank]);
      for (int row = 0; row < R; ++row)
        if (row != rank && M[row][j] != 0) {
          Rational f = M[row][j] / M[rank][j];
          for (int k = j; k < C; ++k) M[row][k] -= f * M[rank][k];
        }
      ++rank;
    }
    int der_dim = C - rank;
    if (diagram_dim(g, d) != der_dim) ranks = false;
    os << "(" << g << "," << d << ")=" << diagram_dim(g, d) << "/" << der_dim
       << " ";
  }
  bool bracket = true;
  std::mt19937 rng(seed + 3);
  for (auto [g, dx, dy] : std::vector<std::array<int, 3>>{
           {1, 0, 0}, {1, 0, 2}, {2, 0, 1}, {2, 1, 1}}) {
    for (int it = 0; it < 3; ++it) {
      int trunc = dx + dy + 3, n = 2 * g;
      // valid combos from self-gluings of random Lie elements
      DiagramCombo x =
          glue(g, random_lie(rng, n, 1, trunc),
               random_lie(rng, n, dx + 1, trunc));
      DiagramCombo y =
          glue(g, random_lie(rng, n, 1, trunc),
               random_lie(rng, n, dy + 1, trunc));
      TensorDerivation lhs = xi(diagram_bracket(x, y), trunc);
      TensorDerivation rhs = derivation_bracket(xi(x, trunc), xi(y, trunc));
      if (!same_derivation(lhs, rhs)) bracket = false;
    }
  }
  r.passed = ranks && bracket;
  r.detail = os.str() + (bracket ? "bracket transport ok" : "bracket FAIL");
  return r;
}

// 10. Figure-eight full report to order 4, Chebyshev reduction to order 6.
inline CriterionResult criterion_figure_eight_report() {
  CriterionResult r{10, "figure-eight full report and Chebyshev reduction"};
  FigureEightReport rep = figure_eight_report(4);
  TraceCheckResult tc = chebyshev_trace_check(6);
  r.passed = rep.all_passed && tc.passed;
  std::ostringstream os;
  for (const ReportItem& item : rep.items)
    os << item.name << " " << (item.passed ? "ok" : "FAIL") << "; ";
  os << "chebyshev " << (tc.passed ? "ok" : "FAIL");
  r.detail = os.str();
  return r;
}

inline std::vector<CriterionResult> run_acceptance(int trunc = 5,
                                                   unsigned seed = 7) {
  return {criterion_figure_eight_sigma(),
          criterion_classical_comparison(trunc),
          criterion_insertion_formula(),
          criterion_diagram_log(),
          criterion_factorization(seed),
          criterion_series(),
          criterion_eta_sigma(seed),
          criterion_twist_structure(seed),
          criterion_diagrams(seed),
          criterion_figure_eight_report()};
}

}  // namespace looptwist

#endif
