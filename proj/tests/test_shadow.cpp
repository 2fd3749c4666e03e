#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "looptwist/shadow.hpp"

using namespace looptwist;

namespace {

GroupWord w_of(const Alphabet& al, const std::string& s) {
  return parse_word(al, s);
}

// independent fold oracle: an S' element of polynomial degree <= 1 mapped
// back to the oriented span, ||u|| -> |u| + |u^-1| and constants -> |1|
ClassCombo expand_back(const SPrimeElement& e) {
  ClassCombo out;
  for (const auto& [m, q] : e.terms) {
    REQUIRE(m.size() <= 1);
    if (m.empty()) {
      out.add_term(ConjClass{}, q);
    } else {
      out.add_term(m[0].rep, q);
      out.add_term(class_inverse(m[0].rep), q);
    }
  }
  return out;
}

GroupWord random_word(std::mt19937& rng, int nletters, int maxlen) {
  std::uniform_int_distribution<int> len(1, maxlen);
  std::uniform_int_distribution<int> pick(1, 2 * nletters);
  std::vector<int> ls;
  int L = len(rng);
  for (int i = 0; i < L; ++i) {
    int v = pick(rng);
    ls.push_back(v > nletters ? -(v - nletters) : v);
  }
  return make_word(ls);
}

}  // namespace

TEST_CASE("polynomial algebra on unoriented classes") {
  Alphabet al = surface_alphabet(1);
  UnorientedClass a1 = unoriented_of(w_of(al, "a1"));
  UnorientedClass b1 = unoriented_of(w_of(al, "b1"));

  SECTION("the trivial class is the constant 2") {
    REQUIRE(sp_class(unoriented_of(GroupWord{})) == sp_const(2));
    // a trivial factor inside a monomial doubles the coefficient
    SPrimeElement e;
    e.add_term({a1, unoriented_of(GroupWord{}), b1}, rat(1, 2));
    REQUIRE(e == sp_mul(sp_class(a1), sp_class(b1)));
  }

  SECTION("commutative product with sorted monomials") {
    SPrimeElement x = sp_add(sp_class(a1), sp_const(3));
    SPrimeElement y = sp_add(sp_class(b1, rat(1, 2)), sp_class(a1, -1));
    REQUIRE(sp_mul(x, y) == sp_mul(y, x));
    REQUIRE(sp_sub(sp_mul(x, sp_add(y, y)), sp_scale(sp_mul(x, y), 2))
                .is_zero());
    REQUIRE(sp_power(x, 3) == sp_mul(x, sp_mul(x, x)));
  }
}

TEST_CASE("unoriented closure of the Goldman bracket") {
  SECTION("bracket of a class with itself vanishes") {
    for (int g : {1, 2}) {
      SurfaceModel S = build_surface(g, 1);
      Alphabet al = surface_alphabet(g);
      for (const char* txt : {"a1", "a1 b1", "a1 b1 A1"}) {
        UnorientedClass u = unoriented_of(w_of(al, txt));
        REQUIRE(unoriented_closure(S, u, u).is_zero());
      }
    }
  }

  SECTION("[||a1||, ||b1||] on the one-holed torus") {
    SurfaceModel S = build_surface(1, 1);
    Alphabet al = surface_alphabet(1);
    UnorientedClass a1 = unoriented_of(w_of(al, "a1"));
    UnorientedClass b1 = unoriented_of(w_of(al, "b1"));
    SPrimeElement br = unoriented_closure(S, a1, b1);
    // oracle: the oriented bracket of the expansions, folded back
    ClassCombo oracle =
        goldman_bracket(S, oriented_expansion(a1), oriented_expansion(b1));
    REQUIRE(expand_back(br) == oracle);
    // the value is supported on the two diagonal-type classes
    REQUIRE(br.terms.size() == 2);
    for (const auto& [m, q] : br.terms) {
      REQUIRE(m.size() == 1);
      bool diag = m[0] == unoriented_of(w_of(al, "a1 b1")) ||
                  m[0] == unoriented_of(w_of(al, "a1 B1"));
      REQUIRE(diag);
      REQUIRE((q == 1 || q == -1));
    }
  }

  SECTION("orientation pairing on seeded samples") {
    std::mt19937 rng(2026);
    for (int g : {1, 2}) {
      SurfaceModel S = build_surface(g, 1);
      for (int trial = 0; trial < 25; ++trial) {
        UnorientedClass x = unoriented_of(random_word(rng, 2 * g, 4));
        UnorientedClass y = unoriented_of(random_word(rng, 2 * g, 4));
        SPrimeElement br = unoriented_closure(S, x, y);
        ClassCombo oracle =
            goldman_bracket(S, oriented_expansion(x), oriented_expansion(y));
        REQUIRE(expand_back(br) == oracle);
      }
    }
  }
}

TEST_CASE("Leibniz bracket is a biderivation satisfying Jacobi") {
  SurfaceModel S = build_surface(1, 1);
  Alphabet al = surface_alphabet(1);
  SPrimeElement A = sp_class(unoriented_of(w_of(al, "a1")));
  SPrimeElement B = sp_class(unoriented_of(w_of(al, "b1")));
  SPrimeElement C = sp_class(unoriented_of(w_of(al, "a1 b1")));

  SECTION("biderivation law") {
    // [x, y z] = [x, y] z + y [x, z], on degree <= 2 inputs
    std::vector<SPrimeElement> xs = {A, sp_mul(A, B), sp_add(C, sp_const(2))};
    for (const auto& x : xs) {
      SPrimeElement lhs = leibniz_bracket(S, x, sp_mul(B, C));
      SPrimeElement rhs = sp_add(sp_mul(leibniz_bracket(S, x, B), C),
                                 sp_mul(B, leibniz_bracket(S, x, C)));
      REQUIRE(lhs == rhs);
    }
  }

  SECTION("antisymmetry and Jacobi on degree <= 2 samples") {
    std::vector<SPrimeElement> samples = {
        A, B, C, sp_mul(A, B), sp_mul(A, C),
        sp_add(sp_mul(B, C), sp_scale(A, rat(1, 2)))};
    for (const auto& x : samples)
      for (const auto& y : samples)
        REQUIRE(sp_add(leibniz_bracket(S, x, y), leibniz_bracket(S, y, x))
                    .is_zero());
    std::vector<std::array<int, 3>> triples = {
        {0, 1, 2}, {0, 1, 3}, {1, 2, 4}, {0, 3, 5}};
    for (const auto& t : triples) {
      const SPrimeElement &x = samples[t[0]], &y = samples[t[1]],
                          &z = samples[t[2]];
      SPrimeElement jac = sp_add(
          leibniz_bracket(S, leibniz_bracket(S, x, y), z),
          sp_add(leibniz_bracket(S, leibniz_bracket(S, y, z), x),
                 leibniz_bracket(S, leibniz_bracket(S, z, x), y)));
      REQUIRE(jac.is_zero());
    }
  }
}

TEST_CASE("module action of the shadow algebra") {
  SurfaceModel P = build_surface(0, 3);
  Alphabet al = P.alphabet;
  UnorientedClass u = unoriented_of(w_of(al, "r1 r3 R1"));
  UnorientedClass v = unoriented_of(w_of(al, "r2 r4 R2"));
  UnorientedClass g = unoriented_of(w_of(al, "r1 r3 R1 r2 R4 R2"));
  BasedPathWord r1p{0, 1, w_of(al, "r1")};
  ModuleElement e = me_path(r1p);

  SECTION("degree-one action is the groupoid sigma") {
    ModuleElement got = module_action(P, sp_class(g), e);
    REQUIRE(got ==
            me_from(sp_const(1),
                    sigma_action_combo(P, oriented_expansion(g), r1p)));
  }

  SECTION("product rule checked both ways on ||u||^2") {
    SPrimeElement w = sp_class(u);
    ModuleElement lhs = module_action(P, sp_mul(w, w), e);
    ModuleElement one_side = module_action(P, w, e);
    ModuleElement rhs = me_scale(me_mul_sp(w, one_side), 2);
    REQUIRE(lhs == rhs);
    // and against the general Leibniz grouping for distinct factors
    SPrimeElement w2 = sp_class(v);
    ModuleElement lhs2 = module_action(P, sp_mul(w, w2), e);
    ModuleElement rhs2 = me_add(me_mul_sp(w, module_action(P, w2, e)),
                                me_mul_sp(w2, module_action(P, w, e)));
    REQUIRE(lhs2 == rhs2);
  }

  SECTION("Lie-module law on samples") {
    std::vector<SPrimeElement> as = {sp_class(u), sp_class(g),
                                     sp_mul(sp_class(u), sp_class(v))};
    std::vector<SPrimeElement> bs = {sp_class(v),
                                     sp_class(unoriented_of(w_of(al, "r3")))};
    std::vector<ModuleElement> es = {e, me_mul_sp(sp_class(u), e)};
    for (const auto& a : as)
      for (const auto& b : bs)
        for (const auto& y : es) {
          ModuleElement lhs = module_action(P, leibniz_bracket(P, a, b), y);
          ModuleElement rhs =
              me_sub(module_action(P, a, module_action(P, b, y)),
                     module_action(P, b, module_action(P, a, y)));
          REQUIRE(lhs == rhs);
        }
  }
}

TEST_CASE("kernel reduction by the two relation schemas") {
  SurfaceModel P = build_surface(0, 3);
  Alphabet al = P.alphabet;

  SECTION("reduce(0) is 0 with an empty log") {
    auto r = kernel_reduce(P, me_zero(), 6);
    REQUIRE(r.reduced.is_zero());
    REQUIRE(r.steps.empty());
    REQUIRE_FALSE(r.undecided);
  }

  SECTION("path schema with an empty right factor") {
    // 1 (x) (r1 r3 + r1 R3)  ->  ||r3|| (x) r1
    ModuleElement e;
    e.add_term({}, BasedPathWord{0, 1, w_of(al, "r1 r3")}, 1);
    e.add_term({}, BasedPathWord{0, 1, w_of(al, "r1 R3")}, 1);
    auto r = kernel_reduce(P, e, 6);
    ModuleElement want;
    want.add_term({unoriented_of(w_of(al, "r3"))},
                  BasedPathWord{0, 1, w_of(al, "r1")}, 1);
    REQUIRE(r.reduced == want);
    REQUIRE(r.steps.size() == 1);
    REQUIRE(r.steps.front().right.empty());
    // the same shape on a one-vertex surface with based loops
    SurfaceModel T = build_surface(1, 1);
    Alphabet tal = surface_alphabet(1);
    ModuleElement f;
    f.add_term({}, BasedPathWord{0, 0, w_of(tal, "b1 a1")}, rat(3, 2));
    f.add_term({}, BasedPathWord{0, 0, w_of(tal, "b1 A1")}, rat(3, 2));
    auto rt = kernel_reduce(T, f, 6);
    ModuleElement wantt;
    wantt.add_term({unoriented_of(w_of(tal, "a1"))},
                   BasedPathWord{0, 0, w_of(tal, "b1")}, rat(3, 2));
    REQUIRE(rt.reduced == wantt);
  }

  SECTION("class schema merges a split pair") {
    Alphabet tal = surface_alphabet(1);
    SPrimeElement e = sp_add(sp_class(unoriented_of(w_of(tal, "a1 b1"))),
                             sp_class(unoriented_of(w_of(tal, "A1 b1"))));
    auto r = kernel_reduce(e, 4);
    REQUIRE(r.reduced == sp_mul(sp_class(unoriented_of(w_of(tal, "a1"))),
                                sp_class(unoriented_of(w_of(tal, "b1")))));
    REQUIRE(r.steps.size() == 1);
    REQUIRE(r.steps.front().class_schema);
    // re-expanded, the step is an exact schema instance
    SPrimeElement back = r.reduced;
    for (const auto& st : r.steps) back = sp_add(back, sprime_schema_element(st));
    REQUIRE(back == e);
  }

  SECTION("irreducible input is reported undecided, not failed") {
    ModuleElement e = me_path(BasedPathWord{0, 1, w_of(al, "r1")});
    auto r = kernel_reduce(P, e, 6);
    REQUIRE(r.undecided);
    REQUIRE(r.reduced == e);
    REQUIRE(r.steps.empty());
  }

  SECTION("every logged step differs by an exact schema element") {
    // the congruence of the figure-eight computation
    UnorientedClass g = unoriented_of(w_of(al, "r1 r3 R1 r2 R4 R2"));
    GroupWord r5 = w_of(al, "r1 r3 R1 r2 r4 R2");
    ModuleElement lhs =
        me_from(sp_const(1), sigma_action_combo(P, oriented_expansion(g),
                                                BasedPathWord{0, 1, w_of(al, "r1")}));
    ModuleElement rhs;
    rhs.add_term({}, BasedPathWord{0, 1, mul(r5, w_of(al, "r1"))}, 1);
    rhs.add_term({}, BasedPathWord{0, 1, mul(inverse(r5), w_of(al, "r1"))}, -1);
    rhs.add_term({unoriented_of(w_of(al, "r4"))},
                 BasedPathWord{0, 1, w_of(al, "r1 r3")}, -1);
    rhs.add_term({unoriented_of(w_of(al, "r4"))},
                 BasedPathWord{0, 1, w_of(al, "r1 R3")}, 1);
    ModuleElement diff = me_sub(lhs, rhs);
    auto r = kernel_reduce(P, diff, 8);
    REQUIRE(r.reduced.is_zero());
    REQUIRE_FALSE(r.undecided);
    REQUIRE(r.steps.size() == 2);
    for (const auto& st : r.steps)
      REQUIRE(unoriented_of(st.loop) == unoriented_of(w_of(al, "r4")));
    ModuleElement back = r.reduced;
    for (const auto& st : r.steps)
      back = me_add(back, module_schema_element(st));
    REQUIRE(back == diff);
  }
}

TEST_CASE("Chebyshev trace reduction") {
  SECTION("order 6 is exact") {
    auto res = chebyshev_trace_check(6);
    REQUIRE(res.base_ok);
    REQUIRE(res.recursion_ok);
    REQUIRE(res.reduction_ok);
    REQUIRE(res.passed);
  }

  SECTION("higher order still exact") {
    REQUIRE(chebyshev_trace_check(10).passed);
  }

  SECTION("cosh oracle for the recursion, smallest case") {
    // p_2 + p_0 = p_1^2 with p_k = 2 cosh(k u)
    int n = 7;
    auto p0 = TruncatedSeries::constant("u", 0, n, 2);
    auto p1 = scale(series_cosh(n), 2);
    auto p2 = detail::two_cosh_ku(2, n);
    auto lhs = add(p2, p0);
    auto rhs = mul(p1, p1);
    REQUIRE(lhs.coeff == rhs.coeff);
  }
}

TEST_CASE("figure-eight report") {
  SECTION("order 0: both exponential sides are the path itself") {
    auto rep = figure_eight_report(0);
    REQUIRE(rep.items.size() == 4);
    for (const auto& item : rep.items) {
      INFO(item.name << ": " << item.detail);
      REQUIRE(item.passed);
      REQUIRE_FALSE(item.undecided);
    }
    REQUIRE(rep.all_passed);
  }

  SECTION("the sigma display and the certified congruence") {
    auto rep = figure_eight_report(1);
    REQUIRE(rep.all_passed);
    REQUIRE(rep.items[0].name == "sigma-display");
    REQUIRE(rep.items[0].detail ==
            "-1 * r1 r3 R1 r2 R4 R2 r1  1 * r2 r4 R2 r1 R3");
    REQUIRE(rep.items[1].name == "kernel-congruence");
    REQUIRE(rep.items[1].detail.substr(0, 1) == "2");
  }

  SECTION("chi-exponential comparison through order 4") {
    auto rep = figure_eight_report(4);
    INFO(rep.items[2].detail);
    REQUIRE(rep.all_passed);
  }
}

TEST_CASE("pants normal form") {
  auto S = build_surface(0, 3);
  auto w_r = [&](const std::string& s) { return parse_word(S.alphabet, s); };

  SECTION("basis paths and Fricke monomials are already reduced") {
    ModuleElement e;
    SPrimeMonomial m{unoriented_of(w_r("r3")), unoriented_of(w_r("r4"))};
    e.add_term(m, BasedPathWord{0, 1, w_r("r1 r3")}, rat(5, 3));
    auto r = pants_normal_form(S, e);
    REQUIRE(r.steps.empty());
    REQUIRE(r.reduced == e);
    REQUIRE_FALSE(r.undecided);
  }

  SECTION("a kernel element reduces to zero with an exact step log") {
    // q (r x r' + r x^-1 r') - q ||x|| r r' with r = r1 r3, x = R1 r2 r4 R2 r1
    ModuleElement e;
    GroupWord r = w_r("r1 r3"), x = w_r("R1 r2 r4 R2 r1"), rp = w_r("1");
    e.add_term({}, BasedPathWord{0, 1, mul(r, mul(x, rp))}, rat(3));
    e.add_term({}, BasedPathWord{0, 1, mul(r, mul(inverse(x), rp))}, rat(3));
    e.add_term({unoriented_of(x)}, BasedPathWord{0, 1, mul(r, rp)}, rat(-3));
    auto red = pants_normal_form(S, e);
    REQUIRE(red.reduced.is_zero());
    REQUIRE_FALSE(red.undecided);
    ModuleElement back = red.reduced;
    for (const auto& st : red.steps)
      back = me_add(back, module_schema_element(st));
    REQUIRE(back == e);
  }

  SECTION("normal forms separate inequivalent elements") {
    ModuleElement e;
    e.add_term({}, BasedPathWord{0, 1, w_r("r1")}, rat(1));
    auto r = pants_normal_form(S, e);
    REQUIRE(r.reduced == e);
    REQUIRE_FALSE(r.undecided);
  }

  SECTION("random elements: the step log re-expands exactly") {
    std::mt19937 rng(77);
    for (int trial = 0; trial < 20; ++trial) {
      ModuleElement e;
      int nterms = 1 + (int)(rng() % 3);
      for (int t = 0; t < nterms; ++t) {
        GroupWord loop;
        int len = 1 + (int)(rng() % 4);
        for (int i = 0; i < len; ++i) {
          GroupWord gen = (rng() % 2) ? w_r("r1 r3 R1") : w_r("r2 r4 R2");
          loop = mul(loop, (rng() % 2) ? gen : inverse(gen));
        }
        SPrimeMonomial m;
        if (rng() % 2) m.push_back(unoriented_of(loop.empty() ? w_r("r3") : loop));
        Rational q = rat((int)(rng() % 7) - 3, 1 + (int)(rng() % 4));
        if (q != 0)
          e.add_term(m, BasedPathWord{0, 1, mul(loop, w_r("r1"))}, q);
      }
      auto red = pants_normal_form(S, e);
      REQUIRE_FALSE(red.undecided);
      ModuleElement back = red.reduced;
      for (const auto& st : red.steps)
        back = me_add(back, module_schema_element(st));
      REQUIRE(back == e);
      // idempotence: the output is already in normal form
      auto again = pants_normal_form(S, red.reduced);
      REQUIRE(again.steps.empty());
      REQUIRE(again.reduced == red.reduced);
    }
  }
}
