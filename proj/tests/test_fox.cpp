#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "looptwist/fox.hpp"
#include "looptwist/surface.hpp"

using namespace looptwist;

namespace {

GroupWord random_word(std::mt19937& rng, int gens, int maxlen) {
  std::uniform_int_distribution<int> len(0, maxlen), g(1, gens), s(0, 1);
  GroupWord w;
  int n = len(rng);
  for (int i = 0; i < n; ++i) reduce_append(w.ls, s(rng) ? g(rng) : -g(rng));
  return w;
}

ClassCombo cls(const GroupWord& w) {
  ClassCombo c;
  c.add_term(class_of(w), 1);
  return c;
}

bool same_ring(const RingElement& a, const RingElement& b) {
  return sub(a, b).terms.empty();
}

// surface pairing as a generator table (values from the geometric model)
FoxPairing surface_pairing(const SurfaceModel& S) {
  FoxPairing P;
  P.rank = S.alphabet.size();
  for (int i = 1; i <= P.rank; ++i)
    for (int j = 1; j <= P.rank; ++j) {
      RingElement v = eta_pairing_words(S, gen_word(i), gen_word(j));
      if (!v.terms.empty()) P.table[{i, j}] = v;
    }
  return P;
}

// a non-geometric pairing used to exercise the generic extension
FoxPairing random_pairing(std::mt19937& rng, int rank) {
  FoxPairing P;
  P.rank = rank;
  std::uniform_int_distribution<int> coeff(-2, 2);
  for (int i = 1; i <= rank; ++i)
    for (int j = 1; j <= rank; ++j) {
      RingElement v;
      v.add_term(random_word(rng, rank, 2), coeff(rng));
      v.add_term(random_word(rng, rank, 2), coeff(rng));
      if (!v.terms.empty()) P.table[{i, j}] = v;
    }
  return P;
}

}  // namespace

TEST_CASE("bilinear extension from generator tables") {
  // unit arguments give zero, for any pairing
  std::mt19937 rng(521);
  FoxPairing Q = random_pairing(rng, 3);
  for (int it = 0; it < 10; ++it) {
    RingElement c = ring_of(random_word(rng, 3, 5));
    CHECK(extend_pairing(Q, ring_one(), c).terms.empty());
    CHECK(extend_pairing(Q, c, ring_one()).terms.empty());
  }

  // both Fox axioms on random triples (words are group-like, eps = 1)
  for (int it = 0; it < 60; ++it) {
    GroupWord a = random_word(rng, 3, 4), b = random_word(rng, 3, 4),
              c = random_word(rng, 3, 4);
    RingElement ra = ring_of(a), rb = ring_of(b), rc = ring_of(c);
    CHECK(same_ring(extend_pairing(Q, mul(ra, rb), rc),
                    add(mul(ra, extend_pairing(Q, rb, rc)),
                        extend_pairing(Q, ra, rc))));
    CHECK(same_ring(extend_pairing(Q, ra, mul(rb, rc)),
                    add(mul(extend_pairing(Q, ra, rb), rc),
                        extend_pairing(Q, ra, rc))));
  }

  // the extension of the surface generator table reproduces the full
  // geometric pairing (independent oracle: the strand-diagram model)
  for (int g : {1, 2}) {
    SurfaceModel S = build_surface(g, 1);
    FoxPairing P = surface_pairing(S);
    std::mt19937 r2(601 + g);
    for (int it = 0; it < 25; ++it) {
      GroupWord x = random_word(r2, 2 * g, 5), y = random_word(r2, 2 * g, 5);
      CHECK(same_ring(extend_pairing(P, ring_of(x), ring_of(y)),
                      eta_pairing_words(S, x, y)));
    }
  }
}

TEST_CASE("augmentation filtration of the pairing") {
  SurfaceModel S = build_surface(1, 1);
  FoxPairing P = surface_pairing(S);
  Expansion th0 = exponential_expansion_free(2, 6);
  std::mt19937 rng(733);
  auto ideal_elt = [&](int m) {
    RingElement r = ring_one();
    for (int k = 0; k < m; ++k) {
      GroupWord w = random_word(rng, 2, 3);
      r = mul(r, sub(ring_of(w), ring_one()));
    }
    return r;
  };
  for (int m = 1; m <= 3; ++m)
    for (int n = 1; n + m <= 6; ++n)
      for (int it = 0; it < 4; ++it) {
        RingElement v = extend_pairing(P, ideal_elt(m), ideal_elt(n));
        if (m + n > 2) CHECK(in_augmentation_power(th0, v, m + n - 2));
      }
  // the pinned instance: eta((a1-1)^3, (b1-1)^2) in I^3
  Alphabet al = surface_alphabet(1);
  RingElement u = sub(ring_of(parse_word(al, "a1")), ring_one());
  RingElement v = sub(ring_of(parse_word(al, "b1")), ring_one());
  RingElement val = extend_pairing(P, mul(u, mul(u, u)), mul(v, v));
  CHECK(in_augmentation_power(th0, val, 3));
}

TEST_CASE("derived form") {
  SurfaceModel S = build_surface(1, 1);
  FoxPairing P = surface_pairing(S);
  std::mt19937 rng(811);

  for (int it = 0; it < 25; ++it) {
    GroupWord a = random_word(rng, 2, 4), b = random_word(rng, 2, 4),
              c = random_word(rng, 2, 4);
    RingElement ra = ring_of(a), rb = ring_of(b), rc = ring_of(c);
    // vanishes on commutators of the ring in the first slot
    CHECK(derived_form(P, sub(mul(ra, rb), mul(rb, ra)), rc).terms.empty());
    // unit in the first slot
    CHECK(derived_form(P, ring_one(), rc).terms.empty());
    // derivation law in the second slot
    CHECK(same_ring(derived_form(P, ra, mul(rb, rc)),
                    add(mul(derived_form(P, ra, rb), rc),
                        mul(rb, derived_form(P, ra, rc)))));
  }

  // the derived form of the surface pairing is the geometric sigma
  for (int g : {1, 2}) {
    SurfaceModel Sg = build_surface(g, 1);
    FoxPairing Pg = surface_pairing(Sg);
    std::mt19937 r2(907 + g);
    for (int it = 0; it < 15; ++it) {
      GroupWord u = random_word(r2, 2 * g, 4), v = random_word(r2, 2 * g, 4);
      CHECK(same_ring(derived_form(Pg, ring_of(u), ring_of(v)),
                      sigma_action(Sg, cls(u), v)));
    }
  }
}

TEST_CASE("homological form") {
  SurfaceModel S = build_surface(1, 1);
  FoxPairing P = surface_pairing(S);
  Alphabet al = surface_alphabet(1);
  auto im1 = [&](const char* t) {
    return sub(ring_of(parse_word(al, t)), ring_one());
  };
  CHECK(homological_form(P, im1("a1"), im1("b1")) == 1);
  CHECK(homological_form(P, im1("b1"), im1("a1")) == -1);
  // skew form vanishes on (c, c) for simple closed curve classes
  for (const char* t : {"a1", "b1", "a1 b1"})
    CHECK(homological_form(P, im1(t), im1(t)) == 0);

  // bilinearity over random augmentation-zero elements, and insensitivity
  // to I^2 perturbations (oracle: direct expansion)
  std::mt19937 rng(1009);
  for (int it = 0; it < 20; ++it) {
    RingElement x = sub(ring_of(random_word(rng, 2, 4)), ring_one());
    RingElement y = sub(ring_of(random_word(rng, 2, 4)), ring_one());
    RingElement z = sub(ring_of(random_word(rng, 2, 4)), ring_one());
    CHECK(homological_form(P, add(x, scale(y, rat(3, 2))), z) ==
          homological_form(P, x, z) +
              rat(3, 2) * homological_form(P, y, z));
    RingElement pert = mul(y, z);  // lies in I^2
    CHECK(homological_form(P, add(x, pert), z) == homological_form(P, x, z));
    CHECK(homological_form(P, x, add(z, pert)) == homological_form(P, x, z));
  }

  CHECK_THROWS_AS(homological_form(P, ring_one(), im1("a1")),
                  std::invalid_argument);
}

TEST_CASE("generic twist") {
  SurfaceModel S = build_surface(1, 1);
  FoxPairing P = surface_pairing(S);
  Alphabet al = surface_alphabet(1);
  int N = 5;
  Expansion th0 = exponential_expansion_free(2, N);
  auto same_mod = [&](const RingElement& a, const RingElement& b) {
    return sub(apply_expansion(th0, a), apply_expansion(th0, b)).is_zero();
  };

  // trivial curve and r = 0 give the identity
  TwistEndomorphism id1 = generic_twist(P, GroupWord{}, rat(1, 2), N);
  TwistEndomorphism id2 = generic_twist(P, parse_word(al, "a1"), 0, N);
  for (int i = 1; i <= 2; ++i) {
    CHECK(same_mod(id1.images[i - 1], ring_of(gen_word(i))));
    CHECK(same_mod(id2.images[i - 1], ring_of(gen_word(i))));
  }

  // r = 1/2 on a simple curve agrees with the classical Dehn twist
  for (const char* t : {"a1", "b1"}) {
    GroupWord C = parse_word(al, t);
    TwistEndomorphism E = generic_twist(P, C, rat(1, 2), N);
    std::vector<GroupWord> cw = classical_twist_images(S, C);
    for (int i = 1; i <= 2; ++i)
      CHECK(same_mod(E.images[i - 1], ring_of(cw[i - 1])));
    // the twist fixes its own curve
    CHECK(same_mod(apply_twist(E, C), ring_of(C)));
  }

  // group law in the parameter r, and multiplicativity mod I^N
  GroupWord C = parse_word(al, "a1");
  TwistEndomorphism E1 = generic_twist(P, C, rat(1, 3), 4);
  TwistEndomorphism E2 = generic_twist(P, C, rat(1, 6), 4);
  TwistEndomorphism E12 = generic_twist(P, C, rat(1, 2), 4);
  TwistEndomorphism comp = E1;
  for (int i = 0; i < 2; ++i) comp.images[i] = apply_twist(E1, E2.images[i]);
  CHECK(twists_equal(comp, E12));

  std::mt19937 rng(1103);
  TwistEndomorphism E = generic_twist(P, parse_word(al, "b1"), rat(1, 2), 4);
  Expansion t4 = exponential_expansion_free(2, 4);
  for (int it = 0; it < 8; ++it) {
    GroupWord w1 = random_word(rng, 2, 3), w2 = random_word(rng, 2, 3);
    TensorElement lhs = apply_expansion(t4, apply_twist(E, mul(w1, w2)));
    TensorElement rhs = mul(apply_expansion(t4, apply_twist(E, w1)),
                            apply_expansion(t4, apply_twist(E, w2)));
    CHECK(sub(lhs, rhs).is_zero());
  }

  // non-isotropic class under a non-skew pairing is rejected
  FoxPairing bad;
  bad.rank = 2;
  bad.table[{1, 1}] = ring_one();
  CHECK_THROWS_AS(generic_twist(bad, gen_word(1), rat(1, 2), 4),
                  std::domain_error);
}
