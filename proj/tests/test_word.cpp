#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "looptwist/word.hpp"

using namespace looptwist;

namespace {

GroupWord random_word(std::mt19937& rng, int gens, int maxlen) {
  std::uniform_int_distribution<int> len(0, maxlen), g(1, gens), s(0, 1);
  GroupWord w;
  int n = len(rng);
  for (int i = 0; i < n; ++i) reduce_append(w.ls, s(rng) ? g(rng) : -g(rng));
  return w;
}

// brute-force minimal rotation oracle
std::vector<int> min_rotation_oracle(std::vector<int> v) {
  if (v.empty()) return v;
  std::vector<int> best = v;
  for (std::size_t k = 1; k < v.size(); ++k) {
    std::rotate(v.begin(), v.begin() + 1, v.end());
    best = std::min(best, v);
  }
  return best;
}

}  // namespace

TEST_CASE("basic word operations") {
  Alphabet al = surface_alphabet(2);
  auto a1 = parse_word(al, "a1"), b1 = parse_word(al, "b1");
  CHECK(mul(a1, parse_word(al, "A1")).empty());
  CHECK(power(mul(a1, b1), 2) == parse_word(al, "a1 b1 a1 b1"));
  CHECK(inverse(parse_word(al, "a1 b1 A1")) == parse_word(al, "a1 B1 A1"));
  CHECK(power(a1, -2) == parse_word(al, "A1 A1"));
  CHECK(parse_word(al, "1").empty());
  CHECK(print_word(al, GroupWord{}) == "1");
  CHECK(print_word(al, parse_word(al, "a1 B2 A1")) == "a1 B2 A1");
  CHECK_THROWS_AS(parse_word(al, "c1"), std::invalid_argument);
}

TEST_CASE("free reduction is confluent under interleaving") {
  std::mt19937 rng(11);
  for (int t = 0; t < 200; ++t) {
    auto x = random_word(rng, 4, 8), y = random_word(rng, 4, 8),
         z = random_word(rng, 4, 8);
    CHECK(mul(mul(x, y), z) == mul(x, mul(y, z)));
    // reducing the raw concatenation in one pass agrees
    std::vector<int> raw = x.ls;
    raw.insert(raw.end(), y.ls.begin(), y.ls.end());
    raw.insert(raw.end(), z.ls.begin(), z.ls.end());
    CHECK(make_word(raw) == mul(mul(x, y), z));
  }
}

TEST_CASE("ring Hopf structure") {
  Alphabet al = surface_alphabet(1);
  auto a1 = parse_word(al, "a1");
  RingElement e = sub(ring_of(a1), ring_one());
  CHECK(augmentation(e) == 0);

  auto cp = coproduct(ring_of(a1));
  REQUIRE(cp.size() == 1);
  CHECK(cp[0].left == a1);
  CHECK(cp[0].right == a1);
  CHECK(cp[0].coeff == 1);

  auto w = parse_word(al, "a1 b1");
  CHECK(antipode(scale(ring_of(w), 3)) ==
        scale(ring_of(parse_word(al, "B1 A1")), 3));

  // Delta is an algebra map: on group algebras both sides are sums of
  // (uv, uv) over term pairs.
  std::mt19937 rng(5);
  for (int t = 0; t < 30; ++t) {
    RingElement x, y;
    for (int i = 0; i < 4; ++i) {
      x.add_term(random_word(rng, 2, 5), rat((int)(rng() % 7) - 3));
      y.add_term(random_word(rng, 2, 5), rat((int)(rng() % 7) - 3));
    }
    std::map<std::pair<GroupWord, GroupWord>, Rational> lhs, rhs;
    for (const auto& t1 : coproduct(mul(x, y)))
      if (t1.coeff != 0) lhs[{t1.left, t1.right}] += t1.coeff;
    for (const auto& tx : coproduct(x))
      for (const auto& ty : coproduct(y))
        rhs[{mul(tx.left, ty.left), mul(tx.right, ty.right)}] +=
            tx.coeff * ty.coeff;
    for (auto* m : {&lhs, &rhs})
      for (auto it = m->begin(); it != m->end();)
        it = (it->second == 0) ? m->erase(it) : std::next(it);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("conjugacy class normal form") {
  Alphabet al = surface_alphabet(1);
  CHECK(class_of(parse_word(al, "a1 b1 A1")) == class_of(parse_word(al, "b1")));
  CHECK(class_of(GroupWord{}).trivial());

  std::mt19937 rng(17);
  for (int t = 0; t < 300; ++t) {
    auto w = random_word(rng, 3, 12);
    // invariance under rotation of the letters
    if (!w.ls.empty()) {
      std::vector<int> rot = w.ls;
      std::rotate(rot.begin(), rot.begin() + (rng() % rot.size()), rot.end());
      CHECK(class_of(make_word(rot)) == class_of(w));
    }
    // invariance under conjugation
    auto c = random_word(rng, 3, 6);
    CHECK(class_of(conjugate(c, w)) == class_of(w));
    // Booth vs brute force on the cyclically reduced core
    auto core = cyclic_reduce(w.ls);
    CHECK(class_of(w).rep == min_rotation_oracle(core));
  }
}

TEST_CASE("class projection is linear and conjugation-invariant") {
  Alphabet al = surface_alphabet(2);
  std::mt19937 rng(23);
  for (int t = 0; t < 50; ++t) {
    RingElement x;
    for (int i = 0; i < 3; ++i)
      x.add_term(random_word(rng, 4, 6), rat((int)(rng() % 9) - 4));
    auto c = random_word(rng, 4, 4);
    RingElement xc;
    for (const auto& [w, q] : x.terms) xc.add_term(conjugate(c, w), q);
    CHECK(class_projection(x) == class_projection(xc));
  }
}

TEST_CASE("unoriented classes") {
  Alphabet al = surface_alphabet(1);
  auto u1 = unoriented_of(parse_word(al, "a1"));
  auto u2 = unoriented_of(parse_word(al, "A1"));
  CHECK(u1 == u2);
  CHECK_FALSE(u1.palindromic);

  // a palindromic-class example: w conjugate to its inverse
  auto w = parse_word(al, "a1 A1");
  CHECK(unoriented_of(w).palindromic);  // trivial class

  auto exp = oriented_expansion(u1);
  CHECK(exp.terms.size() == 2);
  CHECK(exp.terms.at(class_of(parse_word(al, "a1"))) == 1);
  CHECK(exp.terms.at(class_of(parse_word(al, "A1"))) == 1);
}
