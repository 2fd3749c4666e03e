#ifndef LOOPTWIST_WORD_HPP
#define LOOPTWIST_WORD_HPP

// Free groups and their rational group rings: reduced words, Hopf
// operations, conjugacy classes (free loops) and unoriented classes.

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "looptwist/rational.hpp"

namespace looptwist {

// ---------------------------------------------------------------------------
// Alphabets. A letter is a nonzero int: +g is generator number g (1-based),
// -g its inverse. Names are supplied by an Alphabet for parsing/printing.
// ---------------------------------------------------------------------------
struct Alphabet {
  std::vector<std::string> names;  // names[g-1] is the name of generator g

  int size() const { return (int)names.size(); }
  int find(const std::string& lower) const {
    for (int g = 1; g <= size(); ++g)
      if (names[g - 1] == lower) return g;
    return 0;
  }
};

// a1, b1, ..., ag, bg — the standard one-boundary surface generators.
inline Alphabet surface_alphabet(int genus) {
  Alphabet al;
  for (int i = 1; i <= genus; ++i) {
    al.names.push_back("a" + std::to_string(i));
    al.names.push_back("b" + std::to_string(i));
  }
  return al;
}

// r1..r4 — the pair-of-pants groupoid generators.
inline Alphabet pants_alphabet() {
  return Alphabet{{"r1", "r2", "r3", "r4"}};
}

// ---------------------------------------------------------------------------
// Words.
// ---------------------------------------------------------------------------
struct GroupWord {
  std::vector<int> ls;  // freely reduced

  auto operator<=>(const GroupWord&) const = default;
  bool empty() const { return ls.empty(); }
  int length() const { return (int)ls.size(); }
};

inline void reduce_append(std::vector<int>& out, int letter) {
  if (!out.empty() && out.back() == -letter)
    out.pop_back();
  else
    out.push_back(letter);
}

inline GroupWord make_word(const std::vector<int>& letters) {
  GroupWord w;
  for (int l : letters) {
    if (l == 0) throw std::invalid_argument("zero letter");
    reduce_append(w.ls, l);
  }
  return w;
}

inline GroupWord mul(const GroupWord& x, const GroupWord& y) {
  GroupWord w = x;
  for (int l : y.ls) reduce_append(w.ls, l);
  return w;
}

inline GroupWord inverse(const GroupWord& x) {
  GroupWord w;
  for (auto it = x.ls.rbegin(); it != x.ls.rend(); ++it) w.ls.push_back(-*it);
  return w;
}

inline GroupWord power(const GroupWord& x, int n) {
  GroupWord base = n < 0 ? inverse(x) : x;
  GroupWord w;
  for (int i = 0; i < std::abs(n); ++i) w = mul(w, base);
  return w;
}

inline GroupWord conjugate(const GroupWord& c, const GroupWord& x) {
  return mul(mul(c, x), inverse(c));
}

inline GroupWord gen_word(int g) { return GroupWord{{g}}; }

// Parsing / printing against an alphabet. Lowercase token = generator,
// capitalized first letter = inverse, "1" = empty word.
inline GroupWord parse_word(const Alphabet& al, const std::string& text) {
  GroupWord w;
  std::string tok;
  auto flush = [&] {
    if (tok.empty()) return;
    if (tok == "1") {
      tok.clear();
      return;
    }
    bool inv = std::isupper((unsigned char)tok[0]) != 0;
    std::string lower = tok;
    lower[0] = (char)std::tolower((unsigned char)lower[0]);
    int g = al.find(lower);
    if (g == 0) throw std::invalid_argument("unknown generator token: " + tok);
    reduce_append(w.ls, inv ? -g : g);
    tok.clear();
  };
  for (char ch : text) {
    if (std::isspace((unsigned char)ch))
      flush();
    else
      tok.push_back(ch);
  }
  flush();
  return w;
}

inline std::string print_word(const Alphabet& al, const GroupWord& w) {
  if (w.empty()) return "1";
  std::string out;
  for (int l : w.ls) {
    if (!out.empty()) out += ' ';
    std::string name = al.names.at(std::abs(l) - 1);
    if (l < 0) name[0] = (char)std::toupper((unsigned char)name[0]);
    out += name;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Group ring Q<free group>.
// ---------------------------------------------------------------------------
struct RingElement {
  std::map<GroupWord, Rational> terms;  // no zero coefficients

  bool operator==(const RingElement&) const = default;
  bool is_zero() const { return terms.empty(); }

  void add_term(const GroupWord& w, const Rational& c) {
    if (c == 0) return;
    auto it = terms.find(w);
    if (it == terms.end()) {
      terms.emplace(w, c);
    } else {
      it->second += c;
      if (it->second == 0) terms.erase(it);
    }
  }
};

inline RingElement ring_zero() { return {}; }
inline RingElement ring_of(const GroupWord& w, const Rational& c = 1) {
  RingElement e;
  e.add_term(w, c);
  return e;
}
inline RingElement ring_one() { return ring_of(GroupWord{}); }

inline RingElement add(const RingElement& x, const RingElement& y) {
  RingElement r = x;
  for (const auto& [w, c] : y.terms) r.add_term(w, c);
  return r;
}

inline RingElement scale(const RingElement& x, const Rational& s) {
  RingElement r;
  if (s == 0) return r;
  for (const auto& [w, c] : x.terms) r.terms[w] = c * s;
  return r;
}

inline RingElement sub(const RingElement& x, const RingElement& y) {
  return add(x, scale(y, -1));
}

inline RingElement mul(const RingElement& x, const RingElement& y) {
  RingElement r;
  for (const auto& [wx, cx] : x.terms)
    for (const auto& [wy, cy] : y.terms) r.add_term(mul(wx, wy), cx * cy);
  return r;
}

inline RingElement ring_power(const RingElement& x, int n) {
  RingElement r = ring_one();
  for (int i = 0; i < n; ++i) r = mul(r, x);
  return r;
}

// Hopf structure of a group algebra: epsilon(w)=1, Delta(w)=w (x) w,
// antipode(w)=w^{-1}.
inline Rational augmentation(const RingElement& x) {
  Rational s = 0;
  for (const auto& [w, c] : x.terms) s += c;
  return s;
}

// Apply a substitution generator -> word to a word.
inline GroupWord apply_substitution(const std::vector<GroupWord>& images,
                                    const GroupWord& w) {
  GroupWord out;
  for (int l : w.ls) {
    const GroupWord& g = images.at(std::abs(l) - 1);
    if (l > 0)
      for (int x : g.ls) reduce_append(out.ls, x);
    else
      for (auto it = g.ls.rbegin(); it != g.ls.rend(); ++it)
        reduce_append(out.ls, -*it);
  }
  return out;
}

inline RingElement antipode(const RingElement& x) {
  RingElement r;
  for (const auto& [w, c] : x.terms) r.add_term(inverse(w), c);
  return r;
}

struct CoproductTerm {
  GroupWord left, right;
  Rational coeff;
};

inline std::vector<CoproductTerm> coproduct(const RingElement& x) {
  std::vector<CoproductTerm> out;
  for (const auto& [w, c] : x.terms) out.push_back({w, w, c});
  return out;
}

// ---------------------------------------------------------------------------
// Conjugacy classes: cyclic reduction + lexicographically minimal rotation
// (Booth's least-rotation algorithm for a deterministic normal form).
// ---------------------------------------------------------------------------
inline std::vector<int> cyclic_reduce(std::vector<int> v) {
  std::size_t lo = 0, hi = v.size();
  while (hi - lo >= 2 && v[lo] == -v[hi - 1]) {
    ++lo;
    --hi;
  }
  return std::vector<int>(v.begin() + lo, v.begin() + hi);
}

inline std::size_t least_rotation(const std::vector<int>& s) {
  if (s.empty()) return 0;
  std::size_t n = s.size();
  auto at = [&](std::size_t i) { return s[i % n]; };
  std::vector<long> f(2 * n, -1);
  std::size_t k = 0;
  for (std::size_t j = 1; j < 2 * n; ++j) {
    int sj = at(j);
    long i = f[j - k - 1];
    while (i != -1 && sj != at(k + i + 1)) {
      if (sj < at(k + i + 1)) k = j - i - 1;
      i = f[i];
    }
    if (sj != at(k + i + 1)) {
      if (sj < at(k)) k = j;
      f[j - k] = -1;
    } else {
      f[j - k] = i + 1;
    }
  }
  return k % n;
}

struct ConjClass {
  std::vector<int> rep;  // cyclically reduced, minimal rotation

  auto operator<=>(const ConjClass&) const = default;
  bool trivial() const { return rep.empty(); }
  GroupWord word() const { return GroupWord{rep}; }
};

inline ConjClass class_of(const GroupWord& w) {
  std::vector<int> v = cyclic_reduce(w.ls);
  std::size_t k = least_rotation(v);
  std::rotate(v.begin(), v.begin() + k, v.end());
  return ConjClass{v};
}

inline ConjClass class_inverse(const ConjClass& c) {
  return class_of(inverse(c.word()));
}

struct ClassCombo {
  std::map<ConjClass, Rational> terms;

  bool operator==(const ClassCombo&) const = default;
  bool is_zero() const { return terms.empty(); }
  void add_term(const ConjClass& w, const Rational& c) {
    if (c == 0) return;
    auto it = terms.find(w);
    if (it == terms.end()) {
      terms.emplace(w, c);
    } else {
      it->second += c;
      if (it->second == 0) terms.erase(it);
    }
  }
};

inline ClassCombo class_projection(const RingElement& x) {
  ClassCombo r;
  for (const auto& [w, c] : x.terms) r.add_term(class_of(w), c);
  return r;
}

inline ClassCombo combo_add(const ClassCombo& x, const ClassCombo& y) {
  ClassCombo r = x;
  for (const auto& [w, c] : y.terms) r.add_term(w, c);
  return r;
}

inline ClassCombo combo_scale(const ClassCombo& x, const Rational& s) {
  ClassCombo r;
  if (s == 0) return r;
  for (const auto& [w, c] : x.terms) r.terms[w] = c * s;
  return r;
}

// ---------------------------------------------------------------------------
// Unoriented classes ||x|| = |x| + |x^{-1}|.
// ---------------------------------------------------------------------------
struct UnorientedClass {
  ConjClass rep;         // the smaller of class(x), class(x^{-1})
  bool palindromic = false;  // class(x) == class(x^{-1})

  auto operator<=>(const UnorientedClass&) const = default;
  bool trivial() const { return rep.trivial(); }
};

inline UnorientedClass unoriented_of(const GroupWord& w) {
  ConjClass c = class_of(w), ci = class_inverse(c);
  if (c == ci) return UnorientedClass{c, true};
  return UnorientedClass{std::min(c, ci), false};
}

// ||x|| as an oriented ClassCombo (|x| + |x^{-1}|; palindromic: 2|x|).
inline ClassCombo oriented_expansion(const UnorientedClass& u) {
  ClassCombo r;
  r.add_term(u.rep, 1);
  r.add_term(class_inverse(u.rep), 1);  // doubles up when palindromic
  return r;
}

inline std::string print_class(const Alphabet& al, const ConjClass& c) {
  return "|" + print_word(al, c.word()) + "|";
}

}  // namespace looptwist

#endif
