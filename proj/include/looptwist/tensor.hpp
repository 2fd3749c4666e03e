#ifndef LOOPTWIST_TENSOR_HPP
#define LOOPTWIST_TENSOR_HPP

// Truncated tensor algebra on H = H_1(Sigma;Q), the free Lie algebra in its
// Lyndon basis, exponential/logarithm/BCH, the symplectic element, and
// symplectic derivations. Letters 1..2g name the basis A1,B1,...,Ag,Bg
// (letter 2i-1 = A_i, letter 2i = B_i), matching the group generators.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "looptwist/rational.hpp"

namespace looptwist {

using Monomial = std::vector<int>;  // letter sequence; degree = length

struct HVector {
  std::vector<Rational> c;  // coefficients over A1,B1,...,Ag,Bg

  bool operator==(const HVector&) const = default;
  int dim() const { return (int)c.size(); }
};

inline std::string letter_name(int l) {
  int i = (l + 1) / 2;
  return std::string((l % 2 == 1) ? "A" : "B") + std::to_string(i);
}

// ---------------------------------------------------------------------------
// Tensor elements.
// ---------------------------------------------------------------------------
struct TensorElement {
  int nletters = 0;
  int trunc = 0;  // degrees 0..trunc-1 stored
  std::map<Monomial, Rational> terms;

  bool operator==(const TensorElement&) const = default;
  bool is_zero() const { return terms.empty(); }

  void add_term(const Monomial& m, const Rational& q) {
    if (q == 0 || (int)m.size() >= trunc) return;
    auto it = terms.find(m);
    if (it == terms.end()) {
      terms.emplace(m, q);
    } else {
      it->second += q;
      if (it->second == 0) terms.erase(it);
    }
  }
  Rational get(const Monomial& m) const {
    auto it = terms.find(m);
    return it == terms.end() ? Rational(0) : it->second;
  }
  // lowest degree with a nonzero term; trunc if zero
  int valuation() const {
    int v = trunc;
    for (const auto& [m, q] : terms) v = std::min(v, (int)m.size());
    return v;
  }
  TensorElement graded_part(int d) const {
    TensorElement r{nletters, trunc, {}};
    for (const auto& [m, q] : terms)
      if ((int)m.size() == d) r.terms.emplace(m, q);
    return r;
  }
};

inline void require_frame(const TensorElement& x, const TensorElement& y) {
  if (x.nletters != y.nletters || x.trunc != y.trunc)
    throw std::invalid_argument("tensor truncation frames differ");
}

inline TensorElement tensor_zero(int nletters, int trunc) {
  return TensorElement{nletters, trunc, {}};
}
inline TensorElement tensor_one(int nletters, int trunc) {
  TensorElement r{nletters, trunc, {}};
  r.add_term({}, 1);
  return r;
}
inline TensorElement tensor_letter(int nletters, int trunc, int l,
                                   const Rational& q = 1) {
  TensorElement r{nletters, trunc, {}};
  r.add_term({l}, q);
  return r;
}
inline TensorElement tensor_of_h(const HVector& h, int trunc) {
  TensorElement r{h.dim(), trunc, {}};
  for (int i = 0; i < h.dim(); ++i) r.add_term({i + 1}, h.c[i]);
  return r;
}

inline TensorElement add(const TensorElement& x, const TensorElement& y) {
  require_frame(x, y);
  TensorElement r = x;
  for (const auto& [m, q] : y.terms) r.add_term(m, q);
  return r;
}
inline TensorElement scale(const TensorElement& x, const Rational& s) {
  TensorElement r{x.nletters, x.trunc, {}};
  if (s == 0) return r;
  for (const auto& [m, q] : x.terms) r.terms.emplace(m, q * s);
  return r;
}
inline TensorElement sub(const TensorElement& x, const TensorElement& y) {
  return add(x, scale(y, -1));
}
inline TensorElement mul(const TensorElement& x, const TensorElement& y) {
  require_frame(x, y);
  TensorElement r{x.nletters, x.trunc, {}};
  for (const auto& [mx, qx] : x.terms)
    for (const auto& [my, qy] : y.terms) {
      if ((int)(mx.size() + my.size()) >= x.trunc) continue;
      Monomial m = mx;
      m.insert(m.end(), my.begin(), my.end());
      r.add_term(m, qx * qy);
    }
  return r;
}
inline TensorElement truncate(const TensorElement& x, int new_trunc) {
  TensorElement r{x.nletters, new_trunc, {}};
  for (const auto& [m, q] : x.terms)
    if ((int)m.size() < new_trunc) r.terms.emplace(m, q);
  return r;
}

// coproduct: Delta(letter word) = sum over subsets (deshuffle)
inline std::map<std::pair<Monomial, Monomial>, Rational> tensor_coproduct(
    const TensorElement& x) {
  std::map<std::pair<Monomial, Monomial>, Rational> out;
  for (const auto& [m, q] : x.terms) {
    int d = (int)m.size();
    for (long mask = 0; mask < (1l << d); ++mask) {
      Monomial l, r;
      for (int i = 0; i < d; ++i)
        ((mask >> i) & 1 ? l : r).push_back(m[i]);
      auto& slot = out[{l, r}];
      slot += q;
      if (slot == 0) out.erase({l, r});
    }
  }
  return out;
}

inline bool is_grouplike(const TensorElement& x) {
  if (x.get({}) != 1) return false;
  auto cp = tensor_coproduct(x);
  // compare with x (x) x on total degree < trunc
  std::map<std::pair<Monomial, Monomial>, Rational> want;
  for (const auto& [ml, ql] : x.terms)
    for (const auto& [mr, qr] : x.terms) {
      if ((int)(ml.size() + mr.size()) >= x.trunc) continue;
      auto& slot = want[{ml, mr}];
      slot += ql * qr;
      if (slot == 0) want.erase({ml, mr});
    }
  return cp == want;
}

inline bool is_primitive(const TensorElement& x) {
  if (x.get({}) != 0) return false;
  auto cp = tensor_coproduct(x);
  std::map<std::pair<Monomial, Monomial>, Rational> want;
  for (const auto& [m, q] : x.terms) {
    if (m.empty()) continue;
    want[{m, {}}] += q;
    want[{{}, m}] += q;
  }
  for (auto it = want.begin(); it != want.end();)
    it = (it->second == 0) ? want.erase(it) : std::next(it);
  return cp == want;
}

inline TensorElement t_exp(const TensorElement& x) {
  if (x.get({}) != 0)
    throw std::domain_error("exp requires zero constant term");
  TensorElement r = tensor_one(x.nletters, x.trunc);
  TensorElement p = tensor_one(x.nletters, x.trunc);
  Rational f = 1;
  for (int k = 1; k < x.trunc; ++k) {
    p = mul(p, x);
    if (p.is_zero()) break;
    f /= k;
    r = add(r, scale(p, f));
  }
  return r;
}

inline TensorElement t_log(const TensorElement& x) {
  if (x.get({}) != 1)
    throw std::domain_error("log requires constant term 1");
  TensorElement u = sub(x, tensor_one(x.nletters, x.trunc));
  TensorElement r = tensor_zero(x.nletters, x.trunc);
  TensorElement p = tensor_one(x.nletters, x.trunc);
  for (int k = 1; k < x.trunc; ++k) {
    p = mul(p, u);
    if (p.is_zero()) break;
    r = add(r, scale(p, rat(k % 2 == 1 ? 1 : -1, k)));
  }
  return r;
}

inline std::string print_monomial(const Monomial& m) {
  if (m.empty()) return "1";
  std::string s;
  for (int l : m) {
    if (!s.empty()) s += '.';
    s += letter_name(l);
  }
  return s;
}

inline std::string print_tensor(const TensorElement& x) {
  if (x.is_zero()) return "0";
  std::string s;
  for (const auto& [m, q] : x.terms) {
    if (!s.empty()) s += " + ";
    s += to_string(q) + "*" + print_monomial(m);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Lyndon words and the free Lie algebra.
// ---------------------------------------------------------------------------
inline bool is_lyndon(const Monomial& w) {
  if (w.empty()) return false;
  int n = (int)w.size();
  for (int s = 1; s < n; ++s) {
    // w must be strictly smaller than its proper suffix w[s..]
    Monomial suf(w.begin() + s, w.end());
    if (!(w < suf)) return false;
  }
  return true;
}

// all Lyndon words of the given degree (Duval's algorithm)
inline std::vector<Monomial> lyndon_words(int nletters, int degree) {
  std::vector<Monomial> out;
  std::vector<int> w{1};
  while (!w.empty()) {
    if ((int)w.size() == degree) out.push_back(w);
    int n = (int)w.size();
    while ((int)w.size() < degree) w.push_back(w[w.size() % n]);
    while (!w.empty() && w.back() == nletters) w.pop_back();
    if (!w.empty()) ++w.back();
  }
  std::sort(out.begin(), out.end());
  return out;
}

// standard factorization w = uv with v the longest proper Lyndon suffix;
// the bracketing is [sigma(u), sigma(v)]
inline TensorElement lyndon_expand(int nletters, int trunc,
                                   const Monomial& w) {
  if (w.size() == 1) return tensor_letter(nletters, trunc, w[0]);
  int n = (int)w.size();
  int split = -1;
  for (int s = 1; s < n; ++s) {
    Monomial suf(w.begin() + s, w.end());
    if (is_lyndon(suf)) {
      split = s;
      break;  // earliest start = longest Lyndon proper suffix
    }
  }
  if (split < 0) throw std::invalid_argument("not a Lyndon word");
  Monomial u(w.begin(), w.begin() + split), v(w.begin() + split, w.end());
  TensorElement eu = lyndon_expand(nletters, trunc, u);
  TensorElement ev = lyndon_expand(nletters, trunc, v);
  return sub(mul(eu, ev), mul(ev, eu));
}

struct LieElement {
  int nletters = 0;
  int trunc = 0;
  std::map<Monomial, Rational> terms;  // keys are Lyndon words

  bool operator==(const LieElement&) const = default;
  bool is_zero() const { return terms.empty(); }
  void add_term(const Monomial& m, const Rational& q) {
    if (q == 0 || (int)m.size() >= trunc) return;
    auto it = terms.find(m);
    if (it == terms.end()) {
      terms.emplace(m, q);
    } else {
      it->second += q;
      if (it->second == 0) terms.erase(it);
    }
  }
  int valuation() const {
    int v = trunc;
    for (const auto& [m, q] : terms) v = std::min(v, (int)m.size());
    return v;
  }
};

inline LieElement lie_zero(int nletters, int trunc) {
  return LieElement{nletters, trunc, {}};
}

inline TensorElement lie_to_tensor(const LieElement& x) {
  TensorElement r = tensor_zero(x.nletters, x.trunc);
  for (const auto& [m, q] : x.terms)
    r = add(r, scale(lyndon_expand(x.nletters, x.trunc, m), q));
  return r;
}

// Triangular conversion: the expansion of a Lyndon bracketing has the
// Lyndon word itself as its lexicographically least monomial, with
// coefficient 1; repeatedly strip the least remaining monomial.
inline LieElement tensor_to_lie(const TensorElement& x) {
  LieElement out = lie_zero(x.nletters, x.trunc);
  TensorElement rest = x;
  while (!rest.is_zero()) {
    // least monomial of the lowest degree present
    int d = rest.valuation();
    const Monomial* least = nullptr;
    for (const auto& [m, q] : rest.terms)
      if ((int)m.size() == d && (least == nullptr || m < *least)) least = &m;
    Monomial w = *least;
    Rational c = rest.get(w);
    if (!is_lyndon(w))
      throw std::invalid_argument(
          "tensor element is not a Lie element (leading monomial " +
          print_monomial(w) + " is not Lyndon)");
    out.add_term(w, c);
    rest = sub(rest, scale(lyndon_expand(x.nletters, x.trunc, w), c));
    if (!rest.is_zero() && rest.valuation() == d && rest.get(w) != 0)
      throw std::logic_error("triangular elimination failed to progress");
  }
  return out;
}

inline LieElement add(const LieElement& x, const LieElement& y) {
  if (x.nletters != y.nletters || x.trunc != y.trunc)
    throw std::invalid_argument("lie truncation frames differ");
  LieElement r = x;
  for (const auto& [m, q] : y.terms) r.add_term(m, q);
  return r;
}
inline LieElement scale(const LieElement& x, const Rational& s) {
  LieElement r = lie_zero(x.nletters, x.trunc);
  if (s == 0) return r;
  for (const auto& [m, q] : x.terms) r.terms.emplace(m, q * s);
  return r;
}
inline LieElement sub(const LieElement& x, const LieElement& y) {
  return add(x, scale(y, -1));
}

inline LieElement lie_bracket(const LieElement& x, const LieElement& y) {
  TensorElement tx = lie_to_tensor(x), ty = lie_to_tensor(y);
  return tensor_to_lie(sub(mul(tx, ty), mul(ty, tx)));
}

inline LieElement bch(const LieElement& x, const LieElement& y) {
  TensorElement ex = t_exp(lie_to_tensor(x)), ey = t_exp(lie_to_tensor(y));
  return tensor_to_lie(t_log(mul(ex, ey)));
}

// Lyndon-bracket printing: [u, v] by the standard factorization.
inline std::string print_lyndon_bracket(const Monomial& w) {
  if (w.size() == 1) return letter_name(w[0]);
  int n = (int)w.size();
  for (int s = 1; s < n; ++s) {
    Monomial suf(w.begin() + s, w.end());
    if (is_lyndon(suf)) {
      Monomial u(w.begin(), w.begin() + s);
      return "[" + print_lyndon_bracket(u) + "," + print_lyndon_bracket(suf) +
             "]";
    }
  }
  return "?";
}

inline std::string print_lie(const LieElement& x) {
  if (x.is_zero()) return "0";
  std::string s;
  for (const auto& [m, q] : x.terms) {
    if (!s.empty()) s += " + ";
    s += to_string(q) + "*" + print_lyndon_bracket(m);
  }
  return s;
}

// ---------------------------------------------------------------------------
// The symplectic form, the symplectic element, and derivations.
// ---------------------------------------------------------------------------
// omega(A_i, B_i) = +1; letters 2i-1, 2i pair up
inline Rational omega_form_letters(int l1, int l2) {
  if (l2 == l1 + 1 && l1 % 2 == 1) return 1;
  if (l1 == l2 + 1 && l2 % 2 == 1) return -1;
  return 0;
}

inline Rational omega_form(const HVector& x, const HVector& y) {
  if (x.dim() != y.dim()) throw std::invalid_argument("dimension mismatch");
  Rational s = 0;
  for (int i = 1; i <= x.dim(); ++i)
    for (int j = 1; j <= y.dim(); ++j)
      s += x.c[i - 1] * y.c[j - 1] * omega_form_letters(i, j);
  return s;
}

// the symplectic element omega in Lie degree 2; the global sign is fixed by
// requiring log theta_0(zeta) = -omega in degree 2 (verified in tests):
// omega = sum_i (B_i A_i - A_i B_i) = - sum_i [A_i, B_i]
inline LieElement omega_element(int genus, int trunc) {
  LieElement w = lie_zero(2 * genus, trunc);
  for (int i = 1; i <= genus; ++i) w.add_term({2 * i - 1, 2 * i}, -1);
  return w;
}

// A derivation of the (truncated) tensor algebra, recorded by its values on
// the letters. Values may be inhomogeneous.
struct TensorDerivation {
  std::vector<TensorElement> images;  // images[l-1] = D(letter l)

  int nletters() const { return (int)images.size(); }
  int trunc() const { return images.empty() ? 0 : images[0].trunc; }
};

inline TensorDerivation derivation_zero(int nletters, int trunc) {
  TensorDerivation d;
  d.images.assign(nletters, tensor_zero(nletters, trunc));
  return d;
}

// the degree-0 symplectic derivation h -> omega(c, h) c
inline TensorDerivation transvection_derivation(const HVector& c, int trunc) {
  TensorDerivation d = derivation_zero(c.dim(), trunc);
  TensorElement tc = tensor_of_h(c, trunc);
  for (int l = 1; l <= c.dim(); ++l) {
    HVector e;
    e.c.assign(c.dim(), Rational(0));
    e.c[l - 1] = 1;
    d.images[l - 1] = scale(tc, omega_form(c, e));
  }
  return d;
}

inline TensorElement apply_derivation(const TensorDerivation& D,
                                      const TensorElement& x) {
  TensorElement r = tensor_zero(x.nletters, x.trunc);
  for (const auto& [m, q] : x.terms)
    for (std::size_t i = 0; i < m.size(); ++i) {
      // replace the i-th letter by its image
      const TensorElement& im = D.images.at(m[i] - 1);
      for (const auto& [mi, qi] : im.terms) {
        if ((int)(m.size() - 1 + mi.size()) >= x.trunc) continue;
        Monomial out(m.begin(), m.begin() + i);
        out.insert(out.end(), mi.begin(), mi.end());
        out.insert(out.end(), m.begin() + i + 1, m.end());
        r.add_term(out, q * qi);
      }
    }
  return r;
}

inline LieElement apply_derivation(const TensorDerivation& D,
                                   const LieElement& x) {
  return tensor_to_lie(apply_derivation(D, lie_to_tensor(x)));
}

inline TensorDerivation derivation_bracket(const TensorDerivation& D1,
                                           const TensorDerivation& D2) {
  TensorDerivation r = derivation_zero(D1.nletters(), D1.trunc());
  for (int l = 1; l <= D1.nletters(); ++l)
    r.images[l - 1] = sub(apply_derivation(D1, D2.images[l - 1]),
                          apply_derivation(D2, D1.images[l - 1]));
  return r;
}

inline bool check_symplectic(const TensorDerivation& D, int genus) {
  LieElement w = omega_element(genus, D.trunc());
  return apply_derivation(D, lie_to_tensor(w)).is_zero();
}

}  // namespace looptwist

#endif
