#ifndef LOOPTWIST_SERIES_HPP
#define LOOPTWIST_SERIES_HPP

// Truncated formal power series over Q, in one variable around an explicit
// base point, plus the multivariate series used by the lambda recursion.
// Everything is exact; truncation order is part of the value.

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "looptwist/rational.hpp"

namespace looptwist {

// ---------------------------------------------------------------------------
// Univariate: a polynomial in (var - base) with terms of degree < order.
// ---------------------------------------------------------------------------
struct TruncatedSeries {
  std::string var = "x";
  Rational base = 0;
  int order = 0;                    // degrees stored are < order
  std::map<int, Rational> coeff;    // degree -> coefficient, no zeros stored

  static TruncatedSeries zero(std::string v, Rational b, int order) {
    return TruncatedSeries{std::move(v), std::move(b), order, {}};
  }
  static TruncatedSeries constant(std::string v, Rational b, int order,
                                  const Rational& c) {
    TruncatedSeries s = zero(std::move(v), std::move(b), order);
    s.set(0, c);
    return s;
  }
  // The displacement (var - base) itself.
  static TruncatedSeries shift(std::string v, Rational b, int order) {
    TruncatedSeries s = zero(std::move(v), std::move(b), order);
    s.set(1, 1);
    return s;
  }

  Rational get(int d) const {
    auto it = coeff.find(d);
    return it == coeff.end() ? Rational(0) : it->second;
  }
  void set(int d, const Rational& c) {
    if (d < 0) throw std::domain_error("negative degree");
    if (d >= order || c == 0)
      coeff.erase(d);
    else
      coeff[d] = c;
  }

  bool same_frame(const TruncatedSeries& o) const {
    return var == o.var && base == o.base;
  }
};

inline TruncatedSeries truncate(const TruncatedSeries& a, int order) {
  TruncatedSeries r = TruncatedSeries::zero(a.var, a.base, order);
  for (const auto& [d, c] : a.coeff)
    if (d < order) r.coeff[d] = c;
  return r;
}

inline TruncatedSeries add(const TruncatedSeries& a, const TruncatedSeries& b) {
  if (!a.same_frame(b))
    throw std::invalid_argument("series frames differ; substitute explicitly");
  TruncatedSeries r =
      TruncatedSeries::zero(a.var, a.base, std::min(a.order, b.order));
  for (const auto& [d, c] : a.coeff)
    if (d < r.order) r.coeff[d] = c;
  for (const auto& [d, c] : b.coeff)
    if (d < r.order) {
      Rational v = r.get(d) + c;
      r.set(d, v);
    }
  return r;
}

inline TruncatedSeries scale(const TruncatedSeries& a, const Rational& s) {
  TruncatedSeries r = TruncatedSeries::zero(a.var, a.base, a.order);
  if (s == 0) return r;
  for (const auto& [d, c] : a.coeff) r.coeff[d] = c * s;
  return r;
}

inline TruncatedSeries sub(const TruncatedSeries& a, const TruncatedSeries& b) {
  return add(a, scale(b, -1));
}

inline TruncatedSeries mul(const TruncatedSeries& a, const TruncatedSeries& b) {
  if (!a.same_frame(b))
    throw std::invalid_argument("series frames differ; substitute explicitly");
  TruncatedSeries r =
      TruncatedSeries::zero(a.var, a.base, std::min(a.order, b.order));
  for (const auto& [da, ca] : a.coeff)
    for (const auto& [db, cb] : b.coeff) {
      int d = da + db;
      if (d < r.order) r.set(d, r.get(d) + ca * cb);
    }
  return r;
}

inline TruncatedSeries power(const TruncatedSeries& a, int n) {
  TruncatedSeries r = TruncatedSeries::constant(a.var, a.base, a.order, 1);
  for (int i = 0; i < n; ++i) r = mul(r, a);
  return r;
}

// d/d(var); degree d+1 feeds degree d, so the result is exact through
// order-1 and is truncated there.
inline TruncatedSeries derive(const TruncatedSeries& a) {
  TruncatedSeries r = TruncatedSeries::zero(a.var, a.base, a.order - 1);
  for (const auto& [d, c] : a.coeff)
    if (d >= 1 && d - 1 < r.order) r.coeff[d - 1] = c * d;
  return r;
}

// Substitute (var - base) := s, where s has zero constant term. The result
// lives in s's frame.
inline TruncatedSeries compose(const TruncatedSeries& f,
                               const TruncatedSeries& s) {
  if (s.get(0) != 0)
    throw std::domain_error("compose requires zero constant term");
  int order = std::min(f.order, s.order);
  TruncatedSeries r = TruncatedSeries::zero(s.var, s.base, order);
  TruncatedSeries pw = TruncatedSeries::constant(s.var, s.base, order, 1);
  int top = 0;
  for (const auto& [d, c] : f.coeff)
    if (d < order) top = std::max(top, d);
  for (int d = 0; d <= top; ++d) {
    Rational c = f.get(d);
    if (c != 0) r = add(r, scale(pw, c));
    pw = mul(pw, s);
  }
  return r;
}

// Multiplicative inverse; requires a nonzero constant term.
inline TruncatedSeries invert_unit(const TruncatedSeries& a) {
  Rational c0 = a.get(0);
  if (c0 == 0) throw std::domain_error("inverse of a non-unit series");
  TruncatedSeries r = TruncatedSeries::zero(a.var, a.base, a.order);
  r.set(0, 1 / c0);
  for (int d = 1; d < a.order; ++d) {
    Rational acc = 0;
    for (int k = 1; k <= d; ++k) acc += a.get(k) * r.get(d - k);
    r.set(d, -acc / c0);
  }
  return r;
}

inline TruncatedSeries divide(const TruncatedSeries& a,
                              const TruncatedSeries& b) {
  return mul(a, invert_unit(b));
}

// Truncated polynomial evaluation at a rational point (plugs t := x - base).
inline Rational evaluate(const TruncatedSeries& a, const Rational& x) {
  Rational t = x - a.base, acc = 0;
  Rational pw = 1;
  int last = 0;
  for (const auto& [d, c] : a.coeff) {
    for (; last < d; ++last) pw *= t;
    acc += c * pw;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Named series of the power-series toolkit.
// ---------------------------------------------------------------------------

// log x around 1, in t = x-1: sum (-1)^(k+1) t^k / k.
inline TruncatedSeries series_log(int order) {
  TruncatedSeries s = TruncatedSeries::zero("x", 1, order);
  for (int k = 1; k < order; ++k)
    s.set(k, rat((k % 2) ? 1 : -1, k));
  return s;
}

// L(x) = 1/2 (log x)^2 around 1.
inline TruncatedSeries series_L(int order) {
  auto lg = series_log(order);
  return scale(mul(lg, lg), rat(1, 2));
}

// cosh u around 0 (auxiliary; factorial recursion, exact).
inline TruncatedSeries series_cosh(int order) {
  TruncatedSeries s = TruncatedSeries::zero("u", 0, order);
  Rational c = 1;
  for (int k = 0; k < order; k += 2) {
    s.set(k, c);
    c /= Rational((k + 1) * (k + 2));
  }
  return s;
}

// (arccosh(-x/2))^2 as a series in t = x+2:
//   -(1/4) sum_i  i! i! / ((i+1)(2i+1)!)  (4 - x^2)^{i+1},
// where 4 - x^2 = t(4 - t) after the substitution x = t - 2.
inline TruncatedSeries series_arccosh_sq_neg(int order) {
  TruncatedSeries r = TruncatedSeries::zero("x", -2, order);
  TruncatedSeries q = TruncatedSeries::zero("x", -2, order);  // 4 - x^2
  q.set(1, 4);
  q.set(2, -1);
  TruncatedSeries pw = q;  // q^{i+1}
  Rational c = 1;          // i! i! / ((i+1)(2i+1)!)
  for (int i = 0; (i + 1) <= order; ++i) {
    if (i > 0) {
      // consecutive-coefficient ratio of i!i!/((i+1)(2i+1)!)
      c *= rat(i * i * i, (i + 1) * (2 * i) * (2 * i + 1));
      pw = mul(pw, q);
    }
    r = add(r, scale(pw, -c / 4));
  }
  return r;
}

// chi = d/dx [ 1/2 (arccosh(-x/2))^2 ], stored in t = x+2 like its parent.
inline TruncatedSeries series_chi(int order) {
  return scale(derive(series_arccosh_sq_neg(order + 1)), rat(1, 2));
}

// A^{-1} around A = -1, in t = A+1: A = -(1-t), A^{-1} = -sum t^k.
inline TruncatedSeries series_A_inverse(int order) {
  TruncatedSeries s = TruncatedSeries::zero("A", -1, order);
  for (int k = 0; k < order; ++k) s.set(k, -1);
  return s;
}

// -A + A^{-1} in t = A+1 (auxiliary).
inline TruncatedSeries series_minusA_plus_Ainv(int order) {
  TruncatedSeries s = series_A_inverse(order);
  // -A = 1 - t
  s.set(0, s.get(0) + 1);
  s.set(1, s.get(1) - 1);
  return s;
}

// log(-A) in t = A+1: log(1-t) = -sum t^k/k (auxiliary).
inline TruncatedSeries series_log_minusA(int order) {
  TruncatedSeries s = TruncatedSeries::zero("A", -1, order);
  for (int k = 1; k < order; ++k) s.set(k, rat(-1, k));
  return s;
}

// (-A + A^{-1}) / (4 log(-A)) in t = A+1; the apparent pole cancels.
inline TruncatedSeries series_fraction(int order) {
  auto num = series_minusA_plus_Ainv(order + 1);
  auto den = scale(series_log_minusA(order + 1), 4);
  if (num.get(0) != 0 || den.get(0) != 0)
    throw std::logic_error("fraction series: expected vanishing constants");
  // Divide numerator and denominator by t before inverting.
  TruncatedSeries n2 = TruncatedSeries::zero("A", -1, order);
  TruncatedSeries d2 = TruncatedSeries::zero("A", -1, order);
  for (const auto& [d, c] : num.coeff)
    if (d - 1 < order) n2.set(d - 1, c);
  for (const auto& [d, c] : den.coeff)
    if (d - 1 < order) d2.set(d - 1, c);
  return divide(n2, d2);
}

// (-A + A^{-1}) log(-A) in t = A+1.
inline TruncatedSeries series_boundary_term(int order) {
  return mul(series_minusA_plus_Ainv(order), series_log_minusA(order));
}

// arcsinh z around 0: sum (-1)^k (2k)! / (4^k (k!)^2 (2k+1)) z^{2k+1}
// (auxiliary, exact factorial recursion).
inline TruncatedSeries series_arcsinh(int order) {
  TruncatedSeries s = TruncatedSeries::zero("z", 0, order);
  Rational c = 1;  // (2k)!/(4^k (k!)^2), k = 0
  for (int k = 0; 2 * k + 1 < order; ++k) {
    if (k > 0) c *= rat((2 * k - 1) * (2 * k), 4 * k * k);
    Rational term = ((k % 2) ? -c : c) / (2 * k + 1);
    s.set(2 * k + 1, term);
  }
  return s;
}

// ((h/2) / arcsinh(h/2))^2 around h = 0.
inline TruncatedSeries series_arcsinh_prefactor(int order) {
  // arcsinh(z) = sum c_d z^d; with z = h/2, arcsinh(h/2)/(h/2) becomes
  // sum c_d (h/2)^{d-1} = sum c_d 2^{1-d} h^{d-1}.
  auto a = series_arcsinh(order + 1);
  TruncatedSeries g = TruncatedSeries::zero("h", 0, order);
  for (const auto& [d, c] : a.coeff) {
    int k = d - 1;
    if (k < order) {
      Rational scaled = c / Rational(Integer(1) << k);
      g.set(k, scaled);
    }
  }
  auto inv = invert_unit(g);  // (h/2)/arcsinh(h/2)
  return mul(inv, inv);
}

// Dispatcher used by the CLI.
inline TruncatedSeries named_series(const std::string& name, int order) {
  if (name == "L") return series_L(order);
  if (name == "log") return series_log(order);
  if (name == "arccosh_sq_neg") return series_arccosh_sq_neg(order);
  if (name == "fraction") return series_fraction(order);
  if (name == "boundary_term") return series_boundary_term(order);
  if (name == "A_inverse") return series_A_inverse(order);
  if (name == "chi") return series_chi(order);
  if (name == "arcsinh_prefactor") return series_arcsinh_prefactor(order);
  throw std::invalid_argument("unknown series name: " + name);
}

// ---------------------------------------------------------------------------
// Multivariate truncated series in (X_i - 1), total degree < order.
// ---------------------------------------------------------------------------
struct MultiSeries {
  int nvars = 0;
  int order = 0;
  std::map<std::vector<int>, Rational> coeff;  // exponent vector -> coefficient

  static int total(const std::vector<int>& e) {
    int t = 0;
    for (int x : e) t += x;
    return t;
  }
  void set(const std::vector<int>& e, const Rational& c) {
    if ((int)e.size() != nvars) throw std::invalid_argument("bad exponent arity");
    if (total(e) >= order || c == 0)
      coeff.erase(e);
    else
      coeff[e] = c;
  }
  Rational get(const std::vector<int>& e) const {
    auto it = coeff.find(e);
    return it == coeff.end() ? Rational(0) : it->second;
  }
};

inline MultiSeries ms_zero(int nvars, int order) {
  return MultiSeries{nvars, order, {}};
}

inline MultiSeries ms_add(const MultiSeries& a, const MultiSeries& b) {
  if (a.nvars != b.nvars) throw std::invalid_argument("arity mismatch");
  MultiSeries r = ms_zero(a.nvars, std::min(a.order, b.order));
  for (const auto& [e, c] : a.coeff)
    if (MultiSeries::total(e) < r.order) r.coeff[e] = c;
  for (const auto& [e, c] : b.coeff)
    if (MultiSeries::total(e) < r.order) r.set(e, r.get(e) + c);
  return r;
}

inline MultiSeries ms_scale(const MultiSeries& a, const Rational& s) {
  MultiSeries r = ms_zero(a.nvars, a.order);
  if (s == 0) return r;
  for (const auto& [e, c] : a.coeff) r.coeff[e] = c * s;
  return r;
}

inline MultiSeries ms_mul(const MultiSeries& a, const MultiSeries& b) {
  if (a.nvars != b.nvars) throw std::invalid_argument("arity mismatch");
  MultiSeries r = ms_zero(a.nvars, std::min(a.order, b.order));
  for (const auto& [ea, ca] : a.coeff)
    for (const auto& [eb, cb] : b.coeff) {
      std::vector<int> e(a.nvars);
      int t = 0;
      for (int i = 0; i < a.nvars; ++i) {
        e[i] = ea[i] + eb[i];
        t += e[i];
      }
      if (t < r.order) r.set(e, r.get(e) + ca * cb);
    }
  return r;
}

// Reinterpret a series in variables X_1..X_n as one in X_1..X_m (m >= n),
// mapping variable i to variable i + shift.
inline MultiSeries ms_embed(const MultiSeries& a, int m, int shift) {
  MultiSeries r = ms_zero(m, a.order);
  for (const auto& [e, c] : a.coeff) {
    std::vector<int> f(m, 0);
    for (int i = 0; i < a.nvars; ++i) f[i + shift] = e[i];
    r.coeff[f] = c;
  }
  return r;
}

// X_j as a MultiSeries: 1 + t_j.
inline MultiSeries ms_var(int nvars, int order, int j) {
  MultiSeries r = ms_zero(nvars, order);
  r.set(std::vector<int>(nvars, 0), 1);
  std::vector<int> e(nvars, 0);
  e[j] = 1;
  r.set(e, 1);
  return r;
}

// Exact division by (X_1 - X_{n}) = t_1 - t_n (first and last variable).
// Substitutes t_1 = s + t_n (degree-preserving, hence exact under
// truncation), demands that no s^0 terms remain, divides by s, and
// substitutes back. Throws if a remainder is detected.
inline MultiSeries ms_divide_first_minus_last(const MultiSeries& a) {
  int n = a.nvars;
  // substitute t_1 = s + t_n: expand binomially; s occupies slot 0.
  MultiSeries sub = ms_zero(n, a.order);
  for (const auto& [e, c] : a.coeff) {
    int k = e[0];
    // (s + t_n)^k
    Rational binom = 1;
    for (int i = 0; i <= k; ++i) {  // s^{k-i} t_n^{i}
      std::vector<int> f = e;
      f[0] = k - i;
      f[n - 1] = e[n - 1] + i;
      sub.set(f, sub.get(f) + c * binom);
      binom *= rat(k - i, i + 1);
    }
  }
  for (const auto& [e, c] : sub.coeff)
    if (e[0] == 0 && c != 0)
      throw std::logic_error("division by X_1 - X_n leaves a remainder");
  // divide by s, then substitute s = t_1 - t_n back.
  MultiSeries out = ms_zero(n, a.order);
  for (const auto& [e, c] : sub.coeff) {
    int k = e[0] - 1;  // power of s after division
    // (t_1 - t_n)^k
    Rational binom = 1;
    for (int i = 0; i <= k; ++i) {  // t_1^{k-i} (-t_n)^{i}
      std::vector<int> f = e;
      f[0] = k - i;
      f[n - 1] = e[n - 1] + i;
      Rational term = c * binom * ((i % 2) ? -1 : 1);
      out.set(f, out.get(f) + term);
      binom *= rat(k - i, i + 1);
    }
  }
  return out;
}

// lambda^[1](X) = 1/2 (log X)^2; lambda^[n+1](X_1..X_{n+1}) =
//   ( X_1..X_n lambda^[n](X_1..X_n) - X_2..X_{n+1} lambda^[n](X_2..X_{n+1}) )
//   / (X_1 - X_{n+1}).
// Computed with head-room so the stated order is exact after each division.
inline MultiSeries lambda_series(int n, int order) {
  if (n < 1) throw std::invalid_argument("lambda_series: n >= 1");
  int work = order + n;  // generous head-room for the n-1 divisions
  MultiSeries cur = ms_zero(1, work);
  {
    auto L = series_L(work);
    for (const auto& [d, c] : L.coeff) cur.coeff[{d}] = c;
  }
  for (int k = 1; k < n; ++k) {
    int m = k + 1;  // arity of the next level
    MultiSeries left = ms_embed(cur, m, 0);
    MultiSeries right = ms_embed(cur, m, 1);
    for (int j = 0; j < k; ++j) left = ms_mul(left, ms_var(m, work, j));
    for (int j = 1; j <= k; ++j) right = ms_mul(right, ms_var(m, work, j));
    cur = ms_divide_first_minus_last(ms_add(left, ms_scale(right, -1)));
  }
  // final truncation to the requested order
  MultiSeries out = ms_zero(n, order);
  for (const auto& [e, c] : cur.coeff)
    if (MultiSeries::total(e) < order) out.coeff[e] = c;
  return out;
}

}  // namespace looptwist

#endif
