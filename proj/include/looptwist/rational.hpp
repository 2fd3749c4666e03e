#ifndef LOOPTWIST_RATIONAL_HPP
#define LOOPTWIST_RATIONAL_HPP

// Exact rational scalars. GMP does the heavy lifting; this header only adds
// parsing/printing helpers with the p/q conventions used by the CLI.

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>

namespace looptwist {

using Rational = mpq_class;
using Integer = mpz_class;

inline Rational rat(long num, long den = 1) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// Lowest terms, denominator suppressed when 1: "7", "-1/2".
inline std::string to_string(const Rational& q) { return q.get_str(); }

// Accepts "p", "p/q", optional leading '-' on either part; normalizes.
inline std::optional<Rational> parse_rational(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto check = [](const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  std::string num = text, den = "1";
  if (auto slash = text.find('/'); slash != std::string::npos) {
    num = text.substr(0, slash);
    den = text.substr(slash + 1);
  }
  if (!check(num) || !check(den)) return std::nullopt;
  Rational q(num + "/" + den);
  if (q.get_den() == 0) return std::nullopt;
  q.canonicalize();
  return q;
}

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

}  // namespace looptwist

#endif
