#ifndef LOOPTWIST_IO_HPP
#define LOOPTWIST_IO_HPP

// Line-oriented text serialization (UTF-8, key<TAB>value) for the core value
// types, with exact roundtrips. Parsers report failures with the line and
// column of the offending token.

#include <sstream>
#include <string>
#include <vector>

#include "looptwist/diagrams.hpp"
#include "looptwist/factorize.hpp"

namespace looptwist {

struct ParseError : std::runtime_error {
  int line = 0, column = 0;
  ParseError(int ln, int col, const std::string& msg)
      : std::runtime_error("parse error at line " + std::to_string(ln) +
                           ", column " + std::to_string(col) + ": " + msg),
        line(ln),
        column(col) {}
};

namespace io {

// A cursor over TAB-separated fields, tracking line and column numbers.
class Cursor {
 public:
  explicit Cursor(const std::string& text) {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t nl = text.find('\n', start);
      if (nl == std::string::npos) nl = text.size();
      lines_.push_back(text.substr(start, nl - start));
      start = nl + 1;
    }
    while (!lines_.empty() && lines_.back().empty()) lines_.pop_back();
  }

  bool done() const { return row_ >= (int)lines_.size(); }
  int line() const { return row_ + 1; }

  // splits the current line into fields; returns false at end of input
  bool next(std::vector<std::string>* fields, std::vector<int>* cols) {
    if (done()) return false;
    fields->clear();
    cols->clear();
    const std::string& ln = lines_[row_];
    std::size_t start = 0;
    while (true) {
      std::size_t tab = ln.find('\t', start);
      cols->push_back((int)start + 1);
      fields->push_back(
          ln.substr(start, tab == std::string::npos ? tab : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    ++row_;
    return true;
  }

 private:
  std::vector<std::string> lines_;
  int row_ = 0;
};

// One parsed line with positional error reporting on its fields.
struct Line {
  int lineno = 0;
  std::vector<std::string> fields;
  std::vector<int> cols;

  [[noreturn]] void fail(int i, const std::string& msg) const {
    int col = (i >= 0 && i < (int)cols.size()) ? cols[i] : 1;
    throw ParseError(lineno, col, msg);
  }
  const std::string& field(int i, const std::string& what) const {
    if (i >= (int)fields.size()) fail((int)fields.size() - 1, "missing " + what);
    return fields[i];
  }
  int int_field(int i, const std::string& what) const {
    const std::string& s = field(i, what);
    try {
      std::size_t used = 0;
      int v = std::stoi(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    fail(i, "expected an integer " + what + ", got '" + s + "'");
  }
  Rational rat_field(int i, const std::string& what) const {
    const std::string& s = field(i, what);
    if (auto q = parse_rational(s)) return *q;
    fail(i, "expected a rational " + what + ", got '" + s + "'");
  }
};

inline Line expect_line(Cursor& cur, const std::string& key) {
  Line ln;
  ln.lineno = cur.line();
  if (!cur.next(&ln.fields, &ln.cols))
    throw ParseError(ln.lineno, 1, "unexpected end of input, wanted '" + key +
                                       "' line");
  if (ln.fields.empty() || ln.fields[0] != key)
    ln.fail(0, "expected '" + key + "' line, got '" +
                   (ln.fields.empty() ? "" : ln.fields[0]) + "'");
  return ln;
}

// parse_word with line/column attribution of the offending token
inline GroupWord word_field(const Alphabet& al, const Line& ln, int i,
                            const std::string& what) {
  const std::string& text = ln.field(i, what);
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    std::size_t end = text.find(' ', pos);
    if (end == std::string::npos) end = text.size();
    if (end > pos) {
      std::string tok = text.substr(pos, end - pos);
      try {
        parse_word(al, tok);
      } catch (const std::invalid_argument&) {
        int base = i < (int)ln.cols.size() ? ln.cols[i] : 1;
        throw ParseError(ln.lineno, base + (int)pos,
                         "unknown generator token '" + tok + "'");
      }
    }
    pos = end;
  }
  return parse_word(al, text);
}

// monomials print as space-separated letter names A1 B1 A2 ..., the empty
// one as "1" (names are alphabetic, so the sentinel cannot collide)
inline std::string monomial_text(const Monomial& m) {
  if (m.empty()) return "1";
  std::string out;
  for (int l : m) {
    if (!out.empty()) out += ' ';
    out += letter_name(l);
  }
  return out;
}

inline Monomial monomial_field(const Line& ln, int i, int nletters) {
  const std::string& text = ln.field(i, "monomial");
  Monomial m;
  if (text == "1") return m;
  std::istringstream is(text);
  std::string tok;
  while (is >> tok) {
    int v = 0;
    for (int l = 1; l <= nletters; ++l)
      if (tok == letter_name(l)) v = l;
    if (v == 0)
      ln.fail(i, "unknown letter '" + tok + "', expected one of " +
                     letter_name(1) + ".." + letter_name(nletters));
    m.push_back(v);
  }
  return m;
}

}  // namespace io

// --- GroupWord ------------------------------------------------------------

inline std::string serialize(const Alphabet& al, const GroupWord& w) {
  return "word\t" + print_word(al, w) + "\n";
}

inline GroupWord parse_group_word(const Alphabet& al, const std::string& text) {
  io::Cursor cur(text);
  io::Line ln = io::expect_line(cur, "word");
  return io::word_field(al, ln, 1, "word");
}

// --- ClassCombo -----------------------------------------------------------

inline std::string serialize(const Alphabet& al, const ClassCombo& K) {
  std::ostringstream os;
  os << "classcombo\t" << K.terms.size() << "\n";
  for (const auto& [cls, c] : K.terms)
    os << "term\t" << to_string(c) << "\t" << print_word(al, cls.word())
       << "\n";
  return os.str();
}

inline ClassCombo parse_class_combo(const Alphabet& al,
                                    const std::string& text) {
  io::Cursor cur(text);
  io::Line head = io::expect_line(cur, "classcombo");
  int n = head.int_field(1, "term count");
  ClassCombo K;
  for (int t = 0; t < n; ++t) {
    io::Line ln = io::expect_line(cur, "term");
    Rational c = ln.rat_field(1, "coefficient");
    K.add_term(class_of(io::word_field(al, ln, 2, "class word")), c);
  }
  return K;
}

// --- TensorElement --------------------------------------------------------

inline std::string serialize(const TensorElement& x) {
  std::ostringstream os;
  os << "tensor\t" << x.nletters << "\t" << x.trunc << "\t" << x.terms.size()
     << "\n";
  for (const auto& [m, q] : x.terms)
    os << "term\t" << to_string(q) << "\t" << io::monomial_text(m) << "\n";
  return os.str();
}

namespace io {
inline TensorElement parse_tensor_block(Cursor& cur) {
  Line head = expect_line(cur, "tensor");
  TensorElement x;
  x.nletters = head.int_field(1, "letter count");
  x.trunc = head.int_field(2, "truncation order");
  if (x.nletters < 0 || x.trunc < 0) head.fail(1, "negative tensor frame");
  int n = head.int_field(3, "term count");
  for (int t = 0; t < n; ++t) {
    Line ln = expect_line(cur, "term");
    Rational q = ln.rat_field(1, "coefficient");
    Monomial m = monomial_field(ln, 2, x.nletters);
    if ((int)m.size() >= x.trunc)
      ln.fail(2, "monomial degree exceeds the truncation order");
    x.add_term(m, q);
  }
  return x;
}
}  // namespace io

inline TensorElement parse_tensor(const std::string& text) {
  io::Cursor cur(text);
  return io::parse_tensor_block(cur);
}

// --- TruncatedAutomorphism ------------------------------------------------

inline std::string serialize(const TruncatedAutomorphism& u) {
  std::ostringstream os;
  os << "automorphism\t" << u.genus << "\t" << u.trunc << "\n";
  os << "recipe\t" << u.recipe << "\n";
  for (int l = 1; l <= (int)u.images.size(); ++l) {
    os << "image\t" << l << "\n";
    os << serialize(u.images[l - 1]);
  }
  os << "end\tautomorphism\n";
  return os.str();
}

inline TruncatedAutomorphism parse_automorphism(const std::string& text) {
  io::Cursor cur(text);
  io::Line head = io::expect_line(cur, "automorphism");
  TruncatedAutomorphism u;
  u.genus = head.int_field(1, "genus");
  u.trunc = head.int_field(2, "truncation order");
  io::Line rec = io::expect_line(cur, "recipe");
  u.recipe = rec.field(1, "recipe");
  for (int l = 1; l <= 2 * u.genus; ++l) {
    io::Line im = io::expect_line(cur, "image");
    if (im.int_field(1, "image index") != l)
      im.fail(1, "generator images must appear in order 1.." +
                     std::to_string(2 * u.genus));
    TensorElement x = io::parse_tensor_block(cur);
    if (x.nletters != 2 * u.genus || x.trunc != u.trunc)
      im.fail(0, "image tensor frame does not match the automorphism");
    u.images.push_back(x);
  }
  io::expect_line(cur, "end");
  return u;
}

// --- DiagramCombo ---------------------------------------------------------

inline std::string serialize(const DiagramCombo& x) {
  std::ostringstream os;
  os << "diagram\t" << x.genus << "\t" << x.degree << "\t" << x.terms.size()
     << "\n";
  for (const auto& [key, q] : x.terms)
    os << "term\t" << to_string(q) << "\t" << key << "\n";
  return os.str();
}

inline DiagramCombo parse_diagram(const std::string& text) {
  io::Cursor cur(text);
  io::Line head = io::expect_line(cur, "diagram");
  DiagramCombo x;
  x.genus = head.int_field(1, "genus");
  x.degree = head.int_field(2, "degree");
  int n = head.int_field(3, "term count");
  for (int t = 0; t < n; ++t) {
    io::Line ln = io::expect_line(cur, "term");
    Rational q = ln.rat_field(1, "coefficient");
    const std::string& key = ln.field(2, "diagram key");
    if (q != 0) x.terms[key] += q;
    if (x.terms.count(key) && x.terms[key] == 0) x.terms.erase(key);
  }
  return x;
}

// --- TwistWord ------------------------------------------------------------

inline std::string serialize(const Alphabet& al, const TwistWord& W) {
  std::ostringstream os;
  os << "twistword\t" << W.factors.size() << "\n";
  for (const TwistFactor& f : W.factors)
    os << "factor\t" << to_string(f.r) << "\t"
       << print_word(al, f.gamma.word()) << "\n";
  return os.str();
}

inline TwistWord parse_twist_word(const Alphabet& al, const std::string& text) {
  io::Cursor cur(text);
  io::Line head = io::expect_line(cur, "twistword");
  int n = head.int_field(1, "factor count");
  TwistWord W;
  for (int t = 0; t < n; ++t) {
    io::Line ln = io::expect_line(cur, "factor");
    TwistFactor f;
    f.r = ln.rat_field(1, "exponent");
    f.gamma = class_of(io::word_field(al, ln, 2, "curve"));
    W.factors.push_back(f);
  }
  return W;
}

// --- automorphism input files for `factorize` -----------------------------
// One generator per line, `A1 := <tensor listing>`, where the listing is a
// sum of terms `<rational> <letters>` joined by `+` / `-`, letters named
// A1 B1 A2 B2 ..., and the empty monomial written `1`. Example:
//   A1 := 1 + A1 + 1/2 A1 A1
// Missing coefficients default to 1; the constant term of a group-like
// image is always 1.

inline TruncatedAutomorphism parse_automorphism_listing(const std::string& text,
                                                        int genus, int trunc) {
  int n = 2 * genus;
  std::map<std::string, int> letter_of;
  for (int l = 1; l <= n; ++l) letter_of[letter_name(l)] = l;

  io::Cursor cur(text);
  TruncatedAutomorphism u{genus, trunc, {}, "parsed listing"};
  for (int l = 1; l <= n; ++l) {
    io::Line ln;
    ln.lineno = cur.line();
    if (!cur.next(&ln.fields, &ln.cols))
      throw ParseError(ln.lineno, 1,
                       "unexpected end of input, wanted the image of " +
                           letter_name(l));
    // re-tokenize the whole line on spaces, keeping column positions
    std::vector<std::string> toks;
    std::vector<int> tcols;
    {
      std::string flat;
      for (std::size_t i = 0; i < ln.fields.size(); ++i) {
        if (i) flat += ' ';
        flat += ln.fields[i];
      }
      std::size_t pos = 0;
      while (pos < flat.size()) {
        while (pos < flat.size() && flat[pos] == ' ') ++pos;
        std::size_t end = flat.find(' ', pos);
        if (end == std::string::npos) end = flat.size();
        if (end > pos) {
          toks.push_back(flat.substr(pos, end - pos));
          tcols.push_back((int)pos + 1);
        }
        pos = end;
      }
    }
    auto fail = [&](std::size_t i, const std::string& msg) -> void {
      throw ParseError(ln.lineno,
                       i < tcols.size() ? tcols[i] : (int)toks.size() + 1, msg);
    };
    if (toks.size() < 2 || toks[0] != letter_name(l) || toks[1] != ":=")
      fail(0, "expected '" + letter_name(l) + " := <tensor listing>'");
    TensorElement x = tensor_zero(n, trunc);
    std::size_t i = 2;
    bool first = true;
    while (i < toks.size()) {
      Rational sign = 1;
      if (!first) {
        if (toks[i] == "+")
          sign = 1;
        else if (toks[i] == "-")
          sign = -1;
        else
          fail(i, "expected '+' or '-' between terms, got '" + toks[i] + "'");
        if (++i >= toks.size()) fail(i, "dangling sign at end of listing");
      }
      first = false;
      Rational coeff = sign;
      Monomial m;
      bool saw_any = false;
      while (i < toks.size() && toks[i] != "+" && toks[i] != "-") {
        if (auto q = parse_rational(toks[i])) {
          if (saw_any)
            fail(i, "coefficient '" + toks[i] + "' must start its term");
          coeff = sign * *q;
          if (toks[i] == "1" && (i + 1 >= toks.size() || toks[i + 1] == "+" ||
                                 toks[i + 1] == "-"))
            coeff = sign;  // a lone "1" is the empty monomial with coeff 1
        } else if (auto it = letter_of.find(toks[i]); it != letter_of.end()) {
          m.push_back(it->second);
        } else {
          fail(i, "unknown token '" + toks[i] +
                      "' (want a rational or a letter A1..B" +
                      std::to_string(genus) + ")");
        }
        saw_any = true;
        ++i;
      }
      if ((int)m.size() >= trunc)
        fail(i - 1, "monomial degree exceeds the truncation order");
      x.add_term(m, coeff);
    }
    u.images.push_back(x);
  }
  return u;
}

inline std::string automorphism_listing(const TruncatedAutomorphism& u) {
  std::ostringstream os;
  for (int l = 1; l <= (int)u.images.size(); ++l) {
    os << letter_name(l) << " :=";
    bool first = true;
    for (const auto& [m, q] : u.images[l - 1].terms) {
      Rational a = q;
      if (first) {
        os << (a < 0 ? " -" : " ");
        if (a < 0) a = -a;
      } else {
        os << (a < 0 ? " - " : " + ");
        if (a < 0) a = -a;
      }
      first = false;
      if (a != 1 || m.empty()) os << to_string(a);
      for (std::size_t i = 0; i < m.size(); ++i)
        os << ((i || a != 1) ? " " : "") << letter_name(m[i]);
    }
    if (first) os << " 0";
    os << "\n";
  }
  return os.str();
}

}  // namespace looptwist

#endif
