#ifndef LOOPTWIST_CLI_HPP
#define LOOPTWIST_CLI_HPP

// Command-line surface: argument parsing into a RunConfig, dispatch to the
// subcommands, line-oriented key<TAB>value output. Kept in a header so the
// I/O tests can drive the exact code path of the binary.

#include <fstream>
#include <iostream>
#include <optional>

#include "looptwist/io.hpp"
#include "looptwist/verify.hpp"

namespace looptwist {

struct RunConfig {
  std::string subcommand;
  int genus = 1;
  int boundary = 1;
  int trunc = 5;
  int order = -1;
  int target = -1;
  unsigned seed = 7;
  std::string curve, x, y, name;
  Rational r = 0;
  bool have_r = false;
  std::string input, output;
};

namespace cli {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline RunConfig parse_args(const std::vector<std::string>& args) {
  if (args.empty())
    throw UsageError(
        "missing subcommand; one of series, expansion, eta, sigma, goldman, "
        "classical-twist, twist, diagram-log, factorize, figure-eight, "
        "trace-check, verify-all");
  RunConfig cfg;
  cfg.subcommand = args[0];
  auto value = [&](std::size_t& i) -> const std::string& {
    if (i + 1 >= args.size())
      throw UsageError("flag '" + args[i] + "' needs a value");
    return args[++i];
  };
  auto int_value = [&](std::size_t& i) {
    const std::string& f = args[i];
    const std::string& v = value(i);
    try {
      std::size_t used = 0;
      int out = std::stoi(v, &used);
      if (used == v.size()) return out;
    } catch (const std::exception&) {
    }
    throw UsageError("flag '" + f + "' wants an integer, got '" + v + "'");
  };
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--genus")
      cfg.genus = int_value(i);
    else if (a == "--boundary")
      cfg.boundary = int_value(i);
    else if (a == "--trunc")
      cfg.trunc = int_value(i);
    else if (a == "--order")
      cfg.order = int_value(i);
    else if (a == "--target")
      cfg.target = int_value(i);
    else if (a == "--seed")
      cfg.seed = (unsigned)int_value(i);
    else if (a == "--curve")
      cfg.curve = value(i);
    else if (a == "--x")
      cfg.x = value(i);
    else if (a == "--y")
      cfg.y = value(i);
    else if (a == "--name")
      cfg.name = value(i);
    else if (a == "--input")
      cfg.input = value(i);
    else if (a == "--output")
      cfg.output = value(i);
    else if (a == "--r") {
      const std::string& v = value(i);
      if (auto q = parse_rational(v)) {
        cfg.r = *q;
        cfg.have_r = true;
      } else {
        throw UsageError("flag '--r' wants a rational, got '" + v + "'");
      }
    } else {
      throw UsageError("unknown argument '" + a + "'");
    }
  }
  if (cfg.genus < 0 || cfg.boundary < 1)
    throw UsageError("surface needs genus >= 0 and boundary >= 1");
  if (cfg.trunc < 1) throw UsageError("flag '--trunc' must be positive");
  return cfg;
}

inline GroupWord need_word(const Alphabet& al, const std::string& text,
                           const std::string& flag) {
  if (text.empty()) throw UsageError("missing required flag '" + flag + "'");
  try {
    return parse_word(al, text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string(e.what()) + " in flag '" + flag + "'");
  }
}

inline SurfaceModel config_surface(const RunConfig& cfg) {
  return build_surface(cfg.genus, cfg.boundary);
}

inline Alphabet config_alphabet(const RunConfig& cfg) {
  if (cfg.genus == 0 && cfg.boundary == 3) return pants_alphabet();
  return surface_alphabet(cfg.genus);
}

inline void print_ring(std::ostream& out, const Alphabet& al,
                       const RingElement& v) {
  out << "ringelement\t" << v.terms.size() << "\n";
  for (const auto& [w, c] : v.terms)
    out << "term\t" << to_string(c) << "\t" << print_word(al, w) << "\n";
}

inline int dispatch(const RunConfig& cfg, std::ostream& out) {
  const std::string& sc = cfg.subcommand;
  if (sc == "series") {
    if (cfg.name.empty()) throw UsageError("missing required flag '--name'");
    int order = cfg.order >= 0 ? cfg.order : cfg.trunc;
    TruncatedSeries s = [&] {
      try {
        return named_series(cfg.name, order);
      } catch (const std::invalid_argument&) {
        throw UsageError("unknown series name '" + cfg.name + "'");
      }
    }();
    for (const auto& [d, c] : s.coeff) out << d << "\t" << to_string(c) << "\n";
    return 0;
  }
  if (sc == "expansion") {
    Alphabet al = surface_alphabet(cfg.genus);
    GroupWord w = need_word(al, cfg.curve, "--curve");
    const Expansion& th = symplectic_expansion(cfg.genus, cfg.trunc);
    out << serialize(apply_expansion(th, w));
    return 0;
  }
  if (sc == "eta") {
    SurfaceModel S = config_surface(cfg);
    GroupWord x = need_word(S.alphabet, cfg.x, "--x");
    GroupWord y = need_word(S.alphabet, cfg.y, "--y");
    print_ring(out, S.alphabet, eta_pairing_words(S, x, y));
    return 0;
  }
  if (sc == "sigma") {
    SurfaceModel S = config_surface(cfg);
    GroupWord c = need_word(S.alphabet, cfg.curve, "--curve");
    GroupWord y = need_word(S.alphabet, cfg.y, "--y");
    ClassCombo K;
    K.add_term(class_of(c), 1);
    print_ring(out, S.alphabet, sigma_action(S, K, y));
    return 0;
  }
  if (sc == "goldman") {
    SurfaceModel S = config_surface(cfg);
    GroupWord x = need_word(S.alphabet, cfg.x, "--x");
    GroupWord y = need_word(S.alphabet, cfg.y, "--y");
    out << serialize(S.alphabet,
                     goldman_bracket_classes(S, class_of(x), class_of(y)));
    return 0;
  }
  if (sc == "classical-twist") {
    SurfaceModel S = config_surface(cfg);
    GroupWord C = need_word(S.alphabet, cfg.curve, "--curve");
    std::vector<GroupWord> im = classical_twist_images(S, C);
    for (int l = 1; l <= (int)im.size(); ++l)
      out << "image\t" << print_word(S.alphabet, gen_word(l)) << "\t"
          << print_word(S.alphabet, im[l - 1]) << "\n";
    return 0;
  }
  if (sc == "twist") {
    SurfaceModel S = config_surface(cfg);
    GroupWord C = need_word(S.alphabet, cfg.curve, "--curve");
    if (!cfg.have_r) throw UsageError("missing required flag '--r'");
    out << serialize(generalized_twist(S, class_of(C), cfg.r, cfg.trunc));
    return 0;
  }
  if (sc == "diagram-log") {
    SurfaceModel S = config_surface(cfg);
    GroupWord C = need_word(S.alphabet, cfg.curve, "--curve");
    Rational r = cfg.have_r ? cfg.r : rat(1, 2);
    TruncatedAutomorphism u = generalized_twist(S, class_of(C), r, cfg.trunc);
    const Expansion& th = symplectic_expansion(cfg.genus, cfg.trunc);
    std::map<int, DiagramCombo> dl = diagram_log(u, th);
    out << "degrees\t" << dl.size() << "\n";
    for (const auto& [d, combo] : dl) {
      out << "degree\t" << d << "\n";
      out << serialize(combo);
    }
    return 0;
  }
  if (sc == "factorize") {
    if (cfg.input.empty()) throw UsageError("missing required flag '--input'");
    if (cfg.target < 0) throw UsageError("missing required flag '--target'");
    std::ifstream in(cfg.input);
    if (!in) throw UsageError("cannot open input file '" + cfg.input + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    TruncatedAutomorphism u =
        parse_automorphism_listing(buf.str(), cfg.genus, cfg.trunc);
    SurfaceModel S = build_surface(cfg.genus, cfg.boundary);
    Alphabet al = surface_alphabet(cfg.genus);
    auto [W, rep] = approximate_by_twists(S, u, cfg.target);
    for (const TwistFactor& f : W.factors)
      out << "r=" << to_string(f.r) << " curve="
          << print_word(al, f.gamma.word()) << "\n";
    for (std::size_t s = 0; s < rep.stage_degrees.size(); ++s)
      out << "stage\t" << s << "\t" << rep.stage_degrees[s] << "\n";
    out << "residual-degree\t" << rep.residual_degree << "\n";
    return 0;
  }
  if (sc == "figure-eight") {
    int order = cfg.order >= 0 ? cfg.order : 4;
    FigureEightReport rep = figure_eight_report(order);
    for (const ReportItem& item : rep.items)
      out << "item\t" << item.name << "\t"
          << (item.passed ? "PASS" : (item.undecided ? "UNDECIDED" : "FAIL"))
          << "\t" << item.detail << "\n";
    return rep.all_passed ? 0 : 1;
  }
  if (sc == "trace-check") {
    int order = cfg.order >= 0 ? cfg.order : 6;
    TraceCheckResult tc = [&] {
      try {
        return chebyshev_trace_check(order);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }();
    out << "base\t" << (tc.base_ok ? "PASS" : "FAIL") << "\n";
    out << "recursion\t" << (tc.recursion_ok ? "PASS" : "FAIL") << "\n";
    out << "reduction\t" << (tc.reduction_ok ? "PASS" : "FAIL") << "\n";
    out << "detail\t" << tc.detail << "\n";
    return tc.passed ? 0 : 1;
  }
  if (sc == "verify-all") {
    bool all = true;
    for (const CriterionResult& c : run_acceptance(cfg.trunc, cfg.seed)) {
      out << "criterion-" << c.index << "\t" << (c.passed ? "PASS" : "FAIL")
          << "\t" << c.name << "\n";
      all = all && c.passed;
    }
    return all ? 0 : 1;
  }
  throw UsageError("unknown subcommand '" + sc + "'");
}

}  // namespace cli

inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  try {
    RunConfig cfg = cli::parse_args(args);
    if (!cfg.output.empty()) {
      std::ofstream file(cfg.output);
      if (!file) {
        err << "error: cannot open output file '" << cfg.output << "'\n";
        return 2;
      }
      return cli::dispatch(cfg, file);
    }
    return cli::dispatch(cfg, out);
  } catch (const cli::UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace looptwist

#endif
