// Batch front end: reduction traces, formula reports, derivation checking,
// Gödel lifting, and the storage verifiers, all behind one seed flag.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "ttr/encodings.hpp"
#include "ttr/formula.hpp"
#include "ttr/reduce.hpp"
#include "ttr/storage.hpp"
#include "ttr/subtyping.hpp"
#include "ttr/term.hpp"
#include "ttr/typing.hpp"

namespace lam = ttr::lam;
namespace enc = ttr::enc;
namespace fml = ttr::fml;
namespace sub = ttr::sub;
namespace typ = ttr::typ;
namespace sto = ttr::sto;

namespace {

// exit codes: 0 pass, 1 honest negative verdict, 2 bad input / module error
constexpr int exit_ok = 0;
constexpr int exit_fail = 1;
constexpr int exit_error = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// condensed term display: known combinators print as '@name', numeral-shaped
// subterms as 'church n' / 'rec n'; everything else structurally

const std::vector<std::pair<std::string, lam::TermPtr>>& builtin_table() {
  static const auto table = [] {
    std::vector<std::pair<std::string, lam::TermPtr>> v;
    for (const auto& n : enc::builtin_names()) v.emplace_back(n, enc::builtin(n));
    return v;
  }();
  return table;
}

std::optional<std::string> condense(const lam::TermPtr& t) {
  if (t->kind != lam::TermKind::Abs && t->kind != lam::TermKind::App)
    return std::nullopt;
  for (const auto& [name, body] : builtin_table())
    if (lam::alpha_eq(t, body)) return "@" + name;
  if (auto n = enc::decode(enc::NumeralKind::Church, t))
    return "church " + std::to_string(*n);
  if (auto n = enc::decode(enc::NumeralKind::Recursive, t))
    return "rec " + std::to_string(*n);
  return std::nullopt;
}

struct NamedPrinter {
  std::set<std::string> avoid;
  std::vector<std::string> scope;
  std::string out;

  std::string pick(const std::string& hint) {
    std::string n = hint.empty() ? "x" : hint;
    auto used = [&](const std::string& s) {
      if (avoid.count(s)) return true;
      for (const auto& v : scope)
        if (v == s) return true;
      return false;
    };
    while (used(n)) n += "'";
    return n;
  }

  // ctx: 0 body position, 1 function position, 2 argument position
  void rec(const lam::TermPtr& t, int ctx) {
    if (auto label = condense(t)) {
      bool paren = ctx != 0 && label->find(' ') != std::string::npos;
      if (paren) out += "(";
      out += *label;
      if (paren) out += ")";
      return;
    }
    switch (t->kind) {
      case lam::TermKind::BoundVar: {
        int i = t->index;
        if (i >= 0 && static_cast<std::size_t>(i) < scope.size())
          out += scope[scope.size() - 1 - static_cast<std::size_t>(i)];
        else
          out += "^" + std::to_string(i);
        return;
      }
      case lam::TermKind::FreeVar:
        out += t->name;
        return;
      case lam::TermKind::SymConst:
        out += "#";
        out += t->name;
        return;
      case lam::TermKind::Abs: {
        bool paren = ctx != 0;
        if (paren) out += "(";
        out += "\\";
        const lam::Term* cur = t.get();
        std::size_t pushed = 0;
        while (true) {
          std::string n = pick(cur->name);
          if (pushed) out += " ";
          out += n;
          scope.push_back(n);
          ++pushed;
          if (cur->sub1->kind == lam::TermKind::Abs && !condense(cur->sub1))
            cur = cur->sub1.get();
          else
            break;
        }
        out += ". ";
        rec(cur->sub1, 0);
        scope.resize(scope.size() - pushed);
        if (paren) out += ")";
        return;
      }
      case lam::TermKind::App: {
        bool paren = ctx == 2;
        if (paren) out += "(";
        rec(t->sub1, 1);
        out += " ";
        rec(t->sub2, 2);
        if (paren) out += ")";
        return;
      }
    }
  }
};

std::string show_term(const lam::TermPtr& t, bool raw) {
  if (raw) return lam::print_term(t);
  NamedPrinter p;
  p.avoid = lam::free_vars(t);
  p.rec(t, 0);
  return p.out;
}

// ---------------------------------------------------------------------------
// shared parsing helpers

fml::Signature signature_from(const std::vector<std::string>& lines) {
  fml::Signature sig;
  for (const auto& line : lines) sig = fml::parse_signature_line(line, sig);
  return sig;
}

std::pair<long long, long long> parse_range(const std::string& s) {
  auto dots = s.find("..");
  if (dots == std::string::npos) {
    std::size_t used = 0;
    long long n = std::stoll(s, &used);
    if (used != s.size()) throw std::runtime_error("bad range '" + s + "'");
    return {n, n};
  }
  std::size_t used = 0;
  long long lo = std::stoll(s.substr(0, dots), &used);
  if (used != dots) throw std::runtime_error("bad range '" + s + "'");
  long long hi = std::stoll(s.substr(dots + 2), &used);
  if (used != s.size() - dots - 2) throw std::runtime_error("bad range '" + s + "'");
  if (lo > hi) throw std::runtime_error("empty range '" + s + "'");
  return {lo, hi};
}

enc::NumeralKind parse_kind(const std::string& s) {
  if (s == "church") return enc::NumeralKind::Church;
  if (s == "rec" || s == "recursive") return enc::NumeralKind::Recursive;
  throw std::runtime_error("unknown kind '" + s + "' (expected church or rec)");
}

typ::System parse_system(const std::string& s) {
  if (s == "ttr0") return typ::System::ttr_zero;
  if (s == "ttrd") return typ::System::ttr_diamond;
  if (auto sys = typ::system_from_name(s)) return *sys;
  throw std::runtime_error("unknown system '" + s + "'");
}

// Config files hold optional 'fn f/k' / 'pred P/k' lines plus one entry per
// line: 'X ; vars X X' ; params x y ; body <formula>'. Entries override the
// single-negation default, which also backs unlisted variables.
fml::GodelConfig load_config(const std::string& spec) {
  if (spec.empty() || spec == "neg") return fml::godel_negation_config();
  if (spec == "double") return fml::godel_double_config();
  auto cfg = fml::godel_negation_config();
  cfg.entries.clear();
  fml::Signature sig;
  std::istringstream in(read_file(spec));
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fail = [&](const std::string& why) {
      throw std::runtime_error(spec + ":" + std::to_string(lineno) + ": " + why);
    };
    std::string s = line;
    if (auto h = s.find('#'); h != std::string::npos) s = s.substr(0, h);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
      s.pop_back();
    std::size_t start = s.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    s = s.substr(start);
    if (s.rfind("fn ", 0) == 0 || s.rfind("pred ", 0) == 0) {
      sig = fml::parse_signature_line(s, sig);
      continue;
    }
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      auto semi = s.find(';', pos);
      fields.push_back(s.substr(pos, semi == std::string::npos ? semi : semi - pos));
      if (semi == std::string::npos) break;
      pos = semi + 1;
    }
    auto words = [](const std::string& f) {
      std::vector<std::string> w;
      std::istringstream ws(f);
      std::string t;
      while (ws >> t) w.push_back(t);
      return w;
    };
    auto head = words(fields[0]);
    if (head.size() != 1) fail("expected a single variable name before ';'");
    fml::GodelEntry entry;
    bool have_body = false;
    for (std::size_t i = 1; i < fields.size(); ++i) {
      auto w = words(fields[i]);
      if (w.empty()) fail("empty field");
      if (w[0] == "vars") {
        entry.vars.assign(w.begin() + 1, w.end());
      } else if (w[0] == "params") {
        entry.params.assign(w.begin() + 1, w.end());
      } else if (w[0] == "body") {
        auto text = fields[i].substr(fields[i].find("body") + 4);
        entry.body = fml::parse_formula(text, sig);
        have_body = true;
      } else {
        fail("unknown field '" + w[0] + "'");
      }
    }
    if (entry.vars.empty()) fail("entry needs a 'vars' field");
    if (!have_body) fail("entry needs a 'body' field");
    cfg.entries[head[0]] = std::move(entry);
  }
  return cfg;
}

typ::TyPtr with_system(const typ::TyPtr& d, typ::System sys) {
  typ::TypingDerivation n = *d;
  n.concl.system = sys;
  n.premises.clear();
  for (const auto& p : d->premises) n.premises.push_back(with_system(p, sys));
  return typ::make_node(std::move(n));
}

std::string show_judgment(const typ::Judgment& j) {
  std::string out;
  for (std::size_t i = 0; i < j.context.size(); ++i) {
    if (i) out += ", ";
    out += j.context[i].first + " : " + fml::print_formula(j.context[i].second);
  }
  if (!j.context.empty()) out += " ";
  out += "|- " + lam::print_term(j.subject) + " : " + fml::print_formula(j.type);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for head reduction, recursive types, and storage operators"};
  app.require_subcommand(1);

  std::string out_path;
  app.add_option("--out", out_path, "write the report to this file instead of stdout");

  std::size_t fuel = lam::default_fuel;
  std::uint64_t seed = 0;
  int variants = 5;
  std::string range = "0..25";
  std::string kind_text;
  std::string system_text;
  std::string config_text;
  std::vector<std::string> sig_lines;
  std::size_t display = 32;
  bool raw = false;
  bool from_file = false;
  std::string mode_text = "full";
  std::string input, input2;

  auto add_fuel = [&](CLI::App* c) {
    c->add_option("--fuel", fuel, "head-reduction step budget")->check(CLI::PositiveNumber);
  };
  auto add_sig = [&](CLI::App* c) {
    c->add_option("--sig", sig_lines, "signature line, e.g. 'fn s/1' or 'pred N/1'");
  };
  auto add_config = [&](CLI::App* c) {
    c->add_option("--config", config_text, "neg, double, or a config file path");
  };

  auto* c_reduce = app.add_subcommand("reduce", "head-reduction trace of a term");
  c_reduce->add_option("term", input, "term ('@name' splices builtins, 'church n' / 'rec n' numerals)")->required();
  add_fuel(c_reduce);
  c_reduce->add_option("--display", display, "trace lines shown (computation is unaffected)");
  c_reduce->add_flag("--raw", raw, "print terms without builtin or numeral names");

  auto* c_norm = app.add_subcommand("normalize", "leftmost normal form of a term");
  c_norm->add_option("term", input, "term")->required();
  add_fuel(c_norm);
  c_norm->add_flag("--raw", raw, "print terms without builtin or numeral names");

  auto* c_equiv = app.add_subcommand("equiv", "beta-equivalence of two terms");
  c_equiv->add_option("left", input, "first term")->required();
  c_equiv->add_option("right", input2, "second term")->required();
  add_fuel(c_equiv);

  auto* c_classify = app.add_subcommand("classify", "arrow shape, Omega membership, bottom-type report");
  c_classify->add_option("formula", input, "formula")->required();
  add_sig(c_classify);

  auto* c_rep = app.add_subcommand("rep", "representative of an arrow type with inclusion witnesses");
  c_rep->add_option("formula", input, "formula")->required();
  add_sig(c_rep);

  auto* c_erase = app.add_subcommand("erase", "forget the first-order part of a formula or derivation");
  c_erase->add_option("input", input, "formula, or a derivation file with --file")->required();
  c_erase->add_flag("--file", from_file, "treat the input as a typing-derivation file path");
  add_sig(c_erase);

  auto* c_godel = app.add_subcommand("godel", "transform a formula along a configuration");
  c_godel->add_option("formula", input, "formula")->required();
  add_config(c_godel);
  add_sig(c_godel);

  auto* c_csub = app.add_subcommand("check-sub", "verify an inclusion-derivation file");
  c_csub->add_option("path", input, "derivation file")->required();
  c_csub->add_option("--mode", mode_text, "full or zero")->check(CLI::IsMember({"full", "zero"}));

  auto* c_cty = app.add_subcommand("check-typing", "verify a typing-derivation file");
  c_cty->add_option("path", input, "derivation file")->required();
  c_cty->add_option("--system", system_text, "override the file's system (af2|ttr|ttr0|ttrd)");

  auto* c_lift = app.add_subcommand("lift-godel", "transform a restricted typing derivation");
  c_lift->add_option("path", input, "derivation file (system ttr_zero)")->required();
  add_config(c_lift);

  auto* c_vs = app.add_subcommand("verify-storage", "randomized storage check for an operator");
  c_vs->add_option("operator", input, "operator term")->required();
  c_vs->add_option("--kind", kind_text, "church or rec")->required();
  c_vs->add_option("--n", range, "numeral range A..B");
  c_vs->add_option("--variants", variants, "argument variants per n")->check(CLI::PositiveNumber);
  c_vs->add_option("--seed", seed, "variant-generation seed");
  add_fuel(c_vs);

  auto* c_sym = app.add_subcommand("symbolic-verify", "symbolic run over recursive numerals plus simulation");
  c_sym->add_option("operator", input, "operator term")->required();
  c_sym->add_option("--n", range, "numeral range A..B");
  c_sym->add_option("--variants", variants, "towers checked per n")->check(CLI::PositiveNumber);
  c_sym->add_option("--seed", seed, "tower-generation seed");
  add_fuel(c_sym);

  CLI11_PARSE(app, argc, argv);

  std::ostringstream os;
  int status = exit_ok;
  try {
    if (app.got_subcommand(c_reduce)) {
      auto t = enc::parse(input);
      auto tr = lam::head_reduce(t, fuel);
      std::size_t total = tr.count() + 1;  // terms, including the start
      std::size_t shown = std::min(total, display);
      for (std::size_t i = 0; i < shown; ++i)
        os << i << "  " << show_term(tr.at(i), raw) << "\n";
      if (shown < total) {
        if (total - shown > 1)
          os << "... " << (total - shown - 1) << " terms omitted ...\n";
        os << tr.count() << "  " << show_term(tr.final_term(), raw) << "\n";
      }
      if (tr.status == lam::RunStatus::HeadNormalForm) {
        os << "head normal form after " << tr.count() << " steps\n";
      } else {
        os << "fuel exhausted after " << tr.count() << " steps\n";
        status = exit_fail;
      }
    } else if (app.got_subcommand(c_norm)) {
      auto r = lam::normalize_left(enc::parse(input), fuel);
      os << show_term(r.term, raw) << "\n";
      os << "steps: " << r.steps << "\n";
      os << "complete: " << (r.complete ? "yes" : "no") << "\n";
      if (!r.complete) status = exit_fail;
    } else if (app.got_subcommand(c_equiv)) {
      auto e = lam::beta_equiv(enc::parse(input), enc::parse(input2), fuel);
      switch (e) {
        case lam::Equiv::Equal: os << "equal\n"; break;
        case lam::Equiv::NotEqual:
          os << "not equal\n";
          status = exit_fail;
          break;
        case lam::Equiv::Unknown:
          os << "unknown (fuel exhausted)\n";
          status = exit_fail;
          break;
      }
    } else if (app.got_subcommand(c_classify)) {
      auto a = fml::parse_formula(input, signature_from(sig_lines));
      if (auto wa = fml::classify_arrow(a)) {
        os << "without arrow (head " << wa->at << ", "
           << (wa->sort == fml::PredSort::Var ? "predicate variable" : "predicate symbol")
           << ", kind " << wa->kind << ")";
      } else {
        os << "arrow type";
      }
      auto [pos, neg] = fml::forall_polarity(a);
      os << "; " << (pos ? "in Omega+" : "not in Omega+");
      os << "; " << (neg ? "in Omega-" : "not in Omega-");
      os << "; " << (fml::is_bottom_type(a) ? "a bottom type" : "not a bottom type") << "\n";
    } else if (app.got_subcommand(c_rep)) {
      auto a = fml::parse_formula(input, signature_from(sig_lines));
      auto r = fml::rep_formula(a);
      os << "rep: " << fml::print_formula(r) << "\n";
      sub::check_sub(sub::to_rep(a), {}, sub::Mode::zero);
      sub::check_sub(sub::from_rep(a), {}, sub::Mode::zero);
      os << "witnesses: both inclusions verified in zero mode\n";
    } else if (app.got_subcommand(c_erase)) {
      if (from_file) {
        auto f = typ::parse_ty_file(read_file(input));
        auto erased = typ::erase_derivation(f.root);
        typ::check_typing(erased, {});
        typ::TyFile out{erased->concl.system, {}, {}, erased};
        os << typ::print_ty_file(out);
      } else {
        auto a = fml::parse_formula(input, signature_from(sig_lines));
        os << fml::print_formula(fml::erase_diamond(a)) << "\n";
      }
    } else if (app.got_subcommand(c_godel)) {
      auto a = fml::parse_formula(input, signature_from(sig_lines));
      os << fml::print_formula(fml::godel(a, load_config(config_text))) << "\n";
    } else if (app.got_subcommand(c_csub)) {
      auto f = sub::parse_sub_file(read_file(input));
      auto mode = mode_text == "zero" ? sub::Mode::zero : sub::Mode::full;
      try {
        std::vector<std::string> notes;
        auto [lhs, rhs] = sub::check_sub(f.root, f.eqs, mode, &notes);
        os << "verified (" << mode_text << " mode): " << fml::print_formula(lhs)
           << "  <=  " << fml::print_formula(rhs) << "\n";
        for (const auto& n : notes) os << "note: " << n << "\n";
      } catch (const sub::check_error& e) {
        os << "check failed: " << e.what() << "\n";
        status = exit_fail;
      }
    } else if (app.got_subcommand(c_cty)) {
      auto f = typ::parse_ty_file(read_file(input));
      auto root = f.root;
      if (!system_text.empty()) root = with_system(root, parse_system(system_text));
      try {
        auto j = typ::check_typing(root, f.eqs);
        os << "verified in " << typ::system_name(j.system) << ": " << show_judgment(j) << "\n";
      } catch (const typ::check_error& e) {
        os << "check failed: " << e.what() << "\n";
        status = exit_fail;
      }
    } else if (app.got_subcommand(c_lift)) {
      auto f = typ::parse_ty_file(read_file(input));
      auto lifted = typ::godel_lift_typing(f.root, load_config(config_text));
      typ::check_typing(lifted, f.eqs);
      typ::TyFile out{lifted->concl.system, f.sig, f.eqs, lifted};
      os << typ::print_ty_file(out);
    } else if (app.got_subcommand(c_vs)) {
      auto op = enc::parse(input);
      auto [lo, hi] = parse_range(range);
      auto report = sto::verify_storage(op, parse_kind(kind_text), lo, hi,
                                        variants, fuel, seed, input);
      os << sto::print_storage_report(report);
      if (!report.pass) status = exit_fail;
    } else if (app.got_subcommand(c_sym)) {
      auto op = enc::parse(input);
      auto [lo, hi] = parse_range(range);
      os << "symbolic check: " << input << " over recursive numerals\n";
      for (long long n = lo; n <= hi; ++n) {
        sto::SymbolicTrace tr;
        try {
          tr = sto::symbolic_run(op, n, fuel);
        } catch (const sto::storage_error& e) {
          os << "n=" << n << ": FAIL " << e.what() << "\n";
          status = exit_fail;
          continue;
        }
        auto nf = lam::normalize_left(tr.tau, fuel);
        std::optional<long long> dec;
        if (nf.complete) dec = enc::decode(enc::NumeralKind::Recursive, nf.term);
        os << "n=" << n << ": segments=" << tr.nodes.size()
           << " constants=" << tr.constants.size()
           << " tau=" << show_term(tr.tau, raw);
        if (dec)
          os << " decodes=" << *dec;
        else
          os << " decodes=-";
        os << "\n";
        if (!dec || *dec != n) {
          os << "n=" << n << ": FAIL output is not the expected numeral\n";
          status = exit_fail;
          continue;
        }
        auto thetas = sto::gen_theta_variants(
            enc::NumeralKind::Recursive, n,
            seed + static_cast<std::uint64_t>(n) * 1000003, variants);
        for (std::size_t i = 0; i < thetas.size(); ++i) {
          try {
            auto sa = sto::build_special_application(thetas[i], n, fuel);
            auto sim = sto::check_simulation(tr, sa, fuel);
            if (sim.ok) {
              os << "  tower " << i << ": ok steps=" << sim.final_steps << "\n";
            } else {
              os << "  tower " << i << ": FAIL " << sim.reason << "\n";
              status = exit_fail;
            }
          } catch (const sto::storage_error& e) {
            os << "  tower " << i << ": FAIL " << e.what() << "\n";
            status = exit_fail;
          }
        }
      }
      os << (status == exit_ok ? "verdict: PASS\n" : "verdict: FAIL\n");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_error;
  }

  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    f << os.str();
    if (!f) {
      std::cerr << "error: cannot write '" << out_path << "'\n";
      return exit_error;
    }
  } else {
    std::cout << os.str();
  }
  return status;
}
