#include "ttr/storage.hpp"

#include <algorithm>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>

namespace ttr::sto {

namespace lam = ttr::lam;
namespace enc = ttr::enc;

namespace {

std::string fresh(std::string base, const std::set<std::string>& avoid) {
  while (avoid.count(base)) base += "'";
  return base;
}

lam::TermPtr identity_term() {
  return lam::Term::abs("w", lam::Term::bound(0));
}

std::string show(long long v) { return std::to_string(v); }

}  // namespace

const char* kind_name(enc::NumeralKind kind) {
  return kind == enc::NumeralKind::Church ? "church" : "recursive";
}

SpecialApplication build_special_application(const lam::TermPtr& theta_n,
                                             long long n, std::size_t fuel) {
  if (!theta_n) throw std::invalid_argument("build_special_application: null term");
  if (n < 0) throw std::invalid_argument("build_special_application: negative n");
  SpecialApplication sa;
  sa.n = n;
  sa.entries.assign(static_cast<std::size_t>(n) + 1, nullptr);
  sa.fs.assign(static_cast<std::size_t>(n), "");
  sa.xs.assign(static_cast<std::size_t>(n), "");
  sa.entries[static_cast<std::size_t>(n)] = theta_n;
  auto avoid = lam::free_vars(theta_n);
  for (long long m = n - 1; m >= 0; --m) {
    auto level = static_cast<std::size_t>(m);
    auto tr = lam::head_reduce(sa.entries[level + 1], fuel);
    if (tr.status == lam::RunStatus::FuelExhausted)
      throw storage_error("fuel exhausted while unfolding level " +
                          show(m + 1) + " of the tower");
    auto hd = lam::head_status(tr.final_term());
    bool shaped = hd.binder_hints.size() == 2 && hd.head &&
                  hd.head->kind == lam::TermKind::BoundVar &&
                  hd.head->index == 1 && hd.args.size() == 1;
    if (!shaped)
      throw storage_error("level " + show(m + 1) +
                          " does not head-reduce to the successor shape");
    std::string fm = fresh("f" + show(m), avoid);
    avoid.insert(fm);
    std::string xm = fresh("x" + show(m), avoid);
    avoid.insert(xm);
    sa.fs[level] = fm;
    sa.xs[level] = xm;
    auto body = lam::subst_bound(hd.args[0], 0, lam::Term::var(xm));
    sa.entries[level] = lam::subst_bound(body, 0, lam::Term::var(fm));
  }
  auto tr0 = lam::head_reduce(sa.entries[0], fuel);
  if (tr0.status == lam::RunStatus::FuelExhausted)
    throw storage_error("fuel exhausted while checking level 0 of the tower");
  if (!lam::alpha_eq(tr0.final_term(),
                     enc::numeral(enc::NumeralKind::Recursive, 0)))
    throw storage_error("level 0 does not head-reduce to the zero numeral");
  return sa;
}

SymbolicTrace symbolic_run(const lam::TermPtr& op, long long n,
                           std::size_t fuel) {
  if (!op) throw std::invalid_argument("symbolic_run: null term");
  if (n < 0) throw std::invalid_argument("symbolic_run: negative n");
  if (!lam::is_closed(op))
    throw std::invalid_argument("symbolic_run: operator term is not closed");
  SymbolicTrace trace;
  trace.n = n;
  trace.f = "f";
  std::size_t serial = 0;
  auto introduce = [&](long long m, std::vector<lam::TermPtr> parts) {
    for (const auto& c : trace.constants) {
      if (c.m != m || c.parts.size() != parts.size()) continue;
      bool same = true;
      for (std::size_t i = 0; same && i < parts.size(); ++i)
        same = lam::alpha_eq(c.parts[i], parts[i]);
      if (same)
        throw storage_error(
            "a symbolic constant for this unfolding stage was already "
            "introduced");
    }
    std::string name = "x" + show(m) + "_" + show(serial++);
    trace.constants.push_back({name, m, std::move(parts)});
    return name;
  };
  auto x_n = introduce(n, {});
  lam::TermPtr u = lam::Term::app(
      lam::Term::app(op, lam::Term::sym(x_n)), lam::Term::var(trace.f));
  for (std::size_t iter = 0;; ++iter) {
    if (iter > fuel)
      throw storage_error("the symbolic construction did not terminate");
    auto tr = lam::head_reduce(u, fuel);
    if (tr.status == lam::RunStatus::FuelExhausted)
      throw storage_error("fuel exhausted during a symbolic head reduction");
    auto v = tr.final_term();
    trace.nodes.push_back({u, v});
    auto hd = lam::head_status(v);
    if (!hd.binder_hints.empty())
      throw storage_error(
          "a head normal form is an abstraction; expected an application of "
          "the output variable or a symbolic constant");
    if (hd.head->kind == lam::TermKind::FreeVar && hd.head->name == trace.f) {
      if (hd.args.size() != 1)
        throw storage_error("the output variable is applied to " +
                            show(static_cast<long long>(hd.args.size())) +
                            " arguments; expected exactly one");
      trace.tau = hd.args[0];
      return trace;
    }
    if (hd.head->kind != lam::TermKind::SymConst)
      throw storage_error(
          "head variable is neither the output variable nor a symbolic "
          "constant");
    auto rec = std::find_if(
        trace.constants.begin(), trace.constants.end(),
        [&](const ConstantRecord& c) { return c.name == hd.head->name; });
    if (rec == trace.constants.end())
      throw storage_error("unregistered symbolic constant at head position");
    // The first three arguments form the unfolding triple; anything after
    // them (the continuations of a not-yet-consumed output type) stays on
    // the spine of the next segment.
    if (hd.args.size() < 3)
      throw storage_error("a symbolic constant is applied to " +
                          show(static_cast<long long>(hd.args.size())) +
                          " arguments; the numeral interface needs at least "
                          "three");
    if (rec->m != 0) {
      std::vector<lam::TermPtr> parts = {hd.args[0], hd.args[1], hd.args[2]};
      parts.insert(parts.end(), rec->parts.begin(), rec->parts.end());
      auto next = introduce(rec->m - 1, std::move(parts));
      u = lam::Term::app(lam::Term::app(hd.args[0], lam::Term::sym(next)),
                         hd.args[2]);
    } else {
      u = lam::Term::app(hd.args[1], hd.args[2]);
    }
    for (std::size_t i = 3; i < hd.args.size(); ++i)
      u = lam::Term::app(u, hd.args[i]);
  }
}

namespace {

struct SpecialSubst {
  const SpecialApplication& sa;
  std::map<std::string, const ConstantRecord*> byname;
  std::map<std::string, lam::TermPtr> memo;

  SpecialSubst(const SpecialApplication& sa_,
               const std::vector<ConstantRecord>& constants)
      : sa(sa_) {
    for (const auto& c : constants) byname[c.name] = &c;
  }

  lam::TermPtr run(const lam::TermPtr& t) {
    switch (t->kind) {
      case lam::TermKind::BoundVar:
      case lam::TermKind::FreeVar:
        return t;
      case lam::TermKind::SymConst: {
        auto it = byname.find(t->name);
        if (it == byname.end()) return t;
        auto hit = memo.find(t->name);
        if (hit != memo.end()) return hit->second;
        const ConstantRecord& c = *it->second;
        if (c.m < 0 || c.m > sa.n ||
            c.parts.size() != static_cast<std::size_t>(3 * (sa.n - c.m)))
          throw storage_error(
              "constant trail does not line up with the tower height");
        std::map<std::string, lam::TermPtr> sub;
        for (long long k = c.m; k < sa.n; ++k) {
          auto j = static_cast<std::size_t>(3 * (k - c.m));
          sub[sa.fs[static_cast<std::size_t>(k)]] = run(c.parts[j]);
          sub[sa.xs[static_cast<std::size_t>(k)]] = run(c.parts[j + 1]);
        }
        auto res =
            lam::substitute(sa.entries[static_cast<std::size_t>(c.m)], sub);
        memo[t->name] = res;
        return res;
      }
      case lam::TermKind::Abs:
        return lam::Term::abs(t->name, run(t->sub1));
      case lam::TermKind::App:
        return lam::Term::app(run(t->sub1), run(t->sub2));
    }
    throw std::logic_error("unreachable");
  }
};

}  // namespace

lam::TermPtr special_substitute(const lam::TermPtr& t,
                                const SpecialApplication& sa,
                                const std::vector<ConstantRecord>& constants) {
  SpecialSubst s(sa, constants);
  return s.run(t);
}

SimulationResult check_simulation(const SymbolicTrace& trace,
                                  const SpecialApplication& sa,
                                  std::size_t fuel) {
  SimulationResult res;
  if (trace.n != sa.n) {
    res.reason = "the trace and the tower disagree on n";
    return res;
  }
  if (trace.nodes.empty() || !trace.tau) {
    res.reason = "the trace is incomplete";
    return res;
  }
  SpecialSubst s(sa, trace.constants);
  auto su1 = s.run(trace.nodes.front().u);
  for (std::size_t i = 0; i < trace.nodes.size(); ++i) {
    auto sv = s.run(trace.nodes[i].v);
    if (!lam::common_reduct(su1, sv, fuel)) {
      res.reason = "no common reduct at node " + show(static_cast<long long>(i));
      return res;
    }
  }
  auto tr = lam::head_reduce(su1, fuel);
  res.final_steps = tr.count();
  res.final_term = tr.final_term();
  res.expected = lam::Term::app(lam::Term::var(trace.f), s.run(trace.tau));
  if (tr.status == lam::RunStatus::FuelExhausted) {
    res.reason = "fuel exhausted in the final reduction";
    return res;
  }
  if (!lam::alpha_eq(res.final_term, res.expected)) {
    res.reason = "final head normal form differs from the substituted output";
    return res;
  }
  res.ok = true;
  return res;
}

namespace {

lam::TermPtr succ_of(enc::NumeralKind kind) {
  return enc::builtin(kind == enc::NumeralKind::Church ? "s_church" : "s_rec");
}

// Canonical body with the last application guarded by an identity redex:
// \f \x. (\w.w)((f) <rest>).
lam::TermPtr padded_numeral(enc::NumeralKind kind, long long n,
                            const lam::TermPtr& inner_variant) {
  lam::TermPtr rest;
  if (kind == enc::NumeralKind::Recursive) {
    rest = inner_variant;  // closed variant of n-1
  } else {
    rest = lam::Term::bound(0);
    for (long long i = 0; i + 1 < n; ++i)
      rest = lam::Term::app(lam::Term::bound(1), rest);
  }
  auto body = lam::Term::app(identity_term(),
                             lam::Term::app(lam::Term::bound(1), rest));
  return lam::Term::abs("f", lam::Term::abs("x", body));
}

lam::TermPtr random_variant(enc::NumeralKind kind, long long n,
                            std::mt19937_64& rng) {
  lam::TermPtr core;
  switch (n == 0 ? 0 : rng() % 3) {
    case 1:
      core = lam::Term::app(succ_of(kind), random_variant(kind, n - 1, rng));
      break;
    case 2:
      core = padded_numeral(kind, n,
                            kind == enc::NumeralKind::Recursive
                                ? random_variant(kind, n - 1, rng)
                                : nullptr);
      break;
    default:
      core = enc::numeral(kind, n);
      break;
  }
  auto wraps = rng() % 3;
  for (std::uint64_t i = 0; i < wraps; ++i) {
    if (rng() % 2) {
      core = lam::Term::app(identity_term(), core);
    } else {
      auto junk = rng() % 2 ? identity_term()
                            : enc::numeral(kind, static_cast<long long>(rng() % 3));
      core = lam::Term::app(lam::Term::abs("z", core), junk);
    }
  }
  return core;
}

}  // namespace

std::vector<lam::TermPtr> gen_theta_variants(enc::NumeralKind kind,
                                             long long n, std::uint64_t seed,
                                             int count) {
  if (count < 1) throw std::invalid_argument("gen_theta_variants: count < 1");
  if (n < 0) throw std::invalid_argument("gen_theta_variants: negative n");
  std::mt19937_64 rng(seed);
  std::vector<lam::TermPtr> out;
  out.push_back(enc::numeral(kind, n));
  while (out.size() < static_cast<std::size_t>(count)) {
    auto cand = random_variant(kind, n, rng);
    auto dup = [&] {
      return std::any_of(out.begin(), out.end(), [&](const lam::TermPtr& t) {
        return lam::alpha_eq(t, cand);
      });
    };
    while (dup()) cand = lam::Term::app(identity_term(), cand);
    out.push_back(cand);
  }
  auto canonical = enc::numeral(kind, n);
  for (const auto& t : out)
    if (lam::beta_equiv(t, canonical) != lam::Equiv::Equal)
      throw std::logic_error(
          "gen_theta_variants: a variant is not beta-equivalent to the "
          "numeral");
  return out;
}

std::optional<std::map<std::string, lam::TermPtr>> match_skeleton(
    const lam::TermPtr& skeleton, const std::set<std::string>& holes,
    const lam::TermPtr& u) {
  std::map<std::string, lam::TermPtr> sigma;
  std::function<bool(const lam::TermPtr&, const lam::TermPtr&)> rec =
      [&](const lam::TermPtr& s, const lam::TermPtr& t) {
        if (s->kind == lam::TermKind::FreeVar && holes.count(s->name)) {
          if (lam::has_dangling(t)) return false;
          auto it = sigma.find(s->name);
          if (it != sigma.end()) return lam::alpha_eq(it->second, t);
          sigma.emplace(s->name, t);
          return true;
        }
        if (s->kind != t->kind) return false;
        switch (s->kind) {
          case lam::TermKind::BoundVar:
            return s->index == t->index;
          case lam::TermKind::FreeVar:
          case lam::TermKind::SymConst:
            return s->name == t->name;
          case lam::TermKind::Abs:
            return rec(s->sub1, t->sub1);
          case lam::TermKind::App:
            return rec(s->sub1, t->sub1) && rec(s->sub2, t->sub2);
        }
        return false;
      };
  if (!rec(skeleton, u)) return std::nullopt;
  return sigma;
}

namespace {

struct SpineOutput {
  lam::TermPtr arg;   // set when the head normal form is (f)arg
  std::string note;   // otherwise, the diagnostic
};

SpineOutput output_of(const lam::ReductionTrace& tr, const std::string& f) {
  SpineOutput res;
  if (tr.status == lam::RunStatus::FuelExhausted) {
    res.note = "fuel exhausted";
    return res;
  }
  auto hd = lam::head_status(tr.final_term());
  bool f_head = hd.binder_hints.empty() && hd.head &&
                hd.head->kind == lam::TermKind::FreeVar && hd.head->name == f;
  if (!f_head) {
    res.note = "f not in head position";
    return res;
  }
  if (hd.args.size() != 1) {
    res.note = "f applied to " + show(static_cast<long long>(hd.args.size())) +
               " arguments";
    return res;
  }
  res.arg = hd.args[0];
  return res;
}

std::uint64_t case_seed(std::uint64_t seed, long long n) {
  return seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(n + 1));
}

}  // namespace

StorageReport verify_storage(const lam::TermPtr& op, enc::NumeralKind kind,
                             long long n_lo, long long n_hi,
                             int variants_per_n, std::size_t fuel,
                             std::uint64_t seed,
                             std::string_view operator_name) {
  if (!op) throw std::invalid_argument("verify_storage: null term");
  if (n_lo < 0 || n_hi < n_lo)
    throw std::invalid_argument("verify_storage: bad n range");
  if (variants_per_n < 1)
    throw std::invalid_argument("verify_storage: variants_per_n < 1");
  StorageReport report;
  report.operator_name =
      operator_name.empty() ? lam::print_term(op) : std::string(operator_name);
  report.kind = kind;
  report.pass = true;
  if (!lam::is_closed(op)) {
    report.pass = false;
    report.reason = "operator term is not closed";
    return report;
  }
  const std::string f = "f";
  for (long long n = n_lo; n <= n_hi; ++n) {
    CaseOutcome c;
    c.n = n;
    c.ok = true;
    auto apply = [&](const lam::TermPtr& theta) {
      return lam::Term::app(lam::Term::app(op, theta), lam::Term::var(f));
    };
    auto ref = lam::head_reduce(apply(enc::numeral(kind, n)), fuel);
    auto out = output_of(ref, f);
    std::set<std::string> holes;
    if (!out.arg) {
      c.ok = false;
      c.note = out.note + " in the reference run";
    } else {
      c.tau_skeleton = out.arg;
      c.reference_steps = ref.count();
      holes = lam::free_vars(out.arg);
      holes.erase(f);
      auto nl = lam::normalize_left(out.arg, fuel);
      if (nl.complete) c.tau_decodes_to = enc::decode(kind, nl.term);
      if (!c.tau_decodes_to) {
        c.ok = false;
        c.note = "reference output is not a numeral";
      }
    }
    if (c.ok) {
      auto thetas =
          gen_theta_variants(kind, n, case_seed(seed, n), variants_per_n);
      for (const auto& theta : thetas) {
        VariantOutcome v;
        v.theta = theta;
        auto tr = lam::head_reduce(apply(theta), fuel);
        auto vo = output_of(tr, f);
        if (!vo.arg) {
          v.note = vo.note;
        } else {
          v.steps = tr.count();
          auto sigma = match_skeleton(c.tau_skeleton, holes, vo.arg);
          if (sigma) {
            v.matched = true;
            v.sigma = *sigma;
          } else {
            v.note = "output does not match the reference skeleton";
          }
        }
        if (!v.matched) c.ok = false;
        c.variants.push_back(std::move(v));
      }
    }
    if (!c.ok && report.reason.empty()) {
      std::string why = c.note;
      for (const auto& v : c.variants)
        if (!v.matched && why.empty()) why = v.note;
      report.reason = "n=" + show(n) + ": " + why;
    }
    report.pass = report.pass && c.ok;
    report.cases.push_back(std::move(c));
  }
  return report;
}

std::string print_storage_report(const StorageReport& r) {
  std::ostringstream os;
  os << "storage check: " << r.operator_name << " over " << kind_name(r.kind)
     << " numerals\n";
  os << "verdict: " << (r.pass ? "PASS" : "FAIL");
  if (!r.pass && !r.reason.empty()) os << " (" << r.reason << ")";
  os << "\n\n";
  os << std::setw(5) << "n" << std::setw(11) << "ref steps" << std::setw(9)
     << "decodes" << std::setw(7) << "holes" << std::setw(10) << "matched"
     << "\n";
  for (const auto& c : r.cases) {
    std::size_t matched = 0;
    for (const auto& v : c.variants) matched += v.matched ? 1 : 0;
    std::set<std::string> holes;
    if (c.tau_skeleton) {
      holes = lam::free_vars(c.tau_skeleton);
      holes.erase("f");
    }
    os << std::setw(5) << c.n << std::setw(11) << c.reference_steps
       << std::setw(9)
       << (c.tau_decodes_to ? show(*c.tau_decodes_to) : std::string("-"))
       << std::setw(7) << holes.size() << std::setw(10)
       << (show(static_cast<long long>(matched)) + "/" +
           show(static_cast<long long>(c.variants.size())))
       << "\n";
    if (!c.ok && !c.note.empty()) os << "      note: " << c.note << "\n";
  }
  os << "\n";
  for (const auto& c : r.cases) {
    for (std::size_t i = 0; i < c.variants.size(); ++i) {
      const auto& v = c.variants[i];
      os << "n=" << c.n << " variant=" << i << " steps=" << v.steps
         << " matched=" << (v.matched ? "yes" : "no");
      if (!v.sigma.empty()) {
        os << " sigma={";
        bool first = true;
        for (const auto& [k, t] : v.sigma) {
          if (!first) os << ", ";
          first = false;
          os << k << " := " << lam::print_term(t);
        }
        os << "}";
      }
      if (!v.note.empty()) os << " note: " << v.note;
      os << "\n";
    }
  }
  return os.str();
}

}  // namespace ttr::sto
