#include "ttr/typing.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "ttr/encodings.hpp"

namespace ttr::typ {

using fml::FKind;
using fml::Formula;
using fml::FormulaPtr;
using fml::FoTerm;
using fml::FoTermPtr;

const char* system_name(System s) {
  switch (s) {
    case System::af2: return "af2";
    case System::ttr: return "ttr";
    case System::ttr_diamond: return "ttr_diamond";
    case System::ttr_zero: return "ttr_zero";
  }
  return "?";
}

std::optional<System> system_from_name(std::string_view name) {
  if (name == "af2") return System::af2;
  if (name == "ttr") return System::ttr;
  if (name == "ttr_diamond") return System::ttr_diamond;
  if (name == "ttr_zero") return System::ttr_zero;
  return std::nullopt;
}

const char* rule_name(TyRule r) {
  switch (r) {
    case TyRule::r1_axiom: return "r1";
    case TyRule::r2_abs: return "r2";
    case TyRule::r3_app: return "r3";
    case TyRule::r4_gen_fo: return "r4";
    case TyRule::r5_inst_fo: return "r5";
    case TyRule::r6_gen_so: return "r6";
    case TyRule::r7_inst_so: return "r7";
    case TyRule::r8_eq: return "r8";
    case TyRule::sub: return "sub";
    case TyRule::y_fix: return "y_fix";
  }
  return "?";
}

check_error::check_error(std::string path_, std::string reason_, TyRule rule)
    : std::runtime_error(std::string(rule_name(rule)) + ": " + reason_ +
                         " (at " + (path_.empty() ? "root" : path_) + ")"),
      path(std::move(path_)),
      reason(std::move(reason_)) {}

TyPtr make_node(TypingDerivation d) {
  return std::make_shared<const TypingDerivation>(std::move(d));
}

namespace {

bool alpha(const FormulaPtr& a, const FormulaPtr& b) {
  return fml::alpha_eq_formula(a, b);
}

const FormulaPtr* ctx_find(const Context& ctx, const std::string& x) {
  for (const auto& [v, a] : ctx)
    if (v == x) return &a;
  return nullptr;
}

bool ctx_eq(const Context& a, const Context& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].first != b[i].first || !alpha(a[i].second, b[i].second))
      return false;
  return true;
}

bool ctx_distinct(const Context& ctx) {
  std::set<std::string> seen;
  for (const auto& [v, a] : ctx)
    if (!seen.insert(v).second) return false;
  return true;
}

bool ctx_has_free_fo(const Context& ctx, const std::string& x) {
  for (const auto& [v, a] : ctx)
    if (fml::fv_fo(a).count(x)) return true;
  return false;
}

bool ctx_has_free_so(const Context& ctx, const std::string& x) {
  for (const auto& [v, a] : ctx)
    if (fml::fv2(a).count(x)) return true;
  return false;
}

lam::TermPtr close_var(const lam::TermPtr& t, const std::string& x,
                       int depth) {
  switch (t->kind) {
    case lam::TermKind::FreeVar:
      return t->name == x ? lam::Term::bound(depth) : t;
    case lam::TermKind::BoundVar:
    case lam::TermKind::SymConst:
      return t;
    case lam::TermKind::Abs:
      return lam::Term::abs(t->name, close_var(t->sub1, x, depth + 1));
    case lam::TermKind::App:
      return lam::Term::app(close_var(t->sub1, x, depth),
                            close_var(t->sub2, x, depth));
  }
  return t;
}

bool fo_free_formula(const FormulaPtr& a) {
  switch (a->kind) {
    case FKind::Bot:
      return true;
    case FKind::PredVar:
    case FKind::PredSym:
      return a->args.empty();
    case FKind::Arrow:
      return fo_free_formula(a->sub1) && fo_free_formula(a->sub2);
    case FKind::ForallFo:
      return false;
    case FKind::ForallSo:
      return fo_free_formula(a->sub1);
    case FKind::Mu:
      return a->params.empty() && a->args.empty() && fo_free_formula(a->sub1);
  }
  return true;
}

bool has_mu(const FormulaPtr& a) {
  switch (a->kind) {
    case FKind::Bot:
    case FKind::PredVar:
    case FKind::PredSym:
      return false;
    case FKind::Arrow:
      return has_mu(a->sub1) || has_mu(a->sub2);
    case FKind::ForallFo:
    case FKind::ForallSo:
      return has_mu(a->sub1);
    case FKind::Mu:
      return true;
  }
  return false;
}

struct YShape {
  std::vector<std::string> vars;
  std::string sym;
  FormulaPtr body;    // D
  FormulaPtr result;  // E'
};

// Premise shape ∀x1..xm[C(x1..xm) -> E] -> ∀x1..xm[D -> E].
std::optional<YShape> y_shape(const FormulaPtr& t, std::string& why) {
  if (t->kind != FKind::Arrow) {
    why = "premise type is not an arrow";
    return std::nullopt;
  }
  YShape s;
  FormulaPtr l = t->sub1;
  while (l->kind == FKind::ForallFo) {
    s.vars.push_back(l->name);
    l = l->sub1;
  }
  if (l->kind != FKind::Arrow || l->sub1->kind != FKind::PredSym ||
      l->sub1->args.size() != s.vars.size()) {
    why = "premise left side is not a recursion scheme";
    return std::nullopt;
  }
  for (std::size_t i = 0; i < s.vars.size(); ++i) {
    const auto& arg = l->sub1->args[i];
    if (!arg->is_var || arg->name != s.vars[i]) {
      why = "premise left side is not a recursion scheme";
      return std::nullopt;
    }
  }
  s.sym = l->sub1->name;
  s.result = l->sub2;
  FormulaPtr r = t->sub2;
  for (const auto& v : s.vars) {
    if (r->kind != FKind::ForallFo || r->name != v) {
      why = "premise sides bind different variable blocks";
      return std::nullopt;
    }
    r = r->sub1;
  }
  if (r->kind != FKind::Arrow) {
    why = "premise right side is not a recursion scheme";
    return std::nullopt;
  }
  s.body = r->sub1;
  if (!alpha(r->sub2, s.result)) {
    why = "result types differ between the sides";
    return std::nullopt;
  }
  return s;
}

FormulaPtr y_conclusion(const YShape& s) {
  std::vector<FoTermPtr> over;
  over.reserve(s.vars.size());
  for (const auto& v : s.vars) over.push_back(FoTerm::var(v));
  FormulaPtr mu = Formula::mu(s.sym, s.vars, s.body, over);
  FormulaPtr out = Formula::arrow(mu, s.result);
  for (auto it = s.vars.rbegin(); it != s.vars.rend(); ++it)
    out = Formula::forall_fo(*it, out);
  return out;
}

const lam::TermPtr& turing_y() {
  static const lam::TermPtr y = enc::builtin("Y");
  return y;
}

}  // namespace

// ---------------------------------------------------------------------------
// Builders

TyPtr r1(System sys, Context ctx, const std::string& x) {
  const FormulaPtr* ty = ctx_find(ctx, x);
  if (!ty) throw std::invalid_argument("r1: variable not in the context");
  TypingDerivation n;
  n.rule = TyRule::r1_axiom;
  n.concl = Judgment{sys, std::move(ctx), lam::Term::var(x), *ty};
  return make_node(std::move(n));
}

TyPtr r2(const TyPtr& prem, const std::string& x) {
  const Context& pc = prem->concl.context;
  std::size_t idx = pc.size();
  for (std::size_t i = 0; i < pc.size(); ++i)
    if (pc[i].first == x) idx = i;
  if (idx == pc.size())
    throw std::invalid_argument("r2: variable not in the premise context");
  Context ctx;
  for (std::size_t i = 0; i < pc.size(); ++i)
    if (i != idx) ctx.push_back(pc[i]);
  TypingDerivation n;
  n.rule = TyRule::r2_abs;
  n.var = x;
  n.concl = Judgment{
      prem->concl.system, std::move(ctx),
      lam::Term::abs(x, close_var(prem->concl.subject, x, 0)),
      Formula::arrow(pc[idx].second, prem->concl.type)};
  n.premises = {prem};
  return make_node(std::move(n));
}

TyPtr r3(const TyPtr& fun, const TyPtr& arg) {
  if (fun->concl.type->kind != FKind::Arrow)
    throw std::invalid_argument("r3: function premise is not an arrow");
  TypingDerivation n;
  n.rule = TyRule::r3_app;
  n.concl = Judgment{fun->concl.system, fun->concl.context,
                     lam::Term::app(fun->concl.subject, arg->concl.subject),
                     fun->concl.type->sub2};
  n.premises = {fun, arg};
  return make_node(std::move(n));
}

TyPtr r4(const TyPtr& prem, const std::string& x) {
  TypingDerivation n;
  n.rule = TyRule::r4_gen_fo;
  n.var = x;
  n.concl = Judgment{prem->concl.system, prem->concl.context,
                     prem->concl.subject,
                     Formula::forall_fo(x, prem->concl.type)};
  n.premises = {prem};
  return make_node(std::move(n));
}

TyPtr r5(const TyPtr& prem, FoTermPtr u) {
  const auto& t = prem->concl.type;
  if (t->kind != FKind::ForallFo)
    throw std::invalid_argument(
        "r5: premise type is not a first-order quantification");
  TypingDerivation n;
  n.rule = TyRule::r5_inst_fo;
  n.term_u = u;
  n.concl = Judgment{prem->concl.system, prem->concl.context,
                     prem->concl.subject,
                     fml::subst_fo(t->sub1, {{t->name, std::move(u)}})};
  n.premises = {prem};
  return make_node(std::move(n));
}

TyPtr r6(const TyPtr& prem, const std::string& x) {
  TypingDerivation n;
  n.rule = TyRule::r6_gen_so;
  n.var = x;
  n.concl = Judgment{prem->concl.system, prem->concl.context,
                     prem->concl.subject,
                     Formula::forall_so(x, prem->concl.type)};
  n.premises = {prem};
  return make_node(std::move(n));
}

TyPtr r7(const TyPtr& prem, fml::SubstSo g) {
  const auto& t = prem->concl.type;
  if (t->kind != FKind::ForallSo)
    throw std::invalid_argument(
        "r7: premise type is not a second-order quantification");
  TypingDerivation n;
  n.rule = TyRule::r7_inst_so;
  n.concl = Judgment{prem->concl.system, prem->concl.context,
                     prem->concl.subject, fml::subst_so(t->sub1, t->name, g)};
  n.pred_g = std::move(g);
  n.premises = {prem};
  return make_node(std::move(n));
}

TyPtr r8(const TyPtr& prem, FoTermPtr from, FoTermPtr to,
         FormulaPtr rewritten) {
  TypingDerivation n;
  n.rule = TyRule::r8_eq;
  n.eq_from = std::move(from);
  n.eq_to = std::move(to);
  n.concl = Judgment{prem->concl.system, prem->concl.context,
                     prem->concl.subject, std::move(rewritten)};
  n.premises = {prem};
  return make_node(std::move(n));
}

TyPtr sub_incl(const TyPtr& prem, sub::SubPtr incl) {
  TypingDerivation n;
  n.rule = TyRule::sub;
  n.concl = Judgment{prem->concl.system, prem->concl.context,
                     prem->concl.subject, incl->rhs};
  n.inclusion = std::move(incl);
  n.premises = {prem};
  return make_node(std::move(n));
}

TyPtr y_fix(const TyPtr& prem) {
  std::string why;
  auto s = y_shape(prem->concl.type, why);
  if (!s) throw std::invalid_argument("y_fix: " + why);
  TypingDerivation n;
  n.rule = TyRule::y_fix;
  n.concl = Judgment{prem->concl.system, prem->concl.context,
                     lam::Term::app(turing_y(), prem->concl.subject),
                     y_conclusion(*s)};
  n.premises = {prem};
  return make_node(std::move(n));
}

// ---------------------------------------------------------------------------
// Checking

namespace {

struct TyChecker {
  const fml::EquationSystem& eqs;

  [[noreturn]] void fail(const std::string& path, TyRule rule,
                         const std::string& reason) const {
    throw check_error(path, reason, rule);
  }

  void expect_premises(const TyPtr& d, std::size_t n,
                       const std::string& path) const {
    if (d->premises.size() != n)
      fail(path, d->rule,
           "expected " + std::to_string(n) + " premises, found " +
               std::to_string(d->premises.size()));
  }

  void check(const TyPtr& d, const std::string& path) const {
    const System sys = d->concl.system;
    switch (d->rule) {
      case TyRule::r1_axiom:
        expect_premises(d, 0, path);
        break;
      case TyRule::r3_app:
        expect_premises(d, 2, path);
        break;
      default:
        expect_premises(d, 1, path);
        break;
    }
    for (std::size_t i = 0; i < d->premises.size(); ++i)
      check(d->premises[i],
            path.empty() ? std::to_string(i) : path + "/" + std::to_string(i));

    if (!d->concl.subject) fail(path, d->rule, "missing subject");
    if (!d->concl.type) fail(path, d->rule, "missing type");
    if (!ctx_distinct(d->concl.context))
      fail(path, d->rule, "context variables repeat");
    for (const auto& p : d->premises)
      if (p->concl.system != sys) fail(path, d->rule, "premise system differs");

    // Per-system rule gates.
    if (sys == System::af2 &&
        (d->rule == TyRule::sub || d->rule == TyRule::y_fix))
      fail(path, d->rule, "not available in AF2");
    if (sys == System::ttr_zero &&
        (d->rule == TyRule::r5_inst_fo || d->rule == TyRule::r7_inst_so ||
         d->rule == TyRule::r8_eq))
      fail(path, d->rule, "not available in the restricted system");
    if (sys == System::ttr_diamond &&
        (d->rule == TyRule::r4_gen_fo || d->rule == TyRule::r5_inst_fo ||
         d->rule == TyRule::r8_eq))
      fail(path, d->rule, "not available in the propositional system");
    if (sys == System::ttr_diamond) {
      bool ok = fo_free_formula(d->concl.type);
      for (const auto& [v, a] : d->concl.context) ok = ok && fo_free_formula(a);
      if (!ok)
        fail(path, d->rule, "first-order syntax in the propositional system");
    }
    if (sys == System::af2) {
      bool bad = has_mu(d->concl.type);
      for (const auto& [v, a] : d->concl.context) bad = bad || has_mu(a);
      if (bad)
        fail(path, d->rule, "least fixed points are not available in this system");
    }

    switch (d->rule) {
      case TyRule::r1_axiom: {
        if (d->concl.subject->kind != lam::TermKind::FreeVar)
          fail(path, d->rule, "subject is not a variable");
        const FormulaPtr* ty =
            ctx_find(d->concl.context, d->concl.subject->name);
        if (!ty) fail(path, d->rule, "variable not bound in the context");
        if (!alpha(*ty, d->concl.type))
          fail(path, d->rule, "type differs from the context entry");
        return;
      }
      case TyRule::r2_abs: {
        const auto& p = d->premises[0]->concl;
        if (d->var.empty()) fail(path, d->rule, "missing bound variable");
        const Context& pc = p.context;
        std::size_t idx = pc.size();
        for (std::size_t i = 0; i < pc.size(); ++i)
          if (pc[i].first == d->var) idx = i;
        if (idx == pc.size())
          fail(path, d->rule, "bound variable not in the premise context");
        Context rest;
        for (std::size_t i = 0; i < pc.size(); ++i)
          if (i != idx) rest.push_back(pc[i]);
        if (!ctx_eq(d->concl.context, rest))
          fail(path, d->rule,
               "context differs from the premise minus the bound variable");
        if (d->concl.subject->kind != lam::TermKind::Abs)
          fail(path, d->rule, "subject is not an abstraction");
        auto expected =
            lam::Term::abs(d->var, close_var(p.subject, d->var, 0));
        if (!lam::alpha_eq(d->concl.subject, expected))
          fail(path, d->rule, "subject body differs from the premise subject");
        if (d->concl.type->kind != FKind::Arrow ||
            !alpha(d->concl.type->sub1, pc[idx].second) ||
            !alpha(d->concl.type->sub2, p.type))
          fail(path, d->rule, "type is not the expected arrow");
        return;
      }
      case TyRule::r3_app: {
        const auto& f = d->premises[0]->concl;
        const auto& a = d->premises[1]->concl;
        if (!ctx_eq(f.context, a.context))
          fail(path, d->rule, "premise contexts differ");
        if (!ctx_eq(d->concl.context, f.context))
          fail(path, d->rule, "context differs from the premises");
        if (f.type->kind != FKind::Arrow)
          fail(path, d->rule, "first premise is not an arrow");
        if (!alpha(f.type->sub1, a.type))
          fail(path, d->rule, "argument type differs from the arrow argument");
        if (!alpha(d->concl.type, f.type->sub2))
          fail(path, d->rule, "type differs from the arrow result");
        if (d->concl.subject->kind != lam::TermKind::App ||
            !lam::alpha_eq(d->concl.subject->sub1, f.subject) ||
            !lam::alpha_eq(d->concl.subject->sub2, a.subject))
          fail(path, d->rule, "subject parts differ from the premises");
        return;
      }
      case TyRule::r4_gen_fo:
      case TyRule::r6_gen_so: {
        const auto& p = d->premises[0]->concl;
        if (d->var.empty()) fail(path, d->rule, "missing generalized variable");
        if (!ctx_eq(d->concl.context, p.context))
          fail(path, d->rule, "context differs from the premise");
        if (!lam::alpha_eq(d->concl.subject, p.subject))
          fail(path, d->rule, "subject differs from the premise");
        bool fo = d->rule == TyRule::r4_gen_fo;
        FormulaPtr expected = fo ? Formula::forall_fo(d->var, p.type)
                                 : Formula::forall_so(d->var, p.type);
        if (!alpha(d->concl.type, expected))
          fail(path, d->rule, "type is not the generalization of the premise");
        bool used = fo ? ctx_has_free_fo(d->concl.context, d->var)
                       : ctx_has_free_so(d->concl.context, d->var);
        if (used)
          fail(path, d->rule, "generalized variable occurs in the context");
        return;
      }
      case TyRule::r5_inst_fo: {
        const auto& p = d->premises[0]->concl;
        if (!d->term_u) fail(path, d->rule, "missing instantiation term");
        if (!ctx_eq(d->concl.context, p.context))
          fail(path, d->rule, "context differs from the premise");
        if (!lam::alpha_eq(d->concl.subject, p.subject))
          fail(path, d->rule, "subject differs from the premise");
        if (p.type->kind != FKind::ForallFo)
          fail(path, d->rule,
               "premise type is not a first-order quantification");
        auto inst = fml::subst_fo(p.type->sub1, {{p.type->name, d->term_u}});
        if (!alpha(d->concl.type, inst))
          fail(path, d->rule, "type differs from the instantiated premise");
        return;
      }
      case TyRule::r7_inst_so: {
        const auto& p = d->premises[0]->concl;
        if (!d->pred_g) fail(path, d->rule, "missing instantiation payload");
        if (!ctx_eq(d->concl.context, p.context))
          fail(path, d->rule, "context differs from the premise");
        if (!lam::alpha_eq(d->concl.subject, p.subject))
          fail(path, d->rule, "subject differs from the premise");
        if (p.type->kind != FKind::ForallSo)
          fail(path, d->rule,
               "premise type is not a second-order quantification");
        FormulaPtr inst;
        try {
          inst = fml::subst_so(p.type->sub1, p.type->name, *d->pred_g);
        } catch (const std::exception& e) {
          fail(path, d->rule, e.what());
        }
        if (!alpha(d->concl.type, inst))
          fail(path, d->rule, "type differs from the instantiated premise");
        return;
      }
      case TyRule::r8_eq: {
        const auto& p = d->premises[0]->concl;
        if (!d->eq_from || !d->eq_to)
          fail(path, d->rule, "missing equation instance");
        if (!ctx_eq(d->concl.context, p.context))
          fail(path, d->rule, "context differs from the premise");
        if (!lam::alpha_eq(d->concl.subject, p.subject))
          fail(path, d->rule, "subject differs from the premise");
        if (!fml::match_equation(d->eq_from, d->eq_to, eqs))
          fail(path, d->rule, "equation instance matches no equation");
        int k = sub::rewrite_positions(p.type, d->concl.type, d->eq_from,
                                       d->eq_to);
        if (k < 0)
          fail(path, d->rule, "rewrite is not a single-position replacement");
        if (k == 0) fail(path, d->rule, "rewrite changes zero positions");
        if (k > 1) fail(path, d->rule, "rewrite changes more than one position");
        return;
      }
      case TyRule::sub: {
        const auto& p = d->premises[0]->concl;
        if (!d->inclusion) fail(path, d->rule, "missing inclusion");
        if (!ctx_eq(d->concl.context, p.context))
          fail(path, d->rule, "context differs from the premise");
        if (!lam::alpha_eq(d->concl.subject, p.subject))
          fail(path, d->rule, "subject differs from the premise");
        sub::Mode mode =
            sys == System::ttr_zero ? sub::Mode::zero : sub::Mode::full;
        try {
          sub::check_sub(d->inclusion, eqs, mode);
        } catch (const sub::check_error& e) {
          fail(path, d->rule, std::string("inclusion: ") + e.what());
        }
        if (!alpha(p.type, d->inclusion->lhs))
          fail(path, d->rule,
               "premise type differs from the inclusion's left side");
        if (!alpha(d->concl.type, d->inclusion->rhs))
          fail(path, d->rule, "type differs from the inclusion's right side");
        return;
      }
      case TyRule::y_fix: {
        const auto& p = d->premises[0]->concl;
        if (!ctx_eq(d->concl.context, p.context))
          fail(path, d->rule, "context differs from the premise");
        std::string why;
        auto s = y_shape(p.type, why);
        if (!s) fail(path, d->rule, why);
        if (fml::fps(s->result).count(s->sym))
          fail(path, d->rule, "recursion symbol occurs in the result type");
        FormulaPtr want;
        try {
          want = y_conclusion(*s);
        } catch (const std::exception& e) {
          fail(path, d->rule, e.what());
        }
        if (!alpha(d->concl.type, want))
          fail(path, d->rule, "type differs from the recursion conclusion");
        if (d->concl.subject->kind != lam::TermKind::App ||
            !lam::alpha_eq(d->concl.subject->sub1, turing_y()))
          fail(path, d->rule,
               "subject is not an application of the fixed point combinator");
        if (!lam::alpha_eq(d->concl.subject->sub2, p.subject))
          fail(path, d->rule, "subject argument differs from the premise");
        return;
      }
    }
  }
};

}  // namespace

Judgment check_typing(const TyPtr& d, const fml::EquationSystem& eqs) {
  TyChecker ck{eqs};
  ck.check(d, "");
  return d->concl;
}

// ---------------------------------------------------------------------------
// Erasure

namespace {

sub::SubPtr erase_sub_node(const sub::SubPtr& d) {
  using sub::SubRule;
  auto e = [](const FormulaPtr& f) { return fml::erase_diamond(f); };
  switch (d->rule) {
    case SubRule::ax:
      return sub::ax(e(d->lhs));
    case SubRule::arrow:
      return sub::arrow(erase_sub_node(d->premises[0]),
                        erase_sub_node(d->premises[1]));
    case SubRule::forall_ig:
    case SubRule::forall_ig0: {
      if (!d->pred_g) return erase_sub_node(d->premises[0]);
      sub::SubDerivation n;
      n.rule = d->rule;
      n.lhs = e(d->lhs);
      n.rhs = e(d->rhs);
      n.pred_g = fml::SubstSo{{}, e(d->pred_g->body)};
      n.premises = {erase_sub_node(d->premises[0])};
      return sub::make_node(std::move(n));
    }
    case SubRule::forall_id:
      if (d->rhs->kind == FKind::ForallFo)
        return erase_sub_node(d->premises[0]);
      return sub::forall_id(d->var, erase_sub_node(d->premises[0]));
    case SubRule::eq:
      return erase_sub_node(d->premises[0]);
    case SubRule::tr:
      return sub::tr(erase_sub_node(d->premises[0]),
                     erase_sub_node(d->premises[1]));
    case SubRule::mu_d:
      return sub::mu_d(e(d->rhs));
    case SubRule::mu_prime_g:
      return sub::mu_prime_g(e(d->lhs));
    case SubRule::mu_g: {
      sub::SubDerivation n;
      n.rule = SubRule::mu_g;
      n.lhs = e(d->lhs);
      n.rhs = e(d->rhs);
      n.mu_e = e(d->mu_e);
      n.premises = {erase_sub_node(d->premises[0])};
      return sub::make_node(std::move(n));
    }
  }
  return d;
}

}  // namespace

TyPtr erase_derivation(const TyPtr& d) {
  switch (d->rule) {
    case TyRule::r4_gen_fo:
    case TyRule::r5_inst_fo:
    case TyRule::r8_eq:
      return erase_derivation(d->premises[0]);
    default:
      break;
  }
  TypingDerivation n;
  n.rule = d->rule;
  n.var = d->var;
  n.concl.system = System::ttr_diamond;
  for (const auto& [v, a] : d->concl.context)
    n.concl.context.emplace_back(v, fml::erase_diamond(a));
  n.concl.subject = d->concl.subject;
  n.concl.type = fml::erase_diamond(d->concl.type);
  if (d->pred_g) n.pred_g = fml::SubstSo{{}, fml::erase_diamond(d->pred_g->body)};
  if (d->inclusion) n.inclusion = erase_sub_node(d->inclusion);
  for (const auto& p : d->premises) n.premises.push_back(erase_derivation(p));
  return make_node(std::move(n));
}

// ---------------------------------------------------------------------------
// Gödel lifting

namespace {

struct TyLifter {
  const fml::GodelConfig& cfg;

  [[noreturn]] void fail(const std::string& path, TyRule rule,
                         const std::string& reason) const {
    throw check_error(path, reason, rule);
  }

  FormulaPtr star(const FormulaPtr& a, const std::string& path,
                  TyRule rule) const {
    try {
      return fml::godel(a, cfg);
    } catch (const std::exception& e) {
      fail(path, rule, e.what());
    }
  }

  Judgment star_judgment(const Judgment& j, const std::string& path,
                         TyRule rule) const {
    Judgment out;
    out.system = j.system;
    for (const auto& [v, a] : j.context)
      out.context.emplace_back(v, star(a, path, rule));
    out.subject = j.subject;
    out.type = star(j.type, path, rule);
    return out;
  }

  TyPtr lift(const TyPtr& d, const std::string& path) const {
    switch (d->rule) {
      case TyRule::r5_inst_fo:
      case TyRule::r7_inst_so:
      case TyRule::r8_eq:
        fail(path, d->rule, "not available in the restricted system");
      case TyRule::r6_gen_so: {
        TyPtr inner = lift(d->premises[0], path.empty() ? "0" : path + "/0");
        if (d->var.empty())
          fail(path, d->rule, "missing generalized variable");
        const auto& pty = d->premises[0]->concl.type;
        std::size_t k =
            fml::occurrence_arity(pty, d->var, fml::PredSort::Var).value_or(0);
        fml::GodelEntry entry;
        try {
          entry = cfg.entry(d->var, k);
        } catch (const std::exception& e) {
          fail(path, d->rule, e.what());
        }
        Context ctx = star_judgment(d->concl, path, d->rule).context;
        TyPtr acc = inner;
        for (auto it = entry.vars.rbegin(); it != entry.vars.rend(); ++it) {
          TypingDerivation n;
          n.rule = TyRule::r6_gen_so;
          n.var = *it;
          n.concl = Judgment{d->concl.system, ctx, d->concl.subject,
                             Formula::forall_so(*it, acc->concl.type)};
          n.premises = {acc};
          acc = make_node(std::move(n));
        }
        return acc;
      }
      case TyRule::sub: {
        TypingDerivation n;
        n.rule = TyRule::sub;
        n.concl = star_judgment(d->concl, path, d->rule);
        try {
          n.inclusion = sub::godel_lift(d->inclusion, cfg);
        } catch (const sub::check_error& e) {
          fail(path, d->rule, std::string("inclusion: ") + e.what());
        }
        n.premises = {lift(d->premises[0], path.empty() ? "0" : path + "/0")};
        return make_node(std::move(n));
      }
      default: {
        TypingDerivation n;
        n.rule = d->rule;
        n.var = d->var;
        n.concl = star_judgment(d->concl, path, d->rule);
        for (std::size_t i = 0; i < d->premises.size(); ++i)
          n.premises.push_back(
              lift(d->premises[i], path.empty()
                                       ? std::to_string(i)
                                       : path + "/" + std::to_string(i)));
        return make_node(std::move(n));
      }
    }
  }
};

}  // namespace

TyPtr godel_lift_typing(const TyPtr& d, const fml::GodelConfig& cfg) {
  if (d->concl.system != System::ttr_zero)
    throw std::invalid_argument(
        "godel_lift_typing expects a ttr_zero derivation");
  TyLifter lf{cfg};
  return lf.lift(d, "");
}

// ---------------------------------------------------------------------------
// File format

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

[[noreturn]] void line_error(const std::string& msg, std::size_t line) {
  throw fml::parse_error("line " + std::to_string(line) + ": " + msg, line);
}

std::optional<TyRule> ty_rule_from_name(const std::string& s) {
  static const std::map<std::string, TyRule> table = {
      {"r1", TyRule::r1_axiom},   {"r2", TyRule::r2_abs},
      {"r3", TyRule::r3_app},     {"r4", TyRule::r4_gen_fo},
      {"r5", TyRule::r5_inst_fo}, {"r6", TyRule::r6_gen_so},
      {"r7", TyRule::r7_inst_so}, {"r8", TyRule::r8_eq},
      {"sub", TyRule::sub},       {"y_fix", TyRule::y_fix},
  };
  auto it = table.find(s);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

bool is_sub_rule_name(const std::string& s) {
  static const std::set<std::string> names = {
      "ax", "arrow", "forall_ig", "forall_ig0", "forall_id",
      "eq", "tr",    "mu_d",      "mu_prime_g", "mu_g"};
  return names.count(s) > 0;
}

FormulaPtr parse_formula_at(const std::string& s, const fml::Signature& sig,
                            std::size_t line) {
  try {
    return fml::parse_formula(s, sig);
  } catch (const fml::parse_error& e) {
    line_error(e.what(), line);
  }
}

FoTermPtr parse_term_at(const std::string& s, const fml::Signature& sig,
                        std::size_t line) {
  try {
    return fml::parse_fo_term(s, sig);
  } catch (const fml::parse_error& e) {
    line_error(e.what(), line);
  }
}

lam::TermPtr parse_subject_at(const std::string& s, std::size_t line) {
  try {
    return enc::parse(s);
  } catch (const std::exception& e) {
    line_error(e.what(), line);
  }
}

TyPtr parse_ty_node(const std::vector<std::string>& lines, std::size_t& i,
                    const fml::Signature& sig, System sys) {
  while (i < lines.size() && trim(lines[i]).empty()) ++i;
  if (i >= lines.size()) line_error("unexpected end of input", lines.size());
  std::string head = trim(lines[i]);
  if (head.size() < 2 || head.substr(head.size() - 2) != " {")
    line_error("expected 'rule {'", i + 1);
  std::string name = trim(head.substr(0, head.size() - 2));
  auto rule = ty_rule_from_name(name);
  if (!rule) line_error("unknown rule '" + name + "'", i + 1);
  std::size_t head_line = i + 1;
  ++i;

  TypingDerivation n;
  n.rule = *rule;
  n.concl.system = sys;
  std::vector<std::string> pred_tokens;
  while (true) {
    if (i >= lines.size()) line_error("unexpected end of input", lines.size());
    std::string s = trim(lines[i]);
    if (s.empty()) {
      ++i;
      continue;
    }
    if (s == "}") {
      ++i;
      break;
    }
    if (s.size() >= 2 && s.substr(s.size() - 2) == " {") {
      std::string inner = trim(s.substr(0, s.size() - 2));
      if (ty_rule_from_name(inner)) {
        n.premises.push_back(parse_ty_node(lines, i, sig, sys));
        continue;
      }
      if (is_sub_rule_name(inner)) {
        if (n.inclusion) line_error("duplicate inclusion block", i + 1);
        try {
          n.inclusion = sub::parse_sub_node(lines, i, sig);
        } catch (const fml::parse_error& e) {
          throw;
        }
        continue;
      }
      line_error("unknown rule '" + inner + "'", i + 1);
    }
    std::size_t colon = s.find(": ");
    if (colon == std::string::npos) line_error("expected 'key: value'", i + 1);
    std::string key = s.substr(0, colon);
    std::string val = trim(s.substr(colon + 2));
    if (key == "hyp") {
      std::size_t sep = val.find(" : ");
      if (sep == std::string::npos)
        line_error("hypothesis needs the form 'x : A'", i + 1);
      n.concl.context.emplace_back(
          trim(val.substr(0, sep)),
          parse_formula_at(trim(val.substr(sep + 3)), sig, i + 1));
    } else if (key == "subject") {
      n.concl.subject = parse_subject_at(val, i + 1);
    } else if (key == "type") {
      n.concl.type = parse_formula_at(val, sig, i + 1);
    } else if (key == "var") {
      n.var = val;
    } else if (key == "term") {
      n.term_u = parse_term_at(val, sig, i + 1);
    } else if (key == "from") {
      n.eq_from = parse_term_at(val, sig, i + 1);
    } else if (key == "to") {
      n.eq_to = parse_term_at(val, sig, i + 1);
    } else if (key == "pred") {
      std::size_t dot = val.find(" . ");
      std::string params = dot == std::string::npos ? "" : val.substr(0, dot);
      if (val.rfind(". ", 0) == 0) {
        params = "";
        dot = 0;
      }
      if (dot == std::string::npos)
        line_error("payload needs '.' before its body", i + 1);
      fml::SubstSo g;
      std::istringstream ps(params);
      std::string tok;
      while (ps >> tok)
        if (tok != ".") g.params.push_back(tok);
      std::string body =
          val.rfind(". ", 0) == 0 ? val.substr(2) : val.substr(dot + 3);
      g.body = parse_formula_at(trim(body), sig, i + 1);
      n.pred_g = std::move(g);
    } else {
      line_error("unknown field '" + key + "'", i + 1);
    }
    ++i;
  }
  if (!n.concl.subject) line_error("missing subject", head_line);
  if (!n.concl.type) line_error("missing type", head_line);
  return make_node(std::move(n));
}

void print_ty_node(std::string& out, const TyPtr& d, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  out += pad + rule_name(d->rule) + " {\n";
  std::string inner = pad + "  ";
  for (const auto& [v, a] : d->concl.context)
    out += inner + "hyp: " + v + " : " + fml::print_formula(a) + "\n";
  out += inner + "subject: " + lam::print_term(d->concl.subject) + "\n";
  out += inner + "type: " + fml::print_formula(d->concl.type) + "\n";
  if (!d->var.empty()) out += inner + "var: " + d->var + "\n";
  if (d->term_u) out += inner + "term: " + fml::print_fo_term(d->term_u) + "\n";
  if (d->pred_g) {
    out += inner + "pred:";
    for (const auto& p : d->pred_g->params) out += " " + p;
    out += " . " + fml::print_formula(d->pred_g->body) + "\n";
  }
  if (d->eq_from) out += inner + "from: " + fml::print_fo_term(d->eq_from) + "\n";
  if (d->eq_to) out += inner + "to: " + fml::print_fo_term(d->eq_to) + "\n";
  if (d->inclusion) sub::print_sub_node(out, d->inclusion, indent + 1);
  for (const auto& p : d->premises) print_ty_node(out, p, indent + 1);
  out += pad + "}\n";
}

}  // namespace

TyFile parse_ty_file(std::string_view text) {
  TyFile f;
  auto lines = split_lines(text);
  std::size_t i = 0;
  bool have_system = false;
  while (i < lines.size()) {
    std::string s = trim(lines[i]);
    if (s.empty()) {
      ++i;
      continue;
    }
    if (s.rfind("system ", 0) == 0) {
      auto sys = system_from_name(trim(s.substr(7)));
      if (!sys) line_error("unknown system '" + trim(s.substr(7)) + "'", i + 1);
      f.system = *sys;
      have_system = true;
      ++i;
      continue;
    }
    if (s.rfind("fn ", 0) == 0 || s.rfind("pred ", 0) == 0) {
      try {
        f.sig = fml::parse_signature_line(s, f.sig);
      } catch (const fml::parse_error& e) {
        line_error(e.what(), i + 1);
      }
      ++i;
      continue;
    }
    if (s.rfind("equation ", 0) == 0) {
      std::string rest = s.substr(9);
      std::size_t sep = rest.find(" = ");
      if (sep == std::string::npos)
        line_error("equation needs the form 't = u'", i + 1);
      f.eqs.emplace_back(
          parse_term_at(trim(rest.substr(0, sep)), f.sig, i + 1),
          parse_term_at(trim(rest.substr(sep + 3)), f.sig, i + 1));
      ++i;
      continue;
    }
    break;
  }
  if (!have_system) line_error("expected 'system <name>'", i + 1);
  f.root = parse_ty_node(lines, i, f.sig, f.system);
  for (; i < lines.size(); ++i)
    if (!trim(lines[i]).empty()) line_error("trailing content", i + 1);
  return f;
}

std::string print_ty_file(const TyFile& f) {
  std::string out = std::string("system ") + system_name(f.system) + "\n";
  out += fml::print_signature(f.sig);
  for (const auto& [l, r] : f.eqs)
    out += "equation " + fml::print_fo_term(l) + " = " + fml::print_fo_term(r) +
           "\n";
  out += "\n";
  print_ty_node(out, f.root, 0);
  return out;
}

}  // namespace ttr::typ
