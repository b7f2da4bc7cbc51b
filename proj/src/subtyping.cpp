#include "ttr/subtyping.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace ttr::sub {

namespace {

using fml::FKind;
using fml::Formula;
using fml::FormulaPtr;
using fml::FoSubst;
using fml::FoTerm;
using fml::FoTermPtr;
using fml::PredSort;
using fml::SubstSo;

bool so_name(const std::string& n) {
  return !n.empty() && std::isupper(static_cast<unsigned char>(n[0]));
}

std::string fresh(std::string base, const std::set<std::string>& avoid) {
  while (avoid.count(base)) base += "'";
  return base;
}

std::vector<FoTermPtr> param_vars(const std::vector<std::string>& ps) {
  std::vector<FoTermPtr> out;
  out.reserve(ps.size());
  for (const auto& p : ps) out.push_back(FoTerm::var(p));
  return out;
}

FoSubst one(const std::string& v, FoTermPtr t) {
  FoSubst s;
  s[v] = std::move(t);
  return s;
}

void names_of_term(const FoTermPtr& t, std::set<std::string>& fo) {
  if (!t) return;
  if (t->is_var) {
    fo.insert(t->name);
    return;
  }
  for (const auto& a : t->args) names_of_term(a, fo);
}

// Every name mentioned anywhere, bound or free; the predicate namespaces are
// pooled since freshness across both is harmless.
void names_of(const FormulaPtr& a, std::set<std::string>& fo,
              std::set<std::string>& preds) {
  if (!a) return;
  switch (a->kind) {
    case FKind::Bot:
      return;
    case FKind::PredVar:
    case FKind::PredSym:
      preds.insert(a->name);
      for (const auto& t : a->args) names_of_term(t, fo);
      return;
    case FKind::Arrow:
      names_of(a->sub1, fo, preds);
      names_of(a->sub2, fo, preds);
      return;
    case FKind::ForallFo:
      fo.insert(a->name);
      names_of(a->sub1, fo, preds);
      return;
    case FKind::ForallSo:
      preds.insert(a->name);
      names_of(a->sub1, fo, preds);
      return;
    case FKind::Mu:
      preds.insert(a->name);
      for (const auto& p : a->params) fo.insert(p);
      for (const auto& t : a->args) names_of_term(t, fo);
      names_of(a->sub1, fo, preds);
      return;
  }
}

void collect_names(const SubPtr& d, std::set<std::string>& fo,
                   std::set<std::string>& preds) {
  if (!d) return;
  names_of(d->lhs, fo, preds);
  names_of(d->rhs, fo, preds);
  names_of(d->mu_e, fo, preds);
  if (d->pred_g) {
    names_of(d->pred_g->body, fo, preds);
    for (const auto& p : d->pred_g->params) fo.insert(p);
  }
  names_of_term(d->term_g, fo);
  names_of_term(d->eq_from, fo);
  names_of_term(d->eq_to, fo);
  if (!d->var.empty()) (so_name(d->var) ? preds : fo).insert(d->var);
  for (const auto& p : d->premises) collect_names(p, fo, preds);
}

void bound_fo_names(const FormulaPtr& a, std::set<std::string>& out) {
  if (!a) return;
  if (a->kind == FKind::ForallFo) out.insert(a->name);
  if (a->kind == FKind::Mu)
    for (const auto& p : a->params) out.insert(p);
  bound_fo_names(a->sub1, out);
  bound_fo_names(a->sub2, out);
}

// Count of positions where b replaces an occurrence of `from` in a by `to`;
// -1 when the two differ in any other way. The walk is lockstep, so bound
// names must agree exactly on both sides.
int diff_fo(const FoTermPtr& a, const FoTermPtr& b, const FoTermPtr& from,
            const FoTermPtr& to) {
  if (fml::fo_equal(a, b)) return 0;
  if (fml::fo_equal(a, from) && fml::fo_equal(b, to)) return 1;
  if (!a->is_var && !b->is_var && a->name == b->name &&
      a->args.size() == b->args.size()) {
    int total = 0;
    for (std::size_t i = 0; i < a->args.size(); ++i) {
      int k = diff_fo(a->args[i], b->args[i], from, to);
      if (k < 0) return -1;
      total += k;
    }
    return total;
  }
  return -1;
}

int diff_formula(const FormulaPtr& a, const FormulaPtr& b,
                 const FoTermPtr& from, const FoTermPtr& to) {
  if (!a || !b) return a == b ? 0 : -1;
  if (a->kind != b->kind || a->name != b->name) return -1;
  int total = 0;
  auto add = [&](int k) {
    if (total < 0 || k < 0)
      total = -1;
    else
      total += k;
  };
  switch (a->kind) {
    case FKind::Bot:
      return 0;
    case FKind::PredVar:
    case FKind::PredSym:
      if (a->args.size() != b->args.size()) return -1;
      for (std::size_t i = 0; i < a->args.size(); ++i)
        add(diff_fo(a->args[i], b->args[i], from, to));
      return total;
    case FKind::Arrow:
      add(diff_formula(a->sub1, b->sub1, from, to));
      add(diff_formula(a->sub2, b->sub2, from, to));
      return total;
    case FKind::ForallFo:
    case FKind::ForallSo:
      return diff_formula(a->sub1, b->sub1, from, to);
    case FKind::Mu:
      if (a->params != b->params || a->args.size() != b->args.size()) return -1;
      for (std::size_t i = 0; i < a->args.size(); ++i)
        add(diff_fo(a->args[i], b->args[i], from, to));
      add(diff_formula(a->sub1, b->sub1, from, to));
      return total;
  }
  return -1;
}

}  // namespace

const char* rule_name(SubRule r) {
  switch (r) {
    case SubRule::ax: return "ax";
    case SubRule::arrow: return "arrow";
    case SubRule::forall_ig: return "forall_ig";
    case SubRule::forall_ig0: return "forall_ig0";
    case SubRule::forall_id: return "forall_id";
    case SubRule::eq: return "eq";
    case SubRule::tr: return "tr";
    case SubRule::mu_d: return "mu_d";
    case SubRule::mu_prime_g: return "mu_prime_g";
    case SubRule::mu_g: return "mu_g";
  }
  return "?";
}

check_error::check_error(std::string path_, std::string reason_,
                         const std::string& rule)
    : std::runtime_error(rule + ": " + reason_ + " (at " +
                         (path_.empty() ? std::string("root") : path_) + ")"),
      path(std::move(path_)),
      reason(std::move(reason_)) {}

SubPtr make_node(SubDerivation n) {
  return std::make_shared<const SubDerivation>(std::move(n));
}

SubPtr ax(FormulaPtr a) {
  SubDerivation n;
  n.rule = SubRule::ax;
  n.lhs = a;
  n.rhs = a;
  return make_node(std::move(n));
}

SubPtr arrow(SubPtr left, SubPtr right) {
  SubDerivation n;
  n.rule = SubRule::arrow;
  n.lhs = Formula::arrow(left->rhs, right->lhs);
  n.rhs = Formula::arrow(left->lhs, right->rhs);
  n.premises = {std::move(left), std::move(right)};
  return make_node(std::move(n));
}

static SubPtr make_ig(SubRule r, FormulaPtr forall_lhs, FoTermPtr g,
                      SubPtr premise) {
  SubDerivation n;
  n.rule = r;
  n.lhs = std::move(forall_lhs);
  n.rhs = premise->rhs;
  n.term_g = std::move(g);
  n.premises = {std::move(premise)};
  return make_node(std::move(n));
}

static SubPtr make_ig(SubRule r, FormulaPtr forall_lhs, SubstSo g,
                      SubPtr premise) {
  SubDerivation n;
  n.rule = r;
  n.lhs = std::move(forall_lhs);
  n.rhs = premise->rhs;
  n.pred_g = std::move(g);
  n.premises = {std::move(premise)};
  return make_node(std::move(n));
}

SubPtr forall_ig(FormulaPtr forall_lhs, FoTermPtr g, SubPtr premise) {
  return make_ig(SubRule::forall_ig, std::move(forall_lhs), std::move(g),
                 std::move(premise));
}

SubPtr forall_ig(FormulaPtr forall_lhs, SubstSo g, SubPtr premise) {
  return make_ig(SubRule::forall_ig, std::move(forall_lhs), std::move(g),
                 std::move(premise));
}

SubPtr forall_ig0(FormulaPtr forall_lhs, FoTermPtr g, SubPtr premise) {
  return make_ig(SubRule::forall_ig0, std::move(forall_lhs), std::move(g),
                 std::move(premise));
}

SubPtr forall_ig0(FormulaPtr forall_lhs, SubstSo g, SubPtr premise) {
  return make_ig(SubRule::forall_ig0, std::move(forall_lhs), std::move(g),
                 std::move(premise));
}

SubPtr forall_id(std::string var, SubPtr premise) {
  SubDerivation n;
  n.rule = SubRule::forall_id;
  n.lhs = premise->lhs;
  n.rhs = so_name(var) ? Formula::forall_so(var, premise->rhs)
                       : Formula::forall_fo(var, premise->rhs);
  n.var = std::move(var);
  n.premises = {std::move(premise)};
  return make_node(std::move(n));
}

SubPtr eq_step(FoTermPtr from, FoTermPtr to, FormulaPtr new_rhs,
               SubPtr premise) {
  SubDerivation n;
  n.rule = SubRule::eq;
  n.lhs = premise->lhs;
  n.rhs = std::move(new_rhs);
  n.eq_from = std::move(from);
  n.eq_to = std::move(to);
  n.premises = {std::move(premise)};
  return make_node(std::move(n));
}

SubPtr tr(SubPtr left, SubPtr right) {
  SubDerivation n;
  n.rule = SubRule::tr;
  n.lhs = left->lhs;
  n.rhs = right->rhs;
  n.premises = {std::move(left), std::move(right)};
  return make_node(std::move(n));
}

SubPtr mu_d(FormulaPtr mu) {
  SubDerivation n;
  n.rule = SubRule::mu_d;
  n.lhs = fml::unfold(mu);
  n.rhs = std::move(mu);
  return make_node(std::move(n));
}

SubPtr mu_prime_g(FormulaPtr mu) {
  SubDerivation n;
  n.rule = SubRule::mu_prime_g;
  n.lhs = mu;
  n.rhs = fml::unfold(mu);
  return make_node(std::move(n));
}

SubPtr mu_g(FormulaPtr mu_lhs, FormulaPtr e, SubPtr premise) {
  SubDerivation n;
  n.rule = SubRule::mu_g;
  FoSubst s;
  for (std::size_t i = 0; i < mu_lhs->params.size(); ++i)
    s[mu_lhs->params[i]] = mu_lhs->args[i];
  n.rhs = fml::subst_fo(e, s);
  n.lhs = std::move(mu_lhs);
  n.mu_e = std::move(e);
  n.premises = {std::move(premise)};
  return make_node(std::move(n));
}

// ---------------------------------------------------------------------------
// Checking

namespace {

struct Checker {
  const fml::EquationSystem& eqs;
  Mode mode;
  std::vector<std::string>* notes;

  [[noreturn]] void fail(const std::string& path, SubRule r,
                         std::string reason) const {
    throw check_error(path, std::move(reason), rule_name(r));
  }

  bool alpha(const FormulaPtr& a, const FormulaPtr& b) const {
    return fml::alpha_eq_formula(a, b);
  }

  void check(const SubPtr& d, const std::string& path) const {
    if (!d) throw check_error(path, "missing node", "?");
    if (!d->lhs || !d->rhs) fail(path, d->rule, "missing conclusion");
    std::size_t want = 0;
    switch (d->rule) {
      case SubRule::ax:
      case SubRule::mu_d:
      case SubRule::mu_prime_g:
        want = 0;
        break;
      case SubRule::arrow:
      case SubRule::tr:
        want = 2;
        break;
      default:
        want = 1;
        break;
    }
    if (d->premises.size() != want)
      fail(path, d->rule,
           "expected " + std::to_string(want) + " premises, found " +
               std::to_string(d->premises.size()));
    for (std::size_t i = 0; i < d->premises.size(); ++i)
      check(d->premises[i], path + "/" + std::to_string(i));

    switch (d->rule) {
      case SubRule::ax:
        if (!alpha(d->lhs, d->rhs)) fail(path, d->rule, "conclusion sides differ");
        return;
      case SubRule::arrow: {
        if (d->lhs->kind != FKind::Arrow)
          fail(path, d->rule, "left side is not an arrow");
        if (d->rhs->kind != FKind::Arrow)
          fail(path, d->rule, "right side is not an arrow");
        const auto& p0 = d->premises[0];
        const auto& p1 = d->premises[1];
        if (!alpha(p0->lhs, d->rhs->sub1))
          fail(path, d->rule, "first premise must start from the right argument");
        if (!alpha(p0->rhs, d->lhs->sub1))
          fail(path, d->rule, "first premise must end at the left argument");
        if (!alpha(p1->lhs, d->lhs->sub2))
          fail(path, d->rule, "second premise must start from the left result");
        if (!alpha(p1->rhs, d->rhs->sub2))
          fail(path, d->rule, "second premise must end at the right result");
        return;
      }
      case SubRule::forall_ig:
      case SubRule::forall_ig0: {
        if (d->rule == SubRule::forall_ig && mode == Mode::zero)
          fail(path, d->rule, "not available in zero mode");
        if (d->lhs->kind != FKind::ForallFo && d->lhs->kind != FKind::ForallSo)
          fail(path, d->rule, "left side is not a quantified formula");
        bool fo_binder = d->lhs->kind == FKind::ForallFo;
        if (d->term_g && d->pred_g)
          fail(path, d->rule, "conflicting instantiation payloads");
        if (fo_binder && !d->term_g)
          fail(path, d->rule, "binder is first-order but the payload is not a term");
        if (!fo_binder && !d->pred_g)
          fail(path, d->rule, "binder is second-order but the payload is a term");
        FormulaPtr inst;
        if (fo_binder) {
          inst = fml::subst_fo(d->lhs->sub1, one(d->lhs->name, d->term_g));
        } else {
          const auto& g = *d->pred_g;
          if (!g.body) fail(path, d->rule, "missing instantiation payload");
          if (d->rule == SubRule::forall_ig0) {
            bool atom = (g.body->kind == FKind::PredVar ||
                         g.body->kind == FKind::PredSym) &&
                        g.body->args.size() == g.params.size();
            if (atom)
              for (std::size_t i = 0; i < g.params.size(); ++i)
                atom = atom && g.body->args[i]->is_var &&
                       g.body->args[i]->name == g.params[i];
            if (!atom)
              fail(path, d->rule,
                   "payload must be a predicate variable or symbol");
          }
          auto ar = fml::occurrence_arity(d->lhs->sub1, d->lhs->name,
                                          PredSort::Var);
          if (ar && *ar != g.params.size())
            fail(path, d->rule, "payload arity differs from the bound variable's");
          inst = fml::subst_so(d->lhs->sub1, d->lhs->name, g);
        }
        const auto& p = d->premises[0];
        if (!alpha(p->lhs, inst))
          fail(path, d->rule, "premise left side is not the instantiated body");
        if (!alpha(p->rhs, d->rhs))
          fail(path, d->rule, "premise right side differs from the conclusion");
        return;
      }
      case SubRule::forall_id: {
        if (d->var.empty()) fail(path, d->rule, "missing generalized variable");
        const auto& p = d->premises[0];
        bool so = so_name(d->var);
        FormulaPtr built = so ? Formula::forall_so(d->var, p->rhs)
                              : Formula::forall_fo(d->var, p->rhs);
        if (!alpha(d->rhs, built))
          fail(path, d->rule, "right side is not the generalization of the premise");
        bool free_left = so ? fml::fv2_contains(d->lhs, d->var, PredSort::Var)
                            : fml::fv_fo(d->lhs).count(d->var) > 0;
        if (free_left)
          fail(path, d->rule, "generalized variable occurs free on the left");
        if (!alpha(d->lhs, p->lhs))
          fail(path, d->rule, "premise left side differs from the conclusion");
        return;
      }
      case SubRule::eq: {
        if (!d->eq_from || !d->eq_to)
          fail(path, d->rule, "missing equation instance");
        const auto& p = d->premises[0];
        if (!alpha(d->lhs, p->lhs))
          fail(path, d->rule, "left side differs from the premise");
        if (!fml::match_equation(d->eq_from, d->eq_to, eqs))
          fail(path, d->rule, "equation instance matches no equation");
        int k = diff_formula(p->rhs, d->rhs, d->eq_from, d->eq_to);
        if (k < 0)
          fail(path, d->rule, "rewrite is not a single-position replacement");
        if (k == 0) fail(path, d->rule, "rewrite changes zero positions");
        if (k > 1) fail(path, d->rule, "rewrite changes more than one position");
        return;
      }
      case SubRule::tr: {
        const auto& p0 = d->premises[0];
        const auto& p1 = d->premises[1];
        if (!alpha(d->lhs, p0->lhs))
          fail(path, d->rule, "left side differs from the first premise");
        if (!alpha(p0->rhs, p1->lhs))
          fail(path, d->rule, "chained premises do not meet");
        if (!alpha(d->rhs, p1->rhs))
          fail(path, d->rule, "right side differs from the second premise");
        return;
      }
      case SubRule::mu_d: {
        if (d->rhs->kind != FKind::Mu)
          fail(path, d->rule, "right side is not a least fixed point");
        if (!alpha(d->lhs, fml::unfold(d->rhs)))
          fail(path, d->rule, "left side is not the unfolding of the right side");
        return;
      }
      case SubRule::mu_prime_g: {
        if (mode == Mode::zero) fail(path, d->rule, "not available in zero mode");
        if (d->lhs->kind != FKind::Mu)
          fail(path, d->rule, "left side is not a least fixed point");
        if (!alpha(d->rhs, fml::unfold(d->lhs)))
          fail(path, d->rule, "right side is not the unfolding of the left side");
        return;
      }
      case SubRule::mu_g: {
        if (!d->mu_e) fail(path, d->rule, "missing target formula");
        if (d->lhs->kind != FKind::Mu)
          fail(path, d->rule, "left side is not a least fixed point");
        const auto& m = d->lhs;
        FormulaPtr body_inst =
            fml::subst_sym(m->sub1, m->name, SubstSo{m->params, d->mu_e});
        const auto& p = d->premises[0];
        if (!alpha(p->lhs, body_inst))
          fail(path, d->rule, "premise left side is not the body instance");
        if (!alpha(p->rhs, d->mu_e))
          fail(path, d->rule, "premise right side differs from the target");
        FoSubst s;
        for (std::size_t i = 0; i < m->params.size(); ++i)
          s[m->params[i]] = m->args[i];
        if (!alpha(d->rhs, fml::subst_fo(d->mu_e, s)))
          fail(path, d->rule, "right side is not the instantiated target");
        if (notes) {
          std::set<std::string> bound;
          bound_fo_names(d->mu_e, bound);
          bool clash = false;
          for (const auto& t : m->args) {
            std::set<std::string> vs;
            names_of_term(t, vs);
            for (const auto& v : vs) clash = clash || bound.count(v) > 0;
          }
          if (clash)
            notes->push_back(std::string("mu_g at ") +
                             (path.empty() ? "root" : path) +
                             ": renamed bound variables while instantiating "
                             "the target");
        }
        return;
      }
    }
  }
};

}  // namespace

std::pair<FormulaPtr, FormulaPtr> check_sub(const SubPtr& d,
                                            const fml::EquationSystem& eqs,
                                            Mode mode,
                                            std::vector<std::string>* notes) {
  Checker c{eqs, mode, notes};
  c.check(d, "");
  return {d->lhs, d->rhs};
}

// ---------------------------------------------------------------------------
// Substitution into derivations

namespace {

struct Payload {
  bool is_fo = true;
  std::string v;
  FoTermPtr t;                      // first-order image
  SubstSo g;                        // second-order image
  PredSort sort = PredSort::Var;

  FormulaPtr on(const FormulaPtr& a) const {
    if (!a) return a;
    if (is_fo) return fml::subst_fo(a, one(v, t));
    return sort == PredSort::Var ? fml::subst_so(a, v, g)
                                 : fml::subst_sym(a, v, g);
  }

  FoTermPtr on_term(const FoTermPtr& u) const {
    if (!u || !is_fo) return u;
    return fml::subst_fo_term(u, one(v, t));
  }

  // Free names the image introduces, split by namespace.
  std::set<std::string> fo_names() const {
    if (is_fo) return fml::fo_vars(t);
    std::set<std::string> s = fml::fv_fo(g.body);
    for (const auto& p : g.params) s.erase(p);
    return s;
  }

  std::set<std::string> pred_names() const {
    if (is_fo) return {};
    std::set<std::string> s = fml::fv2(g.body);
    auto syms = fml::fps(g.body);
    s.insert(syms.begin(), syms.end());
    return s;
  }

  SubstSo on_substso(const SubstSo& h) const {
    if (!h.body) return h;
    if (!is_fo) return SubstSo{h.params, on(h.body)};
    if (std::find(h.params.begin(), h.params.end(), v) != h.params.end())
      return h;
    auto img = fml::fo_vars(t);
    SubstSo out = h;
    for (auto& p : out.params) {
      if (!img.count(p)) continue;
      std::set<std::string> avoid = img;
      auto bf = fml::fv_fo(out.body);
      avoid.insert(bf.begin(), bf.end());
      for (const auto& q : out.params) avoid.insert(q);
      avoid.insert(v);
      std::string p2 = fresh(p, avoid);
      out.body = fml::subst_fo(out.body, one(p, FoTerm::var(p2)));
      p = p2;
    }
    out.body = fml::subst_fo(out.body, one(v, t));
    return out;
  }
};

SubPtr subst_node(const SubPtr& d, const Payload& pl);

// Rename one bound parameter of a mu_g node's left-hand fixed point; q must
// be fresh for the whole subtree.
SubPtr rename_mu_param(const SubPtr& d, const std::string& p,
                       const std::string& q) {
  Payload ren;
  ren.is_fo = true;
  ren.v = p;
  ren.t = FoTerm::var(q);
  SubDerivation n = *d;
  n.premises = {subst_node(d->premises[0], ren)};
  if (d->mu_e) n.mu_e = fml::subst_fo(d->mu_e, one(p, ren.t));
  const auto& m = d->lhs;
  std::vector<std::string> ps = m->params;
  for (auto& x : ps) if (x == p) x = q;
  n.lhs = Formula::mu(m->name, std::move(ps),
                      fml::subst_fo(m->sub1, one(p, ren.t)), m->args);
  return make_node(std::move(n));
}

SubPtr subst_node(const SubPtr& d, const Payload& pl) {
  if (!d) return d;

  if (d->rule == SubRule::forall_id && !d->var.empty() &&
      d->premises.size() == 1) {
    const std::string& ev = d->var;
    bool ev_so = so_name(ev);
    bool same_ns = pl.is_fo ? !ev_so : (ev_so && pl.sort == PredSort::Var);
    // The substituted name is re-bound here: nothing below can mention it
    // freely without the side condition failing, so the subtree stands.
    if (same_ns && ev == pl.v) return d;

    SubPtr prem = d->premises[0];
    std::string var2 = ev;
    bool capture = ev_so ? pl.pred_names().count(ev) > 0
                         : pl.fo_names().count(ev) > 0;
    if (capture) {
      std::set<std::string> fo, preds;
      collect_names(d, fo, preds);
      auto img_fo = pl.fo_names();
      auto img_pred = pl.pred_names();
      fo.insert(img_fo.begin(), img_fo.end());
      preds.insert(img_pred.begin(), img_pred.end());
      std::set<std::string>& avoid = ev_so ? preds : fo;
      avoid.insert(pl.v);
      var2 = fresh(ev, avoid);
      Payload ren;
      if (ev_so) {
        ren.is_fo = false;
        ren.v = ev;
        std::size_t k =
            fml::occurrence_arity(prem->rhs, ev, PredSort::Var).value_or(0);
        std::vector<std::string> qs;
        for (std::size_t i = 0; i < k; ++i) qs.push_back("q" + std::to_string(i + 1));
        ren.g = SubstSo{qs, Formula::pred_var(var2, param_vars(qs))};
        ren.sort = PredSort::Var;
      } else {
        ren.is_fo = true;
        ren.v = ev;
        ren.t = FoTerm::var(var2);
      }
      prem = subst_node(prem, ren);
    }
    prem = subst_node(prem, pl);
    SubDerivation n = *d;
    n.var = var2;
    n.premises = {prem};
    n.lhs = pl.on(d->lhs);
    n.rhs = so_name(var2) ? Formula::forall_so(var2, prem->rhs)
                          : Formula::forall_fo(var2, prem->rhs);
    return make_node(std::move(n));
  }

  if (d->rule == SubRule::mu_g && d->lhs && d->lhs->kind == FKind::Mu &&
      d->premises.size() == 1) {
    const auto& params = d->lhs->params;
    if (pl.is_fo &&
        std::find(params.begin(), params.end(), pl.v) != params.end()) {
      // Bound by the fixed point: only the conclusion's over-terms change.
      SubDerivation n = *d;
      n.lhs = pl.on(d->lhs);
      n.rhs = pl.on(d->rhs);
      return make_node(std::move(n));
    }
    auto img = pl.fo_names();
    std::vector<std::string> clash;
    for (const auto& p : params)
      if (img.count(p)) clash.push_back(p);
    if (!clash.empty()) {
      std::set<std::string> fo, preds;
      collect_names(d, fo, preds);
      fo.insert(img.begin(), img.end());
      if (pl.is_fo) fo.insert(pl.v);
      SubPtr cur = d;
      for (const auto& p : clash) {
        std::string q = fresh(p, fo);
        fo.insert(q);
        cur = rename_mu_param(cur, p, q);
      }
      return subst_node(cur, pl);
    }
  }

  SubDerivation n = *d;
  n.premises.clear();
  for (const auto& p : d->premises) n.premises.push_back(subst_node(p, pl));
  if (d->term_g) n.term_g = pl.on_term(d->term_g);
  if (d->pred_g) n.pred_g = pl.on_substso(*d->pred_g);
  if (d->eq_from) n.eq_from = pl.on_term(d->eq_from);
  if (d->eq_to) n.eq_to = pl.on_term(d->eq_to);
  if (d->mu_e) n.mu_e = pl.on(d->mu_e);
  n.lhs = pl.on(d->lhs);
  n.rhs = pl.on(d->rhs);
  return make_node(std::move(n));
}

// Simultaneous first-order substitution via fresh intermediates.
SubPtr subst_many_fo(SubPtr d, const std::vector<std::string>& vars,
                     const std::vector<FoTermPtr>& ts) {
  bool ident = true;
  for (std::size_t i = 0; i < vars.size(); ++i)
    ident = ident && ts[i]->is_var && ts[i]->name == vars[i];
  if (ident || vars.empty()) return d;
  std::set<std::string> fo, preds;
  collect_names(d, fo, preds);
  for (const auto& t : ts) names_of_term(t, fo);
  for (const auto& v : vars) fo.insert(v);
  std::vector<std::string> qs;
  for (const auto& v : vars) {
    std::string q = fresh(v + "_s", fo);
    fo.insert(q);
    qs.push_back(q);
  }
  for (std::size_t i = 0; i < vars.size(); ++i) {
    Payload pl;
    pl.v = vars[i];
    pl.t = FoTerm::var(qs[i]);
    d = subst_node(d, pl);
  }
  for (std::size_t i = 0; i < vars.size(); ++i) {
    Payload pl;
    pl.v = qs[i];
    pl.t = ts[i];
    d = subst_node(d, pl);
  }
  return d;
}

}  // namespace

SubPtr subst_derivation(const SubPtr& d, const std::string& v,
                        const FoTermPtr& g) {
  Payload pl;
  pl.is_fo = true;
  pl.v = v;
  pl.t = g;
  return subst_node(d, pl);
}

SubPtr subst_derivation(const SubPtr& d, const std::string& x,
                        const SubstSo& g, PredSort sort) {
  Payload pl;
  pl.is_fo = false;
  pl.v = x;
  pl.g = g;
  pl.sort = sort;
  return subst_node(d, pl);
}

// ---------------------------------------------------------------------------
// Monotonicity

namespace {

// Rename binders of all three sorts away from an avoid set, bottom-up.
FormulaPtr freshen_binders(const FormulaPtr& a,
                           const std::set<std::string>& avoid_fo,
                           const std::set<std::string>& avoid_pred) {
  if (!a) return a;
  switch (a->kind) {
    case FKind::Bot:
    case FKind::PredVar:
    case FKind::PredSym:
      return a;
    case FKind::Arrow:
      return Formula::arrow(freshen_binders(a->sub1, avoid_fo, avoid_pred),
                            freshen_binders(a->sub2, avoid_fo, avoid_pred));
    case FKind::ForallFo: {
      FormulaPtr body = freshen_binders(a->sub1, avoid_fo, avoid_pred);
      if (!avoid_fo.count(a->name)) return Formula::forall_fo(a->name, body);
      std::set<std::string> fo = avoid_fo, preds = avoid_pred;
      names_of(body, fo, preds);
      std::string v2 = fresh(a->name, fo);
      return Formula::forall_fo(
          v2, fml::subst_fo(body, one(a->name, FoTerm::var(v2))));
    }
    case FKind::ForallSo: {
      FormulaPtr body = freshen_binders(a->sub1, avoid_fo, avoid_pred);
      if (!avoid_pred.count(a->name)) return Formula::forall_so(a->name, body);
      std::set<std::string> fo = avoid_fo, preds = avoid_pred;
      names_of(body, fo, preds);
      std::string v2 = fresh(a->name, preds);
      std::size_t k =
          fml::occurrence_arity(body, a->name, PredSort::Var).value_or(0);
      std::vector<std::string> qs;
      for (std::size_t i = 0; i < k; ++i) qs.push_back("q" + std::to_string(i + 1));
      return Formula::forall_so(
          v2, fml::subst_so(body, a->name,
                            SubstSo{qs, Formula::pred_var(v2, param_vars(qs))}));
    }
    case FKind::Mu: {
      FormulaPtr body = freshen_binders(a->sub1, avoid_fo, avoid_pred);
      std::set<std::string> fo = avoid_fo, preds = avoid_pred;
      names_of(body, fo, preds);
      std::vector<std::string> ps = a->params;
      for (auto& p : ps) {
        if (!avoid_fo.count(p)) continue;
        std::string p2 = fresh(p, fo);
        fo.insert(p2);
        body = fml::subst_fo(body, one(p, FoTerm::var(p2)));
        p = p2;
      }
      std::string c2 = a->name;
      if (avoid_pred.count(a->name)) {
        c2 = fresh(a->name, preds);
        std::vector<std::string> qs;
        for (std::size_t i = 0; i < ps.size(); ++i)
          qs.push_back("q" + std::to_string(i + 1));
        body = fml::subst_sym(body, a->name,
                              SubstSo{qs, Formula::pred_sym(c2, param_vars(qs))});
      }
      return Formula::mu(c2, ps, body, a->args);
    }
  }
  return a;
}

struct MonoBuilder {
  std::string hole;
  PredSort sort;
  std::vector<std::string> params;
  SubPtr base;  // A ⊆ B with the params free

  // positive: D[A/hole] ⊆ D[B/hole]; negative: D[B/hole] ⊆ D[A/hole].
  SubPtr build(const FormulaPtr& d, bool positive) const {
    if (!fml::fv2_contains(d, hole, sort)) return ax(d);
    switch (d->kind) {
      case FKind::PredVar:
      case FKind::PredSym: {
        if (!positive)
          throw std::invalid_argument("hole occurs positively in the context");
        if (d->args.size() != params.size())
          throw std::invalid_argument("hole arity differs from the parameter list");
        return subst_many_fo(base, params, d->args);
      }
      case FKind::Arrow: {
        SubPtr l = build(d->sub1, !positive);
        SubPtr r = build(d->sub2, positive);
        return arrow(l, r);
      }
      case FKind::ForallFo: {
        SubPtr inner = build(d->sub1, positive);
        FormulaPtr l = Formula::forall_fo(d->name, inner->lhs);
        return forall_id(d->name,
                         forall_ig0(l, FoTerm::var(d->name), inner));
      }
      case FKind::ForallSo: {
        SubPtr inner = build(d->sub1, positive);
        FormulaPtr l = Formula::forall_so(d->name, inner->lhs);
        std::size_t k =
            fml::occurrence_arity(d->sub1, d->name, PredSort::Var).value_or(0);
        std::vector<std::string> qs;
        for (std::size_t i = 0; i < k; ++i)
          qs.push_back("q" + std::to_string(i + 1));
        SubstSo self{qs, Formula::pred_var(d->name, param_vars(qs))};
        return forall_id(d->name, forall_ig0(l, self, inner));
      }
      case FKind::Mu: {
        // Graft the target-side fixed point at the symbol, recurse on the
        // body, and close with mu_g through its unfolding.
        FormulaPtr near = subst_hole(d->sub1, positive);
        FormulaPtr far = subst_hole(d->sub1, !positive);
        FormulaPtr target =
            Formula::mu(d->name, d->params, far, param_vars(d->params));
        FormulaPtr grafted =
            fml::subst_sym(d->sub1, d->name, SubstSo{d->params, target});
        SubPtr prem = tr(build(grafted, positive), mu_d(target));
        FormulaPtr lhs_mu = Formula::mu(d->name, d->params, near, d->args);
        return mu_g(lhs_mu, target, prem);
      }
      default:
        throw std::invalid_argument("hole in an unexpected position");
    }
  }

  // The side of the conclusion a subformula lands on: positive contexts line
  // up with the base's left side, negative with its right.
  FormulaPtr subst_hole(const FormulaPtr& f, bool left_side) const {
    const FormulaPtr& img = left_side ? base->lhs : base->rhs;
    SubstSo s{params, img};
    return sort == PredSort::Var ? fml::subst_so(f, hole, s)
                                 : fml::subst_sym(f, hole, s);
  }
};

SubPtr mono(const FormulaPtr& d, const std::string& hole, PredSort sort,
            const std::vector<std::string>& params, const SubPtr& base,
            bool positive) {
  auto pol = fml::polarity(d, hole, sort);
  if (positive && !pol.first)
    throw std::invalid_argument("hole is not positive in the context");
  if (!positive && !pol.second)
    throw std::invalid_argument("hole is not negative in the context");

  std::set<std::string> fo, preds;
  names_of(base->lhs, fo, preds);
  names_of(base->rhs, fo, preds);
  std::set<std::string> dfo, dpred;
  names_of(d, dfo, dpred);

  // The hole must be untouchable by anything inside the context or the base.
  std::set<std::string> all_pred = preds;
  all_pred.insert(dpred.begin(), dpred.end());
  std::string h = fresh(hole, all_pred);
  FormulaPtr ctx = d;
  if (h != hole) {
    SubstSo ren{params, sort == PredSort::Var
                            ? Formula::pred_var(h, param_vars(params))
                            : Formula::pred_sym(h, param_vars(params))};
    ctx = sort == PredSort::Var ? fml::subst_so(ctx, hole, ren)
                                : fml::subst_sym(ctx, hole, ren);
  }

  // Context binders must not capture anything free in the base conclusion.
  std::set<std::string> avoid_fo = fo;
  for (const auto& p : params) avoid_fo.insert(p);
  std::set<std::string> avoid_pred = preds;
  avoid_pred.insert(h);
  ctx = freshen_binders(ctx, avoid_fo, avoid_pred);

  MonoBuilder mb{h, sort, params, base};
  return mb.build(ctx, positive);
}

}  // namespace

SubPtr mono_pos(const FormulaPtr& d, const std::string& hole, PredSort sort,
                const std::vector<std::string>& params, const SubPtr& base) {
  return mono(d, hole, sort, params, base, true);
}

SubPtr mono_neg(const FormulaPtr& d, const std::string& hole, PredSort sort,
                const std::vector<std::string>& params, const SubPtr& base) {
  return mono(d, hole, sort, params, base, false);
}

// ---------------------------------------------------------------------------
// Strong-unfolding elimination

SubPtr eliminate_mu_prime(const SubPtr& d) {
  if (!d) return d;
  bool changed = false;
  std::vector<SubPtr> ps;
  ps.reserve(d->premises.size());
  for (const auto& p : d->premises) {
    SubPtr e = eliminate_mu_prime(p);
    changed = changed || e != p;
    ps.push_back(std::move(e));
  }
  if (d->rule == SubRule::mu_prime_g && d->lhs && d->lhs->kind == FKind::Mu) {
    const auto& m = d->lhs;
    FormulaPtr m0 = Formula::mu(m->name, m->params, m->sub1,
                                param_vars(m->params));
    FormulaPtr u = fml::unfold(m0);
    SubPtr folded = mu_d(m0);
    SubPtr body_mono =
        mono_pos(m->sub1, m->name, PredSort::Sym, m->params, folded);
    SubDerivation n;
    n.rule = SubRule::mu_g;
    n.premises = {std::move(body_mono)};
    n.mu_e = u;
    n.lhs = d->lhs;
    n.rhs = d->rhs;
    return make_node(std::move(n));
  }
  if (!changed) return d;
  SubDerivation n = *d;
  n.premises = std::move(ps);
  return make_node(std::move(n));
}

// ---------------------------------------------------------------------------
// Gödel lifting

namespace {

struct Lifter {
  const fml::GodelConfig& cfg;

  FormulaPtr star(const FormulaPtr& f, const std::string& path,
                  SubRule r) const {
    if (!f) return f;
    try {
      return fml::godel(f, cfg);
    } catch (const std::exception& ex) {
      throw check_error(path, ex.what(), rule_name(r));
    }
  }

  const fml::GodelEntry& entry(const std::string& x, std::size_t arity,
                               const std::string& path, SubRule r) const {
    try {
      return cfg.entry(x, arity);
    } catch (const std::exception& ex) {
      throw check_error(path, ex.what(), rule_name(r));
    }
  }

  SubPtr lift(const SubPtr& d, const std::string& path) const {
    if (!d) throw check_error(path, "missing node", "?");
    switch (d->rule) {
      case SubRule::forall_ig:
      case SubRule::mu_prime_g:
        throw check_error(path, "not available in zero mode",
                          rule_name(d->rule));
      case SubRule::forall_id:
        if (so_name(d->var) && d->premises.size() == 1)
          return lift_forall_id(d, path);
        break;
      case SubRule::forall_ig0:
        if (d->pred_g && d->lhs && d->lhs->kind == FKind::ForallSo &&
            d->premises.size() == 1)
          return lift_forall_ig0(d, path);
        break;
      default:
        break;
    }
    SubDerivation n = *d;
    n.premises.clear();
    for (std::size_t i = 0; i < d->premises.size(); ++i)
      n.premises.push_back(
          lift(d->premises[i], path + "/" + std::to_string(i)));
    n.lhs = star(d->lhs, path, d->rule);
    n.rhs = star(d->rhs, path, d->rule);
    if (d->mu_e) n.mu_e = star(d->mu_e, path, d->rule);
    return make_node(std::move(n));
  }

  // ∀X on the right fans out into one generalization per element of V_X.
  SubPtr lift_forall_id(const SubPtr& d, const std::string& path) const {
    const FormulaPtr& q = d->rhs;
    std::string x = q && q->kind == FKind::ForallSo ? q->name : d->var;
    FormulaPtr body = q && q->kind == FKind::ForallSo ? q->sub1 : nullptr;
    if (!body)
      throw check_error(path, "right side is not a quantified formula",
                        rule_name(d->rule));
    std::size_t k =
        fml::occurrence_arity(body, x, PredSort::Var).value_or(0);
    const auto& e = entry(x, k, path, d->rule);
    SubPtr cur = lift(d->premises[0], path + "/0");
    FormulaPtr lhs_star = star(d->lhs, path, d->rule);
    FormulaPtr acc = star(body, path, d->rule);
    for (std::size_t i = e.vars.size(); i-- > 0;) {
      acc = Formula::forall_so(e.vars[i], acc);
      SubDerivation n;
      n.rule = SubRule::forall_id;
      n.var = e.vars[i];
      n.lhs = lhs_star;
      n.rhs = acc;
      n.premises = {cur};
      cur = make_node(std::move(n));
    }
    return cur;
  }

  // ∀X on the left: the lifted block instantiates each element of V_X by the
  // matching element of V_Y, which is sound only for uniform entries.
  SubPtr lift_forall_ig0(const SubPtr& d, const std::string& path) const {
    const auto& g = *d->pred_g;
    if (g.body && g.body->kind == FKind::PredSym)
      throw check_error(path, "cannot lift an instantiation by a predicate symbol",
                        rule_name(d->rule));
    if (!g.body || g.body->kind != FKind::PredVar)
      throw check_error(path, "payload must be a predicate variable or symbol",
                        rule_name(d->rule));
    const std::string& x = d->lhs->name;
    const std::string& y = g.body->name;
    std::size_t k = g.params.size();
    const auto& ex = entry(x, k, path, d->rule);
    const auto& ey = entry(y, k, path, d->rule);
    if (ex.vars.size() != ey.vars.size())
      throw check_error(path, "entries for " + x + " and " + y +
                                  " differ in size",
                        rule_name(d->rule));
    // Uniformity: renaming V_X to V_Y inside F_X must give F_Y.
    FormulaPtr f = ex.body;
    if (ex.params != ey.params) {
      FoSubst ren;
      for (std::size_t i = 0; i < ex.params.size(); ++i)
        ren[ex.params[i]] = FoTerm::var(ey.params[i]);
      f = fml::subst_fo(f, ren);
    }
    for (std::size_t i = 0; i < ex.vars.size(); ++i) {
      std::vector<std::string> qs;
      for (std::size_t j = 0; j < k; ++j)
        qs.push_back("q" + std::to_string(j + 1));
      f = fml::subst_so(f, ex.vars[i],
                        SubstSo{qs, Formula::pred_var(ey.vars[i], param_vars(qs))});
    }
    if (!fml::alpha_eq_formula(f, ey.body))
      throw check_error(path, "entries for " + x + " and " + y +
                                  " are not uniform",
                        rule_name(d->rule));

    SubPtr cur = lift(d->premises[0], path + "/0");
    FormulaPtr rhs_star = star(d->rhs, path, d->rule);
    std::vector<FormulaPtr> ls;
    ls.push_back(star(d->lhs, path, d->rule));
    std::vector<SubstSo> payloads;
    for (std::size_t i = 0; i < ex.vars.size(); ++i) {
      const FormulaPtr& l = ls.back();
      if (!l || l->kind != FKind::ForallSo)
        throw check_error(path, "lifted left side lost its quantifier block",
                          rule_name(d->rule));
      std::vector<std::string> qs;
      for (std::size_t j = 0; j < k; ++j)
        qs.push_back("q" + std::to_string(j + 1));
      SubstSo pay{qs, Formula::pred_var(ey.vars[i], param_vars(qs))};
      payloads.push_back(pay);
      ls.push_back(fml::subst_so(l->sub1, l->name, pay));
    }
    for (std::size_t i = ex.vars.size(); i-- > 0;) {
      SubDerivation n;
      n.rule = SubRule::forall_ig0;
      n.lhs = ls[i];
      n.rhs = rhs_star;
      n.pred_g = payloads[i];
      n.premises = {cur};
      cur = make_node(std::move(n));
    }
    return cur;
  }
};

}  // namespace

SubPtr godel_lift(const SubPtr& d, const fml::GodelConfig& cfg) {
  Lifter l{cfg};
  return l.lift(d, "");
}

// ---------------------------------------------------------------------------
// Representative witnesses

SubPtr from_rep(const FormulaPtr& a) {
  if (!a) throw std::invalid_argument("not an arrow type");
  switch (a->kind) {
    case FKind::Arrow:
      return ax(a);
    case FKind::ForallFo: {
      SubPtr inner = from_rep(a->sub1);
      FormulaPtr l = Formula::forall_fo(a->name, inner->lhs);
      return forall_id(a->name, forall_ig0(l, FoTerm::var(a->name), inner));
    }
    case FKind::ForallSo: {
      SubPtr inner = from_rep(a->sub1);
      FormulaPtr l = Formula::forall_so(a->name, inner->lhs);
      std::size_t k =
          fml::occurrence_arity(inner->lhs, a->name, PredSort::Var).value_or(0);
      std::vector<std::string> qs;
      for (std::size_t i = 0; i < k; ++i) qs.push_back("q" + std::to_string(i + 1));
      SubstSo self{qs, Formula::pred_var(a->name, param_vars(qs))};
      return forall_id(a->name, forall_ig0(l, self, inner));
    }
    case FKind::Mu: {
      FormulaPtr m0 =
          Formula::mu(a->name, a->params, a->sub1, param_vars(a->params));
      SubPtr body = from_rep(a->sub1);
      SubPtr grafted =
          subst_derivation(body, a->name, SubstSo{a->params, m0}, PredSort::Sym);
      grafted = subst_many_fo(grafted, a->params, a->args);
      return tr(grafted, mu_d(a));
    }
    default:
      throw std::invalid_argument("not an arrow type");
  }
}

SubPtr to_rep(const FormulaPtr& a) {
  if (!a) throw std::invalid_argument("not an arrow type");
  switch (a->kind) {
    case FKind::Arrow:
      return ax(a);
    case FKind::ForallFo: {
      SubPtr inner = to_rep(a->sub1);
      FormulaPtr l = Formula::forall_fo(a->name, inner->lhs);
      return forall_id(a->name, forall_ig0(l, FoTerm::var(a->name), inner));
    }
    case FKind::ForallSo: {
      SubPtr inner = to_rep(a->sub1);
      FormulaPtr l = Formula::forall_so(a->name, inner->lhs);
      std::size_t k =
          fml::occurrence_arity(inner->lhs, a->name, PredSort::Var).value_or(0);
      std::vector<std::string> qs;
      for (std::size_t i = 0; i < k; ++i) qs.push_back("q" + std::to_string(i + 1));
      SubstSo self{qs, Formula::pred_var(a->name, param_vars(qs))};
      return forall_id(a->name, forall_ig0(l, self, inner));
    }
    case FKind::Mu: {
      FormulaPtr repb = fml::rep_formula(a->sub1);
      FormulaPtr m0 =
          Formula::mu(a->name, a->params, a->sub1, param_vars(a->params));
      FormulaPtr r0 = fml::subst_sym(repb, a->name, SubstSo{a->params, m0});
      SubPtr up = subst_derivation(to_rep(a->sub1), a->name,
                                   SubstSo{a->params, r0}, PredSort::Sym);
      SubPtr down_m0 =
          tr(subst_derivation(from_rep(a->sub1), a->name,
                              SubstSo{a->params, m0}, PredSort::Sym),
             mu_d(m0));
      SubPtr closing =
          mono_pos(repb, a->name, PredSort::Sym, a->params, down_m0);
      return mu_g(a, r0, tr(up, closing));
    }
    default:
      throw std::invalid_argument("not an arrow type");
  }
}

int rewrite_positions(const FormulaPtr& a, const FormulaPtr& b,
                      const FoTermPtr& from, const FoTermPtr& to) {
  return diff_formula(a, b, from, to);
}

// ---------------------------------------------------------------------------
// File format

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.emplace_back(text.substr(start));
      break;
    }
    lines.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

[[noreturn]] void line_error(const std::string& msg, std::size_t line_no) {
  throw fml::parse_error("line " + std::to_string(line_no) + ": " + msg,
                         line_no);
}

std::optional<SubRule> rule_from_name(const std::string& s) {
  static const std::pair<const char*, SubRule> table[] = {
      {"ax", SubRule::ax},
      {"arrow", SubRule::arrow},
      {"forall_ig", SubRule::forall_ig},
      {"forall_ig0", SubRule::forall_ig0},
      {"forall_id", SubRule::forall_id},
      {"eq", SubRule::eq},
      {"tr", SubRule::tr},
      {"mu_d", SubRule::mu_d},
      {"mu_prime_g", SubRule::mu_prime_g},
      {"mu_g", SubRule::mu_g},
  };
  for (const auto& [name, r] : table)
    if (s == name) return r;
  return std::nullopt;
}

FormulaPtr parse_formula_at(const std::string& src, const fml::Signature& sig,
                            std::size_t line_no) {
  try {
    return fml::parse_formula(src, sig);
  } catch (const fml::parse_error& e) {
    line_error(e.what(), line_no);
  }
}

FoTermPtr parse_term_at(const std::string& src, const fml::Signature& sig,
                        std::size_t line_no) {
  try {
    return fml::parse_fo_term(src, sig);
  } catch (const fml::parse_error& e) {
    line_error(e.what(), line_no);
  }
}

}  // namespace

SubPtr parse_sub_node(const std::vector<std::string>& lines, std::size_t& i,
                      const fml::Signature& sig) {
  while (i < lines.size() && trim(lines[i]).empty()) ++i;
  if (i >= lines.size()) line_error("expected a derivation node", lines.size());
  std::string head = trim(lines[i]);
  if (head.size() < 2 || head.substr(head.size() - 1) != "{")
    line_error("expected 'rule {'", i + 1);
  std::string rname = trim(head.substr(0, head.size() - 1));
  auto r = rule_from_name(rname);
  if (!r) line_error("unknown rule '" + rname + "'", i + 1);
  ++i;

  SubDerivation node;
  node.rule = *r;
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
    if (s.back() == '{') {
      node.premises.push_back(parse_sub_node(lines, i, sig));
      continue;
    }
    std::size_t colon = s.find(':');
    if (colon == std::string::npos) line_error("expected 'key: value'", i + 1);
    std::string key = trim(s.substr(0, colon));
    std::string val = trim(s.substr(colon + 1));
    std::size_t line_no = i + 1;
    if (key == "left") {
      node.lhs = parse_formula_at(val, sig, line_no);
    } else if (key == "right") {
      node.rhs = parse_formula_at(val, sig, line_no);
    } else if (key == "var") {
      node.var = val;
    } else if (key == "term") {
      node.term_g = parse_term_at(val, sig, line_no);
    } else if (key == "from") {
      node.eq_from = parse_term_at(val, sig, line_no);
    } else if (key == "to") {
      node.eq_to = parse_term_at(val, sig, line_no);
    } else if (key == "e") {
      node.mu_e = parse_formula_at(val, sig, line_no);
    } else if (key == "pred") {
      std::vector<std::string> params;
      std::size_t pos = 0;
      bool closed = false;
      while (pos < val.size()) {
        while (pos < val.size() && std::isspace(static_cast<unsigned char>(val[pos])))
          ++pos;
        std::size_t start = pos;
        while (pos < val.size() &&
               !std::isspace(static_cast<unsigned char>(val[pos])))
          ++pos;
        std::string tok = val.substr(start, pos - start);
        if (tok == ".") {
          node.pred_g = SubstSo{
              params, parse_formula_at(trim(val.substr(pos)), sig, line_no)};
          closed = true;
          break;
        }
        if (tok.empty()) break;
        params.push_back(tok);
      }
      if (!closed) line_error("payload needs '.' before its body", line_no);
    } else {
      line_error("unknown field '" + key + "'", line_no);
    }
    ++i;
  }
  return make_node(std::move(node));
}

void print_sub_node(std::string& out, const SubPtr& d, int indent) {
  std::string pad(static_cast<std::size_t>(indent), ' ');
  std::string fpad(static_cast<std::size_t>(indent) + 2, ' ');
  out += pad;
  out += rule_name(d->rule);
  out += " {\n";
  out += fpad + "left: " + fml::print_formula(d->lhs) + "\n";
  out += fpad + "right: " + fml::print_formula(d->rhs) + "\n";
  if (!d->var.empty()) out += fpad + "var: " + d->var + "\n";
  if (d->term_g) out += fpad + "term: " + fml::print_fo_term(d->term_g) + "\n";
  if (d->pred_g) {
    out += fpad + "pred:";
    for (const auto& p : d->pred_g->params) out += " " + p;
    out += " . " + fml::print_formula(d->pred_g->body) + "\n";
  }
  if (d->eq_from) out += fpad + "from: " + fml::print_fo_term(d->eq_from) + "\n";
  if (d->eq_to) out += fpad + "to: " + fml::print_fo_term(d->eq_to) + "\n";
  if (d->mu_e) out += fpad + "e: " + fml::print_formula(d->mu_e) + "\n";
  for (const auto& p : d->premises) print_sub_node(out, p, indent + 2);
  out += pad + "}\n";
}

SubFile parse_sub_file(std::string_view text) {
  SubFile f;
  auto lines = split_lines(text);
  std::size_t i = 0;
  while (i < lines.size()) {
    std::string s = trim(lines[i]);
    if (s.empty()) {
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
      f.eqs.emplace_back(parse_term_at(trim(rest.substr(0, sep)), f.sig, i + 1),
                         parse_term_at(trim(rest.substr(sep + 3)), f.sig, i + 1));
      ++i;
      continue;
    }
    break;
  }
  f.root = parse_sub_node(lines, i, f.sig);
  for (; i < lines.size(); ++i)
    if (!trim(lines[i]).empty()) line_error("trailing content", i + 1);
  return f;
}

std::string print_sub_file(const SubFile& f) {
  std::string out = fml::print_signature(f.sig);
  for (const auto& [l, r] : f.eqs)
    out += "equation " + fml::print_fo_term(l) + " = " + fml::print_fo_term(r) +
           "\n";
  if (!out.empty()) out += "\n";
  print_sub_node(out, f.root, 0);
  return out;
}

}  // namespace ttr::sub
