#include "ttr/formula.hpp"

#include <algorithm>
#include <cstdint>
#include <cctype>
#include <sstream>

namespace ttr::fml {

// ---------------------------------------------------------------------------
// First-order terms

FoTermPtr FoTerm::var(std::string name) {
  auto t = std::make_shared<FoTerm>();
  t->is_var = true;
  t->name = std::move(name);
  return t;
}

FoTermPtr FoTerm::fn(std::string name, std::vector<FoTermPtr> args) {
  auto t = std::make_shared<FoTerm>();
  t->is_var = false;
  t->name = std::move(name);
  t->args = std::move(args);
  return t;
}

bool fo_equal(const FoTermPtr& a, const FoTermPtr& b) {
  if (a == b) return true;
  if (a->is_var != b->is_var || a->name != b->name) return false;
  if (a->args.size() != b->args.size()) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!fo_equal(a->args[i], b->args[i])) return false;
  return true;
}

static void fo_vars_into(const FoTermPtr& t, std::set<std::string>& out) {
  if (t->is_var) {
    out.insert(t->name);
    return;
  }
  for (const auto& a : t->args) fo_vars_into(a, out);
}

std::set<std::string> fo_vars(const FoTermPtr& t) {
  std::set<std::string> out;
  fo_vars_into(t, out);
  return out;
}

FoTermPtr subst_fo_term(const FoTermPtr& t, const FoSubst& s) {
  if (t->is_var) {
    auto it = s.find(t->name);
    return it == s.end() ? t : it->second;
  }
  if (t->args.empty()) return t;
  std::vector<FoTermPtr> args;
  args.reserve(t->args.size());
  for (const auto& a : t->args) args.push_back(subst_fo_term(a, s));
  return FoTerm::fn(t->name, std::move(args));
}

// ---------------------------------------------------------------------------
// Formula constructors

static std::shared_ptr<Formula> make(FKind kind) {
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  return f;
}

FormulaPtr Formula::bot() { return make(FKind::Bot); }

FormulaPtr Formula::pred_var(std::string name, std::vector<FoTermPtr> args) {
  auto f = make(FKind::PredVar);
  f->name = std::move(name);
  f->args = std::move(args);
  return f;
}

FormulaPtr Formula::pred_sym(std::string name, std::vector<FoTermPtr> args) {
  auto f = make(FKind::PredSym);
  f->name = std::move(name);
  f->args = std::move(args);
  return f;
}

FormulaPtr Formula::arrow(FormulaPtr left, FormulaPtr right) {
  auto f = make(FKind::Arrow);
  f->sub1 = std::move(left);
  f->sub2 = std::move(right);
  return f;
}

FormulaPtr Formula::forall_fo(std::string var, FormulaPtr body) {
  auto f = make(FKind::ForallFo);
  f->name = std::move(var);
  f->sub1 = std::move(body);
  return f;
}

FormulaPtr Formula::forall_so(std::string var, FormulaPtr body) {
  auto f = make(FKind::ForallSo);
  f->name = std::move(var);
  f->sub1 = std::move(body);
  return f;
}

FormulaPtr neg(FormulaPtr a) { return Formula::arrow(std::move(a), Formula::bot()); }

FormulaPtr Formula::mu(std::string sym, std::vector<std::string> params,
                       FormulaPtr body, std::vector<FoTermPtr> over) {
  if (params.size() != over.size())
    throw std::invalid_argument("mu: parameter and over-term counts differ");
  std::set<std::string> distinct(params.begin(), params.end());
  if (distinct.size() != params.size())
    throw std::invalid_argument("mu: duplicate parameter names");
  auto arity = occurrence_arity(body, sym, PredSort::Sym);
  if (!arity.has_value())
    throw std::invalid_argument("mu: symbol " + sym + " does not appear in the body");
  if (*arity != params.size())
    throw std::invalid_argument("mu: symbol " + sym + " used at the wrong arity");
  auto pol = polarity(body, sym, PredSort::Sym);
  if (!pol.first)
    throw std::invalid_argument("mu: symbol " + sym + " occurs negatively in the body");
  auto f = make(FKind::Mu);
  f->name = std::move(sym);
  f->params = std::move(params);
  f->sub1 = std::move(body);
  f->args = std::move(over);
  return f;
}

// ---------------------------------------------------------------------------
// Alpha equality and hashing

namespace {

// Scope stacks per (sort tag, name); values are binder levels.
struct NameEnv {
  std::map<std::pair<char, std::string>, std::vector<int>> scopes;
  int depth = 0;

  void push(char sort, const std::string& name) {
    scopes[{sort, name}].push_back(depth++);
  }
  void pop(char sort, const std::string& name) {
    auto& v = scopes[{sort, name}];
    v.pop_back();
    --depth;
  }
  // -1 when free.
  int resolve(char sort, const std::string& name) const {
    auto it = scopes.find({sort, name});
    if (it == scopes.end() || it->second.empty()) return -1;
    return it->second.back();
  }
};

bool alpha_fo(const FoTermPtr& a, const FoTermPtr& b, const NameEnv& ea,
              const NameEnv& eb) {
  if (a->is_var != b->is_var) return false;
  if (a->is_var) {
    int la = ea.resolve('x', a->name);
    int lb = eb.resolve('x', b->name);
    if (la != lb) return false;
    return la >= 0 || a->name == b->name;
  }
  if (a->name != b->name || a->args.size() != b->args.size()) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!alpha_fo(a->args[i], b->args[i], ea, eb)) return false;
  return true;
}

bool alpha_atom(char sort, const Formula& a, const Formula& b, const NameEnv& ea,
                const NameEnv& eb) {
  int la = ea.resolve(sort, a.name);
  int lb = eb.resolve(sort, b.name);
  if (la != lb) return false;
  if (la < 0 && a.name != b.name) return false;
  if (a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!alpha_fo(a.args[i], b.args[i], ea, eb)) return false;
  return true;
}

bool alpha_rec(const FormulaPtr& a, const FormulaPtr& b, NameEnv& ea, NameEnv& eb) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case FKind::Bot:
      return true;
    case FKind::PredVar:
      return alpha_atom('X', *a, *b, ea, eb);
    case FKind::PredSym:
      return alpha_atom('C', *a, *b, ea, eb);
    case FKind::Arrow:
      return alpha_rec(a->sub1, b->sub1, ea, eb) && alpha_rec(a->sub2, b->sub2, ea, eb);
    case FKind::ForallFo:
    case FKind::ForallSo: {
      char sort = a->kind == FKind::ForallFo ? 'x' : 'X';
      ea.push(sort, a->name);
      eb.push(sort, b->name);
      bool ok = alpha_rec(a->sub1, b->sub1, ea, eb);
      ea.pop(sort, a->name);
      eb.pop(sort, b->name);
      return ok;
    }
    case FKind::Mu: {
      if (a->params.size() != b->params.size() || a->args.size() != b->args.size())
        return false;
      for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!alpha_fo(a->args[i], b->args[i], ea, eb)) return false;
      ea.push('C', a->name);
      eb.push('C', b->name);
      for (std::size_t i = 0; i < a->params.size(); ++i) {
        ea.push('x', a->params[i]);
        eb.push('x', b->params[i]);
      }
      bool ok = alpha_rec(a->sub1, b->sub1, ea, eb);
      for (std::size_t i = a->params.size(); i-- > 0;) {
        ea.pop('x', a->params[i]);
        eb.pop('x', b->params[i]);
      }
      ea.pop('C', a->name);
      eb.pop('C', b->name);
      return ok;
    }
  }
  return false;
}

void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

std::size_t hash_fo(const FoTermPtr& t, const NameEnv& env) {
  std::size_t h = t->is_var ? 0x51 : 0x52;
  if (t->is_var) {
    int lv = env.resolve('x', t->name);
    if (lv >= 0)
      hash_combine(h, static_cast<std::size_t>(lv) + 1);
    else
      hash_combine(h, std::hash<std::string>{}(t->name));
    return h;
  }
  hash_combine(h, std::hash<std::string>{}(t->name));
  for (const auto& a : t->args) hash_combine(h, hash_fo(a, env));
  return h;
}

std::size_t hash_rec(const FormulaPtr& a, NameEnv& env) {
  std::size_t h = static_cast<std::size_t>(a->kind) * 0x9e3779b9ULL + 0x61;
  switch (a->kind) {
    case FKind::Bot:
      break;
    case FKind::PredVar:
    case FKind::PredSym: {
      char sort = a->kind == FKind::PredVar ? 'X' : 'C';
      int lv = env.resolve(sort, a->name);
      if (lv >= 0)
        hash_combine(h, static_cast<std::size_t>(lv) + 1);
      else
        hash_combine(h, std::hash<std::string>{}(a->name));
      for (const auto& t : a->args) hash_combine(h, hash_fo(t, env));
      break;
    }
    case FKind::Arrow:
      hash_combine(h, hash_rec(a->sub1, env));
      hash_combine(h, hash_rec(a->sub2, env));
      break;
    case FKind::ForallFo:
    case FKind::ForallSo: {
      char sort = a->kind == FKind::ForallFo ? 'x' : 'X';
      env.push(sort, a->name);
      hash_combine(h, hash_rec(a->sub1, env));
      env.pop(sort, a->name);
      break;
    }
    case FKind::Mu: {
      for (const auto& t : a->args) hash_combine(h, hash_fo(t, env));
      env.push('C', a->name);
      for (const auto& p : a->params) env.push('x', p);
      hash_combine(h, a->params.size());
      hash_combine(h, hash_rec(a->sub1, env));
      for (std::size_t i = a->params.size(); i-- > 0;) env.pop('x', a->params[i]);
      env.pop('C', a->name);
      break;
    }
  }
  return h;
}

}  // namespace

bool alpha_eq_formula(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  NameEnv ea, eb;
  return alpha_rec(a, b, ea, eb);
}

std::size_t formula_hash(const FormulaPtr& a) {
  NameEnv env;
  return hash_rec(a, env);
}

// ---------------------------------------------------------------------------
// Free names

namespace {

enum class NameSort { Fo, Var, Sym };

void free_names(const FormulaPtr& a, NameSort want, std::set<std::string>& bound,
                std::set<std::string>& out) {
  auto add_fo_args = [&](const std::vector<FoTermPtr>& args) {
    if (want != NameSort::Fo) return;
    for (const auto& t : args)
      for (const auto& v : fo_vars(t))
        if (!bound.count(v)) out.insert(v);
  };
  switch (a->kind) {
    case FKind::Bot:
      break;
    case FKind::PredVar:
      if (want == NameSort::Var && !bound.count(a->name)) out.insert(a->name);
      add_fo_args(a->args);
      break;
    case FKind::PredSym:
      if (want == NameSort::Sym && !bound.count(a->name)) out.insert(a->name);
      add_fo_args(a->args);
      break;
    case FKind::Arrow:
      free_names(a->sub1, want, bound, out);
      free_names(a->sub2, want, bound, out);
      break;
    case FKind::ForallFo:
    case FKind::ForallSo: {
      NameSort binds = a->kind == FKind::ForallFo ? NameSort::Fo : NameSort::Var;
      bool shadow = binds == want && !bound.count(a->name);
      if (shadow) bound.insert(a->name);
      free_names(a->sub1, want, bound, out);
      if (shadow) bound.erase(a->name);
      break;
    }
    case FKind::Mu: {
      add_fo_args(a->args);
      std::vector<std::string> added;
      if (want == NameSort::Sym && !bound.count(a->name)) {
        bound.insert(a->name);
        added.push_back(a->name);
      }
      if (want == NameSort::Fo)
        for (const auto& p : a->params)
          if (!bound.count(p)) {
            bound.insert(p);
            added.push_back(p);
          }
      free_names(a->sub1, want, bound, out);
      for (const auto& n : added) bound.erase(n);
      break;
    }
  }
}

std::set<std::string> free_of(const FormulaPtr& a, NameSort want) {
  std::set<std::string> bound, out;
  free_names(a, want, bound, out);
  return out;
}

}  // namespace

std::set<std::string> fv_fo(const FormulaPtr& a) { return free_of(a, NameSort::Fo); }
std::set<std::string> fv2(const FormulaPtr& a) { return free_of(a, NameSort::Var); }
std::set<std::string> fps(const FormulaPtr& a) { return free_of(a, NameSort::Sym); }

bool fv2_contains(const FormulaPtr& a, std::string_view name, PredSort sort) {
  auto s = free_of(a, sort == PredSort::Var ? NameSort::Var : NameSort::Sym);
  return s.count(std::string(name)) > 0;
}

namespace {

void arity_scan(const FormulaPtr& a, std::string_view name, NameSort target_sort,
                int shadow, std::optional<std::size_t>& found) {
  switch (a->kind) {
    case FKind::Bot:
      break;
    case FKind::PredVar:
    case FKind::PredSym: {
      NameSort sort = a->kind == FKind::PredVar ? NameSort::Var : NameSort::Sym;
      if (sort == target_sort && shadow == 0 && a->name == name) {
        if (found.has_value() && *found != a->args.size())
          throw std::invalid_argument("predicate " + std::string(name) +
                                      " used at mixed arities");
        found = a->args.size();
      }
      break;
    }
    case FKind::Arrow:
      arity_scan(a->sub1, name, target_sort, shadow, found);
      arity_scan(a->sub2, name, target_sort, shadow, found);
      break;
    case FKind::ForallFo:
      arity_scan(a->sub1, name, target_sort, shadow, found);
      break;
    case FKind::ForallSo:
      arity_scan(a->sub1, name, target_sort,
                 shadow + (target_sort == NameSort::Var && a->name == name ? 1 : 0),
                 found);
      break;
    case FKind::Mu:
      arity_scan(a->sub1, name, target_sort,
                 shadow + (target_sort == NameSort::Sym && a->name == name ? 1 : 0),
                 found);
      break;
  }
}

}  // namespace

std::optional<std::size_t> occurrence_arity(const FormulaPtr& a, std::string_view name,
                                            PredSort sort) {
  std::optional<std::size_t> found;
  arity_scan(a, name, sort == PredSort::Var ? NameSort::Var : NameSort::Sym, 0, found);
  return found;
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  std::string n = base;
  while (avoid.count(n)) n += "'";
  return n;
}

}  // namespace

FormulaPtr subst_fo(const FormulaPtr& a, const FoSubst& s) {
  if (s.empty()) return a;
  auto map_args = [&](const std::vector<FoTermPtr>& args) {
    std::vector<FoTermPtr> out;
    out.reserve(args.size());
    for (const auto& t : args) out.push_back(subst_fo_term(t, s));
    return out;
  };
  switch (a->kind) {
    case FKind::Bot:
      return a;
    case FKind::PredVar:
      return Formula::pred_var(a->name, map_args(a->args));
    case FKind::PredSym:
      return Formula::pred_sym(a->name, map_args(a->args));
    case FKind::Arrow:
      return Formula::arrow(subst_fo(a->sub1, s), subst_fo(a->sub2, s));
    case FKind::ForallSo:
      return Formula::forall_so(a->name, subst_fo(a->sub1, s));
    case FKind::ForallFo: {
      FoSubst inner = s;
      inner.erase(a->name);
      if (inner.empty()) return a;
      std::set<std::string> payload_fvs;
      for (const auto& [k, t] : inner) {
        (void)k;
        for (const auto& v : fo_vars(t)) payload_fvs.insert(v);
      }
      std::string binder = a->name;
      FormulaPtr body = a->sub1;
      if (payload_fvs.count(binder)) {
        std::set<std::string> avoid = payload_fvs;
        for (const auto& v : fv_fo(body)) avoid.insert(v);
        for (const auto& [k, t] : inner) {
          (void)t;
          avoid.insert(k);
        }
        std::string renamed = fresh_name(binder, avoid);
        body = subst_fo(body, {{binder, FoTerm::var(renamed)}});
        binder = renamed;
      }
      return Formula::forall_fo(binder, subst_fo(body, inner));
    }
    case FKind::Mu: {
      auto over = map_args(a->args);
      FoSubst inner = s;
      for (const auto& p : a->params) inner.erase(p);
      if (inner.empty()) return Formula::mu(a->name, a->params, a->sub1, std::move(over));
      std::set<std::string> payload_fvs;
      for (const auto& [k, t] : inner) {
        (void)k;
        for (const auto& v : fo_vars(t)) payload_fvs.insert(v);
      }
      std::vector<std::string> params = a->params;
      FormulaPtr body = a->sub1;
      for (auto& p : params) {
        if (!payload_fvs.count(p)) continue;
        std::set<std::string> avoid = payload_fvs;
        for (const auto& v : fv_fo(body)) avoid.insert(v);
        for (const auto& q : params) avoid.insert(q);
        for (const auto& [k, t] : inner) {
          (void)t;
          avoid.insert(k);
        }
        std::string renamed = fresh_name(p, avoid);
        body = subst_fo(body, {{p, FoTerm::var(renamed)}});
        p = renamed;
      }
      return Formula::mu(a->name, std::move(params), subst_fo(body, inner),
                         std::move(over));
    }
  }
  return a;
}

namespace {

// Shared second-order substitution over either predicate sort.
FormulaPtr subst_pred(const FormulaPtr& a, NameSort sort, std::string_view target,
                      const SubstSo& g) {
  auto splice = [&](const std::vector<FoTermPtr>& args) {
    if (args.size() != g.params.size())
      throw std::invalid_argument("substitution arity mismatch for " +
                                  std::string(target));
    FoSubst s;
    for (std::size_t i = 0; i < args.size(); ++i) s[g.params[i]] = args[i];
    return subst_fo(g.body, s);
  };
  switch (a->kind) {
    case FKind::Bot:
      return a;
    case FKind::PredVar:
      if (sort == NameSort::Var && a->name == target) return splice(a->args);
      return a;
    case FKind::PredSym:
      if (sort == NameSort::Sym && a->name == target) return splice(a->args);
      return a;
    case FKind::Arrow:
      return Formula::arrow(subst_pred(a->sub1, sort, target, g),
                            subst_pred(a->sub2, sort, target, g));
    case FKind::ForallFo: {
      std::set<std::string> payload_fo = fv_fo(g.body);
      for (const auto& p : g.params) payload_fo.erase(p);
      std::string binder = a->name;
      FormulaPtr body = a->sub1;
      if (payload_fo.count(binder)) {
        std::set<std::string> avoid = payload_fo;
        for (const auto& v : fv_fo(body)) avoid.insert(v);
        std::string renamed = fresh_name(binder, avoid);
        body = subst_fo(body, {{binder, FoTerm::var(renamed)}});
        binder = renamed;
      }
      return Formula::forall_fo(binder, subst_pred(body, sort, target, g));
    }
    case FKind::ForallSo: {
      if (sort == NameSort::Var && a->name == target) return a;
      std::string binder = a->name;
      FormulaPtr body = a->sub1;
      if (fv2(g.body).count(binder)) {
        std::set<std::string> avoid = fv2(g.body);
        for (const auto& v : fv2(body)) avoid.insert(v);
        avoid.insert(std::string(target));
        std::string renamed = fresh_name(binder, avoid);
        auto arity = occurrence_arity(body, binder, PredSort::Var);
        if (arity.has_value()) {
          std::vector<std::string> ps;
          std::vector<FoTermPtr> vs;
          for (std::size_t i = 0; i < *arity; ++i) {
            ps.push_back("q" + std::to_string(i + 1));
            vs.push_back(FoTerm::var(ps.back()));
          }
          body = subst_pred(body, NameSort::Var, binder,
                            SubstSo{ps, Formula::pred_var(renamed, vs)});
        }
        binder = renamed;
      }
      return Formula::forall_so(binder, subst_pred(body, sort, target, g));
    }
    case FKind::Mu: {
      if (sort == NameSort::Sym && a->name == target) return a;
      std::string binder = a->name;
      std::vector<std::string> params = a->params;
      FormulaPtr body = a->sub1;
      if (fps(g.body).count(binder)) {
        std::set<std::string> avoid = fps(g.body);
        for (const auto& v : fps(body)) avoid.insert(v);
        avoid.insert(std::string(target));
        std::string renamed = fresh_name(binder, avoid);
        std::vector<std::string> ps;
        std::vector<FoTermPtr> vs;
        for (std::size_t i = 0; i < params.size(); ++i) {
          ps.push_back("q" + std::to_string(i + 1));
          vs.push_back(FoTerm::var(ps.back()));
        }
        body = subst_pred(body, NameSort::Sym, binder,
                          SubstSo{ps, Formula::pred_sym(renamed, vs)});
        binder = renamed;
      }
      std::set<std::string> payload_fo = fv_fo(g.body);
      for (const auto& p : g.params) payload_fo.erase(p);
      for (auto& p : params) {
        if (!payload_fo.count(p)) continue;
        std::set<std::string> avoid = payload_fo;
        for (const auto& v : fv_fo(body)) avoid.insert(v);
        for (const auto& q : params) avoid.insert(q);
        std::string renamed = fresh_name(p, avoid);
        body = subst_fo(body, {{p, FoTerm::var(renamed)}});
        p = renamed;
      }
      return Formula::mu(binder, std::move(params),
                         subst_pred(body, sort, target, g), a->args);
    }
  }
  return a;
}

}  // namespace

FormulaPtr subst_so(const FormulaPtr& a, std::string_view x, const SubstSo& g) {
  return subst_pred(a, NameSort::Var, x, g);
}

FormulaPtr subst_sym(const FormulaPtr& a, std::string_view c, const SubstSo& g) {
  return subst_pred(a, NameSort::Sym, c, g);
}

FormulaPtr unfold(const FormulaPtr& mu) {
  if (mu->kind != FKind::Mu)
    throw std::invalid_argument("unfold: not a least fixed point");
  std::vector<FoTermPtr> param_vars;
  param_vars.reserve(mu->params.size());
  for (const auto& p : mu->params) param_vars.push_back(FoTerm::var(p));
  auto self = Formula::mu(mu->name, mu->params, mu->sub1, param_vars);
  auto spliced = subst_sym(mu->sub1, mu->name, SubstSo{mu->params, self});
  FoSubst s;
  for (std::size_t i = 0; i < mu->params.size(); ++i) s[mu->params[i]] = mu->args[i];
  return subst_fo(spliced, s);
}

// ---------------------------------------------------------------------------
// Polarity and classifications

std::pair<bool, bool> polarity(const FormulaPtr& a, std::string_view name,
                               PredSort sort) {
  switch (a->kind) {
    case FKind::Bot:
      return {true, true};
    case FKind::PredVar:
      if (sort == PredSort::Var && a->name == name) return {true, false};
      return {true, true};
    case FKind::PredSym:
      if (sort == PredSort::Sym && a->name == name) return {true, false};
      return {true, true};
    case FKind::Arrow: {
      auto l = polarity(a->sub1, name, sort);
      auto r = polarity(a->sub2, name, sort);
      return {l.second && r.first, l.first && r.second};
    }
    case FKind::ForallFo:
      return polarity(a->sub1, name, sort);
    case FKind::ForallSo:
      if (sort == PredSort::Var && a->name == name) return {true, true};
      return polarity(a->sub1, name, sort);
    case FKind::Mu:
      if (sort == PredSort::Sym && a->name == name) return {true, true};
      return polarity(a->sub1, name, sort);
  }
  return {true, true};
}

namespace {

bool has_arrow(const FormulaPtr& a) {
  switch (a->kind) {
    case FKind::Bot:
    case FKind::PredVar:
    case FKind::PredSym:
      return false;
    case FKind::Arrow:
      return true;
    case FKind::ForallFo:
    case FKind::ForallSo:
    case FKind::Mu:
      return has_arrow(a->sub1);
  }
  return false;
}

}  // namespace

std::optional<WithoutArrow> classify_arrow(const FormulaPtr& a) {
  if (has_arrow(a)) return std::nullopt;
  std::set<std::string> bound_vars, bound_syms;
  const Formula* cur = a.get();
  while (true) {
    switch (cur->kind) {
      case FKind::Bot:
        return WithoutArrow{"_|_", PredSort::Sym, 1};
      case FKind::PredVar: {
        bool bound = bound_vars.count(cur->name) > 0;
        return WithoutArrow{cur->name, PredSort::Var, bound ? 2 : 1};
      }
      case FKind::PredSym: {
        bool bound = bound_syms.count(cur->name) > 0;
        return WithoutArrow{cur->name, PredSort::Sym, bound ? 2 : 1};
      }
      case FKind::ForallFo:
        cur = cur->sub1.get();
        break;
      case FKind::ForallSo:
        bound_vars.insert(cur->name);
        cur = cur->sub1.get();
        break;
      case FKind::Mu:
        bound_syms.insert(cur->name);
        cur = cur->sub1.get();
        break;
      case FKind::Arrow:
        return std::nullopt;  // unreachable: has_arrow screened
    }
  }
}

FormulaPtr rep_formula(const FormulaPtr& a) {
  switch (a->kind) {
    case FKind::Arrow:
      return a;
    case FKind::ForallFo:
      return Formula::forall_fo(a->name, rep_formula(a->sub1));
    case FKind::ForallSo:
      return Formula::forall_so(a->name, rep_formula(a->sub1));
    case FKind::Mu: {
      std::vector<FoTermPtr> param_vars;
      param_vars.reserve(a->params.size());
      for (const auto& p : a->params) param_vars.push_back(FoTerm::var(p));
      auto self = Formula::mu(a->name, a->params, a->sub1, param_vars);
      auto spliced =
          subst_sym(rep_formula(a->sub1), a->name, SubstSo{a->params, self});
      FoSubst s;
      for (std::size_t i = 0; i < a->params.size(); ++i) s[a->params[i]] = a->args[i];
      return subst_fo(spliced, s);
    }
    default:
      throw std::invalid_argument("rep of a without-arrow type");
  }
}

RepView rep(const FormulaPtr& a) {
  auto r = rep_formula(a);
  RepView view;
  const Formula* cur = r.get();
  while (cur->kind == FKind::ForallFo || cur->kind == FKind::ForallSo) {
    view.prefix.emplace_back(cur->kind == FKind::ForallFo ? 'x' : 'X', cur->name);
    cur = cur->sub1.get();
  }
  if (cur->kind != FKind::Arrow)
    throw std::invalid_argument("rep core is not an arrow");
  view.left = cur->sub1;
  view.right = cur->sub2;
  return view;
}

std::pair<bool, bool> forall_polarity(const FormulaPtr& a) {
  switch (a->kind) {
    case FKind::Bot:
    case FKind::PredVar:
    case FKind::PredSym:
      return {true, true};
    case FKind::Arrow: {
      auto l = forall_polarity(a->sub1);
      auto r = forall_polarity(a->sub2);
      return {l.second && r.first, l.first && r.second};
    }
    case FKind::ForallFo:
      return forall_polarity(a->sub1);
    case FKind::ForallSo: {
      auto b = forall_polarity(a->sub1);
      bool free = fv2(a->sub1).count(a->name) > 0;
      return {b.first, b.second && !free};
    }
    case FKind::Mu:
      return {forall_polarity(a->sub1).first, false};
  }
  return {true, true};
}

bool is_bottom_type(const FormulaPtr& a) {
  switch (a->kind) {
    case FKind::Bot:
      return true;
    case FKind::Arrow:
      return is_bottom_type(a->sub2);
    case FKind::ForallFo:
    case FKind::ForallSo:
    case FKind::Mu:
      return is_bottom_type(a->sub1);
    default:
      return false;
  }
}

FormulaPtr erase_diamond(const FormulaPtr& a) {
  switch (a->kind) {
    case FKind::Bot:
      return a;
    case FKind::PredVar:
      return Formula::pred_var(a->name);
    case FKind::PredSym:
      return Formula::pred_sym(a->name);
    case FKind::Arrow:
      return Formula::arrow(erase_diamond(a->sub1), erase_diamond(a->sub2));
    case FKind::ForallFo:
      return erase_diamond(a->sub1);
    case FKind::ForallSo:
      return Formula::forall_so(a->name, erase_diamond(a->sub1));
    case FKind::Mu:
      return Formula::mu(a->name, {}, erase_diamond(a->sub1), {});
  }
  return a;
}

// ---------------------------------------------------------------------------
// Gödel transformation

namespace {

bool mentions_pred_sym(const FormulaPtr& a) {
  switch (a->kind) {
    case FKind::Bot:
    case FKind::PredVar:
      return false;
    case FKind::PredSym:
    case FKind::Mu:
      return true;
    case FKind::Arrow:
      return mentions_pred_sym(a->sub1) || mentions_pred_sym(a->sub2);
    case FKind::ForallFo:
    case FKind::ForallSo:
      return mentions_pred_sym(a->sub1);
  }
  return false;
}

void validate_entry(const std::string& x, const GodelEntry& e) {
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("godel entry for " + x + ": " + why);
  };
  if (e.vars.empty()) fail("V_X is empty");
  std::set<std::string> distinct(e.params.begin(), e.params.end());
  if (distinct.size() != e.params.size()) fail("duplicate parameters");
  if (!is_bottom_type(e.body)) fail("F_X is not a bottom type");
  if (mentions_pred_sym(e.body)) fail("F_X mentions a predicate symbol");
  std::set<std::string> vars(e.vars.begin(), e.vars.end());
  for (const auto& v : fv2(e.body))
    if (!vars.count(v)) fail("F_X has a free variable outside V_X: " + v);
  for (const auto& v : fv_fo(e.body))
    if (!distinct.count(v)) fail("F_X has a first-order variable outside params: " + v);
  for (const auto& v : e.vars) {
    auto ar = occurrence_arity(e.body, v, PredSort::Var);
    if (ar.has_value() && *ar != e.params.size())
      fail("member " + v + " of V_X used at the wrong arity");
  }
}

struct GodelRun {
  const GodelConfig* cfg;
  // Which source variable claimed each V_X member, for disjointness.
  std::map<std::string, std::string> claimed;

  const GodelEntry& entry(const std::string& x, std::size_t arity) {
    const GodelEntry& e = cfg->entry(x, arity);
    validate_entry(x, e);
    if (e.params.size() != arity)
      throw std::invalid_argument("godel entry for " + x +
                                  " has the wrong arity");
    for (const auto& v : e.vars) {
      auto [it, inserted] = claimed.emplace(v, x);
      if (!inserted && it->second != x)
        throw std::invalid_argument("godel: V-sets of " + it->second + " and " + x +
                                    " overlap on " + v);
    }
    return e;
  }
};

FormulaPtr godel_rec(const FormulaPtr& a, GodelRun& run) {
  switch (a->kind) {
    case FKind::Bot:
    case FKind::PredSym:
      return a;
    case FKind::PredVar: {
      const GodelEntry& e = run.entry(a->name, a->args.size());
      FoSubst s;
      for (std::size_t i = 0; i < a->args.size(); ++i) s[e.params[i]] = a->args[i];
      return subst_fo(e.body, s);
    }
    case FKind::Arrow:
      return Formula::arrow(godel_rec(a->sub1, run), godel_rec(a->sub2, run));
    case FKind::ForallFo:
      return Formula::forall_fo(a->name, godel_rec(a->sub1, run));
    case FKind::ForallSo: {
      auto arity = occurrence_arity(a->sub1, a->name, PredSort::Var);
      const GodelEntry& e = run.entry(a->name, arity.value_or(0));
      auto body = godel_rec(a->sub1, run);
      for (std::size_t i = e.vars.size(); i-- > 0;)
        body = Formula::forall_so(e.vars[i], std::move(body));
      return body;
    }
    case FKind::Mu:
      return Formula::mu(a->name, a->params, godel_rec(a->sub1, run), a->args);
  }
  return a;
}

}  // namespace

const GodelEntry& GodelConfig::entry(const std::string& x, std::size_t arity) const {
  auto it = entries.find(x);
  if (it != entries.end()) return it->second;
  if (!schema)
    throw std::invalid_argument("godel config has no entry for " + x);
  std::string key = x + "/" + std::to_string(arity);
  auto hit = generated.find(key);
  if (hit == generated.end())
    hit = generated.emplace(key, schema(x, arity)).first;
  return hit->second;
}

GodelConfig godel_negation_config() {
  GodelConfig cfg;
  cfg.schema = [](const std::string& x, std::size_t arity) {
    GodelEntry e;
    e.vars = {x};
    std::vector<FoTermPtr> vs;
    for (std::size_t i = 0; i < arity; ++i) {
      e.params.push_back("x" + std::to_string(i + 1));
      vs.push_back(FoTerm::var(e.params.back()));
    }
    e.body = neg(Formula::pred_var(x, vs));
    return e;
  };
  return cfg;
}

GodelConfig godel_double_config() {
  GodelConfig cfg;
  cfg.schema = [](const std::string& x, std::size_t arity) {
    GodelEntry e;
    e.vars = {x, x + "'"};
    std::vector<FoTermPtr> vs;
    for (std::size_t i = 0; i < arity; ++i) {
      e.params.push_back("x" + std::to_string(i + 1));
      vs.push_back(FoTerm::var(e.params.back()));
    }
    e.body = Formula::arrow(Formula::pred_var(x, vs),
                            neg(Formula::pred_var(x + "'", vs)));
    return e;
  };
  return cfg;
}

FormulaPtr godel(const FormulaPtr& a, const GodelConfig& cfg) {
  GodelRun run{&cfg, {}};
  return godel_rec(a, run);
}

// ---------------------------------------------------------------------------
// Equational matching

namespace {

bool fo_match(const FoTermPtr& pat, const FoTermPtr& subj, FoSubst& sigma) {
  if (pat->is_var) {
    auto it = sigma.find(pat->name);
    if (it != sigma.end()) return fo_equal(it->second, subj);
    sigma[pat->name] = subj;
    return true;
  }
  if (subj->is_var || pat->name != subj->name ||
      pat->args.size() != subj->args.size())
    return false;
  for (std::size_t i = 0; i < pat->args.size(); ++i)
    if (!fo_match(pat->args[i], subj->args[i], sigma)) return false;
  return true;
}

}  // namespace

std::optional<FoSubst> match_equation(const FoTermPtr& t, const FoTermPtr& u,
                                      const EquationSystem& eqs) {
  for (const auto& [l, r] : eqs) {
    FoSubst sigma;
    if (fo_match(l, t, sigma) && fo_match(r, u, sigma)) return sigma;
    sigma.clear();
    if (fo_match(r, t, sigma) && fo_match(l, u, sigma)) return sigma;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Parsing

parse_error::parse_error(const std::string& msg, std::size_t pos)
    : std::runtime_error(msg + " at position " + std::to_string(pos)),
      position(pos) {}

namespace {

enum class Tok { Ident, Arrow, Comma, Tilde, Bang, LParen, RParen, LAngle, RAngle, Dot, Bot, End };

struct FLexer {
  std::string_view src;
  std::size_t pos = 0;
  Tok tok = Tok::End;
  std::string text;
  std::size_t tok_pos = 0;

  explicit FLexer(std::string_view s) : src(s) { advance(); }

  static bool ident_start(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  }
  static bool ident_cont(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }

  void advance() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    tok_pos = pos;
    text.clear();
    if (pos >= src.size()) {
      tok = Tok::End;
      return;
    }
    char c = src[pos];
    if (src.compare(pos, 3, "_|_") == 0) {
      tok = Tok::Bot;
      pos += 3;
      return;
    }
    if (src.compare(pos, 2, "->") == 0) {
      tok = Tok::Arrow;
      pos += 2;
      return;
    }
    switch (c) {
      case ',': tok = Tok::Comma; ++pos; return;
      case '~': tok = Tok::Tilde; ++pos; return;
      case '!': tok = Tok::Bang; ++pos; return;
      case '(': tok = Tok::LParen; ++pos; return;
      case ')': tok = Tok::RParen; ++pos; return;
      case '<': tok = Tok::LAngle; ++pos; return;
      case '>': tok = Tok::RAngle; ++pos; return;
      case '.': tok = Tok::Dot; ++pos; return;
      default: break;
    }
    if (ident_start(c)) {
      std::size_t start = pos;
      while (pos < src.size() && ident_cont(src[pos])) ++pos;
      text = std::string(src.substr(start, pos - start));
      tok = Tok::Ident;
      return;
    }
    throw parse_error("unexpected character '" + std::string(1, c) + "'", pos);
  }
};

struct FParser {
  FLexer lex;
  const Signature& sig;
  // Innermost-first binder scopes: ('x', name), ('X', name), ('C', name/arity).
  std::vector<std::pair<char, std::string>> scopes;
  std::map<std::string, std::size_t> sym_arity;  // mu-bound symbol arities
  std::map<std::string, std::size_t> var_arity;  // predicate variable arities

  FParser(std::string_view src, const Signature& s) : lex(src), sig(s) {}

  [[noreturn]] void fail(const std::string& msg) {
    throw parse_error(msg, lex.tok_pos);
  }

  void expect(Tok t, const char* what) {
    if (lex.tok != t) fail(std::string("expected ") + what);
    lex.advance();
  }

  std::string take_ident(const char* what) {
    if (lex.tok != Tok::Ident) fail(std::string("expected ") + what);
    std::string s = lex.text;
    lex.advance();
    return s;
  }

  int scope_lookup(char sort, const std::string& name) const {
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it)
      if (it->first == sort && it->second == name)
        return static_cast<int>(scopes.rend() - it) - 1;
    return -1;
  }

  bool fo_bound(const std::string& name) const { return scope_lookup('x', name) >= 0; }

  FoTermPtr fo_term() {
    std::size_t at = lex.tok_pos;
    std::string name = take_ident("first-order term");
    std::vector<FoTermPtr> args;
    bool applied = false;
    if (lex.tok == Tok::LParen) {
      applied = true;
      lex.advance();
      if (lex.tok != Tok::RParen) {
        args.push_back(fo_term());
        while (lex.tok == Tok::Comma) {
          lex.advance();
          args.push_back(fo_term());
        }
      }
      expect(Tok::RParen, "')'");
    }
    if (fo_bound(name)) {
      if (applied) throw parse_error("variable " + name + " applied to arguments", at);
      return FoTerm::var(name);
    }
    auto fn = sig.fns.find(name);
    if (fn != sig.fns.end()) {
      if (args.size() != fn->second)
        throw parse_error("function " + name + " expects " +
                              std::to_string(fn->second) + " arguments",
                          at);
      return FoTerm::fn(name, std::move(args));
    }
    if (applied)
      throw parse_error("undeclared function symbol " + name, at);
    if (std::isupper(static_cast<unsigned char>(name[0])))
      throw parse_error("capitalized name " + name + " in first-order position", at);
    return FoTerm::var(name);
  }

  FormulaPtr atom() {
    std::size_t at = lex.tok_pos;
    if (lex.tok == Tok::Bot) {
      lex.advance();
      return Formula::bot();
    }
    if (lex.tok == Tok::LParen) {
      lex.advance();
      auto f = top();
      expect(Tok::RParen, "')'");
      return f;
    }
    std::string name = take_ident("formula");
    std::vector<FoTermPtr> args;
    if (lex.tok == Tok::LParen) {
      lex.advance();
      if (lex.tok != Tok::RParen) {
        args.push_back(fo_term());
        while (lex.tok == Tok::Comma) {
          lex.advance();
          args.push_back(fo_term());
        }
      }
      expect(Tok::RParen, "')'");
    }
    int sym_scope = scope_lookup('C', name);
    int var_scope = scope_lookup('X', name);
    if (sym_scope >= 0 || var_scope >= 0) {
      bool is_sym = sym_scope > var_scope;
      if (is_sym) {
        if (args.size() != sym_arity[name])
          throw parse_error("symbol " + name + " expects " +
                                std::to_string(sym_arity[name]) + " arguments",
                            at);
        return Formula::pred_sym(name, std::move(args));
      }
      auto [it, inserted] = var_arity.emplace(name, args.size());
      if (!inserted && it->second != args.size())
        throw parse_error("predicate variable " + name + " used at mixed arities", at);
      return Formula::pred_var(name, std::move(args));
    }
    auto pd = sig.preds.find(name);
    if (pd != sig.preds.end()) {
      if (args.size() != pd->second)
        throw parse_error("predicate " + name + " expects " +
                              std::to_string(pd->second) + " arguments",
                          at);
      return Formula::pred_sym(name, std::move(args));
    }
    if (!std::isupper(static_cast<unsigned char>(name[0])))
      throw parse_error("unknown predicate symbol " + name, at);
    auto [it, inserted] = var_arity.emplace(name, args.size());
    if (!inserted && it->second != args.size())
      throw parse_error("predicate variable " + name + " used at mixed arities", at);
    return Formula::pred_var(name, std::move(args));
  }

  FormulaPtr unary() {
    if (lex.tok == Tok::Tilde) {
      lex.advance();
      return neg(unary());
    }
    if (lex.tok == Tok::Bang) {
      lex.advance();
      std::string name = take_ident("quantified variable");
      char sort = std::isupper(static_cast<unsigned char>(name[0])) ? 'X' : 'x';
      scopes.emplace_back(sort, name);
      auto body = arrow_level();
      scopes.pop_back();
      return sort == 'X' ? Formula::forall_so(name, std::move(body))
                         : Formula::forall_fo(name, std::move(body));
    }
    if (lex.tok == Tok::Ident && lex.text == "mu") {
      std::size_t at = lex.tok_pos;
      lex.advance();
      std::string sym = take_ident("mu symbol");
      std::vector<std::string> params;
      while (lex.tok == Tok::Ident) params.push_back(take_ident("mu parameter"));
      expect(Tok::Dot, "'.'");
      scopes.emplace_back('C', sym);
      for (const auto& p : params) scopes.emplace_back('x', p);
      std::size_t saved = sym_arity.count(sym) ? sym_arity[sym] : SIZE_MAX;
      sym_arity[sym] = params.size();
      auto body = arrow_level();
      if (saved == SIZE_MAX)
        sym_arity.erase(sym);
      else
        sym_arity[sym] = saved;
      for (std::size_t i = 0; i < params.size(); ++i) scopes.pop_back();
      scopes.pop_back();
      expect(Tok::LAngle, "'<'");
      std::vector<FoTermPtr> over;
      if (lex.tok != Tok::RAngle) {
        over.push_back(fo_term());
        while (lex.tok == Tok::Comma) {
          lex.advance();
          over.push_back(fo_term());
        }
      }
      expect(Tok::RAngle, "'>'");
      try {
        return Formula::mu(std::move(sym), std::move(params), std::move(body),
                           std::move(over));
      } catch (const std::invalid_argument& e) {
        throw parse_error(e.what(), at);
      }
    }
    return atom();
  }

  // '->' is right-associative; quantifier bodies stop at ','.
  std::pair<FormulaPtr, bool> arrow_tail() {
    auto lhs = unary();
    if (lex.tok != Tok::Arrow) return {lhs, false};
    lex.advance();
    auto rhs = arrow_tail();
    return {Formula::arrow(std::move(lhs), std::move(rhs.first)), true};
  }

  FormulaPtr arrow_level() { return arrow_tail().first; }

  // "A, B -> C" folds to A -> (B -> C); a comma list must end in an arrow.
  FormulaPtr top() {
    std::size_t at = lex.tok_pos;
    auto first = arrow_tail();
    if (lex.tok != Tok::Comma) return first.first;
    std::vector<FormulaPtr> items{first.first};
    bool last_had_arrow = first.second;
    while (lex.tok == Tok::Comma) {
      lex.advance();
      at = lex.tok_pos;
      auto next = arrow_tail();
      items.push_back(next.first);
      last_had_arrow = next.second;
    }
    if (!last_had_arrow)
      throw parse_error("comma list must end with an arrow", at);
    FormulaPtr out = items.back();
    for (std::size_t i = items.size() - 1; i-- > 0;)
      out = Formula::arrow(items[i], std::move(out));
    return out;
  }
};

}  // namespace

FormulaPtr parse_formula(std::string_view src, const Signature& sig) {
  FParser p(src, sig);
  auto f = p.top();
  if (p.lex.tok != Tok::End) p.fail("trailing input");
  return f;
}

FoTermPtr parse_fo_term(std::string_view src, const Signature& sig) {
  FParser p(src, sig);
  auto t = p.fo_term();
  if (p.lex.tok != Tok::End) p.fail("trailing input");
  return t;
}

Signature parse_signature_line(std::string_view line, Signature sig) {
  std::istringstream in{std::string(line)};
  std::string kind, decl;
  in >> kind >> decl;
  auto slash = decl.find('/');
  if ((kind != "fn" && kind != "pred") || slash == std::string::npos)
    throw parse_error("malformed signature line: " + std::string(line), 0);
  std::string name = decl.substr(0, slash);
  std::size_t arity = 0;
  try {
    arity = std::stoul(decl.substr(slash + 1));
  } catch (const std::exception&) {
    throw parse_error("malformed arity in: " + std::string(line), 0);
  }
  std::string rest;
  if (in >> rest) throw parse_error("trailing input in: " + std::string(line), 0);
  if (kind == "fn")
    sig.fns[name] = arity;
  else
    sig.preds[name] = arity;
  return sig;
}

std::string print_signature(const Signature& sig) {
  std::string out;
  for (const auto& [name, arity] : sig.fns)
    out += "fn " + name + "/" + std::to_string(arity) + "\n";
  for (const auto& [name, arity] : sig.preds)
    out += "pred " + name + "/" + std::to_string(arity) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

constexpr int CTX_TOP = 0;
constexpr int CTX_ARROW_LHS = 1;
constexpr int CTX_UNARY = 2;

void print_fo_into(const FoTermPtr& t, std::string& out) {
  out += t->name;
  if (!t->is_var && !t->args.empty()) {
    out += "(";
    for (std::size_t i = 0; i < t->args.size(); ++i) {
      if (i) out += ", ";
      print_fo_into(t->args[i], out);
    }
    out += ")";
  }
}

void print_args(const std::vector<FoTermPtr>& args, std::string& out) {
  if (args.empty()) return;
  out += "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    print_fo_into(args[i], out);
  }
  out += ")";
}

void print_rec(const FormulaPtr& a, int ctx, std::string& out) {
  switch (a->kind) {
    case FKind::Bot:
      out += "_|_";
      return;
    case FKind::PredVar:
    case FKind::PredSym:
      out += a->name;
      print_args(a->args, out);
      return;
    case FKind::Arrow: {
      if (a->sub2->kind == FKind::Bot) {
        out += "~";
        print_rec(a->sub1, CTX_UNARY, out);
        return;
      }
      bool wrap = ctx >= CTX_ARROW_LHS;
      if (wrap) out += "(";
      print_rec(a->sub1, CTX_ARROW_LHS, out);
      out += " -> ";
      print_rec(a->sub2, CTX_TOP, out);
      if (wrap) out += ")";
      return;
    }
    case FKind::ForallFo:
    case FKind::ForallSo: {
      bool wrap = ctx >= CTX_ARROW_LHS;
      if (wrap) out += "(";
      out += "!" + a->name + " ";
      print_rec(a->sub1, CTX_TOP, out);
      if (wrap) out += ")";
      return;
    }
    case FKind::Mu: {
      bool wrap = ctx >= CTX_ARROW_LHS;
      if (wrap) out += "(";
      out += "mu " + a->name;
      for (const auto& p : a->params) out += " " + p;
      out += " . ";
      print_rec(a->sub1, CTX_TOP, out);
      out += " <";
      for (std::size_t i = 0; i < a->args.size(); ++i) {
        if (i) out += ", ";
        print_fo_into(a->args[i], out);
      }
      out += ">";
      if (wrap) out += ")";
      return;
    }
  }
}

void pred_usage(const FormulaPtr& a,
                std::map<std::string, std::set<std::size_t>>& arities,
                std::set<std::string>& names) {
  switch (a->kind) {
    case FKind::Bot:
      return;
    case FKind::PredVar:
    case FKind::PredSym:
      arities[a->name].insert(a->args.size());
      names.insert(a->name);
      return;
    case FKind::Arrow:
      pred_usage(a->sub1, arities, names);
      pred_usage(a->sub2, arities, names);
      return;
    case FKind::ForallFo:
      pred_usage(a->sub1, arities, names);
      return;
    case FKind::ForallSo:
    case FKind::Mu:
      names.insert(a->name);
      pred_usage(a->sub1, arities, names);
      return;
  }
}

FormulaPtr rename_first_binder(const FormulaPtr& a, const std::string& from,
                               const std::string& to, bool& done) {
  if (done) return a;
  switch (a->kind) {
    case FKind::Bot:
    case FKind::PredVar:
    case FKind::PredSym:
      return a;
    case FKind::Arrow: {
      auto l = rename_first_binder(a->sub1, from, to, done);
      auto r = rename_first_binder(a->sub2, from, to, done);
      if (l == a->sub1 && r == a->sub2) return a;
      return Formula::arrow(l, r);
    }
    case FKind::ForallFo: {
      auto b = rename_first_binder(a->sub1, from, to, done);
      return b == a->sub1 ? a : Formula::forall_fo(a->name, b);
    }
    case FKind::ForallSo: {
      if (a->name == from) {
        done = true;
        auto arity = occurrence_arity(a->sub1, from, PredSort::Var);
        std::vector<std::string> ps;
        std::vector<FoTermPtr> vs;
        for (std::size_t i = 0; i < arity.value_or(0); ++i) {
          ps.push_back("q" + std::to_string(i + 1));
          vs.push_back(FoTerm::var(ps.back()));
        }
        return Formula::forall_so(
            to, subst_pred(a->sub1, NameSort::Var, from,
                           SubstSo{ps, Formula::pred_var(to, vs)}));
      }
      auto b = rename_first_binder(a->sub1, from, to, done);
      return b == a->sub1 ? a : Formula::forall_so(a->name, b);
    }
    case FKind::Mu: {
      if (a->name == from) {
        done = true;
        std::vector<std::string> ps;
        std::vector<FoTermPtr> vs;
        for (std::size_t i = 0; i < a->params.size(); ++i) {
          ps.push_back("q" + std::to_string(i + 1));
          vs.push_back(FoTerm::var(ps.back()));
        }
        return Formula::mu(to, a->params,
                           subst_pred(a->sub1, NameSort::Sym, from,
                                      SubstSo{ps, Formula::pred_sym(to, vs)}),
                           a->args);
      }
      auto b = rename_first_binder(a->sub1, from, to, done);
      return b == a->sub1 ? a : Formula::mu(a->name, a->params, b, a->args);
    }
  }
  return a;
}

// The grammar reads each predicate name at one arity per formula, so a name
// rebound at a different arity must be renamed before it can be printed.
FormulaPtr disambiguate_arities(FormulaPtr a) {
  for (int guard = 0; guard < 64; ++guard) {
    std::map<std::string, std::set<std::size_t>> arities;
    std::set<std::string> names;
    pred_usage(a, arities, names);
    std::string clash;
    for (const auto& [n, ks] : arities) {
      if (ks.size() > 1) {
        clash = n;
        break;
      }
    }
    if (clash.empty()) return a;
    bool done = false;
    FormulaPtr next;
    try {
      next = rename_first_binder(a, clash, fresh_name(clash, names), done);
    } catch (const std::exception&) {
      return a;
    }
    if (!done) return a;
    a = next;
  }
  return a;
}

}  // namespace

std::string print_formula(const FormulaPtr& a) {
  std::string out;
  print_rec(disambiguate_arities(a), CTX_TOP, out);
  return out;
}

std::string print_fo_term(const FoTermPtr& t) {
  std::string out;
  print_fo_into(t, out);
  return out;
}

}  // namespace ttr::fml
