#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "support/rand_formulas.hpp"
#include "ttr/subtyping.hpp"

namespace ttr::testsupport {

// --- first-order positions not under a first-order binder ------------------
// Enumeration and rewriting walk in the same order, so an index from
// free_fo_positions addresses the same subterm in rewrite_free_fo.

inline void free_fo_positions_term(const fml::FoTermPtr& t,
                                   std::vector<fml::FoTermPtr>& out) {
  out.push_back(t);
  if (!t->is_var)
    for (const auto& a : t->args) free_fo_positions_term(a, out);
}

inline void free_fo_positions(const fml::FormulaPtr& a,
                              std::vector<fml::FoTermPtr>& out) {
  if (!a) return;
  switch (a->kind) {
    case fml::FKind::Bot:
    case fml::FKind::ForallFo:
      return;
    case fml::FKind::PredVar:
    case fml::FKind::PredSym:
      for (const auto& t : a->args) free_fo_positions_term(t, out);
      return;
    case fml::FKind::Arrow:
      free_fo_positions(a->sub1, out);
      free_fo_positions(a->sub2, out);
      return;
    case fml::FKind::ForallSo:
      free_fo_positions(a->sub1, out);
      return;
    case fml::FKind::Mu:
      for (const auto& t : a->args) free_fo_positions_term(t, out);
      return;
  }
}

inline fml::FoTermPtr rewrite_free_fo_term(const fml::FoTermPtr& t, int& k,
                                           const fml::FoTermPtr& rep) {
  if (k == 0) {
    --k;
    return rep;
  }
  --k;
  if (t->is_var || k < 0) return t;
  std::vector<fml::FoTermPtr> args;
  args.reserve(t->args.size());
  for (const auto& a : t->args)
    args.push_back(k < 0 ? a : rewrite_free_fo_term(a, k, rep));
  return fml::FoTerm::fn(t->name, std::move(args));
}

inline fml::FormulaPtr rewrite_free_fo(const fml::FormulaPtr& a, int& k,
                                       const fml::FoTermPtr& rep) {
  if (!a || k < 0) return a;
  using fml::Formula;
  switch (a->kind) {
    case fml::FKind::Bot:
    case fml::FKind::ForallFo:
      return a;
    case fml::FKind::PredVar:
    case fml::FKind::PredSym: {
      std::vector<fml::FoTermPtr> args;
      args.reserve(a->args.size());
      for (const auto& t : a->args)
        args.push_back(k < 0 ? t : rewrite_free_fo_term(t, k, rep));
      return a->kind == fml::FKind::PredVar
                 ? Formula::pred_var(a->name, std::move(args))
                 : Formula::pred_sym(a->name, std::move(args));
    }
    case fml::FKind::Arrow: {
      auto l = rewrite_free_fo(a->sub1, k, rep);
      auto r = rewrite_free_fo(a->sub2, k, rep);
      return Formula::arrow(l, r);
    }
    case fml::FKind::ForallSo:
      return Formula::forall_so(a->name, rewrite_free_fo(a->sub1, k, rep));
    case fml::FKind::Mu: {
      std::vector<fml::FoTermPtr> over;
      over.reserve(a->args.size());
      for (const auto& t : a->args)
        over.push_back(k < 0 ? t : rewrite_free_fo_term(t, k, rep));
      return Formula::mu(a->name, a->params, a->sub1, std::move(over));
    }
  }
  return a;
}

// --- derivation corpus ------------------------------------------------------
// Grows verified derivations from axiom, fixed-point and representative
// seeds; every op keeps the pool valid in the generator's mode by
// construction.

struct DerivGen {
  std::mt19937_64 rng;
  sub::Mode mode;
  bool allow_eq = true;
  bool allow_sym_payload = true;
  bool plain_so_names = false;
  fml::EquationSystem eqs;
  std::vector<sub::SubPtr> pool;

  DerivGen(std::uint64_t seed_val, sub::Mode m) : rng(seed_val), mode(m) {
    eqs.emplace_back(
        fml::FoTerm::fn("min", {fml::FoTerm::var("x"), fml::FoTerm::fn("0")}),
        fml::FoTerm::fn("0"));
  }

  std::size_t pick(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  }

  bool coin() { return pick(2) == 0; }

  const sub::SubPtr& pick_pool() { return pool[pick(pool.size())]; }

  fml::FormulaPtr rnd_mu() {
    bool unary = coin();
    std::string sym = coin() ? "M" : "K";
    std::vector<std::string> params;
    std::vector<fml::FoTermPtr> pvars, over;
    if (unary) {
      params = {"w"};
      pvars = {fml::FoTerm::var("w")};
      over = {random_fo_term(rng, 1)};
    }
    auto body = fml::Formula::arrow(random_formula(rng, 2),
                                    fml::Formula::pred_sym(sym, pvars));
    return fml::Formula::mu(sym, params, body, over);
  }

  void seed(int axioms) {
    for (int i = 0; i < axioms; ++i)
      pool.push_back(sub::ax(random_formula(rng, 3)));
    for (int i = 0; i < 3; ++i) {
      auto m = rnd_mu();
      pool.push_back(sub::mu_d(m));
      if (mode == sub::Mode::full && coin())
        pool.push_back(sub::mu_prime_g(m));
    }
    for (int i = 0; i < 12 && !rep_seeded(); ++i) {
    }
  }

  bool rep_seeded() {
    auto a = random_formula(rng, 3);
    try {
      fml::rep_formula(a);
    } catch (const std::exception&) {
      return false;
    }
    pool.push_back(sub::to_rep(a));
    pool.push_back(sub::from_rep(a));
    return true;
  }

  bool too_big(const sub::SubPtr& d) {
    return fml::print_formula(d->lhs).size() +
               fml::print_formula(d->rhs).size() >
           3000;
  }

  bool push(sub::SubPtr d) {
    if (!d || too_big(d)) return false;
    pool.push_back(std::move(d));
    return true;
  }

  std::string fresh_so(const std::set<std::string>& used, const std::string& base) {
    for (const char* c : {"V", "W", "U"})
      if (!used.count(c)) return c;
    std::string v = base + "'";
    while (used.count(v)) v += "'";
    return v;
  }

  bool step() {
    switch (pick(13)) {
      case 0: {  // arrow introduction
        return push(sub::arrow(pick_pool(), pick_pool()));
      }
      case 1: {  // transitivity against a reflexivity link
        const auto& d = pick_pool();
        return push(coin() ? sub::tr(d, sub::ax(d->rhs))
                           : sub::tr(sub::ax(d->lhs), d));
      }
      case 2: {  // generalize a variable absent on the left
        const auto& d = pick_pool();
        std::vector<std::string> cand;
        auto fo = fml::fv_fo(d->lhs);
        for (const char* v : {"x", "y", "z"})
          if (!fo.count(v)) cand.push_back(v);
        for (const char* v : {"X", "Y", "V", "W"})
          if (!fml::fv2_contains(d->lhs, v, fml::PredSort::Var))
            cand.push_back(v);
        if (cand.empty()) return false;
        return push(sub::forall_id(cand[pick(cand.size())], d));
      }
      case 3: {  // abstract a first-order variable and instantiate it back
        const auto& d = pick_pool();
        auto fo = fml::fv_fo(d->lhs);
        if (fo.empty()) return false;
        std::vector<std::string> vs(fo.begin(), fo.end());
        std::string v = vs[pick(vs.size())];
        std::string v2 = v;
        while (fo.count(v2)) v2 += "'";
        auto body = fml::subst_fo(d->lhs, {{v, fml::FoTerm::var(v2)}});
        return push(sub::forall_ig0(fml::Formula::forall_fo(v2, body),
                                     fml::FoTerm::var(v), d));
      }
      case 4: {  // abstract a predicate variable and instantiate it back
        const auto& d = pick_pool();
        auto so = fml::fv2(d->lhs);
        if (so.empty()) return false;
        std::vector<std::string> vs(so.begin(), so.end());
        std::string x = vs[pick(vs.size())];
        std::size_t k;
        try {
          auto ar = fml::occurrence_arity(d->lhs, x, fml::PredSort::Var);
          k = ar.value_or(0);
        } catch (const std::exception&) {
          return false;
        }
        std::string x2 = plain_so_names ? fresh_so(so, x) : x + "'";
        while (so.count(x2)) x2 += "'";
        std::vector<std::string> qs;
        std::vector<fml::FoTermPtr> qv;
        for (std::size_t i = 0; i < k; ++i) {
          qs.push_back("q" + std::to_string(i + 1));
          qv.push_back(fml::FoTerm::var(qs.back()));
        }
        auto body = fml::subst_so(d->lhs, x,
                                  fml::SubstSo{qs, fml::Formula::pred_var(x2, qv)});
        return push(sub::forall_ig0(
            fml::Formula::forall_so(x2, body),
            fml::SubstSo{qs, fml::Formula::pred_var(x, qv)}, d));
      }
      case 5: {  // vacuous quantifier on the left
        const auto& d = pick_pool();
        if (coin()) {
          auto fo = fml::fv_fo(d->lhs);
          std::string v;
          for (const char* c : {"x", "y", "z", "u"})
            if (!fo.count(c)) {
              v = c;
              break;
            }
          if (v.empty()) return false;
          return push(sub::forall_ig0(fml::Formula::forall_fo(v, d->lhs),
                                       random_fo_term(rng, 1), d));
        }
        std::string x;
        for (const char* c : {"X", "Y", "V", "W"})
          if (!fml::fv2_contains(d->lhs, c, fml::PredSort::Var)) {
            x = c;
            break;
          }
        if (x.empty()) return false;
        fml::FormulaPtr payload =
            allow_sym_payload && coin()
                ? fml::Formula::pred_sym("Q")
                : fml::Formula::pred_var(x == "Y" ? "X" : "Y");
        return push(sub::forall_ig0(fml::Formula::forall_so(x, d->lhs),
                                     fml::SubstSo{{}, payload}, d));
      }
      case 6: {  // abstract one first-order subterm occurrence
        const auto& d = pick_pool();
        std::vector<fml::FoTermPtr> ps;
        free_fo_positions(d->lhs, ps);
        if (ps.empty()) return false;
        int idx = static_cast<int>(pick(ps.size()));
        fml::FoTermPtr t0 = ps[static_cast<std::size_t>(idx)];
        auto fo = fml::fv_fo(d->lhs);
        auto tv = fml::fo_vars(t0);
        fo.insert(tv.begin(), tv.end());
        std::string v = "u";
        while (fo.count(v)) v += "'";
        int k = idx;
        auto body = rewrite_free_fo(d->lhs, k, fml::FoTerm::var(v));
        return push(sub::forall_ig0(fml::Formula::forall_fo(v, body), t0, d));
      }
      case 7: {  // rewrite one constant by an equation instance
        if (!allow_eq) return false;
        const auto& d = pick_pool();
        std::vector<fml::FoTermPtr> ps;
        free_fo_positions(d->rhs, ps);
        std::vector<int> zeros;
        auto zero = fml::FoTerm::fn("0");
        for (std::size_t i = 0; i < ps.size(); ++i)
          if (fml::fo_equal(ps[i], zero)) zeros.push_back(static_cast<int>(i));
        if (zeros.empty()) return false;
        int k = zeros[pick(zeros.size())];
        auto to = fml::FoTerm::fn("min", {random_fo_term(rng, 1), zero});
        auto new_rhs = rewrite_free_fo(d->rhs, k, to);
        return push(sub::eq_step(zero, to, new_rhs, d));
      }
      case 8: {  // fresh fixed-point seeds
        auto m = rnd_mu();
        if (mode == sub::Mode::full && coin())
          return push(sub::mu_prime_g(m));
        return push(sub::mu_d(m));
      }
      case 9: {  // representative witnesses
        return rep_seeded();
      }
      case 10: {  // substitution instance of a whole derivation
        const auto& d = pick_pool();
        const char* vars[] = {"x", "y", "z"};
        return push(sub::subst_derivation(d, vars[pick(3)],
                                          random_fo_term(rng, 1)));
      }
      case 11: {  // rename a nullary predicate variable throughout
        const auto& d = pick_pool();
        std::string x = coin() ? "X" : "Y";
        if (!fml::fv2_contains(d->lhs, x, fml::PredSort::Var) &&
            !fml::fv2_contains(d->rhs, x, fml::PredSort::Var))
          return false;
        auto so = fml::fv2(d->lhs);
        auto so2 = fml::fv2(d->rhs);
        so.insert(so2.begin(), so2.end());
        std::string v = fresh_so(so, x);
        return push(sub::subst_derivation(
            d, x, fml::SubstSo{{}, fml::Formula::pred_var(v)},
            fml::PredSort::Var));
      }
      case 12: {  // strong-unfolding elimination
        if (mode != sub::Mode::full) return false;
        const auto& d = pick_pool();
        auto e = sub::eliminate_mu_prime(d);
        if (e == d) return false;
        return push(e);
      }
    }
    return false;
  }

  void grow(int target_new) {
    int added = 0;
    for (int attempts = 0; added < target_new && attempts < target_new * 30;
         ++attempts)
      if (step()) ++added;
  }
};

inline void all_nodes(const sub::SubPtr& d, std::vector<sub::SubPtr>& out) {
  if (!d) return;
  out.push_back(d);
  for (const auto& p : d->premises) all_nodes(p, out);
}

// Structural consequences that every valid inclusion must satisfy, checked
// at every node: without-arrow heads of kind 1 persist left to right, arrow
// types persist, bottom types persist, and (zero mode) the ∀-positive /
// ∀-negative classes propagate with shrinking predicate-name support.
inline std::optional<std::string> node_invariant_violation(
    const sub::SubPtr& root, bool include_omega) {
  std::vector<sub::SubPtr> nodes;
  all_nodes(root, nodes);
  auto names2 = [](const fml::FormulaPtr& f) {
    auto s = fml::fv2(f);
    auto t = fml::fps(f);
    s.insert(t.begin(), t.end());
    return s;
  };
  auto subset = [](const std::set<std::string>& a,
                   const std::set<std::string>& b) {
    for (const auto& x : a)
      if (!b.count(x)) return false;
    return true;
  };
  for (const auto& n : nodes) {
    auto cl = fml::classify_arrow(n->lhs);
    auto cr = fml::classify_arrow(n->rhs);
    if (cl && cl->kind == 1) {
      if (!cr || cr->kind != 1 || cr->at != cl->at || cr->sort != cl->sort)
        return "kind-1 head " + cl->at + " lost across " +
               std::string(sub::rule_name(n->rule));
    }
    if (!cl && cr)
      return std::string("arrow type degenerated across ") +
             sub::rule_name(n->rule);
    if (fml::is_bottom_type(n->lhs) && !fml::is_bottom_type(n->rhs))
      return std::string("bottom type lost across ") + sub::rule_name(n->rule);
    if (include_omega) {
      auto pl = fml::forall_polarity(n->lhs);
      auto pr = fml::forall_polarity(n->rhs);
      if (pl.second) {
        if (!pr.second)
          return std::string("negative class lost across ") +
                 sub::rule_name(n->rule);
        if (!subset(names2(n->rhs), names2(n->lhs)))
          return std::string("negative class grew support across ") +
                 sub::rule_name(n->rule);
      }
      if (pr.first) {
        if (!pl.first)
          return std::string("positive class lost across ") +
                 sub::rule_name(n->rule);
        if (!subset(names2(n->lhs), names2(n->rhs)))
          return std::string("positive class grew support across ") +
                 sub::rule_name(n->rule);
      }
    }
  }
  return std::nullopt;
}

}  // namespace ttr::testsupport
