#include "ttr/derivations.hpp"

#include <set>
#include <string>

#include "ttr/encodings.hpp"

namespace ttr::der {

namespace {

using fml::Formula;
using fml::FormulaPtr;
using fml::FoTerm;
using fml::FoTermPtr;
using typ::Context;
using typ::System;
using typ::TyPtr;

FoTermPtr zero_t() { return FoTerm::fn("0"); }
FoTermPtr succ_t(FoTermPtr t) { return FoTerm::fn("s", {std::move(t)}); }

FormulaPtr nn(const FoTermPtr& t) { return fml::neg(fml::neg(nat_rec(t))); }

std::string fresh_ctx_name(const Context& ctx, std::string base) {
  auto used = [&](const std::string& n) {
    for (const auto& [v, a] : ctx)
      if (v == n) return true;
    return false;
  };
  while (used(base)) base += "'";
  return base;
}

std::string fresh_fo_name(const Context& ctx, std::string base) {
  std::set<std::string> used;
  for (const auto& [v, a] : ctx) {
    auto s = fml::fv_fo(a);
    used.insert(s.begin(), s.end());
  }
  while (used.count(base)) base += "'";
  return base;
}

std::string fresh_so_name(const Context& ctx, std::string base) {
  std::set<std::string> used;
  for (const auto& [v, a] : ctx) {
    auto s = fml::fv2(a);
    used.insert(s.begin(), s.end());
  }
  while (used.count(base)) base += "'";
  return base;
}

// f : !y (N^r[y] -> X(s(y))), the step hypothesis of the unfolded numeral
// type at predicate variable `x2`.
FormulaPtr step_hyp(const std::string& x2) {
  auto y = FoTerm::var("y");
  return Formula::forall_fo(
      "y", Formula::arrow(nat_rec(y),
                          Formula::pred_var(x2, {succ_t(y)})));
}

// lam d f. (f) 0-bar : T -> ~~N^r[0] for an arbitrary argument type T.
TyPtr const_zero_typing(const Context& ambient, const FormulaPtr& t) {
  Context c1 = ambient;
  c1.emplace_back(fresh_ctx_name(c1, "d"), t);
  Context c2 = c1;
  std::string f = fresh_ctx_name(c2, "f");
  c2.emplace_back(f, fml::neg(nat_rec(zero_t())));
  auto d = typ::r3(typ::r1(System::ttr, c2, f), zero_typing(System::ttr, c2));
  d = typ::r2(d, f);
  return typ::r2(d, c1.back().first);
}

}  // namespace

fml::Signature numeral_signature() {
  fml::Signature s;
  s.fns = {{"0", 0}, {"s", 1}};
  s.preds = {{"N", 1}};
  return s;
}

fml::FormulaPtr nat_rec(const fml::FoTermPtr& t) {
  static const FormulaPtr base = [] {
    fml::Signature s;
    s.fns = {{"0", 0}, {"s", 1}};
    return fml::parse_formula(
        "mu N x . !X ((!y (N(y) -> X(s(y)))) -> (X(0) -> X(x))) <x>", s);
  }();
  return fml::subst_fo(base, {{"x", t}});
}

typ::TyPtr zero_typing(typ::System sys, const typ::Context& ambient) {
  std::string so = fresh_so_name(ambient, "X");
  Context ctx = ambient;
  std::string f = fresh_ctx_name(ctx, "f");
  ctx.emplace_back(f, step_hyp(so));
  std::string x = fresh_ctx_name(ctx, "x");
  ctx.emplace_back(x, Formula::pred_var(so, {zero_t()}));
  auto d = typ::r1(sys, ctx, x);
  d = typ::r2(d, x);
  d = typ::r2(d, f);
  d = typ::r6(d, so);
  return typ::sub_incl(d, sub::mu_d(nat_rec(zero_t())));
}

typ::TyPtr succ_typing(const typ::Context& ambient) {
  std::string y0 = fresh_fo_name(ambient, "y");
  std::string so = fresh_so_name(ambient, "X");
  Context c1 = ambient;
  std::string n = fresh_ctx_name(c1, "n");
  c1.emplace_back(n, nat_rec(FoTerm::var(y0)));
  Context c2 = c1;
  std::string f = fresh_ctx_name(c2, "f");
  c2.emplace_back(f, step_hyp(so));
  std::string x = fresh_ctx_name(c2, "x");
  c2.emplace_back(x, Formula::pred_var(so, {zero_t()}));
  auto d = typ::r5(typ::r1(System::ttr, c2, f), FoTerm::var(y0));
  d = typ::r3(d, typ::r1(System::ttr, c2, n));
  d = typ::r2(d, x);
  d = typ::r2(d, f);
  d = typ::r6(d, so);
  d = typ::sub_incl(d, sub::mu_d(nat_rec(succ_t(FoTerm::var(y0)))));
  d = typ::r2(d, n);
  return typ::r4(d, y0);
}

typ::TyPtr delta_typing(const typ::Context& ambient) {
  Context c = ambient;
  std::string f = fresh_ctx_name(c, "f");
  c.emplace_back(f, fml::neg(nat_rec(zero_t())));
  auto d = typ::r3(typ::r1(System::ttr, c, f), zero_typing(System::ttr, c));
  return typ::r2(d, f);
}

typ::TyPtr g_typing(const typ::Context& ambient) {
  std::string y0 = fresh_fo_name(ambient, "y");
  Context c1 = ambient;
  std::string gx = fresh_ctx_name(c1, "x");
  c1.emplace_back(gx, nn(FoTerm::var(y0)));
  std::string gy = fresh_ctx_name(c1, "y");
  c1.emplace_back(gy, fml::neg(nat_rec(succ_t(FoTerm::var(y0)))));
  Context c2 = c1;
  std::string gz = fresh_ctx_name(c2, "z");
  c2.emplace_back(gz, nat_rec(FoTerm::var(y0)));
  auto s = typ::r5(succ_typing(c2), FoTerm::var(y0));
  auto d = typ::r3(s, typ::r1(System::ttr, c2, gz));
  d = typ::r3(typ::r1(System::ttr, c2, gy), d);
  d = typ::r2(d, gz);
  d = typ::r3(typ::r1(System::ttr, c1, gx), d);
  d = typ::r2(d, gy);
  d = typ::r2(d, gx);
  return typ::r4(d, y0);
}

typ::TyPtr t1_typing() {
  auto x = FoTerm::var("x");
  FormulaPtr a_ind = Formula::forall_fo(
      "x", Formula::arrow(Formula::pred_sym("N", {x}), nn(x)));
  FormulaPtr nr_star = fml::godel(nat_rec(x), fml::godel_negation_config());
  FormulaPtr phi_star = nr_star->sub1;  // free: symbol N, variable x

  Context c1;
  c1.emplace_back("x", a_ind);
  c1.emplace_back("y", phi_star);
  std::string y0 = fresh_fo_name(c1, "y");
  Context c2 = c1;
  c2.emplace_back("z", Formula::pred_sym("N", {FoTerm::var(y0)}));

  auto step = typ::r5(typ::r1(System::ttr, c2, "x"), FoTerm::var(y0));
  step = typ::r3(step, typ::r1(System::ttr, c2, "z"));
  auto g = typ::r5(g_typing(c2), FoTerm::var(y0));
  step = typ::r3(g, step);
  step = typ::r2(step, "z");
  step = typ::r4(step, y0);

  auto d = typ::r7(typ::r1(System::ttr, c1, "y"),
                   fml::SubstSo{{"v"}, fml::neg(nat_rec(FoTerm::var("v")))});
  d = typ::r3(d, step);
  d = typ::r3(d, delta_typing(c1));
  d = typ::r2(d, "y");
  d = typ::r4(d, "x");
  d = typ::r2(d, "x");
  return typ::y_fix(d);
}

StorageChain storage_chain() {
  StorageChain c;
  auto x = FoTerm::var("x");
  auto y = FoTerm::var("y");
  auto nr = nat_rec(x);
  c.nr_star = fml::godel(nr, fml::godel_double_config());

  auto x0 = Formula::pred_var("X");
  auto p_y = Formula::arrow(
      x0, Formula::arrow(Formula::arrow(x0, nn(zero_t())),
                         Formula::arrow(x0, nn(y))));
  c.big_r = Formula::forall_so(
      "X",
      Formula::forall_fo(
          "y", Formula::arrow(p_y, Formula::arrow(x0, nn(succ_t(y))))));
  c.d_f = Formula::arrow(c.big_r, nn(zero_t()));
  auto f_at = [&](const FoTermPtr& t) {
    return Formula::arrow(
        c.big_r, Formula::arrow(c.d_f, Formula::arrow(c.big_r, nn(t))));
  };
  c.f_x = f_at(x);

  // R, specialized at itself and at y, already reads as F[y] → (R → ~~N^r[sy]).
  auto spine =
      Formula::arrow(f_at(y), Formula::arrow(c.big_r, nn(succ_t(y))));
  auto n_y = sub::forall_ig(Formula::forall_fo("y", spine), y, sub::ax(spine));
  auto n_x = sub::forall_ig(c.big_r, fml::SubstSo{{}, c.big_r}, n_y);
  auto p1 = sub::forall_id("y", n_x);
  auto b = Formula::arrow(c.d_f, Formula::arrow(c.big_r, nn(x)));
  auto arr = sub::arrow(p1, sub::ax(b));

  auto phi_f = fml::subst_sym(c.nr_star->sub1, "N", fml::SubstSo{{"x"}, c.f_x});
  auto body1 =
      fml::subst_so(phi_f->sub1, phi_f->name, fml::SubstSo{{"w"}, c.big_r});
  auto n_xp = sub::forall_ig(
      body1, fml::SubstSo{{"w"}, fml::neg(nat_rec(FoTerm::var("w")))}, arr);
  auto n_xstar = sub::forall_ig(phi_f, fml::SubstSo{{"w"}, c.big_r}, n_xp);
  c.incl = sub::mu_g(c.nr_star, c.f_x, n_xstar);
  return c;
}

namespace {

// rho : R, the iterator the second operator threads through its numeral.
TyPtr rho_typing(const Context& ambient) {
  std::string y0 = fresh_fo_name(ambient, "y");
  std::string so = fresh_so_name(ambient, "X");
  auto x0 = Formula::pred_var(so);
  auto p_y = Formula::arrow(
      x0, Formula::arrow(Formula::arrow(x0, nn(zero_t())),
                         Formula::arrow(x0, nn(FoTerm::var(y0)))));
  Context c = ambient;
  std::string yn = fresh_ctx_name(c, "y");
  c.emplace_back(yn, p_y);
  std::string zn = fresh_ctx_name(c, "z");
  c.emplace_back(zn, x0);
  auto dz = typ::r1(System::ttr, c, zn);
  auto d = typ::r3(typ::r1(System::ttr, c, yn), dz);
  d = typ::r3(d, const_zero_typing(c, x0));
  d = typ::r3(d, dz);
  auto g = typ::r5(g_typing(c), FoTerm::var(y0));
  d = typ::r3(g, d);
  d = typ::r2(d, zn);
  d = typ::r2(d, yn);
  d = typ::r4(d, y0);
  d = typ::r6(d, so);
  return d;
}

}  // namespace

typ::TyPtr t2_typing() {
  auto ch = storage_chain();
  Context c;
  c.emplace_back("v", ch.nr_star);
  auto rho = rho_typing(c);
  auto tau = const_zero_typing(c, ch.big_r);
  auto d = typ::sub_incl(typ::r1(System::ttr, c, "v"), ch.incl);
  d = typ::r3(d, rho);
  d = typ::r3(d, tau);
  d = typ::r3(d, rho);
  d = typ::r2(d, "v");
  return typ::r4(d, "x");
}

typ::TyPtr prop_nat_typing(typ::System sys) {
  static const FormulaPtr nr =
      fml::parse_formula("mu N . !X ((N -> X) -> (X -> X)) <>");
  auto x0 = Formula::pred_var("X");
  Context c;
  c.emplace_back("f", Formula::arrow(nr, x0));
  c.emplace_back("x", x0);
  auto d = typ::r1(sys, c, "x");
  d = typ::r2(d, "x");
  d = typ::r2(d, "f");
  d = typ::r6(d, "X");
  return typ::sub_incl(d, sub::mu_d(nr));
}

typ::TyPtr remark_typing() {
  const System sys = System::ttr_diamond;
  FormulaPtr bot_all = Formula::forall_so("X", Formula::pred_var("X"));
  FormulaPtr b =
      Formula::mu("C", {}, Formula::arrow(bot_all, Formula::pred_sym("C")), {});
  FormulaPtr e = Formula::mu(
      "C", {},
      Formula::arrow(Formula::arrow(Formula::pred_sym("C"), b), b), {});
  FormulaPtr eb = Formula::arrow(e, b);

  auto bot_to_e = sub::forall_ig(bot_all, fml::SubstSo{{}, e}, sub::ax(e));
  auto eb_below_b =
      sub::tr(sub::arrow(bot_to_e, sub::ax(b)), sub::mu_d(b));  // E→B ⊆ B
  auto e_below_eb = sub::mu_g(
      e, eb, sub::arrow(sub::mu_prime_g(e), sub::ax(b)));  // E ⊆ E→B

  Context c1;
  c1.emplace_back("x", Formula::arrow(b, Formula::arrow(b, b)));
  Context c2 = c1;
  c2.emplace_back("y", eb);

  // lam w. w : E
  Context ci = c2;
  ci.emplace_back("w", eb);
  auto di = typ::r2(typ::r1(sys, ci, "w"), "w");
  di = typ::sub_incl(di, sub::arrow(sub::ax(eb), eb_below_b));
  di = typ::sub_incl(di, sub::mu_d(e));

  // lam w v. w : E
  Context ck = c2;
  ck.emplace_back("w", eb);
  ck.emplace_back("v", bot_all);
  auto dk = typ::sub_incl(typ::r1(sys, ck, "w"), eb_below_b);
  dk = typ::r2(dk, "v");
  dk = typ::sub_incl(dk, sub::mu_d(b));
  dk = typ::r2(dk, "w");
  dk = typ::sub_incl(dk, sub::mu_d(e));

  // lam z. (z) z : E -> B
  Context cd = c1;
  cd.emplace_back("z", e);
  auto dz = typ::r1(sys, cd, "z");
  auto dd = typ::r3(typ::sub_incl(dz, sub::mu_prime_g(e)),
                    typ::sub_incl(dz, e_below_eb));
  dd = typ::r2(dd, "z");

  auto left = typ::r3(typ::r1(sys, c2, "x"),
                      typ::r3(typ::r1(sys, c2, "y"), di));
  auto body = typ::r3(left, typ::r3(typ::r1(sys, c2, "y"), dk));
  auto d = typ::r2(body, "y");
  d = typ::r3(d, dd);
  return typ::r2(d, "x");
}

std::vector<typ::TyPtr> restricted_corpus() {
  std::vector<typ::TyPtr> out;
  {
    Context c;
    c.emplace_back("x", Formula::pred_var("Y"));
    auto d = typ::r2(typ::r1(System::ttr_zero, c, "x"), "x");
    out.push_back(typ::r6(d, "Y"));
  }
  {
    Context c;
    c.emplace_back("x", Formula::pred_var("X"));
    c.emplace_back("y", Formula::pred_var("Y"));
    auto d = typ::r2(typ::r1(System::ttr_zero, c, "x"), "y");
    d = typ::r2(d, "x");
    out.push_back(typ::r6(typ::r6(d, "Y"), "X"));
  }
  out.push_back(zero_typing(System::ttr_zero));
  out.push_back(prop_nat_typing(System::ttr_zero));
  for (const auto& [redex, reduct] : conservation_pairs()) {
    out.push_back(redex);
    out.push_back(reduct);
  }
  return out;
}

std::vector<std::pair<typ::TyPtr, typ::TyPtr>> conservation_pairs() {
  std::vector<std::pair<typ::TyPtr, typ::TyPtr>> out;
  Context c;
  c.emplace_back("x", nat_rec(zero_t()));
  auto id = typ::r2(typ::r1(System::ttr_zero, c, "x"), "x");
  auto redex = typ::r3(id, zero_typing(System::ttr_zero));
  out.emplace_back(redex, zero_typing(System::ttr_zero));
  return out;
}

}  // namespace ttr::der
