#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "support/rand_formulas.hpp"
#include "support/rand_subderiv.hpp"
#include "ttr/formula.hpp"
#include "ttr/subtyping.hpp"

namespace fml = ttr::fml;
namespace sb = ttr::sub;
using ttr::testsupport::DerivGen;
using ttr::testsupport::node_invariant_violation;
using ttr::testsupport::random_formula;
using ttr::testsupport::test_signature;

namespace {

const fml::Signature kSig = test_signature();

fml::FormulaPtr parse(const std::string& s) { return fml::parse_formula(s, kSig); }

fml::FoTermPtr pt(const std::string& s) { return fml::parse_fo_term(s, kSig); }

bool alpha(const fml::FormulaPtr& a, const fml::FormulaPtr& b) {
  return fml::alpha_eq_formula(a, b);
}

bool same_skeleton(const sb::SubPtr& a, const sb::SubPtr& b) {
  if (a->rule != b->rule || a->premises.size() != b->premises.size())
    return false;
  if (!alpha(a->lhs, b->lhs) || !alpha(a->rhs, b->rhs)) return false;
  for (std::size_t i = 0; i < a->premises.size(); ++i)
    if (!same_skeleton(a->premises[i], b->premises[i])) return false;
  return true;
}

bool has_rule(const sb::SubPtr& d, sb::SubRule r) {
  if (d->rule == r) return true;
  for (const auto& p : d->premises)
    if (has_rule(p, r)) return true;
  return false;
}

const char* kNatRecProp = "mu N . !X ((N -> X) -> (X -> X)) <>";

// Signature without predicate symbols, for the numeral fixtures.
fml::Signature num_sig() {
  fml::Signature s;
  s.fns = {{"0", 0}, {"s", 1}};
  return s;
}

// The recursive numeral type, its Gödel transform under the two-variable
// configuration, and the inclusion chain that feeds the second storage
// operator's typing: N^{r*}[x] ⊆ R → (D → (R → ¬¬N^r[x])).
struct ChainFixture {
  fml::FormulaPtr nr;       // mu N x . Phi <x>
  fml::FormulaPtr nr_star;  // its transform
  fml::FormulaPtr big_r, d_f, f_x;
  sb::SubPtr root;
};

ChainFixture build_chain() {
  using fml::Formula;
  using fml::FoTerm;
  ChainFixture c;
  auto sig = num_sig();
  c.nr = fml::parse_formula(
      "mu N x . !X ((!y (N(y) -> X(s(y)))) -> (X(0) -> X(x))) <x>", sig);
  c.nr_star = fml::godel(c.nr, fml::godel_double_config());

  auto x = FoTerm::var("x");
  auto y = FoTerm::var("y");
  auto nr_at = [&](const fml::FoTermPtr& t) {
    return fml::subst_fo(c.nr, {{"x", t}});
  };
  auto nn = [&](const fml::FoTermPtr& t) { return fml::neg(fml::neg(nr_at(t))); };

  auto x0 = Formula::pred_var("X");
  auto p_y = Formula::arrow(
      x0, Formula::arrow(Formula::arrow(x0, nn(FoTerm::fn("0"))),
                         Formula::arrow(x0, nn(y))));
  c.big_r = Formula::forall_so(
      "X", Formula::forall_fo(
               "y", Formula::arrow(
                        p_y, Formula::arrow(x0, nn(FoTerm::fn("s", {y}))))));
  c.d_f = Formula::arrow(c.big_r, nn(FoTerm::fn("0")));
  auto f_at = [&](const fml::FoTermPtr& t) {
    return Formula::arrow(c.big_r,
                          Formula::arrow(c.d_f, Formula::arrow(c.big_r, nn(t))));
  };
  c.f_x = f_at(x);

  // R, specialized at itself and at y, already reads as F[y] → (R → ¬¬N^r[sy]).
  auto spine = Formula::arrow(
      f_at(y), Formula::arrow(c.big_r, nn(FoTerm::fn("s", {y}))));
  auto n_y = sb::forall_ig(Formula::forall_fo("y", spine), y, sb::ax(spine));
  auto n_x = sb::forall_ig(c.big_r, fml::SubstSo{{}, c.big_r}, n_y);
  auto p1 = sb::forall_id("y", n_x);
  auto b = Formula::arrow(c.d_f, Formula::arrow(c.big_r, nn(x)));
  auto arr = sb::arrow(p1, sb::ax(b));

  auto phi_f = fml::subst_sym(c.nr_star->sub1, "N", fml::SubstSo{{"x"}, c.f_x});
  auto body1 = fml::subst_so(phi_f->sub1, phi_f->name,
                             fml::SubstSo{{"w"}, c.big_r});
  auto n_xp = sb::forall_ig(
      body1, fml::SubstSo{{"w"}, fml::neg(nr_at(FoTerm::var("w")))}, arr);
  auto n_xstar = sb::forall_ig(phi_f, fml::SubstSo{{"w"}, c.big_r}, n_xp);
  c.root = sb::mu_g(c.nr_star, c.f_x, n_xstar);
  return c;
}

}  // namespace

TEST_CASE("unfolding inclusion and axiom checking") {
  auto nr = parse(kNatRecProp);
  auto d = sb::mu_d(nr);
  for (auto mode : {sb::Mode::full, sb::Mode::zero}) {
    auto [l, r] = sb::check_sub(d, {}, mode);
    CHECK(alpha(r, nr));
    CHECK(alpha(l, parse("!X (((mu N . !X ((N -> X) -> (X -> X)) <>) -> X) "
                         "-> (X -> X))")));
  }

  sb::SubDerivation bad;
  bad.rule = sb::SubRule::ax;
  bad.lhs = parse("X");
  bad.rhs = parse("Y");
  try {
    sb::check_sub(sb::make_node(bad), {}, sb::Mode::full);
    FAIL("mismatched axiom accepted");
  } catch (const sb::check_error& e) {
    CHECK(e.reason == "conclusion sides differ");
    CHECK(std::string(e.what()).find("conclusion sides differ") !=
          std::string::npos);
  }
}

TEST_CASE("numeral transform chain") {
  auto c = build_chain();
  auto [l, r] = sb::check_sub(c.root, {}, sb::Mode::full);
  CHECK(alpha(l, c.nr_star));
  CHECK(alpha(r, c.f_x));
  CHECK(node_invariant_violation(c.root, false).value_or("") == "");

  // The strong instantiations keep it out of the restricted calculus.
  CHECK_THROWS_AS(sb::check_sub(c.root, {}, sb::Mode::zero), sb::check_error);
}

TEST_CASE("structural rule diagnostics") {
  auto q = parse("Q");
  auto p0 = parse("P(0)");

  SUBCASE("premise counts") {
    sb::SubDerivation n;
    n.rule = sb::SubRule::tr;
    n.lhs = q;
    n.rhs = q;
    n.premises = {sb::ax(q)};
    try {
      sb::check_sub(sb::make_node(n), {}, sb::Mode::full);
      FAIL("wrong premise count accepted");
    } catch (const sb::check_error& e) {
      CHECK(e.reason == "expected 2 premises, found 1");
    }
  }

  SUBCASE("transitivity must chain") {
    auto d = sb::tr(sb::ax(q), sb::ax(p0));
    try {
      sb::check_sub(d, {}, sb::Mode::full);
      FAIL("broken chain accepted");
    } catch (const sb::check_error& e) {
      CHECK(e.reason == "chained premises do not meet");
    }
  }

  SUBCASE("arrow orientation") {
    auto d = sb::arrow(sb::ax(q), sb::ax(p0));
    CHECK(alpha(sb::check_sub(d, {}, sb::Mode::zero).first, parse("Q -> P(0)")));
    sb::SubDerivation n = *d;
    n.premises = {sb::ax(p0), sb::ax(q)};
    CHECK_THROWS_AS(sb::check_sub(sb::make_node(n), {}, sb::Mode::full),
                    sb::check_error);
  }

  SUBCASE("generalization needs a fresh variable") {
    auto d = sb::forall_id("x", sb::ax(parse("P(x)")));
    try {
      sb::check_sub(d, {}, sb::Mode::full);
      FAIL("captured generalization accepted");
    } catch (const sb::check_error& e) {
      CHECK(e.reason == "generalized variable occurs free on the left");
    }
    auto ok = sb::forall_id("y", sb::ax(parse("P(x)")));
    CHECK(alpha(sb::check_sub(ok, {}, sb::Mode::zero).second,
                parse("!y P(x)")));
  }

  SUBCASE("equation steps") {
    fml::EquationSystem eqs;
    eqs.emplace_back(pt("min(x, 0)"), pt("0"));
    auto prem = sb::ax(parse("P(min(z, 0))"));
    auto good = sb::eq_step(pt("min(z, 0)"), pt("0"), parse("P(0)"), prem);
    auto [l, r] = sb::check_sub(good, eqs, sb::Mode::zero);
    CHECK(alpha(l, parse("P(min(z, 0))")));
    CHECK(alpha(r, parse("P(0)")));

    auto unmatched =
        sb::eq_step(pt("min(z, 0)"), pt("s(0)"), parse("P(s(0))"), prem);
    try {
      sb::check_sub(unmatched, eqs, sb::Mode::zero);
      FAIL("non-instance accepted");
    } catch (const sb::check_error& e) {
      CHECK(e.reason == "equation instance matches no equation");
    }

    auto lazy = sb::eq_step(pt("min(z, 0)"), pt("0"), parse("P(min(z, 0))"),
                            prem);
    try {
      sb::check_sub(lazy, eqs, sb::Mode::zero);
      FAIL("no-op rewrite accepted");
    } catch (const sb::check_error& e) {
      CHECK(e.reason == "rewrite changes zero positions");
    }

    auto wide_prem = sb::ax(parse("P(min(z, 0)) -> P(min(z, 0))"));
    auto wide = sb::eq_step(pt("min(z, 0)"), pt("0"),
                            parse("P(0) -> P(0)"), wide_prem);
    try {
      sb::check_sub(wide, eqs, sb::Mode::zero);
      FAIL("double rewrite accepted");
    } catch (const sb::check_error& e) {
      CHECK(e.reason == "rewrite changes more than one position");
    }
  }
}

TEST_CASE("mode gating") {
  auto q = parse("Q");

  // A formula payload needs the strong instantiation rule.
  auto inst = parse("(Q -> Q) -> Q");
  auto strong = sb::forall_ig(parse("!X (X -> Q)"),
                              fml::SubstSo{{}, parse("Q -> Q")}, sb::ax(inst));
  CHECK(alpha(sb::check_sub(strong, {}, sb::Mode::full).first,
              parse("!X (X -> Q)")));
  try {
    sb::check_sub(strong, {}, sb::Mode::zero);
    FAIL("strong instantiation accepted in zero mode");
  } catch (const sb::check_error& e) {
    CHECK(e.reason == "not available in zero mode");
  }

  // The same payload under the weak rule fails in both modes.
  auto weak = sb::forall_ig0(parse("!X (X -> Q)"),
                             fml::SubstSo{{}, parse("Q -> Q")}, sb::ax(inst));
  for (auto mode : {sb::Mode::full, sb::Mode::zero}) {
    try {
      sb::check_sub(weak, {}, mode);
      FAIL("compound weak payload accepted");
    } catch (const sb::check_error& e) {
      CHECK(e.reason == "payload must be a predicate variable or symbol");
    }
  }

  // Weak payloads: variables, symbols, and terms all pass in zero mode.
  auto by_sym = sb::forall_ig0(parse("!X (X -> Q)"),
                               fml::SubstSo{{}, parse("Q")}, sb::ax(parse("Q -> Q")));
  CHECK(alpha(sb::check_sub(by_sym, {}, sb::Mode::zero).second, parse("Q -> Q")));

  auto strong_mu = sb::mu_prime_g(parse(kNatRecProp));
  sb::check_sub(strong_mu, {}, sb::Mode::full);
  try {
    sb::check_sub(strong_mu, {}, sb::Mode::zero);
    FAIL("strong unfolding accepted in zero mode");
  } catch (const sb::check_error& e) {
    CHECK(e.reason == "not available in zero mode");
    CHECK(std::string(e.what()).find("mu_prime_g") != std::string::npos);
  }
  (void)q;
}

TEST_CASE("fixed point target diagnostics") {
  auto c = build_chain();
  sb::SubDerivation n = *c.root;
  n.mu_e = c.big_r;  // wrong target
  CHECK_THROWS_AS(sb::check_sub(sb::make_node(n), {}, sb::Mode::full),
                  sb::check_error);

  sb::SubDerivation empty = *c.root;
  empty.premises.clear();
  try {
    sb::check_sub(sb::make_node(empty), {}, sb::Mode::full);
    FAIL("missing premise accepted");
  } catch (const sb::check_error& e) {
    CHECK(e.reason == "expected 1 premises, found 0");
  }

  sb::SubDerivation noe = *c.root;
  noe.mu_e = nullptr;
  try {
    sb::check_sub(sb::make_node(noe), {}, sb::Mode::full);
    FAIL("missing target accepted");
  } catch (const sb::check_error& e) {
    CHECK(e.reason == "missing target formula");
  }
}

TEST_CASE("derivation substitution") {
  SUBCASE("identity substitution") {
    auto c = build_chain();
    auto d = sb::subst_derivation(c.root, "x", fml::FoTerm::var("x"));
    CHECK(same_skeleton(d, c.root));
    sb::check_sub(d, {}, sb::Mode::full);
  }

  SUBCASE("fresh symbol substitution leaves a node alone") {
    auto d = sb::mu_d(parse(kNatRecProp));
    auto d2 = sb::subst_derivation(d, "S", fml::SubstSo{{}, parse("Q")},
                                   fml::PredSort::Sym);
    CHECK(same_skeleton(d2, d));
    sb::check_sub(d2, {}, sb::Mode::zero);
  }

  SUBCASE("equation instances are carried through") {
    fml::EquationSystem eqs;
    eqs.emplace_back(pt("min(x, 0)"), pt("0"));
    auto e_node = sb::eq_step(pt("min(z, 0)"), pt("0"), parse("P(0)"),
                              sb::ax(parse("P(min(z, 0))")));
    sb::check_sub(e_node, eqs, sb::Mode::zero);
    auto d2 = sb::subst_derivation(e_node, "z", pt("s(0)"));
    auto [l, r] = sb::check_sub(d2, eqs, sb::Mode::zero);
    CHECK(alpha(l, parse("P(min(s(0), 0))")));
    CHECK(alpha(r, parse("P(0)")));
  }

  SUBCASE("generalized variables move out of the way") {
    auto d = sb::forall_id("y", sb::ax(parse("P(x)")));
    sb::check_sub(d, {}, sb::Mode::zero);
    auto d2 = sb::subst_derivation(d, "x", pt("s(y)"));
    auto [l, r] = sb::check_sub(d2, {}, sb::Mode::zero);
    CHECK(alpha(l, parse("P(s(y))")));
    CHECK(alpha(r, parse("!z P(s(y))")));
    CHECK(d2->var != "y");
  }

  SUBCASE("random corpus closure") {
    DerivGen gen(2026, sb::Mode::zero);
    gen.seed(10);
    gen.grow(60);
    std::mt19937_64 rng(7);
    int done = 0;
    for (const auto& d : gen.pool) {
      const char* vars[] = {"x", "y", "z"};
      auto t = ttr::testsupport::random_fo_term(rng, 1);
      std::string v = vars[rng() % 3];
      auto d2 = sb::subst_derivation(d, v, t);
      auto [l, r] = sb::check_sub(d2, gen.eqs, sb::Mode::zero);
      CHECK(alpha(l, fml::subst_fo(d->lhs, {{v, t}})));
      CHECK(alpha(r, fml::subst_fo(d->rhs, {{v, t}})));
      ++done;
    }
    CHECK(done >= 50);
  }
}

TEST_CASE("monotonicity witnesses") {
  // Verified base with a first-order parameter in play.
  auto base_body = parse("Q -> P(w)");
  auto base_lhs = parse("!Y (Y -> P(w))");
  auto base = sb::forall_ig0(base_lhs, fml::SubstSo{{}, parse("Q")},
                             sb::ax(base_body));
  sb::check_sub(base, {}, sb::Mode::zero);

  auto base0_body = parse("Q -> P(0)");
  auto base0 = sb::forall_ig0(parse("!Y (Y -> P(0))"),
                              fml::SubstSo{{}, parse("Q")}, sb::ax(base0_body));

  std::mt19937_64 rng(40409);
  int pos_cases = 0, neg_cases = 0, mu_cases = 0;
  for (int i = 0; i < 300; ++i) {
    auto ctx = random_formula(rng, 3);
    bool unary = i % 2 == 0;
    std::string hole = unary ? "Z" : "X";
    std::vector<std::string> params = unary ? std::vector<std::string>{"w"}
                                            : std::vector<std::string>{};
    const auto& b = unary ? base : base0;
    auto pol = fml::polarity(ctx, hole, fml::PredSort::Var);
    fml::SubstSo sl{params, b->lhs}, sr{params, b->rhs};
    if (ctx->kind == fml::FKind::Mu) ++mu_cases;
    if (pol.first) {
      auto m = sb::mono_pos(ctx, hole, fml::PredSort::Var, params, b);
      auto [l, r] = sb::check_sub(m, {}, sb::Mode::zero);
      CHECK(alpha(l, fml::subst_so(ctx, hole, sl)));
      CHECK(alpha(r, fml::subst_so(ctx, hole, sr)));
      ++pos_cases;
    } else if (pol.second) {
      auto m = sb::mono_neg(ctx, hole, fml::PredSort::Var, params, b);
      auto [l, r] = sb::check_sub(m, {}, sb::Mode::zero);
      CHECK(alpha(l, fml::subst_so(ctx, hole, sr)));
      CHECK(alpha(r, fml::subst_so(ctx, hole, sl)));
      ++neg_cases;
    }
  }
  CHECK(pos_cases > 40);
  CHECK(neg_cases > 20);

  CHECK_THROWS_AS(
      sb::mono_neg(parse("X"), "X", fml::PredSort::Var, {}, base0),
      std::invalid_argument);
}

TEST_CASE("strong unfolding elimination") {
  SUBCASE("propositional numerals") {
    auto d = sb::mu_prime_g(parse(kNatRecProp));
    auto e = sb::eliminate_mu_prime(d);
    CHECK(e != d);
    CHECK(!has_rule(e, sb::SubRule::mu_prime_g));
    for (auto mode : {sb::Mode::full, sb::Mode::zero}) {
      auto [l, r] = sb::check_sub(e, {}, mode);
      CHECK(alpha(l, d->lhs));
      CHECK(alpha(r, d->rhs));
    }
  }

  SUBCASE("untouched derivations are shared") {
    auto d = sb::mu_d(parse(kNatRecProp));
    CHECK(sb::eliminate_mu_prime(d) == d);
  }

  SUBCASE("nested occurrences") {
    auto m = parse(kNatRecProp);
    auto d = sb::arrow(sb::mu_prime_g(m), sb::mu_prime_g(m));
    auto e = sb::eliminate_mu_prime(d);
    CHECK(!has_rule(e, sb::SubRule::mu_prime_g));
    auto [l, r] = sb::check_sub(e, {}, sb::Mode::zero);
    CHECK(alpha(l, d->lhs));
    CHECK(alpha(r, d->rhs));
  }

  SUBCASE("parameters and over-terms") {
    auto m = parse("mu K w . (P(w) -> K(s(w))) <0>");
    auto d = sb::mu_prime_g(m);
    auto e = sb::eliminate_mu_prime(d);
    auto [l, r] = sb::check_sub(e, {}, sb::Mode::zero);
    CHECK(alpha(l, d->lhs));
    CHECK(alpha(r, d->rhs));
  }

  SUBCASE("bound variable renaming is reported") {
    auto m = parse("mu K w . ((!x P(x)) -> K(s(w))) <x>");
    auto e = sb::eliminate_mu_prime(sb::mu_prime_g(m));
    std::vector<std::string> notes;
    sb::check_sub(e, {}, sb::Mode::full, &notes);
    REQUIRE(!notes.empty());
    CHECK(notes[0].find("renamed bound variables") != std::string::npos);
  }
}

TEST_CASE("representative witnesses") {
  std::mt19937_64 rng(550);
  int cases = 0;
  while (cases < 200) {
    auto a = random_formula(rng, 3);
    fml::FormulaPtr rep;
    try {
      rep = fml::rep_formula(a);
    } catch (const std::exception&) {
      continue;
    }
    auto up = sb::to_rep(a);
    auto down = sb::from_rep(a);
    auto [ul, ur] = sb::check_sub(up, {}, sb::Mode::zero);
    auto [dl, dr] = sb::check_sub(down, {}, sb::Mode::zero);
    CHECK(alpha(ul, a));
    CHECK(alpha(ur, rep));
    CHECK(alpha(dl, rep));
    CHECK(alpha(dr, a));
    ++cases;
  }
}

TEST_CASE("godel lifting") {
  auto neg_cfg = fml::godel_negation_config();
  auto dbl_cfg = fml::godel_double_config();

  SUBCASE("unfolding node under the negative translation") {
    auto nr = parse(kNatRecProp);
    auto lifted = sb::godel_lift(sb::mu_d(nr), neg_cfg);
    auto [l, r] = sb::check_sub(lifted, {}, sb::Mode::zero);
    auto nr_star = parse("mu N . !X ((N -> ~X) -> (~X -> ~X)) <>");
    CHECK(alpha(r, nr_star));
    CHECK(alpha(l, fml::unfold(nr_star)));
  }

  SUBCASE("derivations without predicate variables are fixed") {
    auto d = sb::ax(parse("P(0) -> Q"));
    auto lifted = sb::godel_lift(d, neg_cfg);
    CHECK(alpha(lifted->lhs, d->lhs));
    CHECK(alpha(lifted->rhs, d->rhs));
  }

  SUBCASE("generalization fans out over the variable set") {
    auto d = sb::forall_id("X", sb::ax(parse("Q")));
    auto lifted = sb::godel_lift(d, dbl_cfg);
    REQUIRE(lifted->rule == sb::SubRule::forall_id);
    REQUIRE(lifted->premises.size() == 1);
    CHECK(lifted->premises[0]->rule == sb::SubRule::forall_id);
    auto [l, r] = sb::check_sub(lifted, {}, sb::Mode::zero);
    CHECK(alpha(l, parse("Q")));
    CHECK(alpha(r, parse("!X !X' Q")));
  }

  SUBCASE("uniform variable payloads lift to chains") {
    auto d = sb::forall_ig0(parse("!X (X -> Q)"),
                            fml::SubstSo{{}, parse("Y")},
                            sb::ax(parse("Y -> Q")));
    sb::check_sub(d, {}, sb::Mode::zero);
    auto lifted = sb::godel_lift(d, dbl_cfg);
    REQUIRE(lifted->rule == sb::SubRule::forall_ig0);
    REQUIRE(lifted->premises.size() == 1);
    CHECK(lifted->premises[0]->rule == sb::SubRule::forall_ig0);
    auto [l, r] = sb::check_sub(lifted, {}, sb::Mode::zero);
    CHECK(alpha(l, parse("!X !X' ((X -> (X' -> _|_)) -> Q)")));
    CHECK(alpha(r, parse("(Y -> (Y' -> _|_)) -> Q")));
  }

  SUBCASE("symbol payloads cannot lift") {
    auto d = sb::forall_ig0(parse("!X (Q -> Q)"), fml::SubstSo{{}, parse("Q")},
                            sb::ax(parse("Q -> Q")));
    sb::check_sub(d, {}, sb::Mode::zero);
    try {
      sb::godel_lift(d, neg_cfg);
      FAIL("symbol payload lifted");
    } catch (const sb::check_error& e) {
      CHECK(std::string(e.what()).find("predicate symbol") !=
            std::string::npos);
    }
  }

  SUBCASE("configurations must cover every variable") {
    fml::GodelConfig bare;  // no entries, no schema
    auto d = sb::forall_id("X", sb::ax(parse("Q")));
    CHECK_THROWS_AS(sb::godel_lift(d, bare), sb::check_error);
  }

  SUBCASE("lifted corpora stay valid") {
    DerivGen gen(90210, sb::Mode::zero);
    gen.allow_sym_payload = false;
    gen.plain_so_names = true;
    gen.seed(10);
    gen.grow(70);
    int lifted_count = 0;
    for (const auto& d : gen.pool) {
      auto lifted = sb::godel_lift(d, neg_cfg);
      auto [l, r] = sb::check_sub(lifted, gen.eqs, sb::Mode::zero);
      CHECK(alpha(l, fml::godel(d->lhs, neg_cfg)));
      CHECK(alpha(r, fml::godel(d->rhs, neg_cfg)));
      ++lifted_count;
    }
    CHECK(lifted_count >= 50);

    DerivGen gen2(90211, sb::Mode::zero);
    gen2.allow_sym_payload = false;
    gen2.plain_so_names = true;
    gen2.allow_eq = false;
    gen2.seed(10);
    gen2.grow(50);
    for (const auto& d : gen2.pool) {
      auto lifted = sb::godel_lift(d, dbl_cfg);
      auto [l, r] = sb::check_sub(lifted, gen2.eqs, sb::Mode::zero);
      CHECK(alpha(l, fml::godel(d->lhs, dbl_cfg)));
      CHECK(alpha(r, fml::godel(d->rhs, dbl_cfg)));
    }
  }
}

TEST_CASE("derivation files") {
  SUBCASE("chain fixture round trip") {
    auto c = build_chain();
    sb::SubFile f{num_sig(), {}, c.root};
    auto text = sb::print_sub_file(f);
    auto f2 = sb::parse_sub_file(text);
    CHECK(sb::print_sub_file(f2) == text);
    CHECK(same_skeleton(f2.root, c.root));
    sb::check_sub(f2.root, f2.eqs, sb::Mode::full);
  }

  SUBCASE("equations and signatures round trip") {
    fml::EquationSystem eqs;
    eqs.emplace_back(pt("min(x, 0)"), pt("0"));
    auto e_node = sb::eq_step(pt("min(z, 0)"), pt("0"), parse("P(0)"),
                              sb::ax(parse("P(min(z, 0))")));
    sb::SubFile f{kSig, eqs, e_node};
    auto text = sb::print_sub_file(f);
    auto f2 = sb::parse_sub_file(text);
    CHECK(sb::print_sub_file(f2) == text);
    REQUIRE(f2.eqs.size() == 1);
    sb::check_sub(f2.root, f2.eqs, sb::Mode::zero);
  }

  SUBCASE("parse failures carry line numbers") {
    CHECK_THROWS_AS(sb::parse_sub_file("frob {\n}\n"), fml::parse_error);
    CHECK_THROWS_AS(sb::parse_sub_file("ax {\n  left: Q\n"), fml::parse_error);
    CHECK_THROWS_AS(sb::parse_sub_file("ax {\n  pred: x Q\n}\n"),
                    fml::parse_error);
    CHECK_THROWS_AS(sb::parse_sub_file("ax {\n  left: Q\n  right: Q\n}\njunk\n"),
                    fml::parse_error);
    CHECK_THROWS_AS(sb::parse_sub_file("equation min(x, 0)\n\nax {\n}\n"),
                    fml::parse_error);
    try {
      sb::parse_sub_file("ax {\n  wrong: Q\n}\n");
      FAIL("unknown field accepted");
    } catch (const fml::parse_error& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }

  SUBCASE("generated corpus round trips") {
    DerivGen gen(31337, sb::Mode::zero);
    gen.seed(8);
    gen.grow(40);
    int n = 0;
    for (const auto& d : gen.pool) {
      sb::SubFile f{kSig, gen.eqs, d};
      auto text = sb::print_sub_file(f);
      auto f2 = sb::parse_sub_file(text);
      CHECK(sb::print_sub_file(f2) == text);
      CHECK(same_skeleton(f2.root, d));
      ++n;
    }
    CHECK(n >= 30);
  }
}

TEST_CASE("generated corpus invariants") {
  DerivGen zero_gen(777, sb::Mode::zero);
  zero_gen.seed(14);
  zero_gen.grow(110);
  int zero_n = 0;
  for (const auto& d : zero_gen.pool) {
    sb::check_sub(d, zero_gen.eqs, sb::Mode::zero);
    CHECK(node_invariant_violation(d, true).value_or("") == "");
    ++zero_n;
  }
  CHECK(zero_n >= 100);

  DerivGen full_gen(778, sb::Mode::full);
  full_gen.seed(14);
  full_gen.grow(110);
  int full_n = 0;
  for (const auto& d : full_gen.pool) {
    sb::check_sub(d, full_gen.eqs, sb::Mode::full);
    CHECK(node_invariant_violation(d, false).value_or("") == "");
    ++full_n;
  }
  CHECK(full_n >= 100);
}
