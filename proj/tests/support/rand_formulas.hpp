#pragma once

#include <random>
#include <string>
#include <vector>

#include "ttr/formula.hpp"

namespace ttr::testsupport {

inline fml::Signature test_signature() {
  fml::Signature sig;
  sig.fns = {{"0", 0}, {"s", 1}, {"min", 2}};
  sig.preds = {{"P", 1}, {"Q", 0}};
  return sig;
}

inline fml::FoTermPtr random_fo_term(std::mt19937_64& rng, int depth) {
  using fml::FoTerm;
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 5 : 3);
  switch (pick(rng)) {
    case 0: return FoTerm::var("x");
    case 1: return FoTerm::var("y");
    case 2: return FoTerm::var("z");
    case 3: return FoTerm::fn("0");
    case 4: return FoTerm::fn("s", {random_fo_term(rng, depth - 1)});
    default:
      return FoTerm::fn("min", {random_fo_term(rng, depth - 1),
                                random_fo_term(rng, depth - 1)});
  }
}

// Random well-formed formula over the test signature. Predicate variables:
// X, Y (arity 0), Z (arity 1). Mu bodies place the bound symbol exactly once,
// on the right of an arrow, so construction invariants hold.
inline fml::FormulaPtr random_formula(std::mt19937_64& rng, int depth) {
  using fml::Formula;
  using fml::FoTerm;
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 99 : 29);
  int k = pick(rng);
  if (k < 5) return Formula::bot();
  if (k < 12) return Formula::pred_var("X");
  if (k < 17) return Formula::pred_var("Y");
  if (k < 22) return Formula::pred_var("Z", {random_fo_term(rng, 1)});
  if (k < 27) return Formula::pred_sym("P", {random_fo_term(rng, 1)});
  if (k < 30) return Formula::pred_sym("Q");
  if (k < 60)
    return Formula::arrow(random_formula(rng, depth - 1),
                          random_formula(rng, depth - 1));
  if (k < 70) {
    static const char* vars[] = {"x", "y", "z"};
    return Formula::forall_fo(vars[k % 3], random_formula(rng, depth - 1));
  }
  if (k < 85) {
    static const char* vars[] = {"X", "Y"};
    return Formula::forall_so(vars[k % 2], random_formula(rng, depth - 1));
  }
  bool unary = k % 2 == 0;
  std::string sym = k % 3 == 0 ? "M" : "K";
  std::vector<std::string> params;
  std::vector<fml::FoTermPtr> param_vars, over;
  if (unary) {
    params = {"w"};
    param_vars = {FoTerm::var("w")};
    over = {random_fo_term(rng, 1)};
  }
  auto body = Formula::arrow(random_formula(rng, depth - 1),
                             Formula::pred_sym(sym, param_vars));
  if (k % 5 == 0) body = Formula::forall_so("X", body);
  return Formula::mu(sym, params, body, over);
}

}  // namespace ttr::testsupport
