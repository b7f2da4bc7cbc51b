#pragma once
// Canonical typing derivations: the numeral constructors, the two storage
// operators T1 and T2 at their operator types, the propositional recursion
// example, and small corpora reused by tests and the fixture generator.

#include <utility>
#include <vector>

#include "ttr/formula.hpp"
#include "ttr/subtyping.hpp"
#include "ttr/typing.hpp"

namespace ttr::der {

// Function symbols 0 and s plus the induction predicate N.
fml::Signature numeral_signature();

// N^r[t]: the least fixed point typing recursive numerals at index t.
fml::FormulaPtr nat_rec(const fml::FoTermPtr& t);

// Builders below take the surrounding context; local hypotheses and
// generalized variables are chosen fresh against it. Each returns a
// derivation whose root context is exactly `ambient`.

// 0-bar : N^r[0]; uses only rules available in the restricted system.
typ::TyPtr zero_typing(typ::System sys, const typ::Context& ambient = {});

// s-bar : !y (N^r[y] -> N^r[s(y)]).
typ::TyPtr succ_typing(const typ::Context& ambient = {});

// delta : ~~N^r[0].
typ::TyPtr delta_typing(const typ::Context& ambient = {});

// G : !y (~~N^r[y] -> ~~N^r[s(y)]).
typ::TyPtr g_typing(const typ::Context& ambient = {});

// T1_rec : !x (N^{r*}[x] -> ~~N^r[x]) under the one-variable transform
// (F_X = ~X); ends in the fixed-point rule.
typ::TyPtr t1_typing();

// The inclusion chain N^{r*}[x] ⊆ R → (D → (R → ~~N^r[x])) under the
// two-variable transform, with the interface types it targets.
struct StorageChain {
  fml::FormulaPtr nr_star;     // N^{r*}[x]
  fml::FormulaPtr big_r, d_f;  // R and D = R -> ~~N^r[0]
  fml::FormulaPtr f_x;         // R -> (D -> (R -> ~~N^r[x]))
  sub::SubPtr incl;
};
StorageChain storage_chain();

// T2_rec : !x (N^{r*}[x] -> ~~N^r[x]) under the two-variable transform.
typ::TyPtr t2_typing();

// lam f x. x : N^r for the index-free numeral type mu N (!X ((N->X)->(X->X)));
// five nodes, valid in the propositional and restricted systems alike.
typ::TyPtr prop_nat_typing(typ::System sys);

// remark_term : (B -> (B -> B)) -> B with B = mu C ((!X X) -> C), in the
// propositional system; types a subject whose evaluation never terminates.
typ::TyPtr remark_typing();

// Derivations valid in the restricted system (inputs for the lifting tests).
std::vector<typ::TyPtr> restricted_corpus();

// Pairs (d, d') with d typing a redex and d' its reduct at the same type.
std::vector<std::pair<typ::TyPtr, typ::TyPtr>> conservation_pairs();

}  // namespace ttr::der
