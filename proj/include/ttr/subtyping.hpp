#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ttr/formula.hpp"

namespace ttr::sub {

// Inclusion calculus between formulas. Derivations are explicit proof
// objects; each node stores its conclusion and whatever instantiation data
// its rule needs, so checking is purely local. There is no inference.
enum class SubRule {
  ax,           // A ⊆ A
  arrow,        // A ⊆ A', B ⊆ B'  ⟹  A'→B ⊆ A→B'
  forall_ig,    // A[G/v] ⊆ B  ⟹  ∀vA ⊆ B (G arbitrary formula or term)
  forall_ig0,   // weak form: G a term, or a predicate variable/symbol
  forall_id,    // A ⊆ B  ⟹  A ⊆ ∀vB (v not free in A)
  eq,           // rewrite one first-order position by an equation instance
  tr,           // A ⊆ D, D ⊆ B  ⟹  A ⊆ B
  mu_d,         // unfold(M) ⊆ M
  mu_prime_g,   // M ⊆ unfold(M)
  mu_g,         // D[E/C(x⃗)] ⊆ E  ⟹  μCx⃗D<t⃗> ⊆ E[t⃗/x⃗]
};

// zero = the ⊆₀ restriction: forall_ig and mu_prime_g are unavailable.
enum class Mode { full, zero };

const char* rule_name(SubRule r);

struct SubDerivation;
using SubPtr = std::shared_ptr<const SubDerivation>;

struct SubDerivation {
  SubRule rule;
  fml::FormulaPtr lhs, rhs;
  std::vector<SubPtr> premises;

  std::string var;                     // forall_id: the generalized variable
  fml::FoTermPtr term_g;               // forall_ig/ig0: first-order payload
  std::optional<fml::SubstSo> pred_g;  // forall_ig/ig0: second-order payload
  fml::FoTermPtr eq_from, eq_to;       // eq: replaced subterm and replacement
  fml::FormulaPtr mu_e;                // mu_g: the target formula E
};

SubPtr make_node(SubDerivation n);

// Builders compute the conclusion from the premises and payloads. They only
// assemble nodes; validity is established by check_sub.
SubPtr ax(fml::FormulaPtr a);
SubPtr arrow(SubPtr left, SubPtr right);
SubPtr forall_ig(fml::FormulaPtr forall_lhs, fml::FoTermPtr g, SubPtr premise);
SubPtr forall_ig(fml::FormulaPtr forall_lhs, fml::SubstSo g, SubPtr premise);
SubPtr forall_ig0(fml::FormulaPtr forall_lhs, fml::FoTermPtr g, SubPtr premise);
SubPtr forall_ig0(fml::FormulaPtr forall_lhs, fml::SubstSo g, SubPtr premise);
SubPtr forall_id(std::string var, SubPtr premise);
SubPtr eq_step(fml::FoTermPtr from, fml::FoTermPtr to, fml::FormulaPtr new_rhs,
               SubPtr premise);
SubPtr tr(SubPtr left, SubPtr right);
SubPtr mu_d(fml::FormulaPtr mu);
SubPtr mu_prime_g(fml::FormulaPtr mu);
SubPtr mu_g(fml::FormulaPtr mu_lhs, fml::FormulaPtr e, SubPtr premise);

struct check_error : std::runtime_error {
  std::string path;    // premise indices from the root, e.g. "/0/1"
  std::string reason;  // the side condition that failed
  check_error(std::string path_, std::string reason_, const std::string& rule);
};

// Validates every node against its rule and mode; returns the root
// conclusion. notes, when given, collects benign remarks (e.g. bound-variable
// renaming while instantiating a μg target).
std::pair<fml::FormulaPtr, fml::FormulaPtr> check_sub(
    const SubPtr& d, const fml::EquationSystem& eqs, Mode mode,
    std::vector<std::string>* notes = nullptr);

// Substitution into a whole derivation: same rule skeleton, conclusion
// A[G/v] ⊆ B[G/v]. Variables generalized inside the derivation are renamed
// as needed; equation instances are carried through pointwise.
SubPtr subst_derivation(const SubPtr& d, const std::string& v,
                        const fml::FoTermPtr& g);
SubPtr subst_derivation(const SubPtr& d, const std::string& x,
                        const fml::SubstSo& g, fml::PredSort sort);

// Closure of ⊆ under formula contexts: from a verified base A ⊆ B, derive
// d[A/hole] ⊆ d[B/hole] when every free occurrence of the hole in d is
// positive (mono_pos), or d[B/hole] ⊆ d[A/hole] when every occurrence is
// negative (mono_neg). params name the hole's argument slots, matching the
// first-order variables free in the base conclusion. Output avoids the
// strong rules, so it stays valid in zero mode whenever the base is.
SubPtr mono_pos(const fml::FormulaPtr& d, const std::string& hole,
                fml::PredSort sort, const std::vector<std::string>& params,
                const SubPtr& base);
SubPtr mono_neg(const fml::FormulaPtr& d, const std::string& hole,
                fml::PredSort sort, const std::vector<std::string>& params,
                const SubPtr& base);

// Rewrites every mu_prime_g node into a mu_g whose premise factors the
// unfolding through a monotonicity derivation; the conclusion of every
// rewritten node is preserved verbatim.
SubPtr eliminate_mu_prime(const SubPtr& d);

// Lifts a zero-mode derivation along a Gödel transformation: conclusions are
// transformed, quantifier nodes over a predicate variable X fan out into a
// |V_X|-fold sequence. Throws check_error when the configuration cannot
// cover a node (missing entry, arity mismatch, non-uniform entries, or an
// instantiation by a predicate symbol).
SubPtr godel_lift(const SubPtr& d, const fml::GodelConfig& cfg);

// Witnesses for the representative of an arrow type: A ⊆ Rep(A) (to_rep)
// and Rep(A) ⊆ A (from_rep), both valid in zero mode.
SubPtr to_rep(const fml::FormulaPtr& arrow_type);
SubPtr from_rep(const fml::FormulaPtr& arrow_type);

// Number of first-order positions at which b is a with `from` replaced by
// `to`; -1 when the trees differ in any other way.
int rewrite_positions(const fml::FormulaPtr& a, const fml::FormulaPtr& b,
                      const fml::FoTermPtr& from, const fml::FoTermPtr& to);

// File format: an optional header of "fn f/k", "pred P/k" and
// "equation t = u" lines, a blank line, then one node per block:
//   rule {
//     left: <formula>
//     right: <formula>
//     ...instantiation fields...
//     <premise blocks>
//   }
// Printing is canonical (two-space indent); files written by print_sub_file
// parse back bit-exactly.
struct SubFile {
  fml::Signature sig;
  fml::EquationSystem eqs;
  SubPtr root;
};

SubFile parse_sub_file(std::string_view text);
std::string print_sub_file(const SubFile& f);

// Line-level hooks shared with the typing-derivation format.
SubPtr parse_sub_node(const std::vector<std::string>& lines, std::size_t& i,
                      const fml::Signature& sig);
void print_sub_node(std::string& out, const SubPtr& d, int indent);

}  // namespace ttr::sub
