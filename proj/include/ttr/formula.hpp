#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ttr::fml {

// First-order terms over a signature of function symbols. Constants are
// arity-0 applications; FoVar names are free or bound by !x / mu parameters.
struct FoTerm;
using FoTermPtr = std::shared_ptr<const FoTerm>;

struct FoTerm {
  bool is_var;
  std::string name;
  std::vector<FoTermPtr> args;  // FnApp only

  static FoTermPtr var(std::string name);
  static FoTermPtr fn(std::string name, std::vector<FoTermPtr> args = {});
};

bool fo_equal(const FoTermPtr& a, const FoTermPtr& b);
std::set<std::string> fo_vars(const FoTermPtr& t);

// Second-order formulas. Binders use names: ForallFo binds a first-order
// variable, ForallSo a predicate variable, Mu binds the predicate symbol C
// and its first-order parameters inside the body (the over-terms are outside
// the binder).
enum class FKind { Bot, PredVar, PredSym, Arrow, ForallFo, ForallSo, Mu };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  FKind kind;
  std::string name;                // PredVar/PredSym: predicate; ForallFo/So:
                                   // bound name; Mu: the symbol C
  std::vector<FoTermPtr> args;     // PredVar/PredSym: arguments; Mu: over-terms
  std::vector<std::string> params; // Mu: bound first-order parameters
  FormulaPtr sub1;                 // Arrow: left; Forall*/Mu: body
  FormulaPtr sub2;                 // Arrow: right

  static FormulaPtr bot();
  static FormulaPtr pred_var(std::string name, std::vector<FoTermPtr> args = {});
  static FormulaPtr pred_sym(std::string name, std::vector<FoTermPtr> args = {});
  static FormulaPtr arrow(FormulaPtr left, FormulaPtr right);
  static FormulaPtr forall_fo(std::string var, FormulaPtr body);
  static FormulaPtr forall_so(std::string var, FormulaPtr body);
  // Rejects bodies where C is absent, appears at the wrong arity, or occurs
  // negatively, and over-term lists whose length differs from params.
  static FormulaPtr mu(std::string sym, std::vector<std::string> params,
                       FormulaPtr body, std::vector<FoTermPtr> over);
};

FormulaPtr neg(FormulaPtr a);  // a -> _|_

enum class PredSort { Var, Sym };

// Equality up to renaming of bound variables of all three sorts.
bool alpha_eq_formula(const FormulaPtr& a, const FormulaPtr& b);
std::size_t formula_hash(const FormulaPtr& a);

std::set<std::string> fv_fo(const FormulaPtr& a);
std::set<std::string> fv2(const FormulaPtr& a);   // free predicate variables
std::set<std::string> fps(const FormulaPtr& a);   // free predicate symbols
bool fv2_contains(const FormulaPtr& a, std::string_view name, PredSort sort);

// Every predicate occurrence carries its arity as the argument count; the
// checks below walk a formula and report the arity of a name's free
// occurrences (nullopt when absent). Mixed arities raise.
std::optional<std::size_t> occurrence_arity(const FormulaPtr& a,
                                            std::string_view name, PredSort sort);

using FoSubst = std::map<std::string, FoTermPtr>;

FoTermPtr subst_fo_term(const FoTermPtr& t, const FoSubst& s);
FormulaPtr subst_fo(const FormulaPtr& a, const FoSubst& s);

// Payload of a second-order substitution: params name the argument slots of
// the replaced predicate, body is spliced with those slots instantiated.
struct SubstSo {
  std::vector<std::string> params;
  FormulaPtr body;
};

// Replace every free atom X(t1..tn) by body[t1/params...]; capture-avoiding
// for all binder sorts. subst_so targets predicate variables, subst_sym
// predicate symbols (also spliced for the Mu symbol when unfolding).
FormulaPtr subst_so(const FormulaPtr& a, std::string_view x, const SubstSo& g);
FormulaPtr subst_sym(const FormulaPtr& a, std::string_view c, const SubstSo& g);

// One unfolding of a least fixed point:
// mu C x⃗ . D <t⃗>  ↦  D[mu C x⃗ D <y⃗> / C(y⃗)][t⃗/x⃗].
FormulaPtr unfold(const FormulaPtr& mu);

// (positive, negative) signs of the name's free occurrences; absence yields
// (true, true).
std::pair<bool, bool> polarity(const FormulaPtr& a, std::string_view name,
                               PredSort sort);

struct WithoutArrow {
  std::string at;    // the unique atomic head ("_|_" for a bare bottom)
  PredSort sort;
  int kind;          // 1: at free in the formula, 2: bound
};
// nullopt means the formula contains an arrow.
std::optional<WithoutArrow> classify_arrow(const FormulaPtr& a);

struct RepView {
  std::vector<std::pair<char, std::string>> prefix;  // 'x' fo / 'X' so binders
  FormulaPtr left;
  FormulaPtr right;
};
// Rep(E→F)=E→F; Rep(∀vB)=∀vRep(B); Rep(μCx⃗B<t⃗>)=Rep(B)[μCx⃗B<y⃗>/C(y⃗)][t⃗/x⃗],
// returned as the prefix and the two sides of the final arrow.
FormulaPtr rep_formula(const FormulaPtr& a);
RepView rep(const FormulaPtr& a);

// Membership in the ∀-positive / ∀-negative classes (Ω+, Ω−).
std::pair<bool, bool> forall_polarity(const FormulaPtr& a);

// Closure: ⊥; B→A for A in the class; ∀vA; μ over a member.
bool is_bottom_type(const FormulaPtr& a);

// Forget the first-order part: argument lists drop, ∀x disappears, μ loses
// its parameters and over-terms.
FormulaPtr erase_diamond(const FormulaPtr& a);

struct GodelEntry {
  std::vector<std::string> vars;    // V_X, pairwise disjoint across entries
  std::vector<std::string> params;  // x1..xn matching the arity of X
  FormulaPtr body;                  // F_X
};

struct GodelConfig {
  std::map<std::string, GodelEntry> entries;
  // Fallback generating an entry for a variable at a given arity.
  std::function<GodelEntry(const std::string&, std::size_t)> schema;

  const GodelEntry& entry(const std::string& x, std::size_t arity) const;
  mutable std::map<std::string, GodelEntry> generated;
};

GodelConfig godel_negation_config();  // V_X = {X}, F_X = ~X(x⃗)
GodelConfig godel_double_config();    // V_X = {X, X'}, F_X = X(x⃗)→(X'(x⃗)→⊥)

// The six-clause transformation: symbol atoms fixed, X(t⃗) ↦ F_X[t⃗/x⃗],
// homomorphic on →/∀x/μ, ∀X fans out over V_X.
FormulaPtr godel(const FormulaPtr& a, const GodelConfig& cfg);

struct Signature {
  std::map<std::string, std::size_t> fns;
  std::map<std::string, std::size_t> preds;
};

using EquationSystem = std::vector<std::pair<FoTermPtr, FoTermPtr>>;

// First equation (either orientation) with one substitution instantiating it
// to (t, u): l·σ = t and r·σ = u.
std::optional<FoSubst> match_equation(const FoTermPtr& t, const FoTermPtr& u,
                                      const EquationSystem& eqs);

struct parse_error : std::runtime_error {
  std::size_t position;
  parse_error(const std::string& msg, std::size_t pos);
};

// Concrete syntax: "_|_", right-associative "->", "A, B -> C" sugar for
// A→(B→C), "!x"/"!X" quantifiers by case of the first letter, "~A",
// "mu C x1 .. xn . A <t1, .., tn>", atoms "X(t1,..,tn)" or bare "X".
// Undeclared capitalized names are predicate variables. Signature preamble
// lines for files: "fn s/1", "pred P/1".
FormulaPtr parse_formula(std::string_view src, const Signature& sig = {});
FoTermPtr parse_fo_term(std::string_view src, const Signature& sig = {});
Signature parse_signature_line(std::string_view line, Signature sig);
std::string print_signature(const Signature& sig);

std::string print_formula(const FormulaPtr& a);
std::string print_fo_term(const FoTermPtr& t);

}  // namespace ttr::fml
