#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ttr/formula.hpp"
#include "ttr/subtyping.hpp"
#include "ttr/term.hpp"

namespace ttr::typ {

// af2: no recursion (no least fixed points, no inclusion or fixed-point
// typing rules). ttr: the full system. ttr_diamond: the propositional
// fragment (arity-0 predicates, no first-order syntax anywhere).
// ttr_zero: ttr without the instantiation rules r5/r7 and the equation rule
// r8; inclusion nodes are checked in zero mode.
enum class System { af2, ttr, ttr_diamond, ttr_zero };

const char* system_name(System s);
std::optional<System> system_from_name(std::string_view name);

enum class TyRule {
  r1_axiom,
  r2_abs,
  r3_app,
  r4_gen_fo,
  r5_inst_fo,
  r6_gen_so,
  r7_inst_so,
  r8_eq,
  sub,
  y_fix,
};

const char* rule_name(TyRule r);

using Context = std::vector<std::pair<std::string, fml::FormulaPtr>>;

struct Judgment {
  System system = System::ttr;
  Context context;
  lam::TermPtr subject;
  fml::FormulaPtr type;
};

struct TypingDerivation;
using TyPtr = std::shared_ptr<const TypingDerivation>;

struct TypingDerivation {
  TyRule rule;
  Judgment concl;
  std::vector<TyPtr> premises;
  std::string var;                     // r2: bound; r4/r6: generalized
  fml::FoTermPtr term_u;               // r5
  std::optional<fml::SubstSo> pred_g;  // r7
  fml::FoTermPtr eq_from, eq_to;       // r8
  sub::SubPtr inclusion;               // sub
};

TyPtr make_node(TypingDerivation d);

// Builders; each computes the conclusion from its premises.
TyPtr r1(System sys, Context ctx, const std::string& x);
TyPtr r2(const TyPtr& prem, const std::string& x);
TyPtr r3(const TyPtr& fun, const TyPtr& arg);
TyPtr r4(const TyPtr& prem, const std::string& x);
TyPtr r5(const TyPtr& prem, fml::FoTermPtr u);
TyPtr r6(const TyPtr& prem, const std::string& x);
TyPtr r7(const TyPtr& prem, fml::SubstSo g);
TyPtr r8(const TyPtr& prem, fml::FoTermPtr from, fml::FoTermPtr to,
         fml::FormulaPtr rewritten);
TyPtr sub_incl(const TyPtr& prem, sub::SubPtr incl);
TyPtr y_fix(const TyPtr& prem);

struct check_error : std::runtime_error {
  std::string path;
  std::string reason;
  check_error(std::string path, std::string reason, TyRule rule);
};

// Validates every node: local rule side conditions, context sanity, subject
// shape, and the per-system rule gates. Inclusion subtrees are checked in
// zero mode for ttr_zero and in full mode otherwise. Returns the root
// judgment.
Judgment check_typing(const TyPtr& d, const fml::EquationSystem& eqs);

// Forgets the first-order skeleton of a ttr derivation: every type maps to
// its propositional shadow, first-order-only nodes (r4, r5, r8, and the
// first-order inclusion steps) collapse into their premises, and the result
// checks in ttr_diamond.
TyPtr erase_derivation(const TyPtr& d);

// Transforms every judgment of a ttr_zero derivation along a Gödel
// configuration; r6 nodes over X fan out into |V_X| stacked nodes and
// embedded inclusions are lifted. The result types the same term at the
// transformed formula.
TyPtr godel_lift_typing(const TyPtr& d, const fml::GodelConfig& cfg);

// File format: a "system <name>" line, then signature and equation lines as
// in the inclusion format, a blank line, then one block per node:
//   rule {
//     hyp: x : <formula>        (one per context entry, in order)
//     subject: <term>
//     type: <formula>
//     ...payload fields...
//     <inclusion block, for sub nodes>
//     <premise blocks>
//   }
struct TyFile {
  System system = System::ttr;
  fml::Signature sig;
  fml::EquationSystem eqs;
  TyPtr root;
};

TyFile parse_ty_file(std::string_view text);
std::string print_ty_file(const TyFile& f);

}  // namespace ttr::typ
