#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ttr/encodings.hpp"
#include "ttr/reduce.hpp"
#include "ttr/term.hpp"

namespace ttr::sto {

// Structural failure of the symbolic machinery: a head normal form of the
// wrong shape, a reused constant, or fuel running out mid-construction.
struct storage_error : std::runtime_error {
  explicit storage_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A tower theta(0..n) of terms: theta(0) head-reduces to the zero numeral and
// theta(m+1) head-reduces to \f_m \x_m (f_m) theta(m). Entries below the top
// may mention the binder names recorded for the levels above them.
struct SpecialApplication {
  long long n = 0;
  std::vector<lam::TermPtr> entries;  // index m in 0..n
  std::vector<std::string> fs, xs;    // binder names opened at level m+1
};

// Peels theta_n level by level, opening the two binders of each head normal
// form with fresh names; validates the tower invariants with the given fuel.
SpecialApplication build_special_application(const lam::TermPtr& theta_n,
                                             long long n,
                                             std::size_t fuel = lam::default_fuel);

// One symbolic constant standing for an unknown numeral argument at level m.
// parts holds the trail u_{m,1..3}, ..., u_{n-1,1..3} accumulated when the
// constant was introduced (empty for the initial level-n constant).
struct ConstantRecord {
  std::string name;
  long long m = 0;
  std::vector<lam::TermPtr> parts;
};

struct TraceNode {
  lam::TermPtr u;  // start of the segment
  lam::TermPtr v;  // its head normal form
};

// Head reduction of (T)x_n f driven entirely by the shape of each head
// normal form, with fresh constants standing in for the numeral's unfolding.
struct SymbolicTrace {
  long long n = 0;
  std::string f;  // name of the output variable
  std::vector<TraceNode> nodes;
  lam::TermPtr tau;  // argument of the final (f)tau
  std::vector<ConstantRecord> constants;  // creation order; [0] is level n
};

// Runs the construction: from (T)x_n f, each head normal form must apply the
// output variable to one argument (then the run ends) or apply a known
// constant to an unfolding triple u1 u2 u3. A node at level m continues from
// (u1)x_{m-1,...}u3 when m != 0 and from (u2)u3 when m = 0; spine arguments
// beyond the triple are carried into the continuation unchanged. Throws
// storage_error on any shape violation, constant reuse, or fuel exhaustion.
SymbolicTrace symbolic_run(const lam::TermPtr& op, long long n,
                           std::size_t fuel = lam::default_fuel);

// The substitution induced by a tower: variables are fixed, abstraction and
// application are homomorphic, and a constant at level m becomes entries(m)
// with every recorded binder f_k, x_k (k = m..n-1) replaced by the images of
// the first two components of the matching trail triple.
lam::TermPtr special_substitute(const lam::TermPtr& t,
                                const SpecialApplication& sa,
                                const std::vector<ConstantRecord>& constants);

struct SimulationResult {
  bool ok = false;
  std::string reason;           // empty when ok
  std::size_t final_steps = 0;  // head steps of the substituted start term
  lam::TermPtr final_term;      // its head normal form
  lam::TermPtr expected;        // (f) applied to the substituted tau
};

// Confirms that the symbolic trace predicts the concrete run: the substituted
// start term shares a reduct with every substituted node, and head-reduces to
// (f) applied to the substituted tau.
SimulationResult check_simulation(const SymbolicTrace& trace,
                                  const SpecialApplication& sa,
                                  std::size_t fuel = lam::default_fuel);

// Seeded generation of `count` pairwise-distinct closed terms, each
// beta-equivalent to numeral(kind, n); the first is always the canonical
// numeral. Wrappers: identity redexes, argument-dropping redexes, body
// padding behind an identity redex, and successor composition.
std::vector<lam::TermPtr> gen_theta_variants(enc::NumeralKind kind,
                                             long long n, std::uint64_t seed,
                                             int count);

// Non-linear first-order matching of u against a skeleton: holes bind locally
// closed subterms, repeated holes must bind alpha-equal terms, everything
// else must agree node by node.
std::optional<std::map<std::string, lam::TermPtr>> match_skeleton(
    const lam::TermPtr& skeleton, const std::set<std::string>& holes,
    const lam::TermPtr& u);

struct VariantOutcome {
  lam::TermPtr theta;
  std::map<std::string, lam::TermPtr> sigma;  // hole bindings
  std::size_t steps = 0;
  bool matched = false;
  std::string note;  // failure diagnostic
};

struct CaseOutcome {
  long long n = 0;
  lam::TermPtr tau_skeleton;  // output argument of the reference run
  std::optional<long long> tau_decodes_to;
  std::size_t reference_steps = 0;
  std::vector<VariantOutcome> variants;
  bool ok = false;
  std::string note;  // failure diagnostic for the reference run
};

struct StorageReport {
  std::string operator_name;
  enc::NumeralKind kind;
  std::vector<CaseOutcome> cases;
  bool pass = false;
  std::string reason;  // first failure
};

// For each n in [n_lo, n_hi]: head-reduces (op)<canonical numeral>f to fix
// the output skeleton (free variables other than f become holes), requires
// the skeleton to normalize to a numeral, then checks that every generated
// variant produces an output matching the skeleton under some hole binding.
StorageReport verify_storage(const lam::TermPtr& op, enc::NumeralKind kind,
                             long long n_lo, long long n_hi,
                             int variants_per_n,
                             std::size_t fuel = lam::default_fuel,
                             std::uint64_t seed = 0,
                             std::string_view operator_name = {});

// Human-readable table followed by one record line per variant.
std::string print_storage_report(const StorageReport& r);

const char* kind_name(enc::NumeralKind kind);

}  // namespace ttr::sto
