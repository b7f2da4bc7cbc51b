#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ttr/term.hpp"

namespace ttr::lam {

inline constexpr std::size_t default_fuel = 1'000'000;

// t = \x1..xn. (head) a1 .. am with head not an App. head_normal means the
// head is a variable or constant; otherwise head is an Abs and (head)a1 is the
// head redex.
struct HeadDecomp {
  std::vector<std::string> binder_hints;
  TermPtr head;
  std::vector<TermPtr> args;
  bool head_normal = false;
};

HeadDecomp head_status(const TermPtr& t);

// Rebuilds \hints. (head) args, the inverse of head_status.
TermPtr assemble(const std::vector<std::string>& hints, TermPtr head,
                 const std::vector<TermPtr>& args);

// One head reduction step; empty when t is already in head normal form.
std::optional<TermPtr> head_step(const TermPtr& t);

enum class RunStatus { HeadNormalForm, FuelExhausted };

struct ReductionTrace {
  TermPtr start;
  std::vector<TermPtr> steps;  // term after each head step
  RunStatus status = RunStatus::FuelExhausted;

  std::size_t count() const { return steps.size(); }
  const TermPtr& final_term() const { return steps.empty() ? start : steps.back(); }
  // term after i steps; at(0) == start
  const TermPtr& at(std::size_t i) const { return i == 0 ? start : steps[i - 1]; }
};

ReductionTrace head_reduce(const TermPtr& t, std::size_t fuel = default_fuel);

struct NormalizeResult {
  TermPtr term;  // the normal form when complete; last partial rebuild otherwise
  bool complete = false;
  std::size_t steps = 0;  // beta steps performed (leftmost order)
};

NormalizeResult normalize_left(const TermPtr& t, std::size_t fuel = default_fuel);

bool is_hnf(const TermPtr& t);
bool is_normal(const TermPtr& t);

enum class Equiv { Equal, NotEqual, Unknown };

// Normalizes both sides and compares up to alpha; Unknown when either side
// runs out of fuel.
Equiv beta_equiv(const TermPtr& t, const TermPtr& u, std::size_t fuel = default_fuel);

struct CommonReduct {
  TermPtr term;
  std::size_t steps_left = 0;   // n(t, term)
  std::size_t steps_right = 0;  // n(u, term)
};

// Shared element of the two head-reduction traces, earliest on the right
// trace (ties broken toward the left trace).
std::optional<CommonReduct> common_reduct(const ReductionTrace& a, const ReductionTrace& b);
std::optional<CommonReduct> common_reduct(const TermPtr& t, const TermPtr& u,
                                          std::size_t fuel = default_fuel);

// Subterm closure along head decompositions of a normal term: the term itself
// plus, recursively, the arguments of its head spine (binders opened as free
// variables named after their hints). Throws std::invalid_argument on
// non-normal input.
std::vector<TermPtr> ste(const TermPtr& t);

}  // namespace ttr::lam
