#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "ttr/term.hpp"

namespace ttr::enc {

enum class NumeralKind { Church, Recursive };

// Church: \f x. f (f (.. x)). Recursive: zero = \f x. x and
// succ of n = \f x. f <n>, the whole numeral nested as the argument.
lam::TermPtr numeral(NumeralKind kind, long long n);

// Syntactic inverse of numeral on normal terms, up to alpha.
std::optional<long long> decode(NumeralKind kind, const lam::TermPtr& t);

// Closed combinators: s_church, s_rec, T1_church, T2_church, T1_rec, T2_rec,
// Y, H, G, delta, tau, rho, remark_term. Throws std::invalid_argument on an
// unknown name.
lam::TermPtr builtin(std::string_view name);

const std::vector<std::string>& builtin_names();

// Hooks exposing '@name' builtins and 'church N' / 'rec N' numeral splices.
const lam::ParseHooks& default_hooks();

// parse_term with default_hooks.
lam::TermPtr parse(std::string_view src);

}  // namespace ttr::enc
