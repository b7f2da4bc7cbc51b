#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ttr::lam {

// Lambda terms with de Bruijn indices for bound variables. Binders keep a
// display hint; hints never affect equality, hashing, or reduction.
struct Term;
using TermPtr = std::shared_ptr<const Term>;

enum class TermKind { BoundVar, FreeVar, SymConst, Abs, App };

struct Term {
  TermKind kind;
  int index = -1;     // BoundVar: distance to binder
  std::string name;   // FreeVar/SymConst: name; Abs: display hint
  TermPtr sub1;       // Abs: body; App: function
  TermPtr sub2;       // App: argument

  static TermPtr bound(int index);
  static TermPtr var(std::string name);
  static TermPtr sym(std::string name);
  static TermPtr abs(std::string hint, TermPtr body);
  static TermPtr app(TermPtr fn, TermPtr arg);
};

// Structural equality up to binder hints.
bool alpha_eq(const TermPtr& a, const TermPtr& b);

// Hash consistent with alpha_eq.
std::size_t term_hash(const TermPtr& t);

std::size_t term_size(const TermPtr& t);

// Add d to every bound index >= cutoff (indices pointing outside the term).
TermPtr shift(const TermPtr& t, int d, int cutoff = 0);

// Replace the binder-eliminated index j by v, decrementing indices above it.
// open_bound(body, v) performs the usual beta instantiation of an Abs body.
TermPtr subst_bound(const TermPtr& t, int j, const TermPtr& v);
TermPtr open_bound(const TermPtr& body, const TermPtr& v);

// Simultaneous substitution of free variables by name. Replacement terms must
// be locally closed (no dangling bound indices); they are spliced under
// binders unshifted.
TermPtr substitute(const TermPtr& t, const std::map<std::string, TermPtr>& subst);

std::set<std::string> free_vars(const TermPtr& t);
std::set<std::string> sym_consts(const TermPtr& t);
bool has_dangling(const TermPtr& t);
bool is_closed(const TermPtr& t);

// Renders with '\' binders, application by juxtaposition, '#' symbolic
// constants. parse_term(print_term(t)) is alpha-equal to t for locally
// closed t.
std::string print_term(const TermPtr& t);

struct parse_error : std::runtime_error {
  std::size_t position;
  parse_error(const std::string& msg, std::size_t pos);
};

// Optional extension points for the concrete syntax: '@name' splices a named
// builtin term, and 'church N' / 'rec N' splice numeral encodings.
struct ParseHooks {
  std::function<TermPtr(std::string_view)> builtin;
  std::function<TermPtr(std::string_view, long long)> numeral;
};

TermPtr parse_term(std::string_view src, const ParseHooks* hooks = nullptr);

}  // namespace ttr::lam
