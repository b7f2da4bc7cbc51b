#pragma once

// Independent oracle: a named-variable lambda term representation with
// explicit capture-avoiding substitution and single-step head reduction,
// sharing no machinery with ttr::lam beyond the conversion boundary.

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ttr/term.hpp"

namespace ttr::testsupport {

struct NTerm;
using NPtr = std::shared_ptr<const NTerm>;

struct NTerm {
  enum Kind { Var, Sym, Lam, App } kind;
  std::string name;  // Var/Sym name, Lam binder
  NPtr a, b;         // Lam body in a; App: fn a, arg b

  static NPtr var(std::string n) {
    return std::make_shared<NTerm>(NTerm{Var, std::move(n), nullptr, nullptr});
  }
  static NPtr sym(std::string n) {
    return std::make_shared<NTerm>(NTerm{Sym, std::move(n), nullptr, nullptr});
  }
  static NPtr lam(std::string n, NPtr body) {
    return std::make_shared<NTerm>(NTerm{Lam, std::move(n), std::move(body), nullptr});
  }
  static NPtr app(NPtr f, NPtr x) {
    return std::make_shared<NTerm>(NTerm{App, "", std::move(f), std::move(x)});
  }
};

inline void nfree_vars(const NPtr& t, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (t->kind) {
    case NTerm::Var:
      if (!bound.count(t->name)) out.insert(t->name);
      return;
    case NTerm::Sym:
      return;
    case NTerm::Lam: {
      bool added = bound.insert(t->name).second;
      nfree_vars(t->a, bound, out);
      if (added) bound.erase(t->name);
      return;
    }
    case NTerm::App:
      nfree_vars(t->a, bound, out);
      nfree_vars(t->b, bound, out);
      return;
  }
}

inline std::set<std::string> nfree_vars(const NPtr& t) {
  std::set<std::string> bound, out;
  nfree_vars(t, bound, out);
  return out;
}

inline std::string nfresh(const std::string& base, const std::set<std::string>& avoid) {
  std::string cand = base + "_r";
  int k = 0;
  while (avoid.count(cand)) cand = base + "_r" + std::to_string(++k);
  return cand;
}

inline NPtr nsubst(const NPtr& t, const std::string& x, const NPtr& v) {
  switch (t->kind) {
    case NTerm::Var:
      return t->name == x ? v : t;
    case NTerm::Sym:
      return t;
    case NTerm::Lam: {
      if (t->name == x) return t;
      std::set<std::string> fv_v = nfree_vars(v);
      if (fv_v.count(t->name)) {
        std::set<std::string> avoid = fv_v;
        auto fv_b = nfree_vars(t->a);
        avoid.insert(fv_b.begin(), fv_b.end());
        avoid.insert(x);
        std::string fresh = nfresh(t->name, avoid);
        NPtr renamed = nsubst(t->a, t->name, NTerm::var(fresh));
        return NTerm::lam(fresh, nsubst(renamed, x, v));
      }
      return NTerm::lam(t->name, nsubst(t->a, x, v));
    }
    case NTerm::App:
      return NTerm::app(nsubst(t->a, x, v), nsubst(t->b, x, v));
  }
  return t;
}

inline std::optional<NPtr> nhead_step(const NPtr& t) {
  switch (t->kind) {
    case NTerm::Lam: {
      auto s = nhead_step(t->a);
      if (!s) return std::nullopt;
      return NTerm::lam(t->name, std::move(*s));
    }
    case NTerm::App: {
      if (t->a->kind == NTerm::Lam) return nsubst(t->a->a, t->a->name, t->b);
      auto s = nhead_step(t->a);
      if (!s) return std::nullopt;
      return NTerm::app(std::move(*s), t->b);
    }
    default:
      return std::nullopt;
  }
}

// conversions across the oracle boundary

inline NPtr to_naive(const lam::TermPtr& t, std::vector<std::string>& scope, int& counter) {
  using lam::TermKind;
  switch (t->kind) {
    case TermKind::BoundVar:
      return NTerm::var(scope[scope.size() - 1 - static_cast<std::size_t>(t->index)]);
    case TermKind::FreeVar:
      return NTerm::var(t->name);
    case TermKind::SymConst:
      return NTerm::sym(t->name);
    case TermKind::Abs: {
      std::string n = "b" + std::to_string(counter++);
      scope.push_back(n);
      NPtr body = to_naive(t->sub1, scope, counter);
      scope.pop_back();
      return NTerm::lam(n, std::move(body));
    }
    case TermKind::App: {
      NPtr f = to_naive(t->sub1, scope, counter);
      NPtr x = to_naive(t->sub2, scope, counter);
      return NTerm::app(std::move(f), std::move(x));
    }
  }
  return nullptr;
}

inline NPtr to_naive(const lam::TermPtr& t) {
  std::vector<std::string> scope;
  int counter = 0;
  return to_naive(t, scope, counter);
}

inline lam::TermPtr from_naive(const NPtr& t, std::vector<std::string>& scope) {
  using lam::Term;
  switch (t->kind) {
    case NTerm::Var: {
      for (std::size_t i = scope.size(); i-- > 0;)
        if (scope[i] == t->name) return Term::bound(static_cast<int>(scope.size() - 1 - i));
      return Term::var(t->name);
    }
    case NTerm::Sym:
      return Term::sym(t->name);
    case NTerm::Lam: {
      scope.push_back(t->name);
      lam::TermPtr body = from_naive(t->a, scope);
      scope.pop_back();
      return Term::abs(t->name, std::move(body));
    }
    case NTerm::App:
      return Term::app(from_naive(t->a, scope), from_naive(t->b, scope));
  }
  return nullptr;
}

inline lam::TermPtr from_naive(const NPtr& t) {
  std::vector<std::string> scope;
  return from_naive(t, scope);
}

struct NaiveRun {
  lam::TermPtr final_term;
  std::size_t count = 0;
  bool head_normal = false;
};

inline NaiveRun naive_head_reduce(const lam::TermPtr& t, std::size_t fuel) {
  NPtr cur = to_naive(t);
  NaiveRun r;
  r.head_normal = true;
  while (true) {
    auto s = nhead_step(cur);
    if (!s) break;
    if (r.count >= fuel) {
      r.head_normal = false;
      break;
    }
    cur = std::move(*s);
    ++r.count;
  }
  r.final_term = from_naive(cur);
  return r;
}

}  // namespace ttr::testsupport
