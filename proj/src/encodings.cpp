#include "ttr/encodings.hpp"

#include <map>
#include <stdexcept>
#include <utility>

namespace ttr::enc {

using lam::Term;
using lam::TermKind;
using lam::TermPtr;

TermPtr numeral(NumeralKind kind, long long n) {
  if (n < 0) throw std::invalid_argument("numeral requires n >= 0");
  if (kind == NumeralKind::Church) {
    TermPtr body = Term::bound(0);
    for (long long i = 0; i < n; ++i) body = Term::app(Term::bound(1), std::move(body));
    return Term::abs("f", Term::abs("x", std::move(body)));
  }
  TermPtr t = Term::abs("f", Term::abs("x", Term::bound(0)));
  for (long long i = 0; i < n; ++i)
    t = Term::abs("f", Term::abs("x", Term::app(Term::bound(1), std::move(t))));
  return t;
}

std::optional<long long> decode(NumeralKind kind, const lam::TermPtr& t) {
  if (t->kind != TermKind::Abs || t->sub1->kind != TermKind::Abs) return std::nullopt;
  const TermPtr& body = t->sub1->sub1;
  if (kind == NumeralKind::Church) {
    const Term* cur = body.get();
    long long n = 0;
    while (cur->kind == TermKind::App) {
      if (cur->sub1->kind != TermKind::BoundVar || cur->sub1->index != 1) return std::nullopt;
      ++n;
      cur = cur->sub2.get();
    }
    if (cur->kind != TermKind::BoundVar || cur->index != 0) return std::nullopt;
    return n;
  }
  if (body->kind == TermKind::BoundVar && body->index == 0) return 0;
  if (body->kind == TermKind::App && body->sub1->kind == TermKind::BoundVar &&
      body->sub1->index == 1) {
    auto inner = decode(kind, body->sub2);
    if (!inner) return std::nullopt;
    return *inner + 1;
  }
  return std::nullopt;
}

namespace {

const std::map<std::string, TermPtr, std::less<>>& builtin_table() {
  static const auto table = [] {
    std::map<std::string, TermPtr, std::less<>> m;
    lam::ParseHooks hooks;
    hooks.builtin = [&m](std::string_view name) -> TermPtr {
      auto it = m.find(name);
      return it == m.end() ? nullptr : it->second;
    };
    hooks.numeral = [](std::string_view kind, long long n) {
      return numeral(kind == "church" ? NumeralKind::Church : NumeralKind::Recursive, n);
    };
    auto add = [&](const char* name, const char* src) {
      m.emplace(name, lam::parse_term(src, &hooks));
    };
    // definition order matters: later entries splice earlier ones via '@'
    add("s_church", "\\n f x. f (n f x)");
    add("s_rec", "\\n f x. f n");
    add("Y", "(\\x y. y (x x y)) (\\x y. y (x x y))");
    add("G", "\\x y. x (\\z. y (@s_rec z))");
    add("delta", "\\f. f (rec 0)");
    add("tau", "\\d f. f (rec 0)");
    add("H", "\\x y. y (\\z. @G (x z)) @delta");
    add("rho", "\\y z. @G (y z @tau z)");
    add("T1_church", "\\n. n (\\x y. x (\\z. y (@s_church z))) (\\f. f (church 0))");
    add("T2_church", "\\n f. n (\\x y. x (@s_church y)) f (church 0)");
    add("T1_rec", "@Y @H");
    add("T2_rec", "\\v. v @rho @tau @rho");
    add("remark_term", "\\x. (\\y. x (y (\\w. w)) (y (\\w v. w))) (\\z. z z)");
    return m;
  }();
  return table;
}

}  // namespace

TermPtr builtin(std::string_view name) {
  const auto& m = builtin_table();
  auto it = m.find(name);
  if (it == m.end()) throw std::invalid_argument("unknown builtin '" + std::string(name) + "'");
  return it->second;
}

const std::vector<std::string>& builtin_names() {
  static const auto names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : builtin_table()) v.push_back(k);
    return v;
  }();
  return names;
}

const lam::ParseHooks& default_hooks() {
  static const lam::ParseHooks hooks = [] {
    lam::ParseHooks h;
    h.builtin = [](std::string_view name) -> TermPtr {
      const auto& m = builtin_table();
      auto it = m.find(name);
      return it == m.end() ? nullptr : it->second;
    };
    h.numeral = [](std::string_view kind, long long n) {
      return numeral(kind == "church" ? NumeralKind::Church : NumeralKind::Recursive, n);
    };
    return h;
  }();
  return hooks;
}

TermPtr parse(std::string_view src) { return lam::parse_term(src, &default_hooks()); }

}  // namespace ttr::enc
