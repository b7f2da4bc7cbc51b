#include "ttr/term.hpp"

#include <cctype>
#include <sstream>

namespace ttr::lam {

TermPtr Term::bound(int index) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::BoundVar;
  t->index = index;
  return t;
}

TermPtr Term::var(std::string name) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::FreeVar;
  t->name = std::move(name);
  return t;
}

TermPtr Term::sym(std::string name) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::SymConst;
  t->name = std::move(name);
  return t;
}

TermPtr Term::abs(std::string hint, TermPtr body) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Abs;
  t->name = std::move(hint);
  t->sub1 = std::move(body);
  return t;
}

TermPtr Term::app(TermPtr fn, TermPtr arg) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::App;
  t->sub1 = std::move(fn);
  t->sub2 = std::move(arg);
  return t;
}

bool alpha_eq(const TermPtr& a, const TermPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TermKind::BoundVar:
      return a->index == b->index;
    case TermKind::FreeVar:
    case TermKind::SymConst:
      return a->name == b->name;
    case TermKind::Abs:
      return alpha_eq(a->sub1, b->sub1);
    case TermKind::App:
      return alpha_eq(a->sub1, b->sub1) && alpha_eq(a->sub2, b->sub2);
  }
  return false;
}

static void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

std::size_t term_hash(const TermPtr& t) {
  std::size_t h = static_cast<std::size_t>(t->kind) + 0x51;
  switch (t->kind) {
    case TermKind::BoundVar:
      hash_combine(h, static_cast<std::size_t>(t->index));
      break;
    case TermKind::FreeVar:
    case TermKind::SymConst:
      hash_combine(h, std::hash<std::string>{}(t->name));
      break;
    case TermKind::Abs:
      hash_combine(h, term_hash(t->sub1));
      break;
    case TermKind::App:
      hash_combine(h, term_hash(t->sub1));
      hash_combine(h, term_hash(t->sub2));
      break;
  }
  return h;
}

std::size_t term_size(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Abs:
      return 1 + term_size(t->sub1);
    case TermKind::App:
      return 1 + term_size(t->sub1) + term_size(t->sub2);
    default:
      return 1;
  }
}

TermPtr shift(const TermPtr& t, int d, int cutoff) {
  switch (t->kind) {
    case TermKind::BoundVar:
      if (t->index >= cutoff) return Term::bound(t->index + d);
      return t;
    case TermKind::FreeVar:
    case TermKind::SymConst:
      return t;
    case TermKind::Abs: {
      TermPtr body = shift(t->sub1, d, cutoff + 1);
      if (body.get() == t->sub1.get()) return t;
      return Term::abs(t->name, std::move(body));
    }
    case TermKind::App: {
      TermPtr fn = shift(t->sub1, d, cutoff);
      TermPtr arg = shift(t->sub2, d, cutoff);
      if (fn.get() == t->sub1.get() && arg.get() == t->sub2.get()) return t;
      return Term::app(std::move(fn), std::move(arg));
    }
  }
  return t;
}

TermPtr subst_bound(const TermPtr& t, int j, const TermPtr& v) {
  switch (t->kind) {
    case TermKind::BoundVar:
      if (t->index == j) return j == 0 ? v : shift(v, j);
      if (t->index > j) return Term::bound(t->index - 1);
      return t;
    case TermKind::FreeVar:
    case TermKind::SymConst:
      return t;
    case TermKind::Abs: {
      TermPtr body = subst_bound(t->sub1, j + 1, v);
      if (body.get() == t->sub1.get()) return t;
      return Term::abs(t->name, std::move(body));
    }
    case TermKind::App: {
      TermPtr fn = subst_bound(t->sub1, j, v);
      TermPtr arg = subst_bound(t->sub2, j, v);
      if (fn.get() == t->sub1.get() && arg.get() == t->sub2.get()) return t;
      return Term::app(std::move(fn), std::move(arg));
    }
  }
  return t;
}

TermPtr open_bound(const TermPtr& body, const TermPtr& v) {
  return subst_bound(body, 0, v);
}

TermPtr substitute(const TermPtr& t, const std::map<std::string, TermPtr>& subst) {
  switch (t->kind) {
    case TermKind::BoundVar:
    case TermKind::SymConst:
      return t;
    case TermKind::FreeVar: {
      auto it = subst.find(t->name);
      return it == subst.end() ? t : it->second;
    }
    case TermKind::Abs: {
      TermPtr body = substitute(t->sub1, subst);
      if (body.get() == t->sub1.get()) return t;
      return Term::abs(t->name, std::move(body));
    }
    case TermKind::App: {
      TermPtr fn = substitute(t->sub1, subst);
      TermPtr arg = substitute(t->sub2, subst);
      if (fn.get() == t->sub1.get() && arg.get() == t->sub2.get()) return t;
      return Term::app(std::move(fn), std::move(arg));
    }
  }
  return t;
}

static void collect_names(const TermPtr& t, TermKind want, std::set<std::string>& out) {
  if (t->kind == want) out.insert(t->name);
  if (t->sub1) collect_names(t->sub1, want, out);
  if (t->sub2) collect_names(t->sub2, want, out);
}

std::set<std::string> free_vars(const TermPtr& t) {
  std::set<std::string> out;
  collect_names(t, TermKind::FreeVar, out);
  return out;
}

std::set<std::string> sym_consts(const TermPtr& t) {
  std::set<std::string> out;
  collect_names(t, TermKind::SymConst, out);
  return out;
}

static bool has_dangling_rec(const TermPtr& t, int depth) {
  switch (t->kind) {
    case TermKind::BoundVar:
      return t->index >= depth;
    case TermKind::FreeVar:
    case TermKind::SymConst:
      return false;
    case TermKind::Abs:
      return has_dangling_rec(t->sub1, depth + 1);
    case TermKind::App:
      return has_dangling_rec(t->sub1, depth) || has_dangling_rec(t->sub2, depth);
  }
  return false;
}

bool has_dangling(const TermPtr& t) { return has_dangling_rec(t, 0); }

bool is_closed(const TermPtr& t) {
  return free_vars(t).empty() && !has_dangling(t);
}

// ---------------------------------------------------------------------------
// printing

namespace {

bool scope_has(const std::vector<std::string>& scope, const std::string& n) {
  for (const auto& s : scope)
    if (s == n) return true;
  return false;
}

std::string pick_name(const std::string& hint, const std::vector<std::string>& scope,
                      const std::set<std::string>& avoid) {
  std::string base = hint.empty() ? "x" : hint;
  std::string cand = base;
  int k = 1;
  while (avoid.count(cand) || scope_has(scope, cand)) cand = base + std::to_string(k++);
  return cand;
}

// ctx: 0 body position, 1 function position, 2 argument position
void print_rec(const TermPtr& t, std::vector<std::string>& scope,
               const std::set<std::string>& avoid, std::string& out, int ctx) {
  switch (t->kind) {
    case TermKind::BoundVar: {
      int i = t->index;
      if (i >= 0 && static_cast<std::size_t>(i) < scope.size())
        out += scope[scope.size() - 1 - static_cast<std::size_t>(i)];
      else
        out += "^" + std::to_string(i);
      return;
    }
    case TermKind::FreeVar:
      out += t->name;
      return;
    case TermKind::SymConst:
      out += "#";
      out += t->name;
      return;
    case TermKind::Abs: {
      bool paren = ctx != 0;
      if (paren) out += "(";
      out += "\\";
      const Term* cur = t.get();
      std::size_t pushed = 0;
      while (true) {
        std::string n = pick_name(cur->name, scope, avoid);
        if (pushed) out += " ";
        out += n;
        scope.push_back(n);
        ++pushed;
        if (cur->sub1->kind == TermKind::Abs)
          cur = cur->sub1.get();
        else
          break;
      }
      out += ". ";
      print_rec(cur->sub1, scope, avoid, out, 0);
      scope.resize(scope.size() - pushed);
      if (paren) out += ")";
      return;
    }
    case TermKind::App: {
      bool paren = ctx == 2;
      if (paren) out += "(";
      print_rec(t->sub1, scope, avoid, out, 1);
      out += " ";
      print_rec(t->sub2, scope, avoid, out, 2);
      if (paren) out += ")";
      return;
    }
  }
}

}  // namespace

std::string print_term(const TermPtr& t) {
  std::set<std::string> avoid = free_vars(t);
  std::vector<std::string> scope;
  std::string out;
  print_rec(t, scope, avoid, out, 0);
  return out;
}

// ---------------------------------------------------------------------------
// parsing

parse_error::parse_error(const std::string& msg, std::size_t pos)
    : std::runtime_error(msg + " at offset " + std::to_string(pos)), position(pos) {}

namespace {

enum class Tok { Lambda, Dot, LParen, RParen, Ident, HashIdent, AtIdent, Number, End };

struct Lexer {
  std::string_view src;
  std::size_t pos = 0;

  Tok kind = Tok::End;
  std::string text;
  long long number = 0;
  std::size_t tok_pos = 0;

  explicit Lexer(std::string_view s) : src(s) { advance(); }

  static bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  static bool ident_cont(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }

  void advance() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    tok_pos = pos;
    if (pos >= src.size()) {
      kind = Tok::End;
      return;
    }
    char c = src[pos];
    if (c == '\\') {
      kind = Tok::Lambda;
      ++pos;
      return;
    }
    // UTF-8 lambda
    if (static_cast<unsigned char>(c) == 0xCE && pos + 1 < src.size() &&
        static_cast<unsigned char>(src[pos + 1]) == 0xBB) {
      kind = Tok::Lambda;
      pos += 2;
      return;
    }
    if (c == '.') {
      kind = Tok::Dot;
      ++pos;
      return;
    }
    if (c == '(') {
      kind = Tok::LParen;
      ++pos;
      return;
    }
    if (c == ')') {
      kind = Tok::RParen;
      ++pos;
      return;
    }
    if (c == '#' || c == '@') {
      std::size_t start = ++pos;
      if (pos >= src.size() || !ident_start(src[pos]))
        throw parse_error(std::string("expected name after '") + c + "'", tok_pos);
      while (pos < src.size() && ident_cont(src[pos])) ++pos;
      text.assign(src.substr(start, pos - start));
      kind = c == '#' ? Tok::HashIdent : Tok::AtIdent;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      long long v = 0;
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
        v = v * 10 + (src[pos] - '0');
        if (v > 100000000) throw parse_error("numeral literal too large", tok_pos);
        ++pos;
      }
      number = v;
      kind = Tok::Number;
      return;
    }
    if (ident_start(c)) {
      std::size_t start = pos;
      while (pos < src.size() && ident_cont(src[pos])) ++pos;
      text.assign(src.substr(start, pos - start));
      kind = Tok::Ident;
      return;
    }
    throw parse_error(std::string("unexpected character '") + c + "'", tok_pos);
  }
};

struct Parser {
  Lexer lex;
  const ParseHooks* hooks;
  std::vector<std::string> binders;

  Parser(std::string_view src, const ParseHooks* h) : lex(src), hooks(h) {}

  [[noreturn]] void fail(const std::string& msg) { throw parse_error(msg, lex.tok_pos); }

  TermPtr term() {
    if (lex.kind == Tok::Lambda) return lambda();
    return application();
  }

  TermPtr lambda() {
    lex.advance();
    std::vector<std::string> names;
    while (lex.kind == Tok::Ident) {
      names.push_back(lex.text);
      lex.advance();
    }
    if (names.empty()) fail("expected binder name after lambda");
    if (lex.kind != Tok::Dot) fail("expected '.' after binders");
    lex.advance();
    for (const auto& n : names) binders.push_back(n);
    TermPtr body = term();
    for (auto it = names.rbegin(); it != names.rend(); ++it) {
      binders.pop_back();
      body = Term::abs(*it, std::move(body));
    }
    return body;
  }

  bool atom_ahead() const {
    return lex.kind == Tok::Ident || lex.kind == Tok::HashIdent ||
           lex.kind == Tok::AtIdent || lex.kind == Tok::LParen;
  }

  TermPtr application() {
    if (!atom_ahead()) fail("expected term");
    TermPtr acc = atom();
    while (atom_ahead()) acc = Term::app(std::move(acc), atom());
    return acc;
  }

  TermPtr atom() {
    switch (lex.kind) {
      case Tok::LParen: {
        lex.advance();
        TermPtr t = term();
        if (lex.kind != Tok::RParen) fail("expected ')'");
        lex.advance();
        return t;
      }
      case Tok::HashIdent: {
        TermPtr t = Term::sym(lex.text);
        lex.advance();
        return t;
      }
      case Tok::AtIdent: {
        if (!hooks || !hooks->builtin) fail("'@" + lex.text + "' used without builtin table");
        TermPtr t = hooks->builtin(lex.text);
        if (!t) fail("unknown builtin '@" + lex.text + "'");
        lex.advance();
        return t;
      }
      case Tok::Ident: {
        std::string name = lex.text;
        std::size_t at = lex.tok_pos;
        lex.advance();
        if ((name == "church" || name == "rec") && lex.kind == Tok::Number) {
          if (!hooks || !hooks->numeral)
            throw parse_error("'" + name + " N' used without numeral hook", at);
          TermPtr t = hooks->numeral(name, lex.number);
          lex.advance();
          return t;
        }
        for (std::size_t i = binders.size(); i-- > 0;)
          if (binders[i] == name) return Term::bound(static_cast<int>(binders.size() - 1 - i));
        return Term::var(std::move(name));
      }
      default:
        fail("expected term");
    }
  }
};

}  // namespace

TermPtr parse_term(std::string_view src, const ParseHooks* hooks) {
  Parser p(src, hooks);
  TermPtr t = p.term();
  if (p.lex.kind != Tok::End) p.fail("unexpected trailing input");
  return t;
}

}  // namespace ttr::lam
