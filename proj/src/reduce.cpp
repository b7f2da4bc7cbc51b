#include "ttr/reduce.hpp"

#include <stdexcept>
#include <unordered_map>

namespace ttr::lam {

HeadDecomp head_status(const TermPtr& t) {
  HeadDecomp d;
  const Term* cur = t.get();
  TermPtr hold = t;
  while (cur->kind == TermKind::Abs) {
    d.binder_hints.push_back(cur->name);
    hold = cur->sub1;
    cur = hold.get();
  }
  std::vector<TermPtr> rev;
  while (cur->kind == TermKind::App) {
    rev.push_back(cur->sub2);
    hold = cur->sub1;
    cur = hold.get();
  }
  d.head = hold;
  d.args.assign(rev.rbegin(), rev.rend());
  d.head_normal = d.head->kind != TermKind::Abs;
  return d;
}

TermPtr assemble(const std::vector<std::string>& hints, TermPtr head,
                 const std::vector<TermPtr>& args) {
  TermPtr t = std::move(head);
  for (const auto& a : args) t = Term::app(std::move(t), a);
  for (auto it = hints.rbegin(); it != hints.rend(); ++it) t = Term::abs(*it, std::move(t));
  return t;
}

std::optional<TermPtr> head_step(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Abs: {
      auto s = head_step(t->sub1);
      if (!s) return std::nullopt;
      return Term::abs(t->name, std::move(*s));
    }
    case TermKind::App: {
      if (t->sub1->kind == TermKind::Abs) return open_bound(t->sub1->sub1, t->sub2);
      auto s = head_step(t->sub1);
      if (!s) return std::nullopt;
      return Term::app(std::move(*s), t->sub2);
    }
    default:
      return std::nullopt;
  }
}

ReductionTrace head_reduce(const TermPtr& t, std::size_t fuel) {
  ReductionTrace tr;
  tr.start = t;
  TermPtr cur = t;
  tr.status = RunStatus::HeadNormalForm;
  while (true) {
    auto s = head_step(cur);
    if (!s) break;
    if (tr.steps.size() >= fuel) {
      tr.status = RunStatus::FuelExhausted;
      break;
    }
    cur = std::move(*s);
    tr.steps.push_back(cur);
  }
  return tr;
}

namespace {

std::optional<TermPtr> normalize_rec(const TermPtr& t, std::size_t& fuel, std::size_t& used) {
  TermPtr cur = t;
  while (true) {
    auto s = head_step(cur);
    if (!s) break;
    if (fuel == 0) return std::nullopt;
    --fuel;
    ++used;
    cur = std::move(*s);
  }
  HeadDecomp d = head_status(cur);
  std::vector<TermPtr> args;
  args.reserve(d.args.size());
  for (const auto& a : d.args) {
    auto na = normalize_rec(a, fuel, used);
    if (!na) return std::nullopt;
    args.push_back(std::move(*na));
  }
  return assemble(d.binder_hints, d.head, args);
}

}  // namespace

NormalizeResult normalize_left(const TermPtr& t, std::size_t fuel) {
  NormalizeResult r;
  std::size_t left = fuel;
  auto nf = normalize_rec(t, left, r.steps);
  if (nf) {
    r.term = std::move(*nf);
    r.complete = true;
  } else {
    r.term = t;
    r.complete = false;
  }
  return r;
}

bool is_hnf(const TermPtr& t) { return head_status(t).head_normal; }

bool is_normal(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Abs:
      return is_normal(t->sub1);
    case TermKind::App:
      return t->sub1->kind != TermKind::Abs && is_normal(t->sub1) && is_normal(t->sub2);
    default:
      return true;
  }
}

Equiv beta_equiv(const TermPtr& t, const TermPtr& u, std::size_t fuel) {
  NormalizeResult a = normalize_left(t, fuel);
  NormalizeResult b = normalize_left(u, fuel);
  if (!a.complete || !b.complete) return Equiv::Unknown;
  return alpha_eq(a.term, b.term) ? Equiv::Equal : Equiv::NotEqual;
}

std::optional<CommonReduct> common_reduct(const ReductionTrace& a, const ReductionTrace& b) {
  std::unordered_map<std::size_t, std::vector<std::size_t>> index;
  for (std::size_t i = 0; i <= a.count(); ++i) index[term_hash(a.at(i))].push_back(i);
  for (std::size_t j = 0; j <= b.count(); ++j) {
    auto it = index.find(term_hash(b.at(j)));
    if (it == index.end()) continue;
    for (std::size_t i : it->second) {
      if (alpha_eq(a.at(i), b.at(j))) {
        CommonReduct r;
        r.term = a.at(i);
        r.steps_left = i;
        r.steps_right = j;
        return r;
      }
    }
  }
  return std::nullopt;
}

std::optional<CommonReduct> common_reduct(const TermPtr& t, const TermPtr& u, std::size_t fuel) {
  return common_reduct(head_reduce(t, fuel), head_reduce(u, fuel));
}

namespace {

std::string fresh_open_name(const std::string& hint, std::set<std::string>& avoid) {
  std::string base = hint.empty() ? "x" : hint;
  std::string cand = base;
  int k = 1;
  while (avoid.count(cand)) cand = base + std::to_string(k++);
  avoid.insert(cand);
  return cand;
}

void ste_rec(const TermPtr& t, std::set<std::string>& avoid, std::vector<TermPtr>& out,
             std::unordered_map<std::size_t, std::vector<TermPtr>>& seen) {
  std::size_t h = term_hash(t);
  auto& bucket = seen[h];
  for (const auto& prev : bucket)
    if (alpha_eq(prev, t)) return;
  bucket.push_back(t);
  out.push_back(t);

  TermPtr cur = t;
  while (cur->kind == TermKind::Abs) {
    std::string n = fresh_open_name(cur->name, avoid);
    cur = open_bound(cur->sub1, Term::var(n));
  }
  HeadDecomp d = head_status(cur);
  for (const auto& a : d.args) ste_rec(a, avoid, out, seen);
}

}  // namespace

std::vector<TermPtr> ste(const TermPtr& t) {
  if (!is_normal(t)) throw std::invalid_argument("ste requires a normal term");
  std::set<std::string> avoid = free_vars(t);
  std::vector<TermPtr> out;
  std::unordered_map<std::size_t, std::vector<TermPtr>> seen;
  ste_rec(t, avoid, out, seen);
  return out;
}

}  // namespace ttr::lam
