#pragma once

#include <random>
#include <string>
#include <vector>

#include "ttr/reduce.hpp"
#include "ttr/term.hpp"

namespace ttr::testsupport {

using lam::Term;
using lam::TermPtr;

inline TermPtr random_term(std::mt19937_64& rng, int budget, int depth,
                           const std::vector<std::string>& pool) {
  auto pick = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto leaf = [&]() -> TermPtr {
    bool use_bound = depth > 0 && (pool.empty() || pick(0, 1) == 0);
    if (use_bound) return Term::bound(pick(0, depth - 1));
    if (!pool.empty()) return Term::var(pool[static_cast<std::size_t>(pick(0, static_cast<int>(pool.size()) - 1))]);
    return Term::abs("x", Term::bound(0));
  };
  if (budget <= 1) return leaf();
  int r = pick(0, 99);
  if (r < 20) return leaf();
  if (r < 55) {
    static const char* hints[] = {"x", "y", "z", "u", "v", "w"};
    return Term::abs(hints[pick(0, 5)], random_term(rng, budget - 1, depth + 1, pool));
  }
  int lb = pick(1, budget - 1);
  return Term::app(random_term(rng, lb, depth, pool),
                   random_term(rng, budget - 1 - lb, depth, pool));
}

inline TermPtr random_closed(std::mt19937_64& rng, int budget) {
  return random_term(rng, budget, 0, {});
}

// a random term whose head reduction terminates within the given fuel
inline TermPtr random_solvable(std::mt19937_64& rng, int budget,
                               const std::vector<std::string>& pool, std::size_t fuel = 600) {
  while (true) {
    TermPtr t = random_term(rng, budget, 0, pool);
    if (lam::head_reduce(t, fuel).status == lam::RunStatus::HeadNormalForm) return t;
  }
}

}  // namespace ttr::testsupport
