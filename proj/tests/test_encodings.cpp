#include "doctest.h"
#include "ttr/encodings.hpp"
#include "ttr/reduce.hpp"

using namespace ttr::lam;
using namespace ttr::enc;

// f applied to the n-fold successor tower (s)(s)..(0) — deliberately the
// applied, non-normal shape
static TermPtr expected_output(NumeralKind kind, int n) {
  TermPtr succ = builtin(kind == NumeralKind::Church ? "s_church" : "s_rec");
  TermPtr tower = numeral(kind, 0);
  for (int i = 0; i < n; ++i) tower = Term::app(succ, tower);
  return Term::app(Term::var("f"), tower);
}

TEST_CASE("numeral shapes") {
  CHECK(alpha_eq(numeral(NumeralKind::Recursive, 0), parse_term("\\f x. x")));
  CHECK(alpha_eq(numeral(NumeralKind::Recursive, 2),
                 parse_term("\\f x. f (\\f x. f (\\f x. x))")));
  CHECK(alpha_eq(numeral(NumeralKind::Church, 3), parse_term("\\f x. f (f (f x))")));
  CHECK_THROWS_AS(numeral(NumeralKind::Church, -1), std::invalid_argument);
}

TEST_CASE("decode inverts numeral") {
  CHECK(decode(NumeralKind::Recursive, parse_term("\\g y. y")) == 0);
  CHECK(decode(NumeralKind::Church, parse_term("\\f x. f (f x)")) == 2);
  CHECK_FALSE(decode(NumeralKind::Church, parse_term("\\f x. x f")).has_value());
  CHECK_FALSE(decode(NumeralKind::Recursive, parse_term("\\f x. f x")).has_value());
  CHECK_FALSE(decode(NumeralKind::Church, parse_term("f x")).has_value());

  for (long long n = 0; n <= 500; ++n) {
    CHECK(decode(NumeralKind::Church, numeral(NumeralKind::Church, n)) == n);
    CHECK(decode(NumeralKind::Recursive, numeral(NumeralKind::Recursive, n)) == n);
  }
}

TEST_CASE("numerals are closed and normal, successors step them") {
  for (int n = 0; n <= 100; ++n) {
    for (NumeralKind k : {NumeralKind::Church, NumeralKind::Recursive}) {
      TermPtr t = numeral(k, n);
      CHECK(is_closed(t));
      CHECK(is_normal(t));
    }
  }
  for (int n = 0; n <= 50; ++n) {
    NormalizeResult rc = normalize_left(
        Term::app(builtin("s_church"), numeral(NumeralKind::Church, n)));
    CHECK(rc.complete);
    CHECK(alpha_eq(rc.term, numeral(NumeralKind::Church, n + 1)));
    NormalizeResult rr =
        normalize_left(Term::app(builtin("s_rec"), numeral(NumeralKind::Recursive, n)));
    CHECK(rr.complete);
    CHECK(alpha_eq(rr.term, numeral(NumeralKind::Recursive, n + 1)));
  }
}

TEST_CASE("builtin table") {
  const auto& names = builtin_names();
  CHECK(names.size() == 13);
  for (const auto& n : names) {
    TermPtr t = builtin(n);
    CHECK(is_closed(t));
  }
  CHECK_THROWS_AS(builtin("nope"), std::invalid_argument);

  CHECK(alpha_eq(builtin("s_rec"), parse_term("\\n. \\f. \\x. f n")));
  CHECK(alpha_eq(builtin("s_church"), parse_term("\\n. \\f. \\x. f (n f x)")));
  CHECK(alpha_eq(builtin("delta"), parse_term("\\f. f (\\g y. y)")));
  CHECK(alpha_eq(builtin("tau"), parse_term("\\d. \\f. f (\\g y. y)")));
  CHECK(alpha_eq(builtin("T1_rec"), Term::app(builtin("Y"), builtin("H"))));

  // parser hooks splice builtins and numerals
  CHECK(alpha_eq(parse("@delta"), builtin("delta")));
  CHECK(alpha_eq(parse("church 4"), numeral(NumeralKind::Church, 4)));
  CHECK(alpha_eq(parse("rec 2"), numeral(NumeralKind::Recursive, 2)));
  // without a number following, these are plain variables
  CHECK(alpha_eq(parse("church x"), parse_term("church x")));
}

TEST_CASE("Turing fixed point: (Y)t reaches (t)((Y)t) in two steps") {
  TermPtr y = builtin("Y");
  ReductionTrace tr = head_reduce(Term::app(y, Term::var("t")), 10);
  REQUIRE(tr.count() >= 2);
  CHECK(alpha_eq(tr.at(2), parse("t (@Y t)")));
}

TEST_CASE("storage operators drive numerals to successor towers") {
  for (int n = 0; n <= 20; ++n) {
    for (const char* op : {"T1_church", "T2_church"}) {
      TermPtr t = Term::app(Term::app(builtin(op), numeral(NumeralKind::Church, n)),
                            Term::var("f"));
      ReductionTrace tr = head_reduce(t);
      REQUIRE(tr.status == RunStatus::HeadNormalForm);
      CHECK(alpha_eq(tr.final_term(), expected_output(NumeralKind::Church, n)));
    }
    for (const char* op : {"T1_rec", "T2_rec"}) {
      TermPtr t = Term::app(Term::app(builtin(op), numeral(NumeralKind::Recursive, n)),
                            Term::var("f"));
      ReductionTrace tr = head_reduce(t);
      REQUIRE(tr.status == RunStatus::HeadNormalForm);
      CHECK(alpha_eq(tr.final_term(), expected_output(NumeralKind::Recursive, n)));
    }
  }
}

TEST_CASE("remark term normalizes to its applied-projection form") {
  TermPtr t = builtin("remark_term");
  CHECK(is_closed(t));
  NormalizeResult r = normalize_left(t);
  REQUIRE(r.complete);
  CHECK(alpha_eq(r.term, parse_term("\\x. x (\\w. w) (\\v. \\w. \\u. w)")));
}
