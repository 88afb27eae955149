#include "doctest.h"
#include "encert/driver.hpp"
#include "oracles.hpp"

using namespace encert;
using oracles::rat;

namespace {
RunConfig cfg() { return RunConfig{}; }

const char *kSec21 =
    "{ x - 2 in [-2,0] /\\ (x + 1 in [0,2] -> y in [3,4])"
    "  -> not x <= 1 \\/ x + y in ? }";
}  // namespace

TEST_CASE("section 2.1: proved end to end with the tightest answer") {
  RunResult r = run_source(kSec21, cfg());
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.answers.size() == 1);
  CHECK(r.answers[0].second == Interval(Dyadic(3), Dyadic(5)));
  CHECK(r.report.find("x + y in [3,5]") != std::string::npos);
}

TEST_CASE("interval subtraction of an expression from itself is exact") {
  RunResult r = run_source("{ x in [1,2] -> x - x in [0,0] }", cfg());
  CHECK(r.exit_code == 0);
}

TEST_CASE("a hypothesis-shaped difference drives the floor example") {
  RunResult r = run_source(
      "@floor = int<dn>;\n"
      "{ x - y in [-0.1,0.1] -> floor(x) - y in ? }",
      cfg());
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.answers.size() == 1);
  const Interval &iv = r.answers[0].second;
  // floor(x) - x in [-1, 0] composed with x - y in [-0.1, 0.1]: the answer
  // must cover [-1.1, 0.1] and stay within a hair of it (outward dyadics).
  CHECK(Dyadic::compare_rational(iv.lo(), rat(-11, 10)) <= 0);
  CHECK(Dyadic::compare_rational(iv.up(), rat(1, 10)) >= 0);
  CHECK(Dyadic::compare_rational(iv.lo(), rat(-111, 100)) > 0);
  CHECK(Dyadic::compare_rational(iv.up(), rat(11, 100)) < 0);

  // Soundness by sampling: draw y and the difference, evaluate exactly.
  std::mt19937_64 rng(7);
  Script s = parse(
      "@floor = int<dn>;\n"
      "{ x - y in [-0.1,0.1] -> floor(x) - y in ? }");
  NodeId subject = r.answers[0].first;
  for (int i = 0; i < 10000; ++i) {
    Rational y = oracles::random_rational(rng, rat(-40), rat(40), 9973);
    Rational d = oracles::random_rational(rng, rat(-1, 10), rat(1, 10), 9973);
    std::map<std::string, Rational> vars{{"x", y + d}, {"y", y}};
    Rational v = oracles::eval_expr(*r.script.arena, subject, vars);
    CHECK(oracles::in_interval(v, iv));
  }
}

TEST_CASE("exactness: small-integer float arithmetic has no rounding error") {
  RunResult r = run_source(
      "@rnd = float<ieee_32, ne>;\n"
      "x = int<zr>(x_);\n"
      "y = int<zr>(y_);\n"
      "s rnd= x + y;\n"
      "p rnd= x * y;\n"
      "{ x in [1,500] /\\ y in [1,500] -> s - (x + y) in [0,0] /\\ p - (x * y) in [0,0] }",
      cfg());
  CHECK(r.exit_code == 0);
}

TEST_CASE("q-range goals respect representability: example 13/10 in [1.3,1.3]") {
  RunResult r = run_source("{ 13/10 in [1.3,1.3] }", cfg());
  // 13/10 is not a literal; spell it as a division.
  CHECK(r.exit_code == 2);
  CHECK(r.error.find("empty set") != std::string::npos);
}

TEST_CASE("rounding enclosure through a format") {
  // The binade-edge rule is conservative: with the range reaching the power
  // of two at 2, the error bound is the half-ulp of the next binade.
  RunResult r = run_source(
      "@rnd = float<ieee_32, ne>;\n"
      "y = rnd(x);\n"
      "{ x in [1,2] -> y in [1,2] /\\ y - x in [-1b-23,1b-23] }",
      cfg());
  CHECK(r.exit_code == 0);
  RunResult edge = run_source(
      "@rnd = float<ieee_32, ne>;\n"
      "y = rnd(x);\n"
      "{ x in [1,2] -> y - x in [-1b-24,1b-24] }",
      cfg());
  CHECK(edge.exit_code == 1);
  // Strictly inside the binade the half-ulp bound is available.
  RunResult inside = run_source(
      "@rnd = float<ieee_32, ne>;\n"
      "y = rnd(x);\n"
      "{ x in [1,1.9] -> y - x in [-1b-24,1b-24] }",
      cfg());
  CHECK(inside.exit_code == 0);
}

TEST_CASE("relative error of a rounding needs the normal range") {
  RunResult ok = run_source(
      "@rnd = float<ieee_32, ne>;\n"
      "{ x in [1,2] -> (rnd(x) - x)/x in [-1b-24,1b-24] }",
      cfg());
  CHECK(ok.exit_code == 0);
  RunResult sub = run_source(
      "@rnd = float<ieee_32, ne>;\n"
      "{ x in [1b-140,1b-139] -> (rnd(x) - x)/x in [-1b-24,1b-24] }",
      cfg());
  CHECK(sub.exit_code == 1);  // subnormal range: the bound does not hold
}

TEST_CASE("under-specified operators carry their relative error bound") {
  RunResult r = run_source(
      "z = mul_rel<20>(x, y);\n"
      "{ x in [1,1] /\\ y in [0,0] -> z in [0,0] }",
      cfg());
  CHECK(r.exit_code == 0);
  RunResult q = run_source(
      "z = add_rel<20>(x, y);\n"
      "{ x in [1,1] /\\ y in [1,1] -> z - (x + y) in [-1b-18,1b-18] }",
      cfg());
  CHECK(q.exit_code == 0);
  // With a minimum exponent, no fact is emitted for tiny results.
  RunResult none = run_source(
      "z = add_rel<20,-60>(x, y);\n"
      "{ x in [1b-80,1b-79] /\\ y in [0,0] -> z in ? }",
      cfg());
  CHECK(none.exit_code == 1);
}

TEST_CASE("user rewrite hints transfer enclosures") {
  RunResult r = run_source(
      "{ x in [0,0.5] -> x * (2 - x * y) - 1/y in ? }\n"
      "x * (2 - x * y) - 1/y -> (x - 1/y) * (x - 1/y) * -y;\n",
      cfg());
  // y is unbounded, so even the rewrite cannot produce an enclosure; the
  // hint itself must not crash or reorder anything.
  CHECK(r.exit_code == 1);

  RunResult t = run_source(
      "{ x - 1/y in [-0.125,0.125] /\\ y in [1,2] -> x * (2 - x * y) - 1/y in ? }\n"
      "x * (2 - x * y) - 1/y -> (x - 1/y) * (x - 1/y) * -y;\n",
      cfg());
  REQUIRE(t.exit_code == 0);
  REQUIRE(t.answers.size() == 1);
  // (x - 1/y)^2 * -y over the hypothesis box: within [-2 * 0.125^2, 0].
  CHECK(Dyadic::compare_rational(t.answers[0].second.lo(), rat(-1, 32)) >= 0);
  CHECK(t.answers[0].second.up().sign() <= 0);
}

TEST_CASE("contradictory hypotheses prove any sequent vacuously") {
  RunResult r = run_source("{ x in [0,1] /\\ x in [2,3] -> x * x in [100,200] }", cfg());
  CHECK(r.exit_code == 0);
  CHECK(r.report.find("vacuously") != std::string::npos);
}

TEST_CASE("monotonicity: an extra hypothesis never loses a goal") {
  const char *base = "{ x in [0,2] /\\ y in [1,3] -> x + y in [1,5] }";
  const char *more = "{ x in [0,2] /\\ y in [1,3] /\\ x - y in [-3,1] -> x + y in [1,5] }";
  CHECK(run_source(base, cfg()).exit_code == 0);
  CHECK(run_source(more, cfg()).exit_code == 0);
}

TEST_CASE("engine soundness by sampling on a mixed script") {
  const char *src =
      "@rnd = float<ieee_32, ne>;\n"
      "y rnd= x * (1 - x);\n"
      "{ x in [0,1] -> y in ? /\\ y - x * (1 - x) in ? }";
  RunResult r = run_source(src, cfg());
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.answers.size() == 2);
  std::mt19937_64 rng(99);
  for (int i = 0; i < 10000; ++i) {
    std::map<std::string, Rational> vars{{"x", oracles::random_rational(rng, rat(0), rat(1))}};
    for (const auto &[subject, iv] : r.answers) {
      Rational v = oracles::eval_expr(*r.script.arena, subject, vars);
      CHECK(oracles::in_interval(v, iv));
    }
  }
}

TEST_CASE("abs and sqrt structural rows") {
  RunResult r = run_source("{ x in [-2,5] -> |x| in [0,5] /\\ sqrt(|x|) in ? }", cfg());
  REQUIRE(r.exit_code == 0);
  REQUIRE(r.answers.size() == 1);
  CHECK(Dyadic::compare_rational(r.answers[0].second.up(), rat(9, 4)) <= 0);
  CHECK(r.answers[0].second.lo().sign() <= 0);
}

TEST_CASE("fma is the exact a*b + c") {
  RunResult r = run_source("{ a in [1,2] /\\ b in [3,4] /\\ c in [-1,1] -> fma(a,b,c) in [2,9] }",
                           cfg());
  CHECK(r.exit_code == 0);
}

TEST_CASE("division by a range containing zero stays unproved, not crashed") {
  RunResult r = run_source("{ x in [1,2] /\\ y in [-1,1] -> x / y in [-10,10] }", cfg());
  CHECK(r.exit_code == 1);
}

TEST_CASE("one-sided hypotheses refine but never seed enclosures") {
  RunResult refine = run_source("{ x in [0,2] /\\ x <= 1 -> x in [0,1] }", cfg());
  CHECK(refine.exit_code == 0);
  RunResult seed_only = run_source("{ x <= 1 -> x in [0,1] }", cfg());
  CHECK(seed_only.exit_code == 1);
}

TEST_CASE("deterministic: identical runs produce identical reports") {
  const char *src = kSec21;
  RunResult a = run_source(src, cfg());
  RunResult b = run_source(src, cfg());
  CHECK(a.report == b.report);
}
