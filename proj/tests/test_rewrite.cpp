#include "doctest.h"
#include "encert/rewrite.hpp"
#include "oracles.hpp"

using namespace encert;
using oracles::rat;

namespace {

// Draws metavariable values compatible with a rule's semantic guards; sqrt
// arguments are squared draws so evaluation stays exact.
bool draw_assignment(const RewriteRule &rule, std::mt19937_64 &rng,
                     std::array<Rational, 4> &lower, std::array<Rational, 4> &upper) {
  bool needs_squares = rule.name.find("sqrt") != std::string::npos ||
                       rule.name == "square_sqrt";
  for (int i = 0; i < 4; ++i) {
    Rational v = oracles::random_rational(rng, rat(-6), rat(6), 211);
    if (needs_squares) v = v * v;  // keep roots rational
    lower[i] = v;
    upper[i] = oracles::random_rational(rng, rat(-6), rat(6), 211);
  }
  // Respect the semantic guards by evaluating each guard term.
  for (const RuleCond &c : rule.conds) {
    switch (c.kind) {
      case RuleCond::Kind::nonzero: {
        Rational v = eval_pattern(rule, c.t1, lower, upper);
        if (v == 0) return false;
        break;
      }
      case RuleCond::Kind::nonneg: {
        if (eval_pattern(rule, c.t1, lower, upper) < 0) return false;
        break;
      }
      case RuleCond::Kind::positive: {
        if (eval_pattern(rule, c.t1, lower, upper) <= 0) return false;
        break;
      }
      default:
        break;  // syntactic guards do not constrain values
    }
  }
  return true;
}

}  // namespace

TEST_CASE("every built-in rule preserves values under its guards") {
  const auto &rules = builtin_rules();
  CHECK(rules.size() == 37);
  std::mt19937_64 rng(20240811);
  for (const auto &rule : rules) {
    CAPTURE(rule.name);
    int checked = 0;
    int attempts = 0;
    while (checked < 1000 && attempts < 20000) {
      ++attempts;
      std::array<Rational, 4> lower, upper;
      if (!draw_assignment(rule, rng, lower, upper)) continue;
      try {
        Rational before = eval_pattern(rule, rule.before, lower, upper);
        Rational after = eval_pattern(rule, rule.after, lower, upper);
        CHECK(before == after);
        ++checked;
      } catch (const PatternEvalUndefined &) {
        // division by zero in an unguarded spot of the draw; resample
      }
    }
    CHECK(checked == 1000);
  }
}

TEST_CASE("uppercase metavariables only match registered approximations") {
  ExprArena arena;
  NodeId x = arena.variable("x"), y = arena.variable("y");
  NodeId diff = arena.sub(x, y);
  ApproxRegistry approx;

  const RewriteRule *sub_xals = nullptr;
  for (const auto &r : builtin_rules())
    if (r.name == "sub_xals") sub_xals = &r;
  REQUIRE(sub_xals);

  CHECK(match_rule(arena, diff, *sub_xals, approx).empty());
  approx.add(x, y);
  // x - y with x ~ y gives A := y, but the guard A != b rejects it
  // (the after-side would mention y - y).
  CHECK(match_rule(arena, diff, *sub_xals, approx).empty());

  NodeId z = arena.variable("z");
  NodeId dxz = arena.sub(x, z);
  auto ms = match_rule(arena, dxz, *sub_xals, approx);
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].lower[0] == x);
  CHECK(ms[0].lower[1] == z);
  CHECK(ms[0].upper[0] == y);
  NodeId rhs = instantiate(arena, *sub_xals, sub_xals->after, ms[0]);
  CHECK(arena.to_string(rhs, false) == "x - y + (y - z)");
}

TEST_CASE("the section-2.3 error decomposition chain") {
  // rnd(a+b) - (A+B) -> (rnd(a+b) - (a+b)) + ((a+b) - (A+B)) by sub_xals
  // with the automatic rounding pair, then add_mibs splits the exact part.
  ExprArena arena;
  Format f{Format::Family::flt, 24, -149, RoundDir::ne};
  NodeId a = arena.variable("a"), b = arena.variable("b");
  NodeId A = arena.variable("A"), B = arena.variable("B");
  NodeId ab = arena.add(a, b), AB = arena.add(A, B);
  NodeId r = arena.round(f, ab);
  NodeId err = arena.sub(r, AB);
  ApproxRegistry approx;
  approx.add(r, ab);  // the rounding pair
  approx.add(a, A);
  approx.add(b, B);

  const RewriteRule *sub_xals = nullptr, *add_mibs = nullptr;
  for (const auto &rule : builtin_rules()) {
    if (rule.name == "sub_xals") sub_xals = &rule;
    if (rule.name == "add_mibs") add_mibs = &rule;
  }
  auto ms = match_rule(arena, err, *sub_xals, approx);
  REQUIRE(ms.size() == 1);
  NodeId rhs = instantiate(arena, *sub_xals, sub_xals->after, ms[0]);
  CHECK(arena.to_string(rhs, false) ==
        "float<24,-149,ne>(a + b) - (a + b) + (a + b - (A + B))");

  NodeId exact_err = arena.sub(ab, AB);
  auto ms2 = match_rule(arena, exact_err, *add_mibs, approx);
  REQUIRE(ms2.size() == 1);
  NodeId rhs2 = instantiate(arena, *add_mibs, add_mibs->after, ms2[0]);
  CHECK(arena.to_string(rhs2, false) == "a - A + (b - B)");
}

TEST_CASE("semantic guards become obligations, not silent assumptions") {
  ExprArena arena;
  NodeId a = arena.variable("a"), b = arena.variable("b");
  NodeId quot = arena.div(a, arena.add(a, b));
  ApproxRegistry approx;
  const RewriteRule *addf_1 = nullptr;
  for (const auto &r : builtin_rules())
    if (r.name == "addf_1") addf_1 = &r;
  auto ms = match_rule(arena, quot, *addf_1, approx);
  REQUIRE(ms.size() == 1);
  auto obligations = semantic_guards(arena, *addf_1, ms[0]);
  REQUIRE(obligations.size() == 2);
  CHECK(obligations[0].second == a);
  CHECK(arena.to_string(obligations[1].second, false) == "a + b");

  // The literal-one filter rejects a = 1.
  NodeId one = arena.constant(rat(1));
  NodeId quot1 = arena.div(one, arena.add(one, b));
  CHECK(match_rule(arena, quot1, *addf_1, approx).empty());
}

TEST_CASE("matching is structural over the hash-consed DAG") {
  ExprArena arena;
  NodeId x = arena.variable("x");
  NodeId sq = arena.mul(arena.sqrt(x), arena.sqrt(x));
  const RewriteRule *square_sqrt = nullptr;
  for (const auto &r : builtin_rules())
    if (r.name == "square_sqrt") square_sqrt = &r;
  ApproxRegistry approx;
  auto ms = match_rule(arena, sq, *square_sqrt, approx);
  REQUIRE(ms.size() == 1);
  CHECK(instantiate(arena, *square_sqrt, square_sqrt->after, ms[0]) == x);
}
