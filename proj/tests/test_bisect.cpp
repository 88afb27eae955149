#include "doctest.h"
#include "encert/driver.hpp"
#include "oracles.hpp"

using namespace encert;
using oracles::rat;

namespace {
const char *kSec24 =
    "@rnd = float< ieee_32, ne >;\n"
    "x = rnd(x_);\n"
    "y = x - 1;\n"
    "z = x * (rnd(y) - y);\n"
    "{ x in [0,3] -> |z| <= 1b-26 }\n"
    "|z| $ x;\n";

std::string without_last_line(std::string s) {
  std::size_t pos = s.rfind("|z| $ x;");
  return s.substr(0, pos);
}
}  // namespace

TEST_CASE("shortest dyadic in a window") {
  CHECK(shortest_dyadic_in(rat(198, 100), rat(201, 100)) == Dyadic(2));
  CHECK(shortest_dyadic_in(rat(3, 8), rat(9, 8)) == Dyadic(1));
  CHECK(shortest_dyadic_in(rat(-1, 2), rat(1, 4)) == Dyadic(0));
  CHECK(shortest_dyadic_in(rat(5, 16), rat(7, 16)) == Dyadic(mpz_class(3), -3));
  CHECK(shortest_dyadic_in(rat(1, 3), rat(1, 3) + rat(1, 1000)) ==
        Dyadic::from_dyadic_rational(rat(171, 512)));
  // The result always lies inside the window and is unique at its grid.
  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    Rational a = oracles::random_rational(rng, rat(-50), rat(50), 9973);
    Rational b = a + oracles::random_rational(rng, rat(1, 1000), rat(3), 9973);
    Dyadic d = shortest_dyadic_in(a, b);
    CHECK(Dyadic::compare_rational(d, a) >= 0);
    CHECK(Dyadic::compare_rational(d, b) <= 0);
  }
}

TEST_CASE("section 2.4: the dichotomy hint proves what the direct run cannot") {
  RunResult with_hint = run_source(kSec24, RunConfig{});
  CHECK(with_hint.exit_code == 0);
  int tiles = 0;
  for (const auto &s : with_hint.sequents) tiles += s.tiles;
  CHECK(tiles > 1);

  RunResult without = run_source(without_last_line(kSec24), RunConfig{});
  CHECK(without.exit_code == 1);
}

TEST_CASE("user-point splits produce the requested tiles") {
  // Without the split the division by y is blocked by 0 in [-1, 2]; the
  // user points isolate the sign change.
  RunResult r = run_source(
      "{ x in [0,3] /\\ x - 2 in [-2,1] -> x * x in [0,9] }\n"
      "$ x in (0.5,2);\n",
      RunConfig{});
  CHECK(r.exit_code == 0);

  // Splitting helps when a goal needs per-tile proofs: |y| <= 2 over a
  // product that is loose on the whole range.
  RunResult s = run_source(
      "y = x * (3 - x);\n"
      "{ x in [0,3] -> y in [-0.1,2.3] }\n"
      "$ x in (1,2);\n",
      RunConfig{});
  // tiles: [0,1] -> y in [0,3]... the middle tile [1,2] gives [1,2*2]=..., this
  // remains unprovable: x*(3-x) interval arithmetic on [0,1] is [0,3].
  CHECK(s.exit_code == 1);
  RunResult t = run_source(
      "y = x * (3 - x);\n"
      "{ x in [0,3] -> y in [0,9] }\n"
      "$ x in (0.5,2);\n",
      RunConfig{});
  CHECK(t.exit_code == 0);
}

TEST_CASE("even splits tighten dependency-affected ranges") {
  // x*(1-x) on [0,1] evaluates to [-1,1] naively; with enough even tiles the
  // hull tightens toward [0,0.25] but interval dependency keeps some slack.
  RunResult naive = run_source("{ x in [0,1] -> x * (1 - x) in [-0.30,0.36] }", RunConfig{});
  CHECK(naive.exit_code == 1);
  RunResult split = run_source(
      "{ x in [0,1] -> x * (1 - x) in [-0.30,0.36] }\n"
      "$ x in 8;\n",
      RunConfig{});
  CHECK(split.exit_code == 0);
}

TEST_CASE("a goal proved without bisection is also proved with a hint") {
  const char *plain = "{ x in [0,2] -> x + 1 in [1,3] }";
  RunResult a = run_source(plain, RunConfig{});
  RunResult b = run_source((std::string(plain) + "\n$ x in 3;\n").c_str(), RunConfig{});
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  // The direct proof succeeds, so no tiles are generated at all.
  CHECK(b.sequents[0].tiles == 1);
}

TEST_CASE("dichotomy failure names the smallest failing tile") {
  RunResult r = run_source(
      "{ x in [0,1] -> x * (1 - x) in [0,0.2] }\n"  // false near x = 0.5
      "x * (1 - x) $ x;\n",
      RunConfig{.precision = 128,
                .max_iterations = 100,
                .max_applications = 1000000,
                .dichotomy_depth = 6});
  CHECK(r.exit_code == 1);
  REQUIRE_FALSE(r.sequents.empty());
  CHECK(r.sequents[0].failure.find("tile") != std::string::npos);
}

TEST_CASE("multi-axis hints build product pavings") {
  // x*y - x - y lies in [-3,2] on every quarter of [0,2]^2 by plain interval
  // evaluation, while the whole box only gives [-4,4].
  RunResult naive = run_source("{ x in [0,2] /\\ y in [0,2] -> x * y - x - y in [-3,2] }",
                               RunConfig{});
  CHECK(naive.exit_code == 1);
  RunResult r = run_source(
      "{ x in [0,2] /\\ y in [0,2] -> x * y - x - y in [-3,2] }\n"
      "$ x in 2, y in 2;\n",
      RunConfig{});
  CHECK(r.exit_code == 0);
  int tiles = 0;
  for (const auto &s : r.sequents) tiles += s.tiles;
  CHECK(tiles == 4);
}

TEST_CASE("later hints apply within the residue of earlier ones") {
  // The x-halving proves the tile [0,1] alone; the failing residue [1,2] is
  // closed by the second hint splitting y.
  RunResult r = run_source(
      "{ x in [0,2] /\\ y in [0,2] -> x * y - x - y in [-3,2] }\n"
      "$ x in 2;\n"
      "x * y - x - y $ y;\n",
      RunConfig{});
  CHECK(r.exit_code == 0);
  REQUIRE_FALSE(r.sequents.empty());
  CHECK(r.sequents[0].tiles >= 3);
}

TEST_CASE("tile union covers the box exactly") {
  RunResult r = run_source(
      "{ x in [0,1] -> x * (1 - x) in [-0.30,0.40] }\n"
      "$ x in 5;\n",
      RunConfig{});
  REQUIRE(r.exit_code == 0);
  // Find the merge step and check its edges: ascending, first = 0, last = 1.
  const auto &steps = r.sequents[0].steps;
  const ProofStep &m = steps[r.sequents[0].final_step];
  REQUIRE(m.thm == Thm::merge);
  REQUIRE(m.params.size() == 6);
  CHECK(m.params.front() == Dyadic(0));
  CHECK(m.params.back() == Dyadic(1));
  for (std::size_t i = 0; i + 1 < m.params.size(); ++i) CHECK(m.params[i] < m.params[i + 1]);
}
