#include "doctest.h"
#include "encert/parser.hpp"
#include "oracles.hpp"

using namespace encert;
using oracles::rat;

namespace {
const char *kSec21 =
    "{ x - 2 in [-2,0] /\\ (x + 1 in [0,2] -> y in [3,4])"
    "  -> not x <= 1 \\/ x + y in ? }";
}

TEST_CASE("rnd= sugar wraps every arithmetic operator") {
  Script a = parse("@rnd = float< ieee_32, ne>;\ny = rnd(x * rnd(1 - x));\n{ y in ? }");
  Script b = parse("@rnd = float< ieee_32, ne>;\nz rnd= x * (1 - x);\n{ z in ? }");
  REQUIRE(a.aliases.size() == 1);
  REQUIRE(b.aliases.size() == 1);
  // Identical structure: compare the canonical (name-free) rendering.
  CHECK(a.arena->to_string(a.aliases[0].second, false) ==
        b.arena->to_string(b.aliases[0].second, false));

  // Both names on one DAG node draws a lint warning.
  Script c = parse(
      "@rnd = float< ieee_32, ne>;\n"
      "y = rnd(x * rnd(1 - x));\n"
      "z rnd= x * (1 - x);\n"
      "{ y in ? /\\ z in ? }");
  auto warnings = lint(c);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("same expression") != std::string::npos);
}

TEST_CASE("the section-2.1 proposition parses to the expected tree") {
  Script s = parse(kSec21);
  const PropTree &p = s.prop;
  REQUIRE(p.root >= 0);
  const auto &root = p.nodes[p.root];
  CHECK(root.kind == PropTree::Kind::impl);
  const auto &lhs = p.nodes[root.a];
  CHECK(lhs.kind == PropTree::Kind::conj);
  CHECK(p.nodes[lhs.a].kind == PropTree::Kind::atom);
  CHECK(p.nodes[lhs.b].kind == PropTree::Kind::impl);
  const auto &rhs = p.nodes[root.b];
  CHECK(rhs.kind == PropTree::Kind::disj);
  CHECK(p.nodes[rhs.a].kind == PropTree::Kind::neg);
  const auto &q = p.nodes[rhs.b];
  REQUIRE(q.kind == PropTree::Kind::atom);
  CHECK(q.atom.kind == PropAtom::Kind::query);
  CHECK(s.arena->to_string(q.atom.subject) == "x + y");
}

TEST_CASE("alias rules") {
  CHECK_THROWS_AS(parse("b = a * 2; a = 1; { a in ? }"), ParseError);
  CHECK_THROWS_AS(parse("a = 1; a = 2; { a in ? }"), ParseError);
  // Alias use before '{' and inside hints resolves to the same node.
  Script s = parse("a = x + 1; { a in [0,1] -> a * a in ? }");
  CHECK(s.aliases.size() == 1);
}

TEST_CASE("operator precedence and unary operators") {
  Script s = parse("e = -n * l2 + 1; { e in ? }");
  CHECK(s.arena->to_string(s.aliases[0].second, false) == "-n * l2 + 1");
  Script t = parse("e = 1 - -x; { e in ? }");
  CHECK(t.arena->to_string(t.aliases[0].second, false) == "1 - -x");
  Script u = parse("e = |x + 1| * 2; { e in ? }");
  CHECK(u.arena->to_string(u.aliases[0].second, false) == "|x + 1| * 2");
  Script v = parse("e = sqrt(x) * sqrt(x); { e in ? }");
  CHECK(v.arena->to_string(v.aliases[0].second, false) == "sqrt(x) * sqrt(x)");
  Script w = parse("e = fma(a, b, c); { e in ? }");
  CHECK(w.arena->to_string(w.aliases[0].second, false) == "fma(a, b, c)");
}

TEST_CASE("hash consing shares structurally equal subtrees") {
  Script s = parse("a = x * (1 - x); b = x * (1 - x) + 0; { a in ? }");
  NodeId a = s.aliases[0].second;
  NodeId b = s.aliases[1].second;
  CHECK(s.arena->at(b).child[0] == a);  // shared node identity
}

TEST_CASE("hints parse into their three kinds") {
  Script s = parse(
      "@rnd = float<ieee_32, ne>;\n"
      "x = rnd(x_); y = x - 1; z = x * (rnd(y) - y);\n"
      "{ x in [0,3] -> |z| <= 1b-26 }\n"
      "|z| $ x;\n"
      "$ u in 6;\n"
      "$ v in (0.5, 2);\n"
      "x ~ y;\n"
      "x * (2 - x * y) - 1/y -> (x - 1/y) * (x - 1/y) * -y;\n");
  REQUIRE(s.pave_hints.size() == 3);
  CHECK(s.pave_hints[0].targets.size() == 1);
  CHECK(s.pave_hints[0].axes[0].mode == PaveAxis::Mode::dichotomy);
  CHECK(s.pave_hints[1].targets.empty());
  CHECK(s.pave_hints[1].axes[0].mode == PaveAxis::Mode::even);
  CHECK(s.pave_hints[1].axes[0].count == 6);
  CHECK(s.pave_hints[2].axes[0].mode == PaveAxis::Mode::points);
  REQUIRE(s.pave_hints[2].axes[0].points.size() == 2);
  CHECK(s.pave_hints[2].axes[0].points[0] == rat(1, 2));
  REQUIRE(s.approx_hints.size() == 1);
  REQUIRE(s.rewrite_hints.size() == 1);

  // "$ x" with no targets defaults to an even 4-way split.
  Script t = parse("{ x in [0,1] -> x in ? }\n$ x;\n");
  CHECK(t.pave_hints[0].axes[0].mode == PaveAxis::Mode::even);
  CHECK(t.pave_hints[0].axes[0].count == 4);
}

TEST_CASE("format spellings") {
  Script s = parse(
      "a = float<24, -149, ne>(x);\n"
      "b = float<ieee_64, dn>(x);\n"
      "c = fixed<-8, up>(x);\n"
      "d = int<zr>(x);\n"
      "e = add_rel<20>(x, y);\n"
      "f = mul_rel<20, -60>(x, y);\n"
      "{ a in ? }");
  const Node &a = s.arena->at(s.aliases[0].second);
  REQUIRE(a.kind == NodeKind::round);
  CHECK(a.fmt->precision == 24);
  CHECK(a.fmt->min_exp == -149);
  const Node &c = s.arena->at(s.aliases[2].second);
  CHECK(c.fmt->is_fixed());
  CHECK(c.fmt->min_exp == -8);
  const Node &d = s.arena->at(s.aliases[3].second);
  CHECK(d.fmt->is_fixed());
  CHECK(d.fmt->min_exp == 0);
  const Node &e = s.arena->at(s.aliases[4].second);
  REQUIRE(e.kind == NodeKind::rel_round);
  CHECK(e.rel->precision == 20);
  CHECK_FALSE(e.rel->min_exp);
  const Node &f = s.arena->at(s.aliases[5].second);
  REQUIRE(f.rel->min_exp);
  CHECK(*f.rel->min_exp == -60);
}

TEST_CASE("grammar rejections carry positions") {
  CHECK_THROWS_AS(parse("{ x in [2,1] }"), ParseError);        // endpoints out of order
  CHECK_THROWS_AS(parse("{ x in }"), ParseError);
  CHECK_THROWS_AS(parse("{ x <= y }"), ParseError);            // inequality needs a constant
  CHECK_THROWS_AS(parse("{ x in [0,1] "), ParseError);         // unclosed
  CHECK_THROWS_AS(parse("a = float<3>(x); { a in ? }"), ParseError);
  CHECK_THROWS_AS(parse("a = nosuch<1, 2>(x); { a in ? }"), ParseError);
  CHECK_THROWS_AS(parse("a = add_rel<20>(x); { a in ? }"), ParseError);  // arity
  try {
    parse("{\n  x in\n}");
    CHECK(false);
  } catch (const ParseError &e) {
    CHECK(e.pos.line == 3);
  }
}

TEST_CASE("ring normalization proves equal sides and flags zero divisors") {
  Script s = parse(
      "{ x in [0,1] -> y in ? }\n"
      "x * (2 - x * y) - 1/y -> (x - 1/y) * (x - 1/y) * -y;\n"
      "y -> y * (x - x) / (x - x);\n"
      "y -> y + 1;\n");
  auto warnings = lint(s);
  CHECK(s.rewrite_hints[0].ring_proved);
  CHECK_FALSE(s.rewrite_hints[0].nonzero_conditions.empty());
  CHECK_FALSE(s.rewrite_hints[1].ring_proved);
  CHECK_FALSE(s.rewrite_hints[2].ring_proved);
  bool zero_div = false, not_equal = false;
  for (const auto &w : warnings) {
    if (w.find("trivially equal to zero") != std::string::npos) zero_div = true;
    if (w.find("not provably equal") != std::string::npos) not_equal = true;
  }
  CHECK(zero_div);
  CHECK(not_equal);
}

TEST_CASE("useless approximation hints are reported") {
  Script s = parse(
      "@floor = int<dn>;\n"
      "{ x - y in [-0.1,0.1] -> floor(x) - y in ? }\n"
      "x ~ y;\n"
      "u ~ v;\n");
  auto warnings = lint(s);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("useless") != std::string::npos);
}

TEST_CASE("round-trip: printing and reparsing preserves the DAG") {
  const char *cases[] = {
      kSec21,
      "@rnd = float< ieee_32, ne >;\n"
      "x = rnd(x_);\ny = x - 1;\nz = x * (rnd(y) - y);\n"
      "{ x in [0,3] -> |z| <= 1b-26 }\n|z| $ x;\n",
      "a = fma(x, y, sqrt(|z|));\n{ a in [0.5, 1.5] -> a * a in ? }\nx ~ y;\n",
  };
  for (const char *src : cases) {
    Script s1 = parse(src);
    std::string printed = s1.to_source();
    CAPTURE(printed);
    Script s2 = parse(printed);
    REQUIRE(s1.aliases.size() == s2.aliases.size());
    for (std::size_t i = 0; i < s1.aliases.size(); ++i)
      CHECK(s1.arena->to_string(s1.aliases[i].second, false) ==
            s2.arena->to_string(s2.aliases[i].second, false));
    REQUIRE(s1.prop.nodes.size() == s2.prop.nodes.size());
    for (std::size_t i = 0; i < s1.prop.nodes.size(); ++i) {
      CHECK(s1.prop.nodes[i].kind == s2.prop.nodes[i].kind);
      if (s1.prop.nodes[i].kind == PropTree::Kind::atom) {
        CHECK(s1.prop.nodes[i].atom.kind == s2.prop.nodes[i].atom.kind);
        CHECK(s1.arena->to_string(s1.prop.nodes[i].atom.subject, false) ==
              s2.arena->to_string(s2.prop.nodes[i].atom.subject, false));
      }
    }
    CHECK(s1.rewrite_hints.size() == s2.rewrite_hints.size());
    CHECK(s1.pave_hints.size() == s2.pave_hints.size());
  }
}

TEST_CASE("every Fig-1 production is exercised") {
  // PROG with both EQUAL forms, '@' aliases; REAL with all operators;
  // PROP with every connective; HINTS with all four shapes.
  const char *src =
      "@rnd = float<ieee_32, ne>;\n"
      "a = 1.5e1;\n"
      "b rnd= a + x - y * z / w;\n"
      "c = rnd(fma(x, y, z)) + sqrt(|x|) - -x + +x;\n"
      "{ not (a <= 3 \\/ b >= 2) /\\ (c in [0,1] -> b in ?) }\n"
      "b -> c; b ~ c; a, b $ x, y in 3, z in (0.25, 0.5); $ w;\n";
  Script s = parse(src);
  CHECK(s.aliases.size() == 3);
  CHECK(s.rounding_aliases.size() == 1);
  CHECK(s.rewrite_hints.size() == 1);
  CHECK(s.approx_hints.size() == 1);
  CHECK(s.pave_hints.size() == 2);
  CHECK(s.pave_hints[0].axes.size() == 3);
  CHECK(s.pave_hints[0].axes[0].mode == PaveAxis::Mode::dichotomy);
  CHECK(s.pave_hints[0].axes[1].mode == PaveAxis::Mode::even);
  CHECK(s.pave_hints[0].axes[2].mode == PaveAxis::Mode::points);
}
