#ifndef ENCERT_PARSER_HPP
#define ENCERT_PARSER_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "encert/expr.hpp"

namespace encert {

struct SourcePos {
  int line = 0;
  int col = 0;
  std::string to_string() const { return std::to_string(line) + ":" + std::to_string(col); }
};

struct ParseError : std::runtime_error {
  ParseError(const std::string &msg, SourcePos p)
      : std::runtime_error(p.to_string() + ": " + msg), pos(p) {}
  SourcePos pos;
};

/// One enclosure atom of the proposition language.
struct PropAtom {
  enum class Kind { in_range, le, ge, query };
  Kind kind = Kind::query;
  NodeId subject = kNoNode;
  Rational lo, hi;  // in_range: both; le: hi; ge: lo

  static PropAtom in_range(NodeId s, Rational l, Rational h) {
    return {Kind::in_range, s, std::move(l), std::move(h)};
  }
  static PropAtom le(NodeId s, Rational h) { return {Kind::le, s, Rational(), std::move(h)}; }
  static PropAtom ge(NodeId s, Rational l) { return {Kind::ge, s, std::move(l), Rational()}; }
  static PropAtom query(NodeId s) { return {Kind::query, s, Rational(), Rational()}; }

  friend bool operator==(const PropAtom &a, const PropAtom &b) {
    return a.kind == b.kind && a.subject == b.subject && a.lo == b.lo && a.hi == b.hi;
  }
};

/// Proposition tree over atoms: and / or / implication / negation.
struct PropTree {
  enum class Kind { atom, conj, disj, impl, neg };
  struct PNode {
    Kind kind;
    PropAtom atom;  // kind == atom
    int a = -1, b = -1;
  };
  std::vector<PNode> nodes;
  int root = -1;

  int add_atom(const PropAtom &at) {
    nodes.push_back({Kind::atom, at, -1, -1});
    return static_cast<int>(nodes.size()) - 1;
  }
  int add(Kind k, int a, int b = -1) {
    nodes.push_back({k, PropAtom{}, a, b});
    return static_cast<int>(nodes.size()) - 1;
  }
};

/// Rounding operator usable in expressions: a format or an under-specified
/// relative operator.
struct RoundingOp {
  std::optional<Format> fmt;
  std::optional<RelOpSpec> rel;
};

struct RewriteHint {
  NodeId lhs = kNoNode, rhs = kNoNode;
  bool ring_proved = false;              // both sides equal by ring normalization
  std::vector<NodeId> nonzero_conditions;  // divisors the ring proof relies on
  SourcePos pos;
};

struct ApproxHint {
  NodeId approx = kNoNode, exact = kNoNode;
  SourcePos pos;
};

struct PaveAxis {
  enum class Mode { dichotomy, even, points };
  NodeId var = kNoNode;
  Mode mode = Mode::dichotomy;
  long count = 0;                 // even
  std::vector<Rational> points;   // points
};

struct PaveHint {
  std::vector<NodeId> targets;  // empty = all goals
  std::vector<PaveAxis> axes;
  SourcePos pos;
};

struct Script {
  std::shared_ptr<ExprArena> arena;
  std::vector<std::pair<std::string, NodeId>> aliases;  // definition order
  std::vector<std::pair<std::string, RoundingOp>> rounding_aliases;
  PropTree prop;
  std::vector<RewriteHint> rewrite_hints;
  std::vector<ApproxHint> approx_hints;
  std::vector<PaveHint> pave_hints;
  std::string source;

  /// Renders back to a script accepted by parse(); formats are spelled out,
  /// alias names are reused once defined.
  std::string to_source() const;
};

Script parse(const std::string &source);

/// Post-parse checks that only warn: duplicate names for one expression,
/// rewrite rules whose sides differ under ring normalization, divisors
/// trivially equal to zero inside rule sides, and redundant ~ hints.  Also
/// fills in RewriteHint::ring_proved.
std::vector<std::string> lint(Script &script);

/// Directed approximation pairs the tool registers automatically: rounded
/// nodes approximate their arguments, and subjects shaped x-y or (x-y)/y
/// relate x to y.  `atoms` lists the hypothesis atoms to inspect.
std::vector<std::pair<NodeId, NodeId>> automatic_approx_pairs(
    const ExprArena &arena, const std::vector<PropAtom> &atoms);

/// Ring normalization facilities (multivariate rational-coefficient
/// polynomials with division by cross-multiplication).
bool ring_equal(const ExprArena &arena, NodeId a, NodeId b,
                std::vector<NodeId> *nonzero_conditions = nullptr);
std::vector<NodeId> trivially_zero_divisors(const ExprArena &arena, NodeId e);

}  // namespace encert

#endif
