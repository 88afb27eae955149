#ifndef ENCERT_REWRITE_HPP
#define ENCERT_REWRITE_HPP

#include <array>
#include <map>
#include <vector>

#include "encert/expr.hpp"

namespace encert {

/// Pattern term over metavariables a..d; uppercase variables match only
/// expressions linked through the approximation registry.
struct PTerm {
  enum class Kind { var, uvar, constant, neg, abs, sqrt, add, sub, mul, div };
  Kind kind = Kind::var;
  int var = -1;   // var / uvar index
  long cval = 0;  // constant
  int a = -1, b = -1;
};

struct RuleCond {
  enum class Kind {
    distinct,       // syntactic: the two instantiated terms are different nodes
    nonzero,        // semantic: needs a fact excluding zero
    nonneg,         // semantic: needs a lower bound >= 0
    positive,       // semantic: needs a lower bound > 0
    not_const_one,  // syntactic: the term is not the literal 1
  };
  Kind kind;
  int t1 = -1, t2 = -1;
};

struct RewriteRule {
  std::string name;
  std::vector<PTerm> pool;
  int before = -1, after = -1;
  std::vector<RuleCond> conds;
  std::array<bool, 4> upper_used{false, false, false, false};
};

/// The built-in rule table.
const std::vector<RewriteRule> &builtin_rules();

/// Directed approximation pairs: (approx, exact).
class ApproxRegistry {
 public:
  void add(NodeId approx, NodeId exact);
  bool contains(NodeId approx, NodeId exact) const;
  const std::vector<NodeId> &exacts_of(NodeId approx) const;
  const std::vector<NodeId> &approxes_of(NodeId exact) const;
  std::size_t size() const { return pairs_.size(); }

 private:
  std::vector<std::pair<NodeId, NodeId>> pairs_;
  std::map<NodeId, std::vector<NodeId>> by_approx_, by_exact_;
  static const std::vector<NodeId> kEmpty;
};

struct Binding {
  std::array<NodeId, 4> lower{kNoNode, kNoNode, kNoNode, kNoNode};
  std::array<NodeId, 4> upper{kNoNode, kNoNode, kNoNode, kNoNode};
};

/// All bindings under which `subject` matches rule.before, with uppercase
/// variables resolved through the registry (one binding per partner choice).
/// Syntactic guards (distinctness, literal-one) are already filtered;
/// semantic guards are left to the caller.
std::vector<Binding> match_rule(const ExprArena &arena, NodeId subject, const RewriteRule &rule,
                                const ApproxRegistry &approx);

/// Builds the instance of a pattern term under a binding (may create nodes).
NodeId instantiate(ExprArena &arena, const RewriteRule &rule, int term, const Binding &binding);

/// Semantic guard obligations of a rule instance, as (kind, node) pairs.
std::vector<std::pair<RuleCond::Kind, NodeId>> semantic_guards(ExprArena &arena,
                                                               const RewriteRule &rule,
                                                               const Binding &binding);

/// Exact evaluation of a pattern term under a metavariable assignment; the
/// rule-transcription tests use this to check value preservation.
struct PatternEvalUndefined : std::exception {};
Rational eval_pattern(const RewriteRule &rule, int term,
                      const std::array<Rational, 4> &lower_vals,
                      const std::array<Rational, 4> &upper_vals);

}  // namespace encert

#endif
