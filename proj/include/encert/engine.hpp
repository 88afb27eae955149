#ifndef ENCERT_ENGINE_HPP
#define ENCERT_ENGINE_HPP

#include <cstdint>
#include <map>
#include <set>

#include "encert/logic.hpp"
#include "encert/rewrite.hpp"

namespace encert {

struct EngineConfig {
  unsigned precision = 128;               // working mantissa bits for outward rounding
  unsigned max_iterations = 100;
  std::uint64_t max_applications = 1000000;
};

/// Theorem vocabulary shared by the prover, the certificate and its checker.
enum class Thm : std::uint8_t {
  hyp,            // sequent hypothesis (two-sided range)
  assume,         // bisection tile assumption on an axis variable
  constant,       // BND of a literal
  fix_singleton,  // FIX from a singleton enclosure
  flt_singleton,  // FLT from a singleton enclosure
  neg_bnd, add_bnd, sub_bnd, mul_bnd, div_bnd, sqrt_bnd, abs_bnd, fma_bnd,
  sub_self,       // a - a
  div_self,       // a / a
  mul_self,       // a * a
  rel_compose,    // a + b + a*b
  round_bnd,      // BND(rnd(a)) from BND(a)
  round_clip,     // BND(rnd(a)) refined to the representable set
  round_fix, round_flt,
  err_abs,        // BND(rnd(a) - a)
  err_rel,        // BND((rnd(a) - a)/a)
  round_exact,    // rounding error [0,0] from FIX/FLT
  relop_bnd, relop_abs_err, relop_rel_err,
  abs_neg, abs_abs, abs_sqrt, abs_addsub, abs_mul, abs_div,
  abs_of_bnd,       // ABS(a) from BND(a)
  bnd_of_abs,       // BND(a) from ABS(a)
  bnd_abs_refine,   // BND(a) from BND(a) and ABS(a)
  abs_node_of_abs,  // BND(|a|) from ABS(a)
  abs_of_abs_node,  // ABS(a) from BND(|a|)
  fix_addsub, fix_mul, flt_mul,
  fix_of_flt_abs, flt_of_fix_abs,
  intersect,
  hyp_halfline,   // refinement by a one-sided hypothesis
  rewrite_rule,   // enclosure transfer along a built-in rule
  user_rewrite,   // enclosure transfer along a user hint
  contradiction,  // incompatible facts about one expression
  goal_atom,      // a goal atom holds
  goal_false,     // a goal holds vacuously by contradiction
  merge,          // bisection tiles cover the axis range
  qed,            // sequent closed
};

const char *thm_name(Thm t);
std::optional<Thm> thm_from_name(const std::string &name);

struct Concl {
  enum class Kind : std::uint8_t { bnd, abs, fix, flt, falsum, goal, sequent };
  Kind kind = Kind::bnd;
  Interval iv;           // bnd / abs
  std::int64_t num = 0;  // fix exponent / flt precision / goal index

  static Concl bnd(Interval i) { return {Kind::bnd, std::move(i), 0}; }
  static Concl abs(Interval i) { return {Kind::abs, std::move(i), 0}; }
  static Concl fix(std::int64_t e) { return {Kind::fix, {}, e}; }
  static Concl flt(std::int64_t p) { return {Kind::flt, {}, p}; }
  static Concl falsum() { return {Kind::falsum, {}, 0}; }
  static Concl goal(std::int64_t g) { return {Kind::goal, {}, g}; }
  static Concl sequent(std::int64_t s) { return {Kind::sequent, {}, s}; }
};

/// One derivation.  Everything the independent checker needs to re-validate
/// the step from dyadic arithmetic is stored inline.
struct ProofStep {
  Thm thm;
  NodeId subject = kNoNode;
  Concl concl;
  std::vector<std::uint32_t> operands;  // earlier step ids
  std::int64_t aux = -1;   // hyp index / rule index / goal index / tile index
  std::int64_t aux2 = -1;  // err-info encoding / merge id for assumes
  std::vector<Dyadic> params;     // merge cut points
  std::vector<NodeId> expr_args;  // rewrite rhs + binding, merge axis, ...
};

// err_abs/err_rel aux encoding: which info fed the enclosure.
enum : std::int64_t {
  kErrInfoNone = 0,
  kErrInfoBndArg = 1,
  kErrInfoBndResult = 2,
  kErrInfoAbsArg = 3,
  kErrInfoAbsResult = 4,
};

/// A hypothesis prepared for the prover: original atom plus its outward
/// dyadic reading.
struct HypSeed {
  PropAtom atom;
  int hyp_index = -1;      // position in the sequent (certificate reference)
  bool is_assume = false;  // bisection tile assumption instead of a hypothesis
  Interval range;          // two-sided reading (in_range / assume)
  Dyadic bound;            // one-sided reading (le / ge)
};

HypSeed make_hyp_seed(const PropAtom &atom, int index, unsigned precision);

/// A goal prepared for the prover: inward dyadic reading.  Throws
/// EmptyGoalError when the inward reading is empty.
struct EmptyGoalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GoalSeed {
  PropAtom atom;
  int goal_index = -1;
  Interval inner;  // in_range: inward interval; le: [*, hi]; ge: [lo, *]
};
GoalSeed make_goal_seed(const PropAtom &atom, int index, unsigned precision);

struct EngineResult {
  enum class Status { proved, unproved, budget_exhausted };
  Status status = Status::unproved;
  bool contradiction = false;
  int chosen_disjunct = -1;
  std::uint32_t qed_step = 0;
  std::uint64_t iterations = 0;
  std::uint64_t applications = 0;
  std::vector<std::string> diagnostics;  // per failed disjunct
};

/// The saturation prover for one sequent (or one bisection tile).  Works
/// breadth-first over the expression DAG, applying every theorem row and
/// every rewrite whose guards are discharged, intersecting derived bounds
/// until the goals hold or nothing improves.
class Engine {
 public:
  Engine(ExprArena &arena, EngineConfig cfg);

  void add_approx(NodeId approx, NodeId exact);
  void add_user_rule(int index, NodeId lhs, NodeId rhs);
  void seed(const std::vector<HypSeed> &hyps, const std::vector<GoalSeed> &goals);

  EngineResult run();

  const std::vector<ProofStep> &log() const { return log_; }
  std::optional<Interval> bnd_of(NodeId n) const;
  std::uint32_t bnd_step_of(NodeId n) const;

 private:
  struct NodeFacts {
    std::optional<Interval> bnd;
    std::uint32_t bnd_step = 0;
    std::optional<Interval> abs;
    std::uint32_t abs_step = 0;
    std::optional<std::int64_t> fix_e;
    std::uint32_t fix_step = 0;
    std::optional<std::int64_t> flt_p;
    std::uint32_t flt_step = 0;
  };
  struct HalfLine {
    bool is_upper;  // true: subject <= bound
    Dyadic bound;
    int hyp_index;
  };
  struct REdge {
    NodeId subject;
    NodeId rhs;
    int rule = -1;        // builtin rule index, or -1 for user rules
    int user_index = -1;  // user hint index when rule < 0
    std::vector<std::uint32_t> guard_steps;
    std::vector<NodeId> binding;  // rhs + lower[4] + upper[4] for the checker
  };

  NodeFacts &facts(NodeId n);
  std::uint32_t push_step(ProofStep step);
  bool store_bnd(NodeId n, const Interval &iv, ProofStep step);
  bool store_abs(NodeId n, const Interval &iv, ProofStep step);
  bool store_fix(NodeId n, std::int64_t e, ProofStep step);
  bool store_flt(NodeId n, std::int64_t p, ProofStep step);
  void flag_contradiction(std::uint32_t s1, std::uint32_t s2, NodeId subject);

  void apply_rows(NodeId n);
  void apply_error_rows(NodeId n);
  void try_rewrites(NodeId n);
  void transfer_edges();
  std::optional<std::uint32_t> discharge_guard(RuleCond::Kind kind, NodeId e) const;
  bool goal_provable(const GoalSeed &g, std::string *diag) const;
  std::optional<ErrInfo> info_for(NodeId arg, NodeId rounded, std::int64_t which,
                                  std::uint32_t *step) const;

  ExprArena &arena_;
  EngineConfig cfg_;
  std::map<NodeId, NodeFacts> facts_;
  std::map<NodeId, std::vector<HalfLine>> halflines_;
  ApproxRegistry approx_;
  std::vector<std::pair<int, std::pair<NodeId, NodeId>>> user_rules_;
  std::vector<GoalSeed> goals_;
  std::vector<ProofStep> log_;
  std::vector<REdge> edges_;
  std::set<std::tuple<NodeId, int, int, NodeId>> edge_keys_;
  bool changed_ = false;
  bool contradiction_ = false;
  std::uint32_t contradiction_step_ = 0;
  std::uint64_t applications_ = 0;
};

}  // namespace encert

#endif
