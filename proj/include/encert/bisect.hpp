#ifndef ENCERT_BISECT_HPP
#define ENCERT_BISECT_HPP

#include "encert/engine.hpp"

namespace encert {

/// Shortest-mantissa dyadic inside [lo, up] (lo <= up); used to snap split
/// points so certificates stay short and binade boundaries become reachable.
Dyadic shortest_dyadic_in(const Rational &lo, const Rational &up);

struct PaveOutcome {
  bool proved = false;
  std::vector<ProofStep> steps;   // proof of the sequent over the whole box
  std::uint32_t final_step = 0;   // qed or merge step concluding the sequent
  int tiles = 1;
  std::string failure;            // smallest failing tile when unproved
  bool budget_exhausted = false;
  std::vector<std::string> notes;
  std::map<NodeId, Interval> query_answers;  // hull of per-tile answers
  std::vector<std::string> diagnostics;
};

/// Proves one sequent, bisecting per the hints when the direct attempt
/// fails.  Hints run in order; even/points splits apply once, dichotomy
/// re-splits the widest listed axis of a failing tile up to `max_depth`
/// halvings per axis.
PaveOutcome prove_with_paving(ExprArena &arena, const EngineConfig &cfg, unsigned max_depth,
                              const std::vector<HypSeed> &hyps,
                              const std::vector<GoalSeed> &goals,
                              const std::vector<PaveHint> &hints,
                              const std::vector<std::pair<NodeId, NodeId>> &approx_hints,
                              const std::vector<std::tuple<int, NodeId, NodeId>> &user_rules);

}  // namespace encert

#endif
