#ifndef ENCERT_DRIVER_HPP
#define ENCERT_DRIVER_HPP

#include "encert/bisect.hpp"

namespace encert {

struct RunConfig {
  unsigned precision = 128;  // working mantissa bits; >= 2
  unsigned max_iterations = 100;
  std::uint64_t max_applications = 1000000;
  unsigned dichotomy_depth = 32;
};

struct SequentReport {
  Sequent sequent;
  std::vector<HypSeed> hyp_seeds;
  std::vector<GoalSeed> goal_seeds;
  bool proved = false;
  bool contradiction = false;
  bool budget_exhausted = false;
  int tiles = 1;
  std::vector<std::string> diagnostics;
  std::string failure;
  std::vector<ProofStep> steps;   // kept when proved
  std::uint32_t final_step = 0;
};

struct RunResult {
  int exit_code = 2;  // 0 all proved, 1 some goal unproved, 2 input error
  std::string error;
  std::vector<std::string> warnings;
  Script script;
  std::vector<SequentReport> sequents;
  std::vector<std::pair<NodeId, Interval>> answers;  // query answers, stable order
  std::string report;
};

/// Full pipeline: parse, lint, decompose, prove each sequent (bisecting per
/// the hints when needed), render the report.  Never throws on user errors;
/// they land in exit_code/error.
RunResult run_source(const std::string &source, const RunConfig &config);

/// One interval endpoint for reports: exact decimal when short enough, else
/// the authoritative dyadic literal with an approximate decimal.
std::string render_endpoint(const Dyadic &d);
std::string render_answer_line(const ExprArena &arena, NodeId subject, const Interval &iv);

}  // namespace encert

#endif
