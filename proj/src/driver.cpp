#include "encert/driver.hpp"

#include <sstream>

namespace encert {

std::string render_endpoint(const Dyadic &d) {
  std::string dec = d.to_decimal();
  if (!dec.empty() && dec.front() == '~') return d.to_literal() + " (" + dec + ")";
  return dec;
}

std::string render_answer_line(const ExprArena &arena, NodeId subject, const Interval &iv) {
  return arena.to_string(subject) + " in [" + render_endpoint(iv.lo()) + "," +
         render_endpoint(iv.up()) + "]";
}

namespace {

std::string render_atom(const ExprArena &arena, const PropAtom &a) {
  std::string e = arena.to_string(a.subject);
  switch (a.kind) {
    case PropAtom::Kind::in_range:
      return e + " in [" + rational_literal(a.lo) + "," + rational_literal(a.hi) + "]";
    case PropAtom::Kind::le:
      return e + " <= " + rational_literal(a.hi);
    case PropAtom::Kind::ge:
      return e + " >= " + rational_literal(a.lo);
    case PropAtom::Kind::query:
      return e + " in ?";
  }
  return e;
}

}  // namespace

RunResult run_source(const std::string &source, const RunConfig &config) {
  RunResult out;
  try {
    out.script = parse(source);
  } catch (const ParseError &e) {
    out.error = e.what();
    out.exit_code = 2;
    out.report = std::string("error: ") + e.what() + "\n";
    return out;
  }
  out.warnings = lint(out.script);

  std::vector<Sequent> sequents;
  try {
    sequents = decompose(out.script.prop);
  } catch (const UnspecifiedHypothesisError &e) {
    out.error = e.what();
    out.exit_code = 2;
    out.report = std::string("error: ") + e.what() + "\n";
    return out;
  }

  ExprArena &arena = *out.script.arena;
  EngineConfig ecfg;
  ecfg.precision = config.precision;
  ecfg.max_iterations = config.max_iterations;
  ecfg.max_applications = config.max_applications;

  std::vector<std::pair<NodeId, NodeId>> approx;
  for (const auto &h : out.script.approx_hints) approx.emplace_back(h.approx, h.exact);
  std::vector<std::tuple<int, NodeId, NodeId>> urules;
  for (std::size_t i = 0; i < out.script.rewrite_hints.size(); ++i)
    urules.emplace_back(static_cast<int>(i), out.script.rewrite_hints[i].lhs,
                        out.script.rewrite_hints[i].rhs);

  bool all_proved = true;
  std::map<NodeId, Interval> answer_map;
  std::vector<NodeId> answer_order;
  for (const Sequent &seq : sequents) {
    SequentReport rep;
    rep.sequent = seq;
    try {
      for (std::size_t i = 0; i < seq.hypotheses.size(); ++i)
        rep.hyp_seeds.push_back(
            make_hyp_seed(seq.hypotheses[i], static_cast<int>(i), config.precision));
      for (std::size_t i = 0; i < seq.goals.size(); ++i)
        rep.goal_seeds.push_back(
            make_goal_seed(seq.goals[i], static_cast<int>(i), config.precision));
    } catch (const EmptyGoalError &e) {
      out.error = e.what();
      out.exit_code = 2;
      out.report = std::string("error: ") + e.what() + "\n";
      return out;
    }
    PaveOutcome pv = prove_with_paving(arena, ecfg, config.dichotomy_depth, rep.hyp_seeds,
                                       rep.goal_seeds, out.script.pave_hints, approx, urules);
    rep.proved = pv.proved;
    rep.budget_exhausted = pv.budget_exhausted;
    rep.tiles = pv.tiles;
    rep.failure = pv.failure;
    rep.diagnostics = pv.diagnostics;
    for (const auto &n : pv.notes) out.warnings.push_back(n);
    if (pv.proved) {
      rep.steps = std::move(pv.steps);
      rep.final_step = pv.final_step;
      rep.contradiction = !rep.steps.empty() && rep.steps[rep.final_step].thm == Thm::qed &&
                          rep.steps[rep.final_step].aux < 0;
      for (const auto &[q, iv] : pv.query_answers) {
        auto it = answer_map.find(q);
        if (it == answer_map.end()) {
          answer_map.emplace(q, iv);
          answer_order.push_back(q);
        } else {
          it->second = iv_hull(it->second, iv);
        }
      }
    } else {
      all_proved = false;
    }
    out.sequents.push_back(std::move(rep));
  }

  for (NodeId q : answer_order) out.answers.emplace_back(q, answer_map.at(q));
  out.exit_code = all_proved ? 0 : 1;

  // Report.
  std::ostringstream os;
  for (const auto &w : out.warnings) os << "warning: " << w << "\n";
  for (const auto &[q, iv] : out.answers) os << render_answer_line(arena, q, iv) << "\n";
  // Distinct specified goal atoms with verdicts.
  std::vector<PropAtom> listed;
  for (const auto &rep : out.sequents) {
    for (const PropAtom &g : rep.sequent.goals) {
      if (g.kind == PropAtom::Kind::query) continue;
      bool seen = false;
      for (const auto &x : listed) seen = seen || x == g;
      if (seen) continue;
      listed.push_back(g);
      bool proved_everywhere = true;
      for (const auto &r2 : out.sequents) {
        bool contains = false;
        for (const auto &g2 : r2.sequent.goals) contains = contains || g2 == g;
        if (contains && !r2.proved) proved_everywhere = false;
      }
      os << render_atom(arena, g) << ": " << (proved_everywhere ? "proved" : "not proved") << "\n";
    }
  }
  for (const auto &rep : out.sequents) {
    if (rep.proved) {
      if (rep.contradiction) os << "note: contradictory hypotheses prove one sequent vacuously\n";
      continue;
    }
    os << "unproved sequent:";
    for (const auto &h : rep.sequent.hypotheses) os << " " << render_atom(arena, h);
    os << " ->";
    for (const auto &g : rep.sequent.goals) os << " " << render_atom(arena, g);
    os << "\n";
    if (!rep.failure.empty()) os << "  " << rep.failure << "\n";
    for (const auto &d : rep.diagnostics) os << "  " << d << "\n";
    if (rep.budget_exhausted) os << "  (search budget exhausted before a fixpoint)\n";
  }
  os << (all_proved ? "all goals proved" : "some goals could not be proved");
  os << " (" << out.sequents.size() << " sequent" << (out.sequents.size() == 1 ? "" : "s");
  int total_tiles = 0;
  for (const auto &r : out.sequents) total_tiles += r.tiles;
  if (total_tiles > static_cast<int>(out.sequents.size())) os << ", " << total_tiles << " tiles";
  os << ")\n";
  out.report = os.str();
  return out;
}

}  // namespace encert
