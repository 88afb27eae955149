#include "encert/bisect.hpp"

#include <algorithm>
#include <functional>

namespace encert {

namespace {

Rational pow2r(std::int64_t e) {
  Rational r;
  if (e >= 0) {
    mpz_class n;
    mpz_ui_pow_ui(n.get_mpz_t(), 2, static_cast<unsigned long>(e));
    r = Rational(n);
  } else {
    mpz_class d;
    mpz_ui_pow_ui(d.get_mpz_t(), 2, static_cast<unsigned long>(-e));
    r = Rational(1, d);
    r.canonicalize();
  }
  return r;
}

// Smallest multiple of 2^g inside [lo, up], if any.
std::optional<Dyadic> multiple_in(const Rational &lo, const Rational &up, std::int64_t g) {
  Rational scale = pow2r(g);
  Rational slo = lo / scale, sup = up / scale;
  mpz_class mlo, mup;
  mpz_cdiv_q(mlo.get_mpz_t(), slo.get_num().get_mpz_t(), slo.get_den().get_mpz_t());
  mpz_fdiv_q(mup.get_mpz_t(), sup.get_num().get_mpz_t(), sup.get_den().get_mpz_t());
  if (mlo > mup) return std::nullopt;
  return Dyadic(mlo, g);
}

}  // namespace

Dyadic shortest_dyadic_in(const Rational &lo, const Rational &up) {
  if (lo > up) throw std::invalid_argument("empty window");
  if (lo <= 0 && up >= 0) return Dyadic();
  if (lo == up) {
    if (!Dyadic::rational_is_dyadic(lo)) throw std::invalid_argument("no dyadic in window");
    return Dyadic::from_dyadic_rational(lo);
  }
  std::int64_t g = floor_log2(up - lo) - 1;
  while (multiple_in(lo, up, g + 1)) ++g;  // coarsest grid that still hits
  return *multiple_in(lo, up, g);
}

namespace {

using Box = std::map<NodeId, Interval>;

struct Ctx {
  ExprArena &arena;
  const EngineConfig &cfg;
  unsigned max_depth;
  const std::vector<HypSeed> &hyps;
  const std::vector<GoalSeed> &goals;
  const std::vector<PaveHint> &hints;
  const std::vector<std::pair<NodeId, NodeId>> &approx;
  const std::vector<std::tuple<int, NodeId, NodeId>> &urules;
  std::vector<std::string> notes;
  bool budget_hit = false;
};

struct BoxProof {
  bool proved = false;
  std::vector<ProofStep> steps;
  std::uint32_t final_step = 0;
  int tiles = 1;
  std::string failure;
  std::map<NodeId, Interval> answers;
  std::vector<std::string> diagnostics;
};

std::string box_to_string(const Ctx &ctx, const Box &box) {
  std::string s;
  for (const auto &[var, iv] : box) {
    if (!s.empty()) s += ", ";
    s += ctx.arena.to_string(var) + " in " + iv.to_string();
  }
  return s.empty() ? "(whole domain)" : s;
}

std::optional<std::pair<Interval, int>> hyp_range_of(const Ctx &ctx, NodeId var) {
  for (const HypSeed &h : ctx.hyps)
    if (h.atom.kind == PropAtom::Kind::in_range && h.atom.subject == var)
      return std::make_pair(h.range, h.hyp_index);
  return std::nullopt;
}

bool hint_applicable(const Ctx &ctx, const PaveHint &hint) {
  for (const auto &ax : hint.axes)
    if (!hyp_range_of(ctx, ax.var)) return false;
  if (hint.targets.empty()) return true;
  for (const GoalSeed &g : ctx.goals)
    for (NodeId t : hint.targets)
      if (g.atom.subject == t) return true;
  return false;
}

BoxProof prove_box(Ctx &ctx, const Box &box, std::size_t hint_cursor,
                   std::map<NodeId, unsigned> depth);

/// Covers `range` of `axis` with the tiles delimited by `edges`, proving each
/// through `prove_tile`, then assembles the merge step that discharges the
/// per-tile assumptions.
BoxProof merge_tiles(Ctx &ctx, const Box &box, NodeId axis, const Interval &range,
                     const std::vector<Dyadic> &edges,
                     const std::function<BoxProof(const Box &)> &prove_tile) {
  BoxProof out;
  out.tiles = 0;
  std::vector<std::uint32_t> tile_finals;
  std::vector<std::vector<std::size_t>> tile_assumes;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    Interval tile(edges[i], edges[i + 1]);
    Box sub = box;
    sub[axis] = tile;
    BoxProof child = prove_tile(sub);
    out.tiles += child.tiles;
    if (!child.proved) {
      out.failure = child.failure;
      out.diagnostics = std::move(child.diagnostics);
      out.tiles = std::max(out.tiles, 1);
      return out;
    }
    for (auto &[q, iv] : child.answers) {
      auto it = out.answers.find(q);
      out.answers[q] = it == out.answers.end() ? iv : iv_hull(it->second, iv);
    }
    std::uint32_t offset = static_cast<std::uint32_t>(out.steps.size());
    std::vector<std::size_t> assumes;
    for (std::size_t s = 0; s < child.steps.size(); ++s) {
      ProofStep st = child.steps[s];
      for (auto &op : st.operands) op += offset;
      if (st.thm == Thm::assume && st.aux2 >= 0) st.aux2 += offset;  // inner merge reference
      if (st.thm == Thm::assume && st.aux2 < 0 && st.subject == axis && st.concl.iv == tile)
        assumes.push_back(out.steps.size());
      out.steps.push_back(std::move(st));
    }
    tile_finals.push_back(offset + child.final_step);
    tile_assumes.push_back(std::move(assumes));
  }

  // Range lemma: at the outermost level it restates the hypothesis; inside
  // another tile it is an assumption for the enclosing merge to discharge.
  ProofStep range_step;
  range_step.subject = axis;
  range_step.concl = Concl::bnd(range);
  if (box.count(axis)) {
    range_step.thm = Thm::assume;
  } else {
    range_step.thm = Thm::hyp;
    auto hr = hyp_range_of(ctx, axis);
    range_step.aux = hr ? hr->second : -1;
  }
  std::uint32_t range_id = static_cast<std::uint32_t>(out.steps.size());
  out.steps.push_back(std::move(range_step));

  std::uint32_t merge_id = static_cast<std::uint32_t>(out.steps.size());
  for (std::size_t i = 0; i < tile_assumes.size(); ++i)
    for (std::size_t s : tile_assumes[i]) {
      out.steps[s].aux = static_cast<std::int64_t>(i);
      out.steps[s].aux2 = merge_id;
    }
  ProofStep merge;
  merge.thm = Thm::merge;
  merge.subject = axis;
  merge.concl = Concl::sequent(0);
  merge.operands.push_back(range_id);
  for (std::uint32_t f : tile_finals) merge.operands.push_back(f);
  merge.params = edges;
  merge.expr_args = {axis};
  out.steps.push_back(std::move(merge));
  out.final_step = merge_id;
  out.proved = true;
  return out;
}

/// One even/points hint, one axis at a time (cartesian product by nesting).
BoxProof apply_static_hint(Ctx &ctx, const Box &box, const PaveHint &hint, std::size_t axis_idx,
                           std::size_t hint_index, const std::map<NodeId, unsigned> &depth) {
  if (axis_idx == hint.axes.size()) return prove_box(ctx, box, hint_index + 1, depth);
  const PaveAxis &ax = hint.axes[axis_idx];
  Interval range = box.count(ax.var) ? box.at(ax.var) : hyp_range_of(ctx, ax.var)->first;

  std::vector<Dyadic> cuts;
  if (ax.mode == PaveAxis::Mode::points) {
    for (const Rational &p : ax.points) {
      if (Dyadic::compare_rational(range.lo(), p) >= 0 ||
          Dyadic::compare_rational(range.up(), p) <= 0) {
        ctx.notes.push_back("split point outside the range of " + ctx.arena.to_string(ax.var) +
                            "; ignored");
        continue;
      }
      cuts.push_back(Dyadic::from_rational(p, ConvDir::down, ctx.cfg.precision));
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  } else {
    long n = std::max(1L, ax.count);
    Rational lo = range.lo().value(), up = range.up().value();
    Rational w = up - lo;
    for (long i = 1; i < n; ++i) {
      // Snap each ideal cut to the shortest dyadic within a quarter-step.
      Rational ideal = lo + w * Rational(i) / Rational(n);
      Rational radius = w / Rational(4 * n);
      cuts.push_back(shortest_dyadic_in(ideal - radius, ideal + radius));
    }
  }
  std::vector<Dyadic> edges;
  edges.push_back(range.lo());
  for (const Dyadic &c : cuts) edges.push_back(c);
  edges.push_back(range.up());
  return merge_tiles(ctx, box, ax.var, range, edges, [&](const Box &sub) {
    return apply_static_hint(ctx, sub, hint, axis_idx + 1, hint_index, depth);
  });
}

BoxProof prove_box(Ctx &ctx, const Box &box, std::size_t hint_cursor,
                   std::map<NodeId, unsigned> depth) {
  // Direct attempt on this box.
  Engine engine(ctx.arena, ctx.cfg);
  for (auto [a, e] : ctx.approx) engine.add_approx(a, e);
  for (auto [i, l, r] : ctx.urules) engine.add_user_rule(i, l, r);
  std::vector<HypSeed> hyps;
  std::set<NodeId> overridden;
  for (const HypSeed &h : ctx.hyps) {
    auto it = h.atom.kind == PropAtom::Kind::in_range ? box.find(h.atom.subject) : box.end();
    if (it != box.end()) {
      HypSeed a = h;
      a.is_assume = true;
      a.hyp_index = -1;
      a.range = it->second;
      hyps.push_back(std::move(a));
      overridden.insert(h.atom.subject);
    } else {
      hyps.push_back(h);
    }
  }
  for (const auto &[var, iv] : box) {
    if (overridden.count(var)) continue;
    HypSeed a;
    a.atom = PropAtom::in_range(var, iv.lo().value(), iv.up().value());
    a.is_assume = true;
    a.range = iv;
    hyps.push_back(std::move(a));
  }
  engine.seed(hyps, ctx.goals);
  EngineResult res = engine.run();
  if (res.status == EngineResult::Status::budget_exhausted) ctx.budget_hit = true;
  BoxProof out;
  if (res.status == EngineResult::Status::proved) {
    out.proved = true;
    out.steps = engine.log();
    out.final_step = res.qed_step;
    for (const GoalSeed &g : ctx.goals)
      if (g.atom.kind == PropAtom::Kind::query)
        if (auto iv = engine.bnd_of(g.atom.subject)) out.answers[g.atom.subject] = *iv;
    return out;
  }

  for (std::size_t h = hint_cursor; h < ctx.hints.size(); ++h) {
    const PaveHint &hint = ctx.hints[h];
    if (!hint_applicable(ctx, hint)) continue;
    bool is_dichotomy = false;
    for (const auto &ax : hint.axes)
      if (ax.mode == PaveAxis::Mode::dichotomy) is_dichotomy = true;
    if (!is_dichotomy) return apply_static_hint(ctx, box, hint, 0, h, depth);

    // Dichotomy: halve the widest listed axis that still has depth budget.
    const PaveAxis *best = nullptr;
    Interval best_range;
    for (const auto &ax : hint.axes) {
      if (ax.mode != PaveAxis::Mode::dichotomy) continue;
      if (depth[ax.var] >= ctx.max_depth) continue;
      Interval range = box.count(ax.var) ? box.at(ax.var) : hyp_range_of(ctx, ax.var)->first;
      if (!best || best_range.up() - best_range.lo() < range.up() - range.lo()) {
        best = &ax;
        best_range = range;
      }
    }
    if (!best) continue;  // depth exhausted on every axis: try a later hint
    Rational lo = best_range.lo().value(), up = best_range.up().value();
    Rational w = up - lo;
    if (w == 0) continue;
    Dyadic mid = shortest_dyadic_in(lo + w / 4, up - w / 4);
    if (Dyadic::compare_rational(mid, lo) <= 0 || Dyadic::compare_rational(mid, up) >= 0) continue;
    auto deeper = depth;
    deeper[best->var] += 1;
    NodeId axis = best->var;
    return merge_tiles(ctx, box, axis, best_range, {best_range.lo(), mid, best_range.up()},
                       [&](const Box &sub) { return prove_box(ctx, sub, h, deeper); });
  }

  out.failure = "tile " + box_to_string(ctx, box) + " is not provable";
  out.diagnostics = res.diagnostics;
  return out;
}

}  // namespace

PaveOutcome prove_with_paving(ExprArena &arena, const EngineConfig &cfg, unsigned max_depth,
                              const std::vector<HypSeed> &hyps,
                              const std::vector<GoalSeed> &goals,
                              const std::vector<PaveHint> &hints,
                              const std::vector<std::pair<NodeId, NodeId>> &approx_hints,
                              const std::vector<std::tuple<int, NodeId, NodeId>> &user_rules) {
  Ctx ctx{arena, cfg, max_depth, hyps, goals, hints, approx_hints, user_rules, {}, false};
  BoxProof proof = prove_box(ctx, {}, 0, {});
  PaveOutcome out;
  out.proved = proof.proved;
  out.steps = std::move(proof.steps);
  out.final_step = proof.final_step;
  out.tiles = proof.tiles;
  out.failure = proof.failure;
  out.notes = std::move(ctx.notes);
  out.budget_exhausted = ctx.budget_hit;
  out.query_answers = std::move(proof.answers);
  out.diagnostics = std::move(proof.diagnostics);
  return out;
}

}  // namespace encert
