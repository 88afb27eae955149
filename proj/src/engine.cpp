#include "encert/engine.hpp"

#include <algorithm>
#include <array>

namespace encert {

namespace {
struct ThmName {
  Thm thm;
  const char *name;
};
constexpr ThmName kThmNames[] = {
    {Thm::hyp, "hyp"}, {Thm::assume, "assume"}, {Thm::constant, "constant"},
    {Thm::fix_singleton, "fix_singleton"}, {Thm::flt_singleton, "flt_singleton"},
    {Thm::neg_bnd, "neg"}, {Thm::add_bnd, "add"}, {Thm::sub_bnd, "sub"},
    {Thm::mul_bnd, "mul"}, {Thm::div_bnd, "div"}, {Thm::sqrt_bnd, "sqrt"},
    {Thm::abs_bnd, "abs"}, {Thm::fma_bnd, "fma"}, {Thm::sub_self, "sub_self"},
    {Thm::div_self, "div_self"}, {Thm::mul_self, "mul_self"},
    {Thm::rel_compose, "rel_compose"}, {Thm::round_bnd, "round_bnd"},
    {Thm::round_clip, "round_clip"}, {Thm::round_fix, "round_fix"},
    {Thm::round_flt, "round_flt"}, {Thm::err_abs, "err_abs"}, {Thm::err_rel, "err_rel"},
    {Thm::round_exact, "round_exact"}, {Thm::relop_bnd, "relop_bnd"},
    {Thm::relop_abs_err, "relop_abs_err"}, {Thm::relop_rel_err, "relop_rel_err"},
    {Thm::abs_neg, "abs_neg"}, {Thm::abs_abs, "abs_abs"}, {Thm::abs_sqrt, "abs_sqrt"},
    {Thm::abs_addsub, "abs_addsub"}, {Thm::abs_mul, "abs_mul"}, {Thm::abs_div, "abs_div"},
    {Thm::abs_of_bnd, "abs_of_bnd"}, {Thm::bnd_of_abs, "bnd_of_abs"},
    {Thm::bnd_abs_refine, "bnd_abs_refine"}, {Thm::abs_node_of_abs, "abs_node_of_abs"},
    {Thm::abs_of_abs_node, "abs_of_abs_node"}, {Thm::fix_addsub, "fix_addsub"},
    {Thm::fix_mul, "fix_mul"}, {Thm::flt_mul, "flt_mul"},
    {Thm::fix_of_flt_abs, "fix_of_flt_abs"}, {Thm::flt_of_fix_abs, "flt_of_fix_abs"},
    {Thm::intersect, "intersect"}, {Thm::hyp_halfline, "hyp_halfline"},
    {Thm::rewrite_rule, "rewrite"}, {Thm::user_rewrite, "user_rewrite"},
    {Thm::contradiction, "contradiction"}, {Thm::goal_atom, "goal"},
    {Thm::goal_false, "goal_false"}, {Thm::merge, "merge"}, {Thm::qed, "qed"},
};
}  // namespace

const char *thm_name(Thm t) {
  for (const auto &e : kThmNames)
    if (e.thm == t) return e.name;
  return "?";
}

std::optional<Thm> thm_from_name(const std::string &name) {
  for (const auto &e : kThmNames)
    if (name == e.name) return e.thm;
  return std::nullopt;
}

HypSeed make_hyp_seed(const PropAtom &atom, int index, unsigned precision) {
  HypSeed s;
  s.atom = atom;
  s.hyp_index = index;
  switch (atom.kind) {
    case PropAtom::Kind::in_range:
      s.range = Interval(Dyadic::from_rational(atom.lo, ConvDir::down, precision),
                         Dyadic::from_rational(atom.hi, ConvDir::up, precision));
      break;
    case PropAtom::Kind::le:
      s.bound = Dyadic::from_rational(atom.hi, ConvDir::up, precision);
      break;
    case PropAtom::Kind::ge:
      s.bound = Dyadic::from_rational(atom.lo, ConvDir::down, precision);
      break;
    case PropAtom::Kind::query:
      break;
  }
  return s;
}

GoalSeed make_goal_seed(const PropAtom &atom, int index, unsigned precision) {
  GoalSeed g;
  g.atom = atom;
  g.goal_index = index;
  switch (atom.kind) {
    case PropAtom::Kind::in_range: {
      Dyadic lo = Dyadic::from_rational(atom.lo, ConvDir::up, precision);
      Dyadic hi = Dyadic::from_rational(atom.hi, ConvDir::down, precision);
      if (hi < lo)
        throw EmptyGoalError("unable to prove the goal: the empty set is the biggest "
                             "representable subset of this range");
      g.inner = Interval(lo, hi);
      break;
    }
    case PropAtom::Kind::le: {
      Dyadic b = Dyadic::from_rational(atom.hi, ConvDir::down, precision);
      g.inner = Interval(b, b);
      break;
    }
    case PropAtom::Kind::ge: {
      Dyadic b = Dyadic::from_rational(atom.lo, ConvDir::up, precision);
      g.inner = Interval(b, b);
      break;
    }
    case PropAtom::Kind::query:
      break;
  }
  return g;
}

Engine::Engine(ExprArena &arena, EngineConfig cfg) : arena_(arena), cfg_(cfg) {}

void Engine::add_approx(NodeId approx, NodeId exact) { approx_.add(approx, exact); }

void Engine::add_user_rule(int index, NodeId lhs, NodeId rhs) {
  user_rules_.push_back({index, {lhs, rhs}});
}

Engine::NodeFacts &Engine::facts(NodeId n) { return facts_[n]; }

std::optional<Interval> Engine::bnd_of(NodeId n) const {
  auto it = facts_.find(n);
  if (it == facts_.end()) return std::nullopt;
  return it->second.bnd;
}

std::uint32_t Engine::bnd_step_of(NodeId n) const { return facts_.at(n).bnd_step; }

std::uint32_t Engine::push_step(ProofStep step) {
  log_.push_back(std::move(step));
  return static_cast<std::uint32_t>(log_.size()) - 1;
}

void Engine::flag_contradiction(std::uint32_t s1, std::uint32_t s2, NodeId subject) {
  if (contradiction_) return;
  ProofStep st;
  st.thm = Thm::contradiction;
  st.subject = subject;
  st.concl = Concl::falsum();
  st.operands = {s1, s2};
  contradiction_step_ = push_step(std::move(st));
  contradiction_ = true;
  changed_ = true;
}

bool Engine::store_bnd(NodeId n, const Interval &iv, ProofStep step) {
  if (contradiction_ || iv.is_empty()) return false;
  NodeFacts &f = facts(n);
  Interval candidate = iv;
  std::uint32_t cand_step;
  if (f.bnd) {
    Interval inter = iv_intersect(*f.bnd, iv);
    if (inter == *f.bnd) return false;  // no improvement
    cand_step = push_step(step);
    if (inter.is_empty()) {
      flag_contradiction(f.bnd_step, cand_step, n);
      return true;
    }
    if (inter != iv) {
      ProofStep is;
      is.thm = Thm::intersect;
      is.subject = n;
      is.concl = Concl::bnd(inter);
      is.operands = {f.bnd_step, cand_step};
      cand_step = push_step(std::move(is));
    }
    candidate = inter;
  } else {
    cand_step = push_step(step);
  }
  f.bnd = candidate;
  f.bnd_step = cand_step;
  changed_ = true;
  // One-sided hypothesis bounds refine an enclosure obtained by other means.
  auto hl = halflines_.find(n);
  if (hl != halflines_.end()) {
    for (const HalfLine &h : hl->second) {
      const Interval &cur = *f.bnd;
      Interval clamped = h.is_upper
                             ? (cur.up() <= h.bound ? cur
                                                    : (h.bound < cur.lo() ? Interval::empty()
                                                                          : Interval(cur.lo(), h.bound)))
                             : (cur.lo() >= h.bound ? cur
                                                    : (h.bound > cur.up() ? Interval::empty()
                                                                          : Interval(h.bound, cur.up())));
      if (clamped == cur) continue;
      if (clamped.is_empty()) {
        ProofStep cs;
        cs.thm = Thm::contradiction;
        cs.subject = n;
        cs.concl = Concl::falsum();
        cs.operands = {f.bnd_step};
        cs.aux = h.hyp_index;
        contradiction_step_ = push_step(std::move(cs));
        contradiction_ = true;
        return true;
      }
      ProofStep hs;
      hs.thm = Thm::hyp_halfline;
      hs.subject = n;
      hs.concl = Concl::bnd(clamped);
      hs.operands = {f.bnd_step};
      hs.aux = h.hyp_index;
      f.bnd_step = push_step(std::move(hs));
      f.bnd = clamped;
    }
  }
  return true;
}

bool Engine::store_abs(NodeId n, const Interval &iv, ProofStep step) {
  if (contradiction_ || iv.is_empty()) return false;
  Interval cand = iv;
  if (cand.lo().sign() < 0) cand = Interval(Dyadic(), cand.up());  // magnitudes are nonnegative
  NodeFacts &f = facts(n);
  if (f.abs) {
    Interval inter = iv_intersect(*f.abs, cand);
    if (inter == *f.abs) return false;
    std::uint32_t s = push_step(step);
    if (inter.is_empty()) {
      flag_contradiction(f.abs_step, s, n);
      return true;
    }
    if (inter != cand) {
      ProofStep is;
      is.thm = Thm::intersect;
      is.subject = n;
      is.concl = Concl::abs(inter);
      is.operands = {f.abs_step, s};
      s = push_step(std::move(is));
    }
    f.abs = inter;
    f.abs_step = s;
  } else {
    f.abs = cand;
    f.abs_step = push_step(step);
  }
  changed_ = true;
  return true;
}

bool Engine::store_fix(NodeId n, std::int64_t e, ProofStep step) {
  if (contradiction_) return false;
  NodeFacts &f = facts(n);
  if (f.fix_e && *f.fix_e >= e) return false;
  f.fix_e = e;
  f.fix_step = push_step(step);
  changed_ = true;
  return true;
}

bool Engine::store_flt(NodeId n, std::int64_t p, ProofStep step) {
  if (contradiction_) return false;
  NodeFacts &f = facts(n);
  if (f.flt_p && *f.flt_p <= p) return false;
  f.flt_p = p;
  f.flt_step = push_step(step);
  changed_ = true;
  return true;
}

void Engine::seed(const std::vector<HypSeed> &hyps, const std::vector<GoalSeed> &goals) {
  goals_ = goals;
  std::vector<PropAtom> atoms;
  for (const HypSeed &h : hyps) atoms.push_back(h.atom);
  // Rounded expressions approximate their arguments; under-specified
  // operators approximate the exact operation (created here so rewrites can
  // reach it).
  std::size_t initial = arena_.size();
  for (NodeId id = 0; id < initial; ++id) {
    const Node &n = arena_.at(id);
    if (n.kind == NodeKind::rel_round) {
      NodeId exact;
      switch (n.rel->kind) {
        case RelOpSpec::Kind::add: exact = arena_.add(n.child[0], n.child[1]); break;
        case RelOpSpec::Kind::sub: exact = arena_.sub(n.child[0], n.child[1]); break;
        default: exact = arena_.mul(n.child[0], n.child[1]); break;
      }
      approx_.add(id, exact);
    }
  }
  for (auto [x, y] : automatic_approx_pairs(arena_, atoms)) approx_.add(x, y);

  // One-sided bounds first: they refine every enclosure stored later.
  for (const HypSeed &h : hyps) {
    if (h.atom.kind == PropAtom::Kind::le)
      halflines_[h.atom.subject].push_back({true, h.bound, h.hyp_index});
    else if (h.atom.kind == PropAtom::Kind::ge)
      halflines_[h.atom.subject].push_back({false, h.bound, h.hyp_index});
  }
  for (const HypSeed &h : hyps) {
    if (h.atom.kind != PropAtom::Kind::in_range) continue;
    ProofStep st;
    st.thm = h.is_assume ? Thm::assume : Thm::hyp;
    st.subject = h.atom.subject;
    st.concl = Concl::bnd(h.range);
    st.aux = h.hyp_index;
    store_bnd(h.atom.subject, h.range, std::move(st));
  }
}

std::optional<std::uint32_t> Engine::discharge_guard(RuleCond::Kind kind, NodeId e) const {
  auto it = facts_.find(e);
  if (it == facts_.end()) return std::nullopt;
  const NodeFacts &f = it->second;
  switch (kind) {
    case RuleCond::Kind::nonzero:
      if (f.bnd && (f.bnd->lo().sign() > 0 || f.bnd->up().sign() < 0)) return f.bnd_step;
      if (f.abs && f.abs->lo().sign() > 0) return f.abs_step;
      return std::nullopt;
    case RuleCond::Kind::nonneg:
      if (f.bnd && f.bnd->lo().sign() >= 0) return f.bnd_step;
      return std::nullopt;
    case RuleCond::Kind::positive:
      if (f.bnd && f.bnd->lo().sign() > 0) return f.bnd_step;
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

std::optional<ErrInfo> Engine::info_for(NodeId arg, NodeId rounded, std::int64_t which,
                                        std::uint32_t *step) const {
  auto fact_of = [&](NodeId n, bool abs_kind) -> std::optional<Interval> {
    auto it = facts_.find(n);
    if (it == facts_.end()) return std::nullopt;
    if (abs_kind) {
      if (it->second.abs) {
        *step = it->second.abs_step;
        return it->second.abs;
      }
      return std::nullopt;
    }
    if (it->second.bnd) {
      *step = it->second.bnd_step;
      return it->second.bnd;
    }
    return std::nullopt;
  };
  switch (which) {
    case kErrInfoNone:
      return ErrInfo::nothing();
    case kErrInfoBndArg:
      if (auto j = fact_of(arg, false)) return ErrInfo::bnd(*j, false);
      return std::nullopt;
    case kErrInfoBndResult:
      if (auto j = fact_of(rounded, false)) return ErrInfo::bnd(*j, true);
      return std::nullopt;
    case kErrInfoAbsArg:
      if (auto j = fact_of(arg, true)) return ErrInfo::abs(*j, false);
      return std::nullopt;
    case kErrInfoAbsResult:
      if (auto j = fact_of(rounded, true)) return ErrInfo::abs(*j, true);
      return std::nullopt;
  }
  return std::nullopt;
}

void Engine::apply_rows(NodeId n) {
  if (contradiction_) return;
  const Node &node = arena_.at(n);
  NodeFacts snapshot = facts(n);  // copy: rows below may update
  auto bnd = [&](NodeId m) -> std::optional<Interval> {
    auto it = facts_.find(m);
    return it == facts_.end() ? std::nullopt : it->second.bnd;
  };
  auto abs_f = [&](NodeId m) -> std::optional<Interval> {
    auto it = facts_.find(m);
    return it == facts_.end() ? std::nullopt : it->second.abs;
  };
  auto bstep = [&](NodeId m) { return facts_.at(m).bnd_step; };
  auto astep = [&](NodeId m) { return facts_.at(m).abs_step; };
  auto mk = [&](Thm t, Concl c, std::vector<std::uint32_t> ops) {
    ProofStep st;
    st.thm = t;
    st.subject = n;
    st.concl = std::move(c);
    st.operands = std::move(ops);
    ++applications_;
    return st;
  };

  // Predicate bridges applicable to any expression.
  if (snapshot.abs)
    store_bnd(n, Interval(-snapshot.abs->up(), snapshot.abs->up()),
              mk(Thm::bnd_of_abs, Concl::bnd(Interval(-snapshot.abs->up(), snapshot.abs->up())),
                 {snapshot.abs_step}));
  if (snapshot.bnd)
    store_abs(n, iv_abs(*snapshot.bnd),
              mk(Thm::abs_of_bnd, Concl::abs(iv_abs(*snapshot.bnd)), {snapshot.bnd_step}));
  if (snapshot.bnd && snapshot.abs) {
    Interval pos = iv_intersect(*snapshot.bnd, *snapshot.abs);
    Interval neg = iv_intersect(*snapshot.bnd, iv_neg(*snapshot.abs));
    Interval both = iv_hull(pos, neg);
    if (both.is_empty())
      flag_contradiction(snapshot.bnd_step, snapshot.abs_step, n);
    else
      store_bnd(n, both,
                mk(Thm::bnd_abs_refine, Concl::bnd(both), {snapshot.bnd_step, snapshot.abs_step}));
  }
  if (contradiction_) return;
  if (snapshot.bnd && snapshot.bnd->is_singleton()) {
    const Dyadic &x = snapshot.bnd->lo();
    if (!x.is_zero()) {
      store_fix(n, x.exponent(),
                mk(Thm::fix_singleton, Concl::fix(x.exponent()), {snapshot.bnd_step}));
      auto bits = static_cast<std::int64_t>(x.mantissa_bits());
      store_flt(n, bits, mk(Thm::flt_singleton, Concl::flt(bits), {snapshot.bnd_step}));
    } else {
      store_fix(n, 0, mk(Thm::fix_singleton, Concl::fix(0), {snapshot.bnd_step}));
      store_flt(n, 1, mk(Thm::flt_singleton, Concl::flt(1), {snapshot.bnd_step}));
    }
  }
  if (snapshot.flt_p && snapshot.abs && snapshot.abs->lo().sign() > 0) {
    std::int64_t e = 1 - *snapshot.flt_p + snapshot.abs->lo().floor_log2_abs();
    store_fix(n, e, mk(Thm::fix_of_flt_abs, Concl::fix(e), {snapshot.flt_step, snapshot.abs_step}));
  }
  if (snapshot.fix_e && snapshot.abs) {
    std::int64_t p = 1;
    const Dyadic &up = snapshot.abs->up();
    if (!up.is_zero()) {
      std::int64_t cl = up.floor_log2_abs() + (up.mantissa() == 1 ? 0 : 1);
      p = std::max<std::int64_t>(1, 1 + cl - *snapshot.fix_e);
    }
    store_flt(n, p, mk(Thm::flt_of_fix_abs, Concl::flt(p), {snapshot.fix_step, snapshot.abs_step}));
  }

  switch (node.kind) {
    case NodeKind::constant: {
      Interval iv(Dyadic::from_rational(node.constant, ConvDir::down, cfg_.precision),
                  Dyadic::from_rational(node.constant, ConvDir::up, cfg_.precision));
      store_bnd(n, iv, mk(Thm::constant, Concl::bnd(iv), {}));
      break;
    }
    case NodeKind::variable:
      break;
    case NodeKind::neg: {
      NodeId a = node.child[0];
      if (auto j = bnd(a))
        store_bnd(n, iv_neg(*j), mk(Thm::neg_bnd, Concl::bnd(iv_neg(*j)), {bstep(a)}));
      if (auto j = abs_f(a)) store_abs(n, *j, mk(Thm::abs_neg, Concl::abs(*j), {astep(a)}));
      break;
    }
    case NodeKind::abs: {
      NodeId a = node.child[0];
      if (auto j = bnd(a))
        store_bnd(n, iv_abs(*j), mk(Thm::abs_bnd, Concl::bnd(iv_abs(*j)), {bstep(a)}));
      if (auto j = abs_f(a)) {
        store_bnd(n, *j, mk(Thm::abs_node_of_abs, Concl::bnd(*j), {astep(a)}));
        store_abs(n, *j, mk(Thm::abs_abs, Concl::abs(*j), {astep(a)}));
      }
      // BND(|a|) constrains |a| itself.
      if (auto j = bnd(n)) {
        Interval clip = iv_intersect(*j, Interval(Dyadic(), std::max(j->up(), Dyadic())));
        if (!clip.is_empty())
          store_abs(a, clip, mk(Thm::abs_of_abs_node, Concl::abs(clip), {bstep(n)}));
      }
      break;
    }
    case NodeKind::sqrt: {
      NodeId a = node.child[0];
      if (auto j = bnd(a); j && j->lo().sign() >= 0) {
        Interval r = iv_sqrt(*j, cfg_.precision);
        store_bnd(n, r, mk(Thm::sqrt_bnd, Concl::bnd(r), {bstep(a)}));
      }
      if (auto j = abs_f(a)) {
        Interval r = iv_sqrt(*j, cfg_.precision);
        store_abs(n, r, mk(Thm::abs_sqrt, Concl::abs(r), {astep(a)}));
      }
      break;
    }
    case NodeKind::add:
    case NodeKind::sub: {
      NodeId a = node.child[0], b = node.child[1];
      bool is_sub = node.kind == NodeKind::sub;
      if (is_sub && a == b) {
        Interval zero = Interval::singleton(Dyadic());
        store_bnd(n, zero, mk(Thm::sub_self, Concl::bnd(zero), {}));
      } else {
        if (auto j = bnd(a)) {
          if (auto k = bnd(b)) {
            Interval r = is_sub ? iv_sub(*j, *k) : iv_add(*j, *k);
            store_bnd(n, r, mk(is_sub ? Thm::sub_bnd : Thm::add_bnd, Concl::bnd(r),
                               {bstep(a), bstep(b)}));
          }
        }
        if (auto j = abs_f(a)) {
          if (auto k = abs_f(b)) {
            Interval r = iv_hull(iv_abs(iv_sub(*j, *k)), iv_add(*j, *k));
            store_abs(n, r, mk(Thm::abs_addsub, Concl::abs(r), {astep(a), astep(b)}));
          }
        }
      }
      if (!is_sub) {
        // a + b + a*b, in either association, composes relative errors.
        NodeId x = kNoNode, y = kNoNode;
        const Node &lhs = arena_.at(a), &rhs = arena_.at(b);
        if (lhs.kind == NodeKind::add && rhs.kind == NodeKind::mul) {
          NodeId p = lhs.child[0], q = lhs.child[1];
          if ((rhs.child[0] == p && rhs.child[1] == q) ||
              (rhs.child[0] == q && rhs.child[1] == p)) {
            x = p;
            y = q;
          }
        } else if (rhs.kind == NodeKind::add) {
          const Node &inner = arena_.at(rhs.child[1]);
          if (inner.kind == NodeKind::mul) {
            NodeId p = a, q = rhs.child[0];
            if ((inner.child[0] == p && inner.child[1] == q) ||
                (inner.child[0] == q && inner.child[1] == p)) {
              x = p;
              y = q;
            }
          }
        }
        if (x != kNoNode) {
          auto j = bnd(x);
          auto k = bnd(y);
          Dyadic minus_one(-1);
          if (j && k && j->lo() >= minus_one && k->lo() >= minus_one) {
            Interval r = iv_rel_compose(*j, *k);
            ProofStep st = mk(Thm::rel_compose, Concl::bnd(r), {bstep(x), bstep(y)});
            st.expr_args = {x, y};
            store_bnd(n, r, std::move(st));
          }
        }
      }
      // FIX propagation.
      auto &fa = facts(a);
      auto &fb = facts(b);
      if (fa.fix_e && fb.fix_e) {
        std::int64_t e = std::min(*fa.fix_e, *fb.fix_e);
        store_fix(n, e, mk(Thm::fix_addsub, Concl::fix(e), {fa.fix_step, fb.fix_step}));
      }
      break;
    }
    case NodeKind::mul: {
      NodeId a = node.child[0], b = node.child[1];
      if (a == b) {
        if (auto j = bnd(a)) {
          Interval aj = iv_abs(*j);
          Interval r = iv_mul(aj, aj);
          store_bnd(n, r, mk(Thm::mul_self, Concl::bnd(r), {bstep(a)}));
        }
      } else if (auto j = bnd(a)) {
        if (auto k = bnd(b)) {
          Interval r = iv_mul(*j, *k);
          store_bnd(n, r, mk(Thm::mul_bnd, Concl::bnd(r), {bstep(a), bstep(b)}));
        }
      }
      if (auto j = abs_f(a)) {
        if (auto k = abs_f(b)) {
          Interval r = iv_mul(*j, *k);
          store_abs(n, r, mk(Thm::abs_mul, Concl::abs(r), {astep(a), astep(b)}));
        }
      }
      auto &fa = facts(a);
      auto &fb = facts(b);
      if (fa.fix_e && fb.fix_e) {
        std::int64_t e = *fa.fix_e + *fb.fix_e;
        store_fix(n, e, mk(Thm::fix_mul, Concl::fix(e), {fa.fix_step, fb.fix_step}));
      }
      if (fa.flt_p && fb.flt_p) {
        std::int64_t p = *fa.flt_p + *fb.flt_p;
        store_flt(n, p, mk(Thm::flt_mul, Concl::flt(p), {fa.flt_step, fb.flt_step}));
      }
      break;
    }
    case NodeKind::div: {
      NodeId a = node.child[0], b = node.child[1];
      if (a == b) {
        if (auto j = abs_f(a); j && j->lo().sign() > 0) {
          Interval one = Interval::singleton(Dyadic(1));
          store_bnd(n, one, mk(Thm::div_self, Concl::bnd(one), {astep(a)}));
        }
      } else {
        if (auto j = bnd(a)) {
          if (auto k = bnd(b); k && !k->contains_zero()) {
            Interval r = iv_div(*j, *k, cfg_.precision);
            store_bnd(n, r, mk(Thm::div_bnd, Concl::bnd(r), {bstep(a), bstep(b)}));
          }
        }
        if (auto j = abs_f(a)) {
          if (auto k = abs_f(b); k && k->lo().sign() > 0) {
            Interval r = iv_div(*j, *k, cfg_.precision);
            store_abs(n, r, mk(Thm::abs_div, Concl::abs(r), {astep(a), astep(b)}));
          }
        }
      }
      break;
    }
    case NodeKind::fma: {
      NodeId a = node.child[0], b = node.child[1], c = node.child[2];
      auto j = bnd(a);
      auto k = bnd(b);
      auto l = bnd(c);
      if (j && k && l) {
        Interval r = iv_add(iv_mul(*j, *k), *l);
        store_bnd(n, r, mk(Thm::fma_bnd, Concl::bnd(r), {bstep(a), bstep(b), bstep(c)}));
      }
      break;
    }
    case NodeKind::round: {
      NodeId a = node.child[0];
      const Format &fmt = *node.fmt;
      if (auto j = bnd(a)) {
        Interval r = round_interval(*j, fmt);
        store_bnd(n, r, mk(Thm::round_bnd, Concl::bnd(r), {bstep(a)}));
      }
      if (auto j = bnd(n)) {
        Interval clip = representable_clip(*j, fmt);
        if (clip.is_empty()) {
          // A rounded value with no representable value in its range: the
          // hypotheses are contradictory.
          ProofStep st = mk(Thm::round_clip, Concl::falsum(), {bstep(n)});
          st.thm = Thm::contradiction;
          contradiction_step_ = push_step(std::move(st));
          contradiction_ = true;
        } else {
          store_bnd(n, clip, mk(Thm::round_clip, Concl::bnd(clip), {bstep(n)}));
        }
      }
      store_fix(n, fmt.min_exp, mk(Thm::round_fix, Concl::fix(fmt.min_exp), {}));
      if (fmt.is_float())
        store_flt(n, fmt.precision, mk(Thm::round_flt, Concl::flt(fmt.precision), {}));
      break;
    }
    case NodeKind::rel_round: {
      NodeId a = node.child[0], b = node.child[1];
      if (auto j = bnd(a)) {
        if (auto k = bnd(b)) {
          RelOpFacts rf = underspecified_rel_op(*node.rel, *j, *k);
          if (rf.value)
            store_bnd(n, *rf.value, mk(Thm::relop_bnd, Concl::bnd(*rf.value), {bstep(a), bstep(b)}));
        }
      }
      break;
    }
  }
}

void Engine::apply_error_rows(NodeId n) {
  if (contradiction_) return;
  const Node &node = arena_.at(n);
  auto mk = [&](Thm t, Concl c, std::vector<std::uint32_t> ops, std::int64_t aux) {
    ProofStep st;
    st.thm = t;
    st.subject = n;
    st.concl = std::move(c);
    st.operands = std::move(ops);
    st.aux = aux;
    ++applications_;
    return st;
  };

  // rnd(a) - a  and  relop(a,b) - (a op b)
  if (node.kind == NodeKind::sub) {
    NodeId u = node.child[0], v = node.child[1];
    const Node &un = arena_.at(u);
    if (un.kind == NodeKind::round && un.child[0] == v) {
      const Format &fmt = *un.fmt;
      for (std::int64_t which :
           {kErrInfoNone, kErrInfoBndArg, kErrInfoBndResult, kErrInfoAbsArg, kErrInfoAbsResult}) {
        std::uint32_t info_step = 0;
        auto info = info_for(v, u, which, &info_step);
        if (!info) continue;
        auto enc = abs_error_enclosure(fmt, *info);
        if (!enc) continue;
        std::vector<std::uint32_t> ops;
        if (which != kErrInfoNone) ops.push_back(info_step);
        store_bnd(n, *enc, mk(Thm::err_abs, Concl::bnd(*enc), std::move(ops), which));
      }
      // Exactness: a value already representable in the format rounds to
      // itself, so the error vanishes.
      auto &fv = facts(v);
      bool exact = false;
      std::vector<std::uint32_t> ops;
      if (fmt.is_fixed()) {
        exact = fv.fix_e && *fv.fix_e >= fmt.min_exp;
        if (exact) ops = {fv.fix_step};
      } else {
        exact = fv.fix_e && fv.flt_p && *fv.fix_e >= fmt.min_exp && *fv.flt_p <= fmt.precision;
        if (exact) ops = {fv.fix_step, fv.flt_step};
      }
      if (exact) {
        Interval zero = Interval::singleton(Dyadic());
        store_bnd(n, zero, mk(Thm::round_exact, Concl::bnd(zero), std::move(ops), -1));
      }
    }
    if (un.kind == NodeKind::rel_round) {
      const Node &vn = arena_.at(v);
      bool matches = (un.rel->kind == RelOpSpec::Kind::add && vn.kind == NodeKind::add) ||
                     (un.rel->kind == RelOpSpec::Kind::sub && vn.kind == NodeKind::sub) ||
                     (un.rel->kind == RelOpSpec::Kind::mul && vn.kind == NodeKind::mul);
      if (matches && vn.child[0] == un.child[0] && vn.child[1] == un.child[1]) {
        auto fa = facts(un.child[0]).bnd;
        auto fb = facts(un.child[1]).bnd;
        if (fa && fb) {
          RelOpFacts rf = underspecified_rel_op(*un.rel, *fa, *fb);
          if (rf.abs_err)
            store_bnd(n, *rf.abs_err,
                      mk(Thm::relop_abs_err, Concl::bnd(*rf.abs_err),
                         {facts(un.child[0]).bnd_step, facts(un.child[1]).bnd_step}, -1));
        }
      }
    }
  }

  // (rnd(a) - a)/a  and  (relop(a,b) - (a op b))/(a op b)
  if (node.kind == NodeKind::div) {
    NodeId s = node.child[0], d = node.child[1];
    const Node &sn = arena_.at(s);
    if (sn.kind != NodeKind::sub || sn.child[1] != d) return;
    NodeId u = sn.child[0];
    const Node &un = arena_.at(u);
    if (un.kind == NodeKind::round && un.child[0] == d) {
      const Format &fmt = *un.fmt;
      for (std::int64_t which :
           {kErrInfoBndArg, kErrInfoBndResult, kErrInfoAbsArg, kErrInfoAbsResult}) {
        std::uint32_t info_step = 0;
        auto info = info_for(d, u, which, &info_step);
        if (!info) continue;
        auto enc = rel_error_enclosure(fmt, *info);
        if (!enc) continue;
        store_bnd(n, *enc, mk(Thm::err_rel, Concl::bnd(*enc), {info_step}, which));
      }
    }
    if (un.kind == NodeKind::rel_round) {
      const Node &dn_ = arena_.at(d);
      bool matches = (un.rel->kind == RelOpSpec::Kind::add && dn_.kind == NodeKind::add) ||
                     (un.rel->kind == RelOpSpec::Kind::sub && dn_.kind == NodeKind::sub) ||
                     (un.rel->kind == RelOpSpec::Kind::mul && dn_.kind == NodeKind::mul);
      if (matches && dn_.child[0] == un.child[0] && dn_.child[1] == un.child[1]) {
        auto fa = facts(un.child[0]).bnd;
        auto fb = facts(un.child[1]).bnd;
        if (fa && fb) {
          RelOpFacts rf = underspecified_rel_op(*un.rel, *fa, *fb);
          if (rf.rel_err)
            store_bnd(n, *rf.rel_err,
                      mk(Thm::relop_rel_err, Concl::bnd(*rf.rel_err),
                         {facts(un.child[0]).bnd_step, facts(un.child[1]).bnd_step}, -1));
        }
      }
    }
  }
}

void Engine::try_rewrites(NodeId n) {
  if (contradiction_) return;
  const auto &rules = builtin_rules();
  for (std::size_t ri = 0; ri < rules.size(); ++ri) {
    ++applications_;
    for (const Binding &b : match_rule(arena_, n, rules[ri], approx_)) {
      std::vector<std::uint32_t> guard_steps;
      bool ok = true;
      for (auto [kind, e] : semantic_guards(arena_, rules[ri], b)) {
        auto s = discharge_guard(kind, e);
        if (!s) {
          ok = false;
          break;
        }
        guard_steps.push_back(*s);
      }
      if (!ok) continue;
      NodeId rhs = instantiate(arena_, rules[ri], rules[ri].after, b);
      if (rhs == n) continue;
      auto key = std::make_tuple(n, static_cast<int>(ri), -1, rhs);
      if (!edge_keys_.insert(key).second) continue;
      REdge e;
      e.subject = n;
      e.rhs = rhs;
      e.rule = static_cast<int>(ri);
      e.guard_steps = std::move(guard_steps);
      e.binding = {rhs,
                   b.lower[0], b.lower[1], b.lower[2], b.lower[3],
                   b.upper[0], b.upper[1], b.upper[2], b.upper[3]};
      edges_.push_back(std::move(e));
      changed_ = true;
    }
  }
  for (const auto &[idx, rule] : user_rules_) {
    if (rule.first != n) continue;
    auto key = std::make_tuple(n, -1, idx, rule.second);
    if (!edge_keys_.insert(key).second) continue;
    REdge e;
    e.subject = n;
    e.rhs = rule.second;
    e.user_index = idx;
    e.binding = {rule.second};
    edges_.push_back(std::move(e));
    changed_ = true;
  }
}

void Engine::transfer_edges() {
  for (const REdge &e : edges_) {
    if (contradiction_) return;
    auto it = facts_.find(e.rhs);
    if (it == facts_.end() || !it->second.bnd) continue;
    ++applications_;
    ProofStep st;
    st.thm = e.rule >= 0 ? Thm::rewrite_rule : Thm::user_rewrite;
    st.subject = e.subject;
    st.concl = Concl::bnd(*it->second.bnd);
    st.operands = {it->second.bnd_step};
    for (std::uint32_t g : e.guard_steps) st.operands.push_back(g);
    st.aux = e.rule >= 0 ? e.rule : e.user_index;
    st.expr_args = e.binding;
    store_bnd(e.subject, *it->second.bnd, std::move(st));
  }
}

bool Engine::goal_provable(const GoalSeed &g, std::string *diag) const {
  auto it = facts_.find(g.atom.subject);
  const Interval *bnd =
      (it != facts_.end() && it->second.bnd) ? &*it->second.bnd : nullptr;
  if (!bnd) {
    if (diag) *diag = "no enclosure computed for " + arena_.to_string(g.atom.subject);
    return false;
  }
  bool ok = false;
  switch (g.atom.kind) {
    case PropAtom::Kind::in_range:
      ok = iv_subset(*bnd, g.inner);
      break;
    case PropAtom::Kind::le:
      ok = bnd->up() <= g.inner.up();
      break;
    case PropAtom::Kind::ge:
      ok = bnd->lo() >= g.inner.lo();
      break;
    case PropAtom::Kind::query:
      ok = true;
      break;
  }
  if (!ok && diag)
    *diag = "best interval for " + arena_.to_string(g.atom.subject) + ": " + bnd->to_string();
  return ok;
}

EngineResult Engine::run() {
  EngineResult res;
  auto finish_proved = [&](int chosen) {
    const GoalSeed &g = goals_[chosen];
    ProofStep gs;
    gs.thm = Thm::goal_atom;
    gs.subject = g.atom.subject;
    gs.concl = Concl::goal(g.goal_index);
    gs.operands = {facts_.at(g.atom.subject).bnd_step};
    std::uint32_t gstep = push_step(std::move(gs));
    ProofStep qs;
    qs.thm = Thm::qed;
    qs.subject = g.atom.subject;
    qs.concl = Concl::sequent(0);
    qs.operands = {gstep};
    qs.aux = chosen;
    res.qed_step = push_step(std::move(qs));
    res.status = EngineResult::Status::proved;
    res.chosen_disjunct = chosen;
  };
  auto finish_contradiction = [&]() {
    ProofStep gs;
    gs.thm = Thm::goal_false;
    gs.subject = kNoNode;
    gs.concl = Concl::goal(-1);
    gs.operands = {contradiction_step_};
    std::uint32_t gstep = push_step(std::move(gs));
    ProofStep qs;
    qs.thm = Thm::qed;
    qs.subject = kNoNode;
    qs.concl = Concl::sequent(0);
    qs.operands = {gstep};
    qs.aux = -1;
    res.qed_step = push_step(std::move(qs));
    res.status = EngineResult::Status::proved;
    res.contradiction = true;
  };

  bool budget_hit = false;
  for (unsigned iter = 0; iter < cfg_.max_iterations; ++iter) {
    res.iterations = iter + 1;
    changed_ = false;
    std::size_t snapshot = arena_.size();
    for (NodeId n = 0; n < snapshot && !contradiction_; ++n) {
      apply_rows(n);
      apply_error_rows(n);
      try_rewrites(n);
    }
    transfer_edges();
    if (contradiction_) {
      finish_contradiction();
      res.applications = applications_;
      return res;
    }
    // Between iterations only specified goals allow an early stop; query
    // answers keep tightening until the fixpoint.
    for (std::size_t i = 0; i < goals_.size(); ++i) {
      if (goals_[i].atom.kind == PropAtom::Kind::query) continue;
      if (goal_provable(goals_[i], nullptr)) {
        finish_proved(static_cast<int>(i));
        res.applications = applications_;
        return res;
      }
    }
    if (applications_ > cfg_.max_applications) {
      budget_hit = true;
      break;
    }
    if (!changed_) break;
  }

  std::vector<PropAtom> atoms;
  for (const auto &g : goals_) atoms.push_back(g.atom);
  std::size_t next = 0;
  auto outcome = select_disjunct(atoms, [&](const PropAtom &, std::string *diag) {
    return goal_provable(goals_[next++], diag);
  });
  res.applications = applications_;
  if (outcome.proved) {
    finish_proved(outcome.chosen);
    return res;
  }
  res.diagnostics = outcome.diagnostics;
  res.status = budget_hit ? EngineResult::Status::budget_exhausted : EngineResult::Status::unproved;
  return res;
}

}  // namespace encert
