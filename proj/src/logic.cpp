#include "encert/logic.hpp"

#include <deque>

namespace encert {

namespace {

struct State {
  std::deque<int> left, right;
  std::vector<PropAtom> hyps, goals;
};

void expand(const PropTree &p, State st, std::vector<Sequent> &out) {
  for (;;) {
    if (!st.left.empty()) {
      int i = st.left.front();
      st.left.pop_front();
      const auto &n = p.nodes[i];
      switch (n.kind) {
        case PropTree::Kind::atom:
          st.hyps.push_back(n.atom);
          continue;
        case PropTree::Kind::conj:
          st.left.push_front(n.b);
          st.left.push_front(n.a);
          continue;
        case PropTree::Kind::neg:
          st.right.push_front(n.a);
          continue;
        case PropTree::Kind::disj: {  // case split on the hypothesis
          State s1 = st, s2 = st;
          s1.left.push_front(n.a);
          s2.left.push_front(n.b);
          expand(p, std::move(s1), out);
          expand(p, std::move(s2), out);
          return;
        }
        case PropTree::Kind::impl: {  // usable either via its negated head or its body
          State s1 = st, s2 = st;
          s1.right.push_front(n.a);
          s2.left.push_front(n.b);
          expand(p, std::move(s1), out);
          expand(p, std::move(s2), out);
          return;
        }
      }
    }
    if (!st.right.empty()) {
      int i = st.right.front();
      st.right.pop_front();
      const auto &n = p.nodes[i];
      switch (n.kind) {
        case PropTree::Kind::atom:
          st.goals.push_back(n.atom);
          continue;
        case PropTree::Kind::disj:
          st.right.push_front(n.b);
          st.right.push_front(n.a);
          continue;
        case PropTree::Kind::neg:
          st.left.push_back(n.a);
          continue;
        case PropTree::Kind::impl:
          st.left.push_back(n.a);
          st.right.push_front(n.b);
          continue;
        case PropTree::Kind::conj: {  // both goals must hold: split sequents
          State s1 = st, s2 = st;
          s1.right.push_front(n.a);
          s2.right.push_front(n.b);
          expand(p, std::move(s1), out);
          expand(p, std::move(s2), out);
          return;
        }
      }
    }
    break;
  }
  Sequent s;
  auto push_unique = [](std::vector<PropAtom> &v, const PropAtom &a) {
    for (const auto &x : v)
      if (x == a) return;
    v.push_back(a);
  };
  for (const auto &h : st.hyps) push_unique(s.hypotheses, h);
  for (const auto &g : st.goals) push_unique(s.goals, g);
  // Inequality goals are copied to the hypotheses, reverted (closure of the
  // complement): proving z >= 6 may assume z <= 6.
  for (const auto &g : s.goals) {
    if (g.kind == PropAtom::Kind::le)
      push_unique(s.hypotheses, PropAtom::ge(g.subject, g.hi));
    else if (g.kind == PropAtom::Kind::ge)
      push_unique(s.hypotheses, PropAtom::le(g.subject, g.lo));
  }
  for (const auto &h : s.hypotheses)
    if (h.kind == PropAtom::Kind::query)
      throw UnspecifiedHypothesisError(
          "a '?' range appears in hypothesis position; unspecified hypotheses are not allowed");
  out.push_back(std::move(s));
}

}  // namespace

std::vector<Sequent> decompose(const PropTree &prop) {
  std::vector<Sequent> out;
  if (prop.root < 0) return out;
  State st;
  st.right.push_back(prop.root);
  expand(prop, std::move(st), out);
  return out;
}

DisjunctOutcome select_disjunct(
    const std::vector<PropAtom> &goals,
    const std::function<bool(const PropAtom &, std::string *)> &prove) {
  DisjunctOutcome out;
  for (std::size_t i = 0; i < goals.size(); ++i) {
    std::string diag;
    if (prove(goals[i], &diag)) {
      out.proved = true;
      out.chosen = static_cast<int>(i);
      return out;
    }
    out.diagnostics.push_back(std::move(diag));
  }
  return out;
}

}  // namespace encert
