#ifndef ENCERT_LOGIC_HPP
#define ENCERT_LOGIC_HPP

#include <functional>

#include "encert/parser.hpp"

namespace encert {

/// A '?' range ended up in hypothesis position, which leaves the sequent's
/// assumptions unspecified.
struct UnspecifiedHypothesisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Implication with a conjunction of enclosure atoms on the left and a
/// disjunction of enclosure atoms on the right.  No negation or inner
/// implication remains; queries appear only among the goals.  An empty goal
/// list is provable only by deriving a contradiction from the hypotheses.
struct Sequent {
  std::vector<PropAtom> hypotheses;
  std::vector<PropAtom> goals;
};

/// Breaks a proposition into sequents whose conjunction implies it, by the
/// rules of sequent calculus: conjunctions split goals, disjunctions split
/// hypotheses, negations swap sides, implications hoist.  Inequality goals
/// additionally contribute their reversal as a hypothesis.
std::vector<Sequent> decompose(const PropTree &prop);

/// Left-to-right search for one provable disjunct; commits to the first
/// success.  `prove` may fill a diagnostic for failed atoms.
struct DisjunctOutcome {
  bool proved = false;
  int chosen = -1;  // index into goals
  std::vector<std::string> diagnostics;
};
DisjunctOutcome select_disjunct(
    const std::vector<PropAtom> &goals,
    const std::function<bool(const PropAtom &, std::string *)> &prove);

}  // namespace encert

#endif
