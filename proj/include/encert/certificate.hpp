#ifndef ENCERT_CERTIFICATE_HPP
#define ENCERT_CERTIFICATE_HPP

#include "encert/driver.hpp"

namespace encert {

struct CertFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Self-contained expression node of a certificate (indices into the
/// certificate's own table).
struct CertExpr {
  NodeKind kind = NodeKind::variable;
  std::array<int, 3> child{-1, -1, -1};
  Rational constant;
  std::string var_name;
  std::optional<Format> fmt;
  std::optional<RelOpSpec> rel;
};

struct CertHyp {
  PropAtom::Kind kind = PropAtom::Kind::in_range;
  int subject = -1;
  Rational lo, hi;     // stated bounds
  Interval outer;      // outward dyadic reading (in_range)
  Dyadic bound;        // outward dyadic reading (le/ge)
};

struct CertGoal {
  PropAtom::Kind kind = PropAtom::Kind::in_range;
  int subject = -1;
  Rational lo, hi;
  Interval inner;    // inward dyadic reading (in_range: both; le/ge: singleton)
  Interval answer;   // suggested enclosure for queries
};

struct CertLemma {
  Thm thm = Thm::hyp;
  int subject = -1;  // certificate expression index, -1 for none
  Concl concl;
  std::vector<std::uint32_t> operands;
  std::int64_t aux = -1;
  std::int64_t aux2 = -1;
  std::vector<Dyadic> params;
  std::vector<int> args;  // certificate expression indices; -1 for unbound
};

struct CertSequent {
  std::vector<CertHyp> hyps;
  std::vector<CertGoal> goals;
  std::vector<CertLemma> lemmas;
  std::uint32_t final_step = 0;
};

struct CertUserRule {
  bool ring_proved = false;
  int lhs = -1, rhs = -1;
  std::vector<int> nonzero_conditions;
};

struct Certificate {
  std::uint64_t source_hash = 0;
  unsigned precision = 128;
  std::vector<CertUserRule> user_rules;
  std::vector<CertExpr> exprs;
  std::map<int, std::string> names;  // alias names for readability
  std::vector<CertSequent> sequents;

  int assumed_rule_count() const {
    int n = 0;
    for (const auto &r : user_rules) n += r.ring_proved ? 0 : 1;
    return n;
  }
};

std::uint64_t fnv1a64(const std::string &data);

/// Builds the certificate for a fully proved run: per sequent, the minimal
/// lemma DAG reachable from the sequent's closing step, over one shared
/// expression table.
Certificate emit_certificate(const Script &script, const RunConfig &config,
                             const std::vector<SequentReport> &sequents);

std::string serialize(const Certificate &cert);
Certificate parse_certificate(const std::string &text);  // throws CertFormatError

/// Greedy backward widening: every interval conclusion is replaced by the
/// shortest-mantissa outward dyadics that keep all consuming side-conditions
/// true.  The result still checks; total endpoint mantissa bits never grow.
void widen(Certificate &cert);

/// Sum of endpoint mantissa bits over all interval conclusions (the widening
/// metric).
std::size_t total_mantissa_bits(const Certificate &cert);

}  // namespace encert

#endif
