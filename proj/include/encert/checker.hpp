#ifndef ENCERT_CHECKER_HPP
#define ENCERT_CHECKER_HPP

#include "encert/certificate.hpp"

namespace encert {

/// Verdict of the independent certificate checker.  The checker re-evaluates
/// every side-condition from dyadic arithmetic alone (add, multiply, compare,
/// power-of-two scaling); division rows are checked by cross-multiplication
/// and square roots by squaring.  It shares none of the prover's search.
struct CheckReport {
  bool structural_ok = false;
  bool valid = false;
  int failed_sequent = -1;
  int failed_lemma = -1;
  std::string message;
  int assumed_rules = 0;  // verdict is "valid modulo N assumed identities"
};

CheckReport check(const Certificate &cert);

/// Local validity of one lemma (side-condition only, no scope tracking);
/// widening probes candidate conclusions through this.
bool check_lemma(const Certificate &cert, std::size_t seq_idx, std::size_t lemma_idx,
                 std::string *why = nullptr);

}  // namespace encert

#endif
