// Test-only oracles, independent of the library's computation paths: they
// work on exact rationals by enumeration / definitional formulas and are used
// to derive and to cross-check expected values.
#ifndef ENCERT_TESTS_ORACLES_HPP
#define ENCERT_TESTS_ORACLES_HPP

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "encert/parser.hpp"

namespace encert::oracles {

inline Rational rat(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Rational pow2q(long e) {
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

/// Uniform-ish random rational in [lo, up] on a grid of `grain` steps.
inline Rational random_rational(std::mt19937_64 &rng, const Rational &lo, const Rational &up,
                                long grain = 1 << 20) {
  std::uniform_int_distribution<long> d(0, grain);
  Rational t(d(rng), grain);
  t.canonicalize();
  return lo + (up - lo) * t;
}

/// All dyadics m*2^e with |m| < 2^bits and e in [emin, emax], as rationals.
inline std::vector<Rational> enumerate_dyadics(unsigned bits, long emin, long emax) {
  std::set<Rational> out;
  long mmax = (1L << bits) - 1;
  for (long e = emin; e <= emax; ++e)
    for (long m = -mmax; m <= mmax; ++m) out.insert(rat(m) * pow2q(e));
  return {out.begin(), out.end()};
}

/// All representable values of a float format within [lo, up], sorted.
inline std::vector<Rational> enumerate_representables(const Format &f, const Rational &lo,
                                                      const Rational &up) {
  std::set<Rational> out;
  if (lo <= 0 && up >= 0) out.insert(Rational(0));
  long mmax = f.is_float() ? (1L << f.precision) - 1 : (1L << 20);
  Rational biggest = std::max<Rational>(abs(lo), abs(up));
  for (long e = f.min_exp; pow2q(e) <= biggest; ++e) {
    Rational scale = pow2q(e);
    for (long m = 1; m <= mmax; ++m) {
      Rational v = rat(m) * scale;
      if (v >= lo && v <= up) out.insert(v);
      if (-v >= lo && -v <= up) out.insert(-v);
      if (v > biggest) break;
    }
    if (f.is_fixed()) break;  // one grid only
  }
  return {out.begin(), out.end()};
}

/// Integral significand of a representable value at its own grid; used for
/// parity-based tie-breaking, computed from the value itself.
inline mpz_class significand_at_grid(const Rational &v, const Format &f) {
  if (v == 0) return 0;
  long g = f.min_exp;
  if (f.is_float()) {
    std::int64_t b = floor_log2(abs(v));
    g = std::max<long>(f.min_exp, static_cast<long>(b) - f.precision + 1);
  }
  Rational n = v / pow2q(g);
  return n.get_num();  // exact integer for representable v
}

/// Brute-force correctly rounded value by scanning the sorted representable
/// list for the two neighbors and applying the direction rules.
inline Rational brute_round(const Rational &x, const Format &f,
                            const std::vector<Rational> &sorted_reprs) {
  auto it = std::lower_bound(sorted_reprs.begin(), sorted_reprs.end(), x);
  if (it != sorted_reprs.end() && *it == x) return x;
  // Neighbors must exist: callers enumerate a wide enough window.
  Rational hi = *it;
  Rational lo = *(it - 1);
  bool positive = x > 0;
  auto odd = [&](const Rational &v) { return mpz_odd_p(significand_at_grid(v, f).get_mpz_t()); };
  switch (f.dir) {
    case RoundDir::dn: return lo;
    case RoundDir::up: return hi;
    case RoundDir::zr: return positive ? lo : hi;
    case RoundDir::aw: return positive ? hi : lo;
    case RoundDir::od: return odd(lo) ? lo : hi;
    default: break;
  }
  Rational dlo = x - lo, dhi = hi - x;
  if (dlo < dhi) return lo;
  if (dhi < dlo) return hi;
  switch (f.dir) {
    case RoundDir::ne: return odd(lo) ? hi : lo;
    case RoundDir::no: return odd(lo) ? lo : hi;
    case RoundDir::nz: return positive ? lo : hi;
    case RoundDir::na: return positive ? hi : lo;
    case RoundDir::nd: return lo;
    case RoundDir::nu: return hi;
    default: throw std::logic_error("unhandled direction");
  }
}

/// Definitional correct rounding of an exact rational: quantize to the grid
/// of x's binade.  Used by Monte-Carlo evaluation of scripts.
inline Rational oracle_round(const Rational &x, const Format &f) {
  if (x == 0) return x;
  long g = f.min_exp;
  if (f.is_float()) {
    std::int64_t b = floor_log2(abs(x));
    g = std::max<long>(f.min_exp, static_cast<long>(b) - f.precision + 1);
  }
  Rational scaled = x / pow2q(g);
  mpz_class n_dn, n_up, rem;
  mpz_fdiv_q(n_dn.get_mpz_t(), scaled.get_num().get_mpz_t(), scaled.get_den().get_mpz_t());
  if (Rational(n_dn) == scaled) return x;
  n_up = n_dn + 1;
  bool positive = x > 0;
  auto val = [&](const mpz_class &n) -> Rational { return Rational(n) * pow2q(g); };
  auto odd = [&](const mpz_class &n) { return mpz_odd_p(n.get_mpz_t()) != 0; };
  switch (f.dir) {
    case RoundDir::dn: return val(n_dn);
    case RoundDir::up: return val(n_up);
    case RoundDir::zr: return positive ? val(n_dn) : val(n_up);
    case RoundDir::aw: return positive ? val(n_up) : val(n_dn);
    case RoundDir::od: return odd(n_dn) ? val(n_dn) : val(n_up);
    default: break;
  }
  Rational frac = scaled - Rational(n_dn);
  Rational half(1, 2);
  if (frac < half) return val(n_dn);
  if (frac > half) return val(n_up);
  switch (f.dir) {
    case RoundDir::ne: return odd(n_dn) ? val(n_up) : val(n_dn);
    case RoundDir::no: return odd(n_dn) ? val(n_dn) : val(n_up);
    case RoundDir::nz: return positive ? val(n_dn) : val(n_up);
    case RoundDir::na: return positive ? val(n_up) : val(n_dn);
    case RoundDir::nd: return val(n_dn);
    case RoundDir::nu: return val(n_up);
    default: throw std::logic_error("unhandled direction");
  }
}

inline bool in_interval(const Rational &x, const Interval &i) {
  if (i.is_empty()) return false;
  return Dyadic::compare_rational(i.lo(), x) <= 0 && Dyadic::compare_rational(i.up(), x) >= 0;
}

/// Raised when a sample cannot be evaluated exactly (division by zero, an
/// irrational square root, an under-specified operator).
struct EvalUndefined : std::exception {};

/// Exact evaluation of an expression under a variable assignment; roundings
/// are evaluated exactly via the definitional oracle.
inline Rational eval_expr(const ExprArena &arena, NodeId id,
                          const std::map<std::string, Rational> &vars) {
  const Node &n = arena.at(id);
  auto c = [&](int i) { return eval_expr(arena, n.child[i], vars); };
  switch (n.kind) {
    case NodeKind::constant:
      return n.constant;
    case NodeKind::variable: {
      auto it = vars.find(n.var_name);
      if (it == vars.end()) throw EvalUndefined{};
      return it->second;
    }
    case NodeKind::neg:
      return -c(0);
    case NodeKind::abs:
      return abs(c(0));
    case NodeKind::sqrt: {
      Rational v = c(0);
      if (v < 0) throw EvalUndefined{};
      mpz_class sn, sd, rn, rd;
      mpz_sqrtrem(sn.get_mpz_t(), rn.get_mpz_t(), v.get_num().get_mpz_t());
      mpz_sqrtrem(sd.get_mpz_t(), rd.get_mpz_t(), v.get_den().get_mpz_t());
      if (rn != 0 || rd != 0) throw EvalUndefined{};  // not a perfect square
      Rational r(sn, sd);
      r.canonicalize();
      return r;
    }
    case NodeKind::add:
      return c(0) + c(1);
    case NodeKind::sub:
      return c(0) - c(1);
    case NodeKind::mul:
      return c(0) * c(1);
    case NodeKind::div: {
      Rational d = c(1);
      if (d == 0) throw EvalUndefined{};
      return c(0) / d;
    }
    case NodeKind::fma:
      return c(0) * c(1) + c(2);
    case NodeKind::round:
      return oracle_round(c(0), *arena.at(id).fmt);
    case NodeKind::rel_round:
      throw EvalUndefined{};  // not a function of its operands
  }
  throw EvalUndefined{};
}

inline bool eval_atom(const ExprArena &arena, const PropAtom &a,
                      const std::map<std::string, Rational> &vars) {
  Rational v = eval_expr(arena, a.subject, vars);
  switch (a.kind) {
    case PropAtom::Kind::in_range:
      return a.lo <= v && v <= a.hi;
    case PropAtom::Kind::le:
      return v <= a.hi;
    case PropAtom::Kind::ge:
      return v >= a.lo;
    case PropAtom::Kind::query:
      return true;  // an unspecified range can always be filled
  }
  return false;
}

inline bool eval_prop(const ExprArena &arena, const PropTree &p, int idx,
                      const std::map<std::string, Rational> &vars) {
  const auto &n = p.nodes[idx];
  switch (n.kind) {
    case PropTree::Kind::atom:
      return eval_atom(arena, n.atom, vars);
    case PropTree::Kind::conj:
      return eval_prop(arena, p, n.a, vars) && eval_prop(arena, p, n.b, vars);
    case PropTree::Kind::disj:
      return eval_prop(arena, p, n.a, vars) || eval_prop(arena, p, n.b, vars);
    case PropTree::Kind::impl:
      return !eval_prop(arena, p, n.a, vars) || eval_prop(arena, p, n.b, vars);
    case PropTree::Kind::neg:
      return !eval_prop(arena, p, n.a, vars);
  }
  return false;
}

}  // namespace encert::oracles

#endif
