#include "encert/interval.hpp"

#include <algorithm>

namespace encert {

std::string Interval::to_string() const {
  if (empty_) return "[empty]";
  return "[" + lo_.to_literal() + ", " + up_.to_literal() + "]";
}

Interval iv_neg(const Interval &i) {
  if (i.is_empty()) return Interval::empty();
  return Interval(-i.up(), -i.lo());
}

Interval iv_add(const Interval &i, const Interval &j) {
  if (i.is_empty() || j.is_empty()) return Interval::empty();
  return Interval(i.lo() + j.lo(), i.up() + j.up());
}

Interval iv_sub(const Interval &i, const Interval &j) { return iv_add(i, iv_neg(j)); }

Interval iv_mul(const Interval &i, const Interval &j) {
  if (i.is_empty() || j.is_empty()) return Interval::empty();
  // All four endpoint products, exactly; no sign case analysis.
  Dyadic p1 = i.lo() * j.lo();
  Dyadic p2 = i.lo() * j.up();
  Dyadic p3 = i.up() * j.lo();
  Dyadic p4 = i.up() * j.up();
  Dyadic lo = std::min({p1, p2, p3, p4});
  Dyadic up = std::max({p1, p2, p3, p4});
  return Interval(lo, up);
}

Interval iv_abs(const Interval &i) {
  if (i.is_empty()) return Interval::empty();
  if (i.lo().sign() >= 0) return i;
  if (i.up().sign() <= 0) return iv_neg(i);
  return Interval(Dyadic(), std::max(-i.lo(), i.up()));
}

Interval iv_inv(const Interval &j, unsigned precision) {
  if (j.is_empty()) return Interval::empty();
  if (j.contains_zero()) throw DomainError("interval inverse: divisor contains zero");
  Rational lo = 1 / j.up().value();
  Rational up = 1 / j.lo().value();
  return Interval(Dyadic::from_rational(lo, ConvDir::down, precision),
                  Dyadic::from_rational(up, ConvDir::up, precision));
}

Interval iv_div(const Interval &i, const Interval &j, unsigned precision) {
  if (i.is_empty() || j.is_empty()) return Interval::empty();
  if (j.contains_zero()) throw DomainError("interval division: divisor contains zero");
  Rational q1 = i.lo().value() / j.lo().value();
  Rational q2 = i.lo().value() / j.up().value();
  Rational q3 = i.up().value() / j.lo().value();
  Rational q4 = i.up().value() / j.up().value();
  Rational lo = std::min({q1, q2, q3, q4});
  Rational up = std::max({q1, q2, q3, q4});
  return Interval(Dyadic::from_rational(lo, ConvDir::down, precision),
                  Dyadic::from_rational(up, ConvDir::up, precision));
}

Dyadic dyadic_sqrt(const Dyadic &d, ConvDir dir, unsigned precision) {
  if (d.sign() < 0) throw DomainError("square root of a negative value");
  if (d.is_zero()) return Dyadic();
  std::int64_t target = d.floor_log2_abs() / 2 - static_cast<std::int64_t>(precision) + 1;
  for (;;) {
    // s ~ sqrt(d / 2^(2f)); floor(sqrt(floor(z))) equals floor(sqrt(z)).
    std::int64_t shift = d.exponent() - 2 * target;
    mpz_class scaled = d.mantissa();
    if (shift >= 0)
      mpz_mul_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
    else
      mpz_fdiv_q_2exp(scaled.get_mpz_t(), scaled.get_mpz_t(), static_cast<mp_bitcnt_t>(-shift));
    mpz_class s;
    mpz_sqrt(s.get_mpz_t(), scaled.get_mpz_t());
    if (dir == ConvDir::up) {
      // s or s+1; settle by comparing s^2 * 2^(2f) with d exactly.
      Dyadic cand(s, target);
      if (Dyadic::compare(cand * cand, d) < 0) s += 1;
    }
    if (s == 0 || mpz_sizeinbase(s.get_mpz_t(), 2) <= precision) {
      if (s == 0) {
        --target;
        continue;
      }
      return Dyadic(s, target);
    }
    ++target;
  }
}

Interval iv_sqrt(const Interval &i, unsigned precision) {
  if (i.is_empty()) return Interval::empty();
  if (i.lo().sign() < 0) throw DomainError("interval square root of a range below zero");
  return Interval(dyadic_sqrt(i.lo(), ConvDir::down, precision),
                  dyadic_sqrt(i.up(), ConvDir::up, precision));
}

Interval iv_rel_compose(const Interval &i, const Interval &j) {
  if (i.is_empty() || j.is_empty()) return Interval::empty();
  Dyadic minus_one(-1);
  if (i.lo() < minus_one || j.lo() < minus_one)
    throw DomainError("relative composition requires both intervals >= -1");
  Dyadic lo = i.lo() + j.lo() + i.lo() * j.lo();
  Dyadic up = i.up() + j.up() + i.up() * j.up();
  return Interval(lo, up);
}

Interval iv_intersect(const Interval &i, const Interval &j) {
  if (i.is_empty() || j.is_empty()) return Interval::empty();
  Dyadic lo = std::max(i.lo(), j.lo());
  Dyadic up = std::min(i.up(), j.up());
  if (up < lo) return Interval::empty();
  return Interval(lo, up);
}

Interval iv_hull(const Interval &i, const Interval &j) {
  if (i.is_empty()) return j;
  if (j.is_empty()) return i;
  return Interval(std::min(i.lo(), j.lo()), std::max(i.up(), j.up()));
}

bool iv_subset(const Interval &i, const Interval &j) {
  if (i.is_empty()) return true;
  if (j.is_empty()) return false;
  return j.lo() <= i.lo() && i.up() <= j.up();
}

}  // namespace encert
