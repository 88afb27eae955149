#ifndef ENCERT_DYADIC_HPP
#define ENCERT_DYADIC_HPP

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace encert {

using Rational = mpq_class;

/// Direction for inexact conversions. `down` never overestimates, `up` never
/// underestimates.
enum class ConvDir { down, up };

/// Arbitrary-precision dyadic fraction m * 2^e in canonical form: the
/// mantissa is odd or zero, and zero is stored with exponent 0.  Canonical
/// form makes structural equality coincide with value equality, which the
/// fact database and the certificate checker rely on.
class Dyadic {
 public:
  Dyadic() : man_(0), exp_(0) {}
  Dyadic(long m) : man_(m), exp_(0) { normalize(); }
  Dyadic(mpz_class m, std::int64_t e) : man_(std::move(m)), exp_(e) { normalize(); }

  const mpz_class &mantissa() const { return man_; }
  std::int64_t exponent() const { return exp_; }

  bool is_zero() const { return man_ == 0; }
  int sign() const { return sgn(man_); }

  /// Number of bits of |mantissa| (0 for zero).
  std::size_t mantissa_bits() const {
    return man_ == 0 ? 0 : mpz_sizeinbase(man_.get_mpz_t(), 2);
  }

  /// floor(log2 |x|); requires x != 0.
  std::int64_t floor_log2_abs() const;

  Rational value() const;

  Dyadic operator-() const { return Dyadic(-man_, exp_, nullptr); }
  friend Dyadic operator+(const Dyadic &a, const Dyadic &b);
  friend Dyadic operator-(const Dyadic &a, const Dyadic &b);
  friend Dyadic operator*(const Dyadic &a, const Dyadic &b);

  /// Total order consistent with real values: -1, 0, or 1.
  static int compare(const Dyadic &a, const Dyadic &b);

  friend bool operator==(const Dyadic &a, const Dyadic &b) {
    return a.exp_ == b.exp_ && a.man_ == b.man_;
  }
  friend bool operator!=(const Dyadic &a, const Dyadic &b) { return !(a == b); }
  friend bool operator<(const Dyadic &a, const Dyadic &b) { return compare(a, b) < 0; }
  friend bool operator<=(const Dyadic &a, const Dyadic &b) { return compare(a, b) <= 0; }
  friend bool operator>(const Dyadic &a, const Dyadic &b) { return compare(a, b) > 0; }
  friend bool operator>=(const Dyadic &a, const Dyadic &b) { return compare(a, b) >= 0; }

  /// x * 2^k, exact.
  Dyadic scaled_pow2(std::int64_t k) const {
    if (man_ == 0) return Dyadic();
    return Dyadic(man_, exp_ + k, nullptr);
  }

  static Dyadic pow2(std::int64_t k) { return Dyadic(mpz_class(1), k, nullptr); }

  /// Directed conversion of an exact rational to a dyadic with at most
  /// `precision` mantissa bits.  Exact (direction-independent) whenever the
  /// input fits.  precision >= 2.
  static Dyadic from_rational(const Rational &x, ConvDir dir, unsigned precision);

  /// Exact comparison against a rational without materializing the dyadic as
  /// a rational: -1, 0, or 1.
  static int compare_rational(const Dyadic &a, const Rational &q);

  /// True iff q is exactly representable as a dyadic (denominator a power of
  /// two).
  static bool rational_is_dyadic(const Rational &q);

  /// Exact conversion; requires rational_is_dyadic(q).
  static Dyadic from_dyadic_rational(const Rational &q);

  /// Literal form "m" or "mb e" as in scripts, e.g. "5b-3".
  std::string to_literal() const;

  /// Decimal rendering.  Exact when the expansion is short enough, otherwise
  /// an approximation prefixed with '~'.  The dyadic literal stays
  /// authoritative.
  std::string to_decimal() const;

 private:
  Dyadic(mpz_class m, std::int64_t e, std::nullptr_t) : man_(std::move(m)), exp_(e) {}
  void normalize();

  mpz_class man_;
  std::int64_t exp_;
};

/// Parses a numeric literal: optional sign, digits, optional '.' fraction,
/// then either 'e'<sign?digits> (decimal exponent) or 'b'<sign?digits>
/// (binary exponent, integer mantissa only).  Throws std::invalid_argument on
/// malformed input.
Rational parse_number(const std::string &text);

/// floor(log2 q) for q > 0, exact.
std::int64_t floor_log2(const Rational &q);

/// Renders a rational the way script literals spell it: integer, dyadic
/// literal, or exact decimal; falls back on num/den.
std::string rational_literal(const Rational &q);

}  // namespace encert

#endif
