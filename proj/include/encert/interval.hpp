#ifndef ENCERT_INTERVAL_HPP
#define ENCERT_INTERVAL_HPP

#include <optional>
#include <string>

#include "encert/dyadic.hpp"

namespace encert {

/// Thrown when a theorem precondition fails (division by an interval
/// containing zero, square root of a negative range).  Not a crash path: the
/// engine treats it as "row inapplicable".
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Closed interval with dyadic endpoints.  The empty interval is a distinct
/// sentinel; it is never produced implicitly by constructors.
class Interval {
 public:
  Interval() : empty_(true) {}
  Interval(Dyadic lo, Dyadic up) : empty_(false), lo_(std::move(lo)), up_(std::move(up)) {
    if (up_ < lo_) throw std::invalid_argument("interval endpoints out of order");
  }
  static Interval empty() { return Interval(); }
  static Interval singleton(const Dyadic &d) { return Interval(d, d); }

  bool is_empty() const { return empty_; }
  const Dyadic &lo() const { return lo_; }
  const Dyadic &up() const { return up_; }

  bool contains(const Dyadic &d) const { return !empty_ && lo_ <= d && d <= up_; }
  bool contains_zero() const { return contains(Dyadic()); }
  bool is_singleton() const { return !empty_ && lo_ == up_; }

  friend bool operator==(const Interval &a, const Interval &b) {
    if (a.empty_ || b.empty_) return a.empty_ == b.empty_;
    return a.lo_ == b.lo_ && a.up_ == b.up_;
  }
  friend bool operator!=(const Interval &a, const Interval &b) { return !(a == b); }

  std::string to_string() const;

 private:
  bool empty_;
  Dyadic lo_, up_;
};

// Exact operators (dyadics are closed under +, -, *).
Interval iv_neg(const Interval &i);
Interval iv_add(const Interval &i, const Interval &j);
Interval iv_sub(const Interval &i, const Interval &j);
Interval iv_mul(const Interval &i, const Interval &j);
Interval iv_abs(const Interval &i);

// Outward-rounded operators; `precision` bounds result mantissa bits.
Interval iv_inv(const Interval &j, unsigned precision);   // requires 0 not in j
Interval iv_div(const Interval &i, const Interval &j, unsigned precision);  // same
Interval iv_sqrt(const Interval &i, unsigned precision);  // requires i >= 0

/// [lo_i + lo_j + lo_i*lo_j, up_i + up_j + up_i*up_j]; encloses a+b+ab for
/// a in i, b in j when both intervals are >= -1.
Interval iv_rel_compose(const Interval &i, const Interval &j);

Interval iv_intersect(const Interval &i, const Interval &j);
Interval iv_hull(const Interval &i, const Interval &j);
bool iv_subset(const Interval &i, const Interval &j);  // i subset of j (empty is subset of all)

/// Directed square root of a dyadic, at most `precision` mantissa bits.
/// Requires d >= 0; exact whenever the root fits.
Dyadic dyadic_sqrt(const Dyadic &d, ConvDir dir, unsigned precision);

}  // namespace encert

#endif
