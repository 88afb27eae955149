#ifndef ENCERT_FORMATS_HPP
#define ENCERT_FORMATS_HPP

#include <optional>
#include <string>

#include "encert/interval.hpp"

namespace encert {

/// The eleven rounding directions of the input language.
enum class RoundDir { zr, aw, dn, up, od, ne, no, nz, na, nd, nu };

bool round_dir_is_nearest(RoundDir d);
const char *round_dir_name(RoundDir d);
std::optional<RoundDir> round_dir_from_name(const std::string &name);

/// A rounding target: float<precision, min_exponent> or fixed<lsb_weight>,
/// plus a direction.  Representable sets have no upper exponent bound
/// (overflow is out of model).
struct Format {
  enum class Family { flt, fix };
  Family family = Family::flt;
  std::int64_t precision = 0;  // mantissa bits; unused for fixed
  std::int64_t min_exp = 0;    // minimum exponent (float) or lsb weight (fixed)
  RoundDir dir = RoundDir::ne;

  bool is_float() const { return family == Family::flt; }
  bool is_fixed() const { return family == Family::fix; }
  std::string name() const;

  friend bool operator==(const Format &a, const Format &b) {
    return a.family == b.family && a.precision == b.precision && a.min_exp == b.min_exp &&
           a.dir == b.dir;
  }
};

/// Predefined float format aliases: ieee_32, ieee_64, ieee_128, x86_80.
std::optional<std::pair<std::int64_t, std::int64_t>> named_float_format(const std::string &name);

/// True iff x belongs to the representable set of f.
bool representable(const Dyadic &x, const Format &f);

/// Correctly rounded value of x in f per f.dir; identity exactly on the
/// representable set.
Dyadic round_dyadic(const Dyadic &x, const Format &f);

/// [round(lo), round(up)]: contains the image of j under rounding, by
/// monotonicity of every direction.
Interval round_interval(const Interval &j, const Format &f);

/// Tightest interval of representable values inside j: [least element of the
/// format >= lo, greatest <= up]; empty sentinel when no representable value
/// lies in j.
Interval representable_clip(const Interval &j, const Format &f);

/// Side information about the rounded operand for error enclosures.
struct ErrInfo {
  enum class Kind { none, bnd, abs };
  Kind kind = Kind::none;
  Interval range;          // meaningful for bnd/abs
  bool on_result = false;  // info describes rnd(a) rather than a

  static ErrInfo nothing() { return {}; }
  static ErrInfo bnd(const Interval &j, bool on_result = false) {
    return {Kind::bnd, j, on_result};
  }
  static ErrInfo abs(const Interval &j, bool on_result = false) {
    return {Kind::abs, j, on_result};
  }
};

/// Interval containing rnd(x) - x for every x compatible with `info`.
/// nullopt = operator undefined for this (format, info) combination; the
/// engine then tries other theorems.
std::optional<Interval> abs_error_enclosure(const Format &f, const ErrInfo &info);

/// Interval containing (rnd(x) - x) / x; float formats only, needs magnitude
/// info at or above the normal threshold.
std::optional<Interval> rel_error_enclosure(const Format &f, const ErrInfo &info);

/// Under-specified operators {add|sub|mul}_rel<precision[, min_exponent]>:
/// result carries a relative error within 2^-precision of the exact
/// operation.  With a minimum exponent, no fact is produced when the result
/// magnitude can drop below 2^min_exponent.
struct RelOpSpec {
  enum class Kind { add, sub, mul };
  Kind kind = Kind::add;
  std::int64_t precision = 0;
  std::optional<std::int64_t> min_exp;

  std::string name() const;
  friend bool operator==(const RelOpSpec &a, const RelOpSpec &b) {
    return a.kind == b.kind && a.precision == b.precision && a.min_exp == b.min_exp;
  }
};

struct RelOpFacts {
  std::optional<Interval> value;    // enclosure of the produced result
  std::optional<Interval> abs_err;  // enclosure of result - exact
  std::optional<Interval> rel_err;  // enclosure of (result - exact)/exact
};

RelOpFacts underspecified_rel_op(const RelOpSpec &spec, const Interval &a, const Interval &b);

/// Exact interval of the corresponding exact operation (used by the rel-op
/// rows and their checker side-conditions).
Interval rel_op_exact_range(RelOpSpec::Kind kind, const Interval &a, const Interval &b);

}  // namespace encert

#endif
