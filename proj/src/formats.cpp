#include "encert/formats.hpp"

#include <algorithm>
#include <array>

namespace encert {

namespace {
constexpr std::array<const char *, 11> kDirNames = {"zr", "aw", "dn", "up", "od", "ne",
                                                    "no", "nz", "na", "nd", "nu"};
}

bool round_dir_is_nearest(RoundDir d) {
  switch (d) {
    case RoundDir::ne:
    case RoundDir::no:
    case RoundDir::nz:
    case RoundDir::na:
    case RoundDir::nd:
    case RoundDir::nu:
      return true;
    default:
      return false;
  }
}

const char *round_dir_name(RoundDir d) { return kDirNames[static_cast<int>(d)]; }

std::optional<RoundDir> round_dir_from_name(const std::string &name) {
  for (std::size_t i = 0; i < kDirNames.size(); ++i)
    if (name == kDirNames[i]) return static_cast<RoundDir>(i);
  return std::nullopt;
}

std::string Format::name() const {
  if (is_float())
    return "float<" + std::to_string(precision) + "," + std::to_string(min_exp) + "," +
           round_dir_name(dir) + ">";
  return "fixed<" + std::to_string(min_exp) + "," + round_dir_name(dir) + ">";
}

std::optional<std::pair<std::int64_t, std::int64_t>> named_float_format(const std::string &name) {
  if (name == "ieee_32") return std::make_pair<std::int64_t, std::int64_t>(24, -149);
  if (name == "ieee_64") return std::make_pair<std::int64_t, std::int64_t>(53, -1074);
  if (name == "ieee_128") return std::make_pair<std::int64_t, std::int64_t>(113, -16494);
  if (name == "x86_80") return std::make_pair<std::int64_t, std::int64_t>(64, -16445);
  return std::nullopt;
}

bool representable(const Dyadic &x, const Format &f) {
  if (x.is_zero()) return true;
  if (f.is_fixed()) return x.exponent() >= f.min_exp;
  return x.exponent() >= f.min_exp &&
         static_cast<std::int64_t>(x.mantissa_bits()) <= f.precision;
}

namespace {

std::int64_t grid_exponent(const Dyadic &x, const Format &f) {
  if (f.is_fixed()) return f.min_exp;
  return std::max(f.min_exp, x.floor_log2_abs() - f.precision + 1);
}

}  // namespace

Dyadic round_dyadic(const Dyadic &x, const Format &f) {
  if (x.is_zero()) return x;
  std::int64_t g = grid_exponent(x, f);
  if (x.exponent() >= g) return x;  // already on the grid
  mp_bitcnt_t k = static_cast<mp_bitcnt_t>(g - x.exponent());
  mpz_class n_dn, n_up;
  mpz_fdiv_q_2exp(n_dn.get_mpz_t(), x.mantissa().get_mpz_t(), k);
  n_up = n_dn + 1;  // the mantissa is odd, so the value is strictly between the neighbors
  bool positive = x.sign() > 0;
  auto pick_dn = [&]() { return Dyadic(n_dn, g); };
  auto pick_up = [&]() { return Dyadic(n_up, g); };
  switch (f.dir) {
    case RoundDir::dn:
      return pick_dn();
    case RoundDir::up:
      return pick_up();
    case RoundDir::zr:
      return positive ? pick_dn() : pick_up();
    case RoundDir::aw:
      return positive ? pick_up() : pick_dn();
    case RoundDir::od:
      return mpz_odd_p(n_dn.get_mpz_t()) ? pick_dn() : pick_up();
    default:
      break;
  }
  // Nearest family: compare the remainder with half a grid step.
  mpz_class floored = n_dn;
  mpz_mul_2exp(floored.get_mpz_t(), floored.get_mpz_t(), k);
  mpz_class rem = x.mantissa() - floored;  // in (0, 2^k)
  mpz_class half;
  mpz_ui_pow_ui(half.get_mpz_t(), 2, static_cast<unsigned long>(k - 1));
  int c = cmp(rem, half);
  if (c < 0) return pick_dn();
  if (c > 0) return pick_up();
  switch (f.dir) {
    case RoundDir::ne:
      return mpz_even_p(n_dn.get_mpz_t()) ? pick_dn() : pick_up();
    case RoundDir::no:
      return mpz_odd_p(n_dn.get_mpz_t()) ? pick_dn() : pick_up();
    case RoundDir::nz:
      return positive ? pick_dn() : pick_up();
    case RoundDir::na:
      return positive ? pick_up() : pick_dn();
    case RoundDir::nd:
      return pick_dn();
    case RoundDir::nu:
      return pick_up();
    default:
      throw std::logic_error("unhandled rounding direction");
  }
}

Interval round_interval(const Interval &j, const Format &f) {
  if (j.is_empty()) return Interval::empty();
  return Interval(round_dyadic(j.lo(), f), round_dyadic(j.up(), f));
}

Interval representable_clip(const Interval &j, const Format &f) {
  if (j.is_empty()) return Interval::empty();
  Format up_fmt = f, dn_fmt = f;
  up_fmt.dir = RoundDir::up;
  dn_fmt.dir = RoundDir::dn;
  Dyadic lo = round_dyadic(j.lo(), up_fmt);  // least representable >= lo
  Dyadic up = round_dyadic(j.up(), dn_fmt);  // greatest representable <= up
  if (up < lo) return Interval::empty();
  return Interval(lo, up);
}

namespace {

// -1, 0, +1 for known-negative / unknown / known-positive operand sign.
// Info about the result needs a strict sign: a value rounding to a positive
// number may itself be <= 0 when the bound is not strict.
int operand_sign(const ErrInfo &info) {
  if (info.kind != ErrInfo::Kind::bnd) return 0;
  const Interval &j = info.range;
  if (j.is_empty()) return 0;
  if (info.on_result ? j.lo().sign() > 0 : j.lo().sign() >= 0) return 1;
  if (info.on_result ? j.up().sign() < 0 : j.up().sign() <= 0) return -1;
  return 0;
}

Interval directed_by_sign(const Dyadic &h, RoundDir dir, int sign) {
  Dyadic zero;
  switch (dir) {
    case RoundDir::dn:
      return Interval(-h, zero);
    case RoundDir::up:
      return Interval(zero, h);
    case RoundDir::zr:
      if (sign > 0) return Interval(-h, zero);
      if (sign < 0) return Interval(zero, h);
      return Interval(-h, h);
    case RoundDir::aw:
      if (sign > 0) return Interval(zero, h);
      if (sign < 0) return Interval(-h, zero);
      return Interval(-h, h);
    case RoundDir::od:
      return Interval(-h, h);
    default:  // nearest family: half width either side
      return Interval(-h.scaled_pow2(-1), h.scaled_pow2(-1));
  }
}

// Largest magnitude compatible with the info, or nullopt when none is known.
std::optional<Dyadic> magnitude_bound(const ErrInfo &info) {
  if (info.kind == ErrInfo::Kind::none || info.range.is_empty()) return std::nullopt;
  if (info.kind == ErrInfo::Kind::abs) return info.range.up();
  return std::max(-info.range.lo(), info.range.up());
}

}  // namespace

std::optional<Interval> abs_error_enclosure(const Format &f, const ErrInfo &info) {
  if (f.is_fixed()) {
    Dyadic h = Dyadic::pow2(f.min_exp);
    return directed_by_sign(h, f.dir, operand_sign(info));
  }
  // Float: absolute error is only bounded once a magnitude is known.
  auto mag = magnitude_bound(info);
  if (!mag) return std::nullopt;
  if (mag->is_zero()) return Interval::singleton(Dyadic());
  // 2^big is the smallest power of two strictly above the magnitude;
  // conservative at binade edges, and valid for result-side info too.
  std::int64_t big = mag->floor_log2_abs() + 1;
  Dyadic h = Dyadic::pow2(std::max(f.min_exp, big - f.precision));
  return directed_by_sign(h, f.dir, operand_sign(info));
}

std::optional<Interval> rel_error_enclosure(const Format &f, const ErrInfo &info) {
  if (!f.is_float()) return std::nullopt;
  if (info.kind == ErrInfo::Kind::none || info.range.is_empty()) return std::nullopt;
  // Normal threshold: one binade higher when the info describes the rounded
  // result, since the argument sits at most one binade below it.
  Dyadic threshold = Dyadic::pow2(f.min_exp + f.precision - (info.on_result ? 0 : 1));
  const Interval &j = info.range;
  Dyadic min_mag;
  if (info.kind == ErrInfo::Kind::abs) {
    min_mag = j.lo();
  } else {
    if (j.contains_zero()) return std::nullopt;
    min_mag = j.lo().sign() > 0 ? j.lo() : -j.up();
  }
  if (min_mag < threshold) return std::nullopt;
  Dyadic r = Dyadic::pow2(1 - f.precision);
  if (round_dir_is_nearest(f.dir)) {
    Dyadic rn = Dyadic::pow2(-f.precision);
    return Interval(-rn, rn);
  }
  Dyadic zero;
  int sign = operand_sign(info);
  switch (f.dir) {
    case RoundDir::zr:
      return Interval(-r, zero);  // the error always points toward zero
    case RoundDir::aw:
      return Interval(zero, r);
    case RoundDir::dn:
      if (sign > 0) return Interval(-r, zero);
      if (sign < 0) return Interval(zero, r);
      return Interval(-r, r);
    case RoundDir::up:
      if (sign > 0) return Interval(zero, r);
      if (sign < 0) return Interval(-r, zero);
      return Interval(-r, r);
    case RoundDir::od:
      return Interval(-r, r);
    default:
      throw std::logic_error("unhandled rounding direction");
  }
}

std::string RelOpSpec::name() const {
  const char *k = kind == Kind::add ? "add_rel" : kind == Kind::sub ? "sub_rel" : "mul_rel";
  std::string s = std::string(k) + "<" + std::to_string(precision);
  if (min_exp) s += "," + std::to_string(*min_exp);
  return s + ">";
}

Interval rel_op_exact_range(RelOpSpec::Kind kind, const Interval &a, const Interval &b) {
  switch (kind) {
    case RelOpSpec::Kind::add:
      return iv_add(a, b);
    case RelOpSpec::Kind::sub:
      return iv_sub(a, b);
    case RelOpSpec::Kind::mul:
      return iv_mul(a, b);
  }
  throw std::logic_error("unhandled rel-op kind");
}

RelOpFacts underspecified_rel_op(const RelOpSpec &spec, const Interval &a, const Interval &b) {
  RelOpFacts out;
  if (a.is_empty() || b.is_empty()) return out;
  Interval exact = rel_op_exact_range(spec.kind, a, b);
  Dyadic eps = Dyadic::pow2(-spec.precision);
  Interval delta(-eps, eps);
  Interval one = Interval::singleton(Dyadic(1));
  Interval value = iv_mul(exact, iv_add(one, delta));
  if (spec.min_exp) {
    // No assumption is instantiated when the result magnitude can fall below
    // the minimum exponent.
    Interval mag = iv_abs(value);
    if (mag.lo() < Dyadic::pow2(*spec.min_exp)) return out;
  }
  out.value = value;
  out.abs_err = iv_mul(exact, delta);
  if (!exact.contains_zero()) out.rel_err = delta;
  return out;
}

}  // namespace encert
