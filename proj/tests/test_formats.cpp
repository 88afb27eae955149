#include "doctest.h"
#include "encert/formats.hpp"
#include "oracles.hpp"

using namespace encert;
using oracles::in_interval;
using oracles::pow2q;
using oracles::rat;

namespace {
Dyadic dy(long m, long e) { return Dyadic(mpz_class(m), e); }
Format flt(std::int64_t p, std::int64_t emin, RoundDir d) {
  return Format{Format::Family::flt, p, emin, d};
}
Format fix(std::int64_t lsb, RoundDir d) { return Format{Format::Family::fix, 0, lsb, d}; }
const Format ieee32_ne = flt(24, -149, RoundDir::ne);
}  // namespace

TEST_CASE("round: ties, floors, identity on representables") {
  // 1 + 2^-25 sits exactly between 1 and 1 + 2^-23; even mantissa wins.
  Dyadic x = Dyadic(1) + dy(1, -25);
  CHECK(round_dyadic(x, ieee32_ne) == Dyadic(1));
  CHECK(round_dyadic(dy(13, -3), fix(0, RoundDir::dn)) == Dyadic(1));
  CHECK(round_dyadic(dy(3, -1), ieee32_ne) == dy(3, -1));
  CHECK(round_dyadic(dy(3, -1), fix(-1, RoundDir::dn)) == dy(3, -1));
  CHECK(representable(dy(1, -149), ieee32_ne));
  CHECK_FALSE(representable(dy(1, -150), ieee32_ne));
  CHECK_FALSE(representable(Dyadic(mpz_class((1 << 24) + 1), 0), ieee32_ne));
}

TEST_CASE("round agrees with the brute-force oracle on a toy format") {
  // Small slice here; the full 11-direction exhaustion runs in acceptance.
  Rational lo = rat(-9), hi = rat(9);
  for (RoundDir d : {RoundDir::ne, RoundDir::dn, RoundDir::od, RoundDir::nz}) {
    Format f = flt(4, -6, d);
    auto reprs = oracles::enumerate_representables(f, lo - 1, hi + 1);
    for (const auto &x : oracles::enumerate_dyadics(7, -8, 2)) {
      if (x < lo || x > hi) continue;
      Dyadic xd = Dyadic::from_dyadic_rational(x);
      CHECK(round_dyadic(xd, f).value() == oracles::brute_round(x, f, reprs));
      CHECK(oracles::oracle_round(x, f) == oracles::brute_round(x, f, reprs));
    }
  }
}

TEST_CASE("round is monotone and idempotent") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> man(-2000, 2000), exp(-12, 4);
  for (int dir = 0; dir < 11; ++dir) {
    Format f = flt(5, -8, static_cast<RoundDir>(dir));
    Format g = fix(-2, static_cast<RoundDir>(dir));
    for (int i = 0; i < 400; ++i) {
      Dyadic a(mpz_class(man(rng)), exp(rng)), b(mpz_class(man(rng)), exp(rng));
      if (b < a) std::swap(a, b);
      for (const Format &fmt : {f, g}) {
        Dyadic ra = round_dyadic(a, fmt), rb = round_dyadic(b, fmt);
        CHECK(ra <= rb);
        CHECK(round_dyadic(ra, fmt) == ra);
        CHECK(representable(ra, fmt));
      }
    }
  }
}

TEST_CASE("round_interval and representable_clip") {
  CHECK(round_interval(Interval(dy(3, -1), dy(5, -1)), fix(0, RoundDir::dn)) ==
        Interval(Dyadic(1), Dyadic(2)));
  CHECK(round_interval(Interval(Dyadic(1), Dyadic(2)), ieee32_ne) ==
        Interval(Dyadic(1), Dyadic(2)));
  // 1.3 bracketed outward, then rounded to the nearest multiple of 0.5.
  Interval j(Dyadic::from_rational(rat(13, 10), ConvDir::down, 40),
             Dyadic::from_rational(rat(13, 10), ConvDir::up, 40));
  Interval r = round_interval(j, fix(-1, RoundDir::ne));
  CHECK(r == Interval(dy(3, -1), dy(3, -1)));

  Interval clip = representable_clip(Interval(dy(3, -3), dy(17, -4)), fix(0, RoundDir::ne));
  CHECK(clip == Interval(Dyadic(1), Dyadic(1)));
  CHECK(representable_clip(Interval(Dyadic(1), Dyadic(2)), ieee32_ne) ==
        Interval(Dyadic(1), Dyadic(2)));
  CHECK(representable_clip(Interval(dy(3, -3), dy(9, -4)), fix(0, RoundDir::ne)).is_empty());
}

TEST_CASE("absolute error enclosures, fixed formats") {
  auto e = abs_error_enclosure(fix(0, RoundDir::dn), ErrInfo::nothing());
  REQUIRE(e);
  CHECK(*e == Interval(Dyadic(-1), Dyadic(0)));
  // Oracle: floor(x) - x over a fine rational grid stays inside.
  for (int i = -800; i <= 800; ++i) {
    Rational x = rat(i, 97);
    Rational err = oracles::oracle_round(x, fix(0, RoundDir::dn)) - x;
    CHECK(in_interval(err, *e));
  }
  auto half = abs_error_enclosure(fix(-4, RoundDir::ne), ErrInfo::nothing());
  REQUIRE(half);
  CHECK(*half == Interval(dy(-1, -5), dy(1, -5)));
  // Sign restriction for toward-zero with a nonnegative range.
  auto zr = abs_error_enclosure(fix(0, RoundDir::zr), ErrInfo::bnd(Interval(Dyadic(0), Dyadic(9))));
  CHECK(*zr == Interval(Dyadic(-1), Dyadic(0)));
}

TEST_CASE("absolute error enclosures, float formats") {
  // No magnitude info: unbounded, operator undefined.
  CHECK_FALSE(abs_error_enclosure(ieee32_ne, ErrInfo::nothing()));

  auto e = abs_error_enclosure(ieee32_ne, ErrInfo::abs(Interval(Dyadic(1), Dyadic(2))));
  REQUIRE(e);
  // Conservative binade-edge rule: 4 is the smallest power of two strictly
  // above 2, so the bound is half of 2^(2-24).
  CHECK(*e == Interval(dy(-1, -23), dy(1, -23)));
  // Oracle: the worst |rnd(x)-x| over 24-bit grid midpoints in [1,2] is
  // 2^-24; the enclosure must contain it.
  Rational worst(0);
  for (int k = 0; k < 64; ++k) {
    Rational x = rat(1) + rat(2 * k + 1, 128) + pow2q(-24);  // grid midpoints
    Rational err = abs(oracles::oracle_round(x, ieee32_ne) - x);
    worst = std::max(worst, err);
  }
  CHECK(worst == pow2q(-24));
  CHECK(in_interval(worst, *e));
  CHECK(in_interval(-worst, *e));

  // Exactly representable arguments stay exact whatever the format.
  auto tiny = abs_error_enclosure(ieee32_ne, ErrInfo::bnd(Interval(Dyadic(0), Dyadic(0))));
  REQUIRE(tiny);
  CHECK(*tiny == Interval(Dyadic(0), Dyadic(0)));
}

TEST_CASE("relative error enclosures") {
  auto ne = rel_error_enclosure(ieee32_ne, ErrInfo::abs(Interval(Dyadic(1), Dyadic(2))));
  REQUIRE(ne);
  CHECK(*ne == Interval(dy(-1, -24), dy(1, -24)));
  // Oracle: worst midpoint case in [1,2] is just below 2^-24 in ratio.
  for (int k = 0; k < 64; ++k) {
    Rational x = rat(1) + rat(2 * k + 1, 128) + pow2q(-24);
    Rational rel = (oracles::oracle_round(x, ieee32_ne) - x) / x;
    CHECK(in_interval(rel, *ne));
  }

  // Directed down over a positive range is nonpositive.
  Format dn = flt(24, -149, RoundDir::dn);
  auto rdn = rel_error_enclosure(dn, ErrInfo::bnd(Interval(Dyadic(1), Dyadic(2))));
  REQUIRE(rdn);
  CHECK(*rdn == Interval(dy(-1, -23), Dyadic(0)));
  for (int k = 0; k < 64; ++k) {
    Rational x = rat(1) + rat(2 * k + 1, 997);
    Rational rel = (oracles::oracle_round(x, dn) - x) / x;
    CHECK(in_interval(rel, *rdn));
  }
  // With magnitude-only info the sign of x is unknown: negative arguments
  // make the down-rounding relative error positive, so both sides remain.
  auto rdn_abs = rel_error_enclosure(dn, ErrInfo::abs(Interval(Dyadic(1), Dyadic(2))));
  REQUIRE(rdn_abs);
  Rational xneg = rat(-1) - pow2q(-25);
  Rational relneg = (oracles::oracle_round(xneg, dn) - xneg) / xneg;
  CHECK(relneg > 0);
  CHECK(in_interval(relneg, *rdn_abs));

  // Below the normal threshold the operator is undefined.
  CHECK_FALSE(rel_error_enclosure(ieee32_ne, ErrInfo::abs(Interval(dy(1, -140), dy(1, -139)))));
  CHECK_FALSE(rel_error_enclosure(ieee32_ne,
                                  ErrInfo::bnd(Interval(Dyadic(-1), Dyadic(1)))));  // 0 inside
  CHECK_FALSE(rel_error_enclosure(fix(0, RoundDir::ne), ErrInfo::bnd(Interval(Dyadic(1), Dyadic(2)))));
}

TEST_CASE("under-specified relative operators") {
  RelOpSpec mul20{RelOpSpec::Kind::mul, 20, std::nullopt};
  auto zero = underspecified_rel_op(mul20, Interval(Dyadic(1), Dyadic(1)),
                                    Interval(Dyadic(0), Dyadic(0)));
  REQUIRE(zero.value);
  CHECK(*zero.value == Interval(Dyadic(0), Dyadic(0)));
  REQUIRE(zero.abs_err);
  CHECK(*zero.abs_err == Interval(Dyadic(0), Dyadic(0)));

  RelOpSpec add20{RelOpSpec::Kind::add, 20, std::nullopt};
  auto two = underspecified_rel_op(add20, Interval(Dyadic(1), Dyadic(1)),
                                   Interval(Dyadic(1), Dyadic(1)));
  REQUIRE(two.value);
  Rational lo_expect = rat(2) * (rat(1) - pow2q(-20));
  Rational up_expect = rat(2) * (rat(1) + pow2q(-20));
  CHECK(two.value->lo().value() == lo_expect);
  CHECK(two.value->up().value() == up_expect);
  REQUIRE(two.rel_err);
  CHECK(*two.rel_err == Interval(dy(-1, -20), dy(1, -20)));

  // With a minimum exponent, results that can drop below it yield no fact.
  RelOpSpec add_min{RelOpSpec::Kind::add, 20, -60};
  auto none = underspecified_rel_op(add_min, Interval(dy(1, -80), dy(1, -70)),
                                    Interval(Dyadic(0), Dyadic(0)));
  CHECK_FALSE(none.value);
  CHECK_FALSE(none.abs_err);
  auto ok = underspecified_rel_op(add_min, Interval(Dyadic(1), Dyadic(2)),
                                  Interval(Dyadic(1), Dyadic(2)));
  CHECK(ok.value);
}

TEST_CASE("named formats and the smallest ieee_32 value") {
  auto f32 = named_float_format("ieee_32");
  REQUIRE(f32);
  CHECK(f32->first == 24);
  CHECK(f32->second == -149);
  Format f{Format::Family::flt, f32->first, f32->second, RoundDir::ne};
  CHECK(representable(dy(1, -149), f));
  CHECK_FALSE(representable(dy(1, -150), f));
  CHECK(named_float_format("ieee_64"));
  CHECK(named_float_format("ieee_128"));
  CHECK(named_float_format("x86_80"));
  CHECK_FALSE(named_float_format("ieee_16"));
}
