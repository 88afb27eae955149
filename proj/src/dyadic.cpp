#include "encert/dyadic.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace encert {

void Dyadic::normalize() {
  if (man_ == 0) {
    exp_ = 0;
    return;
  }
  mpz_class a = abs(man_);
  mp_bitcnt_t tz = mpz_scan1(a.get_mpz_t(), 0);
  if (tz > 0) {
    man_ >>= tz;
    exp_ += static_cast<std::int64_t>(tz);
  }
}

std::int64_t Dyadic::floor_log2_abs() const {
  if (man_ == 0) throw std::domain_error("floor_log2_abs of zero");
  return static_cast<std::int64_t>(mantissa_bits()) - 1 + exp_;
}

Rational Dyadic::value() const {
  Rational r(man_);
  if (exp_ >= 0) {
    mpz_class p;
    mpz_mul_2exp(p.get_mpz_t(), man_.get_mpz_t(), static_cast<mp_bitcnt_t>(exp_));
    return Rational(p);
  }
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 2, static_cast<unsigned long>(-exp_));
  Rational q(man_, den);
  q.canonicalize();
  return q;
}

Dyadic operator+(const Dyadic &a, const Dyadic &b) {
  if (a.man_ == 0) return b;
  if (b.man_ == 0) return a;
  std::int64_t e = std::min(a.exp_, b.exp_);
  mpz_class ma = a.man_, mb = b.man_;
  if (a.exp_ > e) mpz_mul_2exp(ma.get_mpz_t(), ma.get_mpz_t(), static_cast<mp_bitcnt_t>(a.exp_ - e));
  if (b.exp_ > e) mpz_mul_2exp(mb.get_mpz_t(), mb.get_mpz_t(), static_cast<mp_bitcnt_t>(b.exp_ - e));
  return Dyadic(ma + mb, e);
}

Dyadic operator-(const Dyadic &a, const Dyadic &b) { return a + (-b); }

Dyadic operator*(const Dyadic &a, const Dyadic &b) {
  return Dyadic(a.man_ * b.man_, a.exp_ + b.exp_);
}

int Dyadic::compare(const Dyadic &a, const Dyadic &b) {
  int sa = a.sign(), sb = b.sign();
  if (sa != sb) return sa < sb ? -1 : 1;
  if (sa == 0) return 0;
  Dyadic d = a - b;
  return d.sign();
}

Dyadic Dyadic::from_rational(const Rational &x, ConvDir dir, unsigned precision) {
  if (precision < 2) throw std::invalid_argument("conversion precision must be >= 2");
  if (x == 0) return Dyadic();
  const mpz_class &num = x.get_num();
  const mpz_class &den = x.get_den();
  // First exponent guess from bit lengths, then correct so the mantissa has
  // at most `precision` bits.
  std::int64_t bn = static_cast<std::int64_t>(mpz_sizeinbase(num.get_mpz_t(), 2));
  std::int64_t bd = static_cast<std::int64_t>(mpz_sizeinbase(den.get_mpz_t(), 2));
  std::int64_t e = bn - bd - static_cast<std::int64_t>(precision);
  auto quantize = [&](std::int64_t ee) {
    // m = num / (den * 2^ee) rounded toward -inf (down) or +inf (up).
    mpz_class n = num, d = den, q;
    if (ee >= 0)
      mpz_mul_2exp(d.get_mpz_t(), d.get_mpz_t(), static_cast<mp_bitcnt_t>(ee));
    else
      mpz_mul_2exp(n.get_mpz_t(), n.get_mpz_t(), static_cast<mp_bitcnt_t>(-ee));
    if (dir == ConvDir::down)
      mpz_fdiv_q(q.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    else
      mpz_cdiv_q(q.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    return q;
  };
  mpz_class m = quantize(e);
  while (m != 0 && mpz_sizeinbase(m.get_mpz_t(), 2) > precision) {
    ++e;
    m = quantize(e);
  }
  // A zero mantissa can only appear for down-conversion of tiny positive
  // values (or up of tiny negative); fix by lowering e until nonzero.
  while (m == 0) {
    --e;
    m = quantize(e);
  }
  return Dyadic(m, e);
}

int Dyadic::compare_rational(const Dyadic &a, const Rational &q) {
  // a - q  =  (man * 2^e * den - num) / den,  den > 0.
  mpz_class lhs = a.man_ * q.get_den();
  mpz_class rhs = q.get_num();
  if (a.exp_ >= 0)
    mpz_mul_2exp(lhs.get_mpz_t(), lhs.get_mpz_t(), static_cast<mp_bitcnt_t>(a.exp_));
  else
    mpz_mul_2exp(rhs.get_mpz_t(), rhs.get_mpz_t(), static_cast<mp_bitcnt_t>(-a.exp_));
  return cmp(lhs, rhs);
}

bool Dyadic::rational_is_dyadic(const Rational &q) {
  const mpz_class &den = q.get_den();
  if (den == 1) return true;
  mpz_class a = abs(den);
  return mpz_scan1(a.get_mpz_t(), 0) + 1 == mpz_sizeinbase(a.get_mpz_t(), 2);
}

Dyadic Dyadic::from_dyadic_rational(const Rational &q) {
  if (!rational_is_dyadic(q)) throw std::invalid_argument("rational is not dyadic");
  const mpz_class &den = q.get_den();
  std::int64_t e = -static_cast<std::int64_t>(mpz_sizeinbase(den.get_mpz_t(), 2) - 1);
  return Dyadic(q.get_num(), e);
}

std::string Dyadic::to_literal() const {
  std::ostringstream os;
  os << man_.get_str();
  if (exp_ != 0) os << 'b' << exp_;
  return os.str();
}

std::string Dyadic::to_decimal() const {
  if (exp_ >= 0) {
    mpz_class v;
    mpz_mul_2exp(v.get_mpz_t(), man_.get_mpz_t(), static_cast<mp_bitcnt_t>(exp_));
    std::string s = v.get_str();
    if (s.size() <= 24) return s;
  } else if (exp_ >= -80) {
    // m * 2^-k == m * 5^k / 10^k: finite decimal expansion.
    mpz_class scaled = man_;
    mpz_class five;
    mpz_ui_pow_ui(five.get_mpz_t(), 5, static_cast<unsigned long>(-exp_));
    scaled *= five;
    mpz_class mag = abs(scaled);
    std::string digits = mag.get_str();
    std::size_t frac = static_cast<std::size_t>(-exp_);
    if (digits.size() <= frac) digits.insert(0, frac - digits.size() + 1, '0');
    std::string s = digits.substr(0, digits.size() - frac) + "." + digits.substr(digits.size() - frac);
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
    if (sgn(man_) < 0) s.insert(0, 1, '-');
    if (s.size() <= 24) return s;
  }
  // Too long for an exact rendering: 17 significant digits, marked
  // approximate.
  mpf_class f(0, 96);
  mpf_set_z(f.get_mpf_t(), man_.get_mpz_t());
  if (exp_ >= 0)
    mpf_mul_2exp(f.get_mpf_t(), f.get_mpf_t(), static_cast<mp_bitcnt_t>(exp_));
  else
    mpf_div_2exp(f.get_mpf_t(), f.get_mpf_t(), static_cast<mp_bitcnt_t>(-exp_));
  mp_exp_t ex;
  std::string digits = f.get_str(ex, 10, 17);
  bool neg = !digits.empty() && digits[0] == '-';
  if (neg) digits.erase(0, 1);
  std::ostringstream os;
  os << '~' << (neg ? "-" : "") << digits.substr(0, 1);
  if (digits.size() > 1) os << '.' << digits.substr(1);
  os << 'e' << (ex - 1);
  return os.str();
}

Rational parse_number(const std::string &text) {
  std::size_t i = 0;
  bool neg = false;
  auto fail = [&]() { throw std::invalid_argument("malformed number literal: " + text); };
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    neg = text[i] == '-';
    ++i;
  }
  std::size_t start = i;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
  if (i == start) fail();
  std::string int_part = text.substr(start, i - start);
  std::string frac_part;
  if (i < text.size() && text[i] == '.') {
    ++i;
    std::size_t fs = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (i == fs) fail();
    frac_part = text.substr(fs, i - fs);
  }
  char exp_kind = 0;
  std::string exp_digits;
  bool exp_neg = false;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E' || text[i] == 'b' || text[i] == 'B')) {
    exp_kind = (text[i] == 'b' || text[i] == 'B') ? 'b' : 'e';
    ++i;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      exp_neg = text[i] == '-';
      ++i;
    }
    std::size_t es = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (i == es) fail();
    exp_digits = text.substr(es, i - es);
  }
  if (i != text.size()) fail();
  if (exp_kind == 'b' && !frac_part.empty()) fail();  // dyadic literals take integer mantissas

  mpz_class mant(int_part + frac_part, 10);
  if (neg) mant = -mant;
  Rational r(mant);
  if (!frac_part.empty()) {
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(frac_part.size()));
    r = Rational(mant, den);
    r.canonicalize();
  }
  if (exp_kind != 0) {
    unsigned long k = std::stoul(exp_digits);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), exp_kind == 'b' ? 2 : 10, k);
    if (exp_neg)
      r /= Rational(scale);
    else
      r *= Rational(scale);
    r.canonicalize();
  }
  return r;
}

std::string rational_literal(const Rational &q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  if (Dyadic::rational_is_dyadic(q)) return Dyadic::from_dyadic_rational(q).to_literal();
  mpz_class den = q.get_den();
  int tens = 0;
  while (den % 10 == 0) {
    den /= 10;
    ++tens;
  }
  if (den == 1) {  // exact decimal
    mpz_class mag = abs(q.get_num());
    std::string digits = mag.get_str();
    if (digits.size() <= static_cast<std::size_t>(tens))
      digits.insert(0, tens - digits.size() + 1, '0');
    std::string s =
        digits.substr(0, digits.size() - tens) + "." + digits.substr(digits.size() - tens);
    if (sgn(q.get_num()) < 0) s.insert(0, 1, '-');
    return s;
  }
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::int64_t floor_log2(const Rational &q) {
  if (q <= 0) throw std::domain_error("floor_log2 requires a positive argument");
  const mpz_class &num = q.get_num();
  const mpz_class &den = q.get_den();
  std::int64_t k = static_cast<std::int64_t>(mpz_sizeinbase(num.get_mpz_t(), 2)) -
                   static_cast<std::int64_t>(mpz_sizeinbase(den.get_mpz_t(), 2));
  // k is within one of the answer; settle by exact comparison with 2^k.
  auto at_least_pow2 = [&](std::int64_t e) {
    mpz_class lhs = num, rhs = den;
    if (e >= 0)
      mpz_mul_2exp(rhs.get_mpz_t(), rhs.get_mpz_t(), static_cast<mp_bitcnt_t>(e));
    else
      mpz_mul_2exp(lhs.get_mpz_t(), lhs.get_mpz_t(), static_cast<mp_bitcnt_t>(-e));
    return lhs >= rhs;
  };
  if (!at_least_pow2(k)) --k;
  if (at_least_pow2(k + 1)) ++k;
  return k;
}

}  // namespace encert
