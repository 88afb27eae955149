#include "encert/checker.hpp"

#include <algorithm>
#include <set>

namespace encert {

namespace {

// ---- checker-local arithmetic over dyadics -------------------------------
// Exact interval steps reuse only the closed dyadic operations; division is
// validated by cross-multiplication and square roots by squaring, so no
// inexact operation appears anywhere below.

Dyadic pow2(std::int64_t e) { return Dyadic::pow2(e); }

// Correct rounding re-evaluated from scratch: quantize the mantissa on the
// grid of the argument's binade.
Dyadic chk_round(const Dyadic &x, const Format &f) {
  if (x.is_zero()) return x;
  std::int64_t binade = static_cast<std::int64_t>(x.mantissa_bits()) - 1 + x.exponent();
  std::int64_t g = f.is_fixed() ? f.min_exp : std::max(f.min_exp, binade - f.precision + 1);
  if (x.exponent() >= g) return x;
  mp_bitcnt_t k = static_cast<mp_bitcnt_t>(g - x.exponent());
  mpz_class down, rem;
  mpz_fdiv_q_2exp(down.get_mpz_t(), x.mantissa().get_mpz_t(), k);
  mpz_fdiv_r_2exp(rem.get_mpz_t(), x.mantissa().get_mpz_t(), k);
  if (rem == 0) return Dyadic(down, g);
  mpz_class up = down + 1;
  bool positive = x.sign() > 0;
  bool down_odd = mpz_odd_p(down.get_mpz_t()) != 0;
  auto take = [&](bool use_up) { return Dyadic(use_up ? up : down, g); };
  switch (f.dir) {
    case RoundDir::dn: return take(false);
    case RoundDir::up: return take(true);
    case RoundDir::zr: return take(!positive);
    case RoundDir::aw: return take(positive);
    case RoundDir::od: return take(down_odd ? false : true);
    default: break;
  }
  mpz_class doubled = rem << 1;
  mpz_class step;
  mpz_ui_pow_ui(step.get_mpz_t(), 2, static_cast<unsigned long>(k));
  int c = cmp(doubled, step);
  if (c < 0) return take(false);
  if (c > 0) return take(true);
  switch (f.dir) {
    case RoundDir::ne: return take(down_odd);
    case RoundDir::no: return take(!down_odd);
    case RoundDir::nz: return take(!positive);
    case RoundDir::na: return take(positive);
    case RoundDir::nd: return take(false);
    case RoundDir::nu: return take(true);
    default: return take(false);
  }
}

// Least representable >= x / greatest <= x.
Dyadic chk_ceil_repr(const Dyadic &x, Format f) {
  f.dir = RoundDir::up;
  return chk_round(x, f);
}
Dyadic chk_floor_repr(const Dyadic &x, Format f) {
  f.dir = RoundDir::dn;
  return chk_round(x, f);
}

// x/y inside [lo, up]?  Cross-multiplied; y must be nonzero.
bool quotient_within(const Dyadic &lo, const Dyadic &up, const Dyadic &x, const Dyadic &y) {
  Dyadic ly = lo * y, uy = up * y;
  if (y.sign() > 0) return ly <= x && x <= uy;
  return uy <= x && x <= ly;
}

// The absolute-error enclosure formula, recomputed.
std::optional<Interval> chk_abs_err(const Format &f, std::int64_t info_code,
                                    const Interval *info) {
  int sign = 0;
  if (info && (info_code == kErrInfoBndArg || info_code == kErrInfoBndResult)) {
    bool strict = info_code == kErrInfoBndResult;
    if (strict ? info->lo().sign() > 0 : info->lo().sign() >= 0) sign = 1;
    if (strict ? info->up().sign() < 0 : info->up().sign() <= 0) sign = -1;
  }
  Dyadic h;
  if (f.is_fixed()) {
    h = pow2(f.min_exp);
  } else {
    if (!info) return std::nullopt;
    Dyadic mag = info_code == kErrInfoAbsArg || info_code == kErrInfoAbsResult
                     ? info->up()
                     : std::max(-info->lo(), info->up());
    if (mag.is_zero()) return Interval::singleton(Dyadic());
    std::int64_t big = static_cast<std::int64_t>(mag.mantissa_bits()) + mag.exponent();
    h = pow2(std::max(f.min_exp, big - f.precision));
  }
  Dyadic zero;
  switch (f.dir) {
    case RoundDir::dn: return Interval(-h, zero);
    case RoundDir::up: return Interval(zero, h);
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
    default:
      return Interval(-h.scaled_pow2(-1), h.scaled_pow2(-1));
  }
}

std::optional<Interval> chk_rel_err(const Format &f, std::int64_t info_code,
                                    const Interval &info) {
  if (!f.is_float()) return std::nullopt;
  bool on_result = info_code == kErrInfoBndResult || info_code == kErrInfoAbsResult;
  bool is_abs = info_code == kErrInfoAbsArg || info_code == kErrInfoAbsResult;
  Dyadic threshold = pow2(f.min_exp + f.precision - (on_result ? 0 : 1));
  Dyadic min_mag;
  int sign = 0;
  if (is_abs) {
    min_mag = info.lo();
  } else {
    if (info.contains_zero()) return std::nullopt;
    sign = info.lo().sign() > 0 ? 1 : -1;
    min_mag = sign > 0 ? info.lo() : -info.up();
  }
  if (min_mag < threshold) return std::nullopt;
  Dyadic zero;
  if (round_dir_is_nearest(f.dir)) {
    Dyadic rn = pow2(-f.precision);
    return Interval(-rn, rn);
  }
  Dyadic r = pow2(1 - f.precision);
  switch (f.dir) {
    case RoundDir::zr: return Interval(-r, zero);
    case RoundDir::aw: return Interval(zero, r);
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
      return std::nullopt;
  }
}

struct RelOpCheck {
  Interval exact;
  Interval value;
  Interval delta;
  bool suppressed = false;
};

RelOpCheck chk_relop(const RelOpSpec &spec, const Interval &a, const Interval &b) {
  RelOpCheck out;
  switch (spec.kind) {
    case RelOpSpec::Kind::add: out.exact = iv_add(a, b); break;
    case RelOpSpec::Kind::sub: out.exact = iv_sub(a, b); break;
    case RelOpSpec::Kind::mul: out.exact = iv_mul(a, b); break;
  }
  Dyadic eps = pow2(-spec.precision);
  out.delta = Interval(-eps, eps);
  Interval one_pm(Dyadic(1) - eps, Dyadic(1) + eps);
  out.value = iv_mul(out.exact, one_pm);
  if (spec.min_exp) {
    Interval mag = iv_abs(out.value);
    if (mag.lo() < pow2(*spec.min_exp)) out.suppressed = true;
  }
  return out;
}

// ---- the checker ----------------------------------------------------------

struct Checker {
  const Certificate &cert;
  const CertSequent &cs;
  std::string *why;

  bool fail(const std::string &m) const {
    if (why) *why = m;
    return false;
  }

  const CertExpr &ex(int i) const { return cert.exprs[static_cast<std::size_t>(i)]; }
  const CertLemma &op(const CertLemma &l, std::size_t i) const {
    return cs.lemmas[l.operands[i]];
  }

  bool bnd_fact_on(const CertLemma &l, std::size_t i, int subject, Interval *out) const {
    if (i >= l.operands.size()) return false;
    const CertLemma &o = op(l, i);
    if (o.concl.kind != Concl::Kind::bnd || o.subject != subject) return false;
    *out = o.concl.iv;
    return true;
  }
  bool abs_fact_on(const CertLemma &l, std::size_t i, int subject, Interval *out) const {
    if (i >= l.operands.size()) return false;
    const CertLemma &o = op(l, i);
    if (o.concl.kind != Concl::Kind::abs || o.subject != subject) return false;
    *out = o.concl.iv;
    return true;
  }

  bool contains(const Interval &big, const Interval &small) const {
    return iv_subset(small, big);
  }

  bool validate(const CertLemma &l) const;
  bool validate_rewrite(const CertLemma &l) const;
  bool validate_merge(const CertLemma &l, std::size_t self) const;
};

bool Checker::validate_rewrite(const CertLemma &l) const {
  if (l.concl.kind != Concl::Kind::bnd) return fail("rewrite concludes a range");
  if (l.thm == Thm::user_rewrite) {
    if (l.aux < 0 || static_cast<std::size_t>(l.aux) >= cert.user_rules.size())
      return fail("user rule index out of range");
    const CertUserRule &r = cert.user_rules[static_cast<std::size_t>(l.aux)];
    if (l.subject != r.lhs) return fail("user rewrite subject mismatch");
    Interval j;
    if (!bnd_fact_on(l, 0, r.rhs, &j)) return fail("user rewrite needs a fact on its right side");
    if (!contains(l.concl.iv, j)) return fail("user rewrite enclosure too narrow");
    return true;
  }
  const auto &rules = builtin_rules();
  if (l.aux < 0 || static_cast<std::size_t>(l.aux) >= rules.size())
    return fail("rule index out of range");
  const RewriteRule &rule = rules[static_cast<std::size_t>(l.aux)];
  if (l.args.size() != 9) return fail("rewrite binding record malformed");

  // Instantiate both patterns inside a scratch arena built from the table
  // and compare node identities with the claimed subject and right side.
  ExprArena scratch;
  std::vector<NodeId> map(cert.exprs.size(), kNoNode);
  for (std::size_t i = 0; i < cert.exprs.size(); ++i) {
    const CertExpr &e = cert.exprs[i];
    switch (e.kind) {
      case NodeKind::constant: map[i] = scratch.constant(e.constant); break;
      case NodeKind::variable: map[i] = scratch.variable(e.var_name); break;
      case NodeKind::neg: map[i] = scratch.neg(map[e.child[0]]); break;
      case NodeKind::abs: map[i] = scratch.abs(map[e.child[0]]); break;
      case NodeKind::sqrt: map[i] = scratch.sqrt(map[e.child[0]]); break;
      case NodeKind::add: map[i] = scratch.add(map[e.child[0]], map[e.child[1]]); break;
      case NodeKind::sub: map[i] = scratch.sub(map[e.child[0]], map[e.child[1]]); break;
      case NodeKind::mul: map[i] = scratch.mul(map[e.child[0]], map[e.child[1]]); break;
      case NodeKind::div: map[i] = scratch.div(map[e.child[0]], map[e.child[1]]); break;
      case NodeKind::fma:
        map[i] = scratch.fma(map[e.child[0]], map[e.child[1]], map[e.child[2]]);
        break;
      case NodeKind::round: map[i] = scratch.round(*e.fmt, map[e.child[0]]); break;
      case NodeKind::rel_round:
        map[i] = scratch.rel_round(*e.rel, map[e.child[0]], map[e.child[1]]);
        break;
    }
  }
  Binding b;
  for (int i = 0; i < 4; ++i) {
    b.lower[i] = l.args[1 + i] < 0 ? kNoNode : map[l.args[1 + i]];
    b.upper[i] = l.args[5 + i] < 0 ? kNoNode : map[l.args[5 + i]];
  }
  NodeId before = instantiate(scratch, rule, rule.before, b);
  NodeId after = instantiate(scratch, rule, rule.after, b);
  if (l.subject < 0 || before != map[l.subject]) return fail("rewrite left side mismatch");
  if (l.args[0] < 0 || after != map[l.args[0]]) return fail("rewrite right side mismatch");

  Interval j;
  if (!bnd_fact_on(l, 0, l.args[0], &j)) return fail("rewrite needs a fact on its right side");
  if (!contains(l.concl.iv, j)) return fail("rewrite enclosure too narrow");

  // Guards: syntactic ones re-checked structurally, semantic ones against
  // the cited operand facts (in rule-condition order).
  std::size_t next_op = 1;
  for (const RuleCond &c : rule.conds) {
    switch (c.kind) {
      case RuleCond::Kind::distinct: {
        if (instantiate(scratch, rule, c.t1, b) == instantiate(scratch, rule, c.t2, b))
          return fail("distinctness guard violated");
        break;
      }
      case RuleCond::Kind::not_const_one: {
        NodeId t = instantiate(scratch, rule, c.t1, b);
        const Node &n = scratch.at(t);
        if (n.kind == NodeKind::constant && n.constant == 1)
          return fail("literal-one guard violated");
        break;
      }
      default: {
        if (next_op >= l.operands.size()) return fail("missing guard fact");
        const CertLemma &g = op(l, next_op++);
        // The fact must be about the instantiated guard term.
        if (g.subject < 0 || map[g.subject] != instantiate(scratch, rule, c.t1, b))
          return fail("guard fact subject mismatch");
        const Interval &gi = g.concl.iv;
        bool ok = false;
        if (c.kind == RuleCond::Kind::nonzero)
          ok = (g.concl.kind == Concl::Kind::bnd &&
                (gi.lo().sign() > 0 || gi.up().sign() < 0)) ||
               (g.concl.kind == Concl::Kind::abs && gi.lo().sign() > 0);
        else if (c.kind == RuleCond::Kind::nonneg)
          ok = g.concl.kind == Concl::Kind::bnd && gi.lo().sign() >= 0;
        else if (c.kind == RuleCond::Kind::positive)
          ok = g.concl.kind == Concl::Kind::bnd && gi.lo().sign() > 0;
        if (!ok) return fail("semantic guard not discharged");
        break;
      }
    }
  }
  return true;
}

bool Checker::validate_merge(const CertLemma &l, std::size_t self) const {
  if (l.concl.kind != Concl::Kind::sequent) return fail("merge concludes a sequent");
  if (l.args.empty() || l.args[0] < 0) return fail("merge needs its axis");
  int axis = l.args[0];
  if (l.params.size() < 2) return fail("merge needs cut points");
  for (std::size_t i = 0; i + 1 < l.params.size(); ++i)
    if (!(l.params[i] < l.params[i + 1])) return fail("merge cuts not increasing");
  if (l.operands.size() != l.params.size())  // range lemma + one proof per tile
    return fail("merge tile count mismatch");
  const CertLemma &range = op(l, 0);
  if (range.concl.kind != Concl::Kind::bnd || range.subject != axis)
    return fail("merge range lemma mismatch");
  if (range.concl.iv.lo() != l.params.front() || range.concl.iv.up() != l.params.back())
    return fail("merge cuts do not cover the axis range");
  for (std::size_t i = 1; i < l.operands.size(); ++i)
    if (op(l, i).concl.kind != Concl::Kind::sequent)
      return fail("merge tile operand does not close a sequent");
  // Every assumption tagged to this merge must state exactly its tile.
  for (std::size_t i = 0; i < cs.lemmas.size(); ++i) {
    const CertLemma &a = cs.lemmas[i];
    if (a.thm != Thm::assume || a.aux2 != static_cast<std::int64_t>(self)) continue;
    if (a.aux < 0 || a.aux + 2 > static_cast<std::int64_t>(l.params.size()))
      return fail("assumption tile index out of range");
    if (a.subject != axis) return fail("assumption is not about the merge axis");
    if (a.concl.kind != Concl::Kind::bnd ||
        a.concl.iv != Interval(l.params[static_cast<std::size_t>(a.aux)],
                               l.params[static_cast<std::size_t>(a.aux) + 1]))
      return fail("assumption does not match its tile");
  }
  return true;
}

bool Checker::validate(const CertLemma &l) const {
  // Magnitude conclusions are nonnegative by definition.
  if (l.concl.kind == Concl::Kind::abs && l.concl.iv.lo().sign() < 0)
    return fail("magnitude conclusion below zero");

  auto subject_is = [&](NodeKind k) { return l.subject >= 0 && ex(l.subject).kind == k; };
  auto child = [&](int i) { return ex(l.subject).child[i]; };

  switch (l.thm) {
    case Thm::hyp: {
      if (l.aux < 0 || static_cast<std::size_t>(l.aux) >= cs.hyps.size())
        return fail("hypothesis index out of range");
      const CertHyp &h = cs.hyps[static_cast<std::size_t>(l.aux)];
      if (h.kind != PropAtom::Kind::in_range) return fail("hypothesis is not a range");
      if (l.subject != h.subject) return fail("hypothesis subject mismatch");
      if (l.concl.kind != Concl::Kind::bnd || !contains(l.concl.iv, h.outer))
        return fail("hypothesis conclusion narrower than stated");
      return true;
    }
    case Thm::assume:
      return l.concl.kind == Concl::Kind::bnd || fail("assumption concludes a range");
    case Thm::constant: {
      if (!subject_is(NodeKind::constant)) return fail("constant lemma on a non-constant");
      const Rational &v = ex(l.subject).constant;
      if (l.concl.kind != Concl::Kind::bnd) return fail("constant concludes a range");
      if (Dyadic::compare_rational(l.concl.iv.lo(), v) > 0 ||
          Dyadic::compare_rational(l.concl.iv.up(), v) < 0)
        return fail("constant outside its enclosure");
      return true;
    }
    case Thm::fix_singleton: {
      Interval j;
      if (!bnd_fact_on(l, 0, l.subject, &j) || !j.is_singleton())
        return fail("needs a singleton enclosure");
      if (l.concl.kind != Concl::Kind::fix) return fail("concludes fix");
      if (!j.lo().is_zero() && l.concl.num > j.lo().exponent())
        return fail("fixed-point exponent too large");
      return true;
    }
    case Thm::flt_singleton: {
      Interval j;
      if (!bnd_fact_on(l, 0, l.subject, &j) || !j.is_singleton())
        return fail("needs a singleton enclosure");
      if (l.concl.kind != Concl::Kind::flt || l.concl.num < 1) return fail("concludes flt");
      if (!j.lo().is_zero() &&
          l.concl.num < static_cast<std::int64_t>(j.lo().mantissa_bits()))
        return fail("precision claim too small");
      return true;
    }
    case Thm::neg_bnd: {
      Interval j;
      if (!subject_is(NodeKind::neg) || !bnd_fact_on(l, 0, child(0), &j))
        return fail("negation row malformed");
      return contains(l.concl.iv, iv_neg(j)) || fail("negation enclosure too narrow");
    }
    case Thm::add_bnd:
    case Thm::sub_bnd: {
      bool is_sub = l.thm == Thm::sub_bnd;
      if (!subject_is(is_sub ? NodeKind::sub : NodeKind::add)) return fail("row/shape mismatch");
      Interval j, k;
      if (!bnd_fact_on(l, 0, child(0), &j) || !bnd_fact_on(l, 1, child(1), &k))
        return fail("missing operand facts");
      Interval r = is_sub ? iv_sub(j, k) : iv_add(j, k);
      return contains(l.concl.iv, r) || fail("sum enclosure too narrow");
    }
    case Thm::mul_bnd: {
      Interval j, k;
      if (!subject_is(NodeKind::mul) || !bnd_fact_on(l, 0, child(0), &j) ||
          !bnd_fact_on(l, 1, child(1), &k))
        return fail("product row malformed");
      return contains(l.concl.iv, iv_mul(j, k)) || fail("product enclosure too narrow");
    }
    case Thm::div_bnd: {
      Interval j, k;
      if (!subject_is(NodeKind::div) || !bnd_fact_on(l, 0, child(0), &j) ||
          !bnd_fact_on(l, 1, child(1), &k))
        return fail("quotient row malformed");
      if (k.contains_zero()) return fail("divisor range contains zero");
      for (const Dyadic &x : {j.lo(), j.up()})
        for (const Dyadic &y : {k.lo(), k.up()})
          if (!quotient_within(l.concl.iv.lo(), l.concl.iv.up(), x, y))
            return fail("quotient enclosure too narrow");
      return true;
    }
    case Thm::sqrt_bnd: {
      Interval j;
      if (!subject_is(NodeKind::sqrt) || !bnd_fact_on(l, 0, child(0), &j))
        return fail("root row malformed");
      if (j.lo().sign() < 0) return fail("root of a range below zero");
      const Interval &c = l.concl.iv;
      if (c.up().sign() < 0) return fail("root enclosure below zero");
      if (c.lo().sign() > 0 && c.lo() * c.lo() > j.lo()) return fail("root lower bound too high");
      if (c.up() * c.up() < j.up()) return fail("root upper bound too low");
      return true;
    }
    case Thm::abs_bnd: {
      Interval j;
      if (!subject_is(NodeKind::abs) || !bnd_fact_on(l, 0, child(0), &j))
        return fail("absolute-value row malformed");
      return contains(l.concl.iv, iv_abs(j)) || fail("absolute enclosure too narrow");
    }
    case Thm::fma_bnd: {
      Interval j, k, m;
      if (!subject_is(NodeKind::fma) || !bnd_fact_on(l, 0, child(0), &j) ||
          !bnd_fact_on(l, 1, child(1), &k) || !bnd_fact_on(l, 2, child(2), &m))
        return fail("fma row malformed");
      return contains(l.concl.iv, iv_add(iv_mul(j, k), m)) || fail("fma enclosure too narrow");
    }
    case Thm::sub_self:
      if (!subject_is(NodeKind::sub) || child(0) != child(1)) return fail("not x - x");
      return l.concl.iv.contains(Dyadic()) || fail("zero not inside");
    case Thm::div_self: {
      Interval j;
      if (!subject_is(NodeKind::div) || child(0) != child(1)) return fail("not x / x");
      if (!abs_fact_on(l, 0, child(0), &j) || j.lo().sign() <= 0)
        return fail("x/x needs |x| > 0");
      return l.concl.iv.contains(Dyadic(1)) || fail("one not inside");
    }
    case Thm::mul_self: {
      Interval j;
      if (!subject_is(NodeKind::mul) || child(0) != child(1) || !bnd_fact_on(l, 0, child(0), &j))
        return fail("not x * x");
      Interval a = iv_abs(j);
      return contains(l.concl.iv, iv_mul(a, a)) || fail("square enclosure too narrow");
    }
    case Thm::rel_compose: {
      if (l.args.size() != 2 || l.args[0] < 0 || l.args[1] < 0) return fail("missing operands");
      int x = l.args[0], y = l.args[1];
      bool shape_ok = false;
      if (subject_is(NodeKind::add)) {
        const CertExpr &lhs = ex(child(0)), &rhs = ex(child(1));
        if (lhs.kind == NodeKind::add && rhs.kind == NodeKind::mul && lhs.child[0] == x &&
            lhs.child[1] == y &&
            ((rhs.child[0] == x && rhs.child[1] == y) || (rhs.child[0] == y && rhs.child[1] == x)))
          shape_ok = true;
        if (rhs.kind == NodeKind::add && child(0) == x && rhs.child[0] == y) {
          const CertExpr &inner = ex(rhs.child[1]);
          if (inner.kind == NodeKind::mul &&
              ((inner.child[0] == x && inner.child[1] == y) ||
               (inner.child[0] == y && inner.child[1] == x)))
            shape_ok = true;
        }
      }
      if (!shape_ok) return fail("not shaped a + b + a*b");
      Interval j, k;
      if (!bnd_fact_on(l, 0, x, &j) || !bnd_fact_on(l, 1, y, &k))
        return fail("missing operand facts");
      Dyadic minus_one(-1);
      if (j.lo() < minus_one || k.lo() < minus_one) return fail("operands must be >= -1");
      Dyadic lo = j.lo() + k.lo() + j.lo() * k.lo();
      Dyadic up = j.up() + k.up() + j.up() * k.up();
      return contains(l.concl.iv, Interval(lo, up)) || fail("composition enclosure too narrow");
    }
    case Thm::round_bnd: {
      Interval j;
      if (!subject_is(NodeKind::round) || !bnd_fact_on(l, 0, child(0), &j))
        return fail("rounding row malformed");
      const Format &f = *ex(l.subject).fmt;
      Interval r(chk_round(j.lo(), f), chk_round(j.up(), f));
      return contains(l.concl.iv, r) || fail("rounded enclosure too narrow");
    }
    case Thm::round_clip: {
      Interval j;
      if (!subject_is(NodeKind::round) || !bnd_fact_on(l, 0, l.subject, &j))
        return fail("clip row malformed");
      const Format &f = *ex(l.subject).fmt;
      Dyadic lo = chk_ceil_repr(j.lo(), f), up = chk_floor_repr(j.up(), f);
      if (up < lo) return fail("no representable value in range");
      return contains(l.concl.iv, Interval(lo, up)) || fail("clip enclosure too narrow");
    }
    case Thm::round_fix: {
      if (!subject_is(NodeKind::round) || l.concl.kind != Concl::Kind::fix)
        return fail("fix row malformed");
      return l.concl.num <= ex(l.subject).fmt->min_exp || fail("fixed exponent too large");
    }
    case Thm::round_flt: {
      if (!subject_is(NodeKind::round) || l.concl.kind != Concl::Kind::flt)
        return fail("flt row malformed");
      const Format &f = *ex(l.subject).fmt;
      if (!f.is_float()) return fail("fixed formats do not bound the mantissa");
      return l.concl.num >= f.precision || fail("precision claim too small");
    }
    case Thm::err_abs:
    case Thm::err_rel: {
      // subject: rnd(a) - a, or (rnd(a) - a)/a.
      int diff = l.subject;
      if (l.thm == Thm::err_rel) {
        if (!subject_is(NodeKind::div)) return fail("relative error is a quotient");
        diff = ex(l.subject).child[0];
        if (ex(diff).kind != NodeKind::sub || ex(diff).child[1] != ex(l.subject).child[1])
          return fail("relative error shape mismatch");
      } else if (!subject_is(NodeKind::sub)) {
        return fail("absolute error is a difference");
      }
      int rounded = ex(diff).child[0], arg = ex(diff).child[1];
      if (ex(rounded).kind != NodeKind::round || ex(rounded).child[0] != arg)
        return fail("error shape mismatch");
      const Format &f = *ex(rounded).fmt;
      Interval info;
      const Interval *info_ptr = nullptr;
      if (l.aux != kErrInfoNone) {
        int who = l.aux == kErrInfoBndArg || l.aux == kErrInfoAbsArg ? arg : rounded;
        bool abs_kind = l.aux == kErrInfoAbsArg || l.aux == kErrInfoAbsResult;
        bool ok = abs_kind ? abs_fact_on(l, 0, who, &info) : bnd_fact_on(l, 0, who, &info);
        if (!ok) return fail("error info fact missing");
        info_ptr = &info;
      }
      std::optional<Interval> enc = l.thm == Thm::err_abs
                                        ? chk_abs_err(f, l.aux, info_ptr)
                                        : (info_ptr ? chk_rel_err(f, l.aux, *info_ptr)
                                                    : std::nullopt);
      if (!enc) return fail("error operator undefined here");
      return contains(l.concl.iv, *enc) || fail("error enclosure too narrow");
    }
    case Thm::round_exact: {
      if (!subject_is(NodeKind::sub)) return fail("exactness is about a difference");
      int rounded = child(0), arg = child(1);
      if (ex(rounded).kind != NodeKind::round || ex(rounded).child[0] != arg)
        return fail("exactness shape mismatch");
      const Format &f = *ex(rounded).fmt;
      if (l.operands.empty()) return fail("exactness needs fixed/float facts");
      const CertLemma &fx = op(l, 0);
      if (fx.concl.kind != Concl::Kind::fix || fx.subject != arg || fx.concl.num < f.min_exp)
        return fail("fixed-point premise fails");
      if (f.is_float()) {
        if (l.operands.size() < 2) return fail("float exactness needs a precision fact");
        const CertLemma &ft = op(l, 1);
        if (ft.concl.kind != Concl::Kind::flt || ft.subject != arg ||
            ft.concl.num > f.precision)
          return fail("precision premise fails");
      }
      return l.concl.iv.contains(Dyadic()) || fail("zero not inside");
    }
    case Thm::relop_bnd: {
      Interval j, k;
      if (!subject_is(NodeKind::rel_round) || !bnd_fact_on(l, 0, child(0), &j) ||
          !bnd_fact_on(l, 1, child(1), &k))
        return fail("under-specified row malformed");
      RelOpCheck rc = chk_relop(*ex(l.subject).rel, j, k);
      if (rc.suppressed) return fail("result magnitude below the minimum exponent");
      return contains(l.concl.iv, rc.value) || fail("enclosure too narrow");
    }
    case Thm::relop_abs_err:
    case Thm::relop_rel_err: {
      int diff = l.subject;
      if (l.thm == Thm::relop_rel_err) {
        if (!subject_is(NodeKind::div)) return fail("relative error is a quotient");
        diff = ex(l.subject).child[0];
        if (ex(diff).kind != NodeKind::sub || ex(diff).child[1] != ex(l.subject).child[1])
          return fail("relative error shape mismatch");
      } else if (!subject_is(NodeKind::sub)) {
        return fail("absolute error is a difference");
      }
      int u = ex(diff).child[0], v = ex(diff).child[1];
      if (ex(u).kind != NodeKind::rel_round) return fail("not an under-specified result");
      const RelOpSpec &spec = *ex(u).rel;
      NodeKind want = spec.kind == RelOpSpec::Kind::add
                          ? NodeKind::add
                          : spec.kind == RelOpSpec::Kind::sub ? NodeKind::sub : NodeKind::mul;
      if (ex(v).kind != want || ex(v).child[0] != ex(u).child[0] ||
          ex(v).child[1] != ex(u).child[1])
        return fail("exact counterpart mismatch");
      Interval j, k;
      if (!bnd_fact_on(l, 0, ex(u).child[0], &j) || !bnd_fact_on(l, 1, ex(u).child[1], &k))
        return fail("missing operand facts");
      RelOpCheck rc = chk_relop(spec, j, k);
      if (rc.suppressed) return fail("result magnitude below the minimum exponent");
      if (l.thm == Thm::relop_abs_err)
        return contains(l.concl.iv, iv_mul(rc.exact, rc.delta)) ||
               fail("error enclosure too narrow");
      if (rc.exact.contains_zero()) return fail("relative error undefined around zero");
      return contains(l.concl.iv, rc.delta) || fail("error enclosure too narrow");
    }
    case Thm::abs_neg:
    case Thm::abs_abs: {
      NodeKind want = l.thm == Thm::abs_neg ? NodeKind::neg : NodeKind::abs;
      Interval j;
      if (!subject_is(want) || !abs_fact_on(l, 0, child(0), &j)) return fail("row malformed");
      return contains(l.concl.iv, j) || fail("magnitude enclosure too narrow");
    }
    case Thm::abs_sqrt: {
      Interval j;
      if (!subject_is(NodeKind::sqrt) || !abs_fact_on(l, 0, child(0), &j))
        return fail("row malformed");
      const Interval &c = l.concl.iv;
      if (c.lo().sign() > 0 && c.lo() * c.lo() > j.lo()) return fail("root lower bound too high");
      if (c.up() * c.up() < j.up()) return fail("root upper bound too low");
      return true;
    }
    case Thm::abs_addsub: {
      Interval j, k;
      if ((!subject_is(NodeKind::add) && !subject_is(NodeKind::sub)) ||
          !abs_fact_on(l, 0, child(0), &j) || !abs_fact_on(l, 1, child(1), &k))
        return fail("row malformed");
      Interval r = iv_hull(iv_abs(iv_sub(j, k)), iv_add(j, k));
      return contains(l.concl.iv, r) || fail("magnitude enclosure too narrow");
    }
    case Thm::abs_mul: {
      Interval j, k;
      if (!subject_is(NodeKind::mul) || !abs_fact_on(l, 0, child(0), &j) ||
          !abs_fact_on(l, 1, child(1), &k))
        return fail("row malformed");
      return contains(l.concl.iv, iv_mul(j, k)) || fail("magnitude enclosure too narrow");
    }
    case Thm::abs_div: {
      Interval j, k;
      if (!subject_is(NodeKind::div) || !abs_fact_on(l, 0, child(0), &j) ||
          !abs_fact_on(l, 1, child(1), &k))
        return fail("row malformed");
      if (k.lo().sign() <= 0) return fail("divisor magnitude not positive");
      for (const Dyadic &x : {j.lo(), j.up()})
        for (const Dyadic &y : {k.lo(), k.up()})
          if (!quotient_within(l.concl.iv.lo(), l.concl.iv.up(), x, y))
            return fail("magnitude quotient too narrow");
      return true;
    }
    case Thm::abs_of_bnd: {
      Interval j;
      if (!bnd_fact_on(l, 0, l.subject, &j)) return fail("row malformed");
      return contains(l.concl.iv, iv_abs(j)) || fail("magnitude enclosure too narrow");
    }
    case Thm::bnd_of_abs: {
      Interval j;
      if (!abs_fact_on(l, 0, l.subject, &j)) return fail("row malformed");
      return contains(l.concl.iv, Interval(-j.up(), j.up())) || fail("enclosure too narrow");
    }
    case Thm::bnd_abs_refine: {
      Interval j, k;
      if (!bnd_fact_on(l, 0, l.subject, &j) || !abs_fact_on(l, 1, l.subject, &k))
        return fail("row malformed");
      Interval both = iv_hull(iv_intersect(j, k), iv_intersect(j, iv_neg(k)));
      if (both.is_empty()) return fail("refinement is empty (contradiction row applies)");
      return contains(l.concl.iv, both) || fail("refined enclosure too narrow");
    }
    case Thm::abs_node_of_abs: {
      Interval j;
      if (!subject_is(NodeKind::abs) || !abs_fact_on(l, 0, child(0), &j))
        return fail("row malformed");
      return contains(l.concl.iv, j) || fail("enclosure too narrow");
    }
    case Thm::abs_of_abs_node: {
      // ABS(a) from BND(|a|): the operand's subject is the abs node.
      if (l.operands.empty()) return fail("row malformed");
      const CertLemma &o = op(l, 0);
      if (o.concl.kind != Concl::Kind::bnd || o.subject < 0) return fail("row malformed");
      const CertExpr &an = ex(o.subject);
      if (an.kind != NodeKind::abs || an.child[0] != l.subject) return fail("row malformed");
      Interval expected = iv_intersect(o.concl.iv, Interval(Dyadic(), std::max(o.concl.iv.up(), Dyadic())));
      if (expected.is_empty()) return fail("magnitude range below zero");
      return contains(l.concl.iv, expected) || fail("magnitude enclosure too narrow");
    }
    case Thm::fix_addsub:
    case Thm::fix_mul: {
      if (!subject_is(l.thm == Thm::fix_mul ? NodeKind::mul : NodeKind::add) &&
          !(l.thm == Thm::fix_addsub && subject_is(NodeKind::sub)))
        return fail("row/shape mismatch");
      if (l.operands.size() != 2) return fail("needs two fixed facts");
      const CertLemma &a = op(l, 0), &b = op(l, 1);
      if (a.concl.kind != Concl::Kind::fix || b.concl.kind != Concl::Kind::fix ||
          a.subject != child(0) || b.subject != child(1))
        return fail("fixed facts mismatch");
      std::int64_t bound = l.thm == Thm::fix_mul ? a.concl.num + b.concl.num
                                                 : std::min(a.concl.num, b.concl.num);
      return (l.concl.kind == Concl::Kind::fix && l.concl.num <= bound) ||
             fail("fixed exponent too large");
    }
    case Thm::flt_mul: {
      if (!subject_is(NodeKind::mul) || l.operands.size() != 2) return fail("row malformed");
      const CertLemma &a = op(l, 0), &b = op(l, 1);
      if (a.concl.kind != Concl::Kind::flt || b.concl.kind != Concl::Kind::flt ||
          a.subject != child(0) || b.subject != child(1))
        return fail("precision facts mismatch");
      return (l.concl.kind == Concl::Kind::flt && l.concl.num >= a.concl.num + b.concl.num) ||
             fail("precision claim too small");
    }
    case Thm::fix_of_flt_abs: {
      if (l.operands.size() != 2) return fail("row malformed");
      const CertLemma &q = op(l, 0);
      Interval j;
      if (q.concl.kind != Concl::Kind::flt || q.subject != l.subject ||
          !abs_fact_on(l, 1, l.subject, &j))
        return fail("premises mismatch");
      if (j.lo().sign() <= 0) return fail("needs a positive magnitude");
      // e <= 1 + log2(lo) - q  <=>  2^(e-1+q) <= lo
      return (l.concl.kind == Concl::Kind::fix &&
              pow2(l.concl.num - 1 + q.concl.num) <= j.lo()) ||
             fail("fixed exponent too large");
    }
    case Thm::flt_of_fix_abs: {
      if (l.operands.size() != 2) return fail("row malformed");
      const CertLemma &e = op(l, 0);
      Interval j;
      if (e.concl.kind != Concl::Kind::fix || e.subject != l.subject ||
          !abs_fact_on(l, 1, l.subject, &j))
        return fail("premises mismatch");
      if (l.concl.kind != Concl::Kind::flt || l.concl.num < 1) return fail("concludes flt");
      if (j.up().is_zero()) return true;  // the value is zero
      // p >= 1 + log2(up) - e  <=>  2^(p-1+e) >= up
      return pow2(l.concl.num - 1 + e.concl.num) >= j.up() || fail("precision claim too small");
    }
    case Thm::intersect: {
      if (l.operands.size() != 2) return fail("row malformed");
      const CertLemma &a = op(l, 0), &b = op(l, 1);
      if (a.subject != l.subject || b.subject != l.subject || a.concl.kind != l.concl.kind ||
          b.concl.kind != l.concl.kind)
        return fail("intersection operands mismatch");
      Interval inter = iv_intersect(a.concl.iv, b.concl.iv);
      if (inter.is_empty()) return fail("intersection is empty (contradiction row applies)");
      return contains(l.concl.iv, inter) || fail("intersection too narrow");
    }
    case Thm::hyp_halfline: {
      Interval j;
      if (!bnd_fact_on(l, 0, l.subject, &j)) return fail("row malformed");
      if (l.aux < 0 || static_cast<std::size_t>(l.aux) >= cs.hyps.size())
        return fail("hypothesis index out of range");
      const CertHyp &h = cs.hyps[static_cast<std::size_t>(l.aux)];
      if (h.subject != l.subject) return fail("hypothesis subject mismatch");
      Interval expected;
      if (h.kind == PropAtom::Kind::le) {
        if (h.bound < j.lo()) return fail("refinement is empty (contradiction row applies)");
        expected = Interval(j.lo(), std::min(j.up(), h.bound));
      } else if (h.kind == PropAtom::Kind::ge) {
        if (h.bound > j.up()) return fail("refinement is empty (contradiction row applies)");
        expected = Interval(std::max(j.lo(), h.bound), j.up());
      } else {
        return fail("hypothesis is not one-sided");
      }
      return contains(l.concl.iv, expected) || fail("refined enclosure too narrow");
    }
    case Thm::rewrite_rule:
    case Thm::user_rewrite:
      return validate_rewrite(l);
    case Thm::contradiction: {
      if (l.operands.size() == 2) {
        const CertLemma &a = op(l, 0), &b = op(l, 1);
        if (a.subject != b.subject) return fail("contradiction subjects differ");
        if (a.concl.kind == Concl::Kind::bnd && b.concl.kind == Concl::Kind::bnd)
          return iv_intersect(a.concl.iv, b.concl.iv).is_empty() || fail("ranges overlap");
        if (a.concl.kind == Concl::Kind::abs && b.concl.kind == Concl::Kind::abs)
          return iv_intersect(a.concl.iv, b.concl.iv).is_empty() || fail("ranges overlap");
        const CertLemma *bn = a.concl.kind == Concl::Kind::bnd ? &a : &b;
        const CertLemma *ab = a.concl.kind == Concl::Kind::abs ? &a : &b;
        if (bn->concl.kind != Concl::Kind::bnd || ab->concl.kind != Concl::Kind::abs)
          return fail("contradiction needs range facts");
        Interval both = iv_hull(iv_intersect(bn->concl.iv, ab->concl.iv),
                                iv_intersect(bn->concl.iv, iv_neg(ab->concl.iv)));
        return both.is_empty() || fail("range and magnitude are compatible");
      }
      if (l.operands.size() == 1 && l.aux >= 0) {
        const CertLemma &a = op(l, 0);
        if (static_cast<std::size_t>(l.aux) >= cs.hyps.size())
          return fail("hypothesis index out of range");
        const CertHyp &h = cs.hyps[static_cast<std::size_t>(l.aux)];
        if (a.subject != h.subject || a.concl.kind != Concl::Kind::bnd)
          return fail("contradiction operand mismatch");
        if (h.kind == PropAtom::Kind::le) return h.bound < a.concl.iv.lo() || fail("compatible");
        if (h.kind == PropAtom::Kind::ge) return h.bound > a.concl.iv.up() || fail("compatible");
        return fail("hypothesis is not one-sided");
      }
      if (l.operands.size() == 1) {
        const CertLemma &a = op(l, 0);
        if (a.concl.kind != Concl::Kind::bnd || a.subject != l.subject ||
            !subject_is(NodeKind::round))
          return fail("contradiction operand mismatch");
        const Format &f = *ex(l.subject).fmt;
        return chk_ceil_repr(a.concl.iv.lo(), f) > chk_floor_repr(a.concl.iv.up(), f) ||
               fail("a representable value exists in range");
      }
      return fail("contradiction needs operands");
    }
    case Thm::goal_atom: {
      if (l.concl.kind != Concl::Kind::goal || l.concl.num < 0 ||
          static_cast<std::size_t>(l.concl.num) >= cs.goals.size())
        return fail("goal index out of range");
      const CertGoal &g = cs.goals[static_cast<std::size_t>(l.concl.num)];
      Interval j;
      if (!bnd_fact_on(l, 0, g.subject, &j)) return fail("goal fact missing");
      switch (g.kind) {
        case PropAtom::Kind::in_range:
          if (Dyadic::compare_rational(g.inner.lo(), g.lo) < 0 ||
              Dyadic::compare_rational(g.inner.up(), g.hi) > 0)
            return fail("inner goal interval is not inward");
          return contains(g.inner, j) || fail("goal range not established");
        case PropAtom::Kind::le:
          if (Dyadic::compare_rational(g.inner.up(), g.hi) > 0)
            return fail("inner goal bound is not inward");
          return j.up() <= g.inner.up() || fail("upper goal bound not established");
        case PropAtom::Kind::ge:
          if (Dyadic::compare_rational(g.inner.lo(), g.lo) < 0)
            return fail("inner goal bound is not inward");
          return j.lo() >= g.inner.lo() || fail("lower goal bound not established");
        case PropAtom::Kind::query:
          return contains(g.answer, j) || fail("answer does not cover the proven range");
      }
      return fail("unknown goal kind");
    }
    case Thm::goal_false: {
      if (l.operands.size() != 1 || op(l, 0).concl.kind != Concl::Kind::falsum)
        return fail("vacuous goal needs a contradiction");
      return true;
    }
    case Thm::qed: {
      if (l.concl.kind != Concl::Kind::sequent) return fail("qed concludes a sequent");
      if (l.operands.size() != 1 || op(l, 0).concl.kind != Concl::Kind::goal)
        return fail("qed needs a goal lemma");
      return true;
    }
    case Thm::merge: {
      // The caller passes the lemma's own index through validate_merge.
      return fail("merge validated separately");
    }
  }
  return fail("unknown theorem");
}

}  // namespace

bool check_lemma(const Certificate &cert, std::size_t seq_idx, std::size_t lemma_idx,
                 std::string *why) {
  const CertSequent &cs = cert.sequents[seq_idx];
  Checker ch{cert, cs, why};
  const CertLemma &l = cs.lemmas[lemma_idx];
  if (l.thm == Thm::merge) return ch.validate_merge(l, lemma_idx);
  return ch.validate(l);
}

CheckReport check(const Certificate &cert) {
  CheckReport rep;
  rep.assumed_rules = cert.assumed_rule_count();

  // Structural pass.
  for (std::size_t k = 0; k < cert.sequents.size(); ++k) {
    const CertSequent &cs = cert.sequents[k];
    auto structural_fail = [&](std::size_t i, const std::string &m) {
      rep.failed_sequent = static_cast<int>(k);
      rep.failed_lemma = static_cast<int>(i);
      rep.message = m;
      return rep;
    };
    for (std::size_t i = 0; i < cs.lemmas.size(); ++i) {
      const CertLemma &l = cs.lemmas[i];
      for (std::uint32_t o : l.operands)
        if (o >= i) return structural_fail(i, "operand does not precede its lemma");
      if (l.subject >= static_cast<int>(cert.exprs.size()))
        return structural_fail(i, "subject out of range");
      for (int a : l.args)
        if (a >= static_cast<int>(cert.exprs.size()))
          return structural_fail(i, "expression argument out of range");
      if (l.thm == Thm::assume && l.aux2 >= 0 &&
          (static_cast<std::size_t>(l.aux2) >= cs.lemmas.size() ||
           cs.lemmas[static_cast<std::size_t>(l.aux2)].thm != Thm::merge))
        return structural_fail(i, "assumption tag does not name a merge");
    }
    if (cs.final_step >= cs.lemmas.size())
      return structural_fail(0, "final step out of range");
    if (cs.lemmas[cs.final_step].concl.kind != Concl::Kind::sequent)
      return structural_fail(cs.final_step, "final step does not close the sequent");
    // Hypothesis outwardness: the dyadic readings may only weaken the
    // stated bounds.
    for (std::size_t i = 0; i < cs.hyps.size(); ++i) {
      const CertHyp &h = cs.hyps[i];
      bool ok = true;
      if (h.kind == PropAtom::Kind::in_range)
        ok = Dyadic::compare_rational(h.outer.lo(), h.lo) <= 0 &&
             Dyadic::compare_rational(h.outer.up(), h.hi) >= 0;
      else if (h.kind == PropAtom::Kind::le)
        ok = Dyadic::compare_rational(h.bound, h.hi) >= 0;
      else if (h.kind == PropAtom::Kind::ge)
        ok = Dyadic::compare_rational(h.bound, h.lo) <= 0;
      if (!ok) return structural_fail(0, "hypothesis reading is not outward");
    }
  }
  rep.structural_ok = true;

  // Side conditions plus assumption-scope discipline.
  for (std::size_t k = 0; k < cert.sequents.size(); ++k) {
    const CertSequent &cs = cert.sequents[k];
    using Scope = std::set<std::pair<std::uint32_t, std::int64_t>>;
    constexpr std::uint32_t kUndischarged = 0xffffffffu;
    std::vector<Scope> scopes(cs.lemmas.size());
    for (std::size_t i = 0; i < cs.lemmas.size(); ++i) {
      const CertLemma &l = cs.lemmas[i];
      std::string why;
      if (!check_lemma(cert, k, i, &why)) {
        rep.failed_sequent = static_cast<int>(k);
        rep.failed_lemma = static_cast<int>(i);
        rep.message = why;
        return rep;
      }
      Scope sc;
      for (std::uint32_t o : l.operands) sc.insert(scopes[o].begin(), scopes[o].end());
      if (l.thm == Thm::assume) {
        if (l.aux2 >= 0)
          sc.insert({static_cast<std::uint32_t>(l.aux2), l.aux});
        else
          sc.insert({kUndischarged, static_cast<std::int64_t>(i)});
      }
      if (l.thm == Thm::merge) {
        std::uint32_t self = static_cast<std::uint32_t>(i);
        // Tile operand i may only depend on assumptions for its own tile.
        for (std::size_t t = 1; t < l.operands.size(); ++t)
          for (const auto &[m, tile] : scopes[l.operands[t]])
            if (m == self && tile != static_cast<std::int64_t>(t - 1)) {
              rep.failed_sequent = static_cast<int>(k);
              rep.failed_lemma = static_cast<int>(i);
              rep.message = "tile proof uses a foreign tile assumption";
              return rep;
            }
        for (auto it = sc.begin(); it != sc.end();)
          it = it->first == self ? sc.erase(it) : std::next(it);
      }
      scopes[i] = std::move(sc);
    }
    if (!scopes[cs.final_step].empty()) {
      rep.failed_sequent = static_cast<int>(k);
      rep.failed_lemma = static_cast<int>(cs.final_step);
      rep.message = "undischarged assumption reaches the conclusion";
      return rep;
    }
  }
  rep.valid = true;
  return rep;
}

}  // namespace encert
