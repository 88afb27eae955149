#include "encert/rewrite.hpp"

namespace encert {

const std::vector<NodeId> ApproxRegistry::kEmpty{};

void ApproxRegistry::add(NodeId approx, NodeId exact) {
  if (approx == exact || contains(approx, exact)) return;
  pairs_.emplace_back(approx, exact);
  by_approx_[approx].push_back(exact);
  by_exact_[exact].push_back(approx);
}

bool ApproxRegistry::contains(NodeId approx, NodeId exact) const {
  auto it = by_approx_.find(approx);
  if (it == by_approx_.end()) return false;
  for (NodeId e : it->second)
    if (e == exact) return true;
  return false;
}

const std::vector<NodeId> &ApproxRegistry::exacts_of(NodeId approx) const {
  auto it = by_approx_.find(approx);
  return it == by_approx_.end() ? kEmpty : it->second;
}

const std::vector<NodeId> &ApproxRegistry::approxes_of(NodeId exact) const {
  auto it = by_exact_.find(exact);
  return it == by_exact_.end() ? kEmpty : it->second;
}

// ---- rule table ----------------------------------------------------------

namespace {

struct RB {
  RewriteRule r;
  explicit RB(std::string name) { r.name = std::move(name); }
  int term(PTerm t) {
    r.pool.push_back(t);
    return static_cast<int>(r.pool.size()) - 1;
  }
  int v(int i) { return term({PTerm::Kind::var, i, 0, -1, -1}); }
  int V(int i) {
    r.upper_used[i] = true;
    return term({PTerm::Kind::uvar, i, 0, -1, -1});
  }
  int c(long k) { return term({PTerm::Kind::constant, -1, k, -1, -1}); }
  int neg(int a) { return term({PTerm::Kind::neg, -1, 0, a, -1}); }
  int abs(int a) { return term({PTerm::Kind::abs, -1, 0, a, -1}); }
  int sqrt(int a) { return term({PTerm::Kind::sqrt, -1, 0, a, -1}); }
  int add(int a, int b) { return term({PTerm::Kind::add, -1, 0, a, b}); }
  int sub(int a, int b) { return term({PTerm::Kind::sub, -1, 0, a, b}); }
  int mul(int a, int b) { return term({PTerm::Kind::mul, -1, 0, a, b}); }
  int div(int a, int b) { return term({PTerm::Kind::div, -1, 0, a, b}); }
  RB &rule(int before, int after) {
    r.before = before;
    r.after = after;
    return *this;
  }
  RB &distinct(int t1, int t2) {
    r.conds.push_back({RuleCond::Kind::distinct, t1, t2});
    return *this;
  }
  RB &nonzero(int t) {
    r.conds.push_back({RuleCond::Kind::nonzero, t, -1});
    return *this;
  }
  RB &nonneg(int t) {
    r.conds.push_back({RuleCond::Kind::nonneg, t, -1});
    return *this;
  }
  RB &positive(int t) {
    r.conds.push_back({RuleCond::Kind::positive, t, -1});
    return *this;
  }
  RB &not_one(int t) {
    r.conds.push_back({RuleCond::Kind::not_const_one, t, -1});
    return *this;
  }
  RewriteRule done() { return std::move(r); }
};

std::vector<RewriteRule> build_rules() {
  std::vector<RewriteRule> rules;
  {  // opp_mibs: -a - -b  ->  -(a - b)
    RB b("opp_mibs");
    int a = b.v(0), bb = b.v(1);
    rules.push_back(b.rule(b.sub(b.neg(a), b.neg(bb)), b.neg(b.sub(a, bb))).distinct(a, bb).done());
  }
  {  // opp_mibq: (-a - -b) / -b  ->  (a - b) / b
    RB b("opp_mibq");
    int a = b.v(0), bb = b.v(1);
    rules.push_back(b.rule(b.div(b.sub(b.neg(a), b.neg(bb)), b.neg(bb)), b.div(b.sub(a, bb), bb))
                        .nonzero(bb)
                        .distinct(a, bb)
                        .done());
  }
  {  // add_xals: a + b  ->  (a - A) + (A + b)
    RB b("add_xals");
    int a = b.v(0), bb = b.v(1), A = b.V(0);
    rules.push_back(b.rule(b.add(a, bb), b.add(b.sub(a, A), b.add(A, bb))).done());
  }
  {  // add_xars: c + a  ->  (c + A) + (a - A)
    RB b("add_xars");
    int cc = b.v(2), a = b.v(0), A = b.V(0);
    rules.push_back(b.rule(b.add(cc, a), b.add(b.add(cc, A), b.sub(a, A))).done());
  }
  {  // add_mibs: (a + b) - (c + d)  ->  (a - c) + (b - d)
    RB b("add_mibs");
    int a = b.v(0), bb = b.v(1), cc = b.v(2), d = b.v(3);
    rules.push_back(b.rule(b.sub(b.add(a, bb), b.add(cc, d)), b.add(b.sub(a, cc), b.sub(bb, d)))
                        .distinct(a, cc)
                        .distinct(bb, d)
                        .done());
  }
  {  // add_fils: (a + b) - (a + c)  ->  b - c
    RB b("add_fils");
    int a = b.v(0), bb = b.v(1), cc = b.v(2);
    rules.push_back(
        b.rule(b.sub(b.add(a, bb), b.add(a, cc)), b.sub(bb, cc)).distinct(bb, cc).done());
  }
  {  // add_firs: (a + b) - (c + b)  ->  a - c
    RB b("add_firs");
    int a = b.v(0), bb = b.v(1), cc = b.v(2);
    rules.push_back(
        b.rule(b.sub(b.add(a, bb), b.add(cc, bb)), b.sub(a, cc)).distinct(a, cc).done());
  }
  {  // sub_xals: a - b  ->  (a - A) + (A - b)
    RB b("sub_xals");
    int a = b.v(0), bb = b.v(1), A = b.V(0);
    rules.push_back(b.rule(b.sub(a, bb), b.add(b.sub(a, A), b.sub(A, bb)))
                        .distinct(a, bb)
                        .distinct(A, bb)
                        .done());
  }
  {  // sub_xars: b - a  ->  (b - A) + -(a - A)
    RB b("sub_xars");
    int bb = b.v(1), a = b.v(0), A = b.V(0);
    rules.push_back(
        b.rule(b.sub(bb, a), b.add(b.sub(bb, A), b.neg(b.sub(a, A)))).distinct(bb, a).done());
  }
  {  // sub_mibs: (a - b) - (c - d)  ->  (a - c) + -(b - d)
    RB b("sub_mibs");
    int a = b.v(0), bb = b.v(1), cc = b.v(2), d = b.v(3);
    rules.push_back(
        b.rule(b.sub(b.sub(a, bb), b.sub(cc, d)), b.add(b.sub(a, cc), b.neg(b.sub(bb, d))))
            .distinct(a, cc)
            .distinct(bb, d)
            .done());
  }
  {  // sub_fils: (a - b) - (a - c)  ->  -(b - c)
    RB b("sub_fils");
    int a = b.v(0), bb = b.v(1), cc = b.v(2);
    rules.push_back(
        b.rule(b.sub(b.sub(a, bb), b.sub(a, cc)), b.neg(b.sub(bb, cc))).distinct(bb, cc).done());
  }
  {  // sub_firs: (a - b) - (c - b)  ->  a - c
    RB b("sub_firs");
    int a = b.v(0), bb = b.v(1), cc = b.v(2);
    rules.push_back(
        b.rule(b.sub(b.sub(a, bb), b.sub(cc, bb)), b.sub(a, cc)).distinct(a, cc).done());
  }
  {  // mul_xals: a * b  ->  (a - A) * b + A * b
    RB b("mul_xals");
    int a = b.v(0), bb = b.v(1), A = b.V(0);
    rules.push_back(b.rule(b.mul(a, bb), b.add(b.mul(b.sub(a, A), bb), b.mul(A, bb))).done());
  }
  {  // mul_xars: b * a  ->  b * (a - A) + b * A
    RB b("mul_xars");
    int bb = b.v(1), a = b.v(0), A = b.V(0);
    rules.push_back(b.rule(b.mul(bb, a), b.add(b.mul(bb, b.sub(a, A)), b.mul(bb, A))).done());
  }
  {  // mul_fils: a * b - a * c  ->  a * (b - c)
    RB b("mul_fils");
    int a = b.v(0), bb = b.v(1), cc = b.v(2);
    rules.push_back(
        b.rule(b.sub(b.mul(a, bb), b.mul(a, cc)), b.mul(a, b.sub(bb, cc))).distinct(bb, cc).done());
  }
  {  // mul_firs: a * c - b * c  ->  (a - b) * c
    RB b("mul_firs");
    int a = b.v(0), bb = b.v(1), cc = b.v(2);
    rules.push_back(
        b.rule(b.sub(b.mul(a, cc), b.mul(bb, cc)), b.mul(b.sub(a, bb), cc)).distinct(a, bb).done());
  }
  {  // mul_mars: a * b - c * d  ->  a * (b - d) + (a - c) * d
    RB b("mul_mars");
    int a = b.v(0), bb = b.v(1), cc = b.v(2), d = b.v(3);
    rules.push_back(b.rule(b.sub(b.mul(a, bb), b.mul(cc, d)),
                           b.add(b.mul(a, b.sub(bb, d)), b.mul(b.sub(a, cc), d)))
                        .distinct(a, cc)
                        .distinct(bb, d)
                        .done());
  }
  {  // mul_mals: a * b - c * d  ->  (a - c) * b + c * (b - d)
    RB b("mul_mals");
    int a = b.v(0), bb = b.v(1), cc = b.v(2), d = b.v(3);
    rules.push_back(b.rule(b.sub(b.mul(a, bb), b.mul(cc, d)),
                           b.add(b.mul(b.sub(a, cc), bb), b.mul(cc, b.sub(bb, d))))
                        .distinct(a, cc)
                        .distinct(bb, d)
                        .done());
  }
  {  // mul_mabs: a * b - c * d  ->  a * (b - d) + (a - c) * b + -((a - c) * (b - d))
    RB b("mul_mabs");
    int a = b.v(0), bb = b.v(1), cc = b.v(2), d = b.v(3);
    int t1 = b.mul(a, b.sub(bb, d));
    int t2 = b.mul(b.sub(a, cc), bb);
    int t3 = b.neg(b.mul(b.sub(a, cc), b.sub(bb, d)));
    rules.push_back(b.rule(b.sub(b.mul(a, bb), b.mul(cc, d)), b.add(b.add(t1, t2), t3))
                        .distinct(a, cc)
                        .distinct(bb, d)
                        .done());
  }
  {  // mul_mibs: a * b - c * d  ->  c * (b - d) + (a - c) * d + (a - c) * (b - d)
    RB b("mul_mibs");
    int a = b.v(0), bb = b.v(1), cc = b.v(2), d = b.v(3);
    int t1 = b.mul(cc, b.sub(bb, d));
    int t2 = b.mul(b.sub(a, cc), d);
    int t3 = b.mul(b.sub(a, cc), b.sub(bb, d));
    rules.push_back(b.rule(b.sub(b.mul(a, bb), b.mul(cc, d)), b.add(b.add(t1, t2), t3))
                        .distinct(a, cc)
                        .distinct(bb, d)
                        .done());
  }
  {  // mul_filq: (a*b - a*c) / (a*c)  ->  (b - c) / c
    RB b("mul_filq");
    int a = b.v(0), bb = b.v(1), cc = b.v(2);
    rules.push_back(
        b.rule(b.div(b.sub(b.mul(a, bb), b.mul(a, cc)), b.mul(a, cc)), b.div(b.sub(bb, cc), cc))
            .nonzero(a)
            .nonzero(cc)
            .distinct(bb, cc)
            .done());
  }
  {  // mul_firq: (a*b - c*b) / (c*b)  ->  (a - c) / c
    RB b("mul_firq");
    int a = b.v(0), bb = b.v(1), cc = b.v(2);
    rules.push_back(
        b.rule(b.div(b.sub(b.mul(a, bb), b.mul(cc, bb)), b.mul(cc, bb)), b.div(b.sub(a, cc), cc))
            .nonzero(bb)
            .nonzero(cc)
            .distinct(a, cc)
            .done());
  }
  {  // div_mibq: (a/b - c/d) / (c/d) -> ((a-c)/c - (b-d)/d) / (1 + (b-d)/d)
    RB b("div_mibq");
    int a = b.v(0), bb = b.v(1), cc = b.v(2), d = b.v(3);
    int before = b.div(b.sub(b.div(a, bb), b.div(cc, d)), b.div(cc, d));
    int after = b.div(b.sub(b.div(b.sub(a, cc), cc), b.div(b.sub(bb, d), d)),
                      b.add(b.c(1), b.div(b.sub(bb, d), d)));
    rules.push_back(
        b.rule(before, after).nonzero(bb).nonzero(cc).nonzero(d).distinct(bb, d).done());
  }
  {  // div_firq: (a/b - c/b) / (c/b)  ->  (a - c) / c
    RB b("div_firq");
    int a = b.v(0), bb = b.v(1), cc = b.v(2);
    rules.push_back(
        b.rule(b.div(b.sub(b.div(a, bb), b.div(cc, bb)), b.div(cc, bb)), b.div(b.sub(a, cc), cc))
            .nonzero(bb)
            .nonzero(cc)
            .distinct(a, cc)
            .done());
  }
  {  // sqrt_mibs: sqrt(a) - sqrt(b)  ->  (a - b) / (sqrt(a) + sqrt(b))
    RB b("sqrt_mibs");
    int a = b.v(0), bb = b.v(1);
    rules.push_back(b.rule(b.sub(b.sqrt(a), b.sqrt(bb)),
                           b.div(b.sub(a, bb), b.add(b.sqrt(a), b.sqrt(bb))))
                        .nonneg(a)
                        .positive(bb)
                        .distinct(a, bb)
                        .done());
  }
  {  // sqrt_mibq: (sqrt(a) - sqrt(b)) / sqrt(b)  ->  sqrt(1 + (a-b)/b) - 1
    RB b("sqrt_mibq");
    int a = b.v(0), bb = b.v(1);
    rules.push_back(b.rule(b.div(b.sub(b.sqrt(a), b.sqrt(bb)), b.sqrt(bb)),
                           b.sub(b.sqrt(b.add(b.c(1), b.div(b.sub(a, bb), bb))), b.c(1)))
                        .nonneg(a)
                        .positive(bb)
                        .distinct(a, bb)
                        .done());
  }
  {  // sub_xebs: b - A  ->  (b - a) + (a - A)      [2nd sub_xals row]
    RB b("sub_xebs");
    int bb = b.v(1), a = b.v(0), A = b.V(0);
    rules.push_back(b.rule(b.sub(bb, A), b.add(b.sub(bb, a), b.sub(a, A)))
                        .distinct(A, bb)
                        .distinct(a, bb)
                        .done());
  }
  {  // err_fabq: 1 + (a - b)/b  ->  a / b
    RB b("err_fabq");
    int a = b.v(0), bb = b.v(1);
    rules.push_back(b.rule(b.add(b.c(1), b.div(b.sub(a, bb), bb)), b.div(a, bb))
                        .nonzero(bb)
                        .distinct(a, bb)
                        .done());
  }
  {  // val_xabs: a  ->  A + (a - A)
    RB b("val_xabs");
    int a = b.v(0), A = b.V(0);
    rules.push_back(b.rule(a, b.add(A, b.sub(a, A))).done());
  }
  {  // val_xebs: A  ->  a + -(a - A)
    RB b("val_xebs");
    int A = b.V(0), a = b.v(0);
    rules.push_back(b.rule(A, b.add(a, b.neg(b.sub(a, A)))).done());
  }
  {  // val_xabq: a  ->  A * (1 + (a - A)/A)
    RB b("val_xabq");
    int a = b.v(0), A = b.V(0);
    rules.push_back(b.rule(a, b.mul(A, b.add(b.c(1), b.div(b.sub(a, A), A))))
                        .nonzero(a)
                        .nonzero(A)
                        .done());
  }
  {  // val_xebq: A  ->  a / (1 + (a - A)/A)
    RB b("val_xebq");
    int A = b.V(0), a = b.v(0);
    rules.push_back(b.rule(A, b.div(a, b.add(b.c(1), b.div(b.sub(a, A), A))))
                        .nonzero(a)
                        .nonzero(A)
                        .done());
  }
  {  // square_sqrt: sqrt(a) * sqrt(a)  ->  a
    RB b("square_sqrt");
    int a = b.v(0);
    rules.push_back(b.rule(b.mul(b.sqrt(a), b.sqrt(a)), a).nonneg(a).done());
  }
  {  // addf_1: a / (a + b)  ->  1 / (1 + b/a)
    RB b("addf_1");
    int a = b.v(0), bb = b.v(1);
    rules.push_back(b.rule(b.div(a, b.add(a, bb)), b.div(b.c(1), b.add(b.c(1), b.div(bb, a))))
                        .nonzero(a)
                        .nonzero(b.add(a, bb))
                        .not_one(a)
                        .done());
  }
  {  // addf_2: a / (a + b)  ->  1 - 1 / (1 + a/b)
    RB b("addf_2");
    int a = b.v(0), bb = b.v(1);
    rules.push_back(
        b.rule(b.div(a, b.add(a, bb)), b.sub(b.c(1), b.div(b.c(1), b.add(b.c(1), b.div(a, bb)))))
            .nonzero(bb)
            .nonzero(b.add(a, bb))
            .not_one(a)
            .done());
  }
  {  // addf_3: a / (a - b)  ->  1 / (1 - b/a)
    RB b("addf_3");
    int a = b.v(0), bb = b.v(1);
    rules.push_back(b.rule(b.div(a, b.sub(a, bb)), b.div(b.c(1), b.sub(b.c(1), b.div(bb, a))))
                        .nonzero(a)
                        .nonzero(b.sub(a, bb))
                        .not_one(a)
                        .done());
  }
  {  // addf_4: a / (a - b)  ->  1 + 1 / (a/b - 1)
    RB b("addf_4");
    int a = b.v(0), bb = b.v(1);
    rules.push_back(
        b.rule(b.div(a, b.sub(a, bb)), b.add(b.c(1), b.div(b.c(1), b.sub(b.div(a, bb), b.c(1)))))
            .nonzero(bb)
            .nonzero(b.sub(a, bb))
            .not_one(a)
            .done());
  }
  return rules;
}

}  // namespace

const std::vector<RewriteRule> &builtin_rules() {
  static const std::vector<RewriteRule> rules = build_rules();
  return rules;
}

// ---- matching --------------------------------------------------------------

namespace {

bool match_term(const ExprArena &arena, const RewriteRule &rule, int term, NodeId node,
                Binding &b) {
  const PTerm &t = rule.pool[term];
  const Node &n = arena.at(node);
  switch (t.kind) {
    case PTerm::Kind::var:
      if (b.lower[t.var] == kNoNode) {
        b.lower[t.var] = node;
        return true;
      }
      return b.lower[t.var] == node;
    case PTerm::Kind::uvar:
      if (b.upper[t.var] == kNoNode) {
        b.upper[t.var] = node;
        return true;
      }
      return b.upper[t.var] == node;
    case PTerm::Kind::constant:
      return n.kind == NodeKind::constant && n.constant == t.cval;
    case PTerm::Kind::neg:
      return n.kind == NodeKind::neg && match_term(arena, rule, t.a, n.child[0], b);
    case PTerm::Kind::abs:
      return n.kind == NodeKind::abs && match_term(arena, rule, t.a, n.child[0], b);
    case PTerm::Kind::sqrt:
      return n.kind == NodeKind::sqrt && match_term(arena, rule, t.a, n.child[0], b);
    case PTerm::Kind::add:
      return n.kind == NodeKind::add && match_term(arena, rule, t.a, n.child[0], b) &&
             match_term(arena, rule, t.b, n.child[1], b);
    case PTerm::Kind::sub:
      return n.kind == NodeKind::sub && match_term(arena, rule, t.a, n.child[0], b) &&
             match_term(arena, rule, t.b, n.child[1], b);
    case PTerm::Kind::mul:
      return n.kind == NodeKind::mul && match_term(arena, rule, t.a, n.child[0], b) &&
             match_term(arena, rule, t.b, n.child[1], b);
    case PTerm::Kind::div:
      return n.kind == NodeKind::div && match_term(arena, rule, t.a, n.child[0], b) &&
             match_term(arena, rule, t.b, n.child[1], b);
  }
  return false;
}

// Which metavariables appear in a term (for guard checks we only need the
// lower/upper usage recorded in the rule).
void resolve_uppers(const ExprArena &, const RewriteRule &rule, const ApproxRegistry &approx,
                    const Binding &base, int var_index, std::vector<Binding> &out) {
  if (var_index == 4) {
    out.push_back(base);
    return;
  }
  if (!rule.upper_used[var_index]) {
    resolve_uppers({}, rule, approx, base, var_index + 1, out);
    return;
  }
  NodeId lo = base.lower[var_index], up = base.upper[var_index];
  if (lo != kNoNode && up != kNoNode) {
    // Both fixed by the structural match: the pair must be registered.
    if (approx.contains(lo, up)) resolve_uppers({}, rule, approx, base, var_index + 1, out);
    return;
  }
  if (lo != kNoNode) {
    for (NodeId e : approx.exacts_of(lo)) {
      Binding b2 = base;
      b2.upper[var_index] = e;
      resolve_uppers({}, rule, approx, b2, var_index + 1, out);
    }
    return;
  }
  if (up != kNoNode) {
    for (NodeId a : approx.approxes_of(up)) {
      Binding b2 = base;
      b2.lower[var_index] = a;
      resolve_uppers({}, rule, approx, b2, var_index + 1, out);
    }
    return;
  }
}

}  // namespace

NodeId instantiate(ExprArena &arena, const RewriteRule &rule, int term, const Binding &b) {
  const PTerm &t = rule.pool[term];
  switch (t.kind) {
    case PTerm::Kind::var:
      return b.lower[t.var];
    case PTerm::Kind::uvar:
      return b.upper[t.var];
    case PTerm::Kind::constant:
      return arena.constant(Rational(t.cval));
    case PTerm::Kind::neg:
      return arena.neg(instantiate(arena, rule, t.a, b));
    case PTerm::Kind::abs:
      return arena.abs(instantiate(arena, rule, t.a, b));
    case PTerm::Kind::sqrt:
      return arena.sqrt(instantiate(arena, rule, t.a, b));
    case PTerm::Kind::add:
      return arena.add(instantiate(arena, rule, t.a, b), instantiate(arena, rule, t.b, b));
    case PTerm::Kind::sub:
      return arena.sub(instantiate(arena, rule, t.a, b), instantiate(arena, rule, t.b, b));
    case PTerm::Kind::mul:
      return arena.mul(instantiate(arena, rule, t.a, b), instantiate(arena, rule, t.b, b));
    case PTerm::Kind::div:
      return arena.div(instantiate(arena, rule, t.a, b), instantiate(arena, rule, t.b, b));
  }
  return kNoNode;
}

std::vector<Binding> match_rule(const ExprArena &arena, NodeId subject, const RewriteRule &rule,
                                const ApproxRegistry &approx) {
  Binding base;
  if (!match_term(arena, rule, rule.before, subject, base)) return {};
  std::vector<Binding> resolved;
  resolve_uppers(arena, rule, approx, base, 0, resolved);
  // Syntactic guards: distinctness and not-the-literal-one.  Both operate on
  // already-bound subterms, so instantiation cannot create nodes here.
  std::vector<Binding> out;
  for (const Binding &b : resolved) {
    bool ok = true;
    for (const RuleCond &c : rule.conds) {
      if (c.kind == RuleCond::Kind::distinct) {
        NodeId t1 = instantiate(const_cast<ExprArena &>(arena), rule, c.t1, b);
        NodeId t2 = instantiate(const_cast<ExprArena &>(arena), rule, c.t2, b);
        if (t1 == t2) {
          ok = false;
          break;
        }
      } else if (c.kind == RuleCond::Kind::not_const_one) {
        NodeId t = instantiate(const_cast<ExprArena &>(arena), rule, c.t1, b);
        const Node &n = arena.at(t);
        if (n.kind == NodeKind::constant && n.constant == 1) {
          ok = false;
          break;
        }
      }
    }
    if (ok) out.push_back(b);
  }
  return out;
}

std::vector<std::pair<RuleCond::Kind, NodeId>> semantic_guards(ExprArena &arena,
                                                               const RewriteRule &rule,
                                                               const Binding &b) {
  std::vector<std::pair<RuleCond::Kind, NodeId>> out;
  for (const RuleCond &c : rule.conds) {
    if (c.kind == RuleCond::Kind::distinct || c.kind == RuleCond::Kind::not_const_one) continue;
    out.emplace_back(c.kind, instantiate(arena, rule, c.t1, b));
  }
  return out;
}

Rational eval_pattern(const RewriteRule &rule, int term, const std::array<Rational, 4> &lower,
                      const std::array<Rational, 4> &upper) {
  const PTerm &t = rule.pool[term];
  auto ev = [&](int i) { return eval_pattern(rule, i, lower, upper); };
  switch (t.kind) {
    case PTerm::Kind::var:
      return lower[t.var];
    case PTerm::Kind::uvar:
      return upper[t.var];
    case PTerm::Kind::constant:
      return Rational(t.cval);
    case PTerm::Kind::neg:
      return -ev(t.a);
    case PTerm::Kind::abs:
      return abs(ev(t.a));
    case PTerm::Kind::sqrt: {
      Rational v = ev(t.a);
      if (v < 0) throw PatternEvalUndefined{};
      mpz_class sn, sd, rn, rd;
      mpz_sqrtrem(sn.get_mpz_t(), rn.get_mpz_t(), v.get_num().get_mpz_t());
      mpz_sqrtrem(sd.get_mpz_t(), rd.get_mpz_t(), v.get_den().get_mpz_t());
      if (rn != 0 || rd != 0) throw PatternEvalUndefined{};
      Rational r(sn, sd);
      r.canonicalize();
      return r;
    }
    case PTerm::Kind::add:
      return ev(t.a) + ev(t.b);
    case PTerm::Kind::sub:
      return ev(t.a) - ev(t.b);
    case PTerm::Kind::mul:
      return ev(t.a) * ev(t.b);
    case PTerm::Kind::div: {
      Rational d = ev(t.b);
      if (d == 0) throw PatternEvalUndefined{};
      return ev(t.a) / d;
    }
  }
  throw PatternEvalUndefined{};
}

}  // namespace encert
