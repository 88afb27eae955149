#include "encert/certificate.hpp"

#include <algorithm>
#include <sstream>

#include "encert/checker.hpp"

namespace encert {

std::uint64_t fnv1a64(const std::string &data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// ---- emission --------------------------------------------------------------

namespace {

struct ExprCollector {
  const ExprArena &arena;
  std::map<NodeId, int> remap;
  std::vector<NodeId> order;

  int collect(NodeId id) {
    auto it = remap.find(id);
    if (it != remap.end()) return it->second;
    const Node &n = arena.at(id);
    for (int i = 0; i < n.arity(); ++i) collect(n.child[i]);
    int idx = static_cast<int>(order.size());
    order.push_back(id);
    remap.emplace(id, idx);
    return idx;
  }
};

CertExpr to_cert_expr(const Node &n, ExprCollector &coll) {
  CertExpr e;
  e.kind = n.kind;
  for (int i = 0; i < n.arity(); ++i) e.child[i] = coll.remap.at(n.child[i]);
  e.constant = n.constant;
  e.var_name = n.var_name;
  e.fmt = n.fmt;
  e.rel = n.rel;
  return e;
}

}  // namespace

Certificate emit_certificate(const Script &script, const RunConfig &config,
                             const std::vector<SequentReport> &sequents) {
  const ExprArena &arena = *script.arena;
  Certificate cert;
  cert.source_hash = fnv1a64(script.source);
  cert.precision = config.precision;

  ExprCollector coll{arena, {}, {}};
  for (const auto &h : script.rewrite_hints) {
    coll.collect(h.lhs);
    coll.collect(h.rhs);
    for (NodeId d : h.nonzero_conditions) coll.collect(d);
  }

  for (const SequentReport &rep : sequents) {
    CertSequent cs;
    // Reachable steps from the closing one.
    const auto &steps = rep.steps;
    std::vector<char> live(steps.size(), 0);
    std::vector<std::uint32_t> stack{rep.final_step};
    while (!stack.empty()) {
      std::uint32_t s = stack.back();
      stack.pop_back();
      if (live[s]) continue;
      live[s] = 1;
      for (std::uint32_t op : steps[s].operands) stack.push_back(op);
    }
    // Assumptions are reachable through their merge tag, not through
    // operands; merges validate them by id, so keep every assume that points
    // at a live merge.
    bool grew = true;
    while (grew) {
      grew = false;
      for (std::size_t s = 0; s < steps.size(); ++s) {
        if (live[s] || steps[s].thm != Thm::assume || steps[s].aux2 < 0) continue;
        if (live[static_cast<std::size_t>(steps[s].aux2)]) {
          live[s] = 1;
          grew = true;
        }
      }
    }
    std::vector<std::uint32_t> renum(steps.size(), 0);
    std::uint32_t next = 0;
    for (std::size_t s = 0; s < steps.size(); ++s)
      if (live[s]) renum[s] = next++;

    for (std::size_t i = 0; i < rep.hyp_seeds.size(); ++i) {
      const HypSeed &h = rep.hyp_seeds[i];
      CertHyp ch;
      ch.kind = h.atom.kind;
      ch.subject = coll.collect(h.atom.subject);
      ch.lo = h.atom.lo;
      ch.hi = h.atom.hi;
      ch.outer = h.range;
      ch.bound = h.bound;
      cs.hyps.push_back(std::move(ch));
    }
    for (std::size_t i = 0; i < rep.goal_seeds.size(); ++i) {
      const GoalSeed &g = rep.goal_seeds[i];
      CertGoal cg;
      cg.kind = g.atom.kind;
      cg.subject = coll.collect(g.atom.subject);
      cg.lo = g.atom.lo;
      cg.hi = g.atom.hi;
      cg.inner = g.inner;
      cs.goals.push_back(std::move(cg));
    }

    for (std::size_t s = 0; s < steps.size(); ++s) {
      if (!live[s]) continue;
      const ProofStep &st = steps[s];
      CertLemma l;
      l.thm = st.thm;
      l.subject = st.subject == kNoNode ? -1 : coll.collect(st.subject);
      l.concl = st.concl;
      for (std::uint32_t op : st.operands) l.operands.push_back(renum[op]);
      l.aux = st.aux;
      l.aux2 = st.aux2;
      if (st.thm == Thm::assume && st.aux2 >= 0)
        l.aux2 = renum[static_cast<std::size_t>(st.aux2)];
      l.params = st.params;
      for (NodeId a : st.expr_args)
        l.args.push_back(a == kNoNode ? -1 : coll.collect(a));
      cs.lemmas.push_back(std::move(l));
    }
    cs.final_step = renum[rep.final_step];
    cert.sequents.push_back(std::move(cs));
  }

  cert.exprs.reserve(coll.order.size());
  for (NodeId id : coll.order) cert.exprs.push_back(to_cert_expr(arena.at(id), coll));
  for (NodeId id : coll.order) {
    const Node &n = arena.at(id);
    if (!n.display_name.empty()) cert.names[coll.remap.at(id)] = n.display_name;
  }

  for (const auto &h : script.rewrite_hints) {
    CertUserRule r;
    r.ring_proved = h.ring_proved;
    r.lhs = coll.remap.at(h.lhs);
    r.rhs = coll.remap.at(h.rhs);
    for (NodeId d : h.nonzero_conditions) r.nonzero_conditions.push_back(coll.remap.at(d));
    cert.user_rules.push_back(std::move(r));
  }

  // Query answers: the goal lemma's operand interval is the reported
  // enclosure after widening; store the proven interval now.
  for (auto &cs : cert.sequents) {
    for (auto &l : cs.lemmas) {
      if (l.thm != Thm::goal_atom || l.concl.num < 0) continue;
      CertGoal &g = cs.goals[static_cast<std::size_t>(l.concl.num)];
      if (g.kind == PropAtom::Kind::query && !l.operands.empty())
        g.answer = cs.lemmas[l.operands[0]].concl.iv;
    }
  }
  return cert;
}

// ---- serialization ---------------------------------------------------------

namespace {

std::string dy(const Dyadic &d) { return d.to_literal(); }

std::string rq(const Rational &r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

const char *goal_kind_tag(PropAtom::Kind k) {
  switch (k) {
    case PropAtom::Kind::in_range: return "range";
    case PropAtom::Kind::le: return "le";
    case PropAtom::Kind::ge: return "ge";
    case PropAtom::Kind::query: return "query";
  }
  return "?";
}

}  // namespace

std::string serialize(const Certificate &cert) {
  std::ostringstream os;
  os << "ENCERT-CERT 1\n";
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(cert.source_hash));
  os << "source-fnv1a64 " << hash << "\n";
  os << "precision " << cert.precision << "\n";
  os << "userrules " << cert.user_rules.size() << " assumed " << cert.assumed_rule_count() << "\n";
  for (std::size_t i = 0; i < cert.user_rules.size(); ++i) {
    const auto &r = cert.user_rules[i];
    os << "userrule " << i << " " << (r.ring_proved ? "proved" : "assumed") << " " << r.lhs << " "
       << r.rhs << " nz " << r.nonzero_conditions.size();
    for (int d : r.nonzero_conditions) os << " " << d;
    os << "\n";
  }
  os << "exprs " << cert.exprs.size() << "\n";
  for (std::size_t i = 0; i < cert.exprs.size(); ++i) {
    const CertExpr &e = cert.exprs[i];
    os << "e " << i << " ";
    switch (e.kind) {
      case NodeKind::constant:
        os << "num " << rq(e.constant);
        break;
      case NodeKind::variable:
        os << "var " << e.var_name;
        break;
      case NodeKind::neg: os << "neg " << e.child[0]; break;
      case NodeKind::abs: os << "abs " << e.child[0]; break;
      case NodeKind::sqrt: os << "sqrt " << e.child[0]; break;
      case NodeKind::add: os << "add " << e.child[0] << " " << e.child[1]; break;
      case NodeKind::sub: os << "sub " << e.child[0] << " " << e.child[1]; break;
      case NodeKind::mul: os << "mul " << e.child[0] << " " << e.child[1]; break;
      case NodeKind::div: os << "div " << e.child[0] << " " << e.child[1]; break;
      case NodeKind::fma:
        os << "fma " << e.child[0] << " " << e.child[1] << " " << e.child[2];
        break;
      case NodeKind::round:
        if (e.fmt->is_float())
          os << "rndf " << e.fmt->precision << " " << e.fmt->min_exp << " "
             << round_dir_name(e.fmt->dir) << " " << e.child[0];
        else
          os << "rndx " << e.fmt->min_exp << " " << round_dir_name(e.fmt->dir) << " "
             << e.child[0];
        break;
      case NodeKind::rel_round: {
        const char *k = e.rel->kind == RelOpSpec::Kind::add
                            ? "reladd"
                            : e.rel->kind == RelOpSpec::Kind::sub ? "relsub" : "relmul";
        os << k << " " << e.rel->precision << " ";
        if (e.rel->min_exp)
          os << *e.rel->min_exp;
        else
          os << ".";
        os << " " << e.child[0] << " " << e.child[1];
        break;
      }
    }
    os << "\n";
  }
  for (const auto &[idx, name] : cert.names) os << "name " << idx << " " << name << "\n";
  os << "sequents " << cert.sequents.size() << "\n";
  for (std::size_t k = 0; k < cert.sequents.size(); ++k) {
    const CertSequent &cs = cert.sequents[k];
    os << "sequent " << k << " hyps " << cs.hyps.size() << " goals " << cs.goals.size() << "\n";
    for (std::size_t i = 0; i < cs.hyps.size(); ++i) {
      const CertHyp &h = cs.hyps[i];
      os << "h " << i << " " << goal_kind_tag(h.kind) << " " << h.subject;
      if (h.kind == PropAtom::Kind::in_range)
        os << " " << rq(h.lo) << " " << rq(h.hi) << " outer " << dy(h.outer.lo()) << " "
           << dy(h.outer.up());
      else if (h.kind == PropAtom::Kind::le)
        os << " " << rq(h.hi) << " outer " << dy(h.bound);
      else if (h.kind == PropAtom::Kind::ge)
        os << " " << rq(h.lo) << " outer " << dy(h.bound);
      os << "\n";
    }
    for (std::size_t i = 0; i < cs.goals.size(); ++i) {
      const CertGoal &g = cs.goals[i];
      os << "g " << i << " " << goal_kind_tag(g.kind) << " " << g.subject;
      switch (g.kind) {
        case PropAtom::Kind::in_range:
          os << " " << rq(g.lo) << " " << rq(g.hi) << " inner " << dy(g.inner.lo()) << " "
             << dy(g.inner.up());
          break;
        case PropAtom::Kind::le:
          os << " " << rq(g.hi) << " inner " << dy(g.inner.up());
          break;
        case PropAtom::Kind::ge:
          os << " " << rq(g.lo) << " inner " << dy(g.inner.lo());
          break;
        case PropAtom::Kind::query:
          if (g.answer.is_empty())
            os << " answer none";  // not needed by the chosen disjunct
          else
            os << " answer " << dy(g.answer.lo()) << " " << dy(g.answer.up());
          break;
      }
      os << "\n";
    }
    os << "proof " << k << " " << cs.lemmas.size() << "\n";
    for (std::size_t i = 0; i < cs.lemmas.size(); ++i) {
      const CertLemma &l = cs.lemmas[i];
      os << "l " << i << " " << thm_name(l.thm) << " " << l.subject << " ";
      switch (l.concl.kind) {
        case Concl::Kind::bnd:
          os << "bnd " << dy(l.concl.iv.lo()) << " " << dy(l.concl.iv.up());
          break;
        case Concl::Kind::abs:
          os << "mag " << dy(l.concl.iv.lo()) << " " << dy(l.concl.iv.up());
          break;
        case Concl::Kind::fix: os << "fix " << l.concl.num; break;
        case Concl::Kind::flt: os << "flt " << l.concl.num; break;
        case Concl::Kind::falsum: os << "false"; break;
        case Concl::Kind::goal: os << "goal " << l.concl.num; break;
        case Concl::Kind::sequent: os << "seq"; break;
      }
      os << " ops " << l.operands.size();
      for (auto op : l.operands) os << " " << op;
      os << " aux " << l.aux << " " << l.aux2;
      os << " params " << l.params.size();
      for (const auto &p : l.params) os << " " << dy(p);
      os << " args " << l.args.size();
      for (int a : l.args) os << " " << a;
      os << "\n";
    }
    os << "end " << cs.final_step << "\n";
  }
  os << "end-certificate\n";
  return os.str();
}

// ---- parsing ---------------------------------------------------------------

namespace {

struct CertReader {
  std::istringstream in;
  explicit CertReader(const std::string &s) : in(s) {}

  std::string word() {
    std::string w;
    if (!(in >> w)) throw CertFormatError("unexpected end of certificate");
    return w;
  }
  long integer() {
    std::string w = word();
    try {
      return std::stol(w);
    } catch (...) {
      throw CertFormatError("expected integer, found '" + w + "'");
    }
  }
  Dyadic dyadic() {
    std::string w = word();
    std::size_t b = w.find('b');
    try {
      if (b == std::string::npos) return Dyadic(mpz_class(w, 10), 0);
      return Dyadic(mpz_class(w.substr(0, b), 10), std::stoll(w.substr(b + 1)));
    } catch (const CertFormatError &) {
      throw;
    } catch (...) {
      throw CertFormatError("malformed dyadic '" + w + "'");
    }
  }
  Rational rational() {
    std::string w = word();
    std::size_t s = w.find('/');
    try {
      if (s == std::string::npos) return Rational(mpz_class(w, 10));
      Rational r(mpz_class(w.substr(0, s), 10), mpz_class(w.substr(s + 1), 10));
      r.canonicalize();
      return r;
    } catch (...) {
      throw CertFormatError("malformed rational '" + w + "'");
    }
  }
  void expect(const std::string &tag) {
    std::string w = word();
    if (w != tag) throw CertFormatError("expected '" + tag + "', found '" + w + "'");
  }
};

PropAtom::Kind kind_from_tag(const std::string &t) {
  if (t == "range") return PropAtom::Kind::in_range;
  if (t == "le") return PropAtom::Kind::le;
  if (t == "ge") return PropAtom::Kind::ge;
  if (t == "query") return PropAtom::Kind::query;
  throw CertFormatError("unknown atom kind '" + t + "'");
}

}  // namespace

Certificate parse_certificate(const std::string &text) {
  CertReader r(text);
  Certificate cert;
  r.expect("ENCERT-CERT");
  if (r.integer() != 1) throw CertFormatError("unsupported certificate version");
  r.expect("source-fnv1a64");
  cert.source_hash = std::stoull(r.word(), nullptr, 16);
  r.expect("precision");
  cert.precision = static_cast<unsigned>(r.integer());
  r.expect("userrules");
  long nrules = r.integer();
  r.expect("assumed");
  (void)r.integer();
  for (long i = 0; i < nrules; ++i) {
    r.expect("userrule");
    if (r.integer() != i) throw CertFormatError("user rules out of order");
    CertUserRule u;
    std::string flag = r.word();
    u.ring_proved = flag == "proved";
    if (!u.ring_proved && flag != "assumed") throw CertFormatError("bad user rule flag");
    u.lhs = static_cast<int>(r.integer());
    u.rhs = static_cast<int>(r.integer());
    r.expect("nz");
    long k = r.integer();
    for (long j = 0; j < k; ++j) u.nonzero_conditions.push_back(static_cast<int>(r.integer()));
    cert.user_rules.push_back(std::move(u));
  }
  r.expect("exprs");
  long nexprs = r.integer();
  for (long i = 0; i < nexprs; ++i) {
    r.expect("e");
    if (r.integer() != i) throw CertFormatError("expression table out of order");
    CertExpr e;
    std::string tag = r.word();
    auto child = [&](int k) {
      for (int j = 0; j < k; ++j) {
        long c = r.integer();
        if (c < 0 || c >= i) throw CertFormatError("expression child out of range");
        e.child[j] = static_cast<int>(c);
      }
    };
    if (tag == "num") {
      e.kind = NodeKind::constant;
      e.constant = r.rational();
    } else if (tag == "var") {
      e.kind = NodeKind::variable;
      e.var_name = r.word();
    } else if (tag == "neg") { e.kind = NodeKind::neg; child(1); }
    else if (tag == "abs") { e.kind = NodeKind::abs; child(1); }
    else if (tag == "sqrt") { e.kind = NodeKind::sqrt; child(1); }
    else if (tag == "add") { e.kind = NodeKind::add; child(2); }
    else if (tag == "sub") { e.kind = NodeKind::sub; child(2); }
    else if (tag == "mul") { e.kind = NodeKind::mul; child(2); }
    else if (tag == "div") { e.kind = NodeKind::div; child(2); }
    else if (tag == "fma") { e.kind = NodeKind::fma; child(3); }
    else if (tag == "rndf" || tag == "rndx") {
      e.kind = NodeKind::round;
      Format f;
      if (tag == "rndf") {
        f.family = Format::Family::flt;
        f.precision = r.integer();
        f.min_exp = r.integer();
      } else {
        f.family = Format::Family::fix;
        f.min_exp = r.integer();
      }
      auto d = round_dir_from_name(r.word());
      if (!d) throw CertFormatError("unknown rounding direction");
      f.dir = *d;
      e.fmt = f;
      child(1);
    } else if (tag == "reladd" || tag == "relsub" || tag == "relmul") {
      e.kind = NodeKind::rel_round;
      RelOpSpec spec;
      spec.kind = tag == "reladd" ? RelOpSpec::Kind::add
                                  : tag == "relsub" ? RelOpSpec::Kind::sub : RelOpSpec::Kind::mul;
      spec.precision = r.integer();
      std::string me = r.word();
      if (me != ".") spec.min_exp = std::stoll(me);
      e.rel = spec;
      child(2);
    } else {
      throw CertFormatError("unknown expression tag '" + tag + "'");
    }
    cert.exprs.push_back(std::move(e));
  }
  std::string tok = r.word();
  while (tok == "name") {
    int idx = static_cast<int>(r.integer());
    cert.names[idx] = r.word();
    tok = r.word();
  }
  if (tok != "sequents") throw CertFormatError("expected 'sequents'");
  long nseq = r.integer();
  auto check_expr = [&](long e, bool allow_none = false) {
    if (allow_none && e == -1) return;
    if (e < 0 || e >= nexprs) throw CertFormatError("expression reference out of range");
  };
  for (long k = 0; k < nseq; ++k) {
    r.expect("sequent");
    if (r.integer() != k) throw CertFormatError("sequents out of order");
    CertSequent cs;
    r.expect("hyps");
    long nh = r.integer();
    r.expect("goals");
    long ng = r.integer();
    for (long i = 0; i < nh; ++i) {
      r.expect("h");
      if (r.integer() != i) throw CertFormatError("hypotheses out of order");
      CertHyp h;
      h.kind = kind_from_tag(r.word());
      long subj = r.integer();
      check_expr(subj);
      h.subject = static_cast<int>(subj);
      if (h.kind == PropAtom::Kind::in_range) {
        h.lo = r.rational();
        h.hi = r.rational();
        r.expect("outer");
        Dyadic lo = r.dyadic(), up = r.dyadic();
        if (up < lo) throw CertFormatError("hypothesis interval out of order");
        h.outer = Interval(lo, up);
      } else if (h.kind == PropAtom::Kind::le) {
        h.hi = r.rational();
        r.expect("outer");
        h.bound = r.dyadic();
      } else if (h.kind == PropAtom::Kind::ge) {
        h.lo = r.rational();
        r.expect("outer");
        h.bound = r.dyadic();
      } else {
        throw CertFormatError("query atoms cannot be hypotheses");
      }
      cs.hyps.push_back(std::move(h));
    }
    for (long i = 0; i < ng; ++i) {
      r.expect("g");
      if (r.integer() != i) throw CertFormatError("goals out of order");
      CertGoal g;
      g.kind = kind_from_tag(r.word());
      long subj = r.integer();
      check_expr(subj);
      g.subject = static_cast<int>(subj);
      switch (g.kind) {
        case PropAtom::Kind::in_range: {
          g.lo = r.rational();
          g.hi = r.rational();
          r.expect("inner");
          Dyadic lo = r.dyadic(), up = r.dyadic();
          if (up < lo) throw CertFormatError("goal interval out of order");
          g.inner = Interval(lo, up);
          break;
        }
        case PropAtom::Kind::le: {
          g.hi = r.rational();
          r.expect("inner");
          Dyadic b = r.dyadic();
          g.inner = Interval(b, b);
          break;
        }
        case PropAtom::Kind::ge: {
          g.lo = r.rational();
          r.expect("inner");
          Dyadic b = r.dyadic();
          g.inner = Interval(b, b);
          break;
        }
        case PropAtom::Kind::query: {
          r.expect("answer");
          std::string first = r.word();
          if (first == "none") break;  // query unused by the chosen disjunct
          Dyadic lo, up;
          std::size_t b = first.find('b');
          lo = b == std::string::npos
                   ? Dyadic(mpz_class(first, 10), 0)
                   : Dyadic(mpz_class(first.substr(0, b), 10), std::stoll(first.substr(b + 1)));
          up = r.dyadic();
          if (up < lo) throw CertFormatError("answer interval out of order");
          g.answer = Interval(lo, up);
          break;
        }
      }
      cs.goals.push_back(std::move(g));
    }
    r.expect("proof");
    if (r.integer() != k) throw CertFormatError("proof blocks out of order");
    long nl = r.integer();
    for (long i = 0; i < nl; ++i) {
      r.expect("l");
      if (r.integer() != i) throw CertFormatError("lemmas out of order");
      CertLemma l;
      auto thm = thm_from_name(r.word());
      if (!thm) throw CertFormatError("unknown theorem name");
      l.thm = *thm;
      long subj = r.integer();
      check_expr(subj, true);
      l.subject = static_cast<int>(subj);
      std::string ck = r.word();
      if (ck == "bnd" || ck == "mag") {
        Dyadic lo = r.dyadic(), up = r.dyadic();
        if (up < lo) throw CertFormatError("conclusion interval out of order");
        l.concl = ck == "bnd" ? Concl::bnd(Interval(lo, up)) : Concl::abs(Interval(lo, up));
      } else if (ck == "fix") {
        l.concl = Concl::fix(r.integer());
      } else if (ck == "flt") {
        l.concl = Concl::flt(r.integer());
      } else if (ck == "false") {
        l.concl = Concl::falsum();
      } else if (ck == "goal") {
        l.concl = Concl::goal(r.integer());
      } else if (ck == "seq") {
        l.concl = Concl::sequent(0);
      } else {
        throw CertFormatError("unknown conclusion kind '" + ck + "'");
      }
      r.expect("ops");
      long no = r.integer();
      for (long j = 0; j < no; ++j) {
        long op = r.integer();
        if (op < 0 || op >= i)
          throw CertFormatError("operand does not precede its lemma (cycle or forward edge)");
        l.operands.push_back(static_cast<std::uint32_t>(op));
      }
      r.expect("aux");
      l.aux = r.integer();
      l.aux2 = r.integer();
      r.expect("params");
      long np = r.integer();
      for (long j = 0; j < np; ++j) l.params.push_back(r.dyadic());
      r.expect("args");
      long na = r.integer();
      for (long j = 0; j < na; ++j) {
        long a = r.integer();
        check_expr(a, true);
        l.args.push_back(static_cast<int>(a));
      }
      cs.lemmas.push_back(std::move(l));
    }
    r.expect("end");
    long fin = r.integer();
    if (fin < 0 || fin >= nl) throw CertFormatError("final step out of range");
    cs.final_step = static_cast<std::uint32_t>(fin);
    cert.sequents.push_back(std::move(cs));
  }
  r.expect("end-certificate");
  return cert;
}

// ---- widening ----------------------------------------------------------

namespace {

// Nearest dyadic strictly outward of x with at most `bits` mantissa bits, or
// nothing when x is already at least that short.
std::optional<Dyadic> shorten(const Dyadic &x, unsigned bits, ConvDir dir) {
  if (x.is_zero() || x.mantissa_bits() <= bits) return std::nullopt;
  if (bits == 0) {
    bool zero_is_outward = dir == ConvDir::down ? x.sign() > 0 : x.sign() < 0;
    if (!zero_is_outward) return std::nullopt;
    return Dyadic();
  }
  std::int64_t e = static_cast<std::int64_t>(x.mantissa_bits()) - bits + x.exponent();
  mp_bitcnt_t k = static_cast<mp_bitcnt_t>(e - x.exponent());
  mpz_class m;
  if (dir == ConvDir::down)
    mpz_fdiv_q_2exp(m.get_mpz_t(), x.mantissa().get_mpz_t(), k);
  else
    mpz_cdiv_q_2exp(m.get_mpz_t(), x.mantissa().get_mpz_t(), k);
  return Dyadic(m, e);
}

}  // namespace

std::size_t total_mantissa_bits(const Certificate &cert) {
  std::size_t total = 0;
  for (const auto &cs : cert.sequents)
    for (const auto &l : cs.lemmas)
      if (l.concl.kind == Concl::Kind::bnd || l.concl.kind == Concl::Kind::abs)
        total += l.concl.iv.lo().mantissa_bits() + l.concl.iv.up().mantissa_bits();
  return total;
}

void widen(Certificate &cert) {
  for (std::size_t k = 0; k < cert.sequents.size(); ++k) {
    CertSequent &cs = cert.sequents[k];
    // Consumer index (merge lemmas consume their assumes via tags, but
    // assumes are never widened, so operand edges suffice).
    std::vector<std::vector<std::uint32_t>> consumers(cs.lemmas.size());
    for (std::size_t i = 0; i < cs.lemmas.size(); ++i)
      for (std::uint32_t op : cs.lemmas[i].operands)
        consumers[op].push_back(static_cast<std::uint32_t>(i));

    auto still_valid = [&](std::size_t lemma) {
      if (!check_lemma(cert, k, lemma)) return false;
      for (std::uint32_t c : consumers[lemma])
        if (!check_lemma(cert, k, c)) return false;
      return true;
    };

    for (std::size_t i = cs.lemmas.size(); i-- > 0;) {
      CertLemma &l = cs.lemmas[i];
      if (l.concl.kind != Concl::Kind::bnd && l.concl.kind != Concl::Kind::abs) continue;
      if (l.thm == Thm::assume) continue;  // pinned to the merge cut points
      // Per endpoint, shortest mantissa first: the first passing candidate
      // wins; everything stays outward, so validity only has to be probed.
      Interval original = l.concl.iv;
      for (unsigned bits = 0; bits < original.lo().mantissa_bits(); ++bits) {
        auto cand = shorten(original.lo(), bits, ConvDir::down);
        if (!cand) continue;
        l.concl.iv = Interval(*cand, l.concl.iv.up());
        if (still_valid(i)) break;
        l.concl.iv = Interval(original.lo(), l.concl.iv.up());
      }
      Interval after_lo = l.concl.iv;
      for (unsigned bits = 0; bits < original.up().mantissa_bits(); ++bits) {
        auto cand = shorten(original.up(), bits, ConvDir::up);
        if (!cand) continue;
        l.concl.iv = Interval(after_lo.lo(), *cand);
        if (still_valid(i)) break;
        l.concl.iv = after_lo;
      }
    }

    // Keep the reported query answers in sync with the widened goal lemmas:
    // widening must never claim more than the answer, so grow the answer to
    // the widened interval instead.
    for (auto &l : cs.lemmas) {
      if (l.thm != Thm::goal_atom || l.concl.num < 0 || l.operands.empty()) continue;
      CertGoal &g = cs.goals[static_cast<std::size_t>(l.concl.num)];
      if (g.kind == PropAtom::Kind::query)
        g.answer = iv_hull(g.answer, cs.lemmas[l.operands[0]].concl.iv);
    }
  }
}

}  // namespace encert
