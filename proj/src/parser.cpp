#include "encert/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

namespace encert {

namespace {

enum class Tok {
  ident, number, lbrace, rbrace, lbracket, rbracket, lparen, rparen,
  comma, semicolon, eq, at, dollar, tilde, question, pipe,
  plus, minus, star, slash, lt, gt, impl, band, bor, le, ge, eof
};

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(const std::string &src) : src_(src) { tokenize(); }
  const std::vector<Token> &tokens() const { return toks_; }

 private:
  void tokenize() {
    int line = 1, col = 1;
    std::size_t i = 0;
    auto pos = [&]() { return SourcePos{line, col}; };
    auto advance = [&](std::size_t n) {
      for (std::size_t k = 0; k < n; ++k) {
        if (src_[i + k] == '\n') {
          ++line;
          col = 1;
        } else {
          ++col;
        }
      }
      i += n;
    };
    while (i < src_.size()) {
      char c = src_[i];
      if (c == '#') {  // line comment
        std::size_t j = i;
        while (j < src_.size() && src_[j] != '\n') ++j;
        advance(j - i);
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
        continue;
      }
      SourcePos p = pos();
      if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t j = i;
        while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
        if (j < src_.size() && src_[j] == '.') {
          std::size_t k = j + 1;
          while (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) ++k;
          if (k == j + 1) throw ParseError("digits expected after decimal point", p);
          j = k;
        }
        if (j < src_.size() && (src_[j] == 'e' || src_[j] == 'E' || src_[j] == 'b' || src_[j] == 'B')) {
          std::size_t k = j + 1;
          if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
          std::size_t digits = k;
          while (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) ++k;
          if (k > digits) j = k;  // otherwise the letter belongs to the next token
        }
        toks_.push_back({Tok::number, src_.substr(i, j - i), p});
        advance(j - i);
        continue;
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t j = i;
        while (j < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_'))
          ++j;
        toks_.push_back({Tok::ident, src_.substr(i, j - i), p});
        advance(j - i);
        continue;
      }
      auto two = [&](char a, char b) {
        return c == a && i + 1 < src_.size() && src_[i + 1] == b;
      };
      if (two('-', '>')) { toks_.push_back({Tok::impl, "->", p}); advance(2); continue; }
      if (two('/', '\\')) { toks_.push_back({Tok::band, "/\\", p}); advance(2); continue; }
      if (two('\\', '/')) { toks_.push_back({Tok::bor, "\\/", p}); advance(2); continue; }
      if (two('<', '=')) { toks_.push_back({Tok::le, "<=", p}); advance(2); continue; }
      if (two('>', '=')) { toks_.push_back({Tok::ge, ">=", p}); advance(2); continue; }
      Tok k;
      switch (c) {
        case '{': k = Tok::lbrace; break;
        case '}': k = Tok::rbrace; break;
        case '[': k = Tok::lbracket; break;
        case ']': k = Tok::rbracket; break;
        case '(': k = Tok::lparen; break;
        case ')': k = Tok::rparen; break;
        case ',': k = Tok::comma; break;
        case ';': k = Tok::semicolon; break;
        case '=': k = Tok::eq; break;
        case '@': k = Tok::at; break;
        case '$': k = Tok::dollar; break;
        case '~': k = Tok::tilde; break;
        case '?': k = Tok::question; break;
        case '|': k = Tok::pipe; break;
        case '+': k = Tok::plus; break;
        case '-': k = Tok::minus; break;
        case '*': k = Tok::star; break;
        case '/': k = Tok::slash; break;
        case '<': k = Tok::lt; break;
        case '>': k = Tok::gt; break;
        default:
          throw ParseError(std::string("unexpected character '") + c + "'", p);
      }
      toks_.push_back({k, std::string(1, c), p});
      advance(1);
    }
    toks_.push_back({Tok::eof, "", pos()});
  }

  const std::string &src_;
  std::vector<Token> toks_;
};

class Parser {
 public:
  explicit Parser(const std::string &src) : lex_(src) {
    script_.arena = std::make_shared<ExprArena>();
    script_.source = src;
  }

  Script run() {
    parse_prog();
    expect(Tok::lbrace, "'{' starting the proposition");
    script_.prop.root = parse_prop();
    expect(Tok::rbrace, "'}' closing the proposition");
    parse_hints();
    expect(Tok::eof, "end of input");
    return std::move(script_);
  }

 private:
  const Token &peek(int k = 0) const { return lex_.tokens()[std::min(ip_ + k, lex_.tokens().size() - 1)]; }
  const Token &next() { return lex_.tokens()[ip_++]; }
  bool at(Tok t) const { return peek().kind == t; }
  bool accept(Tok t) {
    if (!at(t)) return false;
    ++ip_;
    return true;
  }
  const Token &expect(Tok t, const std::string &what) {
    if (!at(t)) throw ParseError("expected " + what + ", found '" + peek().text + "'", peek().pos);
    return next();
  }

  ExprArena &arena() { return *script_.arena; }

  // ---- PROG ----------------------------------------------------------

  void parse_prog() {
    while (!at(Tok::lbrace) && !at(Tok::eof)) {
      if (accept(Tok::at)) {
        Token name = expect(Tok::ident, "rounding alias name");
        expect(Tok::eq, "'='");
        RoundingOp op = parse_function(true);
        expect(Tok::semicolon, "';'");
        if (lookup_rounding(name.text))
          throw ParseError("rounding alias '" + name.text + "' defined twice", name.pos);
        script_.rounding_aliases.emplace_back(name.text, op);
        continue;
      }
      Token name = expect(Tok::ident, "alias name");
      std::optional<RoundingOp> auto_round;
      if (!at(Tok::eq)) {
        auto_round = parse_function(false);
      }
      expect(Tok::eq, "'='");
      auto saved = auto_round_;
      auto_round_ = auto_round;
      NodeId rhs = parse_real();
      auto_round_ = saved;
      expect(Tok::semicolon, "';'");
      define_alias(name, rhs);
    }
  }

  void define_alias(const Token &name, NodeId rhs) {
    if (alias_.count(name.text))
      throw ParseError("identifier '" + name.text + "' is aliased twice", name.pos);
    if (used_free_.count(name.text))
      throw ParseError("identifier '" + name.text + "' is aliased after being used", name.pos);
    alias_[name.text] = rhs;
    script_.aliases.emplace_back(name.text, rhs);
    if (!arena().set_display_name(rhs, name.text))
      duplicate_names_.push_back(name.text);  // reported by lint
  }

  const RoundingOp *lookup_rounding(const std::string &name) const {
    for (const auto &[n, op] : script_.rounding_aliases)
      if (n == name) return &op;
    return nullptr;
  }

  // FUNCTION: IDENT with optional <params>.  as_definition allows plain
  // aliasing of an existing rounding alias.
  RoundingOp parse_function(bool as_definition) {
    Token name = expect(Tok::ident, "rounding operator");
    std::vector<std::pair<std::optional<Rational>, std::string>> params;  // number or ident
    if (accept(Tok::lt)) {
      for (;;) {
        if (at(Tok::ident)) {
          params.emplace_back(std::nullopt, next().text);
        } else {
          params.emplace_back(parse_snumber(), "");
        }
        if (accept(Tok::comma)) continue;
        break;
      }
      expect(Tok::gt, "'>' closing rounding parameters");
    }
    return resolve_function(name, params, as_definition);
  }

  RoundingOp resolve_function(const Token &name,
                              const std::vector<std::pair<std::optional<Rational>, std::string>> &params,
                              bool) {
    auto pos = name.pos;
    auto as_int = [&](std::size_t i) -> std::int64_t {
      const auto &[num, id] = params[i];
      if (!num || num->get_den() != 1)
        throw ParseError("integer parameter expected for " + name.text, pos);
      if (!num->get_num().fits_slong_p())
        throw ParseError("parameter out of range for " + name.text, pos);
      return num->get_num().get_si();
    };
    auto as_dir = [&](std::size_t i) {
      const auto &[num, id] = params[i];
      auto d = num ? std::nullopt : round_dir_from_name(id);
      if (!d) throw ParseError("unknown rounding direction in " + name.text, pos);
      return *d;
    };
    if (const RoundingOp *op = lookup_rounding(name.text)) {
      if (!params.empty())
        throw ParseError("rounding alias '" + name.text + "' takes no parameters", pos);
      return *op;
    }
    if (name.text == "float") {
      if (params.size() == 3 && params[0].first)
        return {Format{Format::Family::flt, as_int(0), as_int(1), as_dir(2)}, std::nullopt};
      if (params.size() == 2 && !params[0].first) {
        auto named = named_float_format(params[0].second);
        if (!named) throw ParseError("unknown float format '" + params[0].second + "'", pos);
        return {Format{Format::Family::flt, named->first, named->second, as_dir(1)}, std::nullopt};
      }
      throw ParseError("float<> expects <precision, minimum_exponent, direction> or <name, direction>", pos);
    }
    if (name.text == "fixed") {
      if (params.size() != 2) throw ParseError("fixed<> expects <lsb_weight, direction>", pos);
      return {Format{Format::Family::fix, 0, as_int(0), as_dir(1)}, std::nullopt};
    }
    if (name.text == "int") {
      if (params.size() != 1) throw ParseError("int<> expects <direction>", pos);
      return {Format{Format::Family::fix, 0, 0, as_dir(0)}, std::nullopt};
    }
    auto rel_kind = [&]() -> std::optional<RelOpSpec::Kind> {
      if (name.text == "add_rel") return RelOpSpec::Kind::add;
      if (name.text == "sub_rel") return RelOpSpec::Kind::sub;
      if (name.text == "mul_rel") return RelOpSpec::Kind::mul;
      return std::nullopt;
    }();
    if (rel_kind) {
      if (params.size() != 1 && params.size() != 2)
        throw ParseError(name.text + "<> expects <precision[, minimum_exponent]>", pos);
      RelOpSpec spec{*rel_kind, as_int(0), std::nullopt};
      if (params.size() == 2) spec.min_exp = as_int(1);
      if (spec.precision < 1) throw ParseError("precision must be positive", pos);
      return {std::nullopt, spec};
    }
    throw ParseError("unknown rounding operator '" + name.text + "'", pos);
  }

  // ---- REAL ----------------------------------------------------------

  Rational parse_snumber() {
    bool neg = accept(Tok::minus);
    if (!neg) accept(Tok::plus);
    Token num = expect(Tok::number, "number");
    Rational r;
    try {
      r = parse_number(num.text);
    } catch (const std::invalid_argument &e) {
      throw ParseError(e.what(), num.pos);
    }
    return neg ? Rational(-r) : r;
  }

  NodeId mk_add(NodeId a, NodeId b) { return wrap(arena().add(a, b), RelOpSpec::Kind::add, a, b); }
  NodeId mk_sub(NodeId a, NodeId b) { return wrap(arena().sub(a, b), RelOpSpec::Kind::sub, a, b); }
  NodeId mk_mul(NodeId a, NodeId b) { return wrap(arena().mul(a, b), RelOpSpec::Kind::mul, a, b); }
  NodeId mk_div(NodeId a, NodeId b) { return wrap_fmt_only(arena().div(a, b), "division"); }
  NodeId mk_sqrt(NodeId a) { return wrap_fmt_only(arena().sqrt(a), "square root"); }
  NodeId mk_fma(NodeId a, NodeId b, NodeId c) { return wrap_fmt_only(arena().fma(a, b, c), "fma"); }

  NodeId wrap(NodeId raw, RelOpSpec::Kind kind, NodeId a, NodeId b) {
    if (!auto_round_) return raw;
    if (auto_round_->fmt) return arena().round(*auto_round_->fmt, raw);
    RelOpSpec spec = *auto_round_->rel;
    spec.kind = kind;
    return arena().rel_round(spec, a, b);
  }

  NodeId wrap_fmt_only(NodeId raw, const char *what) {
    if (!auto_round_) return raw;
    if (auto_round_->fmt) return arena().round(*auto_round_->fmt, raw);
    throw ParseError(std::string("under-specified operators cannot round a ") + what, peek().pos);
  }

  NodeId parse_real() {  // +/- level
    NodeId lhs = parse_term();
    for (;;) {
      if (accept(Tok::plus))
        lhs = mk_add(lhs, parse_term());
      else if (accept(Tok::minus))
        lhs = mk_sub(lhs, parse_term());
      else
        return lhs;
    }
  }

  NodeId parse_term() {  // * / level
    NodeId lhs = parse_unary();
    for (;;) {
      if (accept(Tok::star))
        lhs = mk_mul(lhs, parse_unary());
      else if (accept(Tok::slash))
        lhs = mk_div(lhs, parse_unary());
      else
        return lhs;
    }
  }

  NodeId parse_unary() {
    if (accept(Tok::minus)) {
      NodeId a = parse_unary();
      const Node &n = arena().at(a);
      if (n.kind == NodeKind::constant) return arena().constant(Rational(-n.constant));
      return arena().neg(a);
    }
    if (accept(Tok::plus)) return parse_unary();
    if (accept(Tok::pipe)) {
      NodeId a = parse_real();
      expect(Tok::pipe, "'|' closing absolute value");
      return arena().abs(a);
    }
    return parse_primary();
  }

  NodeId parse_primary() {
    if (at(Tok::number)) {
      Token t = next();
      try {
        return arena().constant(parse_number(t.text));
      } catch (const std::invalid_argument &e) {
        throw ParseError(e.what(), t.pos);
      }
    }
    if (accept(Tok::lparen)) {
      NodeId e = parse_real();
      expect(Tok::rparen, "')'");
      return e;
    }
    Token id = expect(Tok::ident, "expression");
    if (id.text == "sqrt") {
      expect(Tok::lparen, "'(' after sqrt");
      NodeId a = parse_real();
      expect(Tok::rparen, "')'");
      return mk_sqrt(a);
    }
    if (id.text == "fma") {
      expect(Tok::lparen, "'(' after fma");
      NodeId a = parse_real();
      expect(Tok::comma, "','");
      NodeId b = parse_real();
      expect(Tok::comma, "','");
      NodeId c = parse_real();
      expect(Tok::rparen, "')'");
      return mk_fma(a, b, c);
    }
    // Rounding application: IDENT<params>(...) or rounding-alias(...).
    bool has_params = at(Tok::lt);
    bool is_rounding_name = lookup_rounding(id.text) || id.text == "float" || id.text == "fixed" ||
                            id.text == "int" || id.text == "add_rel" || id.text == "sub_rel" ||
                            id.text == "mul_rel";
    if (has_params || (is_rounding_name && at(Tok::lparen))) {
      --ip_;  // re-read the identifier inside parse_function
      RoundingOp op = parse_function(false);
      expect(Tok::lparen, "'(' after rounding operator");
      std::vector<NodeId> args;
      args.push_back(parse_real());
      while (accept(Tok::comma)) args.push_back(parse_real());
      expect(Tok::rparen, "')'");
      if (op.fmt) {
        if (args.size() != 1)
          throw ParseError("rounding operators take one argument", id.pos);
        return arena().round(*op.fmt, args[0]);
      }
      if (args.size() != 2)
        throw ParseError("under-specified operators take two arguments", id.pos);
      return arena().rel_round(*op.rel, args[0], args[1]);
    }
    auto it = alias_.find(id.text);
    if (it != alias_.end()) return it->second;
    used_free_.insert(id.text);
    return arena().variable(id.text);
  }

  // ---- PROP ----------------------------------------------------------

  int parse_prop() {  // impl level, right associative
    int lhs = parse_prop_or();
    if (accept(Tok::impl)) {
      int rhs = parse_prop();
      return script_.prop.add(PropTree::Kind::impl, lhs, rhs);
    }
    return lhs;
  }

  int parse_prop_or() {
    int lhs = parse_prop_and();
    while (accept(Tok::bor)) lhs = script_.prop.add(PropTree::Kind::disj, lhs, parse_prop_and());
    return lhs;
  }

  int parse_prop_and() {
    int lhs = parse_prop_not();
    while (accept(Tok::band)) lhs = script_.prop.add(PropTree::Kind::conj, lhs, parse_prop_not());
    return lhs;
  }

  int parse_prop_not() {
    if (at(Tok::ident) && peek().text == "not") {
      next();
      return script_.prop.add(PropTree::Kind::neg, parse_prop_not());
    }
    if (at(Tok::lparen)) {
      // '(' opens either a nested proposition or a parenthesized expression;
      // try the proposition first and fall back on the atom.
      std::size_t save = ip_;
      std::size_t prop_save = script_.prop.nodes.size();
      try {
        next();
        int inner = parse_prop();
        expect(Tok::rparen, "')'");
        return inner;
      } catch (const ParseError &) {
        ip_ = save;
        script_.prop.nodes.resize(prop_save);
      }
    }
    return parse_atom();
  }

  int parse_atom() {
    Token start = peek();
    NodeId subject = parse_real();
    if (accept(Tok::le)) return script_.prop.add_atom(PropAtom::le(subject, parse_snumber()));
    if (accept(Tok::ge)) return script_.prop.add_atom(PropAtom::ge(subject, parse_snumber()));
    if (at(Tok::ident) && peek().text == "in") {
      next();
      if (accept(Tok::question)) return script_.prop.add_atom(PropAtom::query(subject));
      expect(Tok::lbracket, "'[' opening a range");
      Rational lo = parse_snumber();
      expect(Tok::comma, "','");
      Rational hi = parse_snumber();
      expect(Tok::rbracket, "']' closing a range");
      if (hi < lo) throw ParseError("range endpoints out of order", start.pos);
      return script_.prop.add_atom(PropAtom::in_range(subject, lo, hi));
    }
    throw ParseError("expected '<=', '>=' or 'in' after expression", peek().pos);
  }

  // ---- HINTS ---------------------------------------------------------

  void parse_hints() {
    while (!at(Tok::eof)) {
      SourcePos pos = peek().pos;
      if (accept(Tok::dollar)) {
        PaveHint h;
        h.pos = pos;
        parse_dvars(h, /*targeted=*/false);
        expect(Tok::semicolon, "';'");
        script_.pave_hints.push_back(std::move(h));
        continue;
      }
      NodeId first = parse_real();
      if (accept(Tok::impl)) {
        RewriteHint h;
        h.lhs = first;
        h.rhs = parse_real();
        h.pos = pos;
        expect(Tok::semicolon, "';'");
        script_.rewrite_hints.push_back(std::move(h));
        continue;
      }
      if (accept(Tok::tilde)) {
        ApproxHint h;
        h.approx = first;
        h.exact = parse_real();
        h.pos = pos;
        expect(Tok::semicolon, "';'");
        script_.approx_hints.push_back(std::move(h));
        continue;
      }
      PaveHint h;
      h.pos = pos;
      h.targets.push_back(first);
      while (accept(Tok::comma)) h.targets.push_back(parse_real());
      expect(Tok::dollar, "'$', '->' or '~' in hint");
      parse_dvars(h, /*targeted=*/true);
      expect(Tok::semicolon, "';'");
      script_.pave_hints.push_back(std::move(h));
    }
  }

  void parse_dvars(PaveHint &h, bool targeted) {
    for (;;) {
      PaveAxis axis;
      axis.var = parse_real();
      axis.mode = targeted ? PaveAxis::Mode::dichotomy : PaveAxis::Mode::even;
      axis.count = 4;  // the default when no count is given and no targets are present
      if (at(Tok::ident) && peek().text == "in") {
        next();
        if (accept(Tok::lparen)) {
          axis.mode = PaveAxis::Mode::points;
          axis.points.push_back(parse_snumber());
          while (accept(Tok::comma)) axis.points.push_back(parse_snumber());
          expect(Tok::rparen, "')' closing split points");
        } else {
          Token n = expect(Tok::number, "sub-interval count");
          Rational r = parse_number(n.text);
          if (r.get_den() != 1 || r <= 0)
            throw ParseError("sub-interval count must be a positive integer", n.pos);
          axis.mode = PaveAxis::Mode::even;
          axis.count = static_cast<long>(r.get_num().get_si());
        }
      }
      h.axes.push_back(std::move(axis));
      if (!accept(Tok::comma)) return;
    }
  }

  Lexer lex_;
  std::size_t ip_ = 0;
  Script script_;
  std::map<std::string, NodeId> alias_;
  std::set<std::string> used_free_;
  std::optional<RoundingOp> auto_round_;
  std::vector<std::string> duplicate_names_;

 public:
  const std::vector<std::string> &duplicate_names() const { return duplicate_names_; }
};

}  // namespace

Script parse(const std::string &source) {
  Parser p(source);
  return p.run();
}

// ---- ring normalization ------------------------------------------------

namespace {

// Monomial: sorted (atom node, exponent) list; Poly: monomial -> coefficient.
using Monomial = std::vector<std::pair<NodeId, int>>;
using Poly = std::map<Monomial, Rational>;

Poly poly_const(const Rational &c) {
  Poly p;
  if (c != 0) p[{}] = c;
  return p;
}

Poly poly_atom(NodeId id) {
  Poly p;
  p[{{id, 1}}] = 1;
  return p;
}

Poly poly_add(const Poly &a, const Poly &b) {
  Poly r = a;
  for (const auto &[m, c] : b) {
    Rational &slot = r[m];
    slot += c;
    if (slot == 0) r.erase(m);
  }
  return r;
}

Poly poly_neg(const Poly &a) {
  Poly r;
  for (const auto &[m, c] : a) r[m] = -c;
  return r;
}

Monomial mono_mul(const Monomial &a, const Monomial &b) {
  Monomial r;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) r.push_back(a[i++]);
    else if (i == a.size() || b[j].first < a[i].first) r.push_back(b[j++]);
    else {
      r.emplace_back(a[i].first, a[i].second + b[j].second);
      ++i;
      ++j;
    }
  }
  return r;
}

Poly poly_mul(const Poly &a, const Poly &b) {
  Poly r;
  for (const auto &[ma, ca] : a)
    for (const auto &[mb, cb] : b) {
      Monomial m = mono_mul(ma, mb);
      Rational &slot = r[m];
      slot += ca * cb;
      if (slot == 0) r.erase(m);
    }
  return r;
}

struct RingFrac {
  Poly num, den;
};

struct RingCtx {
  const ExprArena &arena;
  std::vector<NodeId> zero_divisors;
  std::vector<NodeId> nonzero_conditions;
  std::map<NodeId, RingFrac> memo;
};

const RingFrac &ring_of(RingCtx &ctx, NodeId id) {
  auto it = ctx.memo.find(id);
  if (it != ctx.memo.end()) return it->second;
  const Node &n = ctx.arena.at(id);
  RingFrac f;
  f.den = poly_const(1);
  auto child = [&](int i) -> const RingFrac & { return ring_of(ctx, n.child[i]); };
  switch (n.kind) {
    case NodeKind::constant:
      f.num = poly_const(n.constant);
      break;
    case NodeKind::neg: {
      RingFrac a = child(0);
      f.num = poly_neg(a.num);
      f.den = a.den;
      break;
    }
    case NodeKind::add:
    case NodeKind::sub: {
      RingFrac a = child(0), b = child(1);
      Poly bn = n.kind == NodeKind::sub ? poly_neg(b.num) : b.num;
      f.num = poly_add(poly_mul(a.num, b.den), poly_mul(bn, a.den));
      f.den = poly_mul(a.den, b.den);
      break;
    }
    case NodeKind::mul: {
      RingFrac a = child(0), b = child(1);
      f.num = poly_mul(a.num, b.num);
      f.den = poly_mul(a.den, b.den);
      break;
    }
    case NodeKind::fma: {
      RingFrac a = child(0), b = child(1), c = child(2);
      Poly ab_num = poly_mul(a.num, b.num);
      Poly ab_den = poly_mul(a.den, b.den);
      f.num = poly_add(poly_mul(ab_num, c.den), poly_mul(c.num, ab_den));
      f.den = poly_mul(ab_den, c.den);
      break;
    }
    case NodeKind::div: {
      RingFrac a = child(0), b = child(1);
      if (b.num.empty()) ctx.zero_divisors.push_back(n.child[1]);
      ctx.nonzero_conditions.push_back(n.child[1]);
      f.num = poly_mul(a.num, b.den);
      f.den = poly_mul(a.den, b.num);
      break;
    }
    default:  // variable, sqrt, abs, round, rel_round: opaque atoms
      f.num = poly_atom(id);
      break;
  }
  return ctx.memo.emplace(id, std::move(f)).first->second;
}

}  // namespace

bool ring_equal(const ExprArena &arena, NodeId a, NodeId b,
                std::vector<NodeId> *nonzero_conditions) {
  RingCtx ctx{arena, {}, {}, {}};
  RingFrac fa = ring_of(ctx, a);
  RingFrac fb = ring_of(ctx, b);
  if (!ctx.zero_divisors.empty()) return false;
  if (fa.den.empty() || fb.den.empty()) return false;
  Poly diff = poly_add(poly_mul(fa.num, fb.den), poly_neg(poly_mul(fb.num, fa.den)));
  if (!diff.empty()) return false;
  if (nonzero_conditions) {
    std::set<NodeId> seen;
    for (NodeId d : ctx.nonzero_conditions)
      if (seen.insert(d).second) nonzero_conditions->push_back(d);
  }
  return true;
}

std::vector<NodeId> trivially_zero_divisors(const ExprArena &arena, NodeId e) {
  RingCtx ctx{arena, {}, {}, {}};
  ring_of(ctx, e);
  std::set<NodeId> seen;
  std::vector<NodeId> out;
  for (NodeId d : ctx.zero_divisors)
    if (seen.insert(d).second) out.push_back(d);
  return out;
}

// ---- automatic approximation pairs --------------------------------------

std::vector<std::pair<NodeId, NodeId>> automatic_approx_pairs(
    const ExprArena &arena, const std::vector<PropAtom> &atoms) {
  std::vector<std::pair<NodeId, NodeId>> out;
  std::set<std::pair<NodeId, NodeId>> seen;
  auto put = [&](NodeId x, NodeId y) {
    if (x != y && seen.emplace(x, y).second) out.emplace_back(x, y);
  };
  // Every rounded expression approximates its argument.
  for (NodeId id = 0; id < arena.size(); ++id) {
    const Node &n = arena.at(id);
    if (n.kind == NodeKind::round) put(id, n.child[0]);
  }
  // Hypotheses shaped x - y in I or (x - y)/y in I relate x to y.
  for (const PropAtom &a : atoms) {
    if (a.kind == PropAtom::Kind::query) continue;
    const Node &s = arena.at(a.subject);
    if (s.kind == NodeKind::sub) {
      put(s.child[0], s.child[1]);
    } else if (s.kind == NodeKind::div) {
      const Node &numer = arena.at(s.child[0]);
      if (numer.kind == NodeKind::sub && numer.child[1] == s.child[1])
        put(numer.child[0], numer.child[1]);
    }
  }
  return out;
}

// ---- lint ----------------------------------------------------------------

namespace {
std::vector<PropAtom> all_atoms(const PropTree &prop) {
  std::vector<PropAtom> out;
  for (const auto &n : prop.nodes)
    if (n.kind == PropTree::Kind::atom) out.push_back(n.atom);
  return out;
}
}  // namespace

std::vector<std::string> lint(Script &script) {
  std::vector<std::string> warnings;
  const ExprArena &arena = *script.arena;

  // (a) two aliases naming one expression.
  std::map<NodeId, std::vector<std::string>> names;
  for (const auto &[name, id] : script.aliases) names[id].push_back(name);
  for (const auto &[id, ns] : names) {
    if (ns.size() < 2) continue;
    std::string list = ns[0];
    for (std::size_t i = 1; i < ns.size(); ++i) list += "' and '" + ns[i];
    warnings.push_back("'" + list + "' are different names for the same expression");
  }

  // (b) rewrite rules whose sides are not provably equal; (c) divisors
  // trivially equal to zero inside rule sides.
  for (auto &hint : script.rewrite_hints) {
    for (NodeId side : {hint.lhs, hint.rhs}) {
      for (NodeId d : trivially_zero_divisors(arena, side))
        warnings.push_back("hint at " + hint.pos.to_string() + ": divisor '" +
                           arena.to_string(d) + "' is trivially equal to zero; this is most certainly an error");
    }
    hint.nonzero_conditions.clear();
    hint.ring_proved = ring_equal(arena, hint.lhs, hint.rhs, &hint.nonzero_conditions);
    if (!hint.ring_proved)
      warnings.push_back("hint at " + hint.pos.to_string() + ": sides of '" +
                         arena.to_string(hint.lhs) + " -> " + arena.to_string(hint.rhs) +
                         "' are not provably equal; the rule will be assumed");
  }

  // (d) ~ hints that duplicate automatically detected pairs.
  auto automatic = automatic_approx_pairs(arena, all_atoms(script.prop));
  std::set<std::pair<NodeId, NodeId>> autoset(automatic.begin(), automatic.end());
  for (const auto &hint : script.approx_hints) {
    if (autoset.count({hint.approx, hint.exact}))
      warnings.push_back("hint at " + hint.pos.to_string() + ": '" + arena.to_string(hint.approx) +
                         " ~ " + arena.to_string(hint.exact) +
                         "' is already known automatically; the hint is useless");
  }
  return warnings;
}

// ---- source rendering ----------------------------------------------------

namespace {

// Prints an expression using only alias names that are already visible.
std::string render(const ExprArena &arena, NodeId id, const std::set<NodeId> &visible,
                   bool root) {
  const Node &n = arena.at(id);
  if (!root && visible.count(id)) return n.display_name;
  auto sub = [&](int i, bool parens) {
    std::string s = render(arena, n.child[i], visible, false);
    if (parens && !visible.count(n.child[i])) {
      NodeKind k = arena.at(n.child[i]).kind;
      if (k != NodeKind::constant && k != NodeKind::variable && k != NodeKind::abs &&
          k != NodeKind::sqrt && k != NodeKind::round && k != NodeKind::rel_round &&
          k != NodeKind::fma)
        return "(" + s + ")";
    }
    return s;
  };
  switch (n.kind) {
    case NodeKind::constant: {
      if (n.constant.get_den() == 1) return n.constant.get_num().get_str();
      if (Dyadic::rational_is_dyadic(n.constant))
        return Dyadic::from_dyadic_rational(n.constant).to_literal();
      return "(" + n.constant.get_num().get_str() + " / " + n.constant.get_den().get_str() + ")";
    }
    case NodeKind::variable:
      return n.var_name;
    case NodeKind::neg:
      return "-" + sub(0, true);
    case NodeKind::abs:
      return "|" + render(arena, n.child[0], visible, false) + "|";
    case NodeKind::sqrt:
      return "sqrt(" + render(arena, n.child[0], visible, false) + ")";
    case NodeKind::add:
      return sub(0, true) + " + " + sub(1, true);
    case NodeKind::sub:
      return sub(0, true) + " - " + sub(1, true);
    case NodeKind::mul:
      return sub(0, true) + " * " + sub(1, true);
    case NodeKind::div:
      return sub(0, true) + " / " + sub(1, true);
    case NodeKind::fma:
      return "fma(" + render(arena, n.child[0], visible, false) + ", " +
             render(arena, n.child[1], visible, false) + ", " +
             render(arena, n.child[2], visible, false) + ")";
    case NodeKind::round:
      return n.fmt->name() + "(" + render(arena, n.child[0], visible, false) + ")";
    case NodeKind::rel_round:
      return n.rel->name() + "(" + render(arena, n.child[0], visible, false) + ", " +
             render(arena, n.child[1], visible, false) + ")";
  }
  return "?";
}

std::string render_rational(const Rational &r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  if (Dyadic::rational_is_dyadic(r)) return Dyadic::from_dyadic_rational(r).to_literal();
  // Exact decimal when the denominator is 10^k, else a fraction is not
  // expressible as a literal; fall back on num/den * scaling via e-notation
  // is not possible, so print as division handled by callers.
  mpz_class den = r.get_den();
  int tens = 0;
  while (den % 10 == 0) {
    den /= 10;
    ++tens;
  }
  if (den == 1) {
    mpz_class mag = abs(r.get_num());
    std::string digits = mag.get_str();
    if (digits.size() <= static_cast<std::size_t>(tens))
      digits.insert(0, tens - digits.size() + 1, '0');
    std::string s = digits.substr(0, digits.size() - tens) + "." + digits.substr(digits.size() - tens);
    if (sgn(r.get_num()) < 0) s.insert(0, 1, '-');
    return s;
  }
  return r.get_num().get_str() + "e0/" + r.get_den().get_str();  // not a literal; callers avoid
}

std::string render_prop(const Script &s, int idx, const std::set<NodeId> &visible) {
  const auto &n = s.prop.nodes[idx];
  auto wrap = [&](int child) { return "(" + render_prop(s, child, visible) + ")"; };
  switch (n.kind) {
    case PropTree::Kind::atom: {
      std::string e = render(*s.arena, n.atom.subject, visible, false);
      switch (n.atom.kind) {
        case PropAtom::Kind::in_range:
          return e + " in [" + render_rational(n.atom.lo) + ", " + render_rational(n.atom.hi) + "]";
        case PropAtom::Kind::le:
          return e + " <= " + render_rational(n.atom.hi);
        case PropAtom::Kind::ge:
          return e + " >= " + render_rational(n.atom.lo);
        case PropAtom::Kind::query:
          return e + " in ?";
      }
      return e;
    }
    case PropTree::Kind::conj:
      return wrap(n.a) + " /\\ " + wrap(n.b);
    case PropTree::Kind::disj:
      return wrap(n.a) + " \\/ " + wrap(n.b);
    case PropTree::Kind::impl:
      return wrap(n.a) + " -> " + wrap(n.b);
    case PropTree::Kind::neg:
      return "not " + wrap(n.a);
  }
  return "";
}

}  // namespace

std::string Script::to_source() const {
  std::ostringstream os;
  std::set<NodeId> visible;
  for (const auto &[name, id] : aliases) {
    os << name << " = " << render(*arena, id, visible, true) << ";\n";
    visible.insert(id);
  }
  os << "{ " << render_prop(*this, prop.root, visible) << " }\n";
  for (const auto &h : rewrite_hints)
    os << render(*arena, h.lhs, visible, false) << " -> " << render(*arena, h.rhs, visible, false)
       << ";\n";
  for (const auto &h : approx_hints)
    os << render(*arena, h.approx, visible, false) << " ~ " << render(*arena, h.exact, visible, false)
       << ";\n";
  for (const auto &h : pave_hints) {
    std::string sep;
    for (NodeId t : h.targets) {
      os << sep << render(*arena, t, visible, false);
      sep = ", ";
    }
    os << " $ ";
    sep = "";
    for (const auto &ax : h.axes) {
      os << sep << render(*arena, ax.var, visible, false);
      if (ax.mode == PaveAxis::Mode::even && !h.targets.empty())
        os << " in " << ax.count;
      else if (ax.mode == PaveAxis::Mode::even && ax.count != 4)
        os << " in " << ax.count;
      else if (ax.mode == PaveAxis::Mode::points) {
        os << " in (";
        std::string psep;
        for (const auto &p : ax.points) {
          os << psep << render_rational(p);
          psep = ", ";
        }
        os << ")";
      }
      sep = ", ";
    }
    os << ";\n";
  }
  return os.str();
}

}  // namespace encert
