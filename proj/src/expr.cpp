#include "encert/expr.hpp"

#include <sstream>

namespace encert {

namespace {
const char *kind_tag(NodeKind k) {
  switch (k) {
    case NodeKind::constant: return "c";
    case NodeKind::variable: return "v";
    case NodeKind::neg: return "neg";
    case NodeKind::abs: return "abs";
    case NodeKind::sqrt: return "sqrt";
    case NodeKind::add: return "add";
    case NodeKind::sub: return "sub";
    case NodeKind::mul: return "mul";
    case NodeKind::div: return "div";
    case NodeKind::fma: return "fma";
    case NodeKind::round: return "rnd";
    case NodeKind::rel_round: return "rel";
  }
  return "?";
}
}  // namespace

std::string ExprArena::key_of(const Node &n) const {
  std::ostringstream os;
  os << kind_tag(n.kind);
  switch (n.kind) {
    case NodeKind::constant:
      os << ':' << n.constant.get_num().get_str() << '/' << n.constant.get_den().get_str();
      break;
    case NodeKind::variable:
      os << ':' << n.var_name;
      break;
    case NodeKind::round:
      os << ':' << n.fmt->name();
      break;
    case NodeKind::rel_round:
      os << ':' << n.rel->name();
      break;
    default:
      break;
  }
  for (int i = 0; i < n.arity(); ++i) os << ' ' << n.child[i];
  return os.str();
}

NodeId ExprArena::intern(Node n, const std::string &key) {
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  NodeId id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(std::move(n));
  index_.emplace(key, id);
  return id;
}

NodeId ExprArena::constant(const Rational &value) {
  Node n;
  n.kind = NodeKind::constant;
  n.constant = value;
  n.constant.canonicalize();
  return intern(n, key_of(n));
}

NodeId ExprArena::variable(const std::string &name) {
  Node n;
  n.kind = NodeKind::variable;
  n.var_name = name;
  return intern(n, key_of(n));
}

#define ENCERT_UNARY(fn, K)                 \
  NodeId ExprArena::fn(NodeId a) {          \
    Node n;                                 \
    n.kind = NodeKind::K;                   \
    n.child[0] = a;                         \
    return intern(n, key_of(n));            \
  }
ENCERT_UNARY(neg, neg)
ENCERT_UNARY(abs, abs)
ENCERT_UNARY(sqrt, sqrt)
#undef ENCERT_UNARY

#define ENCERT_BINARY(fn, K)                    \
  NodeId ExprArena::fn(NodeId a, NodeId b) {    \
    Node n;                                     \
    n.kind = NodeKind::K;                       \
    n.child[0] = a;                             \
    n.child[1] = b;                             \
    return intern(n, key_of(n));                \
  }
ENCERT_BINARY(add, add)
ENCERT_BINARY(sub, sub)
ENCERT_BINARY(mul, mul)
ENCERT_BINARY(div, div)
#undef ENCERT_BINARY

NodeId ExprArena::fma(NodeId a, NodeId b, NodeId c) {
  Node n;
  n.kind = NodeKind::fma;
  n.child = {a, b, c};
  return intern(n, key_of(n));
}

NodeId ExprArena::round(const Format &f, NodeId a) {
  Node n;
  n.kind = NodeKind::round;
  n.fmt = f;
  n.child[0] = a;
  return intern(n, key_of(n));
}

NodeId ExprArena::rel_round(const RelOpSpec &spec, NodeId a, NodeId b) {
  Node n;
  n.kind = NodeKind::rel_round;
  n.rel = spec;
  n.child[0] = a;
  n.child[1] = b;
  return intern(n, key_of(n));
}

bool ExprArena::set_display_name(NodeId id, const std::string &name) {
  Node &n = nodes_[id];
  if (!n.display_name.empty()) return false;
  n.display_name = name;
  return true;
}

namespace {
int precedence(NodeKind k) {
  switch (k) {
    case NodeKind::add:
    case NodeKind::sub:
      return 1;
    case NodeKind::mul:
    case NodeKind::div:
      return 2;
    case NodeKind::neg:
      return 3;
    default:
      return 4;
  }
}
}  // namespace

std::string ExprArena::to_string(NodeId id, bool use_names) const {
  const Node &n = nodes_[id];
  if (use_names && !n.display_name.empty()) return n.display_name;
  auto child_str = [&](int i, bool parens_on_tie) {
    NodeId c = n.child[i];
    std::string s = to_string(c, use_names);
    const Node &cn = nodes_[c];
    bool named = use_names && !cn.display_name.empty();
    int pc = precedence(cn.kind), pn = precedence(n.kind);
    if (!named && (pc < pn || (pc == pn && parens_on_tie))) return "(" + s + ")";
    return s;
  };
  switch (n.kind) {
    case NodeKind::constant: {
      if (n.constant.get_den() == 1) return n.constant.get_num().get_str();
      if (Dyadic::rational_is_dyadic(n.constant))
        return Dyadic::from_dyadic_rational(n.constant).to_literal();
      return n.constant.get_num().get_str() + "/" + n.constant.get_den().get_str();
    }
    case NodeKind::variable:
      return n.var_name;
    case NodeKind::neg:
      return "-" + child_str(0, true);
    case NodeKind::abs:
      return "|" + to_string(n.child[0], use_names) + "|";
    case NodeKind::sqrt:
      return "sqrt(" + to_string(n.child[0], use_names) + ")";
    case NodeKind::add:
      return child_str(0, false) + " + " + child_str(1, true);
    case NodeKind::sub:
      return child_str(0, false) + " - " + child_str(1, true);
    case NodeKind::mul:
      return child_str(0, false) + " * " + child_str(1, true);
    case NodeKind::div:
      return child_str(0, false) + " / " + child_str(1, true);
    case NodeKind::fma:
      return "fma(" + to_string(n.child[0], use_names) + ", " + to_string(n.child[1], use_names) +
             ", " + to_string(n.child[2], use_names) + ")";
    case NodeKind::round:
      return n.fmt->name() + "(" + to_string(n.child[0], use_names) + ")";
    case NodeKind::rel_round:
      return n.rel->name() + "(" + to_string(n.child[0], use_names) + ", " +
             to_string(n.child[1], use_names) + ")";
  }
  return "?";
}

}  // namespace encert
