#ifndef ENCERT_EXPR_HPP
#define ENCERT_EXPR_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "encert/formats.hpp"

namespace encert {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = 0xffffffffu;

enum class NodeKind : std::uint8_t {
  constant,
  variable,
  neg,
  abs,
  sqrt,
  add,
  sub,
  mul,
  div,
  fma,       // the exact real a*b + c
  round,     // format rounding applied to one child
  rel_round  // under-specified {add|sub|mul}_rel applied to two children
};

struct Node {
  NodeKind kind;
  std::array<NodeId, 3> child{kNoNode, kNoNode, kNoNode};
  Rational constant;            // kind == constant
  std::string var_name;         // kind == variable
  std::optional<Format> fmt;    // kind == round
  std::optional<RelOpSpec> rel; // kind == rel_round
  std::string display_name;     // first alias naming this node, for reports

  int arity() const {
    switch (kind) {
      case NodeKind::constant:
      case NodeKind::variable:
        return 0;
      case NodeKind::neg:
      case NodeKind::abs:
      case NodeKind::sqrt:
      case NodeKind::round:
        return 1;
      case NodeKind::fma:
        return 3;
      default:
        return 2;
    }
  }
};

/// Hash-consed expression arena: structurally equal subtrees share one node,
/// so node ids double as semantic identities.  Nodes are append-only; ids are
/// creation-ordered, which the engine uses for deterministic scheduling.
class ExprArena {
 public:
  NodeId constant(const Rational &value);
  NodeId variable(const std::string &name);
  NodeId neg(NodeId a);
  NodeId abs(NodeId a);
  NodeId sqrt(NodeId a);
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId div(NodeId a, NodeId b);
  NodeId fma(NodeId a, NodeId b, NodeId c);
  NodeId round(const Format &f, NodeId a);
  NodeId rel_round(const RelOpSpec &spec, NodeId a, NodeId b);

  const Node &at(NodeId id) const { return nodes_[id]; }
  std::size_t size() const { return nodes_.size(); }

  /// Sets the report name of a node; the first name sticks.  Returns false
  /// when the node was already named (two aliases for one expression).
  bool set_display_name(NodeId id, const std::string &name);

  std::string to_string(NodeId id, bool use_names = true) const;

 private:
  NodeId intern(Node n, const std::string &key);
  std::string key_of(const Node &n) const;

  std::vector<Node> nodes_;
  std::unordered_map<std::string, NodeId> index_;
};

}  // namespace encert

#endif
