// Copyright 2026 The qlog Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QLOG_AST_H_
#define QLOG_AST_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qlog {

// Grammar atoms. Identifier and constant payloads live in AstNode::text; the
// atom tag itself is drawn from this closed set.
enum class Atom : std::uint8_t {
  // Statements and set operations.
  kSelect,
  kInsert,
  kUpdate,
  kDelete,
  kUnion,
  kUnionAll,
  kIntersect,
  kExcept,
  // Clauses.
  kDistinct,
  kCols,
  kFrom,
  kWhere,
  kGroupBy,
  kHaving,
  kOrderBy,
  kAsc,
  kDesc,
  kLimit,
  kValues,
  kRow,
  kSet,
  kAssign,
  // Relations.
  kTableRef,
  kAlias,
  kSubquery,
  kJoin,
  kLeftJoin,
  kRightJoin,
  kFullJoin,
  kCrossJoin,
  kOn,
  // Scalar references.
  kColId,
  kStar,
  kFunc,
  kCase,
  kWhen,
  kElse,
  kNull,
  // Boolean connectives.
  kAnd,
  kOr,
  kNot,
  // Comparisons and predicates.
  kEquals,
  kNotEquals,
  kLt,
  kLe,
  kGt,
  kGe,
  kLike,
  kNotLike,
  kIn,
  kNotIn,
  kInList,
  kIsNull,
  kIsNotNull,
  kBetween,
  kNotBetween,
  kExists,
  // Arithmetic.
  kPlus,
  kMinus,
  kTimes,
  kDiv,
  kMod,
  kConcat,
  kNeg,
  // Payload carriers.
  kIdent,
  kConst,
  // Produced by predicate normalization, never by the parser.
  kCnf,
  kClause,
};

inline constexpr int kAtomCount = static_cast<int>(Atom::kClause) + 1;

// Upper-case tag name, e.g. "COL_ID".
std::string_view atom_name(Atom atom);
// Inverse of atom_name.
std::optional<Atom> atom_from_name(std::string_view name);

bool is_comparison(Atom atom);
bool is_connective(Atom atom);  // AND / OR
bool is_join(Atom atom);

// Text of the constant placeholder that replaces literal values.
inline constexpr std::string_view kPlaceholder = "?";

using NodeIndex = std::uint32_t;

struct AstNode {
  Atom atom = Atom::kIdent;
  // Lower-cased identifier text or literal text; empty for structural atoms.
  std::string text;
  std::vector<NodeIndex> children;
  bool is_const = false;
};

// Ordered, labeled tree. Nodes are stored in a flat vector and reference their
// children by index; the root is not necessarily node 0.
class LabeledAst {
 public:
  LabeledAst() = default;

  NodeIndex add_node(Atom atom, std::string text = {},
                     std::vector<NodeIndex> children = {});
  NodeIndex add_const(std::string text);
  void set_root(NodeIndex root) { root_ = root; }
  void reserve(std::size_t n) { nodes_.reserve(n); }

  NodeIndex root() const { return root_; }
  bool empty() const { return nodes_.empty(); }
  std::size_t size() const { return nodes_.size(); }
  const AstNode& node(NodeIndex i) const { return nodes_[i]; }
  AstNode& mutable_node(NodeIndex i) { return nodes_[i]; }
  const std::vector<AstNode>& nodes() const { return nodes_; }

  // Label used for feature interning: payload text for identifiers and
  // constants, the atom name otherwise.
  std::string label(NodeIndex i) const;

  // Longest root-to-leaf path, in edges.
  int depth() const;
  // Height (in edges) of every node, indexed by NodeIndex.
  std::vector<int> heights() const;
  // Parent of every node; the root maps to itself.
  std::vector<NodeIndex> parents() const;
  // Nodes in post-order (children before parents), reachable from the root.
  std::vector<NodeIndex> post_order() const;

  // Copies the subtree rooted at `from` of `other` into this tree and returns
  // the index of the copied root.
  NodeIndex copy_subtree(const LabeledAst& other, NodeIndex from);

  // Checks tree shape: every reachable node has one parent, no cycles, and
  // every is_const node is a leaf.
  bool well_formed() const;

  // Parenthesized dump, e.g. (SELECT (COLS (COL_ID a.a)) ...). Stable.
  std::string to_sexpr() const;
  std::string to_sexpr(NodeIndex i) const;

 private:
  std::vector<AstNode> nodes_;
  NodeIndex root_ = 0;
};

// Ordered tree equality over atoms, payload text and child order.
bool isomorphic(const LabeledAst& a, const LabeledAst& b);

}  // namespace qlog

#endif  // QLOG_AST_H_
