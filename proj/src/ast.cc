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

#include "qlog/ast.h"

#include <algorithm>
#include <array>
#include <functional>

namespace qlog {
namespace {

constexpr std::array<std::string_view, kAtomCount> kAtomNames = {
    "SELECT",     "INSERT",    "UPDATE",      "DELETE",   "UNION",
    "UNION_ALL",  "INTERSECT", "EXCEPT",      "DISTINCT", "COLS",
    "FROM",       "WHERE",     "GROUP_BY",    "HAVING",   "ORDER_BY",
    "ASC",        "DESC",      "LIMIT",       "VALUES",   "ROW",
    "SET",        "ASSIGN",    "TABLE_REF",   "ALIAS",    "SUBQUERY",
    "JOIN",       "LEFT_JOIN", "RIGHT_JOIN",  "FULL_JOIN", "CROSS_JOIN",
    "ON",         "COL_ID",    "STAR",        "FUNC",     "CASE",
    "WHEN",       "ELSE",      "NULL",        "AND",      "OR",
    "NOT",        "EQUALS",    "NOT_EQUALS",  "LT",       "LE",
    "GT",         "GE",        "LIKE",        "NOT_LIKE", "IN",
    "NOT_IN",     "IN_LIST",   "IS_NULL",     "IS_NOT_NULL", "BETWEEN",
    "NOT_BETWEEN", "EXISTS",   "PLUS",        "MINUS",    "TIMES",
    "DIV",        "MOD",       "CONCAT",      "NEG",      "IDENT",
    "CONST",      "CNF",       "CLAUSE",
};

}  // namespace

std::string_view atom_name(Atom atom) {
  return kAtomNames[static_cast<std::size_t>(atom)];
}

std::optional<Atom> atom_from_name(std::string_view name) {
  for (int i = 0; i < kAtomCount; ++i) {
    if (kAtomNames[i] == name) return static_cast<Atom>(i);
  }
  return std::nullopt;
}

bool is_comparison(Atom atom) {
  switch (atom) {
    case Atom::kEquals:
    case Atom::kNotEquals:
    case Atom::kLt:
    case Atom::kLe:
    case Atom::kGt:
    case Atom::kGe:
    case Atom::kLike:
    case Atom::kNotLike:
    case Atom::kIn:
    case Atom::kNotIn:
      return true;
    default:
      return false;
  }
}

bool is_connective(Atom atom) { return atom == Atom::kAnd || atom == Atom::kOr; }

bool is_join(Atom atom) {
  switch (atom) {
    case Atom::kJoin:
    case Atom::kLeftJoin:
    case Atom::kRightJoin:
    case Atom::kFullJoin:
    case Atom::kCrossJoin:
      return true;
    default:
      return false;
  }
}

NodeIndex LabeledAst::add_node(Atom atom, std::string text,
                               std::vector<NodeIndex> children) {
  AstNode n;
  n.atom = atom;
  n.text = std::move(text);
  n.children = std::move(children);
  nodes_.push_back(std::move(n));
  return static_cast<NodeIndex>(nodes_.size() - 1);
}

NodeIndex LabeledAst::add_const(std::string text) {
  NodeIndex i = add_node(Atom::kConst, std::move(text));
  nodes_[i].is_const = true;
  return i;
}

std::string LabeledAst::label(NodeIndex i) const {
  const AstNode& n = nodes_[i];
  if (n.atom == Atom::kIdent || n.atom == Atom::kConst) return n.text;
  return std::string(atom_name(n.atom));
}

std::vector<NodeIndex> LabeledAst::post_order() const {
  std::vector<NodeIndex> out;
  if (nodes_.empty()) return out;
  out.reserve(nodes_.size());
  // (node, next child position)
  std::vector<std::pair<NodeIndex, std::size_t>> stack{{root_, 0}};
  while (!stack.empty()) {
    auto& [n, pos] = stack.back();
    const auto& kids = nodes_[n].children;
    if (pos < kids.size()) {
      NodeIndex c = kids[pos++];
      stack.emplace_back(c, 0);
    } else {
      out.push_back(n);
      stack.pop_back();
    }
  }
  return out;
}

std::vector<int> LabeledAst::heights() const {
  std::vector<int> h(nodes_.size(), 0);
  for (NodeIndex n : post_order()) {
    int best = 0;
    for (NodeIndex c : nodes_[n].children) best = std::max(best, h[c] + 1);
    h[n] = best;
  }
  return h;
}

int LabeledAst::depth() const {
  if (nodes_.empty()) return 0;
  return heights()[root_];
}

std::vector<NodeIndex> LabeledAst::parents() const {
  std::vector<NodeIndex> p(nodes_.size());
  for (NodeIndex i = 0; i < nodes_.size(); ++i) p[i] = i;
  for (NodeIndex i = 0; i < nodes_.size(); ++i) {
    for (NodeIndex c : nodes_[i].children) p[c] = i;
  }
  return p;
}

NodeIndex LabeledAst::copy_subtree(const LabeledAst& other, NodeIndex from) {
  const AstNode& src = other.node(from);
  std::vector<NodeIndex> kids;
  kids.reserve(src.children.size());
  for (NodeIndex c : src.children) kids.push_back(copy_subtree(other, c));
  NodeIndex i = add_node(src.atom, src.text, std::move(kids));
  nodes_[i].is_const = src.is_const;
  return i;
}

bool LabeledAst::well_formed() const {
  if (nodes_.empty()) return true;
  if (root_ >= nodes_.size()) return false;
  std::vector<int> seen(nodes_.size(), 0);
  std::vector<NodeIndex> stack{root_};
  while (!stack.empty()) {
    NodeIndex n = stack.back();
    stack.pop_back();
    if (++seen[n] > 1) return false;
    const AstNode& node = nodes_[n];
    if (node.is_const && !node.children.empty()) return false;
    for (NodeIndex c : node.children) {
      if (c >= nodes_.size()) return false;
      stack.push_back(c);
    }
  }
  return true;
}

std::string LabeledAst::to_sexpr(NodeIndex i) const {
  const AstNode& n = nodes_[i];
  std::string out;
  if (n.children.empty() && (n.atom == Atom::kIdent || n.atom == Atom::kConst)) {
    return n.atom == Atom::kConst ? "#" + n.text : n.text;
  }
  out += '(';
  out += atom_name(n.atom);
  if (!n.text.empty()) {
    out += ':';
    out += n.text;
  }
  for (NodeIndex c : n.children) {
    out += ' ';
    out += to_sexpr(c);
  }
  out += ')';
  return out;
}

std::string LabeledAst::to_sexpr() const {
  if (nodes_.empty()) return "()";
  return to_sexpr(root_);
}

bool isomorphic(const LabeledAst& a, const LabeledAst& b) {
  if (a.empty() || b.empty()) return a.empty() && b.empty();
  std::function<bool(NodeIndex, NodeIndex)> eq = [&](NodeIndex x, NodeIndex y) {
    const AstNode& nx = a.node(x);
    const AstNode& ny = b.node(y);
    if (nx.atom != ny.atom || nx.text != ny.text || nx.is_const != ny.is_const ||
        nx.children.size() != ny.children.size()) {
      return false;
    }
    for (std::size_t k = 0; k < nx.children.size(); ++k) {
      if (!eq(nx.children[k], ny.children[k])) return false;
    }
    return true;
  };
  return eq(a.root(), b.root());
}

}  // namespace qlog
