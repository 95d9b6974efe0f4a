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

#include <cctype>

#include "qlog/sql.h"
#include "sql_lexer.h"

namespace qlog {
namespace {

// Binding strength; a child printed in a slot that requires a higher value is
// parenthesized.
enum Prec : int {
  kPrecOr = 1,
  kPrecAnd = 2,
  kPrecNot = 3,
  kPrecCmp = 4,
  kPrecAdd = 5,
  kPrecMul = 6,
  kPrecUnary = 7,
  kPrecPrimary = 8,
};

int precedence(Atom a) {
  switch (a) {
    case Atom::kOr:
    case Atom::kCnf:
      return kPrecOr;
    case Atom::kAnd:
      return kPrecAnd;
    case Atom::kNot:
      return kPrecNot;
    case Atom::kPlus:
    case Atom::kMinus:
    case Atom::kConcat:
      return kPrecAdd;
    case Atom::kTimes:
    case Atom::kDiv:
    case Atom::kMod:
      return kPrecMul;
    case Atom::kNeg:
      return kPrecUnary;
    case Atom::kClause:
      return kPrecOr;
    default:
      return is_comparison(a) || a == Atom::kBetween || a == Atom::kNotBetween ||
                     a == Atom::kIsNull || a == Atom::kIsNotNull
                 ? kPrecCmp
                 : kPrecPrimary;
  }
}

bool plain_part(std::string_view part) {
  if (part.empty() || part == "*") return !part.empty();
  char c0 = part.front();
  if (std::isdigit(static_cast<unsigned char>(c0)) || c0 == '$') return false;
  for (char c : part) {
    bool ok = std::islower(static_cast<unsigned char>(c)) ||
              std::isdigit(static_cast<unsigned char>(c)) || c == '_' || c == '$' ||
              c == '@' || c == '#' || static_cast<unsigned char>(c) >= 0x80;
    if (!ok) return false;
  }
  if (internal::is_reserved(part)) return false;
  return part != "true" && part != "false";
}

std::string quote_ident(std::string_view name) {
  std::string out;
  std::size_t start = 0;
  for (;;) {
    std::size_t dot = name.find('.', start);
    std::string_view part =
        name.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
    if (start > 0) out += '.';
    if (plain_part(part)) {
      out += part;
    } else {
      out += '"';
      out += part;
      out += '"';
    }
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return out;
}

class Printer {
 public:
  explicit Printer(const LabeledAst& ast) : ast_(ast) {}

  std::string print(NodeIndex i) {
    const AstNode& n = ast_.node(i);
    const auto& k = n.children;
    switch (n.atom) {
      case Atom::kSelect:
        return select(n);
      case Atom::kUnion:
      case Atom::kUnionAll:
      case Atom::kIntersect:
      case Atom::kExcept: {
        std::string sep = n.atom == Atom::kUnion      ? " union "
                          : n.atom == Atom::kUnionAll ? " union all "
                          : n.atom == Atom::kIntersect ? " intersect "
                                                       : " except ";
        std::string out;
        for (std::size_t c = 0; c < k.size(); ++c) {
          if (c) out += sep;
          Atom ca = ast_.node(k[c]).atom;
          bool setop = ca == Atom::kUnion || ca == Atom::kUnionAll ||
                       ca == Atom::kIntersect || ca == Atom::kExcept;
          out += setop ? "(" + print(k[c]) + ")" : print(k[c]);
        }
        return out;
      }
      case Atom::kInsert: {
        std::string out = "insert into " + print(k[0]);
        for (std::size_t c = 1; c < k.size(); ++c) {
          const AstNode& part = ast_.node(k[c]);
          if (part.atom == Atom::kCols) {
            out += " (" + list(part.children) + ")";
          } else {
            out += " " + print(k[c]);
          }
        }
        return out;
      }
      case Atom::kValues: {
        std::string out = "values ";
        for (std::size_t c = 0; c < k.size(); ++c) {
          if (c) out += ", ";
          out += "(" + list(ast_.node(k[c]).children) + ")";
        }
        return out;
      }
      case Atom::kUpdate: {
        std::string out = "update " + print(k[0]) + " set " + list(ast_.node(k[1]).children);
        if (k.size() > 2) out += " " + print(k[2]);
        return out;
      }
      case Atom::kAssign:
        return print(k[0]) + " = " + print(k[1]);
      case Atom::kDelete: {
        std::string out = "delete " + print(k[0]);
        if (k.size() > 1) out += " " + print(k[1]);
        return out;
      }
      case Atom::kDistinct:
        return "distinct";
      case Atom::kCols:
        return list(k);
      case Atom::kFrom:
        return "from " + list(k);
      case Atom::kWhere:
        return "where " + print(k[0]);
      case Atom::kGroupBy:
        return "group by " + list(k);
      case Atom::kHaving:
        return "having " + print(k[0]);
      case Atom::kOrderBy:
        return "order by " + list(k);
      case Atom::kAsc:
        return print(k[0]) + " asc";
      case Atom::kDesc:
        return print(k[0]) + " desc";
      case Atom::kLimit:
        return "limit " + print(k[0]) + (k.size() > 1 ? " offset " + print(k[1]) : "");
      case Atom::kTableRef:
        return print(k[0]);
      case Atom::kAlias:
        return print(k[0]) + " as " + print(k[1]);
      case Atom::kSubquery:
        return "(" + print(k[0]) + ")";
      case Atom::kJoin:
      case Atom::kLeftJoin:
      case Atom::kRightJoin:
      case Atom::kFullJoin:
      case Atom::kCrossJoin: {
        std::string_view kw = n.atom == Atom::kJoin       ? " join "
                              : n.atom == Atom::kLeftJoin ? " left join "
                              : n.atom == Atom::kRightJoin ? " right join "
                              : n.atom == Atom::kFullJoin  ? " full join "
                                                           : " cross join ";
        std::string right = print(k[1]);
        if (is_join(ast_.node(k[1]).atom)) right = "(" + right + ")";
        std::string out = print(k[0]) + std::string(kw) + right;
        if (k.size() > 2) out += " " + print(k[2]);
        return out;
      }
      case Atom::kOn:
        return "on " + print(k[0]);
      case Atom::kColId:
        return print(k[0]);
      case Atom::kStar:
        return k.empty() ? "*" : print(k[0]) + ".*";
      case Atom::kFunc: {
        std::string out = print(k[0]) + "(";
        std::size_t c = 1;
        if (c < k.size() && ast_.node(k[c]).atom == Atom::kDistinct) {
          out += "distinct ";
          ++c;
        }
        for (std::size_t first = c; c < k.size(); ++c) {
          if (c > first) out += ", ";
          out += print(k[c]);
        }
        return out + ")";
      }
      case Atom::kCase: {
        std::string out = "case";
        for (NodeIndex c : k) {
          const AstNode& part = ast_.node(c);
          if (part.atom == Atom::kWhen) {
            out += " when " + print(part.children[0]) + " then " + print(part.children[1]);
          } else if (part.atom == Atom::kElse) {
            out += " else " + print(part.children[0]);
          } else {
            out += " " + print(c);
          }
        }
        return out + " end";
      }
      case Atom::kNull:
        return "null";
      case Atom::kAnd:
      case Atom::kOr:
        return nary(k, n.atom == Atom::kAnd ? " and " : " or ", precedence(n.atom) + 1);
      case Atom::kCnf:
        return nary(k, " and ", kPrecAnd + 1);
      case Atom::kClause:
        return k.size() == 1 ? print(k[0]) : "(" + nary(k, " or ", kPrecOr + 1) + ")";
      case Atom::kNot:
        return "not " + slot(k[0], kPrecNot);
      case Atom::kEquals:
        return binary(k, " = ", kPrecAdd, kPrecAdd);
      case Atom::kNotEquals:
        return binary(k, " != ", kPrecAdd, kPrecAdd);
      case Atom::kLt:
        return binary(k, " < ", kPrecAdd, kPrecAdd);
      case Atom::kLe:
        return binary(k, " <= ", kPrecAdd, kPrecAdd);
      case Atom::kGt:
        return binary(k, " > ", kPrecAdd, kPrecAdd);
      case Atom::kGe:
        return binary(k, " >= ", kPrecAdd, kPrecAdd);
      case Atom::kLike:
        return binary(k, " like ", kPrecAdd, kPrecAdd);
      case Atom::kNotLike:
        return binary(k, " not like ", kPrecAdd, kPrecAdd);
      case Atom::kIn:
      case Atom::kNotIn: {
        std::string rhs = print(k[1]);
        if (ast_.node(k[1]).atom == Atom::kInList) rhs = "(" + rhs + ")";
        return slot(k[0], kPrecAdd) + (n.atom == Atom::kIn ? " in " : " not in ") + rhs;
      }
      case Atom::kInList:
        return list(k);
      case Atom::kIsNull:
        return slot(k[0], kPrecAdd) + " is null";
      case Atom::kIsNotNull:
        return slot(k[0], kPrecAdd) + " is not null";
      case Atom::kBetween:
      case Atom::kNotBetween:
        return slot(k[0], kPrecAdd) +
               (n.atom == Atom::kBetween ? " between " : " not between ") +
               slot(k[1], kPrecAdd) + " and " + slot(k[2], kPrecAdd);
      case Atom::kExists:
        return "exists " + print(k[0]);
      case Atom::kPlus:
        return binary(k, " + ", kPrecAdd, kPrecMul);
      case Atom::kMinus:
        return binary(k, " - ", kPrecAdd, kPrecMul);
      case Atom::kConcat:
        return binary(k, " || ", kPrecAdd, kPrecMul);
      case Atom::kTimes:
        return binary(k, " * ", kPrecMul, kPrecUnary);
      case Atom::kDiv:
        return binary(k, " / ", kPrecMul, kPrecUnary);
      case Atom::kMod:
        return binary(k, " % ", kPrecMul, kPrecUnary);
      case Atom::kNeg: {
        std::string inner = slot(k[0], kPrecUnary);
        if (!inner.empty() && inner.front() == '-') inner = "(" + inner + ")";
        return "-" + inner;
      }
      case Atom::kIdent:
        return quote_ident(n.text);
      case Atom::kConst:
        return n.text;
      case Atom::kWhen:
        return "when " + print(k[0]) + " then " + print(k[1]);
      case Atom::kElse:
        return "else " + print(k[0]);
      case Atom::kRow:
        return "(" + list(k) + ")";
      case Atom::kSet:
        return "set " + list(k);
    }
    return {};
  }

 private:
  std::string select(const AstNode& n) {
    std::string out = "select";
    for (NodeIndex c : n.children) {
      out += ' ';
      out += print(c);
    }
    return out;
  }

  std::string list(const std::vector<NodeIndex>& items) {
    std::string out;
    for (std::size_t c = 0; c < items.size(); ++c) {
      if (c) out += ", ";
      out += print(items[c]);
    }
    return out;
  }

  std::string slot(NodeIndex i, int required) {
    std::string s = print(i);
    return precedence(ast_.node(i).atom) < required ? "(" + s + ")" : s;
  }

  std::string binary(const std::vector<NodeIndex>& k, std::string_view op, int left,
                     int right) {
    return slot(k[0], left) + std::string(op) + slot(k[1], right);
  }

  std::string nary(const std::vector<NodeIndex>& k, std::string_view sep, int required) {
    std::string out;
    for (std::size_t c = 0; c < k.size(); ++c) {
      if (c) out += sep;
      out += slot(k[c], required);
    }
    return out;
  }

  const LabeledAst& ast_;
};

}  // namespace

std::string to_sql(const LabeledAst& ast, NodeIndex node) {
  return Printer(ast).print(node);
}

std::string to_sql(const LabeledAst& ast) {
  if (ast.empty()) return {};
  return to_sql(ast, ast.root());
}

}  // namespace qlog
