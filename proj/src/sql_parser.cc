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

#include <algorithm>
#include <cctype>

#include "qlog/errors.h"
#include "qlog/sql.h"
#include "sql_lexer.h"

namespace qlog {
namespace {

using internal::lex;
using internal::Token;
using internal::LexResult;
using internal::TokenKind;

constexpr int kMaxNesting = 256;

struct SyntaxError {
  std::size_t offset;
  std::string message;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {
    ast_.reserve(toks_.size());
  }

  LabeledAst parse_statement() {
    NodeIndex root;
    if (is_kw("select") || is_sym("(")) {
      root = parse_query();
    } else if (is_kw("insert")) {
      root = parse_insert();
    } else if (is_kw("update")) {
      root = parse_update();
    } else if (is_kw("delete")) {
      root = parse_delete();
    } else {
      fail("unsupported statement");
    }
    accept_sym(";");
    if (peek().kind != TokenKind::kEnd) fail("unexpected trailing input");
    ast_.set_root(root);
    return std::move(ast_);
  }

 private:
  // Token helpers.
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool is_kw(std::string_view kw, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::kKeyword && t.text == kw;
  }
  bool is_sym(std::string_view sym, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::kSymbol && t.text == sym;
  }
  bool accept_kw(std::string_view kw) {
    if (!is_kw(kw)) return false;
    next();
    return true;
  }
  bool accept_sym(std::string_view sym) {
    if (!is_sym(sym)) return false;
    next();
    return true;
  }
  void expect_kw(std::string_view kw) {
    if (!accept_kw(kw)) fail("expected '" + std::string(kw) + "'");
  }
  void expect_sym(std::string_view sym) {
    if (!accept_sym(sym)) fail("expected '" + std::string(sym) + "'");
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string near = t.kind == TokenKind::kEnd ? "end of input" : "'" + t.text + "'";
    throw SyntaxError{t.offset, msg + " near " + near};
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p_(p) {
      if (++p_.depth_ > kMaxNesting) p_.fail("nesting too deep");
    }
    ~DepthGuard() { --p_.depth_; }
    Parser& p_;
  };

  NodeIndex node(Atom atom, std::vector<NodeIndex> kids = {}) {
    return ast_.add_node(atom, {}, std::move(kids));
  }
  NodeIndex ident(std::string text) { return ast_.add_node(Atom::kIdent, std::move(text)); }

  bool at_ident() const { return peek().kind == TokenKind::kIdent; }

  // a.b.c, returned joined by '.'.
  std::string parse_qualified_name() {
    if (!at_ident()) fail("expected identifier");
    std::string name = next().text;
    while (is_sym(".") && peek(1).kind == TokenKind::kIdent) {
      next();
      name += '.';
      name += next().text;
    }
    return name;
  }

  // --- Queries ----------------------------------------------------------

  NodeIndex parse_query() {
    DepthGuard guard(*this);
    NodeIndex result = parse_query_term();
    bool own_setop = false;
    while (is_kw("union") || is_kw("intersect") || is_kw("except")) {
      Atom op;
      if (accept_kw("union")) {
        op = accept_kw("all") ? Atom::kUnionAll : Atom::kUnion;
      } else if (accept_kw("intersect")) {
        op = Atom::kIntersect;
      } else {
        next();
        op = Atom::kExcept;
      }
      accept_kw("distinct");
      NodeIndex rhs = parse_query_term();
      if (own_setop && ast_.node(result).atom == op) {
        ast_.mutable_node(result).children.push_back(rhs);
      } else {
        result = node(op, {result, rhs});
        own_setop = true;
      }
    }
    return result;
  }

  NodeIndex parse_query_term() {
    if (is_sym("(")) {
      next();
      NodeIndex q = parse_query();
      expect_sym(")");
      return q;
    }
    return parse_select_core();
  }

  NodeIndex parse_select_core() {
    DepthGuard guard(*this);
    expect_kw("select");
    std::vector<NodeIndex> kids;
    if (accept_kw("distinct")) {
      kids.push_back(node(Atom::kDistinct));
    } else {
      accept_kw("all");
    }
    kids.push_back(parse_select_list());
    if (accept_kw("from")) {
      std::vector<NodeIndex> items{parse_from_item()};
      while (accept_sym(",")) items.push_back(parse_from_item());
      kids.push_back(node(Atom::kFrom, std::move(items)));
    }
    if (accept_kw("where")) kids.push_back(node(Atom::kWhere, {parse_expr()}));
    if (is_kw("group")) {
      next();
      expect_kw("by");
      std::vector<NodeIndex> items{parse_expr()};
      while (accept_sym(",")) items.push_back(parse_expr());
      kids.push_back(node(Atom::kGroupBy, std::move(items)));
    }
    if (accept_kw("having")) kids.push_back(node(Atom::kHaving, {parse_expr()}));
    if (is_kw("order")) {
      next();
      expect_kw("by");
      std::vector<NodeIndex> items;
      do {
        NodeIndex e = parse_expr();
        Atom dir = Atom::kAsc;
        if (accept_kw("desc")) {
          dir = Atom::kDesc;
        } else {
          accept_kw("asc");
        }
        items.push_back(node(dir, {e}));
      } while (accept_sym(","));
      kids.push_back(node(Atom::kOrderBy, std::move(items)));
    }
    if (accept_kw("limit")) {
      std::vector<NodeIndex> items{parse_limit_value()};
      if (accept_sym(",") || accept_kw("offset")) items.push_back(parse_limit_value());
      kids.push_back(node(Atom::kLimit, std::move(items)));
    }
    return node(Atom::kSelect, std::move(kids));
  }

  NodeIndex parse_limit_value() {
    const Token& t = peek();
    if (t.kind == TokenKind::kNumber || t.kind == TokenKind::kPlaceholder) {
      return ast_.add_const(next().text);
    }
    fail("expected numeric limit");
  }

  NodeIndex parse_select_list() {
    std::vector<NodeIndex> items;
    do {
      items.push_back(parse_select_item());
    } while (accept_sym(","));
    return node(Atom::kCols, std::move(items));
  }

  bool at_qualified_star() const {
    std::size_t k = 0;
    if (peek(k).kind != TokenKind::kIdent) return false;
    ++k;
    while (is_sym(".", k)) {
      if (is_sym("*", k + 1)) return true;
      if (peek(k + 1).kind != TokenKind::kIdent) return false;
      k += 2;
    }
    return false;
  }

  NodeIndex parse_select_item() {
    if (accept_sym("*")) return node(Atom::kStar);
    if (at_qualified_star()) {
      std::string q = parse_qualified_name();
      expect_sym(".");
      expect_sym("*");
      return node(Atom::kStar, {ident(std::move(q))});
    }
    NodeIndex e = parse_expr();
    return parse_optional_alias(e);
  }

  NodeIndex parse_optional_alias(NodeIndex target) {
    if (accept_kw("as")) {
      if (!at_ident() && peek().kind != TokenKind::kString) fail("expected alias");
      std::string name = next().text;
      if (name.size() >= 2 && name.front() == '\'') name = name.substr(1, name.size() - 2);
      return node(Atom::kAlias, {target, ident(std::move(name))});
    }
    if (at_ident()) return node(Atom::kAlias, {target, ident(next().text)});
    return target;
  }

  // --- FROM -------------------------------------------------------------

  std::optional<Atom> peek_join() const {
    if (is_kw("join")) return Atom::kJoin;
    if (is_kw("inner") && is_kw("join", 1)) return Atom::kJoin;
    if (is_kw("cross") && is_kw("join", 1)) return Atom::kCrossJoin;
    for (auto [kw, atom] : {std::pair{"left", Atom::kLeftJoin},
                            std::pair{"right", Atom::kRightJoin},
                            std::pair{"full", Atom::kFullJoin}}) {
      if (is_kw(kw) && (is_kw("join", 1) || (is_kw("outer", 1) && is_kw("join", 2)))) {
        return atom;
      }
    }
    return std::nullopt;
  }

  NodeIndex parse_from_item() {
    DepthGuard guard(*this);
    NodeIndex left = parse_table_primary();
    while (auto join = peek_join()) {
      while (!accept_kw("join")) next();
      NodeIndex right = parse_table_primary();
      std::vector<NodeIndex> kids{left, right};
      if (*join != Atom::kCrossJoin) {
        expect_kw("on");
        kids.push_back(node(Atom::kOn, {parse_expr()}));
      }
      left = node(*join, std::move(kids));
    }
    return left;
  }

  NodeIndex parse_table_primary() {
    if (is_sym("(")) {
      next();
      if (is_kw("select") || is_sym("(")) {
        // Either a derived table or a parenthesized join; a derived table
        // starts with SELECT, possibly behind more parentheses.
        std::size_t k = 0;
        while (is_sym("(", k)) ++k;
        if (is_kw("select", k)) {
          NodeIndex sub = node(Atom::kSubquery, {parse_query()});
          expect_sym(")");
          return parse_optional_alias(sub);
        }
      }
      NodeIndex inner = parse_from_item();
      expect_sym(")");
      return inner;
    }
    NodeIndex table = node(Atom::kTableRef, {ident(parse_qualified_name())});
    return parse_optional_alias(table);
  }

  // --- Expressions ------------------------------------------------------

  NodeIndex parse_expr() {
    DepthGuard guard(*this);
    return parse_or();
  }

  NodeIndex parse_or() {
    NodeIndex first = parse_and();
    if (!is_kw("or")) return first;
    std::vector<NodeIndex> kids{first};
    while (accept_kw("or")) kids.push_back(parse_and());
    return node(Atom::kOr, std::move(kids));
  }

  NodeIndex parse_and() {
    NodeIndex first = parse_not();
    if (!is_kw("and")) return first;
    std::vector<NodeIndex> kids{first};
    while (accept_kw("and")) kids.push_back(parse_not());
    return node(Atom::kAnd, std::move(kids));
  }

  NodeIndex parse_not() {
    if (is_kw("not") && !is_kw("exists", 1)) {
      next();
      DepthGuard guard(*this);
      return node(Atom::kNot, {parse_not()});
    }
    if (is_kw("not")) {
      next();
      return node(Atom::kNot, {parse_predicate()});
    }
    return parse_predicate();
  }

  NodeIndex parse_predicate() {
    NodeIndex lhs = parse_additive();
    static const std::pair<std::string_view, Atom> kCmp[] = {
        {"=", Atom::kEquals}, {"!=", Atom::kNotEquals}, {"<>", Atom::kNotEquals},
        {"<", Atom::kLt},     {"<=", Atom::kLe},        {">", Atom::kGt},
        {">=", Atom::kGe},
    };
    for (const auto& [sym, atom] : kCmp) {
      if (accept_sym(sym)) return node(atom, {lhs, parse_additive()});
    }
    bool negated = false;
    if (is_kw("not") && (is_kw("in", 1) || is_kw("like", 1) || is_kw("between", 1))) {
      next();
      negated = true;
    }
    if (accept_kw("in")) {
      expect_sym("(");
      NodeIndex rhs;
      if (is_kw("select")) {
        rhs = node(Atom::kSubquery, {parse_query()});
      } else {
        std::vector<NodeIndex> items{parse_expr()};
        while (accept_sym(",")) items.push_back(parse_expr());
        rhs = node(Atom::kInList, std::move(items));
      }
      expect_sym(")");
      return node(negated ? Atom::kNotIn : Atom::kIn, {lhs, rhs});
    }
    if (accept_kw("like")) {
      return node(negated ? Atom::kNotLike : Atom::kLike, {lhs, parse_additive()});
    }
    if (accept_kw("between")) {
      NodeIndex lo = parse_additive();
      expect_kw("and");
      NodeIndex hi = parse_additive();
      return node(negated ? Atom::kNotBetween : Atom::kBetween, {lhs, lo, hi});
    }
    if (negated) fail("expected IN, LIKE or BETWEEN after NOT");
    if (accept_kw("is")) {
      bool is_not = accept_kw("not");
      expect_kw("null");
      return node(is_not ? Atom::kIsNotNull : Atom::kIsNull, {lhs});
    }
    return lhs;
  }

  NodeIndex parse_additive() {
    NodeIndex lhs = parse_multiplicative();
    for (;;) {
      Atom op;
      if (accept_sym("+")) {
        op = Atom::kPlus;
      } else if (accept_sym("-")) {
        op = Atom::kMinus;
      } else if (accept_sym("||")) {
        op = Atom::kConcat;
      } else {
        return lhs;
      }
      lhs = node(op, {lhs, parse_multiplicative()});
    }
  }

  NodeIndex parse_multiplicative() {
    NodeIndex lhs = parse_unary();
    for (;;) {
      Atom op;
      if (accept_sym("*")) {
        op = Atom::kTimes;
      } else if (accept_sym("/")) {
        op = Atom::kDiv;
      } else if (accept_sym("%")) {
        op = Atom::kMod;
      } else {
        return lhs;
      }
      lhs = node(op, {lhs, parse_unary()});
    }
  }

  NodeIndex parse_unary() {
    if (accept_sym("-")) {
      DepthGuard guard(*this);
      return node(Atom::kNeg, {parse_unary()});
    }
    if (accept_sym("+")) return parse_unary();
    return parse_primary();
  }

  NodeIndex parse_primary() {
    DepthGuard guard(*this);
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::kNumber:
      case TokenKind::kString:
      case TokenKind::kPlaceholder:
        return ast_.add_const(next().text);
      case TokenKind::kKeyword:
        if (accept_kw("null")) return node(Atom::kNull);
        if (accept_kw("exists")) {
          expect_sym("(");
          NodeIndex sub = node(Atom::kSubquery, {parse_query()});
          expect_sym(")");
          return node(Atom::kExists, {sub});
        }
        if (is_kw("case")) return parse_case();
        fail("unexpected keyword");
      case TokenKind::kSymbol:
        if (accept_sym("(")) {
          if (is_kw("select")) {
            NodeIndex sub = node(Atom::kSubquery, {parse_query()});
            expect_sym(")");
            return sub;
          }
          NodeIndex e = parse_expr();
          expect_sym(")");
          return e;
        }
        fail("unexpected symbol");
      case TokenKind::kIdent:
        break;
      case TokenKind::kEnd:
        fail("unexpected end of input");
    }
    // Typed literals: DATE '2020-01-01', TIMESTAMP '...'.
    if (!t.quoted && (t.text == "date" || t.text == "timestamp" || t.text == "time" ||
                      t.text == "interval") &&
        peek(1).kind == TokenKind::kString) {
      std::string kw = next().text;
      return ast_.add_const(kw + " " + next().text);
    }
    if (!t.quoted && (t.text == "true" || t.text == "false")) {
      return ast_.add_const(next().text);
    }
    std::string name = parse_qualified_name();
    if (accept_sym("(")) {
      std::vector<NodeIndex> kids{ident(std::move(name))};
      if (accept_kw("distinct")) kids.push_back(node(Atom::kDistinct));
      if (accept_sym("*")) {
        kids.push_back(node(Atom::kStar));
      } else if (!is_sym(")")) {
        kids.push_back(parse_expr());
        while (accept_sym(",")) kids.push_back(parse_expr());
      }
      expect_sym(")");
      return node(Atom::kFunc, std::move(kids));
    }
    return node(Atom::kColId, {ident(std::move(name))});
  }

  NodeIndex parse_case() {
    expect_kw("case");
    std::vector<NodeIndex> kids;
    if (!is_kw("when")) kids.push_back(parse_expr());
    if (!is_kw("when")) fail("expected WHEN");
    while (accept_kw("when")) {
      NodeIndex cond = parse_expr();
      expect_kw("then");
      kids.push_back(node(Atom::kWhen, {cond, parse_expr()}));
    }
    if (accept_kw("else")) kids.push_back(node(Atom::kElse, {parse_expr()}));
    expect_kw("end");
    return node(Atom::kCase, std::move(kids));
  }

  // --- DML --------------------------------------------------------------

  NodeIndex parse_insert() {
    expect_kw("insert");
    expect_kw("into");
    std::vector<NodeIndex> kids{node(Atom::kTableRef, {ident(parse_qualified_name())})};
    if (is_sym("(") && !is_kw("select", 1)) {
      next();
      std::vector<NodeIndex> cols;
      do {
        cols.push_back(node(Atom::kColId, {ident(parse_qualified_name())}));
      } while (accept_sym(","));
      expect_sym(")");
      kids.push_back(node(Atom::kCols, std::move(cols)));
    }
    if (accept_kw("values")) {
      std::vector<NodeIndex> rows;
      do {
        expect_sym("(");
        std::vector<NodeIndex> vals{parse_expr()};
        while (accept_sym(",")) vals.push_back(parse_expr());
        expect_sym(")");
        rows.push_back(node(Atom::kRow, std::move(vals)));
      } while (accept_sym(","));
      kids.push_back(node(Atom::kValues, std::move(rows)));
    } else if (is_kw("select") || is_sym("(")) {
      kids.push_back(parse_query());
    } else {
      fail("expected VALUES or SELECT");
    }
    return node(Atom::kInsert, std::move(kids));
  }

  NodeIndex parse_update() {
    expect_kw("update");
    NodeIndex table = parse_optional_alias(
        node(Atom::kTableRef, {ident(parse_qualified_name())}));
    expect_kw("set");
    std::vector<NodeIndex> assigns;
    do {
      NodeIndex col = node(Atom::kColId, {ident(parse_qualified_name())});
      expect_sym("=");
      assigns.push_back(node(Atom::kAssign, {col, parse_expr()}));
    } while (accept_sym(","));
    std::vector<NodeIndex> kids{table, node(Atom::kSet, std::move(assigns))};
    if (accept_kw("where")) kids.push_back(node(Atom::kWhere, {parse_expr()}));
    return node(Atom::kUpdate, std::move(kids));
  }

  NodeIndex parse_delete() {
    expect_kw("delete");
    expect_kw("from");
    NodeIndex table = parse_optional_alias(
        node(Atom::kTableRef, {ident(parse_qualified_name())}));
    std::vector<NodeIndex> kids{node(Atom::kFrom, {table})};
    if (accept_kw("where")) kids.push_back(node(Atom::kWhere, {parse_expr()}));
    return node(Atom::kDelete, std::move(kids));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  LabeledAst ast_;
};

StatementKind kind_of_root(Atom atom) {
  switch (atom) {
    case Atom::kSelect:
      return StatementKind::kSelect;
    case Atom::kUnion:
    case Atom::kUnionAll:
    case Atom::kIntersect:
    case Atom::kExcept:
      return StatementKind::kUnion;
    case Atom::kInsert:
      return StatementKind::kInsert;
    case Atom::kUpdate:
      return StatementKind::kUpdate;
    case Atom::kDelete:
      return StatementKind::kDelete;
    default:
      return StatementKind::kOther;
  }
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
}

}  // namespace

std::string_view statement_kind_name(StatementKind kind) {
  switch (kind) {
    case StatementKind::kSelect:
      return "SELECT";
    case StatementKind::kInsert:
      return "INSERT";
    case StatementKind::kUpdate:
      return "UPDATE";
    case StatementKind::kDelete:
      return "DELETE";
    case StatementKind::kUnion:
      return "UNION";
    case StatementKind::kOther:
      break;
  }
  return "OTHER";
}

std::optional<StatementKind> statement_kind_from_name(std::string_view name) {
  for (auto k : {StatementKind::kSelect, StatementKind::kInsert, StatementKind::kUpdate,
                 StatementKind::kDelete, StatementKind::kUnion, StatementKind::kOther}) {
    if (statement_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

ParseOutcome parse(std::string_view sql_text) {
  if (blank(sql_text)) throw PreconditionError("parse: empty SQL text");
  ParseOutcome out;
  internal::LexResult lexed = lex(sql_text);
  if (lexed.error_offset) {
    out.error = ParseDiagnostic{*lexed.error_offset, lexed.error};
    return out;
  }
  try {
    Parser p(std::move(lexed.tokens));
    LabeledAst ast = p.parse_statement();
    out.statement_kind = kind_of_root(ast.node(ast.root()).atom);
    out.ast = std::move(ast);
  } catch (const SyntaxError& e) {
    out.error = ParseDiagnostic{e.offset, e.message};
  }
  return out;
}

std::optional<std::string> shape_key(std::string_view sql_text) {
  LexResult lexed = lex(sql_text);
  if (lexed.error_offset) return std::nullopt;
  std::string key;
  key.reserve(sql_text.size());
  const Token* prev = nullptr;
  for (const Token& t : lexed.tokens) {
    key += static_cast<char>('A' + static_cast<int>(t.kind) * 2 + (t.quoted ? 1 : 0));
    bool literal = t.kind == TokenKind::kNumber || t.kind == TokenKind::kPlaceholder ||
                   t.kind == TokenKind::kString;
    // A string after AS names an alias; its text is structural.
    bool alias = t.kind == TokenKind::kString && prev != nullptr &&
                 prev->kind == TokenKind::kKeyword && prev->text == "as";
    if (!literal || alias) {
      key += std::to_string(t.text.size());
      key += ':';
      key += t.text;
    }
    prev = &t;
  }
  return key;
}

StatementKind classify(std::string_view sql_text) {
  internal::LexResult lexed = lex(sql_text);
  const auto& toks = lexed.tokens;
  std::size_t i = 0;
  while (i < toks.size() && toks[i].kind == TokenKind::kSymbol && toks[i].text == "(") ++i;
  if (i >= toks.size() || toks[i].kind != TokenKind::kKeyword) return StatementKind::kOther;
  const std::string& kw = toks[i].text;
  if (kw == "insert") return StatementKind::kInsert;
  if (kw == "update") return StatementKind::kUpdate;
  if (kw == "delete") return StatementKind::kDelete;
  if (kw != "select") return StatementKind::kOther;
  int depth = 0;
  for (const Token& t : toks) {
    if (t.kind == TokenKind::kSymbol) {
      if (t.text == "(") ++depth;
      if (t.text == ")") --depth;
    } else if (t.kind == TokenKind::kKeyword && depth <= static_cast<int>(i) &&
               (t.text == "union" || t.text == "intersect" || t.text == "except")) {
      return StatementKind::kUnion;
    }
  }
  return StatementKind::kSelect;
}

}  // namespace qlog
