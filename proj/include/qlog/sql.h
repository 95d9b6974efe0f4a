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

// SQL front end: a recursive-descent parser for a generic SQL subset that
// produces LabeledAst trees, a keyword-based statement classifier, and a
// canonical single-line printer.
//
// Supported surface: SELECT [DISTINCT] with star / qualified-star / expression
// projections and aliases, FROM lists with [INNER|LEFT|RIGHT|FULL|CROSS] JOIN
// ... ON, derived tables, WHERE / GROUP BY / HAVING / ORDER BY ASC|DESC /
// LIMIT [OFFSET], AND / OR / NOT, comparisons, [NOT] IN (list | subquery),
// [NOT] LIKE, [NOT] BETWEEN, IS [NOT] NULL, EXISTS, CASE, function calls,
// arithmetic, UNION [ALL] / INTERSECT / EXCEPT, and shallow INSERT / UPDATE /
// DELETE. Keywords and identifiers are case-folded to lower case.

#ifndef QLOG_SQL_H_
#define QLOG_SQL_H_

#include <optional>
#include <string>
#include <string_view>

#include "qlog/ast.h"

namespace qlog {

enum class StatementKind { kSelect, kInsert, kUpdate, kDelete, kUnion, kOther };

std::string_view statement_kind_name(StatementKind kind);
std::optional<StatementKind> statement_kind_from_name(std::string_view name);

struct ParseDiagnostic {
  std::size_t offset = 0;  // byte offset into the input
  std::string message;
};

struct ParseOutcome {
  StatementKind statement_kind = StatementKind::kOther;
  std::optional<LabeledAst> ast;
  std::optional<ParseDiagnostic> error;

  bool ok() const { return ast.has_value(); }
};

// Parses one statement. Throws PreconditionError when `sql_text` is empty or
// whitespace-only; every other failure is reported through
// ParseOutcome::error with statement_kind kOther.
ParseOutcome parse(std::string_view sql_text);

// Key over the token stream with literal values abstracted away. Statements
// with equal keys parse to the same outcome, up to constant values. nullopt
// when the text does not lex.
std::optional<std::string> shape_key(std::string_view sql_text);

// Classifies a statement by its leading keywords without a full parse. A
// top-level UNION / INTERSECT / EXCEPT in a SELECT yields kUnion. Never throws.
StatementKind classify(std::string_view sql_text);

// Canonical single-line lower-case SQL for a parsed (or skeletonized) tree.
// Re-parsing the output yields an isomorphic tree.
std::string to_sql(const LabeledAst& ast);
// Same, for the subtree rooted at `node` (expression or clause fragment).
std::string to_sql(const LabeledAst& ast, NodeIndex node);

}  // namespace qlog

#endif  // QLOG_SQL_H_
