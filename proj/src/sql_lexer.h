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

#ifndef QLOG_SRC_SQL_LEXER_H_
#define QLOG_SRC_SQL_LEXER_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qlog::internal {

enum class TokenKind {
  kIdent,    // bare or quoted identifier, lower-cased
  kKeyword,  // reserved word, lower-cased
  kNumber,
  kString,   // text includes the surrounding quotes
  kPlaceholder,
  kSymbol,
  kEnd,
};

struct Token {
  TokenKind kind = TokenKind::kEnd;
  std::string text;
  std::size_t offset = 0;
  bool quoted = false;  // identifiers written as "x", `x` or [x]
};

struct LexResult {
  std::vector<Token> tokens;  // always terminated by kEnd
  std::optional<std::size_t> error_offset;
  std::string error;
};

LexResult lex(std::string_view text);

bool is_reserved(std::string_view lower_word);

}  // namespace qlog::internal

#endif  // QLOG_SRC_SQL_LEXER_H_
