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

#include "sql_lexer.h"

#include <algorithm>
#include <array>

namespace qlog::internal {
namespace {

constexpr std::string_view kReserved[] = {
    "all",    "and",      "as",     "asc",    "between", "by",     "case",
    "cross",  "delete",   "desc",   "distinct", "else",  "end",    "except",
    "exists", "from",     "full",   "group",  "having",  "in",     "inner",
    "insert", "intersect", "into",  "is",     "join",    "left",   "like",
    "limit",  "not",      "null",   "offset", "on",      "or",     "order",
    "outer",  "right",    "select", "set",    "then",    "union",  "update",
    "values", "when",     "where",  "with",   "exec",
};

// ASCII-only classification; the locale-aware <cctype> calls dominate lexing
// time otherwise.
bool is_alpha(char c) { return (c | 0x20) >= 'a' && (c | 0x20) <= 'z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_space(char c) { return c == ' ' || (c >= '\t' && c <= '\r'); }

char lower(char c) { return c >= 'A' && c <= 'Z' ? static_cast<char>(c | 0x20) : c; }

bool ident_start(char c) {
  return is_alpha(c) || c == '_' || c == '@' || c == '#' || static_cast<unsigned char>(c) >= 0x80;
}

bool ident_char(char c) {
  return is_alpha(c) || is_digit(c) || c == '_' || c == '$' || c == '@' || c == '#' ||
         static_cast<unsigned char>(c) >= 0x80;
}

// Reserved words bucketed by first letter; lookups compare only a handful of
// candidates.
const std::array<std::vector<std::string_view>, 26>& reserved_buckets() {
  static const auto buckets = [] {
    std::array<std::vector<std::string_view>, 26> b;
    for (std::string_view w : kReserved) b[w[0] - 'a'].push_back(w);
    return b;
  }();
  return buckets;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), lower);
  return out;
}

}  // namespace

bool is_reserved(std::string_view lower_word) {
  if (lower_word.size() < 2 || lower_word[0] < 'a' || lower_word[0] > 'z') return false;
  for (std::string_view w : reserved_buckets()[lower_word[0] - 'a']) {
    if (w == lower_word) return true;
  }
  return false;
}

LexResult lex(std::string_view s) {
  LexResult r;
  auto fail = [&](std::size_t at, std::string msg) {
    r.error_offset = at;
    r.error = std::move(msg);
  };
  std::size_t i = 0;
  const std::size_t n = s.size();
  r.tokens.reserve(n / 4 + 2);
  while (i < n && !r.error_offset) {
    char c = s[i];
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (c == '-' && i + 1 < n && s[i + 1] == '-') {
      while (i < n && s[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && s[i + 1] == '*') {
      std::size_t close = s.find("*/", i + 2);
      if (close == std::string_view::npos) {
        fail(i, "unterminated comment");
        break;
      }
      i = close + 2;
      continue;
    }
    Token& t = r.tokens.emplace_back();
    t.offset = i;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < n && ident_char(s[j])) ++j;
      t.text.assign(s.data() + i, j - i);
      for (char& ch : t.text) ch = lower(ch);
      t.kind = is_reserved(t.text) ? TokenKind::kKeyword : TokenKind::kIdent;
      i = j;
    } else if (is_digit(c) ||
               (c == '.' && i + 1 < n &&
                is_digit(s[i + 1]))) {
      std::size_t j = i;
      while (j < n && is_digit(s[j])) ++j;
      if (j < n && s[j] == '.') {
        ++j;
        while (j < n && is_digit(s[j])) ++j;
      }
      if (j < n && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < n && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < n && is_digit(s[k])) {
          while (k < n && is_digit(s[k])) ++k;
          j = k;
        }
      }
      t.kind = TokenKind::kNumber;
      t.text = to_lower(s.substr(i, j - i));
      i = j;
    } else if (c == '\'') {
      std::size_t j = i + 1;
      bool closed = false;
      while (j < n) {
        if (s[j] == '\'') {
          if (j + 1 < n && s[j + 1] == '\'') {
            j += 2;
            continue;
          }
          closed = true;
          ++j;
          break;
        }
        ++j;
      }
      if (!closed) {
        fail(i, "unterminated string literal");
        break;
      }
      t.kind = TokenKind::kString;
      t.text = std::string(s.substr(i, j - i));
      i = j;
    } else if (c == '"' || c == '`' || c == '[') {
      char close = c == '[' ? ']' : c;
      std::size_t j = s.find(close, i + 1);
      if (j == std::string_view::npos) {
        fail(i, "unterminated quoted identifier");
        break;
      }
      t.kind = TokenKind::kIdent;
      t.quoted = true;
      t.text = to_lower(s.substr(i + 1, j - i - 1));
      i = j + 1;
    } else if (c == '?') {
      t.kind = TokenKind::kPlaceholder;
      t.text = "?";
      ++i;
    } else {
      static constexpr std::array<std::string_view, 5> kTwo = {"<=", ">=", "<>",
                                                               "!=", "||"};
      t.kind = TokenKind::kSymbol;
      std::string_view two = s.substr(i, 2);
      if (std::find(kTwo.begin(), kTwo.end(), two) != kTwo.end()) {
        t.text = std::string(two);
        i += 2;
      } else if (std::string_view("(),.;*=<>+-/%").find(c) !=
                 std::string_view::npos) {
        t.text = std::string(1, c);
        ++i;
      } else {
        fail(i, std::string("unexpected character '") + c + "'");
        break;
      }
    }
  }
  // A failed scan leaves a half-built token behind.
  if (r.error_offset && !r.tokens.empty() && r.tokens.back().offset == *r.error_offset) {
    r.tokens.pop_back();
  }
  Token end;
  end.kind = TokenKind::kEnd;
  end.offset = n;
  r.tokens.push_back(end);
  return r;
}

}  // namespace qlog::internal
