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


#include <map>
#include <random>
#include <string>

#include "doctest.h"
#include "qlog/errors.h"
#include "qlog/features.h"
#include "qlog/sql.h"
#include "qlog/synth.h"

namespace qlog {
namespace {

LabeledAst must_parse(const std::string& sql) {
  ParseOutcome p = parse(sql);
  INFO(sql);
  REQUIRE(p.ok());
  return *p.ast;
}

TEST_CASE("parse builds the expected tree shape") {
  LabeledAst t = must_parse("SELECT a FROM r WHERE r.b = 5");
  CHECK(t.well_formed());
  CHECK(t.to_sexpr() ==
        "(SELECT (COLS (COL_ID a)) (FROM (TABLE_REF r)) (WHERE (EQUALS (COL_ID r.b) #5)))");
}

TEST_CASE("keywords and identifiers are case-folded") {
  CHECK(isomorphic(must_parse("select A from R where R.B = 1"),
                   must_parse("SELECT a FROM r WHERE r.b = 1")));
}

TEST_CASE("printing is canonical and round-trips") {
  const char* queries[] = {
      "SELECT historytran.* FROM historytran LEFT JOIN feestate AS feestate ON "
      "feestate.seqhistorytran = historytran.seq WHERE (historytran.caseid = '') AND "
      "isnull(feestate.rechargestate, '') IN ('', '') ORDER BY historytran.txdate DESC",
      "SELECT DISTINCT a, COUNT(*) AS n FROM r GROUP BY a HAVING COUNT(*) > 2 LIMIT 10",
      "SELECT * FROM r WHERE a BETWEEN 1 AND 2 OR b NOT LIKE 'x%' OR c IS NOT NULL",
      "SELECT CASE WHEN a = 1 THEN 'one' ELSE 'other' END FROM (SELECT a FROM s) AS d",
      "SELECT a FROM r WHERE EXISTS (SELECT 1 FROM s WHERE s.k = r.k) AND NOT (b < -3)",
      "SELECT a FROM r UNION SELECT a FROM s",
      "INSERT INTO r (a, b) VALUES (1, 'x')",
      "UPDATE r SET a = 1 WHERE b = 2",
      "DELETE FROM r WHERE a IN (SELECT a FROM s)",
  };
  for (const char* q : queries) {
    LabeledAst t = must_parse(q);
    std::string printed = to_sql(t);
    LabeledAst again = must_parse(printed);
    INFO(q);
    CHECK(isomorphic(t, again));
    CHECK(to_sql(again) == printed);
  }
  CHECK(to_sql(must_parse("SELECT  A\nFROM R  WHERE R.B=5")) == "select a from r where r.b = 5");
}

TEST_CASE("classify reads leading keywords") {
  CHECK(classify("select 1") == StatementKind::kSelect);
  CHECK(classify("  (SELECT a FROM r)") == StatementKind::kSelect);
  CHECK(classify("SELECT a FROM r UNION ALL SELECT a FROM s") == StatementKind::kUnion);
  CHECK(classify("insert into r values (1)") == StatementKind::kInsert);
  CHECK(classify("UPDATE r SET a = 1") == StatementKind::kUpdate);
  CHECK(classify("delete from r") == StatementKind::kDelete);
  CHECK(classify("VACUUM") == StatementKind::kOther);
  CHECK(classify("'unterminated") == StatementKind::kOther);
}

TEST_CASE("statement kind names round-trip") {
  for (auto k : {StatementKind::kSelect, StatementKind::kInsert, StatementKind::kUpdate,
                 StatementKind::kDelete, StatementKind::kUnion, StatementKind::kOther}) {
    CHECK(statement_kind_from_name(statement_kind_name(k)) == k);
  }
  CHECK_FALSE(statement_kind_from_name("bogus").has_value());
}

TEST_CASE("syntax errors carry an offset") {
  ParseOutcome p = parse("SELECT a FROM WHERE");
  CHECK_FALSE(p.ok());
  REQUIRE(p.error.has_value());
  CHECK(p.error->offset == 14);
  CHECK(p.statement_kind == StatementKind::kOther);

  ParseOutcome lexfail = parse("SELECT 'abc");
  CHECK_FALSE(lexfail.ok());
  CHECK(lexfail.error.has_value());
  CHECK_FALSE(parse("SELECT a FROM r LIMIT 'x'").ok());
}

TEST_CASE("empty input is a precondition violation") {
  CHECK_THROWS_AS(parse(""), PreconditionError);
  CHECK_THROWS_AS(parse(" \n\t"), PreconditionError);
}

TEST_CASE("deep nesting fails cleanly") {
  std::string q = "SELECT a FROM r WHERE " + std::string(5000, '(') + "a = 1" + std::string(5000, ')');
  ParseOutcome p = parse(q);
  CHECK_FALSE(p.ok());
}

TEST_CASE("skeletons ignore constant values") {
  QuerySkeleton a = skeletonize(must_parse("SELECT a FROM r WHERE b = 5 AND c LIKE 'x%'"));
  QuerySkeleton b = skeletonize(must_parse("SELECT a FROM r WHERE b = 99 AND c LIKE 'abc'"));
  CHECK(a.text == b.text);
  CHECK(a.text == "select a from r where b = ? and c like ?");
}

TEST_CASE("shape keys abstract literal values only") {
  auto key = [](const char* q) { return shape_key(q).value(); };
  CHECK(key("SELECT a FROM r WHERE b = 5") == key("select a  from r where b = 123456"));
  CHECK(key("SELECT a FROM r WHERE b = 'x'") == key("SELECT a FROM r WHERE b = 'yyy'"));
  CHECK(key("SELECT a FROM r WHERE b = 5") != key("SELECT a FROM r WHERE b = '5'"));
  CHECK(key("SELECT a FROM r WHERE b = 5") != key("SELECT a FROM r WHERE c = 5"));
  CHECK(key("SELECT a AS 'x' FROM r") != key("SELECT a AS 'y' FROM r"));
  CHECK(key("SELECT \"a\" FROM r") != key("SELECT a FROM r"));
  CHECK_FALSE(shape_key("SELECT 'open").has_value());
}

TEST_CASE("equal shape keys imply equal skeletons") {
  auto templates = make_templates(60, 7);
  SyntheticLog log = generate_log(templates, 600, 11);
  std::map<std::string, std::string> skeleton_of_key;
  for (const auto& q : log.queries) {
    auto key = shape_key(q);
    REQUIRE(key.has_value());
    std::string text = skeletonize(must_parse(q)).text;
    auto [it, fresh] = skeleton_of_key.emplace(*key, text);
    CHECK(it->second == text);
  }
}

}  // namespace
}  // namespace qlog
