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


#include "qlog/synth.h"

#include <algorithm>
#include <array>
#include <string_view>
#include <unordered_set>

#include "qlog/features.h"
#include "qlog/sql.h"

namespace qlog {
namespace {

constexpr std::array<std::string_view, 16> kTables = {
    "accounts", "orders",   "customers", "payments", "invoices",    "shipments",
    "products", "employees", "branches", "loans",    "cards",       "transfers",
    "audits",   "sessions",  "historytran", "feestate"};

constexpr std::array<std::string_view, 12> kColumns = {
    "status", "amount", "created", "owner_id", "region", "kind",
    "score",  "flag",   "ref",     "note",     "code",   "level"};

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

bool chance(std::mt19937_64& rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

std::string column(std::mt19937_64& rng, std::string_view table) {
  return std::string(table) + "." + std::string(kColumns[pick(rng, kColumns.size())]);
}

std::string predicate(std::mt19937_64& rng, const std::vector<std::string_view>& tables) {
  std::string col = column(rng, tables[pick(rng, tables.size())]);
  switch (pick(rng, 9)) {
    case 0:
      return col + " = #n";
    case 1:
      return col + " > #n";
    case 2:
      return col + " < #n";
    case 3:
      return col + " like #s";
    case 4: {
      std::string s = col + " in (#n";
      for (std::size_t k = pick(rng, 4); k > 0; --k) s += ", #n";
      return s + ")";
    }
    case 5:
      return col + " between #n and #n";
    case 6:
      return col + " is null";
    case 7:
      return col + " is not null";
    default:
      return col + " = #s";
  }
}

std::string random_template(std::mt19937_64& rng) {
  std::vector<std::string_view> tables{kTables[pick(rng, kTables.size())]};
  bool join = chance(rng, 0.4);
  if (join) {
    std::string_view t2;
    do {
      t2 = kTables[pick(rng, kTables.size())];
    } while (t2 == tables[0]);
    tables.push_back(t2);
  }
  bool group = chance(rng, 0.2);
  std::string sql = "SELECT ";
  std::vector<std::string> cols;
  for (std::size_t k = 1 + pick(rng, 6); k > 0; --k) {
    std::string c = column(rng, tables[pick(rng, tables.size())]);
    if (std::find(cols.begin(), cols.end(), c) == cols.end()) cols.push_back(c);
  }
  for (std::size_t i = 0; i < cols.size(); ++i) sql += (i ? ", " : "") + cols[i];
  if (group) sql += ", COUNT(*)";
  sql += " FROM " + std::string(tables[0]);
  if (join) {
    sql += chance(rng, 0.5) ? " JOIN " : " LEFT JOIN ";
    sql += std::string(tables[1]) + " ON " + std::string(tables[0]) + ".id = " +
           std::string(tables[1]) + ".owner_id";
  }
  std::size_t preds = pick(rng, 5);
  if (preds > 0) {
    sql += " WHERE ";
    for (std::size_t i = 0; i < preds; ++i) {
      if (i) sql += " AND ";
      if (chance(rng, 0.2)) {
        sql += "(" + predicate(rng, tables) + " OR " + predicate(rng, tables) + ")";
      } else {
        sql += predicate(rng, tables);
      }
    }
  }
  if (group) sql += " GROUP BY " + cols[0];
  if (chance(rng, 0.4)) {
    sql += " ORDER BY " + cols[pick(rng, cols.size())] + (chance(rng, 0.5) ? " DESC" : " ASC");
  }
  if (chance(rng, 0.2)) sql += " LIMIT #n";
  return sql;
}

// Skeleton text of a template (placeholders become constants).
std::string template_skeleton(const std::string& sql) {
  std::mt19937_64 rng(0);
  ParseOutcome out = parse(instantiate(QueryTemplate{sql}, rng));
  if (!out.ok()) return {};
  return skeletonize(*out.ast).text;
}

}  // namespace

std::string instantiate(const QueryTemplate& tmpl, std::mt19937_64& rng) {
  std::string out;
  out.reserve(tmpl.sql.size() + 32);
  const std::string& s = tmpl.sql;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '#' && i + 1 < s.size() && (s[i + 1] == 'n' || s[i + 1] == 's')) {
      if (s[i + 1] == 'n') {
        out += std::to_string(std::uniform_int_distribution<int>(0, 999999)(rng));
      } else {
        out += '\'';
        for (std::size_t k = 3 + pick(rng, 8); k > 0; --k) out += char('a' + pick(rng, 26));
        out += '\'';
      }
      ++i;
    } else {
      out += s[i];
    }
  }
  return out;
}

std::vector<QueryTemplate> make_templates(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<QueryTemplate> out;
  std::unordered_set<std::string> seen;
  while (out.size() < count) {
    std::string sql = random_template(rng);
    std::string skel = template_skeleton(sql);
    if (skel.empty() || !seen.insert(skel).second) continue;
    out.push_back({std::move(sql)});
  }
  return out;
}

SyntheticLog generate_log(const std::vector<QueryTemplate>& templates, std::size_t queries,
                          std::uint64_t seed) {
  SyntheticLog log;
  if (templates.empty()) return log;
  std::mt19937_64 rng(seed);
  log.template_of.reserve(queries);
  for (std::size_t i = 0; i < queries; ++i) {
    log.template_of.push_back(i < templates.size()
                                  ? static_cast<std::uint32_t>(i)
                                  : static_cast<std::uint32_t>(pick(rng, templates.size())));
  }
  std::shuffle(log.template_of.begin(), log.template_of.end(), rng);
  log.queries.reserve(queries);
  for (std::uint32_t t : log.template_of) log.queries.push_back(instantiate(templates[t], rng));
  return log;
}

FamilyCorpus make_families(std::size_t families, std::size_t per_family, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  FamilyCorpus out;
  for (std::size_t f = 0; f < families; ++f) {
    const std::string tag = "fam" + std::to_string(f);
    for (std::size_t i = 0; i < per_family; ++i) {
      const std::string v = "v" + std::to_string(i);
      std::string sql;
      switch (f % 3) {
        case 0:
          sql = "SELECT a.c1, a.c2, a.c3, b.c4, b.c5 FROM " + tag + "_a a JOIN " + tag +
                "_b b ON a.id = b.a_id WHERE a.k = 1 AND b." + v + " = 2 ORDER BY a.c1 DESC";
          break;
        case 1:
          sql = "SELECT g.region, COUNT(*), SUM(g.amount) FROM " + tag +
                "_g g WHERE g.day BETWEEN 1 AND 2 AND g." + v +
                " > 3 GROUP BY g.region HAVING COUNT(*) > 5";
          break;
        default:
          sql = "SELECT t.id, t.kind, t.owner FROM " + tag + "_t t WHERE t.kind IN (1, 2, 3) AND t." +
                v + " LIKE 'x' ORDER BY t.id LIMIT 10";
          break;
      }
      out.sql.push_back(std::move(sql));
      out.family.push_back(static_cast<std::uint32_t>(f));
    }
  }
  // Interleave families so corpus order carries no signal.
  std::vector<std::size_t> perm(out.sql.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  FamilyCorpus shuffled;
  for (std::size_t p : perm) {
    shuffled.sql.push_back(out.sql[p]);
    shuffled.family.push_back(out.family[p]);
  }
  return shuffled;
}

}  // namespace qlog
