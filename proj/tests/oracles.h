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


// Independent reference implementations used by the unit and acceptance
// tests: brute-force WL subtree enumeration, truth-table CNF checking, a
// cubic agglomerative clusterer, FP-tree scans and a DOT syntax checker.

#ifndef QLOG_TESTS_ORACLES_H_
#define QLOG_TESTS_ORACLES_H_

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "qlog/ast.h"
#include "qlog/cluster.h"
#include "qlog/features.h"
#include "qlog/registry.h"
#include "qlog/summarizer.h"

namespace qlog::oracle {

// --- Random trees ---------------------------------------------------------------

namespace detail {

inline NodeIndex grow(LabeledAst& t, std::mt19937_64& rng, int depth, int max_depth,
                      int& budget) {
  static constexpr Atom kInner[] = {Atom::kSelect, Atom::kCols,   Atom::kFrom,
                                    Atom::kWhere,  Atom::kEquals, Atom::kFunc,
                                    Atom::kColId,  Atom::kAnd,    Atom::kOr};
  static constexpr const char* kLeaves[] = {"a", "b", "c", "t.x"};
  --budget;
  std::uniform_int_distribution<int> kids_dist(0, 3);
  int kids = depth >= max_depth ? 0 : kids_dist(rng);
  if (depth == 0 && max_depth > 0 && kids == 0) kids = 1;
  std::vector<NodeIndex> children;
  for (int k = 0; k < kids && budget > 0; ++k) {
    children.push_back(grow(t, rng, depth + 1, max_depth, budget));
  }
  if (children.empty()) {
    if (rng() % 3 == 0) return t.add_const(std::to_string(rng() % 2));
    return t.add_node(Atom::kIdent, kLeaves[rng() % 4]);
  }
  return t.add_node(kInner[rng() % std::size(kInner)], {}, std::move(children));
}

}  // namespace detail

// Random labeled tree with at most `max_nodes` nodes and depth <= max_depth,
// over a small label alphabet so that equal subtrees are common.
inline LabeledAst random_tree(std::mt19937_64& rng, int max_nodes, int max_depth) {
  LabeledAst t;
  int budget = max_nodes;
  t.set_root(detail::grow(t, rng, 0, max_depth, budget));
  return t;
}

// --- WL: brute-force i-descendent subtree enumeration ------------------------------

// Canonical text of desc(n, i): the subtree at n truncated to depth i, with
// children as an unordered multiset.
inline std::string desc_text(const LabeledAst& t, NodeIndex n, int i) {
  const AstNode& node = t.node(n);
  if (i == 0 || node.children.empty()) return t.label(n);
  std::vector<std::string> kids;
  for (NodeIndex c : node.children) kids.push_back(desc_text(t, c, i - 1));
  std::sort(kids.begin(), kids.end());
  std::string s = "(" + t.label(n);
  for (const auto& k : kids) s += " " + k;
  return s + ")";
}

// Every desc(N, i), 0 <= i <= height(N), over all nodes N.
inline std::multiset<std::string> desc_multiset(const LabeledAst& t) {
  std::multiset<std::string> out;
  std::vector<int> h = t.heights();
  for (NodeIndex n : t.post_order()) {
    for (int i = 0; i <= h[n]; ++i) out.insert(desc_text(t, n, i));
  }
  return out;
}

// Checks that the WL ids of `t` rename the oracle's subtree multiset
// injectively, consistently with every earlier call sharing `names`.
class WlChecker {
 public:
  bool check(const LabeledAst& t, DigestRegistry& registry, std::string* why) {
    FeatureVector got = wl_base_features(t, registry);
    std::vector<IterLabel> labels = wl_iter_labels(t, registry);
    std::vector<int> h = t.heights();
    std::set<std::pair<NodeIndex, int>> seen;
    for (const IterLabel& l : labels) {
      if (l.iteration < 0 || l.iteration > h[l.node] ||
          !seen.emplace(l.node, l.iteration).second) {
        *why = "bad iteration label";
        return false;
      }
      std::string text = desc_text(t, l.node, l.iteration);
      auto [it, fresh] = by_text_.emplace(text, l.feature);
      if (!fresh && it->second != l.feature) {
        *why = "one subtree, two ids: " + text;
        return false;
      }
      auto [jt, fresh_id] = by_id_.emplace(l.feature, text);
      if (!fresh_id && jt->second != text) {
        *why = "one id, two subtrees: " + text + " / " + jt->second;
        return false;
      }
    }
    std::multiset<std::string> expected = desc_multiset(t);
    if (seen.size() != expected.size()) {
      *why = "missing (node, iteration) labels";
      return false;
    }
    std::vector<FeatureId> bag;
    for (const auto& text : expected) bag.push_back(by_text_.at(text));
    if (FeatureVector::from_bag(std::move(bag)) != got) {
      *why = "feature bag differs from oracle multiset";
      return false;
    }
    return true;
  }

 private:
  std::map<std::string, FeatureId> by_text_;
  std::map<FeatureId, std::string> by_id_;
};

// --- CNF: truth tables ----------------------------------------------------------------

// Literal k is (EQUALS (COL_ID vk) 1); the formula reads variable k as true.
inline NodeIndex add_literal(LabeledAst& t, int var, bool negated) {
  NodeIndex col = t.add_node(Atom::kColId, {}, {t.add_node(Atom::kIdent, "v" + std::to_string(var))});
  NodeIndex eq = t.add_node(Atom::kEquals, {}, {col, t.add_const("1")});
  return negated ? t.add_node(Atom::kNot, {}, {eq}) : eq;
}

struct Formula {
  enum class Op { kVar, kAnd, kOr } op = Op::kVar;
  int var = 0;
  bool negated = false;
  std::vector<Formula> kids;
};

// A literal is a variable and a polarity.
using LiteralPool = std::vector<std::pair<int, bool>>;

// Up to `size` distinct literals over at most `vars` variables.
inline LiteralPool random_pool(std::mt19937_64& rng, int vars, int size) {
  std::set<std::pair<int, bool>> pool;
  while (static_cast<int>(pool.size()) < std::min(size, 2 * vars)) {
    pool.emplace(static_cast<int>(rng() % vars), rng() % 4 == 0);
  }
  return {pool.begin(), pool.end()};
}

inline Formula random_formula(std::mt19937_64& rng, const LiteralPool& pool, int depth,
                              int& leaves) {
  Formula f;
  if (depth == 0 || leaves <= 1 || rng() % 4 == 0) {
    --leaves;
    auto [var, negated] = pool[rng() % pool.size()];
    f.var = var;
    f.negated = negated;
    return f;
  }
  f.op = rng() % 2 ? Formula::Op::kAnd : Formula::Op::kOr;
  int n = 2 + static_cast<int>(rng() % 2);
  for (int k = 0; k < n && leaves > 0; ++k) f.kids.push_back(random_formula(rng, pool, depth - 1, leaves));
  if (f.kids.size() == 1) return f.kids[0];
  return f;
}

inline void shuffle_formula(Formula& f, std::mt19937_64& rng) {
  std::shuffle(f.kids.begin(), f.kids.end(), rng);
  for (auto& k : f.kids) shuffle_formula(k, rng);
}

inline NodeIndex build_formula(LabeledAst& t, const Formula& f) {
  if (f.op == Formula::Op::kVar) return add_literal(t, f.var, f.negated);
  std::vector<NodeIndex> kids;
  for (const auto& k : f.kids) kids.push_back(build_formula(t, k));
  return t.add_node(f.op == Formula::Op::kAnd ? Atom::kAnd : Atom::kOr, {}, std::move(kids));
}

inline bool eval_formula(const Formula& f, unsigned assignment) {
  switch (f.op) {
    case Formula::Op::kVar:
      return (((assignment >> f.var) & 1u) != 0) != f.negated;
    case Formula::Op::kAnd:
      return std::all_of(f.kids.begin(), f.kids.end(),
                         [&](const Formula& k) { return eval_formula(k, assignment); });
    case Formula::Op::kOr:
      return std::any_of(f.kids.begin(), f.kids.end(),
                         [&](const Formula& k) { return eval_formula(k, assignment); });
  }
  return false;
}

// Evaluates a literal subtree built by add_literal.
inline bool eval_literal(const LabeledAst& t, NodeIndex n, unsigned assignment) {
  const AstNode& node = t.node(n);
  if (node.atom == Atom::kNot) return !eval_literal(t, node.children.at(0), assignment);
  const AstNode& col = t.node(node.children.at(0));
  int var = std::stoi(t.node(col.children.at(0)).text.substr(1));
  return ((assignment >> var) & 1u) != 0;
}

inline bool eval_cnf(const LabeledAst& t, const std::vector<DisjunctiveClause>& cnf,
                     unsigned assignment) {
  for (const auto& clause : cnf) {
    bool any = false;
    for (NodeIndex lit : clause.literals) any = any || eval_literal(t, lit, assignment);
    if (!any) return false;
  }
  return true;
}

// --- Clustering: cubic reference ------------------------------------------------------

inline Dendrogram naive_cluster(const std::vector<std::vector<double>>& d, Linkage linkage) {
  const std::size_t n = d.size();
  struct Active {
    std::uint32_t node;
    std::vector<std::uint32_t> leaves;
  };
  std::vector<Active> active;
  for (std::uint32_t i = 0; i < n; ++i) active.push_back({i, {i}});
  auto link = [&](const Active& a, const Active& b) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0;
    for (auto x : a.leaves) {
      for (auto y : b.leaves) {
        lo = std::min(lo, d[x][y]);
        hi = std::max(hi, d[x][y]);
        sum += d[x][y];
      }
    }
    if (linkage == Linkage::kSingle) return lo;
    if (linkage == Linkage::kComplete) return hi;
    return sum / static_cast<double>(a.leaves.size() * b.leaves.size());
  };
  Dendrogram out;
  out.leaves = n;
  for (std::uint32_t step = 0; step + 1 < n; ++step) {
    std::size_t bi = 0, bj = 0;
    double best = std::numeric_limits<double>::infinity();
    std::pair<std::uint32_t, std::uint32_t> best_ids{~0u, ~0u};
    for (std::size_t i = 0; i < active.size(); ++i) {
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        double h = link(active[i], active[j]);
        std::pair<std::uint32_t, std::uint32_t> ids = std::minmax(active[i].node, active[j].node);
        if (h < best || (h == best && ids < best_ids)) {
          best = h;
          best_ids = ids;
          bi = i;
          bj = j;
        }
      }
    }
    Active merged{static_cast<std::uint32_t>(n + step), active[bi].leaves};
    merged.leaves.insert(merged.leaves.end(), active[bj].leaves.begin(), active[bj].leaves.end());
    out.merges.push_back({best_ids.first, best_ids.second, best,
                          static_cast<std::uint32_t>(merged.leaves.size())});
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
    active[bi] = std::move(merged);
  }
  return out;
}

inline std::vector<std::vector<double>> dense_distances(const std::vector<std::vector<double>>& pts) {
  std::vector<std::vector<double>> d(pts.size(), std::vector<double>(pts.size(), 0.0));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      double s = 0;
      for (std::size_t k = 0; k < pts[i].size(); ++k) s += (pts[i][k] - pts[j][k]) * (pts[i][k] - pts[j][k]);
      d[i][j] = std::sqrt(s);
    }
  }
  return d;
}

inline DistanceMatrix to_matrix(const std::vector<std::vector<double>>& d) {
  DistanceMatrix m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = i + 1; j < d.size(); ++j) m.set(i, j, d[i][j]);
  }
  return m;
}

// Dense points as integer-count feature vectors (feature k has count pts[k]).
inline FeatureVector to_vector(const std::vector<int>& counts) {
  std::vector<FeatureVector::Entry> e;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] > 0) e.push_back({static_cast<FeatureId>(k), static_cast<std::uint32_t>(counts[k])});
  }
  return FeatureVector::from_entries(std::move(e));
}

// True when two labelings describe the same partition.
inline bool same_partition(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
  if (a.size() != b.size()) return false;
  std::map<std::uint32_t, std::uint32_t> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (ab.emplace(a[i], b[i]).first->second != b[i]) return false;
    if (ba.emplace(b[i], a[i]).first->second != a[i]) return false;
  }
  return true;
}

// --- FP-tree: scans ----------------------------------------------------------------------

// Returns an empty string when every structural property holds.
inline std::string check_fptree(const FPTree& tree, const std::vector<std::vector<FeatureId>>& tx) {
  std::map<FeatureId, std::uint32_t> support;
  std::multiset<std::vector<FeatureId>> sets;
  for (const auto& t : tx) {
    std::vector<FeatureId> s(t.begin(), t.end());
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (FeatureId f : s) ++support[f];
    sets.insert(s);
  }
  const auto& nodes = tree.nodes();
  if (tree.transactions() != tx.size()) return "root count != transactions";
  if (tree.header().size() != support.size()) return "header size != distinct features";
  auto before = [&](FeatureId a, FeatureId b) {
    return support[a] != support[b] ? support[a] > support[b] : a < b;
  };
  for (std::size_t k = 0; k < tree.header().size(); ++k) {
    const HeaderEntry& h = tree.header()[k];
    if (h.support != support[h.feature]) return "header support != scan";
    if (tree.support(h.feature) != support[h.feature]) return "support() != scan";
    std::uint64_t sum = 0;
    for (auto n : h.nodes) {
      if (nodes.at(n).feature != h.feature) return "header links a foreign node";
      sum += nodes[n].count;
    }
    if (sum != h.support) return "header node counts do not sum to support";
    if (k > 0 && !before(tree.header()[k - 1].feature, h.feature)) return "header out of order";
  }
  std::multiset<std::vector<FeatureId>> rebuilt;
  for (std::uint32_t i = 0; i < nodes.size(); ++i) {
    std::uint64_t below = 0;
    for (auto c : nodes[i].children) {
      if (nodes.at(c).parent != static_cast<std::int32_t>(i)) return "bad parent link";
      if (nodes[c].count > nodes[i].count) return "child count exceeds parent";
      if (i != 0 && !before(nodes[i].feature, nodes[c].feature)) return "path out of item order";
      below += nodes[c].count;
    }
    if (below > nodes[i].count) return "children exceed parent";
    std::vector<FeatureId> path;
    for (std::int32_t p = static_cast<std::int32_t>(i); p > 0; p = nodes[p].parent) path.push_back(nodes[p].feature);
    std::sort(path.begin(), path.end());
    for (std::uint64_t r = below; r < nodes[i].count; ++r) rebuilt.insert(path);
  }
  if (rebuilt != sets) return "paths do not reproduce the transactions";
  return {};
}

// --- DOT ----------------------------------------------------------------------------------

// Recognizes the DOT language subset: strict? (graph|digraph) ID? { stmts }
// with node, edge, attribute and ID=ID statements.
class DotChecker {
 public:
  explicit DotChecker(std::string text) : s_(std::move(text)) {}

  bool valid() {
    try {
      lex();
      std::size_t i = 0;
      if (kw(i, "strict")) ++i;
      bool directed = kw(i, "digraph");
      if (!directed && !kw(i, "graph")) return false;
      ++i;
      if (is_id(i)) ++i;
      if (!punct(i, "{")) return false;
      ++i;
      while (!punct(i, "}")) {
        if (!stmt(i, directed)) return false;
        if (punct(i, ";")) ++i;
      }
      ++i;
      return i == toks_.size();
    } catch (...) {
      return false;
    }
  }

 private:
  struct Tok {
    bool id;
    std::string text;
  };

  void lex() {
    std::size_t i = 0;
    while (i < s_.size()) {
      char c = s_[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
      } else if (c == '"') {
        std::string v;
        ++i;
        while (true) {
          if (i >= s_.size()) throw 1;
          if (s_[i] == '\\' && i + 1 < s_.size()) {
            v += s_[i + 1];
            i += 2;
          } else if (s_[i] == '"') {
            ++i;
            break;
          } else {
            v += s_[i++];
          }
        }
        toks_.push_back({true, v});
      } else if (c == '-' && i + 1 < s_.size() && (s_[i + 1] == '>' || s_[i + 1] == '-')) {
        toks_.push_back({false, s_.substr(i, 2)});
        i += 2;
      } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-') {
        std::size_t j = i + 1;
        while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_' ||
                                 s_[j] == '.')) {
          ++j;
        }
        toks_.push_back({true, s_.substr(i, j - i)});
        i = j;
      } else if (std::string("{}[]=;,").find(c) != std::string::npos) {
        toks_.push_back({false, std::string(1, c)});
        ++i;
      } else {
        throw 1;
      }
    }
  }

  bool is_id(std::size_t i) const { return i < toks_.size() && toks_[i].id; }
  bool kw(std::size_t i, const char* w) const { return is_id(i) && toks_[i].text == w; }
  bool punct(std::size_t i, const char* p) const {
    if (i >= toks_.size()) throw 1;
    return !toks_[i].id && toks_[i].text == p;
  }

  bool attr_list(std::size_t& i) {
    while (punct(i, "[")) {
      ++i;
      while (!punct(i, "]")) {
        if (!is_id(i) || !punct(i + 1, "=") || !is_id(i + 2)) return false;
        i += 3;
        if (punct(i, ",") || punct(i, ";")) ++i;
      }
      ++i;
    }
    return true;
  }

  bool stmt(std::size_t& i, bool directed) {
    if (kw(i, "graph") || kw(i, "node") || kw(i, "edge")) {
      ++i;
      return punct(i, "[") && attr_list(i);
    }
    if (!is_id(i)) return false;
    if (punct(i + 1, "=")) {
      if (!is_id(i + 2)) return false;
      i += 3;
      return true;
    }
    ++i;
    while (punct(i, directed ? "->" : "--")) {
      if (!is_id(i + 1)) return false;
      i += 2;
    }
    return attr_list(i);
  }

  std::string s_;
  std::vector<Tok> toks_;
};

}  // namespace qlog::oracle

#endif  // QLOG_TESTS_ORACLES_H_
