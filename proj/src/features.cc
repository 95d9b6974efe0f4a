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

#include "qlog/features.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "qlog/sql.h"

namespace qlog {
namespace {

// Rooted DAG over interned labels. The base WL rule runs on this shape so the
// same code serves plain ASTs and CNF-rewritten trees (where clause nodes
// share their literal children).
struct WlGraph {
  std::vector<FeatureId> atom;
  std::vector<std::vector<std::uint32_t>> kids;

  std::uint32_t add(FeatureId a, std::vector<std::uint32_t> k) {
    atom.push_back(a);
    kids.push_back(std::move(k));
    return static_cast<std::uint32_t>(atom.size() - 1);
  }
  std::size_t size() const { return atom.size(); }
};

// Reachable nodes from `root`, children before parents, each once.
std::vector<std::uint32_t> topo_order(const WlGraph& g, std::uint32_t root) {
  std::vector<std::uint32_t> out;
  std::vector<char> state(g.size(), 0);  // 0 new, 1 open, 2 done
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{root, 0}};
  state[root] = 1;
  while (!stack.empty()) {
    auto& [n, pos] = stack.back();
    if (pos < g.kids[n].size()) {
      std::uint32_t c = g.kids[n][pos++];
      if (state[c] == 0) {
        state[c] = 1;
        stack.emplace_back(c, 0);
      }
    } else {
      state[n] = 2;
      out.push_back(n);
      stack.pop_back();
    }
  }
  return out;
}

// labels[n][i] for i in [0, height(n)]; only reachable nodes are filled.
std::vector<std::vector<FeatureId>> wl_labels(const WlGraph& g,
                                              const std::vector<std::uint32_t>& order,
                                              DigestRegistry& reg) {
  std::vector<std::vector<FeatureId>> labels(g.size());
  std::vector<int> height(g.size(), 0);
  std::vector<FeatureId> bag;
  for (std::uint32_t n : order) {
    int h = 0;
    for (std::uint32_t c : g.kids[n]) h = std::max(h, height[c] + 1);
    height[n] = h;
    auto& mine = labels[n];
    mine.resize(static_cast<std::size_t>(h) + 1);
    mine[0] = g.atom[n];
    for (int i = 1; i <= h; ++i) {
      bag.clear();
      for (std::uint32_t c : g.kids[n]) {
        bag.push_back(labels[c][std::min(i - 1, height[c])]);
      }
      FeatureId b = reg.digest_bag(bag);
      mine[i] = reg.digest_list({g.atom[n], b});
    }
  }
  return labels;
}

WlGraph graph_of(const LabeledAst& ast, DigestRegistry& reg) {
  WlGraph g;
  g.atom.resize(ast.size());
  g.kids.resize(ast.size());
  for (NodeIndex i = 0; i < ast.size(); ++i) {
    g.atom[i] = reg.intern_atom(ast.label(i));
    g.kids[i].assign(ast.node(i).children.begin(), ast.node(i).children.end());
  }
  return g;
}

bool constant_valued(const LabeledAst& ast, NodeIndex n) {
  const AstNode& node = ast.node(n);
  if (node.is_const) return true;
  if (node.atom == Atom::kNeg && node.children.size() == 1) {
    return ast.node(node.children[0]).is_const;
  }
  if (node.atom == Atom::kInList && !node.children.empty()) {
    return std::all_of(node.children.begin(), node.children.end(),
                       [&](NodeIndex c) { return constant_valued(ast, c); });
  }
  return false;
}

bool has_connective(const LabeledAst& ast, NodeIndex n) {
  const AstNode& node = ast.node(n);
  if (is_connective(node.atom)) return true;
  return std::any_of(node.children.begin(), node.children.end(),
                     [&](NodeIndex c) { return has_connective(ast, c); });
}

bool qualifies_for_equality(const LabeledAst& ast, NodeIndex n) {
  const AstNode& node = ast.node(n);
  if (!is_comparison(node.atom) || node.children.size() != 2) return false;
  return constant_valued(ast, node.children[1]) && !constant_valued(ast, node.children[0]);
}

using Clause = std::vector<FeatureId>;  // sorted, unique literal ids

void sort_unique(std::vector<Clause>& cs) {
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
}

// Distributive CNF over literal ids. `literal` maps a literal root to its id
// and records a representative node.
std::vector<Clause> cnf_clauses(const LabeledAst& ast, NodeIndex n,
                                const std::function<FeatureId(NodeIndex)>& literal,
                                std::size_t cap, std::vector<NodeIndex>* region) {
  const AstNode& node = ast.node(n);
  if (node.atom == Atom::kAnd) {
    if (region) region->push_back(n);
    std::vector<Clause> out;
    for (NodeIndex c : node.children) {
      auto sub = cnf_clauses(ast, c, literal, cap, region);
      out.insert(out.end(), std::make_move_iterator(sub.begin()),
                 std::make_move_iterator(sub.end()));
      if (out.size() > cap) throw CnfTooLarge("CNF exceeds " + std::to_string(cap) + " clauses");
    }
    sort_unique(out);
    return out;
  }
  if (node.atom == Atom::kOr) {
    if (region) region->push_back(n);
    std::vector<Clause> acc{Clause{}};
    for (NodeIndex c : node.children) {
      auto sub = cnf_clauses(ast, c, literal, cap, region);
      if (acc.size() * sub.size() > cap) {
        throw CnfTooLarge("CNF exceeds " + std::to_string(cap) + " clauses");
      }
      std::vector<Clause> next;
      next.reserve(acc.size() * sub.size());
      for (const Clause& a : acc) {
        for (const Clause& b : sub) {
          Clause u;
          u.reserve(a.size() + b.size());
          std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
          next.push_back(std::move(u));
        }
      }
      sort_unique(next);
      acc = std::move(next);
    }
    return acc;
  }
  if (node.atom == Atom::kNot && has_connective(ast, n)) {
    throw UnsupportedNegation("negated boolean formula is not supported by CNF rewriting");
  }
  return {Clause{literal(n)}};
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw ConfigError("rule config: '" + key + "' expects a boolean, got '" + v + "'");
}

// Builds the rewritten tree for extraction: a WL graph whose AND/OR regions
// are replaced by CNF / CLAUSE nodes over shared literal nodes.
class RewriteBuilder {
 public:
  RewriteBuilder(const LabeledAst& ast, const LabeledAst* raw, DigestRegistry& reg,
                 const RuleConfig& cfg)
      : ast_(ast), raw_(raw), reg_(reg), cfg_(cfg), memo_(ast.size(), kNone),
        signature_(ast.size(), 0) {
    cnf_atom_ = reg_.intern_atom(atom_name(Atom::kCnf));
    clause_atom_ = reg_.intern_atom(atom_name(Atom::kClause));
  }

  std::uint32_t build() { return convert(ast_.root(), false); }

  const WlGraph& graph() const { return g_; }
  const std::vector<std::vector<FeatureId>>& extra() const { return extra_; }
  std::vector<FeatureId>& signature() { return signature_; }
  std::vector<std::string>& warnings() { return warnings_; }

 private:
  static constexpr std::uint32_t kNone = UINT32_MAX;

  std::uint32_t add(FeatureId atom, std::vector<std::uint32_t> kids) {
    FeatureId full = atom;
    if (!kids.empty()) {
      std::vector<FeatureId> bag;
      bag.reserve(kids.size());
      for (std::uint32_t k : kids) bag.push_back(full_[k]);
      full = reg_.digest_list({atom, reg_.digest_bag(bag)});
    }
    full_.push_back(full);
    extra_.emplace_back();
    return g_.add(atom, std::move(kids));
  }

  std::uint32_t convert(NodeIndex n, bool in_bool) {
    if (memo_[n] != kNone) return memo_[n];
    const AstNode& node = ast_.node(n);
    std::uint32_t out = kNone;
    if (cfg_.cnf && is_connective(node.atom) && !in_bool) out = try_cnf(n);
    if (out == kNone) {
      bool child_bool = is_connective(node.atom) || node.atom == Atom::kNot;
      std::vector<std::uint32_t> kids;
      kids.reserve(node.children.size());
      for (NodeIndex c : node.children) kids.push_back(convert(c, child_bool));
      out = add(reg_.intern_atom(ast_.label(n)), std::move(kids));
      add_comparison_features(n, out);
    }
    memo_[n] = out;
    signature_[n] = full_[out];
    return out;
  }

  std::uint32_t try_cnf(NodeIndex n) {
    std::map<FeatureId, std::uint32_t> reps;
    auto literal = [&](NodeIndex lit) {
      std::uint32_t gn = convert(lit, false);
      FeatureId id = full_[gn];
      reps.emplace(id, gn);
      return id;
    };
    std::vector<NodeIndex> region;
    std::vector<Clause> clauses;
    try {
      clauses = cnf_clauses(ast_, n, literal, cfg_.cnf_cap, &region);
    } catch (const UnsupportedNegation& e) {
      warnings_.push_back(std::string(e.what()) + "; using base WL for the predicate");
      return kNone;
    } catch (const CnfTooLarge& e) {
      warnings_.push_back(std::string(e.what()) + "; using base WL for the predicate");
      return kNone;
    }
    std::vector<std::uint32_t> clause_nodes;
    std::vector<FeatureId> clause_ids;
    for (const Clause& c : clauses) {
      std::vector<std::uint32_t> kids;
      for (FeatureId lit : c) kids.push_back(reps.at(lit));
      clause_nodes.push_back(add(clause_atom_, std::move(kids)));
      clause_ids.push_back(reg_.digest_set(c));
    }
    std::uint32_t root = add(cnf_atom_, std::move(clause_nodes));
    auto& feats = extra_[root];
    feats = clause_ids;
    feats.push_back(reg_.digest_set(clause_ids));
    for (NodeIndex r : region) signature_[r] = full_[root];
    for (NodeIndex r : region) memo_[r] = root;
    return root;
  }

  void add_comparison_features(NodeIndex n, std::uint32_t gn) {
    if (!qualifies_for_equality(ast_, n)) return;
    const AstNode& node = ast_.node(n);
    FeatureId op = reg_.intern_atom(atom_name(node.atom));
    FeatureId left = full_[memo_[node.children[0]]];
    if (cfg_.equality_skeleton) {
      extra_[gn].push_back(reg_.digest_list({op, left, DigestRegistry::kPlaceholder}));
    }
    if (cfg_.raw_constants && raw_ != nullptr) {
      NodeIndex rhs = node.children[1];
      FeatureId value;
      const AstNode& raw_rhs = raw_->node(rhs);
      if (raw_rhs.atom == Atom::kInList) {
        std::vector<FeatureId> vals;
        for (NodeIndex c : raw_rhs.children) vals.push_back(subtree_id(*raw_, c, reg_));
        value = reg_.digest_bag(vals);
      } else {
        value = subtree_id(*raw_, rhs, reg_);
      }
      extra_[gn].push_back(reg_.digest_list({op, left, value}));
    }
  }

  const LabeledAst& ast_;
  const LabeledAst* raw_;
  DigestRegistry& reg_;
  const RuleConfig& cfg_;
  WlGraph g_;
  std::vector<FeatureId> full_;
  std::vector<std::vector<FeatureId>> extra_;
  std::vector<std::uint32_t> memo_;
  std::vector<FeatureId> signature_;
  std::vector<std::string> warnings_;
  FeatureId cnf_atom_ = 0;
  FeatureId clause_atom_ = 0;
};

}  // namespace

// --- Skeletons ---------------------------------------------------------------

LabeledAst skeleton_ast(const LabeledAst& ast) {
  LabeledAst out = ast;
  for (NodeIndex i = 0; i < out.size(); ++i) {
    AstNode& n = out.mutable_node(i);
    if (n.is_const) n.text = std::string(kPlaceholder);
  }
  return out;
}

QuerySkeleton skeletonize(const LabeledAst& ast) {
  QuerySkeleton s;
  s.ast = skeleton_ast(ast);
  s.text = to_sql(s.ast);
  return s;
}

// --- Base WL ----------------------------------------------------------------------

std::vector<IterLabel> wl_iter_labels(const LabeledAst& ast, DigestRegistry& registry,
                                      std::optional<int> max_depth) {
  std::vector<IterLabel> out;
  if (ast.empty()) return out;
  WlGraph g = graph_of(ast, registry);
  std::vector<std::uint32_t> order = topo_order(g, ast.root());
  auto labels = wl_labels(g, order, registry);
  for (std::uint32_t n : order) {
    int top = static_cast<int>(labels[n].size()) - 1;
    if (max_depth) top = std::min(top, *max_depth);
    for (int i = 0; i <= top; ++i) out.push_back({n, labels[n][i], i});
  }
  return out;
}

FeatureVector wl_base_features(const LabeledAst& ast, DigestRegistry& registry,
                               std::optional<int> max_depth) {
  std::vector<FeatureId> bag;
  for (const IterLabel& l : wl_iter_labels(ast, registry, max_depth)) bag.push_back(l.feature);
  return FeatureVector::from_bag(std::move(bag));
}

FeatureId subtree_id(const LabeledAst& ast, NodeIndex node, DigestRegistry& registry) {
  const AstNode& n = ast.node(node);
  FeatureId atom = registry.intern_atom(ast.label(node));
  if (n.children.empty()) return atom;
  std::vector<FeatureId> bag;
  bag.reserve(n.children.size());
  for (NodeIndex c : n.children) bag.push_back(subtree_id(ast, c, registry));
  return registry.digest_list({atom, registry.digest_bag(bag)});
}

// --- CNF ------------------------------------------------------------------------

bool is_literal(const LabeledAst& ast, NodeIndex node) {
  const AstNode& n = ast.node(node);
  if (is_connective(n.atom)) return false;
  if (n.atom == Atom::kNot) return !has_connective(ast, node);
  return true;
}

std::vector<DisjunctiveClause> cnf_normalize(const LabeledAst& ast, NodeIndex root,
                                             DigestRegistry& registry, std::size_t cap) {
  std::map<FeatureId, NodeIndex> reps;
  auto literal = [&](NodeIndex lit) {
    FeatureId id = subtree_id(ast, lit, registry);
    reps.emplace(id, lit);
    return id;
  };
  std::vector<Clause> clauses = cnf_clauses(ast, root, literal, cap, nullptr);
  std::vector<DisjunctiveClause> out;
  out.reserve(clauses.size());
  for (Clause& c : clauses) {
    DisjunctiveClause dc;
    for (FeatureId lit : c) dc.literals.push_back(reps.at(lit));
    dc.id = registry.digest_set(c);
    dc.literal_ids = std::move(c);
    out.push_back(std::move(dc));
  }
  return out;
}

CnfFeatures cnf_features(const std::vector<DisjunctiveClause>& clauses,
                         DigestRegistry& registry) {
  CnfFeatures f;
  for (const DisjunctiveClause& c : clauses) f.clause_ids.push_back(registry.digest_set(c.literal_ids));
  std::sort(f.clause_ids.begin(), f.clause_ids.end());
  f.clause_ids.erase(std::unique(f.clause_ids.begin(), f.clause_ids.end()), f.clause_ids.end());
  f.cnf_id = registry.digest_set(f.clause_ids);
  return f;
}

// --- Equality skeletons -----------------------------------------------------------

std::optional<FeatureId> equality_skeleton_feature(const LabeledAst& ast, NodeIndex node,
                                                   DigestRegistry& registry) {
  if (!qualifies_for_equality(ast, node)) return std::nullopt;
  const AstNode& n = ast.node(node);
  FeatureId op = registry.intern_atom(atom_name(n.atom));
  FeatureId left = subtree_id(ast, n.children[0], registry);
  return registry.digest_list({op, left, DigestRegistry::kPlaceholder});
}

std::vector<std::pair<NodeIndex, FeatureId>> equality_skeleton_features(
    const LabeledAst& ast, DigestRegistry& registry) {
  std::vector<std::pair<NodeIndex, FeatureId>> out;
  if (ast.empty()) return out;
  for (NodeIndex n : ast.post_order()) {
    if (auto f = equality_skeleton_feature(ast, n, registry)) out.emplace_back(n, *f);
  }
  return out;
}

// --- Rule configuration --------------------------------------------------------------

RuleConfig RuleConfig::base_wl() {
  RuleConfig c;
  c.cnf = false;
  c.equality_skeleton = false;
  c.raw_constants = false;
  c.prune_defaults = false;
  return c;
}

const std::vector<std::string>& default_prune_patterns() {
  static const std::vector<std::string> kPatterns = {
      "(SELECT COLS FROM)",
      "(SELECT COLS FROM WHERE)",
  };
  return kPatterns;
}

std::vector<std::string> RuleConfig::effective_prune_patterns() const {
  std::vector<std::string> out;
  if (prune_defaults) out = default_prune_patterns();
  for (const auto& p : prune_patterns) {
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  return out;
}

RuleConfig RuleConfig::parse(std::string_view text) {
  RuleConfig c;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      // '#' inside a prune pattern payload is unusual; treat as comment.
      line.resize(hash);
    }
    std::string t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("rule config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key == "cnf") {
      c.cnf = parse_bool(key, value);
    } else if (key == "equality_skeleton") {
      c.equality_skeleton = parse_bool(key, value);
    } else if (key == "raw_constants") {
      c.raw_constants = parse_bool(key, value);
    } else if (key == "prune_defaults") {
      c.prune_defaults = parse_bool(key, value);
    } else if (key == "cnf_cap") {
      try {
        long long v = std::stoll(value);
        if (v < 1) throw std::out_of_range("cap");
        c.cnf_cap = static_cast<std::size_t>(v);
      } catch (const std::exception&) {
        throw ConfigError("rule config: cnf_cap expects a positive integer");
      }
    } else if (key == "max_depth") {
      if (value == "unbounded" || value == "none") {
        c.max_depth.reset();
      } else {
        try {
          int v = std::stoi(value);
          if (v < 0) throw std::out_of_range("depth");
          c.max_depth = v;
        } catch (const std::exception&) {
          throw ConfigError("rule config: max_depth expects a non-negative integer or 'unbounded'");
        }
      }
    } else if (key == "prune") {
      c.prune_patterns.push_back(value);
    } else {
      throw ConfigError("rule config: unknown key '" + key + "'");
    }
  }
  return c;
}

RuleConfig RuleConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open rule config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string RuleConfig::to_text() const {
  std::ostringstream out;
  out << "cnf = " << (cnf ? "true" : "false") << '\n';
  out << "equality_skeleton = " << (equality_skeleton ? "true" : "false") << '\n';
  out << "raw_constants = " << (raw_constants ? "true" : "false") << '\n';
  out << "cnf_cap = " << cnf_cap << '\n';
  out << "max_depth = " << (max_depth ? std::to_string(*max_depth) : "unbounded") << '\n';
  out << "prune_defaults = " << (prune_defaults ? "true" : "false") << '\n';
  for (const auto& p : prune_patterns) out << "prune = " << p << '\n';
  return out.str();
}

std::vector<std::string> load_prune_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open prune file " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.push_back(t);
  }
  return out;
}

FeatureId compile_pattern(std::string_view pattern, DigestRegistry& registry) {
  std::vector<std::string> toks;
  for (std::size_t i = 0; i < pattern.size();) {
    char c = pattern[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '(' || c == ')') {
      toks.emplace_back(1, c);
      ++i;
    } else {
      std::size_t j = i;
      while (j < pattern.size() && !std::isspace(static_cast<unsigned char>(pattern[j])) &&
             pattern[j] != '(' && pattern[j] != ')') {
        ++j;
      }
      toks.emplace_back(pattern.substr(i, j - i));
      i = j;
    }
  }
  std::size_t pos = 0;
  auto bad = [&](const std::string& why) -> ConfigError {
    return ConfigError("prune pattern '" + std::string(pattern) + "': " + why);
  };
  std::function<FeatureId()> term = [&]() -> FeatureId {
    if (pos >= toks.size()) throw bad("unexpected end");
    std::string t = toks[pos++];
    if (t == ")") throw bad("unexpected ')'");
    if (t != "(") return registry.intern_atom(t);
    if (pos >= toks.size() || toks[pos] == "(" || toks[pos] == ")") throw bad("expected label after '('");
    FeatureId atom = registry.intern_atom(toks[pos++]);
    std::vector<FeatureId> kids;
    while (pos < toks.size() && toks[pos] != ")") kids.push_back(term());
    if (pos >= toks.size()) throw bad("missing ')'");
    ++pos;
    if (kids.empty()) return atom;
    return registry.digest_list({atom, registry.digest_bag(kids)});
  };
  FeatureId id = term();
  if (pos != toks.size()) throw bad("trailing input");
  return id;
}

// --- Extraction ---------------------------------------------------------------------

FeatureExtractor::FeatureExtractor(DigestRegistry& registry, RuleConfig config)
    : registry_(&registry), config_(std::move(config)) {
  for (const std::string& p : config_.effective_prune_patterns()) {
    registry_->mark_pruned(compile_pattern(p, *registry_));
  }
}

ExtractResult FeatureExtractor::extract(const LabeledAst& ast) const {
  ExtractResult r;
  if (ast.empty()) return r;
  LabeledAst skel = skeleton_ast(ast);
  RewriteBuilder b(skel, &ast, *registry_, config_);
  std::uint32_t root = b.build();
  const WlGraph& g = b.graph();
  std::vector<std::uint32_t> order = topo_order(g, root);
  auto labels = wl_labels(g, order, *registry_);

  std::vector<FeatureId> bag;
  std::vector<FeatureId> own;
  for (std::uint32_t n : order) {
    own.clear();
    int top = static_cast<int>(labels[n].size()) - 1;
    if (config_.max_depth) top = std::min(top, *config_.max_depth);
    for (int i = 0; i <= top; ++i) own.push_back(labels[n][i]);
    own.insert(own.end(), b.extra()[n].begin(), b.extra()[n].end());
    std::sort(own.begin(), own.end());
    own.erase(std::unique(own.begin(), own.end()), own.end());
    for (FeatureId f : own) {
      if (!registry_->is_pruned(f)) bag.push_back(f);
    }
  }
  r.vector = FeatureVector::from_bag(std::move(bag));
  r.node_signature = std::move(b.signature());
  r.warnings = std::move(b.warnings());
  return r;
}

FeatureVector FeatureExtractor::extract(const QuerySkeleton& skeleton) const {
  return extract(skeleton.ast).vector;
}

}  // namespace qlog
