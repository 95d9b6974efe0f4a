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

// Structural feature extraction over SQL trees.
//
// The base rule is Weisfeiler-Lehman relabeling: node N at iteration 0 owns
// its atom id, and at iteration i (1 <= i <= height(N)) owns
//
//     list< atom(N), bag{ label_{min(i-1, height(C))}(C) : C child of N } >
//
// so every id identifies one i-descendent subtree up to child order. On top
// of that the extractor applies, in order: constant skeletonization, CNF
// normalization of AND/OR predicates, equality-skeleton features for
// comparisons against constants, and a pruning filter. A query's vector is
// the bag union of all per-node feature sets.

#ifndef QLOG_FEATURES_H_
#define QLOG_FEATURES_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qlog/ast.h"
#include "qlog/errors.h"
#include "qlog/feature_vector.h"
#include "qlog/registry.h"

namespace qlog {

// --- Skeletons -----------------------------------------------------------

struct QuerySkeleton {
  LabeledAst ast;        // constants replaced by the placeholder
  std::string text;      // canonical single-line SQL of `ast`
  std::uint64_t count = 1;
  FeatureVector vector;  // filled by the extractor
};

// Replaces every constant payload by "?". Node indices are preserved, so node
// i of the result corresponds to node i of the input.
LabeledAst skeleton_ast(const LabeledAst& ast);
QuerySkeleton skeletonize(const LabeledAst& ast);

// --- Base Weisfeiler-Lehman ------------------------------------------------

// IterF(N, f, n): feature `feature` was created for `node` at `iteration`.
struct IterLabel {
  NodeIndex node;
  FeatureId feature;
  int iteration;
};

// All IterF facts for `ast`, iterations bounded by min(height(N), max_depth).
std::vector<IterLabel> wl_iter_labels(const LabeledAst& ast, DigestRegistry& registry,
                                      std::optional<int> max_depth = std::nullopt);

// Bag of all i-descendent subtree ids of `ast` (no skeletonization, CNF,
// equality features or pruning).
FeatureVector wl_base_features(const LabeledAst& ast, DigestRegistry& registry,
                               std::optional<int> max_depth = std::nullopt);

// Id of the complete subtree rooted at `node`, i.e. its WL label at iteration
// height(node).
FeatureId subtree_id(const LabeledAst& ast, NodeIndex node, DigestRegistry& registry);

// --- CNF -------------------------------------------------------------------

class UnsupportedNegation : public Error {
 public:
  using Error::Error;
};

class CnfTooLarge : public Error {
 public:
  using Error::Error;
};

// One disjunctive clause: a set of literals. `literal_ids` is sorted and
// unique; `literals` holds one representative literal-root node per id, in
// the same order. `id` is the set digest of `literal_ids`.
struct DisjunctiveClause {
  std::vector<NodeIndex> literals;
  std::vector<FeatureId> literal_ids;
  FeatureId id = 0;
};

inline constexpr std::size_t kDefaultCnfCap = 4096;

// Literal: any node that is not AND / OR, including NOT over a
// connective-free subtree. Literal identity is the literal's complete-subtree
// id, so repeated literals collapse.
bool is_literal(const LabeledAst& ast, NodeIndex node);

// CNF of the AND/OR formula rooted at `root`, as a clause set sorted by
// literal-id vector. Literal: each literal forms {L}; AND: union of the
// children's clauses; OR: distributive cross product of the children's
// clause sets. Throws UnsupportedNegation for NOT over a connective, and
// CnfTooLarge when an intermediate clause set exceeds `cap` clauses.
std::vector<DisjunctiveClause> cnf_normalize(const LabeledAst& ast, NodeIndex root,
                                             DigestRegistry& registry,
                                             std::size_t cap = kDefaultCnfCap);

struct CnfFeatures {
  std::vector<FeatureId> clause_ids;  // sorted, unique
  FeatureId cnf_id = 0;               // set digest of clause_ids
};

CnfFeatures cnf_features(const std::vector<DisjunctiveClause>& clauses,
                         DigestRegistry& registry);

// --- Equality skeletons ------------------------------------------------------

// list< op, subtree(left), "?" > for a comparison whose right operand is a
// constant (or an IN list of constants) and whose left operand is not.
std::optional<FeatureId> equality_skeleton_feature(const LabeledAst& ast, NodeIndex node,
                                                   DigestRegistry& registry);

// (node, feature) for every comparison in the tree that qualifies.
std::vector<std::pair<NodeIndex, FeatureId>> equality_skeleton_features(
    const LabeledAst& ast, DigestRegistry& registry);

// --- Rule configuration -------------------------------------------------------

// Declarative rule configuration. Text format, one `key = value` per line,
// `#` starts a comment:
//
//   cnf = true                 # CNF normalization of AND/OR predicates
//   equality_skeleton = true   # <op, left, ?> features
//   raw_constants = false      # also emit <op, left, literal> features
//   cnf_cap = 4096             # clause limit before falling back to base WL
//   max_depth = unbounded      # or a non-negative integer
//   prune_defaults = true      # include the built-in prune patterns
//   prune = (SELECT COLS FROM) # one pattern per line, repeatable
//
// A prune pattern is an s-expression naming a WL subtree: a bare label is an
// atom (iteration 0); `(LABEL child ...)` is the list/bag digest of LABEL
// over its children's patterns. Labels are atom names (SELECT, COL_ID, ...)
// or lower-case identifier / constant payloads.
struct RuleConfig {
  bool cnf = true;
  bool equality_skeleton = true;
  bool raw_constants = false;
  std::size_t cnf_cap = kDefaultCnfCap;
  std::optional<int> max_depth;
  bool prune_defaults = true;
  std::vector<std::string> prune_patterns;

  // Only the base WL rule: no CNF, no equality features, no pruning.
  static RuleConfig base_wl();
  static RuleConfig parse(std::string_view text);
  static RuleConfig load(const std::filesystem::path& path);
  std::string to_text() const;

  // Defaults plus explicit patterns, in that order.
  std::vector<std::string> effective_prune_patterns() const;
};

// Built-in prune patterns: the level-1 shape of plain SELECT statements.
const std::vector<std::string>& default_prune_patterns();

// Reads one prune pattern per line (blank lines and `#` comments skipped).
std::vector<std::string> load_prune_file(const std::filesystem::path& path);

// Feature id named by a prune pattern. Throws ConfigError on bad syntax.
FeatureId compile_pattern(std::string_view pattern, DigestRegistry& registry);

// --- Extraction -----------------------------------------------------------------

struct ExtractResult {
  FeatureVector vector;
  // Complete-subtree id of every input AST node in the rewritten tree; AND/OR
  // nodes absorbed by CNF map to the id of their predicate's CNF node.
  std::vector<FeatureId> node_signature;
  std::vector<std::string> warnings;
};

class FeatureExtractor {
 public:
  // Compiles the prune patterns and marks them in `registry`.
  FeatureExtractor(DigestRegistry& registry, RuleConfig config);

  // Runs the full rule pipeline on a raw or skeleton AST. Deterministic for a
  // fixed registry state and config.
  ExtractResult extract(const LabeledAst& ast) const;
  FeatureVector extract(const QuerySkeleton& skeleton) const;

  const RuleConfig& config() const { return config_; }
  DigestRegistry& registry() const { return *registry_; }

 private:
  DigestRegistry* registry_;
  RuleConfig config_;
};

}  // namespace qlog

#endif  // QLOG_FEATURES_H_
