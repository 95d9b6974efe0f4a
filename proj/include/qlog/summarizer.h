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

// Per-cluster summaries: an FP-tree over the members' feature sets, the
// features shared by at least a tau fraction of members, a text explanation
// and a DOT rendering of the representative skeleton.

#ifndef QLOG_SUMMARIZER_H_
#define QLOG_SUMMARIZER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qlog/cluster.h"
#include "qlog/features.h"
#include "qlog/registry.h"

namespace qlog {

// --- FP-tree ------------------------------------------------------------------

struct FPNode {
  FeatureId feature = 0;        // unused for the root
  std::uint32_t count = 0;
  std::int32_t parent = -1;     // -1 for the root
  std::vector<std::uint32_t> children;  // in item order
};

struct HeaderEntry {
  FeatureId feature = 0;
  std::uint32_t support = 0;
  std::vector<std::uint32_t> nodes;  // node indices, pre-order
};

class FPTree {
 public:
  // Strict weak order on (feature, support) pairs deciding item order inside
  // each transaction. The default is support descending, then id ascending.
  using ItemOrder = std::function<bool(FeatureId a, std::uint32_t support_a, FeatureId b,
                                       std::uint32_t support_b)>;

  FPTree();

  // Each transaction is a feature set; duplicates are collapsed. The result
  // does not depend on the order of `transactions`.
  static FPTree build(std::span<const std::vector<FeatureId>> transactions,
                      const ItemOrder& order = {});

  std::uint32_t transactions() const { return nodes_[0].count; }
  const std::vector<FPNode>& nodes() const { return nodes_; }
  const FPNode& root() const { return nodes_[0]; }
  // Items in tree order.
  const std::vector<HeaderEntry>& header() const { return header_; }
  std::uint32_t support(FeatureId feature) const;

  // Features with support >= ceil(tau * transactions()), support descending
  // then id ascending. tau must lie in [0, 1].
  std::vector<std::pair<FeatureId, std::uint32_t>> common_features(double tau) const;

  friend bool operator==(const FPTree& a, const FPTree& b);

 private:
  std::vector<FPNode> nodes_;
  std::vector<HeaderEntry> header_;
};

bool operator==(const FPNode& a, const FPNode& b);
bool operator==(const HeaderEntry& a, const HeaderEntry& b);

// Smallest support that satisfies `tau` for `n` transactions.
std::uint32_t support_threshold(double tau, std::uint32_t n);

// Human-readable s-expression for a feature id, e.g.
// "(EQUALS (COL_ID r.a) ?)". Renderings longer than max_chars are cut to
// max_chars characters ending in "...".
std::string describe_feature(const DigestRegistry& registry, FeatureId id,
                             std::size_t max_chars = 160);

// --- Summaries ----------------------------------------------------------------

enum class ClusterLabel { kUnknown, kSafe, kUnsafe };

std::string_view cluster_label_name(ClusterLabel label);
std::optional<ClusterLabel> cluster_label_from_name(std::string_view name);

struct CommonFeature {
  FeatureId id = 0;
  std::uint32_t support = 0;
  std::string text;
};

// A readable clause shared by part of the cluster, e.g. verb "filter on",
// text "historytran.caseid = ?".
struct Fragment {
  std::string verb;
  std::string text;
  std::uint32_t support = 0;
};

struct ClusterSummary {
  std::uint32_t id = 0;
  std::vector<std::uint32_t> members;  // corpus indices, ascending
  std::uint64_t query_count = 0;
  double tau = 0.8;
  ClusterLabel label = ClusterLabel::kUnknown;

  FPTree tree;
  std::vector<CommonFeature> common_features;
  std::uint32_t representative = 0;  // corpus index of the medoid
  std::string representative_text;
  std::vector<Fragment> fragments;   // support >= threshold only
  std::string explanation;
  // Per node of the representative skeleton: true if the node's subtree
  // occurs in at least a tau fraction of the members.
  std::vector<bool> common_nodes;

  std::uint32_t size() const { return static_cast<std::uint32_t>(members.size()); }
};

struct SummaryOptions {
  double tau = 0.8;
  bool normalize = false;  // distance used for the medoid
};

// Summarizes `members` (indices into `corpus`, non-empty). `matrix`, if
// given, must be the distance matrix of the whole corpus.
ClusterSummary summarize(std::uint32_t id, std::span<const std::uint32_t> members,
                         const SkeletonCorpus& corpus, const FeatureExtractor& extractor,
                         const SummaryOptions& options, const DistanceMatrix* matrix = nullptr);

// Medoid of `members`: minimal summed distance, ties to the lowest index.
std::uint32_t medoid(std::span<const std::uint32_t> members, const SkeletonCorpus& corpus,
                     bool normalize, const DistanceMatrix* matrix = nullptr);

// Text explanation from the summary's fragments.
std::string explain(const ClusterSummary& summary, const SkeletonCorpus& corpus);

// DOT digraph of the representative skeleton; every node carries
// class="common" or class="variable".
std::string visualize(const ClusterSummary& summary, const SkeletonCorpus& corpus);

// JSON exports.
std::string summary_to_json(const ClusterSummary& summary, const SkeletonCorpus& corpus);
std::string fptree_to_json(const FPTree& tree, const DigestRegistry& registry);

}  // namespace qlog

#endif  // QLOG_SUMMARIZER_H_
