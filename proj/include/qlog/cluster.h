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

#ifndef QLOG_CLUSTER_H_
#define QLOG_CLUSTER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qlog/ast.h"
#include "qlog/feature_vector.h"
#include "qlog/features.h"

namespace qlog {

// Distinct skeletons of a log with their occurrence counts.
struct SkeletonCorpus {
  std::vector<QuerySkeleton> skeletons;  // unique by text, first-seen order
  std::uint64_t total_queries = 0;

  std::size_t size() const { return skeletons.size(); }
  bool empty() const { return skeletons.empty(); }
};

// Incremental deduplication by canonical skeleton text. Only the first
// occurrence of a skeleton is printed; repeats cost one structural hash.
class CorpusBuilder {
 public:
  // Skeletonizes `ast` and counts it. Returns the skeleton's corpus index.
  std::size_t add(const LabeledAst& ast);
  std::size_t add(QuerySkeleton skeleton);
  // Counts one more occurrence of the skeleton at `index`.
  void repeat(std::size_t index);

  std::size_t size() const { return corpus_.skeletons.size(); }
  SkeletonCorpus finish() &&;

 private:
  std::size_t insert(std::string key, QuerySkeleton skeleton);

  SkeletonCorpus corpus_;
  std::unordered_map<std::string, std::size_t> index_;  // structural key
};

SkeletonCorpus dedupe(std::span<const LabeledAst> parsed);

// Euclidean distance over the union of keys.
double distance(const FeatureVector& u, const FeatureVector& v);
// Distance between the unit-length scalings of u and v (0 if either is empty
// and the other too; 1 if exactly one is empty).
double normalized_distance(const FeatureVector& u, const FeatureVector& v);

// Symmetric matrix with zero diagonal, stored as the condensed upper triangle.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const;
  void set(std::size_t i, std::size_t j, double d);
  const std::vector<double>& condensed() const { return data_; }

 private:
  std::size_t index(std::size_t i, std::size_t j) const;

  std::size_t n_ = 0;
  std::vector<double> data_;
};

struct MatrixOptions {
  bool normalize = false;  // unit-length vectors
  unsigned threads = 1;
};

DistanceMatrix build_matrix(std::span<const FeatureVector> vectors,
                            const MatrixOptions& options = {});
DistanceMatrix build_matrix(const SkeletonCorpus& corpus, const MatrixOptions& options = {});

enum class Linkage { kSingle, kComplete, kAverage };

std::string_view linkage_name(Linkage linkage);
std::optional<Linkage> linkage_from_name(std::string_view name);

// One agglomeration step. Leaves are nodes 0..N-1; the k-th merge creates
// node N+k. `left` < `right`.
struct Merge {
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  double height = 0.0;
  std::uint32_t size = 0;  // leaves under the new node

  friend bool operator==(const Merge&, const Merge&) = default;
};

struct Dendrogram {
  std::size_t leaves = 0;
  std::vector<Merge> merges;  // exactly leaves - 1 entries

  // Left-to-right leaf sequence of the merge tree (left child first).
  std::vector<std::uint32_t> leaf_order() const;

  friend bool operator==(const Dendrogram&, const Dendrogram&) = default;
};

// Agglomerative clustering with Lance-Williams updates. On equal heights the
// pair with the lexicographically smallest (lower node id, higher node id)
// merges first. Throws PreconditionError on an empty matrix.
Dendrogram hierarchical_cluster(const DistanceMatrix& matrix, Linkage linkage);

struct FlatClustering {
  std::vector<std::uint32_t> labels;  // per leaf; ids contiguous from 0
  std::uint32_t k = 0;
};

// Exactly k clusters (1 <= k <= leaves). Cluster ids are assigned in order of
// each cluster's smallest leaf index.
FlatClustering cut_k(const Dendrogram& dendrogram, std::size_t k);
// Applies every merge with height <= threshold.
FlatClustering cut_height(const Dendrogram& dendrogram, double threshold);

// {"leaves": N, "leaf_ids": [...], "merges": [[l, r, h], ...], "leaf_order": [...]}
std::string dendrogram_to_json(const Dendrogram& dendrogram,
                               std::span<const std::string> leaf_ids);
// Parses dendrogram_to_json output; leaf ids are written to `leaf_ids` if given.
Dendrogram dendrogram_from_json(std::string_view json,
                                std::vector<std::string>* leaf_ids = nullptr);
std::string dendrogram_to_newick(const Dendrogram& dendrogram,
                                 std::span<const std::string> leaf_names);

}  // namespace qlog

#endif  // QLOG_CLUSTER_H_
