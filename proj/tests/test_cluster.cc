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


#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.h"
#include "qlog/cluster.h"
#include "qlog/errors.h"
#include "qlog/metrics.h"
#include "qlog/sql.h"

namespace qlog {
namespace {

std::vector<std::vector<double>> random_points(std::mt19937_64& rng, std::size_t n, std::size_t dims) {
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<std::vector<double>> pts(n, std::vector<double>(dims));
  for (auto& p : pts) {
    for (auto& x : p) x = u(rng);
  }
  return pts;
}

std::vector<int> random_counts(std::mt19937_64& rng, std::size_t dims) {
  std::vector<int> c(dims);
  for (auto& x : c) x = static_cast<int>(rng() % 4);
  return c;
}

void check_same(const Dendrogram& got, const Dendrogram& want) {
  REQUIRE(got.leaves == want.leaves);
  REQUIRE(got.merges.size() == want.merges.size());
  for (std::size_t k = 0; k < got.merges.size(); ++k) {
    INFO("merge " << k);
    CHECK(got.merges[k].left == want.merges[k].left);
    CHECK(got.merges[k].right == want.merges[k].right);
    CHECK(got.merges[k].size == want.merges[k].size);
    CHECK(got.merges[k].height == doctest::Approx(want.merges[k].height).epsilon(1e-12));
  }
}

TEST_CASE("sparse distances match a dense computation") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    std::vector<int> a = random_counts(rng, 12), b = random_counts(rng, 12);
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += double(a[i] - b[i]) * (a[i] - b[i]);
    CHECK(distance(oracle::to_vector(a), oracle::to_vector(b)) == doctest::Approx(std::sqrt(s)));
  }
}

TEST_CASE("distances satisfy the metric axioms") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 300; ++k) {
    FeatureVector x = oracle::to_vector(random_counts(rng, 10));
    FeatureVector y = oracle::to_vector(random_counts(rng, 10));
    FeatureVector z = oracle::to_vector(random_counts(rng, 10));
    for (auto d : {distance, normalized_distance}) {
      CHECK(d(x, x) == 0.0);
      CHECK(d(x, y) == d(y, x));
      CHECK(d(x, y) >= 0.0);
      CHECK(d(x, z) <= d(x, y) + d(y, z) + 1e-12);
    }
  }
}

TEST_CASE("normalized distance edge cases") {
  FeatureVector empty;
  FeatureVector a = FeatureVector::from_bag({1, 2});
  FeatureVector twice = FeatureVector::from_bag({1, 1, 2, 2});
  CHECK(normalized_distance(empty, empty) == 0.0);
  CHECK(normalized_distance(empty, a) == 1.0);
  CHECK(normalized_distance(a, twice) == doctest::Approx(0.0));
  CHECK(normalized_distance(FeatureVector::from_bag({1}), FeatureVector::from_bag({2})) ==
        doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("threaded matrix equals the sequential one") {
  std::mt19937_64 rng(9);
  std::vector<FeatureVector> v;
  for (int i = 0; i < 101; ++i) v.push_back(oracle::to_vector(random_counts(rng, 20)));
  DistanceMatrix one = build_matrix(v, {false, 1});
  DistanceMatrix many = build_matrix(v, {false, 7});
  CHECK(one.condensed() == many.condensed());
  CHECK(one(3, 3) == 0.0);
  CHECK(one(4, 9) == one(9, 4));
  CHECK(one(4, 9) == distance(v[4], v[9]));
}

TEST_CASE("linkage matches the cubic reference") {
  std::mt19937_64 rng(11);
  for (Linkage l : {Linkage::kSingle, Linkage::kComplete, Linkage::kAverage}) {
    for (int k = 0; k < 40; ++k) {
      auto d = oracle::dense_distances(random_points(rng, 2 + rng() % 30, 3));
      INFO(linkage_name(l) << " case " << k);
      check_same(hierarchical_cluster(oracle::to_matrix(d), l), oracle::naive_cluster(d, l));
    }
  }
}

TEST_CASE("ties break on the smallest node ids") {
  std::mt19937_64 rng(13);
  for (Linkage l : {Linkage::kSingle, Linkage::kComplete}) {
    for (int k = 0; k < 40; ++k) {
      std::size_t n = 2 + rng() % 20;
      std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = 1.0 + rng() % 3;
      }
      check_same(hierarchical_cluster(oracle::to_matrix(d), l), oracle::naive_cluster(d, l));
    }
  }
  std::vector<std::vector<double>> flat(6, std::vector<double>(6, 1.0));
  for (int i = 0; i < 6; ++i) flat[i][i] = 0.0;
  Dendrogram g = hierarchical_cluster(oracle::to_matrix(flat), Linkage::kAverage);
  check_same(g, oracle::naive_cluster(flat, Linkage::kAverage));
  CHECK(g.merges[0] == Merge{0, 1, 1.0, 2});
  CHECK(g.merges[1] == Merge{2, 3, 1.0, 2});
}

TEST_CASE("three separated groups are recovered by every linkage") {
  std::mt19937_64 rng(17);
  std::vector<std::vector<double>> pts;
  std::vector<std::uint32_t> truth;
  for (std::uint32_t g = 0; g < 3; ++g) {
    for (auto p : random_points(rng, 10, 2)) {
      pts.push_back({p[0] + 100.0 * g, p[1]});
      truth.push_back(g);
    }
  }
  auto d = oracle::dense_distances(pts);
  for (Linkage l : {Linkage::kSingle, Linkage::kComplete, Linkage::kAverage}) {
    FlatClustering f = cut_k(hierarchical_cluster(oracle::to_matrix(d), l), 3);
    CHECK(f.k == 3);
    CHECK(oracle::same_partition(f.labels, truth));
    CHECK(adjusted_rand(f.labels, truth) == 1.0);
  }
}

TEST_CASE("clustering is equivariant under relabeling the leaves") {
  std::mt19937_64 rng(19);
  for (int k = 0; k < 20; ++k) {
    auto pts = random_points(rng, 25, 3);
    std::vector<std::size_t> perm(pts.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::vector<double>> shuffled;
    for (auto p : perm) shuffled.push_back(pts[p]);
    for (Linkage l : {Linkage::kSingle, Linkage::kComplete, Linkage::kAverage}) {
      Dendrogram a = hierarchical_cluster(oracle::to_matrix(oracle::dense_distances(pts)), l);
      Dendrogram b = hierarchical_cluster(oracle::to_matrix(oracle::dense_distances(shuffled)), l);
      for (std::size_t c : {2, 5, 9}) {
        FlatClustering fa = cut_k(a, c), fb = cut_k(b, c);
        std::vector<std::uint32_t> back(pts.size());
        for (std::size_t i = 0; i < perm.size(); ++i) back[perm[i]] = fb.labels[i];
        CHECK(oracle::same_partition(fa.labels, back));
      }
      for (std::size_t m = 0; m < a.merges.size(); ++m) {
        CHECK(a.merges[m].height == doctest::Approx(b.merges[m].height).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("cuts") {
  // Leaves on a line at 0, 1, 3, 7: single linkage merges at 1, 2, 4.
  std::vector<std::vector<double>> d = oracle::dense_distances({{0}, {1}, {3}, {7}});
  Dendrogram g = hierarchical_cluster(oracle::to_matrix(d), Linkage::kSingle);
  CHECK(cut_k(g, 1).labels == std::vector<std::uint32_t>{0, 0, 0, 0});
  CHECK(cut_k(g, 2).labels == std::vector<std::uint32_t>{0, 0, 0, 1});
  CHECK(cut_k(g, 4).labels == std::vector<std::uint32_t>{0, 1, 2, 3});
  CHECK(cut_height(g, 1.5).labels == std::vector<std::uint32_t>{0, 0, 1, 2});
  CHECK(cut_height(g, 0.5).k == 4);
  CHECK(cut_height(g, 10).k == 1);
  CHECK_THROWS_AS(cut_k(g, 0), PreconditionError);
  CHECK_THROWS_AS(cut_k(g, 5), PreconditionError);
  CHECK(g.leaf_order().size() == 4);
  CHECK_THROWS_AS(hierarchical_cluster(DistanceMatrix{}, Linkage::kSingle), PreconditionError);
  Dendrogram one = hierarchical_cluster(DistanceMatrix(1), Linkage::kAverage);
  CHECK(one.merges.empty());
  CHECK(cut_k(one, 1).labels == std::vector<std::uint32_t>{0});
}

TEST_CASE("leaf order is a permutation and follows left children") {
  std::mt19937_64 rng(23);
  auto d = oracle::dense_distances(random_points(rng, 30, 2));
  Dendrogram g = hierarchical_cluster(oracle::to_matrix(d), Linkage::kAverage);
  std::vector<std::uint32_t> order = g.leaf_order();
  std::vector<std::uint32_t> sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (std::uint32_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
  // Every merged node covers a contiguous run of the order.
  std::vector<std::vector<std::uint32_t>> under(g.leaves + g.merges.size());
  for (std::uint32_t i = 0; i < g.leaves; ++i) under[i] = {i};
  std::vector<std::uint32_t> pos(order.size());
  for (std::uint32_t k = 0; k < order.size(); ++k) pos[order[k]] = k;
  for (std::size_t m = 0; m < g.merges.size(); ++m) {
    auto& u = under[g.leaves + m];
    u = under[g.merges[m].left];
    u.insert(u.end(), under[g.merges[m].right].begin(), under[g.merges[m].right].end());
    std::vector<std::uint32_t> p;
    for (auto x : u) p.push_back(pos[x]);
    auto [lo, hi] = std::minmax_element(p.begin(), p.end());
    CHECK(*hi - *lo + 1 == u.size());
  }
}

TEST_CASE("dendrogram JSON round-trips and rejects damage") {
  std::mt19937_64 rng(29);
  auto d = oracle::dense_distances(random_points(rng, 12, 2));
  Dendrogram g = hierarchical_cluster(oracle::to_matrix(d), Linkage::kComplete);
  std::vector<std::string> ids;
  for (int i = 0; i < 12; ++i) ids.push_back("q" + std::to_string(i));
  std::string json = dendrogram_to_json(g, ids);
  std::vector<std::string> back_ids;
  CHECK(dendrogram_from_json(json, &back_ids) == g);
  CHECK(back_ids == ids);
  CHECK_THROWS_AS(dendrogram_from_json("{", nullptr), RunStoreError);
  CHECK_THROWS_AS(dendrogram_from_json("{\"format\":\"x\"}", nullptr), RunStoreError);
  std::string newick = dendrogram_to_newick(g, ids);
  CHECK(newick.back() == ';');
  CHECK(std::count(newick.begin(), newick.end(), '(') == 11);
}

TEST_CASE("corpus builder collapses skeletons") {
  CorpusBuilder b;
  auto add = [&](const char* q) { return b.add(*parse(q).ast); };
  CHECK(add("SELECT a FROM r WHERE b = 1") == 0);
  CHECK(add("SELECT a FROM r WHERE b = 2") == 0);
  CHECK(add("SELECT a FROM r WHERE b = 'x'") == 0);
  CHECK(add("SELECT a FROM r WHERE c = 2") == 1);
  b.repeat(1);
  SkeletonCorpus c = std::move(b).finish();
  REQUIRE(c.size() == 2);
  CHECK(c.skeletons[0].count == 3);
  CHECK(c.skeletons[1].count == 2);
  CHECK(c.total_queries == 5);
  CHECK(c.skeletons[0].text == "select a from r where b = ?");
}

TEST_CASE("linkage names round-trip") {
  for (Linkage l : {Linkage::kSingle, Linkage::kComplete, Linkage::kAverage}) {
    CHECK(linkage_from_name(linkage_name(l)) == l);
  }
  CHECK_FALSE(linkage_from_name("ward").has_value());
}

}  // namespace
}  // namespace qlog
