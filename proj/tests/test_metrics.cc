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
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.h"
#include "qlog/errors.h"
#include "qlog/metrics.h"

namespace qlog {
namespace {

std::vector<std::uint32_t> identity(std::size_t n) {
  std::vector<std::uint32_t> v(n);
  std::iota(v.begin(), v.end(), 0u);
  return v;
}

TEST_CASE("adjusted Rand on hand-computed partitions") {
  // Pair counts: index 1, expected 3 * 2 / 6 = 1, so ARI = 0.
  std::vector<std::uint32_t> a = {0, 0, 0, 1}, b = {0, 0, 1, 1};
  CHECK(adjusted_rand(a, b) == doctest::Approx(0.0));
  // Index 0, expected 2/3, max 2: (0 - 2/3) / (2 - 2/3) = -1/2.
  std::vector<std::uint32_t> c = {0, 0, 1, 1}, d = {0, 1, 0, 1};
  CHECK(adjusted_rand(c, d) == doctest::Approx(-0.5));
  std::vector<std::uint32_t> renamed = {7, 7, 7, 3};
  CHECK(adjusted_rand(a, renamed) == 1.0);
  CHECK(adjusted_rand(a, b) == adjusted_rand(b, a));
}

TEST_CASE("adjusted Rand degenerate partitions") {
  std::vector<std::uint32_t> ones(5, 0), singles = identity(5);
  CHECK(adjusted_rand(ones, ones) == 1.0);
  CHECK(adjusted_rand(singles, singles) == 1.0);
  CHECK(adjusted_rand(ones, singles) == doctest::Approx(0.0));
  std::vector<std::uint32_t> shorter = {0, 1};
  CHECK_THROWS_AS(adjusted_rand(ones, shorter), PreconditionError);
}

TEST_CASE("adjusted Rand of random labelings averages near zero") {
  std::mt19937_64 rng(37);
  double sum = 0;
  const int trials = 2000;
  for (int t = 0; t < trials; ++t) {
    std::vector<std::uint32_t> a(60), b(60);
    for (auto& x : a) x = rng() % 5;
    for (auto& x : b) x = rng() % 5;
    double ari = adjusted_rand(a, b);
    CHECK(ari <= 1.0);
    sum += ari;
  }
  CHECK(std::abs(sum / trials) < 0.01);
}

TEST_CASE("entanglement end points") {
  for (std::size_t n : {2, 3, 10, 101}) {
    auto id = identity(n);
    auto rev = id;
    std::reverse(rev.begin(), rev.end());
    LeafOrdering a = LeafOrdering::from_order(id), r = LeafOrdering::from_order(rev);
    for (double p : {1.0, 2.0, 3.5}) {
      CHECK(entanglement(a, a, p) == 0.0);
      CHECK(entanglement(a, r, p) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  LeafOrdering one = LeafOrdering::from_order(identity(1));
  CHECK(entanglement(one, one) == 0.0);
}

TEST_CASE("entanglement is bounded and symmetric") {
  std::mt19937_64 rng(41);
  for (int k = 0; k < 500; ++k) {
    auto x = identity(2 + rng() % 60), y = x;
    std::shuffle(x.begin(), x.end(), rng);
    std::shuffle(y.begin(), y.end(), rng);
    LeafOrdering a = LeafOrdering::from_order(x), b = LeafOrdering::from_order(y);
    double e = entanglement(a, b), f = entanglement(b, a);
    CHECK(e >= 0.0);
    CHECK(e <= 1.0);
    CHECK(e == f);
  }
}

TEST_CASE("entanglement preconditions") {
  std::vector<std::uint32_t> dup = {0, 0, 1};
  CHECK_THROWS_AS(LeafOrdering::from_order(dup), PreconditionError);
  auto a = LeafOrdering::from_order(identity(3)), b = LeafOrdering::from_order(identity(4));
  CHECK_THROWS_AS(entanglement(a, b), PreconditionError);
  CHECK_THROWS_AS(entanglement(a, a, 0.5), PreconditionError);
}

TEST_CASE("dendrograms are aligned by leaf id") {
  auto d = oracle::dense_distances({{0}, {1}, {5}, {6}, {20}});
  Dendrogram g = hierarchical_cluster(oracle::to_matrix(d), Linkage::kAverage);
  std::vector<std::string> ids = {"a", "b", "c", "d", "e"};
  // The same tree with its leaves listed in another order.
  std::vector<std::uint32_t> perm = {4, 2, 0, 3, 1};
  std::vector<std::vector<double>> pd(5, std::vector<double>(5));
  std::vector<std::string> pids(5);
  for (int i = 0; i < 5; ++i) {
    pids[i] = ids[perm[i]];
    for (int j = 0; j < 5; ++j) pd[i][j] = d[perm[i]][perm[j]];
  }
  Dendrogram h = hierarchical_cluster(oracle::to_matrix(pd), Linkage::kAverage);
  CHECK(entanglement(g, ids, g, ids) == 0.0);
  double e = entanglement(g, ids, h, pids);
  CHECK(e >= 0.0);
  CHECK(e <= 1.0);
  std::vector<std::string> other = {"a", "b", "c", "d", "z"};
  CHECK_THROWS_AS(entanglement(g, ids, g, other), PreconditionError);
}

}  // namespace
}  // namespace qlog
