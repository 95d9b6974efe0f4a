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


// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "oracles.h"
#include "qlog/features.h"
#include "qlog/metrics.h"
#include "qlog/pipeline.h"
#include "qlog/synth.h"
#include "test_util.h"

namespace qlog {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome wl_oracle() {
  auto start = Clock::now();
  std::mt19937_64 rng(20260101);
  DigestRegistry reg;
  oracle::WlChecker checker;
  int ok = 0;
  std::size_t nodes = 0, largest = 0;
  int deepest = 0;
  std::string first_failure;
  for (int k = 0; k < 500; ++k) {
    LabeledAst t = oracle::random_tree(rng, 40, 5);
    nodes += t.size();
    largest = std::max(largest, t.size());
    deepest = std::max(deepest, t.depth());
    std::string why;
    if (t.size() <= 40 && t.depth() <= 5 && checker.check(t, reg, &why)) {
      ++ok;
    } else if (first_failure.empty()) {
      first_failure = why.empty() ? "tree outside bounds" : why;
    }
  }
  double s = seconds_since(start);
  return {ok == 500 && s < 30.0, std::to_string(ok) + "/500 trees match the oracle (mean " +
                                     std::to_string(nodes / 500) + " nodes, max " +
                                     std::to_string(largest) + ", max depth " +
                                     std::to_string(deepest) + ") in " + std::to_string(s) + " s" +
                                     (first_failure.empty() ? "" : "; " + first_failure)};
}

Outcome cnf_soundness() {
  auto start = Clock::now();
  std::mt19937_64 rng(20260102);
  DigestRegistry reg;
  int equivalent = 0, invariant = 0;
  for (int k = 0; k < 1000; ++k) {
    int vars = 1 + static_cast<int>(rng() % 8);
    int leaves = 14;
    oracle::Formula f = oracle::random_formula(rng, oracle::random_pool(rng, vars, 8), 4, leaves);
    LabeledAst t;
    t.set_root(oracle::build_formula(t, f));
    auto cnf = cnf_normalize(t, t.root(), reg);
    bool same = true;
    for (unsigned a = 0; a < (1u << vars) && same; ++a) {
      same = oracle::eval_cnf(t, cnf, a) == oracle::eval_formula(f, a);
    }
    equivalent += same;
    FeatureId id = cnf_features(cnf, reg).cnf_id;
    bool stable = true;
    for (int p = 0; p < 3; ++p) {
      oracle::Formula g = f;
      oracle::shuffle_formula(g, rng);
      LabeledAst u;
      u.set_root(oracle::build_formula(u, g));
      stable = stable && cnf_features(cnf_normalize(u, u.root(), reg), reg).cnf_id == id;
    }
    invariant += stable;
  }
  double s = seconds_since(start);
  return {equivalent == 1000 && invariant == 1000 && s < 30.0,
          std::to_string(equivalent) + "/1000 truth-table equivalent, " + std::to_string(invariant) +
              "/1000 permutation invariant, " + std::to_string(s) + " s"};
}

Outcome skeleton_collapse() {
  auto templates = make_templates(50, 20260103);
  SyntheticLog log = generate_log(templates, 100000, 20260104);
  PipelineConfig config;
  AnalysisRun run = run_pipeline(testutil::records(log.queries), config);
  // Each skeleton must hold the instances of exactly one template.
  std::vector<std::int64_t> template_of_skeleton(run.corpus.size(), -1);
  bool one_to_one = run.stats.parsed == 100000;
  std::vector<LogRecord> recs = testutil::records(log.queries);
  for (std::size_t q = 0; q < recs.size() && one_to_one; q += 97) {
    ParseOutcome p = parse(recs[q].sql_text);
    std::string text = skeletonize(*p.ast).text;
    auto it = std::find_if(run.corpus.skeletons.begin(), run.corpus.skeletons.end(),
                           [&](const QuerySkeleton& s) { return s.text == text; });
    if (it == run.corpus.skeletons.end()) {
      one_to_one = false;
      break;
    }
    auto& slot = template_of_skeleton[it - run.corpus.skeletons.begin()];
    if (slot == -1) slot = log.template_of[q];
    one_to_one = slot == log.template_of[q];
  }
  return {run.corpus.size() == 50 && one_to_one,
          "100000 queries -> " + std::to_string(run.corpus.size()) + " skeletons"};
}

Outcome clustering_recovery() {
  FamilyCorpus fam = make_families(3, 20, 20260105);
  std::string detail;
  bool pass = true;
  for (Linkage l : {Linkage::kSingle, Linkage::kComplete, Linkage::kAverage}) {
    PipelineConfig config;
    config.linkage = l;
    config.cut_k = 3;
    AnalysisRun run = run_pipeline(testutil::records(fam.sql), config);
    if (run.corpus.size() != fam.sql.size()) {
      return {false, "family members collapsed into fewer skeletons"};
    }
    double ari = adjusted_rand(run.cluster_of, fam.family);
    pass = pass && ari == 1.0;
    detail += std::string(linkage_name(l)) + " ARI " + std::to_string(ari) + "; ";
    if (l == Linkage::kSingle) {
      DistanceMatrix m = build_matrix(run.corpus);
      double within = 0, across = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = i + 1; j < m.size(); ++j) {
          if (fam.family[i] == fam.family[j]) {
            within = std::max(within, m(i, j));
          } else {
            across = std::min(across, m(i, j));
          }
        }
      }
      pass = pass && within < across;
      detail += "max within " + std::to_string(within) + " < min across " + std::to_string(across) + "; ";
    }
  }
  return {pass, detail};
}

Outcome fptree_correctness() {
  std::mt19937_64 rng(20260106);
  int ok = 0;
  std::string first;
  for (int k = 0; k < 200; ++k) {
    std::size_t n = rng() % 101, features = 1 + rng() % 50;
    std::vector<std::vector<FeatureId>> tx(n);
    for (auto& t : tx) {
      std::size_t len = rng() % 15;
      for (std::size_t i = 0; i < len; ++i) {
        t.push_back(static_cast<FeatureId>(std::min(rng() % features, rng() % features)));
      }
    }
    std::string why = oracle::check_fptree(FPTree::build(tx), tx);
    if (why.empty()) {
      ++ok;
    } else if (first.empty()) {
      first = why;
    }
  }
  return {ok == 200, std::to_string(ok) + "/200 clusters" + (first.empty() ? "" : "; " + first)};
}

Outcome entanglement_properties() {
  std::mt19937_64 rng(20260107);
  std::vector<std::uint32_t> id(200);
  std::iota(id.begin(), id.end(), 0u);
  std::vector<std::uint32_t> rev(id.rbegin(), id.rend());
  double same = entanglement(LeafOrdering::from_order(id), LeafOrdering::from_order(id));
  double reversed = entanglement(LeafOrdering::from_order(id), LeafOrdering::from_order(rev));
  int in_bounds = 0, symmetric = 0;
  for (int k = 0; k < 1000; ++k) {
    std::vector<std::uint32_t> x(2 + rng() % 200);
    std::iota(x.begin(), x.end(), 0u);
    std::vector<std::uint32_t> y = x;
    std::shuffle(x.begin(), x.end(), rng);
    std::shuffle(y.begin(), y.end(), rng);
    LeafOrdering a = LeafOrdering::from_order(x), b = LeafOrdering::from_order(y);
    double e = entanglement(a, b), f = entanglement(b, a);
    in_bounds += e >= 0.0 && e <= 1.0;
    symmetric += e == f;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "identical %.3f, reversed %.3f, %d/1000 in [0,1], %d/1000 symmetric",
                same, reversed, in_bounds, symmetric);
  bool pass = same == 0.0 && std::abs(reversed - 1.0) < 5e-4 && in_bounds == 1000 &&
              symmetric == 1000;
  return {pass, buf};
}

struct Timed {
  AnalysisRun run;
  double wall_s = 0;
};

Timed timed_run(std::size_t templates, std::size_t queries, std::uint64_t seed) {
  SyntheticLog log = generate_log(make_templates(templates, seed), queries, seed + 1);
  std::vector<LogRecord> recs = testutil::records(log.queries);
  testutil::TempDir dir;
  auto start = Clock::now();
  PipelineConfig config;
  config.threads = 1;
  Timed t{run_pipeline(recs, config), 0};
  save_run(t.run, dir.path());
  t.wall_s = seconds_since(start);
  return t;
}

Outcome scaled_performance() {
  Timed half = timed_run(750, 50000, 20260108);
  Timed full = timed_run(1500, 100000, 20260108);
  const PhaseTimings& p = full.run.timings;
  bool dominant = p.cluster_ms > p.preprocess_ms && p.cluster_ms > p.relabel_ms &&
                  p.cluster_ms > p.fptree_ms;
  // Doubling the skeletons should more than double the clustering time.
  double growth = full.run.timings.cluster_ms / std::max(half.run.timings.cluster_ms, 1e-9);
  double skel_growth = double(full.run.corpus.size()) / double(half.run.corpus.size());
  bool superlinear = growth > skel_growth;
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "%zu skeletons in %.2f s; preprocess %.0f ms, relabel %.0f ms, cluster %.0f ms, "
                "fptree %.0f ms; cluster time x%.2f for x%.2f skeletons",
                full.run.corpus.size(), full.wall_s, p.preprocess_ms, p.relabel_ms, p.cluster_ms,
                p.fptree_ms, growth, skel_growth);
  return {full.wall_s < 90.0 && dominant && superlinear, buf};
}

Outcome determinism() {
  SyntheticLog log = generate_log(make_templates(300, 20260109), 30000, 20260110);
  std::vector<LogRecord> recs = testutil::records(log.queries);
  testutil::TempDir a, b;
  PipelineConfig config;
  save_run(run_pipeline(recs, config), a.path());
  save_run(run_pipeline(recs, config), b.path());
  std::vector<fs::path> files = {"clusters.json", "labels.json", "dendrogram.json"};
  for (const auto& e : fs::directory_iterator(a.path() / "summaries")) {
    files.push_back(fs::path("summaries") / e.path().filename());
  }
  std::size_t same = 0;
  for (const auto& f : files) {
    same += fs::exists(b.path() / f) &&
            testutil::slurp(a.path() / f) == testutil::slurp(b.path() / f);
  }
  std::size_t count_b = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(b.path() / "summaries")) ++count_b;
  bool pass = same == files.size() && count_b + 3 == files.size();
  return {pass, std::to_string(same) + "/" + std::to_string(files.size()) + " files byte-identical"};
}

}  // namespace
}  // namespace qlog

int main() {
  using namespace qlog;
  struct Criterion {
    int number;
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "WL oracle equivalence", wl_oracle},
      {2, "CNF soundness", cnf_soundness},
      {3, "skeleton collapse", skeleton_collapse},
      {4, "clustering recovery", clustering_recovery},
      {5, "FP-tree correctness", fptree_correctness},
      {6, "entanglement properties", entanglement_properties},
      {7, "scaled performance", scaled_performance},
      {8, "determinism", determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %d (%s): %s - %s\n", c.number, c.name, o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
