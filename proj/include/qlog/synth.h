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


// Synthetic query logs with known ground truth, for tests and benchmarks.

#ifndef QLOG_SYNTH_H_
#define QLOG_SYNTH_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace qlog {

// A template is SQL text where `#n` stands for a random integer and `#s` for
// a random quoted string. Instances of one template share a skeleton.
struct QueryTemplate {
  std::string sql;
};

// `count` templates with pairwise distinct skeletons.
std::vector<QueryTemplate> make_templates(std::size_t count, std::uint64_t seed);

// Fills the placeholders of `tmpl` with random constants.
std::string instantiate(const QueryTemplate& tmpl, std::mt19937_64& rng);

struct SyntheticLog {
  std::vector<std::string> queries;
  std::vector<std::uint32_t> template_of;  // per query
};

// `queries` instances drawn round-robin-then-shuffled so every template
// occurs at least once when queries >= templates.size().
SyntheticLog generate_log(const std::vector<QueryTemplate>& templates, std::size_t queries,
                          std::uint64_t seed);

// Skeleton-level corpus of structurally separated template families: every
// member of a family shares a large common query shape and differs from its
// siblings in one or two predicates or projections.
struct FamilyCorpus {
  std::vector<std::string> sql;          // one constant-free query per skeleton
  std::vector<std::uint32_t> family;     // ground truth per skeleton
};

FamilyCorpus make_families(std::size_t families, std::size_t per_family, std::uint64_t seed);

}  // namespace qlog

#endif  // QLOG_SYNTH_H_
