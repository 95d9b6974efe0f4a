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


// Log ingestion, the four-phase batch pipeline and the run directory.

#ifndef QLOG_PIPELINE_H_
#define QLOG_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qlog/cluster.h"
#include "qlog/features.h"
#include "qlog/registry.h"
#include "qlog/sql.h"
#include "qlog/summarizer.h"

namespace qlog {

// --- Ingest -------------------------------------------------------------------

enum class LogFormat { kSqlLines, kTsv, kJsonl };

std::string_view log_format_name(LogFormat format);
std::optional<LogFormat> log_format_from_name(std::string_view name);

struct LogRecord {
  std::string sql_text;
  std::optional<std::string> timestamp;
  std::optional<std::string> user;
  std::optional<std::string> session;
};

// Streams records from `in`, one per line:
//   sql-lines  the statement
//   tsv        timestamp \t user \t sql   (extra leading columns: session)
//   jsonl      {"sql": ..., "timestamp": ..., "user": ..., "session": ...}
// Lines with no usable SQL are skipped and counted.
class LogReader {
 public:
  LogReader(std::istream& in, LogFormat format);

  bool next(LogRecord* record);

  std::uint64_t lines() const { return lines_; }
  std::uint64_t malformed() const { return malformed_; }
  // First few diagnostics ("line 12: empty sql").
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  bool decode(const std::string& line, LogRecord* record, std::string* why) const;

  std::istream* in_;
  LogFormat format_;
  std::uint64_t lines_ = 0;
  std::uint64_t malformed_ = 0;
  std::vector<std::string> diagnostics_;
};

// Replaces every constant of a parsable statement by the hex SHA-256 of its
// text; unparsable input is hashed whole.
std::string anonymize_sql(std::string_view sql);
std::string sha256_hex(std::string_view data);

// --- Pipeline ------------------------------------------------------------------

struct PipelineConfig {
  RuleConfig rules;
  Linkage linkage = Linkage::kAverage;
  std::optional<std::size_t> cut_k;     // default: min(23, skeletons)
  std::optional<double> cut_height;     // overrides cut_k when set
  double tau = 0.8;
  bool all_statements = false;          // cluster INSERT/UPDATE/... as well
  bool normalize = false;
  bool anonymize = false;
  unsigned threads = 1;

  static constexpr std::size_t kDefaultClusters = 23;
};

struct IngestStats {
  std::uint64_t total = 0;          // records reaching the parser
  std::uint64_t parsed = 0;         // parsable and in scope
  std::uint64_t unparsable = 0;
  std::uint64_t out_of_scope = 0;   // parsable but not clustered (non-SELECT)
  std::uint64_t malformed_lines = 0;
  std::map<std::string, std::uint64_t> kinds;  // classify() histogram
};

struct PhaseTimings {
  double preprocess_ms = 0;
  double relabel_ms = 0;
  double cluster_ms = 0;
  double fptree_ms = 0;

  double total_ms() const { return preprocess_ms + relabel_ms + cluster_ms + fptree_ms; }
};

struct AnalysisRun {
  std::string run_id;
  PipelineConfig config;
  std::unique_ptr<DigestRegistry> registry = std::make_unique<DigestRegistry>();
  SkeletonCorpus corpus;
  std::vector<std::string> examples;  // first raw query per skeleton
  Dendrogram dendrogram;
  std::vector<std::uint32_t> cluster_of;  // per skeleton
  std::vector<ClusterSummary> summaries;  // ascending id
  IngestStats stats;
  PhaseTimings timings;

  bool empty() const { return corpus.empty(); }
  const ClusterSummary* find(std::uint32_t id) const;
  ClusterSummary* find(std::uint32_t id);
  std::uint32_t next_cluster_id() const;
};

using RecordSource = std::function<bool(LogRecord*)>;

// Runs preprocess -> relabel -> cluster -> FP-tree. `registry`, if given,
// seeds the run's registry (ids continue from it).
AnalysisRun run_pipeline(const RecordSource& source, const PipelineConfig& config,
                         const DigestRegistry* registry = nullptr);
AnalysisRun run_pipeline(std::span<const LogRecord> records, const PipelineConfig& config,
                         const DigestRegistry* registry = nullptr);
AnalysisRun run_pipeline(LogReader& reader, const PipelineConfig& config,
                         const DigestRegistry* registry = nullptr);

// Re-clusters the skeletons of every unknown-labeled cluster into `k`
// clusters (clamped to their count). Labeled clusters are left as they are;
// new clusters get fresh ids. Returns the new ids.
struct ReElaboration {
  std::vector<std::uint32_t> removed;
  std::vector<std::uint32_t> created;
};
ReElaboration re_elaborate(AnalysisRun& run, std::size_t k);

// --- Run directory ------------------------------------------------------------------

inline constexpr int kRunFormatVersion = 1;

void save_run(const AnalysisRun& run, const std::filesystem::path& dir);
AnalysisRun load_run(const std::filesystem::path& dir);

// Rewrites only the files touched by a label change.
void save_labels(const AnalysisRun& run, const std::filesystem::path& dir);
void save_cluster(const AnalysisRun& run, std::uint32_t id, const std::filesystem::path& dir);
// Rewrites clusters, labels and summaries; removes stale summary files.
void save_clusters(const AnalysisRun& run, const std::filesystem::path& dir);

// Individual documents, also served over HTTP.
std::string run_to_json(const AnalysisRun& run);
std::string clusters_to_json(const AnalysisRun& run);
std::string labels_to_json(const AnalysisRun& run);
std::string timings_to_json(const AnalysisRun& run);
std::string timings_table(const AnalysisRun& run);

}  // namespace qlog

#endif  // QLOG_PIPELINE_H_
