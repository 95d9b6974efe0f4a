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


#include "qlog/pipeline.h"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "qlog/errors.h"
#include "qlog/version.h"

namespace qlog {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr std::size_t kMaxDiagnostics = 20;
constexpr std::size_t kBatch = 4096;

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double lap_ms() {
    auto now = std::chrono::steady_clock::now();
    double ms = std::chrono::duration<double, std::milli>(now - start_).count();
    start_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void validate(const PipelineConfig& c) {
  if (!(c.tau >= 0.0 && c.tau <= 1.0)) throw ConfigError("tau must lie in [0, 1]");
  if (c.cut_k && *c.cut_k == 0) throw ConfigError("cut k must be at least 1");
  if (c.cut_height && !(*c.cut_height >= 0.0)) throw ConfigError("cut height must be >= 0");
  if (c.threads == 0) throw ConfigError("threads must be at least 1");
}

void parse_batch(const std::vector<LogRecord>& batch, std::vector<ParseOutcome>& out,
                 unsigned threads) {
  out.assign(batch.size(), ParseOutcome{});
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < batch.size(); i += stride) out[i] = parse(batch[i].sql_text);
  };
  if (threads <= 1 || batch.size() < 256) {
    work(0, 1);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  for (auto& th : pool) th.join();
}

std::vector<std::vector<std::uint32_t>> members_by_cluster(const AnalysisRun& run) {
  std::map<std::uint32_t, std::vector<std::uint32_t>> by;
  for (std::uint32_t i = 0; i < run.cluster_of.size(); ++i) by[run.cluster_of[i]].push_back(i);
  std::vector<std::vector<std::uint32_t>> out;
  for (auto& [_, m] : by) out.push_back(std::move(m));
  return out;
}

std::string compute_run_id(const AnalysisRun& run) {
  std::string material = run.config.rules.to_text();
  material += linkage_name(run.config.linkage);
  for (const auto& s : run.corpus.skeletons) {
    material += '\n';
    material += s.text;
    material += '\t';
    material += std::to_string(s.count);
  }
  return sha256_hex(material).substr(0, 16);
}

json config_to_json(const PipelineConfig& c) {
  json j;
  j["rules"] = c.rules.to_text();
  j["linkage"] = linkage_name(c.linkage);
  j["cut_k"] = c.cut_k ? json(*c.cut_k) : json(nullptr);
  j["cut_height"] = c.cut_height ? json(*c.cut_height) : json(nullptr);
  j["tau"] = c.tau;
  j["all_statements"] = c.all_statements;
  j["normalize"] = c.normalize;
  j["anonymize"] = c.anonymize;
  j["threads"] = c.threads;
  return j;
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  c.rules = RuleConfig::parse(j.at("rules").get<std::string>());
  auto linkage = linkage_from_name(j.at("linkage").get<std::string>());
  if (!linkage) throw RunStoreError(RunStoreError::Code::kCorrupt, "run.json: unknown linkage");
  c.linkage = *linkage;
  if (!j.at("cut_k").is_null()) c.cut_k = j.at("cut_k").get<std::size_t>();
  if (!j.at("cut_height").is_null()) c.cut_height = j.at("cut_height").get<double>();
  c.tau = j.at("tau").get<double>();
  c.all_statements = j.at("all_statements").get<bool>();
  c.normalize = j.at("normalize").get<bool>();
  c.anonymize = j.at("anonymize").get<bool>();
  c.threads = j.at("threads").get<unsigned>();
  return c;
}

json stats_to_json(const IngestStats& s) {
  return {{"total", s.total},
          {"parsed", s.parsed},
          {"unparsable", s.unparsable},
          {"out_of_scope", s.out_of_scope},
          {"malformed_lines", s.malformed_lines},
          {"kinds", s.kinds}};
}

IngestStats stats_from_json(const json& j) {
  IngestStats s;
  s.total = j.at("total").get<std::uint64_t>();
  s.parsed = j.at("parsed").get<std::uint64_t>();
  s.unparsable = j.at("unparsable").get<std::uint64_t>();
  s.out_of_scope = j.at("out_of_scope").get<std::uint64_t>();
  s.malformed_lines = j.at("malformed_lines").get<std::uint64_t>();
  s.kinds = j.at("kinds").get<std::map<std::string, std::uint64_t>>();
  return s;
}

void write_file(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw RunStoreError(RunStoreError::Code::kIo, "cannot write " + tmp.string());
    out << content;
    if (!out) throw RunStoreError(RunStoreError::Code::kIo, "write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw RunStoreError(RunStoreError::Code::kIo, "cannot replace " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RunStoreError(RunStoreError::Code::kNotFound, "missing " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw RunStoreError(RunStoreError::Code::kCorrupt, path.filename().string() + ": " + e.what());
  }
}

void summarize_all(AnalysisRun& run, const DistanceMatrix* matrix) {
  FeatureExtractor ex(*run.registry, run.config.rules);
  SummaryOptions opts{run.config.tau, run.config.normalize};
  std::map<std::uint32_t, ClusterLabel> labels;
  for (const auto& s : run.summaries) labels[s.id] = s.label;
  run.summaries.clear();
  for (const auto& members : members_by_cluster(run)) {
    std::uint32_t id = run.cluster_of[members[0]];
    ClusterSummary s = summarize(id, members, run.corpus, ex, opts, matrix);
    if (auto it = labels.find(id); it != labels.end()) s.label = it->second;
    run.summaries.push_back(std::move(s));
  }
}

fs::path summary_path(const fs::path& dir, std::uint32_t id, const char* ext) {
  return dir / "summaries" / (std::to_string(id) + ext);
}

}  // namespace

// --- Ingest -------------------------------------------------------------------------

std::string_view log_format_name(LogFormat format) {
  switch (format) {
    case LogFormat::kSqlLines:
      return "sql-lines";
    case LogFormat::kTsv:
      return "tsv";
    case LogFormat::kJsonl:
      break;
  }
  return "jsonl";
}

std::optional<LogFormat> log_format_from_name(std::string_view name) {
  for (LogFormat f : {LogFormat::kSqlLines, LogFormat::kTsv, LogFormat::kJsonl}) {
    if (log_format_name(f) == name) return f;
  }
  return std::nullopt;
}

LogReader::LogReader(std::istream& in, LogFormat format) : in_(&in), format_(format) {}

bool LogReader::next(LogRecord* record) {
  std::string line;
  while (std::getline(*in_, line)) {
    ++lines_;
    std::string why;
    record->timestamp.reset();
    record->user.reset();
    record->session.reset();
    if (decode(line, record, &why)) return true;
    ++malformed_;
    if (diagnostics_.size() < kMaxDiagnostics) {
      diagnostics_.push_back("line " + std::to_string(lines_) + ": " + why);
    }
  }
  return false;
}

bool LogReader::decode(const std::string& line, LogRecord* r, std::string* why) const {
  switch (format_) {
    case LogFormat::kSqlLines: {
      auto b = line.find_first_not_of(" \t\r\n");
      if (b == std::string::npos) {
        r->sql_text.clear();
      } else {
        r->sql_text.assign(line, b, line.find_last_not_of(" \t\r\n") - b + 1);
      }
      break;
    }
    case LogFormat::kTsv: {
      std::vector<std::string> cols;
      std::size_t start = 0;
      while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos || cols.size() == 3) {
          cols.push_back(line.substr(start));
          break;
        }
        cols.push_back(line.substr(start, tab - start));
        start = tab + 1;
      }
      if (cols.size() < 3) {
        *why = "expected timestamp<TAB>user<TAB>sql";
        return false;
      }
      if (cols.size() == 4) {
        r->session = trim(cols[0]);
        cols.erase(cols.begin());
      }
      r->timestamp = trim(cols[0]);
      r->user = trim(cols[1]);
      r->sql_text = trim(cols[2]);
      break;
    }
    case LogFormat::kJsonl: {
      if (trim(line).empty()) break;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object()) {
        *why = "invalid JSON";
        return false;
      }
      auto sql = j.find("sql");
      if (sql == j.end() || !sql->is_string()) {
        *why = "missing \"sql\" string";
        return false;
      }
      r->sql_text = trim(sql->get<std::string>());
      for (auto [key, field] : {std::pair{"timestamp", &r->timestamp},
                                std::pair{"user", &r->user}, std::pair{"session", &r->session}}) {
        auto it = j.find(key);
        if (it == j.end() || it->is_null()) continue;
        *field = it->is_string() ? it->get<std::string>() : it->dump();
      }
      break;
    }
  }
  if (r->sql_text.empty()) {
    *why = "empty sql";
    return false;
  }
  return true;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (unsigned i = 0; i < len; ++i) out << std::setw(2) << static_cast<int>(digest[i]);
  return out.str();
}

std::string anonymize_sql(std::string_view sql) {
  if (trim(sql).empty()) return std::string(sql);
  ParseOutcome p = parse(sql);
  if (!p.ok()) return "'" + sha256_hex(sql) + "'";
  LabeledAst ast = std::move(*p.ast);
  for (NodeIndex i = 0; i < ast.size(); ++i) {
    AstNode& n = ast.mutable_node(i);
    if (n.is_const && n.text != kPlaceholder) n.text = "'" + sha256_hex(n.text) + "'";
  }
  return to_sql(ast);
}

// --- Pipeline -------------------------------------------------------------------------

const ClusterSummary* AnalysisRun::find(std::uint32_t id) const {
  for (const auto& s : summaries) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

ClusterSummary* AnalysisRun::find(std::uint32_t id) {
  return const_cast<ClusterSummary*>(std::as_const(*this).find(id));
}

std::uint32_t AnalysisRun::next_cluster_id() const {
  std::uint32_t next = 0;
  for (const auto& s : summaries) next = std::max(next, s.id + 1);
  return next;
}

AnalysisRun run_pipeline(const RecordSource& source, const PipelineConfig& config,
                         const DigestRegistry* registry) {
  validate(config);
  AnalysisRun run;
  run.config = config;
  if (registry != nullptr) *run.registry = *registry;
  Stopwatch watch;

  // Phase 1: parse and collapse into skeletons.
  CorpusBuilder builder;
  // Returns the skeleton's corpus index, or -1 if the query was not kept.
  auto consume = [&](const LogRecord& record, ParseOutcome& p) -> std::ptrdiff_t {
    ++run.stats.total;
    StatementKind kind = p.ok() ? p.statement_kind : classify(record.sql_text);
    ++run.stats.kinds[std::string(statement_kind_name(kind))];
    if (!p.ok()) {
      ++run.stats.unparsable;
      return -1;
    }
    if (!config.all_statements && p.statement_kind != StatementKind::kSelect) {
      ++run.stats.out_of_scope;
      return -1;
    }
    ++run.stats.parsed;
    std::size_t before = builder.size();
    std::size_t index = builder.add(*p.ast);
    if (builder.size() > before) {
      run.examples.push_back(config.anonymize ? anonymize_sql(record.sql_text)
                                              : record.sql_text);
    }
    return static_cast<std::ptrdiff_t>(index);
  };
  LogRecord r;
  if (config.threads <= 1) {
    // Queries with equal token shapes share a parse outcome up to constants,
    // so only the first query of each shape is parsed.
    struct Shape {
      std::string kind;
      bool unparsable = false;
      std::ptrdiff_t index = -1;
    };
    std::unordered_map<std::string, Shape> shapes;
    while (source(&r)) {
      std::optional<std::string> key = shape_key(r.sql_text);
      if (key) {
        if (auto it = shapes.find(*key); it != shapes.end()) {
          const Shape& s = it->second;
          ++run.stats.total;
          ++run.stats.kinds[s.kind];
          if (s.unparsable) {
            ++run.stats.unparsable;
          } else if (s.index < 0) {
            ++run.stats.out_of_scope;
          } else {
            ++run.stats.parsed;
            builder.repeat(static_cast<std::size_t>(s.index));
          }
          continue;
        }
      }
      ParseOutcome p = parse(r.sql_text);
      Shape shape;
      shape.kind = statement_kind_name(p.ok() ? p.statement_kind : classify(r.sql_text));
      shape.unparsable = !p.ok();
      shape.index = consume(r, p);
      if (key) shapes.emplace(std::move(*key), std::move(shape));
    }
  } else {
    std::vector<LogRecord> batch;
    std::vector<ParseOutcome> parsed;
    bool more = true;
    while (more) {
      batch.clear();
      while (batch.size() < kBatch && (more = source(&r))) batch.push_back(std::move(r));
      parse_batch(batch, parsed, config.threads);
      for (std::size_t i = 0; i < batch.size(); ++i) consume(batch[i], parsed[i]);
    }
  }
  run.corpus = std::move(builder).finish();
  run.timings.preprocess_ms = watch.lap_ms();

  // Phase 2: relabeling. Sequential so ids are assigned in corpus order.
  FeatureExtractor extractor(*run.registry, config.rules);
  for (QuerySkeleton& s : run.corpus.skeletons) s.vector = extractor.extract(s.ast).vector;
  run.timings.relabel_ms = watch.lap_ms();
  run.run_id = compute_run_id(run);
  if (run.corpus.empty()) return run;

  // Phase 3: clustering.
  DistanceMatrix matrix = build_matrix(run.corpus, {config.normalize, config.threads});
  run.dendrogram = hierarchical_cluster(matrix, config.linkage);
  FlatClustering flat =
      config.cut_height
          ? cut_height(run.dendrogram, *config.cut_height)
          : cut_k(run.dendrogram, std::min(config.cut_k.value_or(PipelineConfig::kDefaultClusters),
                                           run.corpus.size()));
  run.cluster_of = std::move(flat.labels);
  run.timings.cluster_ms = watch.lap_ms();

  // Phase 4: FP-trees and summaries.
  summarize_all(run, &matrix);
  run.timings.fptree_ms = watch.lap_ms();
  return run;
}

AnalysisRun run_pipeline(std::span<const LogRecord> records, const PipelineConfig& config,
                         const DigestRegistry* registry) {
  std::size_t next = 0;
  return run_pipeline(
      [&](LogRecord* r) {
        if (next == records.size()) return false;
        *r = records[next++];
        return true;
      },
      config, registry);
}

AnalysisRun run_pipeline(LogReader& reader, const PipelineConfig& config,
                         const DigestRegistry* registry) {
  AnalysisRun run =
      run_pipeline([&](LogRecord* r) { return reader.next(r); }, config, registry);
  run.stats.malformed_lines = reader.malformed();
  return run;
}

ReElaboration re_elaborate(AnalysisRun& run, std::size_t k) {
  if (k == 0) throw PreconditionError("re-elaborate: k must be at least 1");
  std::set<std::uint32_t> unknown;
  for (const auto& s : run.summaries) {
    if (s.label == ClusterLabel::kUnknown) unknown.insert(s.id);
  }
  if (unknown.empty()) throw PreconditionError("re-elaborate: no unknown clusters");
  std::vector<std::uint32_t> members;
  for (std::uint32_t i = 0; i < run.cluster_of.size(); ++i) {
    if (unknown.count(run.cluster_of[i])) members.push_back(i);
  }
  std::vector<FeatureVector> vectors;
  vectors.reserve(members.size());
  for (std::uint32_t m : members) vectors.push_back(run.corpus.skeletons[m].vector);
  DistanceMatrix matrix = build_matrix(vectors, {run.config.normalize, run.config.threads});
  Dendrogram d = hierarchical_cluster(matrix, run.config.linkage);
  FlatClustering flat = cut_k(d, std::min(k, members.size()));

  ReElaboration out;
  out.removed.assign(unknown.begin(), unknown.end());
  const std::uint32_t base = run.next_cluster_id();
  std::vector<std::vector<std::uint32_t>> groups(flat.k);
  for (std::size_t i = 0; i < members.size(); ++i) {
    run.cluster_of[members[i]] = base + flat.labels[i];
    groups[flat.labels[i]].push_back(members[i]);
  }
  std::erase_if(run.summaries,
                [&](const ClusterSummary& s) { return unknown.count(s.id) != 0; });
  FeatureExtractor ex(*run.registry, run.config.rules);
  SummaryOptions opts{run.config.tau, run.config.normalize};
  for (std::uint32_t c = 0; c < flat.k; ++c) {
    run.summaries.push_back(summarize(base + c, groups[c], run.corpus, ex, opts));
    out.created.push_back(base + c);
  }
  return out;
}

// --- Documents ---------------------------------------------------------------------------

std::string run_to_json(const AnalysisRun& run) {
  json j;
  j["format"] = "qlog-run";
  j["version"] = kRunFormatVersion;
  j["qlog_version"] = kVersionString;
  j["run_id"] = run.run_id;
  j["config"] = config_to_json(run.config);
  j["stats"] = stats_to_json(run.stats);
  j["skeletons"] = run.corpus.size();
  j["queries"] = run.corpus.total_queries;
  j["clusters"] = run.summaries.size();
  return j.dump(1) + "\n";
}

std::string clusters_to_json(const AnalysisRun& run) {
  json list = json::array();
  for (const auto& s : run.summaries) {
    list.push_back({{"id", s.id},
                    {"label", cluster_label_name(s.label)},
                    {"skeletons", s.size()},
                    {"queries", s.query_count},
                    {"representative", s.representative},
                    {"representative_text", s.representative_text},
                    {"members", s.members}});
  }
  json j;
  j["version"] = kRunFormatVersion;
  j["clusters"] = std::move(list);
  j["assignment"] = run.cluster_of;
  return j.dump(1) + "\n";
}

std::string labels_to_json(const AnalysisRun& run) {
  json list = json::array();
  for (const auto& s : run.summaries) {
    list.push_back({{"id", s.id}, {"label", cluster_label_name(s.label)}});
  }
  return json{{"version", kRunFormatVersion}, {"labels", std::move(list)}}.dump(1) + "\n";
}

std::string timings_to_json(const AnalysisRun& run) {
  const PhaseTimings& t = run.timings;
  json j = {{"preprocess_ms", t.preprocess_ms},
            {"relabel_ms", t.relabel_ms},
            {"cluster_ms", t.cluster_ms},
            {"fptree_ms", t.fptree_ms},
            {"total_ms", t.total_ms()},
            {"queries", run.stats.total},
            {"skeletons", run.corpus.size()},
            {"clusters", run.summaries.size()}};
  return j.dump(1) + "\n";
}

std::string timings_table(const AnalysisRun& run) {
  const PhaseTimings& t = run.timings;
  std::ostringstream out;
  out << std::fixed << std::setprecision(1);
  out << "phase        ms\n";
  for (auto [name, ms] : {std::pair{"preprocess", t.preprocess_ms}, std::pair{"relabel", t.relabel_ms},
                          std::pair{"cluster", t.cluster_ms}, std::pair{"fptree", t.fptree_ms},
                          std::pair{"total", t.total_ms()}}) {
    out << std::left << std::setw(11) << name << std::right << std::setw(10) << ms << "\n";
  }
  return out.str();
}

// --- Run directory ---------------------------------------------------------------------------

void save_labels(const AnalysisRun& run, const fs::path& dir) {
  write_file(dir / "labels.json", labels_to_json(run));
  write_file(dir / "clusters.json", clusters_to_json(run));
}

void save_cluster(const AnalysisRun& run, std::uint32_t id, const fs::path& dir) {
  const ClusterSummary* s = run.find(id);
  if (s == nullptr) throw PreconditionError("unknown cluster " + std::to_string(id));
  fs::create_directories(dir / "summaries");
  write_file(summary_path(dir, id, ".json"), summary_to_json(*s, run.corpus));
  write_file(summary_path(dir, id, ".dot"), visualize(*s, run.corpus));
}

void save_clusters(const AnalysisRun& run, const fs::path& dir) {
  fs::create_directories(dir / "summaries");
  std::set<std::string> keep;
  for (const auto& s : run.summaries) {
    save_cluster(run, s.id, dir);
    keep.insert(std::to_string(s.id) + ".json");
    keep.insert(std::to_string(s.id) + ".dot");
  }
  for (const auto& entry : fs::directory_iterator(dir / "summaries")) {
    if (!keep.count(entry.path().filename().string())) fs::remove(entry.path());
  }
  save_labels(run, dir);
  run.registry->save(dir / "registry.qlogreg");
  write_file(dir / "run.json", run_to_json(run));
}

void save_run(const AnalysisRun& run, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw RunStoreError(RunStoreError::Code::kIo, "cannot create " + dir.string());
  run.registry->save(dir / "registry.qlogreg");

  std::string corpus;
  for (std::size_t i = 0; i < run.corpus.size(); ++i) {
    const QuerySkeleton& s = run.corpus.skeletons[i];
    json vec = json::array();
    for (const auto& e : s.vector.entries()) vec.push_back({e.id, e.count});
    json line = {{"index", i},
                 {"text", s.text},
                 {"count", s.count},
                 {"example", i < run.examples.size() ? run.examples[i] : std::string()},
                 {"vector", std::move(vec)}};
    corpus += line.dump() + "\n";
  }
  write_file(dir / "corpus.jsonl", corpus);

  std::vector<std::string> leaf_ids;
  for (const auto& s : run.corpus.skeletons) leaf_ids.push_back(s.text);
  if (!run.corpus.empty()) {
    write_file(dir / "dendrogram.json", dendrogram_to_json(run.dendrogram, leaf_ids));
  }
  write_file(dir / "timings.json", timings_to_json(run));
  save_clusters(run, dir);
}

AnalysisRun load_run(const fs::path& dir) {
  if (!fs::is_directory(dir) || !fs::exists(dir / "run.json")) {
    throw RunStoreError(RunStoreError::Code::kNotFound, "no run at " + dir.string());
  }
  json meta = read_json(dir / "run.json");
  if (!meta.is_object() || meta.value("format", "") != "qlog-run") {
    throw RunStoreError(RunStoreError::Code::kCorrupt, "run.json: not a qlog run");
  }
  if (meta.value("version", -1) != kRunFormatVersion) {
    throw RunStoreError(RunStoreError::Code::kVersionMismatch,
                        "run.json: unsupported run format version");
  }
  AnalysisRun run;
  try {
    run.run_id = meta.at("run_id").get<std::string>();
    run.config = config_from_json(meta.at("config"));
    run.stats = stats_from_json(meta.at("stats"));
  } catch (const json::exception& e) {
    throw RunStoreError(RunStoreError::Code::kCorrupt, std::string("run.json: ") + e.what());
  } catch (const ConfigError& e) {
    throw RunStoreError(RunStoreError::Code::kCorrupt, std::string("run.json: ") + e.what());
  }

  try {
    *run.registry = DigestRegistry::load(dir / "registry.qlogreg");
  } catch (const RegistryError& e) {
    auto code = e.code() == RegistryError::Code::kVersionMismatch
                    ? RunStoreError::Code::kVersionMismatch
                    : RunStoreError::Code::kCorrupt;
    throw RunStoreError(code, std::string("registry: ") + e.what());
  }

  std::istringstream corpus(read_file(dir / "corpus.jsonl"));
  std::string line;
  while (std::getline(corpus, line)) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw RunStoreError(RunStoreError::Code::kCorrupt, "corpus.jsonl: bad line");
    try {
      ParseOutcome p = parse(j.at("text").get<std::string>());
      if (!p.ok()) throw RunStoreError(RunStoreError::Code::kCorrupt, "corpus.jsonl: bad skeleton");
      QuerySkeleton s = skeletonize(*p.ast);
      if (s.text != j.at("text").get<std::string>()) {
        throw RunStoreError(RunStoreError::Code::kCorrupt, "corpus.jsonl: skeleton mismatch");
      }
      s.count = j.at("count").get<std::uint64_t>();
      std::vector<FeatureVector::Entry> entries;
      for (const auto& e : j.at("vector")) {
        entries.push_back({e.at(0).get<FeatureId>(), e.at(1).get<std::uint32_t>()});
      }
      s.vector = FeatureVector::from_entries(std::move(entries));
      run.examples.push_back(j.at("example").get<std::string>());
      run.corpus.total_queries += s.count;
      run.corpus.skeletons.push_back(std::move(s));
    } catch (const json::exception& e) {
      throw RunStoreError(RunStoreError::Code::kCorrupt, std::string("corpus.jsonl: ") + e.what());
    } catch (const PreconditionError& e) {
      throw RunStoreError(RunStoreError::Code::kCorrupt, std::string("corpus.jsonl: ") + e.what());
    }
  }

  if (!run.corpus.empty()) {
    std::vector<std::string> leaf_ids;
    run.dendrogram = dendrogram_from_json(read_file(dir / "dendrogram.json"), &leaf_ids);
    if (run.dendrogram.leaves != run.corpus.size()) {
      throw RunStoreError(RunStoreError::Code::kCorrupt, "dendrogram does not match corpus");
    }
  }

  json clusters = read_json(dir / "clusters.json");
  json labels = read_json(dir / "labels.json");
  try {
    run.cluster_of = clusters.at("assignment").get<std::vector<std::uint32_t>>();
    if (run.cluster_of.size() != run.corpus.size()) {
      throw RunStoreError(RunStoreError::Code::kCorrupt, "clusters.json: assignment size");
    }
    for (const auto& l : labels.at("labels")) {
      auto label = cluster_label_from_name(l.at("label").get<std::string>());
      if (!label) throw RunStoreError(RunStoreError::Code::kCorrupt, "labels.json: bad label");
      ClusterSummary s;
      s.id = l.at("id").get<std::uint32_t>();
      s.label = *label;
      run.summaries.push_back(std::move(s));
    }
    json t = read_json(dir / "timings.json");
    run.timings.preprocess_ms = t.at("preprocess_ms").get<double>();
    run.timings.relabel_ms = t.at("relabel_ms").get<double>();
    run.timings.cluster_ms = t.at("cluster_ms").get<double>();
    run.timings.fptree_ms = t.at("fptree_ms").get<double>();
  } catch (const json::exception& e) {
    throw RunStoreError(RunStoreError::Code::kCorrupt, std::string("run files: ") + e.what());
  }
  summarize_all(run, nullptr);
  return run;
}

}  // namespace qlog
