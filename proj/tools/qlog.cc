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


// qlog: summarize SQL query logs.

#include <csignal>
#include <fstream>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "json.hpp"
#include "qlog/errors.h"
#include "qlog/metrics.h"
#include "qlog/pipeline.h"
#include "qlog/server.h"
#include "qlog/synth.h"
#include "qlog/version.h"

namespace {

using json = nlohmann::json;
using qlog::LogFormat;

qlog::RunServer* g_server = nullptr;

void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qlog::Error("cannot open " + path);
  return in;
}

struct RunFlags {
  std::string format = "sql-lines";
  std::string linkage = "average";
  std::optional<std::size_t> cut_k;
  std::optional<double> cut_height;
  double tau = 0.8;
  std::optional<int> max_depth;
  std::string prune_file;
  std::string rules_file;
  std::string registry;
  bool all_statements = false;
  bool normalize = false;
  bool anonymize = false;
  unsigned threads = 1;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--format", f.format, "sql-lines, tsv or jsonl")
      ->check(CLI::IsMember({"sql-lines", "tsv", "jsonl"}));
  cmd->add_option("--linkage", f.linkage, "single, complete or average")
      ->check(CLI::IsMember({"single", "complete", "average"}));
  auto* k = cmd->add_option("--cut-k", f.cut_k, "number of clusters (default 23)");
  auto* h = cmd->add_option("--cut-height", f.cut_height, "merge height threshold");
  k->excludes(h);
  cmd->add_option("--tau", f.tau, "common-feature fraction")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--max-depth", f.max_depth, "WL iteration bound");
  cmd->add_option("--prune-file", f.prune_file, "extra prune patterns, one per line");
  cmd->add_option("--rules", f.rules_file, "rule configuration file");
  cmd->add_option("--registry", f.registry, "existing registry to continue from");
  cmd->add_flag("--all-statements", f.all_statements, "cluster non-SELECT statements too");
  cmd->add_flag("--normalize", f.normalize, "unit-length feature vectors");
  cmd->add_flag("--anonymize", f.anonymize, "hash constants of stored example queries");
  cmd->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
}

qlog::PipelineConfig to_config(const RunFlags& f) {
  qlog::PipelineConfig c;
  if (!f.rules_file.empty()) c.rules = qlog::RuleConfig::load(f.rules_file);
  if (f.max_depth) c.rules.max_depth = *f.max_depth;
  if (!f.prune_file.empty()) {
    for (auto& p : qlog::load_prune_file(f.prune_file)) c.rules.prune_patterns.push_back(p);
  }
  c.linkage = *qlog::linkage_from_name(f.linkage);
  c.cut_k = f.cut_k;
  c.cut_height = f.cut_height;
  c.tau = f.tau;
  c.all_statements = f.all_statements;
  c.normalize = f.normalize;
  c.anonymize = f.anonymize;
  c.threads = f.threads;
  return c;
}

int cmd_ingest(const std::string& log, const std::string& format) {
  std::ifstream in = open_input(log);
  qlog::LogReader reader(in, *qlog::log_format_from_name(format));
  std::map<std::string, std::uint64_t> kinds;
  qlog::LogRecord r;
  std::uint64_t records = 0;
  std::uint64_t unparsable = 0;
  while (reader.next(&r)) {
    ++records;
    qlog::ParseOutcome p = qlog::parse(r.sql_text);
    if (!p.ok()) ++unparsable;
    ++kinds[std::string(qlog::statement_kind_name(p.ok() ? p.statement_kind
                                                        : qlog::classify(r.sql_text)))];
  }
  json j = {{"lines", reader.lines()},
            {"records", records},
            {"malformed", reader.malformed()},
            {"unparsable", unparsable},
            {"kinds", kinds},
            {"diagnostics", reader.diagnostics()}};
  std::cout << j.dump(1) << "\n";
  return 0;
}

int cmd_run(const std::string& log, const std::string& out, const RunFlags& f) {
  qlog::PipelineConfig config = to_config(f);
  std::optional<qlog::DigestRegistry> seed;
  if (!f.registry.empty()) seed = qlog::DigestRegistry::load(f.registry);
  std::ifstream in = open_input(log);
  qlog::LogReader reader(in, *qlog::log_format_from_name(f.format));
  qlog::AnalysisRun run = qlog::run_pipeline(reader, config, seed ? &*seed : nullptr);
  qlog::save_run(run, out);
  const auto& s = run.stats;
  std::cout << "records " << s.total << " (select " << s.parsed << ", unparsable " << s.unparsable
            << ", other " << s.out_of_scope << ", malformed lines " << s.malformed_lines << ")\n";
  std::cout << "skeletons " << run.corpus.size() << ", clusters " << run.summaries.size() << "\n";
  std::cout << qlog::timings_table(run);
  if (run.empty()) std::cout << "no statements to cluster; wrote an empty run\n";
  std::cout << "run " << run.run_id << " written to " << out << "\n";
  return 0;
}

int cmd_summarize(const std::string& dir, std::optional<std::uint32_t> id) {
  qlog::AnalysisRun run = qlog::load_run(dir);
  for (const auto& s : run.summaries) {
    if (id && s.id != *id) continue;
    std::cout << "cluster " << s.id << " [" << qlog::cluster_label_name(s.label) << "] "
              << s.explanation;
  }
  if (id && run.find(*id) == nullptr) {
    std::cerr << "no cluster " << *id << "\n";
    return 1;
  }
  return 0;
}

int cmd_compare(const std::string& a, const std::string& b, double p) {
  auto load = [](const std::string& path) {
    std::ifstream in = open_input(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  std::string ta = load(a);
  std::string tb = load(b);
  json ja = json::parse(ta);
  json jb = json::parse(tb);
  if (ja.contains("merges") && jb.contains("merges")) {
    std::vector<std::string> ia;
    std::vector<std::string> ib;
    qlog::Dendrogram da = qlog::dendrogram_from_json(ta, &ia);
    qlog::Dendrogram db = qlog::dendrogram_from_json(tb, &ib);
    std::cout << json{{"entanglement", qlog::entanglement(da, ia, db, ib, p)}, {"p", p}}.dump()
              << "\n";
    return 0;
  }
  auto labels = [](const json& j) -> std::vector<std::uint32_t> {
    if (j.is_array()) return j.get<std::vector<std::uint32_t>>();
    return j.at("assignment").get<std::vector<std::uint32_t>>();
  };
  std::cout << json{{"adjusted_rand", qlog::adjusted_rand(labels(ja), labels(jb))}}.dump() << "\n";
  return 0;
}

int cmd_serve(const std::string& dir, const std::string& bind) {
  auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw qlog::ConfigError("--bind expects host:port");
  std::string host = bind.substr(0, colon);
  int port = std::stoi(bind.substr(colon + 1));
  qlog::RunServer server(qlog::load_run(dir), dir);
  int bound = server.bind(host, port);
  if (bound < 0) throw qlog::Error("cannot bind " + bind);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "serving " << dir << " on http://" << host << ":" << bound << std::endl;
  server.listen_after_bind();
  g_server = nullptr;
  return 0;
}

int cmd_generate(std::size_t templates, std::size_t queries, std::uint64_t seed,
                 const std::string& out, const std::string& format) {
  auto tmpl = qlog::make_templates(templates, seed);
  qlog::SyntheticLog log = qlog::generate_log(tmpl, queries, seed + 1);
  std::ofstream o(out, std::ios::binary);
  if (!o) throw qlog::Error("cannot write " + out);
  for (std::size_t i = 0; i < log.queries.size(); ++i) {
    if (format == "tsv") {
      o << i << "\tuser" << (log.template_of[i] % 7) << "\t" << log.queries[i] << "\n";
    } else if (format == "jsonl") {
      o << json{{"sql", log.queries[i]}, {"timestamp", std::to_string(i)}}.dump() << "\n";
    } else {
      o << log.queries[i] << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qlog: structural summaries of SQL query logs"};
  app.set_version_flag("--version", std::string(qlog::kVersionString));
  app.require_subcommand(1);

  std::string log;
  std::string out = "qlog-run";
  std::string format = "sql-lines";
  RunFlags flags;

  auto* ingest = app.add_subcommand("ingest", "read a log and report statement counts");
  ingest->add_option("log", log, "query log")->required();
  ingest->add_option("--format", format, "sql-lines, tsv or jsonl")
      ->check(CLI::IsMember({"sql-lines", "tsv", "jsonl"}));

  auto* run = app.add_subcommand("run", "run the full pipeline and write a run directory");
  run->add_option("log", log, "query log")->required();
  run->add_option("--out", out, "run directory");
  add_run_flags(run, flags);

  std::string dir;
  std::optional<std::uint32_t> cluster;
  auto* summarize = app.add_subcommand("summarize", "print cluster explanations of a run");
  summarize->add_option("run", dir, "run directory")->required();
  summarize->add_option("--cluster", cluster, "only this cluster");

  std::string a;
  std::string b;
  double p = 2.0;
  auto* compare = app.add_subcommand(
      "compare", "entanglement of two dendrogram exports, or ARI of two cluster assignments");
  compare->add_option("a", a)->required();
  compare->add_option("b", b)->required();
  compare->add_option("--p", p, "norm order for entanglement")->check(CLI::Range(1.0, 1e9));

  std::string bind = "127.0.0.1:8080";
  auto* serve = app.add_subcommand("serve", "serve a run directory over HTTP");
  serve->add_option("run", dir, "run directory")->required();
  serve->add_option("--bind", bind, "host:port");

  std::size_t templates = 50;
  std::size_t queries = 10000;
  std::uint64_t seed = 1;
  auto* generate = app.add_subcommand("generate", "write a synthetic query log");
  generate->add_option("--templates", templates, "distinct skeletons");
  generate->add_option("--queries", queries, "log size");
  generate->add_option("--seed", seed, "random seed");
  generate->add_option("--out", out, "output file")->required();
  generate->add_option("--format", format, "sql-lines, tsv or jsonl")
      ->check(CLI::IsMember({"sql-lines", "tsv", "jsonl"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) return cmd_ingest(log, format);
    if (*run) return cmd_run(log, out, flags);
    if (*summarize) return cmd_summarize(dir, cluster);
    if (*compare) return cmd_compare(a, b, p);
    if (*serve) return cmd_serve(dir, bind);
    if (*generate) return cmd_generate(templates, queries, seed, out, format);
  } catch (const qlog::Error& e) {
    std::cerr << "qlog: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "qlog: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
