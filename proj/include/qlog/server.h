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


// JSON API over a saved run.
//
//   GET  /api/run
//   GET  /api/clusters
//   GET  /api/clusters/{id}
//   GET  /api/clusters/{id}/fptree
//   GET  /api/clusters/{id}/dot
//   POST /api/clusters/{id}/label   {"label": "safe" | "unsafe" | "unknown"}
//   POST /api/re-elaborate          {"k": int}
//
// Reads run concurrently; mutations are serialized and persisted to the run
// directory before the response is sent.

#ifndef QLOG_SERVER_H_
#define QLOG_SERVER_H_

#include <filesystem>
#include <memory>
#include <string>

#include "qlog/pipeline.h"

namespace qlog {

class RunServer {
 public:
  RunServer(AnalysisRun run, std::filesystem::path dir);
  ~RunServer();

  RunServer(const RunServer&) = delete;
  RunServer& operator=(const RunServer&) = delete;

  // Binds `host:port`; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  bool listen_after_bind();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace qlog

#endif  // QLOG_SERVER_H_
