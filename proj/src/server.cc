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


#include "qlog/server.h"

#include <mutex>
#include <shared_mutex>

#include "httplib.h"
#include "json.hpp"
#include "qlog/errors.h"

namespace qlog {
namespace {

using json = nlohmann::json;

void send_json(httplib::Response& res, const std::string& body, int status = 200) {
  res.status = status;
  res.set_content(body, "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, json{{"error", message}}.dump() + "\n", status);
}

}  // namespace

struct RunServer::Impl {
  Impl(AnalysisRun r, std::filesystem::path d) : run(std::move(r)), dir(std::move(d)) {
    routes();
  }

  // Resolves {id} against the run; sends 404 and returns null when absent.
  const ClusterSummary* cluster(const httplib::Request& req, httplib::Response& res) {
    std::uint32_t id = 0;
    try {
      std::size_t used = 0;
      unsigned long v = std::stoul(req.matches[1].str(), &used);
      if (used != req.matches[1].str().size() || v > UINT32_MAX) throw std::out_of_range("id");
      id = static_cast<std::uint32_t>(v);
    } catch (const std::exception&) {
      send_error(res, 404, "unknown cluster");
      return nullptr;
    }
    const ClusterSummary* s = run.find(id);
    if (s == nullptr) send_error(res, 404, "unknown cluster " + std::to_string(id));
    return s;
  }

  void routes() {
    http.Get("/api/run", [this](const httplib::Request&, httplib::Response& res) {
      std::shared_lock lock(mu);
      json j = json::parse(run_to_json(run));
      j["timings"] = json::parse(timings_to_json(run));
      send_json(res, j.dump(1) + "\n");
    });
    http.Get("/api/clusters", [this](const httplib::Request&, httplib::Response& res) {
      std::shared_lock lock(mu);
      json list = json::array();
      for (const auto& s : run.summaries) {
        list.push_back({{"id", s.id},
                        {"label", cluster_label_name(s.label)},
                        {"skeletons", s.size()},
                        {"queries", s.query_count},
                        {"representative_text", s.representative_text}});
      }
      send_json(res, list.dump(1) + "\n");
    });
    http.Get(R"(/api/clusters/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      std::shared_lock lock(mu);
      if (const ClusterSummary* s = cluster(req, res)) send_json(res, summary_to_json(*s, run.corpus));
    });
    http.Get(R"(/api/clusters/([^/]+)/fptree)",
             [this](const httplib::Request& req, httplib::Response& res) {
               std::shared_lock lock(mu);
               if (const ClusterSummary* s = cluster(req, res)) {
                 send_json(res, fptree_to_json(s->tree, *run.registry));
               }
             });
    http.Get(R"(/api/clusters/([^/]+)/dot)",
             [this](const httplib::Request& req, httplib::Response& res) {
               std::shared_lock lock(mu);
               if (const ClusterSummary* s = cluster(req, res)) {
                 res.set_content(visualize(*s, run.corpus), "text/vnd.graphviz");
               }
             });
    http.Post(R"(/api/clusters/([^/]+)/label)",
              [this](const httplib::Request& req, httplib::Response& res) {
                std::unique_lock lock(mu);
                const ClusterSummary* found = cluster(req, res);
                if (found == nullptr) return;
                json body = json::parse(req.body, nullptr, false);
                if (body.is_discarded() || !body.is_object() || !body.contains("label") ||
                    !body["label"].is_string()) {
                  send_error(res, 400, "expected {\"label\": \"safe|unsafe|unknown\"}");
                  return;
                }
                auto label = cluster_label_from_name(body["label"].get<std::string>());
                if (!label) {
                  send_error(res, 400, "label must be one of safe, unsafe, unknown");
                  return;
                }
                ClusterSummary* s = run.find(found->id);
                s->label = *label;
                try {
                  save_labels(run, dir);
                  save_cluster(run, s->id, dir);
                } catch (const Error& e) {
                  send_error(res, 500, e.what());
                  return;
                }
                send_json(res, summary_to_json(*s, run.corpus));
              });
    http.Post("/api/re-elaborate", [this](const httplib::Request& req, httplib::Response& res) {
      std::unique_lock lock(mu);
      json body = json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.is_object() || !body.contains("k") ||
          !body["k"].is_number_integer() || body["k"].get<long long>() < 1) {
        send_error(res, 400, "expected {\"k\": positive integer}");
        return;
      }
      try {
        ReElaboration r = re_elaborate(run, body["k"].get<std::size_t>());
        save_clusters(run, dir);
        send_json(res, json{{"removed", r.removed}, {"created", r.created}}.dump() + "\n");
      } catch (const PreconditionError& e) {
        send_error(res, 400, e.what());
      } catch (const Error& e) {
        send_error(res, 500, e.what());
      }
    });
    http.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty()) {
        send_error(res, res.status, res.status == 404 ? "not found" : "error");
      }
    });
  }

  AnalysisRun run;
  std::filesystem::path dir;
  std::shared_mutex mu;
  httplib::Server http;
};

RunServer::RunServer(AnalysisRun run, std::filesystem::path dir)
    : impl_(std::make_unique<Impl>(std::move(run), std::move(dir))) {}

RunServer::~RunServer() { stop(); }

int RunServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->http.bind_to_any_port(host);
  return impl_->http.bind_to_port(host, port) ? port : -1;
}

bool RunServer::listen_after_bind() { return impl_->http.listen_after_bind(); }

void RunServer::stop() {
  if (impl_) impl_->http.stop();
}

}  // namespace qlog
