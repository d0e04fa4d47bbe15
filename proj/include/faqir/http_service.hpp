// SPDX-License-Identifier: Apache-2.0
#pragma once

// JSON-over-HTTP front end for a TenantRegistry.
//
//   POST /tenants              {"tenant_id", "faqs": [{text, intent, answer?}], "retrieval"?}
//   PUT  /tenants/{id}/faqs    {"faqs": [...]}
//   POST /tenants/{id}/train   train config fields, optional "sampling"; 202 and
//                              runs in the background unless ?wait=true
//   GET  /tenants/{id}/train   status of the latest training job
//   POST /tenants/{id}/query   {"text": "..."}
//   GET  /tenants/{id}/config
//   GET  /metrics/memory
//   GET  /health
//
// Errors are {"error": code, "message": text} with 400 (bad input), 404
// (unknown tenant), 409 (conflict) or 500.

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "faqir/registry.hpp"
#include "faqir/training.hpp"

namespace httplib {
class Server;
}

namespace faqir {

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::size_t threads = 8;
  TrainConfig train_defaults;
  SamplingConfig sampling_defaults;
};

class HttpService {
 public:
  HttpService(std::shared_ptr<TenantRegistry> registry, ServiceOptions options);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  // Binds the socket and returns the bound port. Throws kIo on failure.
  int bind();
  // Serves until stop(); binds first if needed.
  void run();
  // bind() + run() on a background thread.
  int start();
  void stop();
  // Waits for background training jobs.
  void drain_jobs();

  int port() const { return port_; }
  TenantRegistry& registry() { return *registry_; }

 private:
  struct Job {
    std::string status = "running";
    nlohmann::json report;
    std::string error;
  };

  void install_routes();

  std::shared_ptr<TenantRegistry> registry_;
  ServiceOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread listener_;
  int port_ = -1;

  std::mutex jobs_mutex_;
  std::map<std::string, Job> jobs_;
  std::vector<std::thread> workers_;
};

}  // namespace faqir
