// SPDX-License-Identifier: Apache-2.0
#include "faqir/http_service.hpp"

#include "faqir/error.hpp"
#include "faqir/server_config.hpp"
#include "faqir/simd/kernels.hpp"
#include "httplib.h"

namespace faqir {

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParse:
    case ErrorCode::kDimensionMismatch: return 400;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kConflict:
    case ErrorCode::kStaleIndex: return 409;
    default: return 500;
  }
}

void reply(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  reply(res, status, {{"error", code}, {"message", message}});
}

nlohmann::json parse_body(const httplib::Request& req) {
  try {
    auto j = nlohmann::json::parse(req.body);
    if (!j.is_object()) fail(ErrorCode::kInvalidArgument, "request body must be a JSON object");
    return j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, std::string("malformed JSON body: ") + e.what());
  }
}

// Wraps a handler so library errors become JSON error responses.
template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      reply_error(res, status_for(e.code()), to_string(e.code()), e.what());
    } catch (const std::exception& e) {
      reply_error(res, 500, "internal", e.what());
    }
  };
}

nlohmann::json tenant_summary(const std::string& id, const TenantState& s) {
  return {{"tenant_id", id},
          {"questions", s.corpus->size()},
          {"intents", s.index.intents.size()},
          {"head_version", s.head.version},
          {"retrieval", to_json(s.config)},
          {"d_in", s.head.d_in},
          {"d_out", s.head.d_out}};
}

}  // namespace

HttpService::HttpService(std::shared_ptr<TenantRegistry> registry, ServiceOptions options)
    : registry_(std::move(registry)), options_(std::move(options)),
      server_(std::make_unique<httplib::Server>()) {
  if (!registry_) fail(ErrorCode::kInvalidArgument, "service needs a registry");
  const std::size_t threads = std::max<std::size_t>(1, options_.threads);
  server_->new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  server_->set_tcp_nodelay(true);
  install_routes();
}

HttpService::~HttpService() {
  stop();
  drain_jobs();
}

void HttpService::install_routes() {
  auto& s = *server_;

  s.Get("/health", guarded([this](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, {{"status", "ok"},
                     {"tenants", registry_->size()},
                     {"base_encoder", registry_->base().name()},
                     {"simd", std::string(simd::to_string(simd::active().isa))}});
  }));

  s.Post("/tenants", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_body(req);
    if (!body.contains("tenant_id") || !body["tenant_id"].is_string()) {
      fail(ErrorCode::kInvalidArgument, "tenant_id: required string");
    }
    const auto id = body["tenant_id"].get<std::string>();
    auto corpus = corpus_from_json(body, id);
    std::optional<RetrievalConfig> config;
    if (body.contains("retrieval")) {
      config = retrieval_config_from_json(body["retrieval"], registry_->default_config());
    }
    registry_->register_tenant(id, std::move(corpus), config);
    reply(res, 201, tenant_summary(id, *registry_->snapshot(id)));
  }));

  s.Put(R"(/tenants/([^/]+)/faqs)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    registry_->snapshot(id);
    registry_->replace_faqs(id, corpus_from_json(parse_body(req), id));
    reply(res, 200, tenant_summary(id, *registry_->snapshot(id)));
  }));

  s.Post(R"(/tenants/([^/]+)/query)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const auto body = parse_body(req);
    if (!body.contains("text") || !body["text"].is_string()) {
      fail(ErrorCode::kInvalidArgument, "text: required string");
    }
    reply(res, 200, to_json(registry_->handle_query(id, body["text"].get<std::string>())));
  }));

  s.Get(R"(/tenants/([^/]+)/config)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    reply(res, 200, tenant_summary(id, *registry_->snapshot(id)));
  }));

  s.Post(R"(/tenants/([^/]+)/train)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    registry_->snapshot(id);
    auto body = req.body.empty() ? nlohmann::json::object() : parse_body(req);
    SamplingConfig sampling = options_.sampling_defaults;
    if (body.contains("sampling")) {
      sampling = sampling_config_from_json(body["sampling"], sampling);
      body.erase("sampling");
    }
    const TrainConfig config = train_config_from_json(body, options_.train_defaults);
    if (req.get_param_value("wait") == "true") {
      const auto report = registry_->train_tenant(id, config, sampling);
      reply(res, 200, {{"tenant_id", id}, {"status", "succeeded"}, {"report", to_json(report)}});
      return;
    }
    std::lock_guard lock(jobs_mutex_);
    jobs_[id] = Job{};
    workers_.emplace_back([this, id, config, sampling] {
      Job done;
      try {
        done.report = to_json(registry_->train_tenant(id, config, sampling));
        done.status = "succeeded";
      } catch (const std::exception& e) {
        done.status = "failed";
        done.error = e.what();
      }
      std::lock_guard done_lock(jobs_mutex_);
      jobs_[id] = std::move(done);
    });
    reply(res, 202, {{"tenant_id", id}, {"status", "running"}});
  }));

  s.Get(R"(/tenants/([^/]+)/train)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    std::lock_guard lock(jobs_mutex_);
    const auto it = jobs_.find(id);
    if (it == jobs_.end()) fail(ErrorCode::kNotFound, "no training job for tenant '" + id + "'");
    nlohmann::json body{{"tenant_id", id}, {"status", it->second.status}};
    if (!it->second.report.is_null()) body["report"] = it->second.report;
    if (!it->second.error.empty()) body["error"] = it->second.error;
    reply(res, 200, body);
  }));

  s.Get("/metrics/memory", guarded([this](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, to_json(registry_->memory_report()));
  }));

  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      reply_error(res, res.status, res.status == 404 ? "not_found" : "error",
                  "no route for this method and path");
    }
  });
}

int HttpService::bind() {
  if (port_ >= 0) return port_;
  if (options_.port == 0) {
    port_ = server_->bind_to_any_port(options_.host);
  } else if (server_->bind_to_port(options_.host, options_.port)) {
    port_ = options_.port;
  }
  if (port_ < 0) {
    fail(ErrorCode::kIo, "cannot bind " + options_.host + ":" + std::to_string(options_.port));
  }
  return port_;
}

void HttpService::run() {
  bind();
  server_->listen_after_bind();
}

int HttpService::start() {
  const int port = bind();
  listener_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port;
}

void HttpService::stop() {
  if (server_) server_->stop();
  if (listener_.joinable()) listener_.join();
}

void HttpService::drain_jobs() {
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(jobs_mutex_);
    workers.swap(workers_);
  }
  for (auto& w : workers) {
    if (w.joinable()) w.join();
  }
}

}  // namespace faqir
