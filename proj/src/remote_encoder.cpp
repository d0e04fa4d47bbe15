// SPDX-License-Identifier: Apache-2.0
#include "faqir/remote_encoder.hpp"

#include <thread>

#include "faqir/error.hpp"
#include "httplib.h"
#include "json.hpp"

namespace faqir {

RemoteEncoder::RemoteEncoder(RemoteEncoderOptions options) : options_(std::move(options)) {
  if (options_.dimension == 0) fail(ErrorCode::kInvalidArgument, "remote encoder needs a dimension");
  const auto& url = options_.endpoint_url;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    fail(ErrorCode::kInvalidArgument, "endpoint url must include a scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
}

EmbeddingVector RemoteEncoder::embed(std::string_view text) const {
  const std::string texts[1] = {std::string(text)};
  return std::move(embed_batch(texts).front());
}

std::vector<EmbeddingVector> RemoteEncoder::embed_batch(std::span<const std::string> texts) const {
  using Clock = std::chrono::steady_clock;
  const auto deadline = Clock::now() + options_.timeout;
  const std::string body = nlohmann::json{{"texts", texts}}.dump();

  auto backoff = options_.initial_backoff;
  std::string last_error = "no attempt made";
  bool out_of_time = false;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    const auto remaining =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (remaining.count() <= 0) break;

    // A client per call: httplib clients are not meant to be shared across
    // threads, and connection setup is cheap next to a model forward pass.
    httplib::Client client(scheme_host_port_);
    client.set_tcp_nodelay(true);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(remaining);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(remaining - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    auto res = client.Post(path_, body, "application/json");
    if (res && res->status >= 200 && res->status < 300) {
      nlohmann::json reply;
      try {
        reply = nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::kParse, "remote encoder returned invalid JSON: " + std::string(e.what()));
      }
      const auto dim = reply.value("dim", std::size_t{0});
      if (dim != options_.dimension) {
        fail(ErrorCode::kDimensionMismatch, "remote encoder returned dim " + std::to_string(dim) +
                                                ", expected " + std::to_string(options_.dimension));
      }
      if (!reply.contains("vectors") || !reply["vectors"].is_array() ||
          reply["vectors"].size() != texts.size()) {
        fail(ErrorCode::kParse, "remote encoder returned the wrong number of vectors");
      }
      std::vector<EmbeddingVector> out;
      out.reserve(texts.size());
      for (const auto& v : reply["vectors"]) {
        EmbeddingVector e;
        e.values = v.get<std::vector<float>>();
        if (e.values.size() != options_.dimension) {
          fail(ErrorCode::kDimensionMismatch, "remote vector has dimension " +
                                                  std::to_string(e.values.size()));
        }
        if (!all_finite(e.values)) fail(ErrorCode::kNumerical, "remote vector is not finite");
        out.push_back(std::move(e));
      }
      return out;
    }
    if (res && res->status >= 400 && res->status < 500) {
      fail(ErrorCode::kNetwork, "remote encoder rejected request with status " +
                                    std::to_string(res->status));
    }
    last_error = res ? "status " + std::to_string(res->status) : httplib::to_string(res.error());

    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (left <= backoff) {
      out_of_time = true;
      break;
    }
    if (attempt == options_.max_retries) break;
    std::this_thread::sleep_for(backoff);
    backoff *= 2;
  }
  const auto code = out_of_time || Clock::now() >= deadline ? ErrorCode::kTimeout : ErrorCode::kNetwork;
  fail(code, "remote encoder at " + options_.endpoint_url + " failed: " + last_error);
}

std::unique_ptr<RemoteEncoder> remote_encoder(const std::string& endpoint_url, std::size_t dimension,
                                              std::chrono::milliseconds timeout) {
  RemoteEncoderOptions options;
  options.endpoint_url = endpoint_url;
  options.dimension = dimension;
  options.timeout = timeout;
  return std::make_unique<RemoteEncoder>(std::move(options));
}

}  // namespace faqir
