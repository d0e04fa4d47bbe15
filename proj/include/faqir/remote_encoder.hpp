// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <string>

#include "faqir/encoder.hpp"

namespace faqir {

struct RemoteEncoderOptions {
  // e.g. http://127.0.0.1:9000/embed
  std::string endpoint_url;
  std::size_t dimension = 0;
  // Total budget for one embed call including retries and backoff.
  std::chrono::milliseconds timeout{5000};
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{50};
};

// Client for an external embedding service.
//   request : POST {"texts": [string, ...]}
//   response: {"dim": int, "vectors": [[float, ...], ...]}
// Connection failures and 5xx responses are retried with exponential backoff
// inside the timeout budget; 4xx and dimension mismatches fail immediately.
class RemoteEncoder final : public BaseEncoder {
 public:
  explicit RemoteEncoder(RemoteEncoderOptions options);

  std::size_t dimension() const override { return options_.dimension; }
  EmbeddingVector embed(std::string_view text) const override;
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override;
  std::string name() const override { return "remote:" + options_.endpoint_url; }

 private:
  RemoteEncoderOptions options_;
  std::string scheme_host_port_;
  std::string path_;
};

std::unique_ptr<RemoteEncoder> remote_encoder(const std::string& endpoint_url, std::size_t dimension,
                                              std::chrono::milliseconds timeout);

}  // namespace faqir
