// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "faqir/corpus.hpp"
#include "faqir/encoder.hpp"
#include "faqir/retrieval.hpp"
#include "faqir/training.hpp"
#include "json.hpp"

namespace faqir {

// {"type": "hash", "dimension": 384, "seed": 1}
// {"type": "lookup", "path": "embeddings.bin"}
// {"type": "remote", "url": "http://host:port/embed", "dimension": 384, "timeout_ms": 5000}
struct BaseEncoderConfig {
  std::string type = "hash";
  std::size_t dimension = 384;
  std::uint64_t seed = 1;
  std::filesystem::path path;
  std::string url;
  std::chrono::milliseconds timeout{5000};
};

nlohmann::json to_json(const BaseEncoderConfig& c);
BaseEncoderConfig base_encoder_config_from_json(const nlohmann::json& j);
std::unique_ptr<BaseEncoder> make_base_encoder(const BaseEncoderConfig& c);

// A tenant loaded at startup: FAQs from a JSON corpus file or a CSV in one of
// the known formats, and optionally a head checkpoint.
struct TenantSeed {
  std::string tenant_id;
  std::filesystem::path faqs;
  std::optional<CorpusFormat> format;  // absent: JSON corpus
  std::optional<std::filesystem::path> head;
  std::optional<RetrievalConfig> retrieval;
};

struct ListenAddress {
  std::string host = "127.0.0.1";
  int port = 8080;
};

// "host:port"; throws kInvalidArgument.
ListenAddress parse_listen(const std::string& text);

struct ServerConfig {
  std::string listen = "127.0.0.1:8080";
  std::size_t threads = 8;
  BaseEncoderConfig base_encoder;
  RetrievalConfig retrieval;
  TrainConfig train;
  SamplingConfig sampling;
  std::vector<TenantSeed> tenants;
};

nlohmann::json to_json(const ServerConfig& c);
// Unknown keys and wrong types are errors naming the field path, e.g.
// "retrieval.k".
ServerConfig server_config_from_json(const nlohmann::json& j);
ServerConfig load_server_config(const std::filesystem::path& path);
// FAQIR_LISTEN replaces the listen address when set.
void apply_env_overrides(ServerConfig& config);

// Reads a JSON document from disk; kIo / kParse on failure.
nlohmann::json read_json_file(const std::filesystem::path& path);

nlohmann::json to_json(const SamplingConfig& c);
SamplingConfig sampling_config_from_json(const nlohmann::json& j, SamplingConfig defaults = {});

}  // namespace faqir
