// SPDX-License-Identifier: Apache-2.0
#include "faqir/server_config.hpp"

#include <cstdlib>
#include <fstream>

#include "faqir/embedding_file.hpp"
#include "faqir/error.hpp"
#include "faqir/hash_featurizer.hpp"
#include "faqir/remote_encoder.hpp"

namespace faqir {

namespace {

template <typename T>
T field(const nlohmann::json& value, const std::string& path) {
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorCode::kInvalidArgument, path + ": wrong type");
  }
}

void require_object(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) fail(ErrorCode::kInvalidArgument, path + ": expected an object");
}

}  // namespace

nlohmann::json to_json(const BaseEncoderConfig& c) {
  nlohmann::json j{{"type", c.type}};
  if (c.type == "hash") {
    j["dimension"] = c.dimension;
    j["seed"] = c.seed;
  } else if (c.type == "lookup") {
    j["path"] = c.path.string();
  } else {
    j["url"] = c.url;
    j["dimension"] = c.dimension;
    j["timeout_ms"] = c.timeout.count();
  }
  return j;
}

BaseEncoderConfig base_encoder_config_from_json(const nlohmann::json& j) {
  require_object(j, "base_encoder");
  BaseEncoderConfig c;
  for (const auto& [key, value] : j.items()) {
    const std::string path = "base_encoder." + key;
    if (key == "type") c.type = field<std::string>(value, path);
    else if (key == "dimension") c.dimension = field<std::size_t>(value, path);
    else if (key == "seed") c.seed = field<std::uint64_t>(value, path);
    else if (key == "path") c.path = field<std::string>(value, path);
    else if (key == "url") c.url = field<std::string>(value, path);
    else if (key == "timeout_ms") c.timeout = std::chrono::milliseconds(field<std::int64_t>(value, path));
    else fail(ErrorCode::kInvalidArgument, path + ": unknown field");
  }
  if (c.type == "hash") {
    if (c.dimension == 0) fail(ErrorCode::kInvalidArgument, "base_encoder.dimension must be > 0");
  } else if (c.type == "lookup") {
    if (c.path.empty()) fail(ErrorCode::kInvalidArgument, "base_encoder.path is required for lookup");
  } else if (c.type == "remote") {
    if (c.url.empty()) fail(ErrorCode::kInvalidArgument, "base_encoder.url is required for remote");
    if (c.dimension == 0) fail(ErrorCode::kInvalidArgument, "base_encoder.dimension must be > 0");
    if (c.timeout.count() <= 0) fail(ErrorCode::kInvalidArgument, "base_encoder.timeout_ms must be > 0");
  } else {
    fail(ErrorCode::kInvalidArgument, "base_encoder.type: expected hash, lookup or remote");
  }
  return c;
}

std::unique_ptr<BaseEncoder> make_base_encoder(const BaseEncoderConfig& c) {
  if (c.type == "hash") return hash_featurizer(c.dimension, c.seed);
  if (c.type == "lookup") return load_embedding_file(c.path);
  if (c.type == "remote") return remote_encoder(c.url, c.dimension, c.timeout);
  fail(ErrorCode::kInvalidArgument, "unknown base encoder type '" + c.type + "'");
}

ListenAddress parse_listen(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    fail(ErrorCode::kInvalidArgument, "listen address must be host:port, got '" + text + "'");
  }
  ListenAddress a;
  a.host = text.substr(0, colon);
  try {
    std::size_t used = 0;
    a.port = std::stoi(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    fail(ErrorCode::kInvalidArgument, "listen port is not a number in '" + text + "'");
  }
  if (a.port < 0 || a.port > 65535) fail(ErrorCode::kInvalidArgument, "listen port out of range");
  return a;
}

nlohmann::json to_json(const SamplingConfig& c) {
  nlohmann::json j{{"cap", c.cap}, {"seed", c.seed}, {"weight_floor", c.weight_floor}};
  j["balanced_size"] = c.balanced_size ? nlohmann::json(*c.balanced_size) : nlohmann::json(nullptr);
  return j;
}

SamplingConfig sampling_config_from_json(const nlohmann::json& j, SamplingConfig c) {
  require_object(j, "sampling");
  for (const auto& [key, value] : j.items()) {
    const std::string path = "sampling." + key;
    if (key == "cap") c.cap = field<std::size_t>(value, path);
    else if (key == "seed") c.seed = field<std::uint64_t>(value, path);
    else if (key == "weight_floor") c.weight_floor = field<double>(value, path);
    else if (key == "balanced_size") {
      if (value.is_null()) c.balanced_size.reset();
      else c.balanced_size = field<std::size_t>(value, path);
    } else {
      fail(ErrorCode::kInvalidArgument, path + ": unknown field");
    }
  }
  c.validate();
  return c;
}

nlohmann::json to_json(const ServerConfig& c) {
  auto tenants = nlohmann::json::array();
  for (const auto& t : c.tenants) {
    nlohmann::json j{{"id", t.tenant_id}, {"faqs", t.faqs.string()}};
    if (t.format) j["format"] = std::string(to_string(*t.format));
    if (t.head) j["head"] = t.head->string();
    if (t.retrieval) j["retrieval"] = to_json(*t.retrieval);
    tenants.push_back(std::move(j));
  }
  return {{"listen", c.listen},
          {"threads", c.threads},
          {"base_encoder", to_json(c.base_encoder)},
          {"retrieval", to_json(c.retrieval)},
          {"train", to_json(c.train)},
          {"sampling", to_json(c.sampling)},
          {"tenants", tenants}};
}

ServerConfig server_config_from_json(const nlohmann::json& j) {
  require_object(j, "config");
  ServerConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "listen") {
      c.listen = field<std::string>(value, "listen");
      parse_listen(c.listen);
    } else if (key == "threads") {
      c.threads = field<std::size_t>(value, "threads");
      if (c.threads == 0) fail(ErrorCode::kInvalidArgument, "threads must be > 0");
    } else if (key == "base_encoder") {
      c.base_encoder = base_encoder_config_from_json(value);
    } else if (key == "retrieval") {
      c.retrieval = retrieval_config_from_json(value);
    } else if (key == "train") {
      c.train = train_config_from_json(value);
    } else if (key == "sampling") {
      c.sampling = sampling_config_from_json(value);
    } else if (key == "tenants") {
      if (!value.is_array()) fail(ErrorCode::kInvalidArgument, "tenants: expected an array");
      for (std::size_t i = 0; i < value.size(); ++i) {
        const std::string base = "tenants[" + std::to_string(i) + "]";
        const auto& t = value[i];
        require_object(t, base);
        TenantSeed seed;
        for (const auto& [tk, tv] : t.items()) {
          const std::string path = base + "." + tk;
          if (tk == "id") seed.tenant_id = field<std::string>(tv, path);
          else if (tk == "faqs") seed.faqs = field<std::string>(tv, path);
          else if (tk == "head") seed.head = field<std::string>(tv, path);
          else if (tk == "format") {
            seed.format = parse_corpus_format(field<std::string>(tv, path));
            if (!seed.format) fail(ErrorCode::kInvalidArgument, path + ": unknown corpus format");
          } else if (tk == "retrieval") {
            seed.retrieval = retrieval_config_from_json(tv, c.retrieval);
          } else {
            fail(ErrorCode::kInvalidArgument, path + ": unknown field");
          }
        }
        if (seed.tenant_id.empty()) fail(ErrorCode::kInvalidArgument, base + ".id is required");
        if (seed.faqs.empty()) fail(ErrorCode::kInvalidArgument, base + ".faqs is required");
        c.tenants.push_back(std::move(seed));
      }
    } else if (key == "bench") {
      // Read by the load generator; the server ignores it.
    } else {
      fail(ErrorCode::kInvalidArgument, key + ": unknown field");
    }
  }
  return c;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

ServerConfig load_server_config(const std::filesystem::path& path) {
  try {
    return server_config_from_json(read_json_file(path));
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.what());
  }
}

void apply_env_overrides(ServerConfig& config) {
  if (const char* listen = std::getenv("FAQIR_LISTEN"); listen && *listen) {
    parse_listen(listen);
    config.listen = listen;
  }
}

}  // namespace faqir
