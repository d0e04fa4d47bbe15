// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include "faqir/corpus.hpp"
#include "faqir/encoder.hpp"
#include "faqir/error.hpp"
#include "faqir/rng.hpp"

namespace faqir::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    Rng rng(static_cast<std::uint64_t>(std::rand()) ^ reinterpret_cast<std::uintptr_t>(this));
    path_ = std::filesystem::temp_directory_path() /
            ("faqir-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" +
             std::to_string(rng.next() % 100000));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Small hand-written tenant: three intents with distinct vocabulary.
inline FaqCorpus toy_corpus(const std::string& tenant = "toy") {
  return make_corpus(tenant, {
                                 {"how do I reset my password", "account"},
                                 {"forgot my password", "account"},
                                 {"change account password", "account"},
                                 {"where is my order", "shipping"},
                                 {"track my package delivery", "shipping"},
                                 {"when will my parcel arrive", "shipping"},
                                 {"i want a refund", "refund"},
                                 {"return an item for money back", "refund"},
                                 {"refund status of my return", "refund"},
                             });
}

// Base encoder answering from a fixed text -> vector table.
class FixedEncoder final : public BaseEncoder {
 public:
  FixedEncoder(std::size_t dim, std::map<std::string, std::vector<float>> table)
      : dim_(dim), table_(std::move(table)) {}
  std::size_t dimension() const override { return dim_; }
  EmbeddingVector embed(std::string_view text) const override {
    auto it = table_.find(std::string(text));
    if (it == table_.end()) fail(ErrorCode::kNotFound, "no vector for '" + std::string(text) + "'");
    return {it->second, false};
  }
  std::string name() const override { return "fixed"; }

 private:
  std::size_t dim_;
  std::map<std::string, std::vector<float>> table_;
};

}  // namespace faqir::testing
