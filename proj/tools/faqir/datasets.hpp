// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "faqir/corpus.hpp"
#include "json.hpp"

namespace faqir::cli {

// Known dataset names resolved under a data directory:
//   curekart, powerplay11, sofmattress      hint3/v1/{train,test}/<name>_{train,test}.csv
//   <name>-subset                           hint3/v2/train/<name>_subset_train.csv,
//                                           test as for the full set
//   banking77, clinc150, hwu64              dialoglue/{banking,clinc,hwu}/{train,test}.csv
//   <name>-5, <name>-10                     train_5.csv / train_10.csv of the above
struct DatasetLocation {
  std::string name;
  CorpusPaths paths;
  CorpusFormat format;
};

DatasetLocation resolve_dataset(const std::string& name, const std::filesystem::path& data_dir);

// FAQIR_DATA_DIR, or "data".
std::filesystem::path default_data_dir();

// FNV-1a 64 of the file bytes, as 16 lowercase hex digits.
std::string fingerprint_file(const std::filesystem::path& path);

struct LoadedCorpus {
  FaqCorpus corpus;
  std::string label;
  std::map<std::string, std::string> fingerprints;  // path -> hash
};

// Reads a dataset reference from a config object. Exactly one of
//   "corpus": JSON corpus file written by `ingest`
//   "dataset": catalog name (with optional "data_dir")
//   "train_csv" (+ optional "test_csv"), with "format"
// plus optional "tenant_id", "k_shot" and "subset_seed".
LoadedCorpus load_dataset(const nlohmann::json& config);

}  // namespace faqir::cli
