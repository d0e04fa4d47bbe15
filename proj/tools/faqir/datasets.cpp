// SPDX-License-Identifier: Apache-2.0
#include "datasets.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "faqir/error.hpp"
#include "faqir/server_config.hpp"

namespace faqir::cli {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::filesystem::path default_data_dir() {
  if (const char* dir = std::getenv("FAQIR_DATA_DIR"); dir && *dir) return dir;
  return "data";
}

DatasetLocation resolve_dataset(const std::string& name, const std::filesystem::path& data_dir) {
  static const std::map<std::string, std::string> hint3 = {
      {"curekart", "curekart"}, {"powerplay11", "powerplay11"}, {"sofmattress", "sofmattress"}};
  static const std::map<std::string, std::string> dialoglue = {
      {"banking77", "banking"}, {"clinc150", "clinc"}, {"hwu64", "hwu"}};

  DatasetLocation loc;
  loc.name = name;
  std::string base = name;
  if (ends_with(base, "-subset")) {
    base.resize(base.size() - 7);
    if (!hint3.contains(base)) fail(ErrorCode::kInvalidArgument, "dataset: unknown name '" + name + "'");
    loc.format = CorpusFormat::kHint3Csv;
    loc.paths.train = data_dir / "hint3" / "v2" / "train" / (base + "_subset_train.csv");
    loc.paths.test = data_dir / "hint3" / "v1" / "test" / (base + "_test.csv");
    return loc;
  }
  if (hint3.contains(base)) {
    loc.format = CorpusFormat::kHint3Csv;
    loc.paths.train = data_dir / "hint3" / "v1" / "train" / (base + "_train.csv");
    loc.paths.test = data_dir / "hint3" / "v1" / "test" / (base + "_test.csv");
    return loc;
  }
  std::string train_file = "train.csv";
  for (const char* shots : {"-5", "-10"}) {
    if (ends_with(base, shots)) {
      base.resize(base.size() - std::string(shots).size());
      train_file = std::string("train_") + (shots + 1) + ".csv";
      break;
    }
  }
  const auto it = dialoglue.find(base);
  if (it == dialoglue.end()) fail(ErrorCode::kInvalidArgument, "dataset: unknown name '" + name + "'");
  loc.format = CorpusFormat::kDialoglueCsv;
  loc.paths.train = data_dir / "dialoglue" / it->second / train_file;
  loc.paths.test = data_dir / "dialoglue" / it->second / "test.csv";
  return loc;
}

std::string fingerprint_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

LoadedCorpus load_dataset(const nlohmann::json& config) {
  const auto text = [&](const char* key) -> std::optional<std::string> {
    if (!config.contains(key) || config[key].is_null()) return std::nullopt;
    if (!config[key].is_string()) fail(ErrorCode::kInvalidArgument, std::string(key) + ": expected a string");
    return config[key].get<std::string>();
  };
  const auto corpus_path = text("corpus");
  const auto dataset = text("dataset");
  const auto train = text("train_csv");
  const int sources = corpus_path.has_value() + dataset.has_value() + train.has_value();
  if (sources != 1) {
    fail(ErrorCode::kInvalidArgument, "exactly one of corpus, dataset or train_csv must be given");
  }
  LoadOptions options;
  options.tenant_id = text("tenant_id").value_or("default");

  LoadedCorpus out;
  std::vector<std::filesystem::path> files;
  if (corpus_path) {
    out.corpus = corpus_from_json(read_json_file(*corpus_path), options.tenant_id);
    out.label = *corpus_path;
    files.push_back(*corpus_path);
  } else {
    CorpusPaths paths;
    CorpusFormat format = CorpusFormat::kHint3Csv;
    if (dataset) {
      const std::filesystem::path dir = text("data_dir").value_or(default_data_dir().string());
      const auto loc = resolve_dataset(*dataset, dir);
      paths = loc.paths;
      format = loc.format;
      out.label = *dataset;
    } else {
      paths.train = *train;
      if (const auto test = text("test_csv")) paths.test = *test;
      const auto f = parse_corpus_format(text("format").value_or("hint3-csv"));
      if (!f) fail(ErrorCode::kInvalidArgument, "format: expected hint3-csv or dialoglue-csv");
      format = *f;
      out.label = *train;
    }
    out.corpus = load_corpus(paths, format, options);
    files.push_back(paths.train);
    if (paths.test) files.push_back(*paths.test);
  }
  for (const auto& f : files) out.fingerprints[f.string()] = fingerprint_file(f);

  if (config.contains("k_shot") && !config["k_shot"].is_null()) {
    const auto k = config["k_shot"].get<std::size_t>();
    const auto seed = config.value("subset_seed", std::uint64_t{42});
    out.corpus = fewshot_subset(out.corpus, k, seed);
  }
  return out;
}

}  // namespace faqir::cli
