// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <vector>

#include "CLI11.hpp"
#include "datasets.hpp"
#include "faqir/bench.hpp"
#include "faqir/error.hpp"
#include "faqir/http_service.hpp"
#include "faqir/lexical.hpp"
#include "faqir/metrics.hpp"
#include "faqir/registry.hpp"
#include "faqir/sampling.hpp"
#include "faqir/server_config.hpp"
#include "faqir/training.hpp"

namespace faqir::cli {

namespace {

using nlohmann::json;

const json& section(const json& config, const char* key) {
  static const json empty = json::object();
  return config.contains(key) ? config[key] : empty;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
}

struct Run {
  RunManifest manifest;
  std::filesystem::path dir;

  std::filesystem::path output(const std::string& name) {
    manifest.outputs.push_back((dir / name).string());
    return dir / name;
  }
};

Run begin_run(const std::string& subcommand, const json& config, std::uint64_t seed) {
  Run run;
  run.manifest.subcommand = subcommand;
  run.manifest.config = config;
  run.manifest.seed = seed;
  run.dir = create_run_dir(config.value("out_dir", std::string("runs")), subcommand, config);
  return run;
}

std::unique_ptr<BaseEncoder> base_from(json& config) {
  const auto c = base_encoder_config_from_json(section(config, "base_encoder"));
  config["base_encoder"] = to_json(c);
  return make_base_encoder(c);
}

std::optional<TenantHead> head_from(const json& config, const char* key) {
  if (!config.contains(key) || config[key].is_null()) return std::nullopt;
  return load_head(config[key].get<std::string>());
}

RunManifest cmd_ingest(json config, std::ostream& log) {
  auto data = load_dataset(config);
  const auto s = stats(data.corpus);
  Run run = begin_run("ingest", config, config.value("subset_seed", std::uint64_t{42}));
  run.manifest.dataset_fingerprints = data.fingerprints;
  write_text(run.output("corpus.json"), to_json(data.corpus).dump(2) + "\n");
  write_text(run.output("stats.json"), to_json(s).dump(2) + "\n");
  log << data.label << ": " << s.total_samples << " questions, " << s.num_intents << " intents\n";
  return run.manifest;
}

RunManifest cmd_pairs(json config, std::ostream& log) {
  auto data = load_dataset(config);
  auto base = base_from(config);
  const auto sampling = sampling_config_from_json(section(config, "sampling"));
  config["sampling"] = to_json(sampling);
  const auto head = head_from(config, "head");
  const std::size_t triplet_count = config.value("triplets", std::size_t{0});

  auto pairs = generate_all_pairs(data.corpus);
  const auto embeddings = embed_questions(data.corpus, *base, head ? &*head : nullptr);
  compute_pair_weights(pairs, embeddings, sampling.weight_floor);
  Rng rng(sampling.seed);
  const auto sampled = hard_sample(pairs, sampling, rng);

  Run run = begin_run("pairs", config, sampling.seed);
  run.manifest.dataset_fingerprints = data.fingerprints;
  {
    std::ofstream out(run.output("pairs.tsv"), std::ios::binary);
    write_pairs(out, sampled);
  }
  if (triplet_count > 0) {
    const auto triplets = build_triplets(data.corpus, sampled, triplet_count, rng);
    std::vector<TaggedTriplet> tagged;
    for (const auto& t : triplets) tagged.push_back({0, t});
    std::ofstream out(run.output("triplets.tsv"), std::ios::binary);
    write_triplets(out, tagged);
  }
  log << pairs.size() << " pairs generated, " << sampled.size() << " sampled\n";
  return run.manifest;
}

RunManifest cmd_train(json config, std::ostream& log) {
  auto data = load_dataset(config);
  auto base = base_from(config);
  const auto train = train_config_from_json(section(config, "train"));
  config["train"] = to_json(train);
  const auto sampling = sampling_config_from_json(section(config, "sampling"));
  config["sampling"] = to_json(sampling);
  const auto init = head_from(config, "init_head");

  Run run = begin_run("train", config, train.seed);
  run.manifest.dataset_fingerprints = data.fingerprints;

  TrainResult result;
  if (config.contains("pretrain")) {
    if (init) fail(ErrorCode::kInvalidArgument, "init_head and pretrain are mutually exclusive");
    const json& pre = config["pretrain"];
    std::vector<FaqCorpus> corpora;
    if (!pre.contains("datasets") || !pre["datasets"].is_array()) {
      fail(ErrorCode::kInvalidArgument, "pretrain.datasets: expected an array of dataset references");
    }
    for (const auto& ref : pre["datasets"]) {
      auto d = load_dataset(ref);
      for (auto& [k, v] : d.fingerprints) run.manifest.dataset_fingerprints[k] = v;
      corpora.push_back(std::move(d.corpus));
    }
    PretrainOptions options;
    options.sampling = sampling;
    options.triplets_per_dataset = pre.value("triplets_per_dataset", options.triplets_per_dataset);
    TrainConfig pt_defaults = train;
    pt_defaults.objective = Objective::kTriplet;
    const auto pt = train_config_from_json(pre.value("train", json::object()), pt_defaults);
    auto out = pretrain_then_finetune(corpora, data.corpus, *base, pt, train, options);
    save_head(run.output("shared_head.bin"), out.shared_head);
    write_text(run.output("pretrain_report.json"), to_json(out.pretrain_report).dump(2) + "\n");
    result = {std::move(out.tenant_head), std::move(out.finetune_report)};
  } else {
    const TenantHead start =
        init ? *init : head_init(base->dimension(), base->dimension(), train.seed, 0.01f, data.corpus.tenant_id());
    result = fine_tune(data.corpus, *base, start, train, sampling);
  }
  save_head(run.output("head.bin"), result.head);
  write_text(run.output("train_report.json"), to_json(result.report).dump(2) + "\n");
  log << "trained " << train.iterations << " iterations, loss " << result.report.initial_loss << " -> "
      << result.report.final_loss << "\n";
  return run.manifest;
}

std::vector<RankedPrediction> predict(const FaqCorpus& corpus, const std::string& method,
                                      const BaseEncoder* base, const TenantHead* head) {
  std::vector<std::pair<std::string, std::optional<std::string>>> queries;
  for (std::size_t i = 0; i < corpus.test().size(); ++i) {
    queries.emplace_back(corpus.test()[i].text, corpus.test()[i].intent);
  }
  for (const auto& q : corpus.oos_queries()) queries.emplace_back(q, std::nullopt);
  if (queries.empty()) fail(ErrorCode::kInvalidArgument, "dataset has no test queries");

  std::vector<RankedPrediction> preds;
  preds.reserve(queries.size());
  auto push = [&](std::size_t i, std::vector<IntentScore> ranked) {
    preds.push_back({(queries[i].second ? "test:" : "oos:") + std::to_string(i), std::move(ranked),
                     queries[i].second});
  };
  if (method == "bm25") {
    const Bm25Ranker ranker(corpus);
    for (std::size_t i = 0; i < queries.size(); ++i) push(i, ranker.rank(queries[i].first, 0).intents);
  } else if (method == "tfidf") {
    const TfidfRanker ranker(corpus);
    for (std::size_t i = 0; i < queries.size(); ++i) push(i, ranker.rank(queries[i].first, 0).intents);
  } else {
    const TenantIndex index = build_index(corpus, *base, *head);
    RetrievalConfig all;
    all.k = std::max<std::size_t>(1, index.intents.size());
    all.threshold = -1.0;
    for (std::size_t i = 0; i < queries.size(); ++i) {
      push(i, query_topk(index, *base, *head, queries[i].first, all).ranked_intents);
    }
  }
  return preds;
}

RunManifest cmd_eval(json config, std::ostream& log) {
  auto data = load_dataset(config);
  const std::string method = config.value("method", std::string("neural"));
  if (method != "neural" && method != "bm25" && method != "tfidf") {
    fail(ErrorCode::kInvalidArgument, "method: expected neural, bm25 or tfidf");
  }
  config["method"] = method;
  const auto k = config.value("k", std::size_t{3});
  const auto threshold = config.value("threshold", 0.1);
  if (k == 0) fail(ErrorCode::kInvalidArgument, "k must be >= 1");
  config["k"] = k;
  config["threshold"] = threshold;
  json sweep = section(config, "sweep");
  const double lo = sweep.value("lo", 0.0), hi = sweep.value("hi", 1.0);
  const auto count = sweep.value("count", std::size_t{21});
  config["sweep"] = {{"lo", lo}, {"hi", hi}, {"count", count}};

  std::unique_ptr<BaseEncoder> base;
  std::optional<TenantHead> head;
  if (method == "neural") {
    base = base_from(config);
    head = head_from(config, "head");
    if (!head) head = head_init(base->dimension(), base->dimension(), 0, 0.01f, data.corpus.tenant_id());
  }
  const auto preds = predict(data.corpus, method, base.get(), head ? &*head : nullptr);
  const auto thresholds = threshold_grid(lo, hi, count);
  EvalReport report = evaluate(preds, k, threshold, thresholds);
  report.method = method;
  report.dataset = data.label;

  Run run = begin_run("eval", config, 0);
  run.manifest.dataset_fingerprints = data.fingerprints;
  emit_report(report, run.output("eval_report.json"), ReportFormat::kJson);
  emit_report(report, run.output("sweep.csv"), ReportFormat::kCsv);
  char line[200];
  std::snprintf(line, sizeof line, "%s on %s: top-1 %.2f  SR@%zu %.2f  MRR@%zu %.2f  nDCG@%zu %.2f\n",
                method.c_str(), data.label.c_str(), 100 * report.top1_accuracy, k, 100 * report.success_rate,
                k, 100 * report.mrr, k, 100 * report.ndcg);
  log << line;
  return run.manifest;
}

HttpService* g_service = nullptr;

extern "C" void handle_signal(int) {
  if (g_service) g_service->stop();
}

RunManifest cmd_serve(json config, std::ostream& log) {
  if (config.contains("config_file")) {
    json file = read_json_file(config["config_file"].get<std::string>());
    for (auto& [key, value] : config.items()) {
      if (key != "config_file" && key != "out_dir") file[key] = value;
    }
    file["out_dir"] = config.value("out_dir", std::string("runs"));
    config = std::move(file);
  }
  const std::string out_dir = config.value("out_dir", std::string("runs"));
  json server_json = config;
  server_json.erase("out_dir");
  ServerConfig server = server_config_from_json(server_json);
  apply_env_overrides(server);
  json resolved = to_json(server);
  resolved["out_dir"] = out_dir;

  std::shared_ptr<const BaseEncoder> base = make_base_encoder(server.base_encoder);
  auto registry = std::make_shared<TenantRegistry>(base, server.retrieval);
  std::map<std::string, std::string> fingerprints;
  for (const auto& t : server.tenants) {
    FaqCorpus corpus;
    if (t.format) {
      LoadOptions options;
      options.tenant_id = t.tenant_id;
      corpus = load_corpus(t.faqs, *t.format, options);
    } else {
      corpus = corpus_from_json(read_json_file(t.faqs), t.tenant_id);
    }
    fingerprints[t.faqs.string()] = fingerprint_file(t.faqs);
    std::optional<TenantHead> head;
    if (t.head) head = load_head(*t.head);
    registry->register_tenant(t.tenant_id, std::move(corpus), t.retrieval, std::move(head));
  }

  const auto addr = parse_listen(server.listen);
  ServiceOptions options;
  options.host = addr.host;
  options.port = addr.port;
  options.threads = server.threads;
  options.train_defaults = server.train;
  options.sampling_defaults = server.sampling;
  HttpService service(registry, options);
  const int port = service.bind();

  Run run = begin_run("serve", resolved, server.train.seed);
  run.manifest.dataset_fingerprints = fingerprints;
  write_manifest(run.dir, run.manifest);
  log << "listening on " << addr.host << ":" << port << " with " << registry->size() << " tenants ("
      << base->name() << ")" << std::endl;

  g_service = &service;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  service.run();
  g_service = nullptr;
  return run.manifest;
}

RunManifest cmd_bench(json config, std::ostream& log) {
  LoadProfile defaults;
  if (config.contains("config_file")) {
    const json file = read_json_file(config["config_file"].get<std::string>());
    if (file.contains("bench")) defaults = load_profile_from_json(file["bench"]);
  }
  json profile_json = section(config, "bench");
  if (config.contains("query_pool_file")) {
    std::ifstream in(config["query_pool_file"].get<std::string>());
    if (!in) fail(ErrorCode::kIo, "cannot open query_pool_file");
    std::vector<std::string> pool;
    for (std::string line; std::getline(in, line);) {
      if (!trim(line).empty()) pool.push_back(line);
    }
    profile_json["query_pool"] = pool;
  }
  const LoadProfile profile = load_profile_from_json(profile_json, defaults);
  profile.validate();
  const std::string target = config.value("target", std::string("http://127.0.0.1:8080"));
  config["target"] = target;
  config["bench"] = to_json(profile);
  config.erase("config_file");
  config.erase("query_pool_file");

  const auto result = run_load(target, profile);
  Run run = begin_run("bench", config, profile.seed);
  write_text(run.output("load_result.json"), to_json(result).dump(2) + "\n");
  write_text(run.output("table.txt"), format_table(result));
  log << format_table(result);
  if (!result.levels.empty() && result.levels.back().error_rate_exceeded) {
    fail(ErrorCode::kNetwork, "error rate above bench.max_error_rate at concurrency " +
                                  std::to_string(result.levels.back().concurrency));
  }
  return run.manifest;
}

}  // namespace

RunManifest execute(const std::string& subcommand, const json& input, std::ostream& log) {
  json config = input.is_null() ? json::object() : input;
  if (!config.is_object()) fail(ErrorCode::kInvalidArgument, "config must be a JSON object");
  RunManifest manifest;
  if (subcommand == "ingest") manifest = cmd_ingest(config, log);
  else if (subcommand == "pairs") manifest = cmd_pairs(config, log);
  else if (subcommand == "train") manifest = cmd_train(config, log);
  else if (subcommand == "eval") manifest = cmd_eval(config, log);
  else if (subcommand == "serve") return cmd_serve(config, log);
  else if (subcommand == "bench") manifest = cmd_bench(config, log);
  else fail(ErrorCode::kInvalidArgument, "unknown subcommand '" + subcommand + "'");
  const auto& outputs = manifest.outputs;
  const auto dir = std::filesystem::path(outputs.empty() ? "." : outputs.front()).parent_path();
  write_manifest(dir, manifest);
  log << "run directory: " << dir.string() << "\n";
  return manifest;
}

namespace {

enum class Kind { kString, kInt, kFloat, kBool, kIntList };

struct Flag {
  std::string name;     // without leading dashes
  std::string pointer;  // JSON pointer into the config
  Kind kind;
  std::string help;
};

// Flags and the config keys they set.
const std::vector<Flag>& dataset_flags() {
  static const std::vector<Flag> flags = {
      {"corpus", "/corpus", Kind::kString, "JSON corpus written by ingest"},
      {"dataset", "/dataset", Kind::kString, "catalog dataset name"},
      {"data-dir", "/data_dir", Kind::kString, "root of the dataset catalog (default $FAQIR_DATA_DIR)"},
      {"train-csv", "/train_csv", Kind::kString, "training CSV"},
      {"test-csv", "/test_csv", Kind::kString, "test CSV"},
      {"format", "/format", Kind::kString, "hint3-csv or dialoglue-csv"},
      {"tenant-id", "/tenant_id", Kind::kString, "tenant id for the corpus"},
      {"k-shot", "/k_shot", Kind::kInt, "keep k questions per intent"},
      {"subset-seed", "/subset_seed", Kind::kInt, "seed of the k-shot draw"},
  };
  return flags;
}

const std::vector<Flag>& base_flags() {
  static const std::vector<Flag> flags = {
      {"base", "/base_encoder/type", Kind::kString, "hash, lookup or remote"},
      {"base-dim", "/base_encoder/dimension", Kind::kInt, "base embedding dimension"},
      {"base-seed", "/base_encoder/seed", Kind::kInt, "hash featurizer seed"},
      {"embeddings", "/base_encoder/path", Kind::kString, "embedding file for the lookup base"},
      {"encoder-url", "/base_encoder/url", Kind::kString, "endpoint of the remote base"},
  };
  return flags;
}

const std::vector<Flag>& sampling_flags() {
  static const std::vector<Flag> flags = {
      {"cap", "/sampling/cap", Kind::kInt, "maximum sampled pairs"},
      {"balanced-size", "/sampling/balanced_size", Kind::kInt, "draw a balanced set of this size"},
      {"sampling-seed", "/sampling/seed", Kind::kInt, "hard-sampling seed"},
  };
  return flags;
}

const std::vector<Flag>& train_flags() {
  static const std::vector<Flag> flags = {
      {"learning-rate", "/train/learning_rate", Kind::kFloat, ""},
      {"batch-size", "/train/batch_size", Kind::kInt, ""},
      {"iterations", "/train/iterations", Kind::kInt, ""},
      {"warmup-fraction", "/train/warmup_fraction", Kind::kFloat, ""},
      {"max-grad-norm", "/train/max_grad_norm", Kind::kFloat, ""},
      {"weight-decay", "/train/weight_decay", Kind::kFloat, ""},
      {"objective", "/train/objective", Kind::kString, "contrastive, triplet or online-triplet"},
      {"mining", "/train/mining", Kind::kString, "batch-hard or batch-all"},
      {"seed", "/train/seed", Kind::kInt, "training seed"},
      {"log-every", "/train/log_every", Kind::kInt, ""},
      {"init-head", "/init_head", Kind::kString, "start from this head checkpoint"},
  };
  return flags;
}

struct Subcommand {
  CLI::App* app = nullptr;
  std::vector<Flag> flags;
  std::map<std::string, std::string> values;
  std::string config_file;
  std::string out_dir;
};

void add_flags(Subcommand& sub, const std::vector<Flag>& flags) {
  for (const auto& f : flags) {
    sub.flags.push_back(f);
    sub.app->add_option("--" + f.name, sub.values[f.name], f.help);
  }
}

json convert(const Flag& f, const std::string& text) {
  try {
    switch (f.kind) {
      case Kind::kString: return text;
      case Kind::kInt: {
        std::size_t used = 0;
        const auto v = std::stoull(text, &used);
        if (used != text.size()) break;
        return v;
      }
      case Kind::kFloat: {
        std::size_t used = 0;
        const auto v = std::stod(text, &used);
        if (used != text.size()) break;
        return v;
      }
      case Kind::kBool:
        if (text == "true" || text == "1") return true;
        if (text == "false" || text == "0") return false;
        break;
      case Kind::kIntList: {
        json list = json::array();
        std::size_t start = 0;
        while (start <= text.size()) {
          const auto comma = text.find(',', start);
          const auto item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
          std::size_t used = 0;
          list.push_back(std::stoull(item, &used));
          if (used != item.size()) throw std::invalid_argument(item);
          if (comma == std::string::npos) break;
          start = comma + 1;
        }
        return list;
      }
    }
  } catch (const std::exception&) {
  }
  fail(ErrorCode::kInvalidArgument, "--" + f.name + ": cannot parse '" + text + "'");
}

json resolve(const Subcommand& sub) {
  json config = json::object();
  if (!sub.config_file.empty()) config = read_json_file(sub.config_file);
  for (const auto& f : sub.flags) {
    if (sub.app->count("--" + f.name) == 0) continue;
    config[json::json_pointer(f.pointer)] = convert(f, sub.values.at(f.name));
  }
  if (!sub.out_dir.empty()) config["out_dir"] = sub.out_dir;
  return config;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Few-shot FAQ retrieval engine: ingest, sample, train, evaluate, serve and load-test."};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::map<std::string, Subcommand> subs;
  auto make = [&](const std::string& name, const std::string& help) -> Subcommand& {
    Subcommand& sub = subs[name];
    sub.app = app.add_subcommand(name, help);
    sub.app->add_option("--config", sub.config_file, "JSON config file; flags override its values");
    sub.app->add_option("--out-dir", sub.out_dir, "root for run directories (default runs)");
    return sub;
  };

  add_flags(make("ingest", "load a corpus, write it as JSON with statistics"), dataset_flags());

  auto& pairs = make("pairs", "generate, weight and hard-sample question pairs");
  add_flags(pairs, dataset_flags());
  add_flags(pairs, base_flags());
  add_flags(pairs, sampling_flags());
  add_flags(pairs, {{"head", "/head", Kind::kString, "weight pairs with this head"},
                    {"triplets", "/triplets", Kind::kInt, "also write this many triplets"}});

  auto& train = make("train", "fine-tune a tenant head");
  add_flags(train, dataset_flags());
  add_flags(train, base_flags());
  add_flags(train, sampling_flags());
  add_flags(train, train_flags());

  auto& eval = make("eval", "evaluate neural or lexical retrieval on a test set");
  add_flags(eval, dataset_flags());
  add_flags(eval, base_flags());
  add_flags(eval, {{"method", "/method", Kind::kString, "neural, bm25 or tfidf"},
                   {"head", "/head", Kind::kString, "head checkpoint for neural retrieval"},
                   {"k", "/k", Kind::kInt, "cutoff for SR/MRR/nDCG/MAP"},
                   {"threshold", "/threshold", Kind::kFloat, "OOS threshold"},
                   {"sweep-lo", "/sweep/lo", Kind::kFloat, ""},
                   {"sweep-hi", "/sweep/hi", Kind::kFloat, ""},
                   {"sweep-count", "/sweep/count", Kind::kInt, ""}});

  auto& serve = make("serve", "run the multi-tenant HTTP service");
  add_flags(serve, base_flags());
  add_flags(serve, {{"listen", "/listen", Kind::kString, "host:port (env FAQIR_LISTEN)"},
                    {"threads", "/threads", Kind::kInt, "request worker threads"},
                    {"k", "/retrieval/k", Kind::kInt, "default top-k"},
                    {"threshold", "/retrieval/threshold", Kind::kFloat, "default OOS threshold"}});

  auto& bench = make("bench", "closed-loop load test against a running service");
  add_flags(bench, {{"target", "/target", Kind::kString, "service base URL"},
                    {"concurrency", "/bench/concurrency_levels", Kind::kIntList, "e.g. 1,2,4,8"},
                    {"duration", "/bench/duration_seconds", Kind::kFloat, "seconds per level"},
                    {"warmup", "/bench/warmup_seconds", Kind::kFloat, "excluded seconds per level"},
                    {"seed", "/bench/seed", Kind::kInt, "query sequence seed"},
                    {"max-error-rate", "/bench/max_error_rate", Kind::kFloat, ""},
                    {"query-pool-file", "/query_pool_file", Kind::kString, "one query per line"}});
  std::string tenants;
  bench.app->add_option("--tenants", tenants, "comma-separated tenant ids, equal weight");

  std::string manifest_path;
  std::string replay_out;
  auto* replay = app.add_subcommand("replay", "rerun a subcommand from its manifest");
  replay->add_option("manifest", manifest_path, "manifest.json of an earlier run")->required();
  replay->add_option("--out-dir", replay_out, "root for the new run directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (replay->parsed()) {
      const auto m = read_manifest(manifest_path);
      json config = m.config;
      if (!replay_out.empty()) config["out_dir"] = replay_out;
      execute(m.subcommand, config, std::cout);
      return kExitOk;
    }
    for (auto& [name, sub] : subs) {
      if (!sub.app->parsed()) continue;
      json config = resolve(sub);
      if (name == "serve") {
        if (!sub.config_file.empty()) {
          config = resolve(Subcommand{sub.app, sub.flags, sub.values, "", sub.out_dir});
          config["config_file"] = sub.config_file;
        } else if (const char* env = std::getenv("FAQIR_CONFIG"); env && *env) {
          config["config_file"] = env;
        }
      }
      if (name == "bench") {
        if (!sub.config_file.empty()) {
          config = resolve(Subcommand{sub.app, sub.flags, sub.values, "", sub.out_dir});
          config["config_file"] = sub.config_file;
        }
        if (!tenants.empty()) {
          json mix = json::object();
          std::size_t start = 0;
          while (start <= tenants.size()) {
            const auto comma = tenants.find(',', start);
            mix[tenants.substr(start, comma == std::string::npos ? std::string::npos : comma - start)] = 1.0;
            if (comma == std::string::npos) break;
            start = comma + 1;
          }
          config["bench"]["tenant_mix"] = mix;
        }
      }
      execute(name, config, std::cout);
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    const bool validation = e.code() == ErrorCode::kInvalidArgument || e.code() == ErrorCode::kParse;
    return validation ? kExitValidation : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitValidation;
}

}  // namespace faqir::cli
