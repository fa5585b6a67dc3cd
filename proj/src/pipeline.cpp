#include "specbench/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "specbench/answers.hpp"
#include "specbench/digest.hpp"
#include "specbench/error.hpp"
#include "specbench/png_io.hpp"

namespace specbench {

using nlohmann::ordered_json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view data) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw Error("cannot open " + tmp + " for writing");
    f.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!f) throw Error("failed writing " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::set<int> bundle_labels(const std::filesystem::path& bundle_dir) {
  ordered_json meta;
  try {
    meta = ordered_json::parse(read_file(bundle_dir / "patch.json"));
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid JSON in " + (bundle_dir / "patch.json").string() + ": " + e.what());
  }
  std::set<int> labels;
  for (int l : meta.at("labels")) labels.insert(l);
  return labels;
}

void validate_task_for_manifest(Dataset task, const DatasetManifest& manifest) {
  const auto& spec = task_spec(task);
  switch (task) {
    case Dataset::BigEarthNet43:
    case Dataset::BigEarthNet19:
      if (manifest.dataset != "bigearthnet") {
        throw Error("task " + std::string(dataset_name(task)) +
                    " needs a bigearthnet manifest, got \"" + manifest.dataset + "\"");
      }
      if (manifest.class_names != task_spec(Dataset::BigEarthNet43).class_names) {
        throw Error("manifest class list does not match the 43-class catalog");
      }
      break;
    case Dataset::EuroSat10:
      if (manifest.dataset != "eurosat") {
        throw Error("task eurosat10 needs a eurosat manifest, got \"" +
                    manifest.dataset + "\"");
      }
      if (manifest.class_names != spec.class_names) {
        throw Error("manifest class list does not match the eurosat catalog");
      }
      break;
  }
}

/// Task-space truth: BigEarthNet19 maps the stored 43-space labels.
std::set<int> truth_for_task(const std::set<int>& labels, Dataset task) {
  if (task == Dataset::BigEarthNet19) {
    return ClassMapping::bigearthnet_43_to_19().map(labels);
  }
  return labels;
}

DatasetManifest manifest_for_run(const RunConfig& config) {
  DatasetManifest manifest = load_manifest(config.manifest_path);
  validate_task_for_manifest(config.task, manifest);
  if (config.subset) {
    manifest = sample_subset(manifest, config.subset->n, config.subset->seed);
    std::sort(manifest.patches.begin(), manifest.patches.end(),
              [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
  }
  return manifest;
}

std::shared_ptr<ModelBackend> make_backend(const BackendSettings& settings,
                                           const DatasetManifest& manifest, Dataset task) {
  const MissPolicy policy =
      settings.miss_policy == "empty" ? MissPolicy::Empty : MissPolicy::Error;
  if (settings.kind == "http") {
    HttpBackendConfig http;
    http.endpoint_url = settings.endpoint_url;
    http.model_name = settings.model_name;
    http.api_key_env = settings.api_key_env;
    return std::make_shared<HttpBackend>(http);
  }
  if (settings.kind == "mock-empty") return make_empty_backend();
  if (settings.kind == "mock-truth") {
    std::map<std::string, std::set<int>> truth;
    for (const auto& dir : manifest.patches) {
      truth[dir.filename().string()] = truth_for_task(bundle_labels(dir), task);
    }
    return make_truth_backend(truth, policy);
  }
  if (settings.kind == "mock-fixture") {
    ordered_json doc;
    try {
      doc = ordered_json::parse(read_file(settings.fixture_file));
    } catch (const nlohmann::json::exception& e) {
      throw Error("invalid fixture JSON: " + std::string(e.what()));
    }
    std::map<std::string, std::string> answers;
    for (const auto& [key, value] : doc.items()) answers[key] = value.get<std::string>();
    return std::make_shared<FixtureBackend>("mock-fixture", std::move(answers), policy);
  }
  throw Error("unknown backend kind \"" + settings.kind + "\"");
}

ordered_json record_to_json(const PredictionRecord& rec,
                            const std::vector<std::string>& warnings,
                            const std::string& error) {
  ordered_json j;
  j["patch_id"] = rec.patch_id;
  j["truth"] = rec.truth;
  j["predicted"] = rec.predicted;
  j["raw_text"] = rec.raw_text;
  j["parse_mode"] = parse_mode_name(rec.parse_mode);
  j["parse_failed"] = rec.parse_failed;
  j["warnings"] = warnings;
  j["backend_id"] = rec.backend_id;
  if (!error.empty()) j["error"] = error;
  j["latency_ms"] = rec.latency_ms;
  return j;
}

PredictionRecord record_from_json(const ordered_json& j) {
  PredictionRecord rec;
  rec.patch_id = j.at("patch_id").get<std::string>();
  for (int v : j.at("truth")) rec.truth.insert(v);
  for (int v : j.at("predicted")) rec.predicted.insert(v);
  rec.raw_text = j.at("raw_text").get<std::string>();
  rec.parse_mode =
      j.at("parse_mode").get<std::string>() == "strict" ? ParseMode::Strict : ParseMode::Lenient;
  rec.parse_failed = j.at("parse_failed").get<bool>();
  rec.backend_id = j.at("backend_id").get<std::string>();
  rec.latency_ms = j.at("latency_ms").get<double>();
  return rec;
}

ordered_json config_echo(const RunConfig& config) {
  ordered_json products = ordered_json::array();
  for (ProductId p : config.products) products.push_back(product_name(p));
  ordered_json j;
  j["manifest"] = config.manifest_path.string();
  j["task"] = dataset_name(config.task);
  j["modality"] = modality_name(config.modality);
  j["products"] = products;
  j["normalization"] = {
      {"method", normalization_name(config.normalization.kind)},
      {"lo_percentile", config.normalization.lo_percentile},
      {"hi_percentile", config.normalization.hi_percentile},
  };
  j["backend"] = {
      {"kind", config.backend.kind},
      {"endpoint_url", config.backend.endpoint_url},
      {"model_name", config.backend.model_name},
      {"api_key_env", config.backend.api_key_env},
      {"fixture_file", config.backend.fixture_file.string()},
      {"miss_policy", config.backend.miss_policy},
      {"max_in_flight", config.backend.max_in_flight},
      {"retries", config.backend.retries},
      {"backoff_base_ms", config.backend.backoff_base_ms},
      {"cache_dir", config.backend.cache_dir.string()},
      {"temperature", config.backend.params.temperature},
      {"max_output_tokens", config.backend.params.max_output_tokens},
  };
  if (config.subset) {
    j["subset"] = {{"n", config.subset->n}, {"seed", config.subset->seed}};
  } else {
    j["subset"] = nullptr;
  }
  j["out_dir"] = config.out_dir.string();
  j["run_label"] = config.run_label;
  return j;
}

ordered_json prf_json(const PrfTriple& prf) {
  return {{"precision", prf.precision}, {"recall", prf.recall}, {"f1", prf.f1}};
}

}  // namespace

ImportResult run_import(const ImportConfig& config) {
  if (config.kind != "bigearthnet" && config.kind != "eurosat") {
    throw Error("unknown dataset kind \"" + config.kind + "\"");
  }
  if (!std::filesystem::is_directory(config.src)) {
    throw Error("source directory not found: " + config.src.string());
  }

  std::vector<std::filesystem::path> sources;
  if (config.kind == "bigearthnet") {
    for (const auto& entry : std::filesystem::directory_iterator(config.src)) {
      if (entry.is_directory()) sources.push_back(entry.path());
    }
  } else {
    for (const auto& class_dir : std::filesystem::directory_iterator(config.src)) {
      if (!class_dir.is_directory()) continue;
      for (const auto& entry : std::filesystem::directory_iterator(class_dir.path())) {
        if (entry.path().extension() == ".tif") sources.push_back(entry.path());
      }
    }
  }
  std::sort(sources.begin(), sources.end());
  if (sources.empty()) throw Error("no patches found under " + config.src.string());

  ImportResult result;
  DatasetManifest manifest;
  if (config.kind == "bigearthnet") {
    manifest.dataset = "bigearthnet";
    manifest.multi_label = true;
    manifest.class_names = task_spec(Dataset::BigEarthNet43).class_names;
  } else {
    manifest.dataset = "eurosat";
    manifest.multi_label = false;
    manifest.class_names = task_spec(Dataset::EuroSat10).class_names;
  }

  const auto bundles_root = config.dst / "bundles";
  for (const auto& src : sources) {
    try {
      PatchBundle bundle = config.kind == "bigearthnet" ? import_bigearthnet_patch(src)
                                                        : import_eurosat_patch(src);
      const auto dir = bundles_root / bundle.id;
      write_bundle(dir, bundle);
      manifest.patches.push_back(dir);
      ++result.n_imported;
    } catch (const Error& e) {
      if (!config.skip_bad) {
        throw Error("patch " + src.filename().string() + ": " + e.what());
      }
      ++result.n_skipped;
      result.warnings.push_back(src.filename().string() + ": " + e.what());
    }
  }
  if (manifest.patches.empty()) throw Error("all patches failed to import");

  result.manifest_path = config.dst / "manifest.json";
  save_manifest(result.manifest_path, manifest);
  return result;
}

RenderResult run_render(const RenderConfig& config) {
  DatasetManifest manifest = load_manifest(config.manifest_path);
  std::vector<ProductId> products = config.products;
  if (products.empty()) {
    products.assign(default_products().begin(), default_products().end());
  }

  RenderResult result;
  for (const auto& bundle_dir : manifest.patches) {
    const Patch patch = load_patch(bundle_dir);
    const auto images = render_products(patch, products, config.normalization);
    const auto out = config.out_dir / patch.id;
    std::filesystem::create_directories(out);
    for (const auto& image : images) {
      write_png(out / (std::string(product_name(image.product)) + ".png"), image);
      ++result.n_images;
    }
    ++result.n_patches;
  }
  return result;
}

RunConfig resolve_run_config(RunConfig config) {
  if (config.products.empty()) {
    if (config.modality == Modality::MultiSpectral) {
      config.products.assign(default_products().begin(), default_products().end());
    } else {
      config.products = {ProductId::TrueColor};
    }
  }
  if (config.modality == Modality::RgbOnly) {
    if (config.products != std::vector<ProductId>{ProductId::TrueColor}) {
      throw Error("rgb modality allows only the TrueColor product");
    }
  } else {
    if (config.products.front() != ProductId::TrueColor) {
      throw Error("multi-spectral selections must start with TrueColor");
    }
    std::set<ProductId> unique(config.products.begin(), config.products.end());
    if (unique.size() != config.products.size()) {
      throw Error("duplicate products in selection");
    }
  }
  if (config.run_label.empty()) {
    config.run_label = std::string(dataset_name(config.task)) + "-" +
                       std::string(modality_name(config.modality)) + "-" +
                       config.backend.kind;
  }
  return config;
}

PromptDumpResult run_prompt(const RunConfig& raw_config) {
  const RunConfig config = resolve_run_config(raw_config);
  DatasetManifest manifest = manifest_for_run(config);
  const TaskSpec& task = task_spec(config.task);

  PromptDumpResult result;
  for (const auto& bundle_dir : manifest.patches) {
    const Patch patch = load_patch(bundle_dir);
    auto images = render_products(patch, config.products, config.normalization);
    const Prompt prompt = build_prompt(task, config.modality, std::move(images));

    const auto out = config.out_dir / patch.id;
    std::filesystem::create_directories(out);
    write_file_atomic(out / "prompt.txt", prompt.text);

    ordered_json attachments = ordered_json::array();
    for (const auto& image : prompt.attachments) {
      const std::string file = std::string(product_name(image.product)) + ".png";
      const auto png = encode_png(image);
      write_file_atomic(out / file,
                        std::string_view(reinterpret_cast<const char*>(png.data()),
                                         png.size()));
      attachments.push_back({
          {"product", product_name(image.product)},
          {"width", image.width},
          {"height", image.height},
          {"file", file},
          {"sha256", sha256_hex(png)},
      });
    }
    write_file_atomic(out / "attachments.json", attachments.dump(2) + "\n");
    ++result.n_patches;
  }
  return result;
}

EvalResult run_eval(const RunConfig& raw_config) {
  const RunConfig config = resolve_run_config(raw_config);
  DatasetManifest manifest = manifest_for_run(config);
  const TaskSpec& task = task_spec(config.task);

  std::filesystem::create_directories(config.out_dir);
  const auto records_path = config.out_dir / "records.jsonl";

  // Resume support: keep completed records for patches still in scope.
  std::map<std::string, ordered_json> existing;
  if (std::filesystem::exists(records_path)) {
    std::istringstream lines(read_file(records_path));
    std::string line;
    while (std::getline(lines, line)) {
      if (line.empty()) continue;
      ordered_json j;
      try {
        j = ordered_json::parse(line);
      } catch (const nlohmann::json::exception&) {
        continue;  // torn line from an interrupted run
      }
      if (j.contains("error")) continue;  // failed patches get retried
      existing.emplace(j.at("patch_id").get<std::string>(), std::move(j));
    }
  }

  auto backend = make_backend(config.backend, manifest, config.task);
  QueryClientConfig client_config;
  client_config.max_in_flight = config.backend.max_in_flight;
  client_config.retries = config.backend.retries;
  client_config.backoff_base_ms = config.backend.backoff_base_ms;
  client_config.cache_dir = config.backend.cache_dir;
  QueryClient client(backend, client_config);

  std::vector<std::filesystem::path> todo;
  std::map<std::string, ordered_json> records;
  int n_resumed = 0;
  for (const auto& dir : manifest.patches) {
    const std::string id = dir.filename().string();
    auto it = existing.find(id);
    if (it != existing.end()) {
      records.emplace(id, it->second);
      ++n_resumed;
    } else {
      todo.push_back(dir);
    }
  }

  std::mutex state_mutex;
  std::atomic<std::size_t> next{0};
  std::atomic<int> skipped_empty_truth{0};
  std::exception_ptr fatal;

  auto worker = [&] {
    while (true) {
      {
        std::lock_guard lock(state_mutex);
        if (fatal) return;
      }
      const std::size_t i = next.fetch_add(1);
      if (i >= todo.size()) return;
      const auto& bundle_dir = todo[i];
      const std::string patch_id = bundle_dir.filename().string();
      try {
        const Patch patch = load_patch(bundle_dir);
        const std::set<int> truth = truth_for_task(patch.labels, config.task);
        if (truth.empty()) {
          ++skipped_empty_truth;
          continue;
        }
        auto images = render_products(patch, config.products, config.normalization);
        Prompt prompt = build_prompt(task, config.modality, std::move(images));

        ModelRequest request;
        request.tag = patch_id;
        request.prompt_text = std::move(prompt.text);
        for (const auto& image : prompt.attachments) {
          request.images.push_back(encode_png(image));
        }
        request.params = config.backend.params;

        const ModelResponse response = client.query(request);
        const ParsedAnswer parsed =
            parse_answer(response.text, task.n_classes(), task.multi_label);

        PredictionRecord rec;
        rec.patch_id = patch_id;
        rec.predicted = parsed.indices;
        rec.truth = truth;
        rec.raw_text = response.text;
        rec.parse_mode = parsed.mode;
        rec.parse_failed = parsed.failed;
        rec.backend_id = response.backend_id;
        rec.latency_ms = response.latency_ms;

        std::lock_guard lock(state_mutex);
        records.emplace(patch_id, record_to_json(rec, parsed.warnings, ""));
      } catch (const AuthError&) {
        std::lock_guard lock(state_mutex);
        if (!fatal) fatal = std::current_exception();
        return;
      } catch (const Error& e) {
        PredictionRecord rec;
        rec.patch_id = patch_id;
        rec.parse_failed = true;
        rec.parse_mode = ParseMode::Lenient;
        rec.backend_id = client.backend_id();
        try {
          rec.truth = truth_for_task(bundle_labels(bundle_dir), config.task);
        } catch (const Error&) {
          // unreadable bundle: record the failure with empty truth
        }
        std::lock_guard lock(state_mutex);
        records.emplace(patch_id, record_to_json(rec, {}, e.what()));
      }
    }
  };

  const int n_workers =
      std::max(1, std::min<int>(config.backend.max_in_flight,
                                static_cast<int>(std::max<std::size_t>(todo.size(), 1))));
  std::vector<std::thread> workers;
  workers.reserve(n_workers);
  for (int i = 0; i < n_workers; ++i) workers.emplace_back(worker);
  for (auto& w : workers) w.join();
  if (fatal) std::rethrow_exception(fatal);

  // Records are keyed by patch id, so the file is sorted and deterministic
  // regardless of completion order.
  std::string jsonl;
  std::vector<PredictionRecord> scored;
  for (const auto& [id, j] : records) {
    jsonl += j.dump();
    jsonl += '\n';
    if (!j.contains("error")) {
      scored.push_back(record_from_json(j));
    } else if (!j.at("truth").empty()) {
      scored.push_back(record_from_json(j));  // failed patch scores as a miss
    }
  }
  write_file_atomic(records_path, jsonl);

  if (scored.empty()) throw Error("no scorable records produced");
  const MetricsReport report = aggregate(scored, task.n_classes(), task.multi_label);

  long n_lenient = 0;
  for (const auto& rec : scored) {
    if (!rec.parse_failed && rec.parse_mode == ParseMode::Lenient) ++n_lenient;
  }

  ordered_json metrics;
  metrics["run_label"] = config.run_label;
  metrics["task"] = dataset_name(config.task);
  metrics["modality"] = modality_name(config.modality);
  metrics["backend_id"] = client.backend_id();
  metrics["n_records"] = report.n_records;
  metrics["n_parse_failures"] = report.n_parse_failures;
  metrics["n_lenient_parses"] = n_lenient;
  metrics["n_skipped_empty_truth"] = skipped_empty_truth.load();
  metrics["sample"] = prf_json(report.sample);
  metrics["micro"] = prf_json(report.micro);
  metrics["macro"] = prf_json(report.macro);
  if (report.accuracy) {
    metrics["accuracy"] = *report.accuracy;
  } else {
    metrics["accuracy"] = nullptr;
  }
  ordered_json per_class = ordered_json::array();
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    per_class.push_back({{"class", c + 1},
                         {"tp", report.per_class[c].tp},
                         {"fp", report.per_class[c].fp},
                         {"fn", report.per_class[c].fn}});
  }
  metrics["per_class"] = per_class;
  metrics["n_backend_calls"] = client.backend_calls();
  metrics["n_cache_hits"] = client.cache_hits();
  metrics["config"] = config_echo(config);

  const auto metrics_path = config.out_dir / "metrics.json";
  write_file_atomic(metrics_path, metrics.dump(2) + "\n");

  EvalResult result;
  result.report = report;
  result.records_path = records_path;
  result.metrics_path = metrics_path;
  result.n_backend_calls = client.backend_calls();
  result.n_cache_hits = client.cache_hits();
  result.n_evaluated = static_cast<int>(todo.size());
  result.n_resumed = n_resumed;
  result.n_skipped_empty_truth = skipped_empty_truth.load();
  return result;
}

namespace {

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string fmt3_signed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%+.3f", v);
  return buf;
}

}  // namespace

void run_report(const std::vector<std::filesystem::path>& metrics_files,
                const std::optional<std::string>& baseline_label,
                const std::filesystem::path& out_prefix) {
  if (metrics_files.empty()) throw Error("no metrics files given");

  std::vector<ordered_json> runs;
  for (const auto& path : metrics_files) {
    try {
      runs.push_back(ordered_json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
      throw Error("invalid metrics JSON " + path.string() + ": " + e.what());
    }
  }
  const std::string task = runs[0].at("task").get<std::string>();
  for (const auto& run : runs) {
    if (run.at("task").get<std::string>() != task) {
      throw Error("metrics files mix tasks: " + task + " vs " +
                  run.at("task").get<std::string>());
    }
  }
  const bool single_label = !runs[0].at("accuracy").is_null();

  const bool with_delta = runs.size() > 1;
  std::size_t baseline_index = 0;
  if (with_delta && baseline_label) {
    bool found = false;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (runs[i].at("run_label").get<std::string>() == *baseline_label) {
        baseline_index = i;
        found = true;
        break;
      }
    }
    if (!found) throw Error("baseline run \"" + *baseline_label + "\" not among inputs");
  }

  auto headline = [&](const ordered_json& run) {
    return single_label ? run.at("accuracy").get<double>()
                        : run.at("sample").at("f1").get<double>();
  };
  const double baseline_value = headline(runs[baseline_index]);
  const std::string headline_name = single_label ? "accuracy" : "sample F1";

  std::vector<std::string> columns = {"run"};
  for (const char* mode : {"sample", "micro", "macro"}) {
    for (const char* metric : {"f1", "precision", "recall"}) {
      columns.push_back(std::string(mode) + "_" + metric);
    }
  }
  if (single_label) columns.push_back("accuracy");
  if (with_delta) columns.push_back("delta_" + std::string(single_label ? "accuracy" : "f1"));

  std::vector<std::vector<std::string>> rows;
  for (const auto& run : runs) {
    std::vector<std::string> row = {run.at("run_label").get<std::string>()};
    for (const char* mode : {"sample", "micro", "macro"}) {
      for (const char* metric : {"f1", "precision", "recall"}) {
        row.push_back(fmt3(run.at(mode).at(metric).get<double>()));
      }
    }
    if (single_label) row.push_back(fmt3(run.at("accuracy").get<double>()));
    if (with_delta) row.push_back(fmt3_signed(headline(run) - baseline_value));
    rows.push_back(std::move(row));
  }

  std::string md = "# " + task + " comparison\n\n";
  md += "Baseline for deltas (" + headline_name + "): " +
        (with_delta ? runs[baseline_index].at("run_label").get<std::string>()
                    : std::string("n/a")) +
        "\n\n";
  md += "|";
  for (const auto& c : columns) md += " " + c + " |";
  md += "\n|";
  for (std::size_t i = 0; i < columns.size(); ++i) md += " --- |";
  md += "\n";
  for (const auto& row : rows) {
    md += "|";
    for (const auto& cell : row) md += " " + cell + " |";
    md += "\n";
  }

  std::string csv;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) csv += ',';
    csv += columns[i];
  }
  csv += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) csv += ',';
      csv += row[i];
    }
    csv += '\n';
  }

  std::filesystem::create_directories(
      std::filesystem::absolute(out_prefix).parent_path());
  write_file_atomic(out_prefix.string() + ".md", md);
  write_file_atomic(out_prefix.string() + ".csv", csv);
}

std::string records_content_digest(const std::filesystem::path& records_path) {
  std::istringstream lines(read_file(records_path));
  std::string line;
  Sha256 h;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error("invalid records line: " + std::string(e.what()));
    }
    j.erase("latency_ms");
    h.update(j.dump());
    h.update(std::string_view("\n"));
  }
  return h.hex();
}

}  // namespace specbench
