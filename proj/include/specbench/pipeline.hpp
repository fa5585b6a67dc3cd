#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "specbench/backend.hpp"
#include "specbench/dataset.hpp"
#include "specbench/metrics.hpp"
#include "specbench/prompts.hpp"

namespace specbench {

struct ImportConfig {
  std::filesystem::path src;
  std::filesystem::path dst;
  std::string kind;  // "bigearthnet" | "eurosat"
  bool skip_bad = false;
};

struct ImportResult {
  std::filesystem::path manifest_path;
  int n_imported = 0;
  int n_skipped = 0;
  std::vector<std::string> warnings;
};

ImportResult run_import(const ImportConfig& config);

struct RenderConfig {
  std::filesystem::path manifest_path;
  std::vector<ProductId> products;  // empty = the six defaults
  NormalizationSpec normalization;
  std::filesystem::path out_dir;
};

struct RenderResult {
  int n_patches = 0;
  int n_images = 0;
};

/// Writes <out>/<patch_id>/<Product>.png for every patch and product.
RenderResult run_render(const RenderConfig& config);

struct BackendSettings {
  std::string kind = "mock-empty";  // http | mock-truth | mock-empty | mock-fixture
  std::string endpoint_url;
  std::string model_name;
  std::string api_key_env = "SPECBENCH_API_KEY";
  std::filesystem::path fixture_file;  // mock-fixture: JSON object {patch_id: answer}
  std::string miss_policy = "error";   // mock backends on unknown patch: error | empty
  int max_in_flight = 4;
  int retries = 3;
  int backoff_base_ms = 250;
  std::filesystem::path cache_dir;  // empty = caching disabled
  GenerationParams params;
};

struct SubsetSpec {
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

struct RunConfig {
  std::filesystem::path manifest_path;
  Dataset task = Dataset::BigEarthNet43;
  Modality modality = Modality::MultiSpectral;
  std::vector<ProductId> products;  // empty = defaults for the modality
  NormalizationSpec normalization;
  BackendSettings backend;
  std::optional<SubsetSpec> subset;
  std::filesystem::path out_dir;
  std::string run_label;  // empty = derived from task/modality/backend
};

/// Fills defaulted fields and validates cross-field invariants (RgbOnly
/// forces [TrueColor]; MultiSpectral selections start with TrueColor and
/// contain no duplicates).
RunConfig resolve_run_config(RunConfig config);

struct PromptDumpResult {
  int n_patches = 0;
};

/// Dry run: writes <out>/<patch_id>/prompt.txt, the attachment PNGs and an
/// attachments.json image list, without touching any backend.
PromptDumpResult run_prompt(const RunConfig& config);

struct EvalResult {
  MetricsReport report;
  std::filesystem::path records_path;
  std::filesystem::path metrics_path;
  long n_backend_calls = 0;
  long n_cache_hits = 0;
  int n_evaluated = 0;  // patches evaluated in this run
  int n_resumed = 0;    // records reused from a previous partial run
  int n_skipped_empty_truth = 0;
};

/// Full evaluation: render -> prompt -> backend -> parse -> metrics.
/// Writes records.jsonl (one PredictionRecord per line, sorted by patch id)
/// and metrics.json. Re-running with an existing records.jsonl completes
/// only missing patches. Patch-level failures become error records and the
/// run continues; authentication failures abort.
EvalResult run_eval(const RunConfig& config);

/// Comparison table over metric files produced by run_eval. All runs must
/// share one task. Writes <prefix>.md and <prefix>.csv; with more than one
/// run a delta column against the baseline run (by label; default = first
/// file) is included, computed on accuracy for single-label tasks and on
/// sample F1 otherwise.
void run_report(const std::vector<std::filesystem::path>& metrics_files,
                const std::optional<std::string>& baseline_label,
                const std::filesystem::path& out_prefix);

/// SHA-256 over records.jsonl with every "latency_ms" field removed; the
/// determinism contract for repeated runs compares these.
std::string records_content_digest(const std::filesystem::path& records_path);

}  // namespace specbench
