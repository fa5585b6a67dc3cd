#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "specbench/error.hpp"
#include "specbench/pipeline.hpp"

namespace {

using nlohmann::json;
using namespace specbench;

constexpr const char* kVersion = "0.1.0";

json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream f(path);
  if (!f) throw Error("cannot open config file " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw Error("invalid config JSON " + path + ": " + e.what());
  }
}

// Precedence: CLI flag > config file > environment > built-in default.
struct Resolver {
  json config;

  std::string str(const CLI::Option* opt, const std::string& flag_value,
                  const char* config_key, const char* env_key,
                  std::string fallback) const {
    if (opt && opt->count()) return flag_value;
    if (config_key && config.contains(config_key)) {
      return config.at(config_key).get<std::string>();
    }
    if (env_key) {
      if (const char* e = std::getenv(env_key); e && *e) return e;
    }
    return fallback;
  }

  long integer(const CLI::Option* opt, long flag_value, const char* config_key,
               const char* env_key, long fallback) const {
    if (opt && opt->count()) return flag_value;
    if (config_key && config.contains(config_key)) {
      return config.at(config_key).get<long>();
    }
    if (env_key) {
      if (const char* e = std::getenv(env_key); e && *e) return std::stol(e);
    }
    return fallback;
  }

  double real(const CLI::Option* opt, double flag_value, const char* config_key,
              double fallback) const {
    if (opt && opt->count()) return flag_value;
    if (config_key && config.contains(config_key)) {
      return config.at(config_key).get<double>();
    }
    return fallback;
  }
};

std::vector<ProductId> parse_products(const std::vector<std::string>& names) {
  std::vector<ProductId> out;
  for (const auto& name : names) {
    auto id = product_from_name(name);
    if (!id) throw Error("unknown product \"" + name + "\"");
    out.push_back(*id);
  }
  return out;
}

Dataset parse_task(const std::string& name) {
  if (name == "43" || name == "bigearthnet43") return Dataset::BigEarthNet43;
  if (name == "19" || name == "bigearthnet19") return Dataset::BigEarthNet19;
  if (name == "eurosat" || name == "eurosat10") return Dataset::EuroSat10;
  throw Error("unknown task \"" + name + "\" (use 43, 19 or eurosat)");
}

NormalizationSpec parse_normalization(const std::string& method, double lo, double hi) {
  auto kind = normalization_from_name(method);
  if (!kind) throw Error("unknown normalization \"" + method + "\"");
  NormalizationSpec spec;
  spec.kind = *kind;
  spec.lo_percentile = lo;
  spec.hi_percentile = hi;
  return spec;
}

void print_eval_summary(const EvalResult& result) {
  const auto& r = result.report;
  std::cout << "records:         " << r.n_records << " (" << result.n_resumed
            << " resumed, " << result.n_skipped_empty_truth << " skipped)\n";
  std::cout << "parse failures:  " << r.n_parse_failures << "\n";
  std::cout << "sample P/R/F1:   " << r.sample.precision << " / " << r.sample.recall
            << " / " << r.sample.f1 << "\n";
  std::cout << "micro  P/R/F1:   " << r.micro.precision << " / " << r.micro.recall
            << " / " << r.micro.f1 << "\n";
  std::cout << "macro  P/R/F1:   " << r.macro.precision << " / " << r.macro.recall
            << " / " << r.macro.f1 << "\n";
  if (r.accuracy) std::cout << "top-1 accuracy:  " << *r.accuracy << "\n";
  std::cout << "backend calls:   " << result.n_backend_calls
            << " (cache hits " << result.n_cache_hits << ")\n";
  std::cout << "records file:    " << result.records_path.string() << "\n";
  std::cout << "metrics file:    " << result.metrics_path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-spectral pseudo-image benchmark harness"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // ---- import ----
  auto* import_cmd = app.add_subcommand("import", "Convert a source dataset into patch bundles");
  std::string import_src, import_out, import_kind;
  bool skip_bad = false;
  import_cmd->add_option("--src", import_src, "Source dataset root")->required();
  import_cmd->add_option("--out", import_out, "Output directory")->required();
  import_cmd->add_option("--kind", import_kind, "Dataset layout: bigearthnet | eurosat")
      ->required();
  import_cmd->add_flag("--skip-bad", skip_bad, "Skip patches that fail to import");

  // ---- render ----
  auto* render_cmd = app.add_subcommand("render", "Render pseudo-color images for each patch");
  std::string render_manifest, render_out;
  std::vector<std::string> render_products;
  std::string render_norm = "minmax";
  double render_lo = 2.0, render_hi = 98.0;
  render_cmd->add_option("--manifest", render_manifest, "Manifest JSON")->required();
  render_cmd->add_option("--out", render_out, "Output directory")->required();
  render_cmd->add_option("--products", render_products, "Comma-separated product list")
      ->delimiter(',');
  render_cmd->add_option("--normalization", render_norm, "minmax | percentile");
  render_cmd->add_option("--lo-percentile", render_lo, "Lower percentile clip");
  render_cmd->add_option("--hi-percentile", render_hi, "Upper percentile clip");

  // ---- prompt / eval (shared options) ----
  struct RunFlags {
    std::string manifest, task, modality = "multispectral", out;
    std::vector<std::string> products;
    std::string normalization = "minmax";
    double lo = 2.0, hi = 98.0;
    std::string backend, endpoint_url, model_name, api_key_env, fixture, miss_policy;
    std::string cache_dir, label, config_file;
    long max_in_flight = 4, retries = 3, backoff_base_ms = 250, max_tokens = 256;
    double temperature = 0.0;
    long subset_n = 0;
    std::uint64_t subset_seed = 0;
  };

  auto add_run_options = [](CLI::App* cmd, RunFlags& f, bool with_backend) {
    cmd->add_option("--manifest", f.manifest, "Manifest JSON")->required();
    cmd->add_option("--task", f.task, "Task: 43 | 19 | eurosat")->required();
    cmd->add_option("--modality", f.modality, "rgb | multispectral");
    cmd->add_option("--out", f.out, "Output directory")->required();
    cmd->add_option("--products", f.products, "Comma-separated product list")->delimiter(',');
    cmd->add_option("--normalization", f.normalization, "minmax | percentile");
    cmd->add_option("--lo-percentile", f.lo, "Lower percentile clip");
    cmd->add_option("--hi-percentile", f.hi, "Upper percentile clip");
    cmd->add_option("--subset", f.subset_n, "Evaluate a seeded subset of this size");
    cmd->add_option("--seed", f.subset_seed, "Subset shuffle seed");
    cmd->add_option("--config", f.config_file, "JSON config file");
    if (with_backend) {
      cmd->add_option("--backend", f.backend,
                      "http | mock-truth | mock-empty | mock-fixture");
      cmd->add_option("--endpoint-url", f.endpoint_url, "HTTP backend endpoint");
      cmd->add_option("--model", f.model_name, "Model name sent on the wire");
      cmd->add_option("--api-key-env", f.api_key_env, "Env var holding the API key");
      cmd->add_option("--fixture", f.fixture, "mock-fixture answers JSON");
      cmd->add_option("--miss-policy", f.miss_policy, "Mock miss policy: error | empty");
      cmd->add_option("--max-in-flight", f.max_in_flight, "Concurrent request bound");
      cmd->add_option("--retries", f.retries, "Retry count for transient failures");
      cmd->add_option("--backoff-base-ms", f.backoff_base_ms, "Exponential backoff base");
      cmd->add_option("--cache-dir", f.cache_dir, "Response cache directory");
      cmd->add_option("--temperature", f.temperature, "Sampling temperature");
      cmd->add_option("--max-output-tokens", f.max_tokens, "Output token cap");
      cmd->add_option("--label", f.label, "Run label used in reports");
    }
  };

  RunFlags prompt_flags;
  auto* prompt_cmd =
      app.add_subcommand("prompt", "Write prompt text and image lists (no backend calls)");
  add_run_options(prompt_cmd, prompt_flags, false);

  RunFlags eval_flags;
  auto* eval_cmd = app.add_subcommand("eval", "Run the evaluation pipeline");
  add_run_options(eval_cmd, eval_flags, true);

  // ---- report ----
  auto* report_cmd = app.add_subcommand("report", "Comparison table from metrics files");
  std::vector<std::string> report_inputs;
  std::string report_out, report_baseline;
  report_cmd->add_option("metrics", report_inputs, "metrics.json files")->required();
  report_cmd->add_option("--out", report_out, "Output prefix (.md/.csv appended)")->required();
  report_cmd->add_option("--baseline", report_baseline, "Baseline run label for deltas");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*import_cmd) {
      ImportResult result = run_import({import_src, import_out, import_kind, skip_bad});
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << "imported " << result.n_imported << " patches ("
                << result.n_skipped << " skipped) -> "
                << result.manifest_path.string() << "\n";
      return 0;
    }

    if (*render_cmd) {
      RenderConfig config;
      config.manifest_path = render_manifest;
      config.products = parse_products(render_products);
      config.normalization = parse_normalization(render_norm, render_lo, render_hi);
      config.out_dir = render_out;
      RenderResult result = run_render(config);
      std::cout << "rendered " << result.n_images << " images for "
                << result.n_patches << " patches under " << render_out << "\n";
      return 0;
    }

    auto build_run_config = [&](const RunFlags& f, CLI::App* cmd,
                                bool with_backend) -> RunConfig {
      Resolver resolver{load_config_file(f.config_file)};
      RunConfig config;
      config.manifest_path = f.manifest;
      config.task = parse_task(f.task);
      auto modality = modality_from_name(f.modality);
      if (!modality) throw Error("unknown modality \"" + f.modality + "\"");
      config.modality = *modality;
      config.out_dir = f.out;

      std::vector<std::string> product_names = f.products;
      if (product_names.empty() && resolver.config.contains("products")) {
        product_names = resolver.config.at("products").get<std::vector<std::string>>();
      }
      config.products = parse_products(product_names);

      const std::string norm = resolver.str(cmd->get_option("--normalization"),
                                            f.normalization, "normalization", nullptr,
                                            "minmax");
      config.normalization = parse_normalization(
          norm,
          resolver.real(cmd->get_option("--lo-percentile"), f.lo, "lo_percentile", 2.0),
          resolver.real(cmd->get_option("--hi-percentile"), f.hi, "hi_percentile", 98.0));

      if (f.subset_n > 0) {
        config.subset = SubsetSpec{static_cast<std::size_t>(f.subset_n), f.subset_seed};
      }

      if (with_backend) {
        auto& b = config.backend;
        b.kind = resolver.str(cmd->get_option("--backend"), f.backend, "backend", nullptr,
                              "mock-empty");
        b.endpoint_url = resolver.str(cmd->get_option("--endpoint-url"), f.endpoint_url,
                                      "endpoint_url", "SPECBENCH_ENDPOINT_URL", "");
        b.model_name = resolver.str(cmd->get_option("--model"), f.model_name, "model_name",
                                    "SPECBENCH_MODEL_NAME", "");
        b.api_key_env = resolver.str(cmd->get_option("--api-key-env"), f.api_key_env,
                                     "api_key_env", nullptr, "SPECBENCH_API_KEY");
        b.fixture_file = resolver.str(cmd->get_option("--fixture"), f.fixture,
                                      "fixture_file", nullptr, "");
        b.miss_policy = resolver.str(cmd->get_option("--miss-policy"), f.miss_policy,
                                     "miss_policy", nullptr, "error");
        b.max_in_flight = static_cast<int>(
            resolver.integer(cmd->get_option("--max-in-flight"), f.max_in_flight,
                             "max_in_flight", "SPECBENCH_MAX_IN_FLIGHT", 4));
        b.retries = static_cast<int>(resolver.integer(
            cmd->get_option("--retries"), f.retries, "retries", "SPECBENCH_RETRIES", 3));
        b.backoff_base_ms = static_cast<int>(
            resolver.integer(cmd->get_option("--backoff-base-ms"), f.backoff_base_ms,
                             "backoff_base_ms", "SPECBENCH_BACKOFF_BASE_MS", 250));
        b.cache_dir = resolver.str(cmd->get_option("--cache-dir"), f.cache_dir, "cache_dir",
                                   "SPECBENCH_CACHE_DIR", "");
        b.params.temperature = resolver.real(cmd->get_option("--temperature"),
                                             f.temperature, "temperature", 0.0);
        b.params.max_output_tokens = static_cast<int>(
            resolver.integer(cmd->get_option("--max-output-tokens"), f.max_tokens,
                             "max_output_tokens", nullptr, 256));
        config.run_label =
            resolver.str(cmd->get_option("--label"), f.label, "label", nullptr, "");
      }
      return config;
    };

    if (*prompt_cmd) {
      PromptDumpResult result =
          run_prompt(build_run_config(prompt_flags, prompt_cmd, false));
      std::cout << "wrote prompts for " << result.n_patches << " patches under "
                << prompt_flags.out << "\n";
      return 0;
    }

    if (*eval_cmd) {
      EvalResult result = run_eval(build_run_config(eval_flags, eval_cmd, true));
      print_eval_summary(result);
      return 0;
    }

    if (*report_cmd) {
      std::vector<std::filesystem::path> inputs(report_inputs.begin(), report_inputs.end());
      std::optional<std::string> baseline;
      if (!report_baseline.empty()) baseline = report_baseline;
      run_report(inputs, baseline, report_out);
      std::cout << "wrote " << report_out << ".md and " << report_out << ".csv\n";
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
