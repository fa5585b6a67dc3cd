#include <doctest.h>

#include <fstream>

#include <nlohmann/json.hpp>

#include "specbench/digest.hpp"
#include "specbench/error.hpp"
#include "specbench/pipeline.hpp"
#include "support/synthetic.hpp"
#include "tiff_io.hpp"

using namespace specbench;
using specbench::testing::TempDir;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE_MESSAGE(f.good(), "missing ", path.string());
  return std::string((std::istreambuf_iterator<char>(f)), {});
}

RunConfig mock_eval_config(const std::filesystem::path& manifest, Dataset task,
                           const std::filesystem::path& out,
                           const std::string& backend_kind = "mock-truth") {
  RunConfig config;
  config.manifest_path = manifest;
  config.task = task;
  config.modality = Modality::MultiSpectral;
  config.backend.kind = backend_kind;
  config.out_dir = out;
  return config;
}

}  // namespace

TEST_CASE("run_render writes deterministic pngs per patch and product") {
  TempDir tmp("render");
  const auto manifest = testing::write_synthetic_dataset(tmp.path / "ds", "bigearthnet", 2, 5);

  RenderConfig config;
  config.manifest_path = manifest;
  config.out_dir = tmp.path / "out";
  const auto result = run_render(config);
  CHECK(result.n_patches == 2);
  CHECK(result.n_images == 12);

  const auto png = tmp.path / "out" / "patch_000" / "NDWI.png";
  REQUIRE(std::filesystem::exists(png));
  const std::string first = slurp(png);

  RenderConfig again = config;
  again.out_dir = tmp.path / "out2";
  run_render(again);
  CHECK(slurp(tmp.path / "out2" / "patch_000" / "NDWI.png") == first);

  RenderConfig rgb_only = config;
  rgb_only.out_dir = tmp.path / "out3";
  rgb_only.products = {ProductId::TrueColor};
  const auto rgb_result = run_render(rgb_only);
  CHECK(rgb_result.n_images == 2);
  CHECK(std::filesystem::exists(tmp.path / "out3" / "patch_001" / "TrueColor.png"));
  CHECK_FALSE(std::filesystem::exists(tmp.path / "out3" / "patch_001" / "NDVI.png"));
}

TEST_CASE("run_prompt writes text, attachments and image list") {
  TempDir tmp("promptdump");
  const auto manifest = testing::write_synthetic_dataset(tmp.path / "ds", "eurosat", 2, 6);

  RunConfig config;
  config.manifest_path = manifest;
  config.task = Dataset::EuroSat10;
  config.modality = Modality::MultiSpectral;
  config.out_dir = tmp.path / "out";
  const auto result = run_prompt(config);
  CHECK(result.n_patches == 2);

  const auto base = tmp.path / "out" / "patch_000";
  const std::string text = slurp(base / "prompt.txt");
  CHECK(text.find("after the given 6 images") != std::string::npos);
  CHECK(text.find("(among 1 to 10) for the single label") != std::string::npos);

  const auto attachments = nlohmann::json::parse(slurp(base / "attachments.json"));
  REQUIRE(attachments.size() == 6);
  CHECK(attachments[0]["product"] == "TrueColor");
  CHECK(attachments[5]["product"] == "NDMI_B12");
  for (const auto& att : attachments) {
    CHECK(std::filesystem::exists(base / att["file"].get<std::string>()));
    CHECK(att["width"] == 64);
  }
}

TEST_CASE("mock truth eval closes the loop at F1 1.0") {
  TempDir tmp("evaltruth");
  const auto manifest = testing::write_synthetic_dataset(tmp.path / "ds", "bigearthnet", 6, 7);
  const auto result =
      run_eval(mock_eval_config(manifest, Dataset::BigEarthNet43, tmp.path / "out"));
  CHECK(result.report.n_records == 6);
  CHECK(result.report.n_parse_failures == 0);
  CHECK(result.report.sample.f1 == 1.0);
  CHECK(result.report.micro.f1 == 1.0);
  CHECK(result.report.macro.f1 == 1.0);
  CHECK_FALSE(result.report.accuracy.has_value());

  // records file is sorted by patch id and carries the spec fields
  std::istringstream lines(slurp(result.records_path));
  std::string line;
  std::string prev_id;
  int n = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    const std::string id = j.at("patch_id");
    CHECK(prev_id < id);
    prev_id = id;
    CHECK(j.contains("truth"));
    CHECK(j.contains("predicted"));
    CHECK(j.contains("raw_text"));
    CHECK(j.contains("parse_mode"));
    CHECK(j.contains("backend_id"));
    CHECK(j.contains("latency_ms"));
    ++n;
  }
  CHECK(n == 6);
}

TEST_CASE("mock truth eval on the 19-class task maps labels") {
  TempDir tmp("eval19");
  const auto manifest = testing::write_synthetic_dataset(tmp.path / "ds", "bigearthnet", 6, 11);
  const auto result =
      run_eval(mock_eval_config(manifest, Dataset::BigEarthNet19, tmp.path / "out"));
  // patches whose labels all fall in dropped classes get skipped
  CHECK(result.report.n_records + result.n_skipped_empty_truth == 6);
  CHECK(result.report.sample.f1 == 1.0);
  const auto metrics = nlohmann::json::parse(slurp(result.metrics_path));
  CHECK(metrics.at("task") == "bigearthnet19");
  CHECK(metrics.at("per_class").size() == 19);
}

TEST_CASE("empty backend scores zero and counts parse failures") {
  TempDir tmp("evalempty");
  const auto manifest = testing::write_synthetic_dataset(tmp.path / "ds", "bigearthnet", 5, 8);
  const auto result = run_eval(
      mock_eval_config(manifest, Dataset::BigEarthNet43, tmp.path / "out", "mock-empty"));
  CHECK(result.report.sample.f1 == 0.0);
  CHECK(result.report.micro.f1 == 0.0);
  CHECK(result.report.n_parse_failures == 5);
}

TEST_CASE("eurosat eval with a canned fixture reaches the expected accuracy") {
  TempDir tmp("evalfixture");
  const auto manifest = testing::write_synthetic_dataset(tmp.path / "ds", "eurosat", 10, 21);

  // read truths, answer 7 correctly and 3 wrongly
  const auto loaded = load_manifest(manifest);
  nlohmann::json fixture;
  int correct = 0;
  for (const auto& dir : loaded.patches) {
    const Patch patch = load_patch(dir);
    const int truth = *patch.labels.begin();
    if (correct < 7) {
      fixture[patch.id] = "(" + std::to_string(truth) + ")";
      ++correct;
    } else {
      fixture[patch.id] = "(" + std::to_string(truth == 10 ? 1 : truth + 1) + ")";
    }
  }
  const auto fixture_path = tmp.path / "answers.json";
  std::ofstream(fixture_path) << fixture.dump(2);

  auto config = mock_eval_config(manifest, Dataset::EuroSat10, tmp.path / "out",
                                 "mock-fixture");
  config.backend.fixture_file = fixture_path;
  config.modality = Modality::RgbOnly;
  const auto result = run_eval(config);
  REQUIRE(result.report.accuracy.has_value());
  CHECK(*result.report.accuracy == doctest::Approx(0.7));
}

TEST_CASE("eval records are deterministic modulo latency and caching works") {
  TempDir tmp("evaldet");
  const auto manifest = testing::write_synthetic_dataset(tmp.path / "ds", "bigearthnet", 4, 3);

  auto config = mock_eval_config(manifest, Dataset::BigEarthNet43, tmp.path / "out1");
  config.backend.cache_dir = tmp.path / "cache";
  const auto first = run_eval(config);
  CHECK(first.n_cache_hits == 0);
  CHECK(first.n_backend_calls == 4);
  const auto digest1 = records_content_digest(first.records_path);

  // cold rerun into a different directory, warm cache: zero backend calls
  auto config2 = config;
  config2.out_dir = tmp.path / "out2";
  const auto second = run_eval(config2);
  CHECK(second.n_backend_calls == 0);
  CHECK(second.n_cache_hits == 4);
  CHECK(records_content_digest(second.records_path) == digest1);
}

TEST_CASE("eval resumes from a partial records file") {
  TempDir tmp("evalresume");
  const auto manifest = testing::write_synthetic_dataset(tmp.path / "ds", "bigearthnet", 5, 13);

  auto config = mock_eval_config(manifest, Dataset::BigEarthNet43, tmp.path / "out");
  const auto first = run_eval(config);
  CHECK(first.n_evaluated == 5);

  // drop the last two lines to fake an interrupted run
  std::istringstream lines(slurp(first.records_path));
  std::string line, kept;
  int n = 0;
  while (std::getline(lines, line)) {
    if (n++ < 3) kept += line + "\n";
  }
  std::ofstream(first.records_path) << kept;

  const auto resumed = run_eval(config);
  CHECK(resumed.n_resumed == 3);
  CHECK(resumed.n_evaluated == 2);
  CHECK(resumed.report.n_records == 5);
  CHECK(records_content_digest(first.records_path) ==
        records_content_digest(resumed.records_path));
}

TEST_CASE("eval validates task/manifest combinations") {
  TempDir tmp("evalbadtask");
  const auto manifest = testing::write_synthetic_dataset(tmp.path / "ds", "eurosat", 2, 2);
  CHECK_THROWS_AS(
      run_eval(mock_eval_config(manifest, Dataset::BigEarthNet43, tmp.path / "out")), Error);

  auto config = mock_eval_config(manifest, Dataset::EuroSat10, tmp.path / "out");
  config.modality = Modality::RgbOnly;
  config.products = {ProductId::TrueColor, ProductId::NDVI};
  CHECK_THROWS_AS(run_eval(config), Error);

  auto no_truecolor = mock_eval_config(manifest, Dataset::EuroSat10, tmp.path / "out");
  no_truecolor.products = {ProductId::NDVI};
  CHECK_THROWS_AS(run_eval(no_truecolor), Error);
}

TEST_CASE("subset evaluation is seed stable") {
  TempDir tmp("evalsubset");
  const auto manifest = testing::write_synthetic_dataset(tmp.path / "ds", "bigearthnet", 8, 17);
  auto config = mock_eval_config(manifest, Dataset::BigEarthNet43, tmp.path / "a");
  config.subset = SubsetSpec{3, 42};
  const auto a = run_eval(config);
  CHECK(a.report.n_records == 3);

  config.out_dir = tmp.path / "b";
  const auto b = run_eval(config);
  CHECK(records_content_digest(a.records_path) == records_content_digest(b.records_path));
}

TEST_CASE("import, render, eval, report end to end via source layouts") {
  TempDir tmp("import");

  // synthesize an eurosat-style source tree: 3 classes x 2 files
  const char* classes[3] = {"Forest", "River", "Pasture"};
  for (int c = 0; c < 3; ++c) {
    const auto class_dir = tmp.path / "src" / classes[c];
    std::filesystem::create_directories(class_dir);
    for (int i = 0; i < 2; ++i) {
      std::vector<std::vector<std::uint16_t>> planes;
      for (int s = 0; s < 13; ++s) {
        std::vector<std::uint16_t> plane(64 * 64);
        SplitMix64 rng(c * 100 + i * 10 + s);
        for (auto& v : plane) v = static_cast<std::uint16_t>(rng.next() % 4000);
        planes.push_back(std::move(plane));
      }
      write_tiff_u16(class_dir / (std::string(classes[c]) + "_" + std::to_string(i) + ".tif"),
                     64, 64, planes);
    }
  }

  const auto import_result = run_import({tmp.path / "src", tmp.path / "ds", "eurosat", false});
  CHECK(import_result.n_imported == 6);
  CHECK(import_result.n_skipped == 0);

  auto config = mock_eval_config(import_result.manifest_path, Dataset::EuroSat10,
                                 tmp.path / "run1");
  config.run_label = "ms-run";
  const auto eval_ms = run_eval(config);
  REQUIRE(eval_ms.report.accuracy.has_value());
  CHECK(*eval_ms.report.accuracy == 1.0);

  auto rgb_config = config;
  rgb_config.modality = Modality::RgbOnly;
  rgb_config.products.clear();
  rgb_config.out_dir = tmp.path / "run2";
  rgb_config.run_label = "rgb-run";
  const auto eval_rgb = run_eval(rgb_config);

  run_report({eval_rgb.metrics_path, eval_ms.metrics_path}, std::string("rgb-run"),
             tmp.path / "cmp");
  const std::string md = slurp(tmp.path / "cmp.md");
  CHECK(md.find("ms-run") != std::string::npos);
  CHECK(md.find("rgb-run") != std::string::npos);
  CHECK(md.find("accuracy") != std::string::npos);
  const std::string csv = slurp(tmp.path / "cmp.csv");
  CHECK(csv.find("delta_accuracy") != std::string::npos);
  CHECK(csv.find("+0.000") != std::string::npos);  // both runs hit 1.0

  // mismatched tasks across runs must error
  TempDir tmp2("importben");
  const auto ben_manifest =
      testing::write_synthetic_dataset(tmp2.path / "ds", "bigearthnet", 2, 30);
  const auto ben_eval =
      run_eval(mock_eval_config(ben_manifest, Dataset::BigEarthNet43, tmp2.path / "run"));
  CHECK_THROWS_AS(
      run_report({eval_ms.metrics_path, ben_eval.metrics_path}, std::nullopt, tmp.path / "bad"),
      Error);
}

TEST_CASE("import skip-bad skips corrupt patches and warns") {
  TempDir tmp("skipbad");
  const auto forest = tmp.path / "src" / "Forest";
  std::filesystem::create_directories(forest);
  std::vector<std::vector<std::uint16_t>> planes;
  for (int s = 0; s < 13; ++s) planes.push_back(std::vector<std::uint16_t>(64 * 64, s));
  write_tiff_u16(forest / "Forest_0.tif", 64, 64, planes);
  // corrupt: only 12 planes
  planes.pop_back();
  write_tiff_u16(forest / "Forest_1.tif", 64, 64, planes);

  CHECK_THROWS_WITH_AS(
      static_cast<void>(run_import({tmp.path / "src", tmp.path / "ds1", "eurosat", false})),
      doctest::Contains("Forest_1"), Error);

  const auto result = run_import({tmp.path / "src", tmp.path / "ds2", "eurosat", true});
  CHECK(result.n_imported == 1);
  CHECK(result.n_skipped == 1);
  REQUIRE(result.warnings.size() == 1);
  CHECK(result.warnings[0].find("Forest_1") != std::string::npos);
}
