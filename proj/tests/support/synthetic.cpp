#include "synthetic.hpp"

#include <unistd.h>

#include <atomic>

#include "specbench/prompts.hpp"

namespace specbench::testing {

namespace {

std::vector<std::uint8_t> u16_bytes(const std::vector<float>& values) {
  std::vector<std::uint8_t> out(values.size() * 2);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto v = static_cast<std::uint16_t>(values[i]);
    out[i * 2] = static_cast<std::uint8_t>(v & 0xFF);
    out[i * 2 + 1] = static_cast<std::uint8_t>(v >> 8);
  }
  return out;
}

int bigearthnet_size(int resolution_m) {
  switch (resolution_m) {
    case 10: return 120;
    case 20: return 60;
    default: return 20;
  }
}

}  // namespace

TempDir::TempDir(const std::string& hint) {
  static std::atomic<unsigned> counter{0};
  path = std::filesystem::temp_directory_path() /
         ("specbench_" + hint + "_" + std::to_string(::getpid()) + "_" +
          std::to_string(counter.fetch_add(1)));
  std::filesystem::create_directories(path);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path, ec);
}

BandGrid random_grid(int width, int height, int resolution_m, std::uint64_t seed,
                     float lo, float hi) {
  SplitMix64 rng(seed);
  BandGrid grid;
  grid.width = width;
  grid.height = height;
  grid.resolution_m = resolution_m;
  grid.values.resize(static_cast<std::size_t>(width) * height);
  for (auto& v : grid.values) {
    const double u = static_cast<double>(rng.next() >> 11) / 9007199254740992.0;  // [0,1)
    v = lo + static_cast<float>(u * (hi - lo));
    v = static_cast<float>(static_cast<std::uint16_t>(v));  // keep u16-representable
  }
  return grid;
}

Patch synthetic_bigearthnet_patch(const std::string& id, std::uint64_t seed,
                                  std::set<int> labels) {
  Patch patch;
  patch.id = id;
  patch.dataset = "bigearthnet";
  patch.labels = std::move(labels);
  std::uint64_t band_seed = seed;
  for (BandId band : kAllBands) {
    const int res = band_resolution_m(band);
    const int size = bigearthnet_size(res);
    patch.bands.emplace(band, random_grid(size, size, res, ++band_seed));
  }
  return patch;
}

PatchBundle synthetic_bigearthnet_bundle(const std::string& id, std::uint64_t seed,
                                         std::set<int> labels) {
  const Patch patch = synthetic_bigearthnet_patch(id, seed, std::move(labels));
  PatchBundle bundle;
  bundle.id = patch.id;
  bundle.dataset = patch.dataset;
  bundle.labels = patch.labels;
  for (const auto& [band, grid] : patch.bands) {
    BundleBand b;
    b.band = band;
    b.width = grid.width;
    b.height = grid.height;
    b.resolution_m = grid.resolution_m;
    b.dtype = "u16";
    b.file = std::string(band_name(band)) + ".bin";
    b.payload = u16_bytes(grid.values);
    bundle.bands.push_back(std::move(b));
  }
  return bundle;
}

PatchBundle synthetic_eurosat_bundle(const std::string& id, std::uint64_t seed, int label) {
  PatchBundle bundle;
  bundle.id = id;
  bundle.dataset = "eurosat";
  bundle.labels = {label};
  std::uint64_t band_seed = seed;
  for (BandId band : kAllBands) {
    const BandGrid grid = random_grid(64, 64, band_resolution_m(band), ++band_seed);
    BundleBand b;
    b.band = band;
    b.width = grid.width;
    b.height = grid.height;
    b.resolution_m = grid.resolution_m;
    b.dtype = "u16";
    b.file = std::string(band_name(band)) + ".bin";
    b.payload = u16_bytes(grid.values);
    bundle.bands.push_back(std::move(b));
  }
  return bundle;
}

std::filesystem::path write_synthetic_dataset(const std::filesystem::path& dir,
                                              const std::string& kind, int n,
                                              std::uint64_t seed) {
  DatasetManifest manifest;
  SplitMix64 rng(seed);
  if (kind == "bigearthnet") {
    manifest.dataset = "bigearthnet";
    manifest.multi_label = true;
    manifest.class_names = task_spec(Dataset::BigEarthNet43).class_names;
  } else {
    manifest.dataset = "eurosat";
    manifest.multi_label = false;
    manifest.class_names = task_spec(Dataset::EuroSat10).class_names;
  }

  for (int i = 0; i < n; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "patch_%03d", i);
    const std::uint64_t patch_seed = rng.next();
    PatchBundle bundle;
    if (kind == "bigearthnet") {
      // 1-3 labels per patch
      std::set<int> labels;
      const int n_labels = 1 + static_cast<int>(patch_seed % 3);
      SplitMix64 label_rng(patch_seed);
      while (static_cast<int>(labels.size()) < n_labels) {
        labels.insert(1 + static_cast<int>(label_rng.next() % 43));
      }
      bundle = synthetic_bigearthnet_bundle(id, patch_seed, labels);
    } else {
      bundle = synthetic_eurosat_bundle(id, patch_seed,
                                        1 + static_cast<int>(patch_seed % 10));
    }
    const auto bundle_dir = dir / "bundles" / id;
    write_bundle(bundle_dir, bundle);
    manifest.patches.push_back(bundle_dir);
  }
  const auto manifest_path = dir / "manifest.json";
  save_manifest(manifest_path, manifest);
  return manifest_path;
}

}  // namespace specbench::testing
