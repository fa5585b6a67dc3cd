#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "specbench/raster.hpp"

namespace specbench {

/// On-disk patch bundle: a directory holding `patch.json` plus one raw
/// binary file per band (row-major, little-endian, no header).
struct BundleBand {
  BandId band = BandId::B01;
  int width = 0;
  int height = 0;
  int resolution_m = 0;
  std::string dtype;  // "u16" or "f32"
  std::string file;   // payload file name relative to the bundle dir
  std::vector<std::uint8_t> payload;

  std::size_t dtype_size() const;
};

struct PatchBundle {
  std::string id;
  std::string dataset;
  std::set<int> labels;  // 1-based
  std::vector<BundleBand> bands;
};

void write_bundle(const std::filesystem::path& dir, const PatchBundle& bundle);
PatchBundle read_bundle(const std::filesystem::path& dir);

/// Decodes bundle payloads into 32-bit band grids.
Patch to_patch(const PatchBundle& bundle);
Patch load_patch(const std::filesystem::path& dir);

/// Imports one BigEarthNet-style patch directory: 12 single-band 16-bit TIFF
/// files named <dir>_<band>.tif at their native sizes plus
/// <dir>_labels_metadata.json with the label names. Label names resolve by
/// exact match against the 43-class list.
PatchBundle import_bigearthnet_patch(const std::filesystem::path& source_dir);

/// Imports one EuroSat multi-spectral file: a 13-band 64x64 16-bit TIFF whose
/// class is the parent directory name. The B10 (cirrus) plane is discarded.
PatchBundle import_eurosat_patch(const std::filesystem::path& source_file);

/// Channel order of EuroSat multi-spectral source files (wavelength order).
std::array<std::string_view, 13> eurosat_channel_order();

struct DatasetManifest {
  std::string dataset;
  bool multi_label = false;
  std::vector<std::string> class_names;
  std::vector<std::filesystem::path> patches;  // absolute bundle dirs, sorted by id
};

/// Loads a manifest JSON; relative patch paths resolve against the manifest's
/// directory. Throws when a listed bundle is missing.
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Saves with patch paths relative to the manifest's directory.
void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

/// SplitMix64 generator (Steele, Lea & Flood). State advances by the
/// golden-gamma constant 0x9E3779B97F4A7C15; mixing constants are
/// 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB with shifts 30/27/31.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Deterministic seeded subset: Fisher-Yates shuffle of the sorted patch list
/// driven by SplitMix64 (j = next() % (i+1), i from n-1 down to 1), then the
/// first n entries. Same (manifest, n, seed) always yields the same subset.
DatasetManifest sample_subset(const DatasetManifest& manifest, std::size_t n,
                              std::uint64_t seed);

}  // namespace specbench
