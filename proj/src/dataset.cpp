#include "specbench/dataset.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "specbench/error.hpp"
#include "specbench/prompts.hpp"
#include "tiff_io.hpp"

namespace specbench {

using nlohmann::ordered_json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return data;
}

void write_file(const std::filesystem::path& path, std::string_view data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!f) throw Error("failed writing " + path.string());
}

int expected_bigearthnet_size(int resolution_m) {
  switch (resolution_m) {
    case 10: return 120;
    case 20: return 60;
    case 60: return 20;
  }
  throw Error("unexpected band resolution " + std::to_string(resolution_m));
}

int resolve_label(const std::string& name, const std::vector<std::string>& class_names) {
  for (std::size_t i = 0; i < class_names.size(); ++i) {
    if (class_names[i] == name) return static_cast<int>(i) + 1;
  }
  throw Error("label name not in class list: \"" + name + "\"");
}

std::vector<std::uint8_t> u16_payload(const std::vector<std::uint16_t>& values) {
  std::vector<std::uint8_t> bytes(values.size() * 2);
  for (std::size_t i = 0; i < values.size(); ++i) {
    bytes[i * 2] = static_cast<std::uint8_t>(values[i] & 0xFF);
    bytes[i * 2 + 1] = static_cast<std::uint8_t>(values[i] >> 8);
  }
  return bytes;
}

}  // namespace

std::size_t BundleBand::dtype_size() const {
  if (dtype == "u16") return 2;
  if (dtype == "f32") return 4;
  throw Error("unknown band dtype \"" + dtype + "\"");
}

void write_bundle(const std::filesystem::path& dir, const PatchBundle& bundle) {
  std::set<BandId> seen;
  for (const auto& band : bundle.bands) {
    if (!seen.insert(band.band).second) {
      throw Error("bundle " + bundle.id + " lists band " +
                  std::string(band_name(band.band)) + " twice");
    }
  }
  std::filesystem::create_directories(dir);
  ordered_json meta;
  meta["id"] = bundle.id;
  meta["dataset"] = bundle.dataset;
  meta["labels"] = bundle.labels;
  meta["bands"] = ordered_json::array();
  for (const auto& band : bundle.bands) {
    if (band.payload.size() != static_cast<std::size_t>(band.width) * band.height *
                                   band.dtype_size()) {
      throw Error("band " + std::string(band_name(band.band)) + " payload size mismatch");
    }
    ordered_json b;
    b["band_id"] = band_name(band.band);
    b["width"] = band.width;
    b["height"] = band.height;
    b["resolution_m"] = band.resolution_m;
    b["dtype"] = band.dtype;
    b["file"] = band.file;
    meta["bands"].push_back(b);
    write_file(dir / band.file,
               std::string_view(reinterpret_cast<const char*>(band.payload.data()),
                                band.payload.size()));
  }
  write_file(dir / "patch.json", meta.dump(2) + "\n");
}

PatchBundle read_bundle(const std::filesystem::path& dir) {
  const auto meta_path = dir / "patch.json";
  ordered_json meta;
  try {
    meta = ordered_json::parse(read_file(meta_path));
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid JSON in " + meta_path.string() + ": " + e.what());
  }

  PatchBundle bundle;
  bundle.id = meta.at("id").get<std::string>();
  bundle.dataset = meta.at("dataset").get<std::string>();
  for (int label : meta.at("labels")) {
    if (label < 1) throw Error("bundle " + bundle.id + " has non-positive label index");
    bundle.labels.insert(label);
  }

  std::set<BandId> seen;
  for (const auto& b : meta.at("bands")) {
    BundleBand band;
    const auto id_name = b.at("band_id").get<std::string>();
    auto id = band_from_name(id_name);
    if (!id) throw Error("bundle " + bundle.id + " names unknown band \"" + id_name + "\"");
    if (!seen.insert(*id).second) {
      throw Error("bundle " + bundle.id + " lists band " + id_name + " twice");
    }
    band.band = *id;
    band.width = b.at("width").get<int>();
    band.height = b.at("height").get<int>();
    band.resolution_m = b.at("resolution_m").get<int>();
    band.dtype = b.at("dtype").get<std::string>();
    band.file = b.at("file").get<std::string>();

    const std::string payload = read_file(dir / band.file);
    const std::size_t expected =
        static_cast<std::size_t>(band.width) * band.height * band.dtype_size();
    if (payload.size() != expected) {
      throw Error("bundle " + bundle.id + " band " + id_name + " payload is " +
                  std::to_string(payload.size()) + " bytes, expected " +
                  std::to_string(expected));
    }
    band.payload.assign(payload.begin(), payload.end());
    bundle.bands.push_back(std::move(band));
  }
  return bundle;
}

Patch to_patch(const PatchBundle& bundle) {
  Patch patch;
  patch.id = bundle.id;
  patch.dataset = bundle.dataset;
  patch.labels = bundle.labels;
  for (const auto& band : bundle.bands) {
    BandGrid grid;
    grid.width = band.width;
    grid.height = band.height;
    grid.resolution_m = band.resolution_m;
    if (grid.resolution_m != band_resolution_m(band.band)) {
      throw Error("band " + std::string(band_name(band.band)) + " stored at " +
                  std::to_string(grid.resolution_m) + "m, nominal is " +
                  std::to_string(band_resolution_m(band.band)) + "m");
    }
    const std::size_t count = static_cast<std::size_t>(band.width) * band.height;
    grid.values.resize(count);
    if (band.dtype == "u16") {
      for (std::size_t i = 0; i < count; ++i) {
        const std::uint16_t v = static_cast<std::uint16_t>(band.payload[i * 2]) |
                                (static_cast<std::uint16_t>(band.payload[i * 2 + 1]) << 8);
        grid.values[i] = static_cast<float>(v);
      }
    } else if (band.dtype == "f32") {
      static_assert(sizeof(float) == 4);
      std::memcpy(grid.values.data(), band.payload.data(), count * 4);
    } else {
      throw Error("unknown band dtype \"" + band.dtype + "\"");
    }
    validate_grid(grid);
    patch.bands.emplace(band.band, std::move(grid));
  }
  return patch;
}

Patch load_patch(const std::filesystem::path& dir) { return to_patch(read_bundle(dir)); }

PatchBundle import_bigearthnet_patch(const std::filesystem::path& source_dir) {
  if (!std::filesystem::is_directory(source_dir)) {
    throw Error("not a patch directory: " + source_dir.string());
  }
  const std::string stem = source_dir.filename().string();

  PatchBundle bundle;
  bundle.id = stem;
  bundle.dataset = "bigearthnet";

  for (BandId band : kAllBands) {
    const auto tif = source_dir / (stem + "_" + std::string(band_name(band)) + ".tif");
    if (!std::filesystem::exists(tif)) {
      throw Error("patch " + stem + " is missing band file " + tif.filename().string());
    }
    const TiffImage img = read_tiff_u16(tif);
    if (img.planes.size() != 1) {
      throw Error("band file " + tif.filename().string() + " has " +
                  std::to_string(img.planes.size()) + " samples, expected 1");
    }
    const int res = band_resolution_m(band);
    const int expected = expected_bigearthnet_size(res);
    if (img.width != expected || img.height != expected) {
      throw Error("patch " + stem + " band " + std::string(band_name(band)) + " is " +
                  std::to_string(img.width) + "x" + std::to_string(img.height) +
                  ", expected " + std::to_string(expected) + "x" + std::to_string(expected));
    }
    BundleBand out;
    out.band = band;
    out.width = img.width;
    out.height = img.height;
    out.resolution_m = res;
    out.dtype = "u16";
    out.file = std::string(band_name(band)) + ".bin";
    out.payload = u16_payload(img.planes[0]);
    bundle.bands.push_back(std::move(out));
  }

  const auto labels_path = source_dir / (stem + "_labels_metadata.json");
  ordered_json labels_meta;
  try {
    labels_meta = ordered_json::parse(read_file(labels_path));
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid JSON in " + labels_path.string() + ": " + e.what());
  }
  const auto& class_names = task_spec(Dataset::BigEarthNet43).class_names;
  for (const auto& name : labels_meta.at("labels")) {
    bundle.labels.insert(resolve_label(name.get<std::string>(), class_names));
  }
  return bundle;
}

std::array<std::string_view, 13> eurosat_channel_order() {
  return {"B01", "B02", "B03", "B04", "B05", "B06", "B07",
          "B08", "B8A", "B09", "B10", "B11", "B12"};
}

PatchBundle import_eurosat_patch(const std::filesystem::path& source_file) {
  const TiffImage img = read_tiff_u16(source_file);
  if (img.planes.size() != 13) {
    throw Error("band count is " + std::to_string(img.planes.size()) +
                " in " + source_file.string() + ", expected 13");
  }
  if (img.width != 64 || img.height != 64) {
    throw Error("EuroSat patch " + source_file.string() + " is " +
                std::to_string(img.width) + "x" + std::to_string(img.height) +
                ", expected 64x64");
  }

  PatchBundle bundle;
  bundle.id = source_file.stem().string();
  bundle.dataset = "eurosat";

  const auto order = eurosat_channel_order();
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto band = band_from_name(order[i]);
    if (!band) continue;  // B10 has no BandId; the cirrus plane is dropped
    BundleBand out;
    out.band = *band;
    out.width = img.width;
    out.height = img.height;
    out.resolution_m = band_resolution_m(*band);
    out.dtype = "u16";
    out.file = std::string(order[i]) + ".bin";
    out.payload = u16_payload(img.planes[i]);
    bundle.bands.push_back(std::move(out));
  }

  const std::string class_dir = source_file.parent_path().filename().string();
  const auto& class_names = task_spec(Dataset::EuroSat10).class_names;
  try {
    bundle.labels.insert(resolve_label(class_dir, class_names));
  } catch (const Error&) {
    throw Error("unknown class directory \"" + class_dir + "\" for " + source_file.string());
  }
  return bundle;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid JSON in " + path.string() + ": " + e.what());
  }
  DatasetManifest manifest;
  manifest.dataset = doc.at("dataset").get<std::string>();
  manifest.multi_label = doc.at("multi_label").get<bool>();
  for (const auto& c : doc.at("classes")) manifest.class_names.push_back(c.get<std::string>());

  const auto base = std::filesystem::absolute(path).parent_path();
  for (const auto& p : doc.at("patches")) {
    std::filesystem::path bundle_dir = p.get<std::string>();
    if (bundle_dir.is_relative()) bundle_dir = base / bundle_dir;
    if (!std::filesystem::exists(bundle_dir / "patch.json")) {
      throw Error("manifest " + path.string() + " lists missing bundle " +
                  bundle_dir.string());
    }
    manifest.patches.push_back(bundle_dir);
  }
  std::sort(manifest.patches.begin(), manifest.patches.end(),
            [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
  return manifest;
}

void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  const auto base = std::filesystem::absolute(path).parent_path();
  std::filesystem::create_directories(base);

  auto patches = manifest.patches;
  std::sort(patches.begin(), patches.end(),
            [](const auto& a, const auto& b) { return a.filename() < b.filename(); });

  ordered_json doc;
  doc["dataset"] = manifest.dataset;
  doc["multi_label"] = manifest.multi_label;
  doc["classes"] = manifest.class_names;
  doc["patches"] = ordered_json::array();
  for (const auto& p : patches) {
    const auto rel = std::filesystem::relative(std::filesystem::absolute(p), base);
    doc["patches"].push_back(rel.generic_string());
  }
  write_file(path, doc.dump(2) + "\n");
}

DatasetManifest sample_subset(const DatasetManifest& manifest, std::size_t n,
                              std::uint64_t seed) {
  if (n < 1 || n > manifest.patches.size()) {
    throw Error("subset size " + std::to_string(n) + " outside [1, " +
                std::to_string(manifest.patches.size()) + "]");
  }
  DatasetManifest out = manifest;
  auto& paths = out.patches;  // already sorted by id
  SplitMix64 rng(seed);
  for (std::size_t i = paths.size() - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next() % (i + 1));
    std::swap(paths[i], paths[j]);
  }
  paths.resize(n);
  return out;
}

}  // namespace specbench
