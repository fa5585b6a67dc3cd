#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "specbench/answers.hpp"
#include "specbench/colormap.hpp"
#include "specbench/dataset.hpp"
#include "specbench/error.hpp"
#include "specbench/metrics.hpp"
#include "specbench/png_io.hpp"
#include "specbench/products.hpp"
#include "specbench/prompts.hpp"

namespace py = pybind11;
using namespace specbench;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

BandGrid grid_from_array(const FloatArray& arr, int resolution_m = 10) {
  if (arr.ndim() != 2) throw Error("expected a 2-D array");
  BandGrid grid;
  grid.height = static_cast<int>(arr.shape(0));
  grid.width = static_cast<int>(arr.shape(1));
  grid.resolution_m = resolution_m;
  grid.values.assign(arr.data(), arr.data() + arr.size());
  return grid;
}

py::array_t<float> array_from_grid(const BandGrid& grid) {
  py::array_t<float> out({grid.height, grid.width});
  std::copy(grid.values.begin(), grid.values.end(), out.mutable_data());
  return out;
}

py::array_t<std::uint8_t> array_from_image(const PseudoImage& image) {
  py::array_t<std::uint8_t> out({image.height, image.width, 3});
  std::copy(image.pixels.begin(), image.pixels.end(), out.mutable_data());
  return out;
}

NormalizationSpec normalization_spec(const std::string& method, double lo, double hi) {
  auto kind = normalization_from_name(method);
  if (!kind) throw Error("unknown normalization \"" + method + "\"");
  return {*kind, lo, hi};
}

ProductId product_id(const std::string& name) {
  auto id = product_from_name(name);
  if (!id) throw Error("unknown product \"" + name + "\"");
  return *id;
}

Dataset dataset_id(const std::string& name) {
  auto d = dataset_from_name(name);
  if (!d) throw Error("unknown task \"" + name + "\"");
  return *d;
}

std::vector<ProductId> product_ids(const std::vector<std::string>& names) {
  std::vector<ProductId> out;
  for (const auto& n : names) out.push_back(product_id(n));
  return out;
}

py::dict parsed_to_dict(const ParsedAnswer& parsed) {
  py::dict out;
  out["indices"] = std::vector<int>(parsed.indices.begin(), parsed.indices.end());
  out["mode"] = std::string(parse_mode_name(parsed.mode));
  out["failed"] = parsed.failed;
  out["warnings"] = parsed.warnings;
  return out;
}

py::dict prf_to_dict(const PrfTriple& prf) {
  py::dict out;
  out["precision"] = prf.precision;
  out["recall"] = prf.recall;
  out["f1"] = prf.f1;
  return out;
}

}  // namespace

PYBIND11_MODULE(_specbench, m) {
  m.doc() = "Multi-spectral pseudo-image rendering, prompting and scoring";
  m.attr("__version__") = "0.1.0";

  py::register_exception<Error>(m, "SpecbenchError");

  m.def(
      "normalize_band",
      [](const FloatArray& values, const std::string& method, double lo, double hi) {
        return array_from_grid(normalize_band(grid_from_array(values),
                                              normalization_spec(method, lo, hi)));
      },
      py::arg("values"), py::arg("method") = "minmax", py::arg("lo_percentile") = 2.0,
      py::arg("hi_percentile") = 98.0,
      "Rescale a band into [0, 1]; constant bands map to zeros.");

  m.def(
      "to_byte",
      [](const FloatArray& values) {
        const BandGrid grid = grid_from_array(values);
        const auto bytes = to_byte(grid);
        py::array_t<std::uint8_t> out({grid.height, grid.width});
        std::copy(bytes.begin(), bytes.end(), out.mutable_data());
        return out;
      },
      py::arg("values"), "Byte-scale unit-range values (round, ties away from zero).");

  m.def(
      "normalized_difference",
      [](const FloatArray& plus, const FloatArray& minus) {
        return array_from_grid(
            normalized_difference(grid_from_array(plus), grid_from_array(minus)));
      },
      py::arg("plus"), py::arg("minus"),
      "(plus - minus) / (plus + minus), 0 where the denominator is 0.");

  m.def(
      "apply_colormap",
      [](const FloatArray& index, const std::string& product) {
        const ProductId id = product_id(product);
        const auto& spec = product_spec(id);
        const auto* recipe = std::get_if<IndexRecipe>(&spec.recipe);
        if (!recipe) throw Error("product " + product + " is not an index product");
        return array_from_image(apply_colormap(id, grid_from_array(index), *recipe->colormap));
      },
      py::arg("index"), py::arg("product"),
      "Render an index grid through a product's colormap to HxWx3 bytes.");

  m.def(
      "compose_rgb",
      [](const FloatArray& r, const FloatArray& g, const FloatArray& b,
         const std::string& method, double lo, double hi) {
        return array_from_image(compose_rgb(ProductId::TrueColor, grid_from_array(r),
                                            grid_from_array(g), grid_from_array(b),
                                            normalization_spec(method, lo, hi)));
      },
      py::arg("r"), py::arg("g"), py::arg("b"), py::arg("method") = "minmax",
      py::arg("lo_percentile") = 2.0, py::arg("hi_percentile") = 98.0,
      "Normalize three bands independently and stack them as RGB bytes.");

  m.def(
      "render_bundle",
      [](const std::filesystem::path& bundle_dir, const std::vector<std::string>& products,
         const std::string& method, double lo, double hi) {
        const Patch patch = load_patch(bundle_dir);
        std::vector<ProductId> selection = product_ids(products);
        if (selection.empty()) {
          selection.assign(default_products().begin(), default_products().end());
        }
        const auto images =
            render_products(patch, selection, normalization_spec(method, lo, hi));
        py::list out;
        for (const auto& image : images) {
          out.append(py::make_tuple(std::string(product_name(image.product)),
                                    array_from_image(image)));
        }
        return out;
      },
      py::arg("bundle_dir"), py::arg("products") = std::vector<std::string>{},
      py::arg("method") = "minmax", py::arg("lo_percentile") = 2.0,
      py::arg("hi_percentile") = 98.0,
      "Load a patch bundle and render (product, HxWx3 array) pairs.");

  m.def(
      "encode_png",
      [](const py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>& rgb) {
        if (rgb.ndim() != 3 || rgb.shape(2) != 3) throw Error("expected an HxWx3 array");
        const auto png = encode_png(static_cast<int>(rgb.shape(1)),
                                    static_cast<int>(rgb.shape(0)),
                                    {rgb.data(), static_cast<std::size_t>(rgb.size())});
        return py::bytes(reinterpret_cast<const char*>(png.data()), png.size());
      },
      py::arg("rgb"), "Encode HxWx3 bytes as a deterministic RGB8 PNG.");

  m.def(
      "prompt_text",
      [](const std::string& task, const std::string& modality,
         const std::vector<std::string>& products) {
        auto mod = modality_from_name(modality);
        if (!mod) throw Error("unknown modality \"" + modality + "\"");
        std::vector<ProductId> selection = product_ids(products);
        if (selection.empty()) {
          if (*mod == Modality::MultiSpectral) {
            selection.assign(default_products().begin(), default_products().end());
          } else {
            selection = {ProductId::TrueColor};
          }
        }
        return prompt_text(task_spec(dataset_id(task)), *mod, selection);
      },
      py::arg("task"), py::arg("modality"),
      py::arg("products") = std::vector<std::string>{},
      "Exact prompt text for a task/modality and product selection.");

  m.def("band_glossary", &band_glossary, "The 12-line band description block.");

  m.def(
      "class_names",
      [](const std::string& task) { return task_spec(dataset_id(task)).class_names; },
      py::arg("task"));

  m.def(
      "parse_answer",
      [](const std::string& text, int n_classes, bool multi_label) {
        return parsed_to_dict(parse_answer(text, n_classes, multi_label));
      },
      py::arg("text"), py::arg("n_classes"), py::arg("multi_label"),
      "Parse a \"(k)\" answer; lenient fallback, never raises on bad input.");

  m.def(
      "format_answer",
      [](const std::vector<int>& indices) {
        return format_answer(std::set<int>(indices.begin(), indices.end()));
      },
      py::arg("indices"));

  m.def(
      "sample_prf",
      [](const std::vector<int>& predicted, const std::vector<int>& truth) {
        const auto prf = sample_prf(std::set<int>(predicted.begin(), predicted.end()),
                                    std::set<int>(truth.begin(), truth.end()));
        return py::make_tuple(prf.precision, prf.recall, prf.f1);
      },
      py::arg("predicted"), py::arg("truth"));

  m.def(
      "aggregate",
      [](const std::vector<std::pair<std::vector<int>, std::vector<int>>>& cases,
         int n_classes, bool multi_label) {
        std::vector<PredictionRecord> records;
        for (std::size_t i = 0; i < cases.size(); ++i) {
          PredictionRecord rec;
          rec.patch_id = "record_" + std::to_string(100000 + i);
          rec.predicted.insert(cases[i].first.begin(), cases[i].first.end());
          rec.truth.insert(cases[i].second.begin(), cases[i].second.end());
          records.push_back(std::move(rec));
        }
        const auto report = aggregate(records, n_classes, multi_label);
        py::dict out;
        out["sample"] = prf_to_dict(report.sample);
        out["micro"] = prf_to_dict(report.micro);
        out["macro"] = prf_to_dict(report.macro);
        out["n_records"] = report.n_records;
        if (report.accuracy) out["accuracy"] = *report.accuracy;
        return out;
      },
      py::arg("cases"), py::arg("n_classes"), py::arg("multi_label") = true,
      "Aggregate (predicted, truth) pairs into sample/micro/macro P/R/F1.");

  m.def(
      "map_43_to_19",
      [](const std::vector<int>& indices) {
        const auto mapped =
            ClassMapping::bigearthnet_43_to_19().map(std::set<int>(indices.begin(), indices.end()));
        return std::vector<int>(mapped.begin(), mapped.end());
      },
      py::arg("indices"), "Apply the BigEarthNet 43 -> 19 nomenclature mapping.");

  m.def(
      "write_bundle",
      [](const std::filesystem::path& dir, const std::string& id, const std::string& dataset,
         const std::vector<int>& labels, const py::dict& bands) {
        PatchBundle bundle;
        bundle.id = id;
        bundle.dataset = dataset;
        bundle.labels.insert(labels.begin(), labels.end());
        for (const auto& item : bands) {
          const auto name = item.first.cast<std::string>();
          auto band = band_from_name(name);
          if (!band) throw Error("unknown band \"" + name + "\"");
          const auto arr = item.second.cast<
              py::array_t<std::uint16_t, py::array::c_style | py::array::forcecast>>();
          if (arr.ndim() != 2) throw Error("band arrays must be 2-D");
          BundleBand b;
          b.band = *band;
          b.height = static_cast<int>(arr.shape(0));
          b.width = static_cast<int>(arr.shape(1));
          b.resolution_m = band_resolution_m(*band);
          b.dtype = "u16";
          b.file = name + ".bin";
          b.payload.resize(static_cast<std::size_t>(arr.size()) * 2);
          for (py::ssize_t i = 0; i < arr.size(); ++i) {
            const std::uint16_t v = arr.data()[i];
            b.payload[i * 2] = static_cast<std::uint8_t>(v & 0xFF);
            b.payload[i * 2 + 1] = static_cast<std::uint8_t>(v >> 8);
          }
          bundle.bands.push_back(std::move(b));
        }
        write_bundle(dir, bundle);
      },
      py::arg("dir"), py::arg("id"), py::arg("dataset"), py::arg("labels"), py::arg("bands"),
      "Write a patch bundle from {band_name: uint16 HxW array}.");

  m.def(
      "read_bundle_labels",
      [](const std::filesystem::path& dir) {
        const auto bundle = read_bundle(dir);
        return std::vector<int>(bundle.labels.begin(), bundle.labels.end());
      },
      py::arg("dir"));

  m.def(
      "save_manifest",
      [](const std::filesystem::path& path, const std::string& dataset, bool multi_label,
         const std::vector<std::string>& classes,
         const std::vector<std::filesystem::path>& patches) {
        DatasetManifest manifest;
        manifest.dataset = dataset;
        manifest.multi_label = multi_label;
        manifest.class_names = classes;
        manifest.patches = patches;
        save_manifest(path, manifest);
      },
      py::arg("path"), py::arg("dataset"), py::arg("multi_label"), py::arg("classes"),
      py::arg("patches"));
}
