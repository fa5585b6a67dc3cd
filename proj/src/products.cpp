#include "specbench/products.hpp"

#include <array>
#include <string>

#include "specbench/error.hpp"

namespace specbench {

std::string_view product_name(ProductId id) {
  switch (id) {
    case ProductId::TrueColor: return "TrueColor";
    case ProductId::FalseColor: return "FalseColor";
    case ProductId::NDVI: return "NDVI";
    case ProductId::NDWI: return "NDWI";
    case ProductId::NDMI_B11: return "NDMI_B11";
    case ProductId::NDMI_B12: return "NDMI_B12";
  }
  throw Error("invalid ProductId");
}

std::optional<ProductId> product_from_name(std::string_view name) {
  static constexpr std::array<ProductId, 6> all = {
      ProductId::TrueColor, ProductId::FalseColor, ProductId::NDVI,
      ProductId::NDWI,      ProductId::NDMI_B11,   ProductId::NDMI_B12,
  };
  for (ProductId p : all) {
    if (product_name(p) == name) return p;
  }
  return std::nullopt;
}

std::span<const ProductId> default_products() {
  static constexpr std::array<ProductId, 6> order = {
      ProductId::TrueColor, ProductId::FalseColor, ProductId::NDVI,
      ProductId::NDWI,      ProductId::NDMI_B11,   ProductId::NDMI_B12,
  };
  return order;
}

const ProductSpec& product_spec(ProductId id) {
  static const ProductSpec true_color{
      ProductId::TrueColor, CompositeRecipe{BandId::B04, BandId::B03, BandId::B02}};
  static const ProductSpec false_color{
      ProductId::FalseColor, CompositeRecipe{BandId::B08, BandId::B04, BandId::B03}};
  static const ProductSpec ndvi{
      ProductId::NDVI, IndexRecipe{BandId::B08, BandId::B04, &ndvi_colormap()}};
  static const ProductSpec ndwi{
      ProductId::NDWI, IndexRecipe{BandId::B03, BandId::B08, &ndwi_colormap()}};
  static const ProductSpec ndmi_b11{
      ProductId::NDMI_B11, IndexRecipe{BandId::B8A, BandId::B11, &ndmi_colormap()}};
  static const ProductSpec ndmi_b12{
      ProductId::NDMI_B12, IndexRecipe{BandId::B8A, BandId::B12, &ndmi_colormap()}};
  switch (id) {
    case ProductId::TrueColor: return true_color;
    case ProductId::FalseColor: return false_color;
    case ProductId::NDVI: return ndvi;
    case ProductId::NDWI: return ndwi;
    case ProductId::NDMI_B11: return ndmi_b11;
    case ProductId::NDMI_B12: return ndmi_b12;
  }
  throw Error("invalid ProductId");
}

std::vector<BandId> product_bands(ProductId id) {
  const auto& spec = product_spec(id);
  if (const auto* c = std::get_if<CompositeRecipe>(&spec.recipe)) {
    return {c->r, c->g, c->b};
  }
  const auto& ix = std::get<IndexRecipe>(spec.recipe);
  return {ix.plus, ix.minus};
}

namespace {

void require_same_shape(const BandGrid& a, const BandGrid& b, const char* what) {
  if (a.width != b.width || a.height != b.height) {
    throw Error(std::string(what) + ": shape mismatch " + a.shape_string() +
                " vs " + b.shape_string());
  }
  if (a.resolution_m != b.resolution_m) {
    throw Error(std::string(what) + ": resolution mismatch " +
                std::to_string(a.resolution_m) + "m vs " +
                std::to_string(b.resolution_m) + "m");
  }
}

const BandGrid& require_band(const Patch& patch, BandId band, ProductId product) {
  auto it = patch.bands.find(band);
  if (it == patch.bands.end()) {
    throw Error("product " + std::string(product_name(product)) + " requires band " +
                std::string(band_name(band)) + " which is missing from patch " + patch.id);
  }
  return it->second;
}

}  // namespace

BandGrid normalized_difference(const BandGrid& plus, const BandGrid& minus) {
  require_same_shape(plus, minus, "normalized_difference");
  BandGrid out;
  out.width = plus.width;
  out.height = plus.height;
  out.resolution_m = plus.resolution_m;
  out.values.resize(plus.values.size());
  for (std::size_t i = 0; i < plus.values.size(); ++i) {
    const float denom = plus.values[i] + minus.values[i];
    out.values[i] = denom == 0.0f ? 0.0f : (plus.values[i] - minus.values[i]) / denom;
  }
  return out;
}

PseudoImage apply_colormap(ProductId id, const BandGrid& index, const Colormap& cmap) {
  PseudoImage img;
  img.product = id;
  img.width = index.width;
  img.height = index.height;
  img.pixels.resize(index.values.size() * 3);
  for (std::size_t i = 0; i < index.values.size(); ++i) {
    const auto rgb = cmap.map_byte(index.values[i]);
    img.pixels[i * 3 + 0] = rgb[0];
    img.pixels[i * 3 + 1] = rgb[1];
    img.pixels[i * 3 + 2] = rgb[2];
  }
  return img;
}

PseudoImage compose_rgb(ProductId id, const BandGrid& r, const BandGrid& g,
                        const BandGrid& b, const NormalizationSpec& normalization) {
  require_same_shape(r, g, "compose_rgb");
  require_same_shape(r, b, "compose_rgb");
  const auto rb = to_byte(normalize_band(r, normalization));
  const auto gb = to_byte(normalize_band(g, normalization));
  const auto bb = to_byte(normalize_band(b, normalization));

  PseudoImage img;
  img.product = id;
  img.width = r.width;
  img.height = r.height;
  img.pixels.resize(rb.size() * 3);
  for (std::size_t i = 0; i < rb.size(); ++i) {
    img.pixels[i * 3 + 0] = rb[i];
    img.pixels[i * 3 + 1] = gb[i];
    img.pixels[i * 3 + 2] = bb[i];
  }
  return img;
}

std::vector<PseudoImage> render_products(const Patch& patch,
                                         std::span<const ProductId> selection,
                                         const NormalizationSpec& normalization) {
  std::vector<PseudoImage> out;
  out.reserve(selection.size());
  for (ProductId id : selection) {
    const auto& spec = product_spec(id);
    if (const auto* c = std::get_if<CompositeRecipe>(&spec.recipe)) {
      out.push_back(compose_rgb(id, require_band(patch, c->r, id),
                                require_band(patch, c->g, id),
                                require_band(patch, c->b, id), normalization));
    } else {
      const auto& ix = std::get<IndexRecipe>(spec.recipe);
      const BandGrid index = normalized_difference(require_band(patch, ix.plus, id),
                                                   require_band(patch, ix.minus, id));
      out.push_back(apply_colormap(id, index, *ix.colormap));
    }
  }
  return out;
}

}  // namespace specbench
