#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "specbench/colormap.hpp"
#include "specbench/raster.hpp"

namespace specbench {

/// The six pseudo-image products fed to the model.
enum class ProductId {
  TrueColor,
  FalseColor,
  NDVI,
  NDWI,
  NDMI_B11,
  NDMI_B12,
};

std::string_view product_name(ProductId id);
std::optional<ProductId> product_from_name(std::string_view name);

/// Default product set, in prompt order.
std::span<const ProductId> default_products();

struct CompositeRecipe {
  BandId r;
  BandId g;
  BandId b;
};

struct IndexRecipe {
  BandId plus;
  BandId minus;
  const Colormap* colormap;
};

struct ProductSpec {
  ProductId id;
  std::variant<CompositeRecipe, IndexRecipe> recipe;
};

const ProductSpec& product_spec(ProductId id);

/// Bands a product reads from.
std::vector<BandId> product_bands(ProductId id);

/// RGB8 raster, row-major, 3 bytes per pixel.
struct PseudoImage {
  ProductId product = ProductId::TrueColor;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
};

/// Elementwise (plus - minus) / (plus + minus); 0 where the denominator is 0.
/// Output lies in [-1, 1] for non-negative inputs. Throws on shape mismatch.
BandGrid normalized_difference(const BandGrid& plus, const BandGrid& minus);

/// Renders an index grid through a colormap (clamp to domain, piecewise-linear
/// interpolation, byte scaling per channel).
PseudoImage apply_colormap(ProductId id, const BandGrid& index, const Colormap& cmap);

/// Normalizes each band independently, byte-scales, stacks as R,G,B.
PseudoImage compose_rgb(ProductId id, const BandGrid& r, const BandGrid& g,
                        const BandGrid& b, const NormalizationSpec& normalization);

/// Renders the selected products in selection order. Each product keeps the
/// native grid of its source bands (no resampling). Throws when the patch
/// lacks a required band, naming band and product.
std::vector<PseudoImage> render_products(const Patch& patch,
                                         std::span<const ProductId> selection,
                                         const NormalizationSpec& normalization);

}  // namespace specbench
