#include "specbench/colormap.hpp"

#include <algorithm>
#include <cmath>

#include "specbench/error.hpp"
#include "specbench/raster.hpp"

namespace specbench {

Colormap::Colormap(std::vector<std::array<float, 3>> control_points,
                   float domain_lo, float domain_hi)
    : points_(std::move(control_points)), lo_(domain_lo), hi_(domain_hi) {
  if (points_.size() < 2) throw Error("colormap needs at least 2 control points");
  if (!(lo_ < hi_)) throw Error("colormap domain must satisfy lo < hi");
  for (const auto& p : points_) {
    for (float c : p) {
      if (!(c >= 0.0f && c <= 1.0f)) throw Error("colormap component outside [0, 1]");
    }
  }
}

std::array<float, 3> Colormap::map(float value) const {
  const float v = std::clamp(value, lo_, hi_);
  const float t = (v - lo_) / (hi_ - lo_);
  const std::size_t segments = points_.size() - 1;
  const float pos = t * static_cast<float>(segments);
  std::size_t i = std::min(static_cast<std::size_t>(pos), segments - 1);
  const float f = pos - static_cast<float>(i);

  std::array<float, 3> out;
  for (int c = 0; c < 3; ++c) {
    out[c] = points_[i][c] + (points_[i + 1][c] - points_[i][c]) * f;
  }
  return out;
}

std::array<std::uint8_t, 3> Colormap::map_byte(float value) const {
  const auto rgb = map(value);
  return {to_byte(rgb[0]), to_byte(rgb[1]), to_byte(rgb[2])};
}

const Colormap& ndvi_colormap() {
  static const Colormap cmap({{1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, -1.0f, 1.0f);
  return cmap;
}

const Colormap& ndwi_colormap() {
  static const Colormap cmap({{1, 1, 1}, {1, 1, 1}, {0, 0, 1}}, -0.8f, 0.8f);
  return cmap;
}

const Colormap& ndmi_colormap() {
  static const Colormap cmap({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, -1.0f, 1.0f);
  return cmap;
}

}  // namespace specbench
