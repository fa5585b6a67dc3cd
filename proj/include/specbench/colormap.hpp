#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace specbench {

/// Piecewise-linear colormap over a closed value domain. Control points are
/// spaced evenly across [lo, hi]; inputs outside the domain clamp to the
/// nearest endpoint.
class Colormap {
 public:
  Colormap(std::vector<std::array<float, 3>> control_points, float domain_lo,
           float domain_hi);

  /// Interpolated color in [0,1]^3.
  std::array<float, 3> map(float value) const;

  /// Interpolated color byte-scaled per channel (round, ties away from zero).
  std::array<std::uint8_t, 3> map_byte(float value) const;

  const std::vector<std::array<float, 3>>& control_points() const { return points_; }
  float domain_lo() const { return lo_; }
  float domain_hi() const { return hi_; }

 private:
  std::vector<std::array<float, 3>> points_;
  float lo_;
  float hi_;
};

/// Red -> yellow -> green over [-1, 1].
const Colormap& ndvi_colormap();
/// White -> white -> blue over [-0.8, 0.8].
const Colormap& ndwi_colormap();
/// Red -> green -> blue over [-1, 1].
const Colormap& ndmi_colormap();

}  // namespace specbench
