#include "specbench/raster.hpp"

#include <algorithm>
#include <cmath>

#include "specbench/error.hpp"

namespace specbench {

int band_resolution_m(BandId band) {
  switch (band) {
    case BandId::B02:
    case BandId::B03:
    case BandId::B04:
    case BandId::B08:
      return 10;
    case BandId::B05:
    case BandId::B06:
    case BandId::B07:
    case BandId::B8A:
    case BandId::B11:
    case BandId::B12:
      return 20;
    case BandId::B01:
    case BandId::B09:
      return 60;
  }
  throw Error("invalid BandId");
}

std::string_view band_name(BandId band) {
  switch (band) {
    case BandId::B01: return "B01";
    case BandId::B02: return "B02";
    case BandId::B03: return "B03";
    case BandId::B04: return "B04";
    case BandId::B05: return "B05";
    case BandId::B06: return "B06";
    case BandId::B07: return "B07";
    case BandId::B08: return "B08";
    case BandId::B8A: return "B8A";
    case BandId::B09: return "B09";
    case BandId::B11: return "B11";
    case BandId::B12: return "B12";
  }
  throw Error("invalid BandId");
}

std::optional<BandId> band_from_name(std::string_view name) {
  for (BandId b : kAllBands) {
    if (band_name(b) == name) return b;
  }
  return std::nullopt;
}

std::string BandGrid::shape_string() const {
  return std::to_string(width) + "x" + std::to_string(height);
}

void validate_grid(const BandGrid& grid) {
  if (grid.width <= 0 || grid.height <= 0) {
    throw Error("band grid has non-positive dimensions " + grid.shape_string());
  }
  if (grid.values.size() != static_cast<std::size_t>(grid.width) * grid.height) {
    throw Error("band grid has " + std::to_string(grid.values.size()) +
                " values, expected " + grid.shape_string());
  }
  for (float v : grid.values) {
    if (!std::isfinite(v) || v < 0.0f) {
      throw Error("band grid contains a non-finite or negative value");
    }
  }
}

std::string_view normalization_name(NormalizationKind kind) {
  return kind == NormalizationKind::MinMax ? "minmax" : "percentile";
}

std::optional<NormalizationKind> normalization_from_name(std::string_view name) {
  if (name == "minmax") return NormalizationKind::MinMax;
  if (name == "percentile") return NormalizationKind::PercentileClip;
  return std::nullopt;
}

namespace {

// Percentile with linear interpolation between closest ranks, computed on a
// sorted copy: rank = p/100 * (n-1).
float percentile(const std::vector<float>& sorted, double p) {
  const double rank = p / 100.0 * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(rank);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return static_cast<float>(sorted[lo] + (sorted[hi] - sorted[lo]) * frac);
}

}  // namespace

BandGrid normalize_band(const BandGrid& grid, const NormalizationSpec& spec) {
  validate_grid(grid);

  float lo = 0.0f;
  float hi = 0.0f;
  if (spec.kind == NormalizationKind::MinMax) {
    auto [mn, mx] = std::minmax_element(grid.values.begin(), grid.values.end());
    lo = *mn;
    hi = *mx;
  } else {
    if (!(spec.lo_percentile >= 0.0 && spec.lo_percentile < spec.hi_percentile &&
          spec.hi_percentile <= 100.0)) {
      throw Error("invalid percentile bounds");
    }
    std::vector<float> sorted = grid.values;
    std::sort(sorted.begin(), sorted.end());
    lo = percentile(sorted, spec.lo_percentile);
    hi = percentile(sorted, spec.hi_percentile);
  }

  BandGrid out;
  out.width = grid.width;
  out.height = grid.height;
  out.resolution_m = grid.resolution_m;
  out.values.resize(grid.values.size());

  if (hi <= lo) {
    // Constant (or degenerate percentile window): render as black.
    std::fill(out.values.begin(), out.values.end(), 0.0f);
    return out;
  }
  const float range = hi - lo;
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    const float v = std::clamp(grid.values[i], lo, hi);
    out.values[i] = (v - lo) / range;
  }
  return out;
}

std::uint8_t to_byte(float v) {
  if (!(v >= 0.0f && v <= 1.0f)) {
    throw Error("to_byte input " + std::to_string(v) + " outside [0, 1]");
  }
  const long scaled = std::lround(static_cast<double>(v) * 255.0);
  return static_cast<std::uint8_t>(std::clamp(scaled, 0L, 255L));
}

std::vector<std::uint8_t> to_byte(const BandGrid& grid) {
  std::vector<std::uint8_t> out(grid.values.size());
  for (std::size_t i = 0; i < grid.values.size(); ++i) out[i] = to_byte(grid.values[i]);
  return out;
}

}  // namespace specbench
