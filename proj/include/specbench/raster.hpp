#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace specbench {

/// Sentinel-2 bands handled by this library. B10 (cirrus) is intentionally
/// absent: it carries no surface information and is dropped at import.
enum class BandId {
  B01,
  B02,
  B03,
  B04,
  B05,
  B06,
  B07,
  B08,
  B8A,
  B09,
  B11,
  B12,
};

inline constexpr std::array<BandId, 12> kAllBands = {
    BandId::B01, BandId::B02, BandId::B03, BandId::B04,
    BandId::B05, BandId::B06, BandId::B07, BandId::B08,
    BandId::B8A, BandId::B09, BandId::B11, BandId::B12,
};

/// Nominal ground resolution of a band in meters per pixel.
int band_resolution_m(BandId band);

std::string_view band_name(BandId band);
std::optional<BandId> band_from_name(std::string_view name);

/// One single-band raster plane, row-major, 32-bit values.
struct BandGrid {
  int width = 0;
  int height = 0;
  int resolution_m = 0;
  std::vector<float> values;

  std::size_t pixel_count() const { return values.size(); }
  bool empty() const { return values.empty(); }
  float at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  std::string shape_string() const;
};

/// Throws Error unless values.size() == width*height and every value is
/// finite and non-negative.
void validate_grid(const BandGrid& grid);

/// One satellite observation: band planes plus 1-based ground-truth labels.
struct Patch {
  std::string id;
  std::string dataset;
  std::map<BandId, BandGrid> bands;
  std::set<int> labels;
};

enum class NormalizationKind {
  MinMax,
  PercentileClip,
};

struct NormalizationSpec {
  NormalizationKind kind = NormalizationKind::MinMax;
  // Only used by PercentileClip.
  double lo_percentile = 2.0;
  double hi_percentile = 98.0;
};

std::string_view normalization_name(NormalizationKind kind);
std::optional<NormalizationKind> normalization_from_name(std::string_view name);

/// Rescales a band into [0, 1]. MinMax maps min->0, max->1; PercentileClip
/// first clips to the [lo, hi] percentiles (linear-interpolation ranks) and
/// then rescales. A constant band maps to all zeros.
BandGrid normalize_band(const BandGrid& grid, const NormalizationSpec& spec);

/// Byte-scales one unit-range value: round(v*255), ties away from zero,
/// clamped to [0, 255]. Throws Error when v is outside [0, 1].
std::uint8_t to_byte(float v);

/// Byte-scales a unit-range grid elementwise.
std::vector<std::uint8_t> to_byte(const BandGrid& grid);

}  // namespace specbench
