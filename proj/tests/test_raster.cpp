#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "specbench/error.hpp"
#include "specbench/raster.hpp"
#include "support/synthetic.hpp"

using namespace specbench;

namespace {

BandGrid grid_of(std::vector<float> values, int width = 0) {
  BandGrid g;
  g.width = width ? width : static_cast<int>(values.size());
  g.height = width ? static_cast<int>(values.size()) / width : 1;
  g.resolution_m = 10;
  g.values = std::move(values);
  return g;
}

// Independent oracle: sort, pick interpolated percentiles, clip, rescale.
std::vector<float> percentile_oracle(const std::vector<float>& values, double p_lo,
                                     double p_hi) {
  std::vector<float> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  auto pick = [&](double p) {
    const double rank = p / 100.0 * (sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(rank);
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * static_cast<float>(rank - lo);
  };
  const float lo = pick(p_lo);
  const float hi = pick(p_hi);
  std::vector<float> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const float clipped = std::clamp(values[i], lo, hi);
    out[i] = hi > lo ? (clipped - lo) / (hi - lo) : 0.0f;
  }
  return out;
}

}  // namespace

TEST_CASE("band ids and resolutions") {
  CHECK(kAllBands.size() == 12);
  CHECK(band_resolution_m(BandId::B02) == 10);
  CHECK(band_resolution_m(BandId::B8A) == 20);
  CHECK(band_resolution_m(BandId::B09) == 60);
  CHECK(band_from_name("B8A") == BandId::B8A);
  CHECK(!band_from_name("B10").has_value());
  CHECK(band_name(BandId::B11) == "B11");
}

TEST_CASE("min-max normalization endpoints") {
  const auto out = normalize_band(grid_of({100, 200, 300}), {});
  CHECK(out.values[0] == doctest::Approx(0.0));
  CHECK(out.values[1] == doctest::Approx(0.5));
  CHECK(out.values[2] == doctest::Approx(1.0));
}

TEST_CASE("constant band maps to zeros") {
  const auto out = normalize_band(grid_of({7, 7, 7}), {});
  for (float v : out.values) CHECK(v == 0.0f);
}

TEST_CASE("percentile normalization matches the sort-clip-rescale oracle") {
  const auto grid = testing::random_grid(100, 100, 10, 99, 0.0f, 65535.0f);
  NormalizationSpec spec;
  spec.kind = NormalizationKind::PercentileClip;
  spec.lo_percentile = 2.0;
  spec.hi_percentile = 98.0;
  const auto out = normalize_band(grid, spec);
  const auto expected = percentile_oracle(grid.values, 2.0, 98.0);
  REQUIRE(out.values.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(out.values[i] == doctest::Approx(expected[i]).epsilon(1e-6));
  }
}

TEST_CASE("normalization is idempotent and monotone") {
  const auto grid = testing::random_grid(40, 40, 10, 7);
  const auto once = normalize_band(grid, {});
  const auto twice = normalize_band(once, {});
  for (std::size_t i = 0; i < once.values.size(); ++i) {
    CHECK(twice.values[i] == doctest::Approx(once.values[i]).epsilon(1e-6));
  }
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    for (std::size_t j : {std::size_t{0}, grid.values.size() / 2}) {
      if (grid.values[i] <= grid.values[j]) {
        CHECK(once.values[i] <= once.values[j]);
      }
    }
  }
}

TEST_CASE("normalize_band rejects bad grids") {
  CHECK_THROWS_AS(normalize_band(grid_of({}), {}), Error);
  BandGrid nan_grid = grid_of({1.0f, 2.0f});
  nan_grid.values[1] = std::nanf("");
  CHECK_THROWS_AS(normalize_band(nan_grid, {}), Error);
  BandGrid negative = grid_of({1.0f, -2.0f});
  CHECK_THROWS_AS(normalize_band(negative, {}), Error);
}

TEST_CASE("byte scaling") {
  CHECK(to_byte(1.0f) == 255);
  CHECK(to_byte(0.0f) == 0);
  CHECK(to_byte(0.5f) == 128);  // round(127.5), ties away from zero
  CHECK_THROWS_AS(to_byte(1.5f), Error);
  CHECK_THROWS_AS(to_byte(-0.1f), Error);
}

TEST_CASE("byte scaling after normalization stays in range for random grids") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto grid = testing::random_grid(13, 17, 10, seed, 0.0f, 65535.0f);
    const auto bytes = to_byte(normalize_band(grid, {}));
    CHECK(bytes.size() == grid.values.size());
    // vector<uint8_t> cannot hold out-of-range values; spot the endpoints
    CHECK(*std::max_element(bytes.begin(), bytes.end()) == 255);
    CHECK(*std::min_element(bytes.begin(), bytes.end()) == 0);
  }
}
