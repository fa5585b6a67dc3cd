#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace specbench {

/// Decoded 16-bit TIFF: one plane per sample, row-major.
struct TiffImage {
  int width = 0;
  int height = 0;
  std::vector<std::vector<std::uint16_t>> planes;
};

/// Reads an unsigned 16-bit TIFF (contiguous or separate planar layout,
/// any sample count). Throws Error on anything else.
TiffImage read_tiff_u16(const std::filesystem::path& path);

/// Writes an unsigned 16-bit multi-sample TIFF, contiguous, uncompressed.
void write_tiff_u16(const std::filesystem::path& path, int width, int height,
                    const std::vector<std::vector<std::uint16_t>>& planes);

}  // namespace specbench
