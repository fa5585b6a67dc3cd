#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "specbench/products.hpp"

namespace specbench {

/// Encodes an 8-bit RGB image as a PNG byte stream. The encoder emits exactly
/// IHDR, one IDAT (zlib default compression, filter 0 per scanline) and IEND,
/// so identical pixels always produce identical bytes.
std::vector<std::uint8_t> encode_png(int width, int height,
                                     std::span<const std::uint8_t> rgb);

std::vector<std::uint8_t> encode_png(const PseudoImage& image);

void write_png(const std::filesystem::path& path, const PseudoImage& image);

}  // namespace specbench
