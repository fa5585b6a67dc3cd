#include "tiff_io.hpp"

#include <tiffio.h>

#include <memory>

#include "specbench/error.hpp"

namespace specbench {

namespace {

struct TiffCloser {
  void operator()(TIFF* tif) const {
    if (tif) TIFFClose(tif);
  }
};
using TiffPtr = std::unique_ptr<TIFF, TiffCloser>;

// Geo TIFFs carry private tags libtiff likes to warn about; stay quiet.
void silence_tiff_warnings() {
  static const bool once = [] {
    TIFFSetWarningHandler(nullptr);
    return true;
  }();
  (void)once;
}

}  // namespace

TiffImage read_tiff_u16(const std::filesystem::path& path) {
  silence_tiff_warnings();
  TiffPtr tif(TIFFOpen(path.string().c_str(), "r"));
  if (!tif) throw Error("cannot open TIFF " + path.string());

  std::uint32_t width = 0, height = 0;
  std::uint16_t samples = 1, bits = 1, planar = PLANARCONFIG_CONTIG, fmt = SAMPLEFORMAT_UINT;
  TIFFGetField(tif.get(), TIFFTAG_IMAGEWIDTH, &width);
  TIFFGetField(tif.get(), TIFFTAG_IMAGELENGTH, &height);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLESPERPIXEL, &samples);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_BITSPERSAMPLE, &bits);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_PLANARCONFIG, &planar);
  TIFFGetFieldDefaulted(tif.get(), TIFFTAG_SAMPLEFORMAT, &fmt);

  if (width == 0 || height == 0) throw Error("TIFF " + path.string() + " has empty dimensions");
  if (bits != 16 || (fmt != SAMPLEFORMAT_UINT && fmt != SAMPLEFORMAT_VOID)) {
    throw Error("TIFF " + path.string() + " is not unsigned 16-bit (bits=" +
                std::to_string(bits) + ")");
  }

  TiffImage img;
  img.width = static_cast<int>(width);
  img.height = static_cast<int>(height);
  img.planes.assign(samples, std::vector<std::uint16_t>(
                                 static_cast<std::size_t>(width) * height));

  std::vector<std::uint8_t> scanline(TIFFScanlineSize(tif.get()));
  if (planar == PLANARCONFIG_CONTIG) {
    for (std::uint32_t y = 0; y < height; ++y) {
      if (TIFFReadScanline(tif.get(), scanline.data(), y) < 0) {
        throw Error("TIFF read failed at row " + std::to_string(y) + " in " + path.string());
      }
      const auto* px = reinterpret_cast<const std::uint16_t*>(scanline.data());
      for (std::uint32_t x = 0; x < width; ++x) {
        for (std::uint16_t s = 0; s < samples; ++s) {
          img.planes[s][static_cast<std::size_t>(y) * width + x] = px[x * samples + s];
        }
      }
    }
  } else {
    for (std::uint16_t s = 0; s < samples; ++s) {
      for (std::uint32_t y = 0; y < height; ++y) {
        if (TIFFReadScanline(tif.get(), scanline.data(), y, s) < 0) {
          throw Error("TIFF read failed at row " + std::to_string(y) + " in " + path.string());
        }
        const auto* px = reinterpret_cast<const std::uint16_t*>(scanline.data());
        for (std::uint32_t x = 0; x < width; ++x) {
          img.planes[s][static_cast<std::size_t>(y) * width + x] = px[x];
        }
      }
    }
  }
  return img;
}

void write_tiff_u16(const std::filesystem::path& path, int width, int height,
                    const std::vector<std::vector<std::uint16_t>>& planes) {
  silence_tiff_warnings();
  if (planes.empty()) throw Error("write_tiff_u16: no planes");
  for (const auto& p : planes) {
    if (p.size() != static_cast<std::size_t>(width) * height) {
      throw Error("write_tiff_u16: plane size mismatch");
    }
  }
  TiffPtr tif(TIFFOpen(path.string().c_str(), "w"));
  if (!tif) throw Error("cannot create TIFF " + path.string());

  const auto samples = static_cast<std::uint16_t>(planes.size());
  TIFFSetField(tif.get(), TIFFTAG_IMAGEWIDTH, static_cast<std::uint32_t>(width));
  TIFFSetField(tif.get(), TIFFTAG_IMAGELENGTH, static_cast<std::uint32_t>(height));
  TIFFSetField(tif.get(), TIFFTAG_SAMPLESPERPIXEL, samples);
  TIFFSetField(tif.get(), TIFFTAG_BITSPERSAMPLE, static_cast<std::uint16_t>(16));
  TIFFSetField(tif.get(), TIFFTAG_SAMPLEFORMAT, SAMPLEFORMAT_UINT);
  TIFFSetField(tif.get(), TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
  TIFFSetField(tif.get(), TIFFTAG_PHOTOMETRIC, PHOTOMETRIC_MINISBLACK);
  TIFFSetField(tif.get(), TIFFTAG_COMPRESSION, COMPRESSION_NONE);
  TIFFSetField(tif.get(), TIFFTAG_ROWSPERSTRIP, static_cast<std::uint32_t>(1));

  std::vector<std::uint16_t> row(static_cast<std::size_t>(width) * samples);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (std::uint16_t s = 0; s < samples; ++s) {
        row[static_cast<std::size_t>(x) * samples + s] =
            planes[s][static_cast<std::size_t>(y) * width + x];
      }
    }
    if (TIFFWriteScanline(tif.get(), row.data(), y) < 0) {
      throw Error("TIFF write failed at row " + std::to_string(y));
    }
  }
}

}  // namespace specbench
