#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evlander/types.hpp"

namespace evlander {

/// 8-bit RGB raster with deterministic PNG serialization (fixed zlib level,
/// fixed filtering), so repeated runs produce byte-identical files.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // 3 bytes per pixel, row-major

  Raster() = default;
  Raster(int w, int h, std::uint32_t fill = 0x000000);

  void set(int x, int y, std::uint32_t color);
  /// Clipped; ignores out-of-bounds pixels.
  void set_safe(int x, int y, std::uint32_t color);
};

/// Encodes the raster as an RGB PNG; written atomically.
void write_png(const std::string& path, const Raster& raster);

/// Grayscale helper: values clamped to [0, 1] and quantized to 8 bits.
Raster to_raster(const ImageF& img);

}  // namespace evlander
