#include "evlander/png_io.hpp"

#include <algorithm>
#include <cmath>

#include <zlib.h>

#include "evlander/dataio.hpp"
#include "evlander/errors.hpp"

namespace evlander {

Raster::Raster(int w, int h, std::uint32_t fill) : width(w), height(h) {
  rgb.resize(static_cast<std::size_t>(w) * h * 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) set(x, y, fill);
}

void Raster::set(int x, int y, std::uint32_t color) {
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  rgb[i] = static_cast<std::uint8_t>((color >> 16) & 0xff);
  rgb[i + 1] = static_cast<std::uint8_t>((color >> 8) & 0xff);
  rgb[i + 2] = static_cast<std::uint8_t>(color & 0xff);
}

void Raster::set_safe(int x, int y, std::uint32_t color) {
  if (x < 0 || y < 0 || x >= width || y >= height) return;
  set(x, y, color);
}

namespace {

void append_u32(std::string& s, std::uint32_t v) {
  s.push_back(static_cast<char>((v >> 24) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>(v & 0xff));
}

void append_chunk(std::string& s, const char type[4], const std::string& data) {
  append_u32(s, static_cast<std::uint32_t>(data.size()));
  std::string body(type, 4);
  body += data;
  s += body;
  const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(body.data()),
                         static_cast<uInt>(body.size()));
  append_u32(s, static_cast<std::uint32_t>(crc));
}

std::string deflate_bytes(const std::string& raw) {
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::string out(bound, '\0');
  const int rc = compress2(reinterpret_cast<Bytef*>(out.data()), &bound,
                           reinterpret_cast<const Bytef*>(raw.data()),
                           static_cast<uLong>(raw.size()), 6);
  if (rc != Z_OK) throw_io("PNG deflate failed");
  out.resize(bound);
  return out;
}

}  // namespace

void write_png(const std::string& path, const Raster& raster) {
  if (raster.width <= 0 || raster.height <= 0) throw_invalid("empty raster");
  std::string scanlines;
  scanlines.reserve(static_cast<std::size_t>(raster.height) * (raster.width * 3 + 1));
  for (int y = 0; y < raster.height; ++y) {
    scanlines.push_back('\0');  // filter type 0 (None) per row
    const std::size_t row = static_cast<std::size_t>(y) * raster.width * 3;
    scanlines.append(reinterpret_cast<const char*>(raster.rgb.data() + row),
                     static_cast<std::size_t>(raster.width) * 3);
  }

  std::string png("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  append_u32(ihdr, static_cast<std::uint32_t>(raster.width));
  append_u32(ihdr, static_cast<std::uint32_t>(raster.height));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // color type: truecolor
  ihdr.push_back(0);   // compression
  ihdr.push_back(0);   // filter
  ihdr.push_back(0);   // interlace
  append_chunk(png, "IHDR", ihdr);
  append_chunk(png, "IDAT", deflate_bytes(scanlines));
  append_chunk(png, "IEND", "");
  write_text_file_atomic(path, png);
}

Raster to_raster(const ImageF& img) {
  Raster r(static_cast<int>(img.cols()), static_cast<int>(img.rows()));
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x) {
      const float v = std::clamp(img(y, x), 0.0f, 1.0f);
      const auto g = static_cast<std::uint8_t>(std::lround(v * 255.0f));
      r.set(x, y, (static_cast<std::uint32_t>(g) << 16) | (static_cast<std::uint32_t>(g) << 8) |
                      g);
    }
  }
  return r;
}

}  // namespace evlander
