#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evlander/png_io.hpp"

namespace evlander {

struct PlotSeries {
  std::vector<double> t;
  std::vector<double> v;  // same length as t
  std::uint32_t color = 0xffffff;
};

/// Minimal polyline chart: shared time axis, auto-scaled y range over all
/// series, zero line, and numeric y-range stamps in a built-in micro font.
/// Series identity is carried by color (documented by the caller).
Raster render_plot(const std::vector<PlotSeries>& series, int width = 900, int height = 300);

/// Stamps small digits/letters (subset: 0-9 - . e + a few letters) at (x, y).
void draw_label(Raster& r, int x, int y, const std::string& text, std::uint32_t color);

/// Draws a clipped line segment.
void draw_line(Raster& r, int x0, int y0, int x1, int y1, std::uint32_t color);

}  // namespace evlander
