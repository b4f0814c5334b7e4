#include "evlander/plot.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>

namespace evlander {

namespace {

/// 3x5 micro font, one byte per row, low 3 bits used.
const std::array<std::uint8_t, 5>* glyph(char c) {
  static const struct {
    char c;
    std::array<std::uint8_t, 5> rows;
  } table[] = {
      {'0', {0b111, 0b101, 0b101, 0b101, 0b111}}, {'1', {0b010, 0b110, 0b010, 0b010, 0b111}},
      {'2', {0b111, 0b001, 0b111, 0b100, 0b111}}, {'3', {0b111, 0b001, 0b111, 0b001, 0b111}},
      {'4', {0b101, 0b101, 0b111, 0b001, 0b001}}, {'5', {0b111, 0b100, 0b111, 0b001, 0b111}},
      {'6', {0b111, 0b100, 0b111, 0b101, 0b111}}, {'7', {0b111, 0b001, 0b001, 0b010, 0b010}},
      {'8', {0b111, 0b101, 0b111, 0b101, 0b111}}, {'9', {0b111, 0b101, 0b111, 0b001, 0b111}},
      {'-', {0b000, 0b000, 0b111, 0b000, 0b000}}, {'.', {0b000, 0b000, 0b000, 0b000, 0b010}},
      {'+', {0b000, 0b010, 0b111, 0b010, 0b000}}, {':', {0b000, 0b010, 0b000, 0b010, 0b000}},
      {'=', {0b000, 0b111, 0b000, 0b111, 0b000}}, {'/', {0b001, 0b001, 0b010, 0b100, 0b100}},
      {'_', {0b000, 0b000, 0b000, 0b000, 0b111}}, {'a', {0b010, 0b101, 0b111, 0b101, 0b101}},
      {'b', {0b110, 0b101, 0b110, 0b101, 0b110}}, {'c', {0b111, 0b100, 0b100, 0b100, 0b111}},
      {'d', {0b110, 0b101, 0b101, 0b101, 0b110}}, {'e', {0b111, 0b100, 0b111, 0b100, 0b111}},
      {'f', {0b111, 0b100, 0b111, 0b100, 0b100}}, {'g', {0b111, 0b100, 0b101, 0b101, 0b111}},
      {'h', {0b101, 0b101, 0b111, 0b101, 0b101}}, {'i', {0b111, 0b010, 0b010, 0b010, 0b111}},
      {'k', {0b101, 0b110, 0b100, 0b110, 0b101}}, {'l', {0b100, 0b100, 0b100, 0b100, 0b111}},
      {'m', {0b101, 0b111, 0b111, 0b101, 0b101}}, {'n', {0b110, 0b101, 0b101, 0b101, 0b101}},
      {'o', {0b111, 0b101, 0b101, 0b101, 0b111}}, {'p', {0b111, 0b101, 0b111, 0b100, 0b100}},
      {'q', {0b111, 0b101, 0b101, 0b111, 0b001}}, {'r', {0b110, 0b101, 0b110, 0b101, 0b101}},
      {'s', {0b111, 0b100, 0b111, 0b001, 0b111}}, {'t', {0b111, 0b010, 0b010, 0b010, 0b010}},
      {'u', {0b101, 0b101, 0b101, 0b101, 0b111}}, {'v', {0b101, 0b101, 0b101, 0b101, 0b010}},
      {'w', {0b101, 0b101, 0b111, 0b111, 0b101}}, {'x', {0b101, 0b101, 0b010, 0b101, 0b101}},
      {'y', {0b101, 0b101, 0b010, 0b010, 0b010}}, {'z', {0b111, 0b001, 0b010, 0b100, 0b111}},
  };
  const char lc = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (const auto& e : table)
    if (e.c == lc) return &e.rows;
  return nullptr;
}

std::string fmt3g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

}  // namespace

void draw_label(Raster& r, int x, int y, const std::string& text, std::uint32_t color) {
  int cx = x;
  for (char c : text) {
    if (const auto* g = glyph(c)) {
      for (int row = 0; row < 5; ++row)
        for (int col = 0; col < 3; ++col)
          if ((*g)[static_cast<std::size_t>(row)] & (1 << (2 - col)))
            r.set_safe(cx + col, y + row, color);
    }
    cx += 4;
  }
}

void draw_line(Raster& r, int x0, int y0, int x1, int y1, std::uint32_t color) {
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  int x = x0, y = y0;
  while (true) {
    r.set_safe(x, y, color);
    if (x == x1 && y == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y += sy;
    }
  }
}

Raster render_plot(const std::vector<PlotSeries>& series, int width, int height) {
  Raster r(width, height, 0x101418);
  const int left = 36, right = 8, top = 8, bottom = 16;
  const int x0 = left, x1 = width - right, y0 = top, y1 = height - bottom;

  double tmin = std::numeric_limits<double>::infinity();
  double tmax = -tmin;
  double vmin = tmin, vmax = -tmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.t.size() && i < s.v.size(); ++i) {
      tmin = std::min(tmin, s.t[i]);
      tmax = std::max(tmax, s.t[i]);
      if (std::isfinite(s.v[i])) {
        vmin = std::min(vmin, s.v[i]);
        vmax = std::max(vmax, s.v[i]);
      }
    }
  }
  if (!(tmax > tmin)) {
    tmin -= 1.0;
    tmax += 1.0;
  }
  if (!(vmax > vmin)) {
    if (!std::isfinite(vmin)) {
      vmin = -1.0;
      vmax = 1.0;
    } else {
      vmin -= 1.0;
      vmax += 1.0;
    }
  }
  const double pad = 0.05 * (vmax - vmin);
  vmin -= pad;
  vmax += pad;

  auto px = [&](double t) {
    return x0 + static_cast<int>(std::lround((t - tmin) / (tmax - tmin) * (x1 - x0)));
  };
  auto py = [&](double v) {
    return y1 - static_cast<int>(std::lround((v - vmin) / (vmax - vmin) * (y1 - y0)));
  };

  // Frame, zero line, labels.
  draw_line(r, x0, y0, x1, y0, 0x404850);
  draw_line(r, x0, y1, x1, y1, 0x404850);
  draw_line(r, x0, y0, x0, y1, 0x404850);
  draw_line(r, x1, y0, x1, y1, 0x404850);
  if (vmin < 0.0 && vmax > 0.0) draw_line(r, x0, py(0.0), x1, py(0.0), 0x303840);
  draw_label(r, 2, y0, fmt3g(vmax), 0x9aa4ae);
  draw_label(r, 2, y1 - 5, fmt3g(vmin), 0x9aa4ae);
  draw_label(r, x0, height - 7, fmt3g(tmin), 0x9aa4ae);
  const std::string tlab = fmt3g(tmax);
  draw_label(r, x1 - static_cast<int>(tlab.size()) * 4, height - 7, tlab, 0x9aa4ae);

  for (const auto& s : series) {
    for (std::size_t i = 1; i < s.t.size() && i < s.v.size(); ++i) {
      if (!std::isfinite(s.v[i - 1]) || !std::isfinite(s.v[i])) continue;
      draw_line(r, px(s.t[i - 1]), py(s.v[i - 1]), px(s.t[i]), py(s.v[i]), s.color);
    }
  }
  return r;
}

}  // namespace evlander
