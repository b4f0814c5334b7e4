#pragma once

#include "evlander/types.hpp"

namespace evlander {

/// Separable Gaussian blur with replicated borders; kernel radius ceil(3*sigma).
/// sigma must be > 0 (a zero sigma is a caller configuration bug, not a no-op).
ImageF gaussian_blur(const ImageF& img, double sigma);

/// Central-difference gradients (one-sided at borders), same size as img.
void gradients(const ImageF& img, ImageF& gx, ImageF& gy);

inline bool in_bilinear_bounds(const ImageF& img, double x, double y) {
  return x >= 0.0 && y >= 0.0 && x <= static_cast<double>(img.cols() - 1) &&
         y <= static_cast<double>(img.rows() - 1);
}

/// Bilinear sample at (x, y); caller guarantees in_bilinear_bounds.
inline float bilinear(const ImageF& img, double x, double y) {
  const int last_x = static_cast<int>(img.cols()) - 1;
  const int last_y = static_cast<int>(img.rows()) - 1;
  int x0 = static_cast<int>(x);
  int y0 = static_cast<int>(y);
  if (x0 > last_x) x0 = last_x;
  if (y0 > last_y) y0 = last_y;
  if (x0 < 0) x0 = 0;
  if (y0 < 0) y0 = 0;
  const int x1 = x0 < last_x ? x0 + 1 : x0;
  const int y1 = y0 < last_y ? y0 + 1 : y0;
  const double fx = x - x0;
  const double fy = y - y0;
  const double v00 = img(y0, x0);
  const double v01 = img(y0, x1);
  const double v10 = img(y1, x0);
  const double v11 = img(y1, x1);
  return static_cast<float>((1.0 - fy) * ((1.0 - fx) * v00 + fx * v01) +
                            fy * ((1.0 - fx) * v10 + fx * v11));
}

}  // namespace evlander
