#include "evlander/image.hpp"

#include <cmath>
#include <vector>

#include "evlander/errors.hpp"

namespace evlander {

ImageF gaussian_blur(const ImageF& img, double sigma) {
  if (!(sigma > 0.0)) {
    throw_config("gaussian_blur: sigma must be > 0 (got " + std::to_string(sigma) +
                 "); a zero-sigma blur produces blank output");
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<float> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    kernel[i + radius] = static_cast<float>(v);
    sum += v;
  }
  for (float& k : kernel) k = static_cast<float>(k / sum);

  const int height = static_cast<int>(img.rows());
  const int width = static_cast<int>(img.cols());
  const auto clampi = [](int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); };

  ImageF tmp(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      float acc = 0.0f;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] * img(y, clampi(x + k, width - 1));
      }
      tmp(y, x) = acc;
    }
  }
  ImageF out(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      float acc = 0.0f;
      for (int k = -radius; k <= radius; ++k) {
        acc += kernel[k + radius] * tmp(clampi(y + k, height - 1), x);
      }
      out(y, x) = acc;
    }
  }
  return out;
}

void gradients(const ImageF& img, ImageF& gx, ImageF& gy) {
  const int height = static_cast<int>(img.rows());
  const int width = static_cast<int>(img.cols());
  gx.resize(height, width);
  gy.resize(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int xm = x > 0 ? x - 1 : x;
      const int xp = x < width - 1 ? x + 1 : x;
      const int ym = y > 0 ? y - 1 : y;
      const int yp = y < height - 1 ? y + 1 : y;
      gx(y, x) = xp == xm ? 0.0f : (img(y, xp) - img(y, xm)) / static_cast<float>(xp - xm);
      gy(y, x) = yp == ym ? 0.0f : (img(yp, x) - img(ym, x)) / static_cast<float>(yp - ym);
    }
  }
}

}  // namespace evlander
