#include "evlander/homography.hpp"

#include <Eigen/LU>
#include <cmath>

#include "evlander/errors.hpp"
#include "evlander/image.hpp"

namespace evlander {

namespace {
constexpr double kSingularTol = 1e-12;
}

Homography Homography::from_matrix(const Mat3& m) {
  if (std::abs(m(2, 2)) < kSingularTol) {
    throw SingularityError("homography normalization failed: m(2,2) is zero");
  }
  Mat3 n = m / m(2, 2);
  if (std::abs(n.determinant()) < kSingularTol) {
    throw SingularityError("homography is singular (|det| < 1e-12)");
  }
  return Homography(n);
}

Homography Homography::translation(double tx, double ty) {
  Mat3 m = Mat3::Identity();
  m(0, 2) = tx;
  m(1, 2) = ty;
  return Homography(m);
}

Homography Homography::scaling(double sx, double sy) {
  Mat3 m = Mat3::Identity();
  m(0, 0) = sx;
  m(1, 1) = sy;
  return from_matrix(m);
}

Vec2 apply_point(const Homography& h, const Vec2& u) {
  const Mat3& m = h.matrix();
  const double w = m(2, 0) * u.x() + m(2, 1) * u.y() + m(2, 2);
  if (std::abs(w) < kSingularTol) {
    throw SingularityError("apply_point: degenerate projective denominator at (" +
                           std::to_string(u.x()) + ", " + std::to_string(u.y()) + ")");
  }
  return Vec2((m(0, 0) * u.x() + m(0, 1) * u.y() + m(0, 2)) / w,
              (m(1, 0) * u.x() + m(1, 1) * u.y() + m(1, 2)) / w);
}

Mat2 jacobian_at(const Homography& h, const Vec2& u) {
  const Mat3& m = h.matrix();
  const double w = m(2, 0) * u.x() + m(2, 1) * u.y() + m(2, 2);
  if (std::abs(w) < kSingularTol) {
    throw SingularityError("jacobian_at: degenerate projective denominator");
  }
  const Vec2 p = apply_point(h, u);
  Mat2 j;
  j(0, 0) = (m(0, 0) - p.x() * m(2, 0)) / w;
  j(0, 1) = (m(0, 1) - p.x() * m(2, 1)) / w;
  j(1, 0) = (m(1, 0) - p.y() * m(2, 0)) / w;
  j(1, 1) = (m(1, 1) - p.y() * m(2, 1)) / w;
  return j;
}

Homography compose(const Homography& a, const Homography& b) {
  return Homography::from_matrix(a.matrix() * b.matrix());
}

Homography inverse(const Homography& h) {
  const Mat3& m = h.matrix();
  if (std::abs(m.determinant()) < kSingularTol) {
    throw SingularityError("inverse: homography is near-singular");
  }
  return Homography::from_matrix(m.inverse());
}

WarpResult warp_frame(const ImageF& src, const Homography& h) {
  if (src.size() == 0) throw_invalid("warp_frame: empty image");
  const Homography back = inverse(h);
  const int height = static_cast<int>(src.rows());
  const int width = static_cast<int>(src.cols());
  WarpResult out;
  out.image = ImageF::Zero(height, width);
  out.valid = ImageF::Zero(height, width);
  const Mat3& m = back.matrix();
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double w = m(2, 0) * x + m(2, 1) * y + m(2, 2);
      if (std::abs(w) < kSingularTol) continue;
      const double sx = (m(0, 0) * x + m(0, 1) * y + m(0, 2)) / w;
      const double sy = (m(1, 0) * x + m(1, 1) * y + m(1, 2)) / w;
      if (!in_bilinear_bounds(src, sx, sy)) continue;
      out.image(y, x) = bilinear(src, sx, sy);
      out.valid(y, x) = 1.0f;
    }
  }
  return out;
}

}  // namespace evlander
