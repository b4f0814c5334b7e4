#pragma once

#include "evlander/types.hpp"

namespace evlander {

/// 3x3 projective map between two views of a plane, normalized so m(2,2) = 1.
class Homography {
public:
  Homography() : m_(Mat3::Identity()) {}

  /// Normalizes (divides by m(2,2)) and rejects singular matrices.
  static Homography from_matrix(const Mat3& m);
  static Homography identity() { return Homography(); }
  static Homography translation(double tx, double ty);
  static Homography scaling(double sx, double sy);

  const Mat3& matrix() const { return m_; }
  double operator()(int r, int c) const { return m_(r, c); }

private:
  explicit Homography(const Mat3& normalized) : m_(normalized) {}
  Mat3 m_;
};

/// Projects pixel u through h. Throws SingularityError when u lies on the
/// line mapped to infinity (|denominator| < 1e-12).
Vec2 apply_point(const Homography& h, const Vec2& u);

/// Analytic 2x2 spatial Jacobian of apply_point at u.
Mat2 jacobian_at(const Homography& h, const Vec2& u);

/// Normalized matrix product a*b.
Homography compose(const Homography& a, const Homography& b);

/// Normalized matrix inverse.
Homography inverse(const Homography& h);

struct WarpResult {
  ImageF image;
  ImageF valid;  // 1 where the sample came from inside src, 0 where zero-filled
};

/// Resamples src so that output(u) = src(apply_point(inverse(h), u)) with
/// bilinear interpolation; out-of-source samples are 0 and marked invalid.
/// With h mapping frame t onto frame t+1 this predicts the t+1 image.
WarpResult warp_frame(const ImageF& src, const Homography& h);

}  // namespace evlander
