#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace evlander {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// Grayscale float image, (row, col) = (y, x), origin top-left.
using ImageF = Eigen::ArrayXXf;

/// One 3D sample on a timeline. Timestamps are integer microseconds
/// since sequence start; all decimal-seconds values are converted once
/// at the I/O boundary.
struct TimedVec3 {
  std::int64_t t_us = 0;
  Vec3 v = Vec3::Zero();
};

using Vec3Series = std::vector<TimedVec3>;

inline double us_to_s(std::int64_t t_us) { return static_cast<double>(t_us) * 1e-6; }
inline std::int64_t s_to_us(double t_s) {
  return static_cast<std::int64_t>(t_s * 1e6 + (t_s >= 0 ? 0.5 : -0.5));
}

}  // namespace evlander
