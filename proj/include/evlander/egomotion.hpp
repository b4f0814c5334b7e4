#pragma once

#include <cstdint>
#include <vector>

#include "evlander/ecc.hpp"
#include "evlander/events.hpp"
#include "evlander/homography.hpp"
#include "evlander/types.hpp"

namespace evlander {

/// Pinhole intrinsics. The pipeline default is the identity camera
/// (fx = fy = 1, principal point at the sensor center); the unknown true
/// focal length is absorbed by the per-axis calibration factors.
struct CameraModel {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  // Principal point at the center of the pixel grid (integer coordinates
  // address pixel centers), matching the accumulation/ECC convention.
  static CameraModel identity_for(int width, int height) {
    return CameraModel{1.0, 1.0, (width - 1) / 2.0, (height - 1) / 2.0};
  }
};

struct EulerAngles {
  double phi = 0.0;    // roll
  double theta = 0.0;  // pitch
  double psi = 0.0;    // yaw
};

enum class EulerConvention { ZYX, XYZ };

/// Body-to-world rotation. ZYX (default): R = Rz(psi)*Ry(theta)*Rx(phi).
Mat3 rotation_matrix(const EulerAngles& angles, EulerConvention conv = EulerConvention::ZYX);

/// Fixed camera-to-body mount used when none is given: a half-turn about the
/// body y axis, which points the optical axis along body -z (nadir) and
/// makes the apparent-motion signs of the center-pixel method come out as
/// world velocities.
Mat3 default_camera_mount();

/// Per-pair center-pixel decomposition. Applies h to the principal point,
/// scales the pixel offsets by the rangefinder distance, and takes the
/// isotropic scale change s = sqrt(det J) of the warp at the center, so that
/// dz = (s - 1) * range_m is positive when the camera approaches the surface.
/// Returns the camera-frame translation over the pair interval plus s.
struct CameraTranslation {
  Vec3 t = Vec3::Zero();
  double scale = 1.0;
};
CameraTranslation camera_translation(const Homography& h, const CameraModel& cam,
                                     double range_m, double dt_s);

/// v_world = rotation_matrix(angles) * mount * v_cam. Origin offsets cancel
/// for velocities, so orientation is the only conversion needed.
Vec3 to_world_velocity(const Vec3& v_cam, const EulerAngles& angles, const Mat3& mount,
                       EulerConvention conv = EulerConvention::ZYX);

struct VelocitySample {
  std::int64_t t_us = 0;  // midpoint of the frame pair
  Vec3 v = Vec3::Zero();      // world frame, m/s
  Vec3 v_cam = Vec3::Zero();  // camera frame, m/s
  double ecc_value = 0.0;
  bool gap_fill = false;  // ECC diverged; velocity held from previous valid pair
  bool clamped = false;   // range/orientation sampled outside their series span
};

/// Timestamped scalar series (rangefinder) and orientation series.
struct RangeSample {
  std::int64_t t_us = 0;
  double d_m = 0.0;
};
struct OrientationSample {
  std::int64_t t_us = 0;
  EulerAngles angles;
};

enum class PolarityMode { Merge, PerChannel };

struct EstimateOptions {
  Mat3 mount = default_camera_mount();
  EulerConvention euler_convention = EulerConvention::ZYX;
  PolarityMode polarity_mode = PolarityMode::Merge;
  bool include_partial = false;  // trailing partial frames bias the homography
};

/// Full per-sequence pipeline: accumulate frames, chain ECC over consecutive
/// pairs (warm-started), decompose at the center pixel, scale by the
/// interpolated range, rotate into the world frame. Diverged pairs are
/// emitted flagged with the previous valid velocity, never dropped, so the
/// output always has len(frames) - 1 samples.
std::vector<VelocitySample> estimate_sequence(
    const EventStream& stream, const std::vector<RangeSample>& ranges,
    const std::vector<OrientationSample>& orientations, const WindowingPolicy& policy,
    const EccConfig& ecc_cfg, const CameraModel& cam,
    const EstimateOptions& opts = EstimateOptions{});

}  // namespace evlander
