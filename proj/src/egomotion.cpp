#include "evlander/egomotion.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "evlander/errors.hpp"

namespace evlander {

Mat3 rotation_matrix(const EulerAngles& a, EulerConvention conv) {
  const Mat3 rx = Eigen::AngleAxisd(a.phi, Vec3::UnitX()).toRotationMatrix();
  const Mat3 ry = Eigen::AngleAxisd(a.theta, Vec3::UnitY()).toRotationMatrix();
  const Mat3 rz = Eigen::AngleAxisd(a.psi, Vec3::UnitZ()).toRotationMatrix();
  if (conv == EulerConvention::XYZ) return rx * ry * rz;
  return rz * ry * rx;
}

Mat3 default_camera_mount() {
  // Exact half-turn about body y; avoids sin(pi) rounding noise.
  Mat3 m;
  m << -1, 0, 0, 0, 1, 0, 0, 0, -1;
  return m;
}

CameraTranslation camera_translation(const Homography& h, const CameraModel& cam,
                                     double range_m, double dt_s) {
  if (!(dt_s > 0.0)) throw_invalid("camera_translation: dt_s must be > 0");
  if (!(range_m > 0.0)) throw_invalid("camera_translation: range_m must be > 0");
  if (!(cam.fx != 0.0 && cam.fy != 0.0)) throw_invalid("camera_translation: fx and fy must be nonzero");

  const Vec2 c(cam.cx, cam.cy);
  const Vec2 uv = apply_point(h, c);
  const Mat2 j = jacobian_at(h, c);
  const double det = j.determinant();
  if (!(det > 0.0)) {
    std::ostringstream os;
    os << "warp is reflected or degenerate at the principal point (det J = " << det << ")";
    throw DegenerateInputError(os.str());
  }
  const double s = std::sqrt(det);
  CameraTranslation out;
  out.t.x() = (uv.x() - cam.cx) * range_m / cam.fx;
  out.t.y() = (uv.y() - cam.cy) * range_m / cam.fy;
  out.t.z() = (s - 1.0) * range_m;
  out.scale = s;
  return out;
}

Vec3 to_world_velocity(const Vec3& v_cam, const EulerAngles& angles, const Mat3& mount,
                       EulerConvention conv) {
  return rotation_matrix(angles, conv) * mount * v_cam;
}

namespace {

// Linear interpolation over a timestamp-sorted series; queries outside the
// span clamp to the nearest endpoint and set *clamped.
template <typename Sample, typename Get>
auto interp_series(const std::vector<Sample>& series, std::int64_t t_us, bool* clamped, Get get)
    -> decltype(get(series.front())) {
  if (t_us <= series.front().t_us) {
    if (t_us < series.front().t_us) *clamped = true;
    return get(series.front());
  }
  if (t_us >= series.back().t_us) {
    if (t_us > series.back().t_us) *clamped = true;
    return get(series.back());
  }
  const auto it = std::lower_bound(
      series.begin(), series.end(), t_us,
      [](const Sample& s, std::int64_t t) { return s.t_us < t; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  if (b.t_us == t_us) return get(b);
  const double w = static_cast<double>(t_us - a.t_us) / static_cast<double>(b.t_us - a.t_us);
  return get(a) * (1.0 - w) + get(b) * w;
}

double interp_range(const std::vector<RangeSample>& series, std::int64_t t_us, bool* clamped) {
  return interp_series(series, t_us, clamped, [](const RangeSample& s) { return s.d_m; });
}

EulerAngles interp_orientation(const std::vector<OrientationSample>& series, std::int64_t t_us,
                               bool* clamped) {
  // Component-wise linear interpolation; adequate for the slow attitude
  // rates of a controlled descent.
  const Vec3 v = interp_series(series, t_us, clamped, [](const OrientationSample& s) {
    return Vec3(s.angles.phi, s.angles.theta, s.angles.psi);
  });
  return EulerAngles{v.x(), v.y(), v.z()};
}

template <typename Sample>
void check_series_sorted(const std::vector<Sample>& series, const char* name) {
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series[i].t_us < series[i - 1].t_us) {
      std::ostringstream os;
      os << name << " series not sorted by time at index " << i;
      throw_invalid(os.str());
    }
  }
}

std::int64_t frame_midpoint_us(const Frame& f) { return (f.t_start + f.t_end) / 2; }

struct PairEstimate {
  Homography h;
  double ecc_value = 0.0;
};

PairEstimate estimate_pair(const Frame& fa, const Frame& fb, const EccConfig& cfg,
                           PolarityMode mode) {
  if (fa.channels == 1 || mode == PolarityMode::Merge) {
    const EccResult r = estimate_ecc(to_image(fa), to_image(fb), cfg);
    return PairEstimate{r.homography, r.ecc_value};
  }
  // Per-channel: estimate each polarity independently, average in parameter
  // space. A single diverged channel falls back to the surviving one.
  std::vector<EccResult> results;
  for (int ch = 0; ch < fa.channels; ++ch) {
    try {
      results.push_back(estimate_ecc(to_image(fa, ch), to_image(fb, ch), cfg));
    } catch (const DivergenceError&) {
    } catch (const DegenerateInputError&) {
    }
  }
  if (results.empty()) throw DivergenceError(0, "all polarity channels diverged");
  Mat3 sum = Mat3::Zero();
  double ecc = 0.0;
  for (const auto& r : results) {
    sum += r.homography.matrix();
    ecc += r.ecc_value;
  }
  const double n = static_cast<double>(results.size());
  return PairEstimate{Homography::from_matrix(sum / n), ecc / n};
}

}  // namespace

std::vector<VelocitySample> estimate_sequence(
    const EventStream& stream, const std::vector<RangeSample>& ranges,
    const std::vector<OrientationSample>& orientations, const WindowingPolicy& policy,
    const EccConfig& ecc_cfg, const CameraModel& cam, const EstimateOptions& opts) {
  validate_stream(stream, "event stream");
  if (ranges.empty()) throw_invalid("range series is empty");
  if (orientations.empty()) throw_invalid("orientation series is empty");
  check_series_sorted(ranges, "range");
  check_series_sorted(orientations, "orientation");

  std::vector<Frame> frames = accumulate(stream, policy);
  if (!opts.include_partial) {
    while (!frames.empty() && frames.back().partial) frames.pop_back();
  }
  if (frames.size() < 2) {
    std::ostringstream os;
    os << "need at least 2 accumulated frames to estimate velocity, got " << frames.size();
    throw_invalid(os.str());
  }

  std::vector<VelocitySample> out;
  out.reserve(frames.size() - 1);
  Homography warm = Homography::identity();
  Vec3 last_v = Vec3::Zero();
  Vec3 last_v_cam = Vec3::Zero();

  for (std::size_t k = 0; k + 1 < frames.size(); ++k) {
    const Frame& fa = frames[k];
    const Frame& fb = frames[k + 1];
    const std::int64_t ta = frame_midpoint_us(fa);
    const std::int64_t tb = frame_midpoint_us(fb);
    const double dt_s = us_to_s(tb - ta);

    VelocitySample sample;
    sample.t_us = (ta + tb) / 2;
    bool clamped = false;
    const double range_m = interp_range(ranges, sample.t_us, &clamped);
    const EulerAngles angles = interp_orientation(orientations, sample.t_us, &clamped);
    sample.clamped = clamped;
    if (!(range_m > 0.0)) throw_invalid("interpolated range must be > 0");

    EccConfig cfg = ecc_cfg;
    cfg.init = warm;
    try {
      const PairEstimate est = estimate_pair(fa, fb, cfg, opts.polarity_mode);
      const CameraTranslation ct = camera_translation(est.h, cam, range_m, dt_s);
      sample.v_cam = ct.t / dt_s;
      sample.v = to_world_velocity(sample.v_cam, angles, opts.mount, opts.euler_convention);
      sample.ecc_value = est.ecc_value;
      warm = est.h;
      last_v = sample.v;
      last_v_cam = sample.v_cam;
    } catch (const DivergenceError&) {
      sample.gap_fill = true;
    } catch (const DegenerateInputError&) {
      sample.gap_fill = true;
    } catch (const SingularityError&) {
      sample.gap_fill = true;
    }
    if (sample.gap_fill) {
      sample.v = last_v;
      sample.v_cam = last_v_cam;
      sample.ecc_value = 0.0;
      warm = Homography::identity();
    }
    out.push_back(sample);
  }
  return out;
}

}  // namespace evlander
