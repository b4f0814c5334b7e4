#include "evlander/simulator.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "evlander/errors.hpp"

namespace evlander {

using nlohmann::json;

namespace {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Uniform [0, 1) from a lattice point; pure integer mixing, no RNG state.
inline double lattice_value(std::uint64_t seed, std::int64_t ix, std::int64_t iy) {
  const std::uint64_t h =
      mix64(mix64(seed ^ static_cast<std::uint64_t>(ix)) ^ static_cast<std::uint64_t>(iy));
  return static_cast<double>(h >> 11) * (1.0 / 9007199254740992.0);
}

inline double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

double value_noise(std::uint64_t seed, double x, double y) {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const auto ix = static_cast<std::int64_t>(fx);
  const auto iy = static_cast<std::int64_t>(fy);
  const double tx = fade(x - fx);
  const double ty = fade(y - fy);
  const double v00 = lattice_value(seed, ix, iy);
  const double v10 = lattice_value(seed, ix + 1, iy);
  const double v01 = lattice_value(seed, ix, iy + 1);
  const double v11 = lattice_value(seed, ix + 1, iy + 1);
  const double a = v00 + (v10 - v00) * tx;
  const double b = v01 + (v11 - v01) * tx;
  return a + (b - a) * ty;
}

void check_scene(const SceneConfig& scene) {
  if (!(scene.albedo_hi - scene.albedo_lo > 0.0))
    throw_config("scene albedo range must have positive width");
  if (!(scene.albedo_lo >= 0.0 && scene.albedo_hi <= 1.0))
    throw_config("scene albedo range must lie within [0, 1]");
  if (!(scene.texture_scale > 0.0)) throw_config("texture_scale must be > 0");
  if (scene.octaves < 1) throw_config("octaves must be >= 1");
}

}  // namespace

double sample_albedo(const SceneConfig& scene, double wx, double wy) {
  const double u = wx / scene.texture_scale;
  const double v = wy / scene.texture_scale;
  double sum = 0.0;
  double amp = 1.0;
  double norm = 0.0;
  double freq = 1.0;
  for (int o = 0; o < scene.octaves; ++o) {
    sum += amp * value_noise(scene.texture_seed + static_cast<std::uint64_t>(o) * 0x51ed2701ULL,
                             u * freq, v * freq);
    norm += amp;
    amp *= 0.5;
    freq *= 2.0;
  }
  // Octave averaging concentrates values near the middle; stretch so the
  // texture actually spans the albedo range (clamped tails stay flat).
  const double stretched = std::clamp(0.5 + 2.5 * (sum / norm - 0.5), 0.0, 1.0);
  return scene.albedo_lo + (scene.albedo_hi - scene.albedo_lo) * stretched;
}

Mat3 camera_mount_physical() {
  Mat3 m;
  m << 1, 0, 0, 0, -1, 0, 0, 0, -1;
  return m;
}

Mat3 plane_projection(const CameraRig& rig, const Pose& pose) {
  if (!(pose.pos.z() > 0.0)) throw_invalid("camera must be above the z = 0 plane");
  Mat3 k;
  k << rig.intr.fx, 0, rig.intr.cx, 0, rig.intr.fy, rig.intr.cy, 0, 0, 1;
  const Mat3 r_wc = rotation_matrix(pose.att) * camera_mount_physical();
  Mat3 plane_basis;  // world point (wx, wy, 1)h -> (wx, wy, 0) - camera center
  plane_basis.col(0) = Vec3::UnitX();
  plane_basis.col(1) = Vec3::UnitY();
  plane_basis.col(2) = -pose.pos;
  return k * r_wc.transpose() * plane_basis;
}

Homography truth_homography(const CameraRig& rig, const Pose& from, const Pose& to) {
  const Mat3 ga = plane_projection(rig, from);
  const Mat3 gb = plane_projection(rig, to);
  return Homography::from_matrix(gb * ga.inverse());
}

ImageF render_view(const SceneConfig& scene, const CameraRig& rig, const Pose& pose) {
  check_scene(scene);
  if (!(pose.pos.z() > 0.0)) throw_invalid("camera must be above the z = 0 plane");
  const Mat3 r_wc = rotation_matrix(pose.att) * camera_mount_physical();
  ImageF img(rig.height, rig.width);
  for (int py = 0; py < rig.height; ++py) {
    for (int px = 0; px < rig.width; ++px) {
      const Vec3 d_cam((px - rig.intr.cx) / rig.intr.fx, (py - rig.intr.cy) / rig.intr.fy, 1.0);
      const Vec3 d_w = r_wc * d_cam;
      if (!(d_w.z() < -1e-12)) {
        std::ostringstream os;
        os << "plane does not fill the view: ray through pixel (" << px << ", " << py
           << ") misses the z = 0 plane";
        throw_invalid(os.str());
      }
      const double depth = -pose.pos.z() / d_w.z();
      const double wx = pose.pos.x() + depth * d_w.x();
      const double wy = pose.pos.y() + depth * d_w.y();
      img(py, px) = static_cast<float>(sample_albedo(scene, wx, wy));
    }
  }
  return img;
}

RenderedView render_view_with_truth(const SceneConfig& scene, const CameraRig& rig,
                                    const Pose& pose, const Pose& reference) {
  RenderedView out{render_view(scene, rig, pose), truth_homography(rig, reference, pose)};
  return out;
}

namespace {

void check_profile(const DescentProfile& p) {
  if (p.velocity.empty()) throw_config("profile needs at least one velocity knot");
  if (p.attitude.empty()) throw_config("profile needs at least one attitude knot");
  for (std::size_t i = 1; i < p.velocity.size(); ++i)
    if (p.velocity[i].t < p.velocity[i - 1].t)
      throw_config("velocity knots must be sorted by time");
  for (std::size_t i = 1; i < p.attitude.size(); ++i)
    if (p.attitude[i].t < p.attitude[i - 1].t)
      throw_config("attitude knots must be sorted by time");
  if (!(p.duration > 0.0)) throw_config("duration must be > 0");
  if (!(p.contrast_threshold > 0.0)) throw_config("contrast_threshold must be > 0");
  if (!(p.frame_rate_internal > 0.0)) throw_config("frame_rate_internal must be > 0");
  if (!(p.state_rate > 0.0)) throw_config("state_rate must be > 0");
  if (!(p.range_rate > 0.0)) throw_config("range_rate must be > 0");
  // Altitude must stay positive; sample densely plus at every knot.
  const int n = 256;
  double min_alt = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) min_alt = std::min(min_alt, position_at(p, p.duration * i / n).z());
  for (const auto& k : p.velocity)
    if (k.t >= 0.0 && k.t <= p.duration) min_alt = std::min(min_alt, position_at(p, k.t).z());
  if (!(min_alt > 0.0)) throw_config("profile altitude must stay > 0 for the whole descent");
}

}  // namespace

Vec3 velocity_at(const DescentProfile& p, double t) {
  const auto& ks = p.velocity;
  if (t <= ks.front().t) return ks.front().v;
  if (t >= ks.back().t) return ks.back().v;
  std::size_t i = 1;
  while (ks[i].t < t) ++i;
  const auto& a = ks[i - 1];
  const auto& b = ks[i];
  if (b.t == a.t) return b.v;
  const double w = (t - a.t) / (b.t - a.t);
  return a.v * (1.0 - w) + b.v * w;
}

Vec3 position_at(const DescentProfile& p, double t) {
  const auto& ks = p.velocity;
  // Velocity is constant before the first knot.
  if (t <= ks.front().t) return p.initial_pos + ks.front().v * t;
  // Trapezoid rule from 0, exact on a piecewise-linear integrand.
  Vec3 disp = Vec3::Zero();
  double cursor = 0.0;
  Vec3 v_cursor = velocity_at(p, cursor);
  for (std::size_t i = 0; i < ks.size() && ks[i].t < t; ++i) {
    if (ks[i].t <= cursor) continue;
    const double seg_end = ks[i].t;
    const Vec3 v_end = ks[i].v;
    disp += 0.5 * (v_cursor + v_end) * (seg_end - cursor);
    cursor = seg_end;
    v_cursor = v_end;
  }
  const Vec3 v_t = velocity_at(p, t);
  disp += 0.5 * (v_cursor + v_t) * (t - cursor);
  return p.initial_pos + disp;
}

EulerAngles attitude_at(const DescentProfile& p, double t) {
  const auto& ks = p.attitude;
  auto to_vec = [](const EulerAngles& a) { return Vec3(a.phi, a.theta, a.psi); };
  Vec3 v;
  if (t <= ks.front().t) {
    v = to_vec(ks.front().a);
  } else if (t >= ks.back().t) {
    v = to_vec(ks.back().a);
  } else {
    std::size_t i = 1;
    while (ks[i].t < t) ++i;
    const double w = (t - ks[i - 1].t) / (ks[i].t - ks[i - 1].t);
    v = to_vec(ks[i - 1].a) * (1.0 - w) + to_vec(ks[i].a) * w;
  }
  return EulerAngles{v.x(), v.y(), v.z()};
}

Vec3 body_rates_at(const DescentProfile& p, double t) {
  const auto& ks = p.attitude;
  Vec3 euler_rate = Vec3::Zero();
  if (ks.size() >= 2 && t > ks.front().t && t < ks.back().t) {
    std::size_t i = 1;
    while (ks[i].t < t) ++i;
    const double dt = ks[i].t - ks[i - 1].t;
    if (dt > 0.0) {
      euler_rate = (Vec3(ks[i].a.phi, ks[i].a.theta, ks[i].a.psi) -
                    Vec3(ks[i - 1].a.phi, ks[i - 1].a.theta, ks[i - 1].a.psi)) /
                   dt;
    }
  }
  // Euler-rate to body-rate map for the Z-Y-X convention.
  const EulerAngles a = attitude_at(p, t);
  const double sp = std::sin(a.phi), cp = std::cos(a.phi);
  const double st = std::sin(a.theta), ct = std::cos(a.theta);
  Vec3 body;
  body.x() = euler_rate.x() - euler_rate.z() * st;
  body.y() = euler_rate.y() * cp + euler_rate.z() * ct * sp;
  body.z() = -euler_rate.y() * sp + euler_rate.z() * ct * cp;
  return body;
}

Pose pose_at(const DescentProfile& p, double t) {
  return Pose{position_at(p, t), attitude_at(p, t)};
}

DescentProfile reversed(const DescentProfile& p) {
  DescentProfile r = p;
  r.initial_pos = position_at(p, p.duration);
  r.velocity.clear();
  r.attitude.clear();
  for (auto it = p.velocity.rbegin(); it != p.velocity.rend(); ++it)
    r.velocity.push_back(VelocityKnot{p.duration - it->t, -it->v});
  for (auto it = p.attitude.rbegin(); it != p.attitude.rend(); ++it)
    r.attitude.push_back(AttitudeKnot{p.duration - it->t, it->a});
  return r;
}

EventStream generate_events(const SceneConfig& scene, const DescentProfile& profile,
                            const CameraRig& rig) {
  check_scene(scene);
  check_profile(profile);

  const auto n_frames = static_cast<std::int64_t>(std::llround(
      profile.duration * profile.frame_rate_internal));
  if (n_frames < 1) throw_config("duration times frame_rate_internal must be at least 1");
  const double dt = 1.0 / profile.frame_rate_internal;
  const int n_px = rig.width * rig.height;

  EventStream stream;
  stream.sensor_width = rig.width;
  stream.sensor_height = rig.height;

  auto log_render = [&](double t) {
    ImageF img = render_view(scene, rig, pose_at(profile, t));
    // Log intensity with a floor keeps the contrast threshold meaningful
    // across the whole albedo range.
    return (img.max(1e-4f)).log();
  };

  ImageF prev = log_render(0.0);
  std::vector<double> ref(static_cast<std::size_t>(n_px));
  for (int y = 0; y < rig.height; ++y)
    for (int x = 0; x < rig.width; ++x) ref[static_cast<std::size_t>(y) * rig.width + x] = prev(y, x);
  const double c = profile.contrast_threshold;

  std::vector<Event> interval;  // per-interval buffer, merged sorted by (t, y, x)
  for (std::int64_t k = 1; k <= n_frames; ++k) {
    const double t0 = (k - 1) * dt;
    const double t1 = k * dt;
    const ImageF cur = log_render(t1);
    interval.clear();
    for (int y = 0; y < rig.height; ++y) {
      for (int x = 0; x < rig.width; ++x) {
        const int idx = y * rig.width + x;
        const double l0 = prev(y, x);
        const double l1 = cur(y, x);
        double r = ref[idx];
        if (l1 > l0) {
          while (l1 - r >= c) {
            r += c;
            const double frac = (r - l0) / (l1 - l0);
            interval.push_back(Event{s_to_us(t0 + frac * dt), x, y, +1});
          }
        } else if (l1 < l0) {
          while (r - l1 >= c) {
            r -= c;
            const double frac = (r - l0) / (l1 - l0);
            interval.push_back(Event{s_to_us(t0 + frac * dt), x, y, -1});
          }
        }
        ref[idx] = r;
      }
    }
    std::stable_sort(interval.begin(), interval.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
    stream.events.insert(stream.events.end(), interval.begin(), interval.end());
    prev = cur;
  }
  return stream;
}

GeneratedSequence generate_sequence(const SceneConfig& scene, const DescentProfile& profile,
                                    const CameraRig& rig, Split split, const std::string& id) {
  GeneratedSequence out;
  out.sequence.id = id;
  out.sequence.split = split;
  out.sequence.stream = generate_events(scene, profile, rig);

  const auto n_states = static_cast<std::int64_t>(
      std::llround(profile.duration * profile.state_rate));
  for (std::int64_t i = 0; i <= n_states; ++i) {
    const double t = std::min(profile.duration, i / profile.state_rate);
    LanderState s;
    s.t = t;
    s.pos = position_at(profile, t);
    s.vel = velocity_at(profile, t);
    s.euler = attitude_at(profile, t);
    s.omega = body_rates_at(profile, t);
    out.truth.push_back(s);
  }
  out.sequence.trajectory = out.truth;
  if (split == Split::Test) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (auto& s : out.sequence.trajectory) {
      s.pos = Vec3(nan, nan, nan);
      s.vel = Vec3(nan, nan, nan);
    }
  }

  const auto n_ranges = static_cast<std::int64_t>(
      std::llround(profile.duration * profile.range_rate));
  for (std::int64_t i = 0; i <= n_ranges; ++i) {
    const double t = std::min(profile.duration, i / profile.range_rate);
    const Pose pose = pose_at(profile, t);
    // Distance to the plane along the body -z ray (the rangefinder axis):
    // altitude / cos(off-nadir angle).
    const double cos_off_nadir = rotation_matrix(pose.att)(2, 2);
    if (!(cos_off_nadir > 1e-6))
      throw_config("rangefinder axis nearly parallel to the plane; profile attitude too steep");
    out.sequence.ranges.push_back(RangeReading{t, pose.pos.z() / cos_off_nadir});
  }
  return out;
}

SimProfile profile_from_json_text(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(source, 0, std::string("invalid JSON: ") + e.what());
  }
  auto fail = [&source](const std::string& msg) -> void {
    throw ValidationError(source, 0, msg);
  };
  if (!j.is_object()) fail("profile must be a JSON object");

  SimProfile p;
  p.id = j.value("id", std::string("descent"));
  if (p.id.empty()) fail("'id' must be non-empty");

  if (j.contains("scene")) {
    const json& s = j["scene"];
    p.scene.texture_seed = s.value("texture_seed", p.scene.texture_seed);
    p.scene.texture_scale = s.value("texture_scale", p.scene.texture_scale);
    if (s.contains("albedo_range")) {
      if (!s["albedo_range"].is_array() || s["albedo_range"].size() != 2)
        fail("'scene.albedo_range' must be [lo, hi]");
      p.scene.albedo_lo = s["albedo_range"][0].get<double>();
      p.scene.albedo_hi = s["albedo_range"][1].get<double>();
    }
    p.scene.octaves = s.value("octaves", p.scene.octaves);
  }

  {
    const json c = j.value("camera", json::object());
    const int w = c.value("width", 256);
    const int h = c.value("height", 256);
    if (w < 8 || h < 8) fail("'camera.width'/'camera.height' must be >= 8");
    const double f = c.value("focal_px", 120.0);
    if (!(f > 0.0)) fail("'camera.focal_px' must be > 0");
    p.rig = CameraRig::make(w, h, f);
  }

  if (!j.contains("profile") || !j["profile"].is_object()) fail("missing 'profile' object");
  const json& pr = j["profile"];
  if (pr.contains("initial_pos")) {
    if (!pr["initial_pos"].is_array() || pr["initial_pos"].size() != 3)
      fail("'profile.initial_pos' must be [x, y, z]");
    for (int i = 0; i < 3; ++i) p.profile.initial_pos[i] = pr["initial_pos"][i].get<double>();
  }
  auto read_knots = [&](const char* key, auto& dst, auto make) {
    if (!pr.contains(key) || !pr[key].is_array() || pr[key].empty())
      fail(std::string("'profile.") + key + "' must be a non-empty array of knots");
    for (const auto& k : pr[key]) {
      if (!k.is_object() || !k.contains("t")) fail(std::string("knot in 'profile.") + key +
                                                   "' needs a 't' field");
      dst.push_back(make(k));
    }
  };
  read_knots("velocity", p.profile.velocity, [&](const json& k) {
    if (!k.contains("v") || !k["v"].is_array() || k["v"].size() != 3)
      fail("velocity knot needs 'v': [vx, vy, vz]");
    return VelocityKnot{k["t"].get<double>(),
                        Vec3(k["v"][0].get<double>(), k["v"][1].get<double>(),
                             k["v"][2].get<double>())};
  });
  read_knots("attitude", p.profile.attitude, [&](const json& k) {
    if (!k.contains("rpy") || !k["rpy"].is_array() || k["rpy"].size() != 3)
      fail("attitude knot needs 'rpy': [phi, theta, psi]");
    return AttitudeKnot{k["t"].get<double>(),
                        EulerAngles{k["rpy"][0].get<double>(), k["rpy"][1].get<double>(),
                                    k["rpy"][2].get<double>()}};
  });
  p.profile.duration = pr.value("duration", p.profile.duration);
  p.profile.contrast_threshold = pr.value("contrast_threshold", p.profile.contrast_threshold);
  p.profile.frame_rate_internal = pr.value("frame_rate_internal", p.profile.frame_rate_internal);
  p.profile.state_rate = pr.value("state_rate", p.profile.state_rate);
  p.profile.range_rate = pr.value("range_rate", p.profile.range_rate);
  check_scene(p.scene);
  check_profile(p.profile);
  return p;
}

std::string profile_to_json(const SimProfile& p) {
  json j;
  j["id"] = p.id;
  j["scene"] = {{"texture_seed", p.scene.texture_seed},
                {"texture_scale", p.scene.texture_scale},
                {"albedo_range", {p.scene.albedo_lo, p.scene.albedo_hi}},
                {"octaves", p.scene.octaves}};
  j["camera"] = {{"width", p.rig.width},
                 {"height", p.rig.height},
                 {"focal_px", p.rig.intr.fx}};
  json vel = json::array();
  for (const auto& k : p.profile.velocity)
    vel.push_back({{"t", k.t}, {"v", {k.v.x(), k.v.y(), k.v.z()}}});
  json att = json::array();
  for (const auto& k : p.profile.attitude)
    att.push_back({{"t", k.t}, {"rpy", {k.a.phi, k.a.theta, k.a.psi}}});
  j["profile"] = {{"initial_pos",
                   {p.profile.initial_pos.x(), p.profile.initial_pos.y(),
                    p.profile.initial_pos.z()}},
                  {"velocity", vel},
                  {"attitude", att},
                  {"duration", p.profile.duration},
                  {"contrast_threshold", p.profile.contrast_threshold},
                  {"frame_rate_internal", p.profile.frame_rate_internal},
                  {"state_rate", p.profile.state_rate},
                  {"range_rate", p.profile.range_rate}};
  return j.dump(2) + "\n";
}

}  // namespace evlander
