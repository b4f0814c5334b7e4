#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evlander/dataio.hpp"
#include "evlander/egomotion.hpp"
#include "evlander/events.hpp"
#include "evlander/homography.hpp"
#include "evlander/types.hpp"

namespace evlander {

/// Procedural planar scene: seeded band-limited value noise on the z = 0
/// world plane. Deterministic across platforms, so no image fixtures are
/// needed anywhere in the repository.
struct SceneConfig {
  std::uint64_t texture_seed = 1;
  double texture_scale = 2.0;  // meters per base noise feature
  double albedo_lo = 0.25;     // albedo_hi - albedo_lo must be > 0
  double albedo_hi = 0.95;
  int octaves = 3;
};

/// Albedo of the plane at world (x, y), in [albedo_lo, albedo_hi].
double sample_albedo(const SceneConfig& scene, double wx, double wy);

struct Pose {
  Vec3 pos = Vec3(0.0, 0.0, 10.0);  // world, meters; z is altitude above the plane
  EulerAngles att;                  // body-to-world
};

/// Intrinsics plus sensor dimensions for rendering.
struct CameraRig {
  CameraModel intr;
  int width = 256;
  int height = 256;

  static CameraRig make(int w, int h, double focal_px) {
    CameraRig r;
    r.width = w;
    r.height = h;
    r.intr = CameraModel{focal_px, focal_px, (w - 1) / 2.0, (h - 1) / 2.0};
    return r;
  }
};

/// Physical camera-to-body mount: a half-turn about body x, so a level body
/// points the optical axis straight down with image x along world x.
Mat3 camera_mount_physical();

/// Projection of the z = 0 plane for one pose: pixel ~ G * (wx, wy, 1).
Mat3 plane_projection(const CameraRig& rig, const Pose& pose);

/// Exact plane-induced homography taking pixels of the `from` view onto
/// pixels of the `to` view (closed form from the two poses).
Homography truth_homography(const CameraRig& rig, const Pose& from, const Pose& to);

/// Pinhole render of the plane texture. Throws when the camera is not above
/// the plane or any pixel ray misses it (the plane must fill the view).
ImageF render_view(const SceneConfig& scene, const CameraRig& rig, const Pose& pose);

struct RenderedView {
  ImageF image;
  Homography from_reference;  // reference-view pixels onto this view's pixels
};
RenderedView render_view_with_truth(const SceneConfig& scene, const CameraRig& rig,
                                    const Pose& pose, const Pose& reference);

struct VelocityKnot {
  double t = 0.0;  // seconds
  Vec3 v = Vec3::Zero();
};
struct AttitudeKnot {
  double t = 0.0;
  EulerAngles a;
};

/// Descent motion as piecewise-linear velocity and attitude control points
/// (clamped outside the knot span). Event generation renders at
/// frame_rate_internal and interpolates per-pixel threshold crossings
/// linearly inside each render interval.
struct DescentProfile {
  Vec3 initial_pos = Vec3(0.0, 0.0, 30.0);
  std::vector<VelocityKnot> velocity;
  std::vector<AttitudeKnot> attitude;
  double duration = 10.0;             // seconds
  double contrast_threshold = 0.15;   // log-intensity units, > 0
  double frame_rate_internal = 1000.0;  // Hz
  double state_rate = 10.0;           // trajectory rows per second
  double range_rate = 20.0;           // rangefinder readings per second
};

Vec3 velocity_at(const DescentProfile& p, double t);
/// Exact integral of the piecewise-linear velocity.
Vec3 position_at(const DescentProfile& p, double t);
EulerAngles attitude_at(const DescentProfile& p, double t);
/// Body angular rates (p, q, r) implied by the attitude knots.
Vec3 body_rates_at(const DescentProfile& p, double t);
Pose pose_at(const DescentProfile& p, double t);

/// Time-mirrored profile covering the same path in reverse (velocities
/// negated, knot times flipped); used by the polarity-symmetry property.
DescentProfile reversed(const DescentProfile& p);

/// ESIM-style per-pixel reference-crossing event generation against renders
/// at the internal rate. A static profile yields an empty stream.
EventStream generate_events(const SceneConfig& scene, const DescentProfile& profile,
                            const CameraRig& rig);

struct GeneratedSequence {
  Sequence sequence;                // trajectory pos/vel NaN-masked when split = Test
  std::vector<LanderState> truth;   // always the real states
};

/// Full synthetic sequence: events, trajectory at state_rate with exact
/// states, ranges d = altitude / cos(off-nadir) at range_rate.
GeneratedSequence generate_sequence(const SceneConfig& scene, const DescentProfile& profile,
                                    const CameraRig& rig, Split split, const std::string& id);

struct SimProfile {
  std::string id = "descent";
  SceneConfig scene;
  CameraRig rig;
  DescentProfile profile;
};

SimProfile profile_from_json_text(const std::string& text, const std::string& source);
std::string profile_to_json(const SimProfile& p);

}  // namespace evlander
