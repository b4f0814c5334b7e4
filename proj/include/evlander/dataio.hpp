#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evlander/calibration.hpp"
#include "evlander/egomotion.hpp"
#include "evlander/events.hpp"
#include "evlander/types.hpp"

namespace evlander {

/// One trajectory row. pos/vel may be NaN (test split hides them);
/// euler and omega are always finite. t is decimal seconds in files and
/// in this struct; conversion to microseconds happens where the pipeline
/// consumes the data.
struct LanderState {
  double t = 0.0;
  Vec3 pos = Vec3::Zero();
  Vec3 vel = Vec3::Zero();
  EulerAngles euler;
  Vec3 omega = Vec3::Zero();
};

struct RangeReading {
  double t = 0.0;  // seconds
  double d = 0.0;  // meters, > 0
};

enum class Split { Train, Test };

/// A landing sequence stored as a directory of plain-text files:
///   manifest.json   {"id", "split", "sensor_width", "sensor_height"}
///   events.csv      t_us,x,y,p        (integers; p in {-1,+1}, 0/1 accepted on read)
///   trajectory.csv  t,x,y,z,vx,vy,vz,phi,theta,psi,p,q,r   (seconds; NaN as "nan")
///   ranges.csv      t,d               (seconds, meters)
/// All files UTF-8 with LF endings and '.' decimal separator.
struct Sequence {
  std::string id;
  Split split = Split::Train;
  EventStream stream;
  std::vector<LanderState> trajectory;
  std::vector<RangeReading> ranges;
};

/// Parses and validates a sequence directory. Every rejection names the file
/// and line (ValidationError, exit code 2 at the CLI). The Train split
/// requires finite pos/vel in every state; Test requires them all-NaN.
Sequence read_sequence(const std::string& dir_path);

/// Inverse of read_sequence: read(write(s)) == s, integers exact and reals
/// round-tripped through 17-significant-digit decimal.
void write_sequence(const Sequence& seq, const std::string& dir_path);

/// Per-sequence block of a submission: velocities sampled exactly at the
/// sequence's trajectory timestamps (interpolation is the caller's job).
struct SubmissionEntry {
  std::string sequence_id;
  std::vector<std::int64_t> state_times_us;  // required coverage
  Vec3Series estimates;                      // must contain every state time
};

/// Writes CSV rows sequence_id,t,vx,vy,vz (t in seconds), one per state
/// time, in input order. Missing timestamps abort with the uncovered times
/// listed.
void write_submission(const std::vector<SubmissionEntry>& entries, const std::string& path);

struct SubmissionSeries {
  std::string sequence_id;
  Vec3Series v;
};

/// Parses a submission-format CSV (the truth.csv written for test splits
/// uses the same shape). Rows grouped by sequence id, order preserved.
std::vector<SubmissionSeries> read_submission(const std::string& path);

struct Summary {
  std::string id;
  Split split = Split::Train;
  std::int64_t event_count = 0;
  double duration_s = 0.0;  // sequence span from t = 0 to the last event
  double events_per_second = 0.0;
  std::size_t n_states = 0;
  std::size_t n_ranges = 0;
  bool velocity_stats_available = false;  // false for the test split
  double mean_speed_mps = 0.0;            // mean |v| over states, train only
  double range_min_m = 0.0;
  double range_max_m = 0.0;
  std::size_t frame_count = 0;  // accumulation preview under the given policy
};

Summary summarize(const Sequence& seq, const WindowingPolicy& policy);
std::string summary_to_json(const Summary& s);

struct InterpVec3 {
  Vec3 v = Vec3::Zero();
  bool clamped = false;  // query fell outside the series span
};

/// Piecewise-linear lookup on a sorted series; endpoint-clamped outside the
/// span. Throws on an empty series.
InterpVec3 interpolate_series(const Vec3Series& series, std::int64_t t_us);

// Pipeline adapters: file-level seconds converted to the internal
// microsecond clock once, here.
std::vector<RangeSample> range_series(const Sequence& seq);
std::vector<OrientationSample> orientation_series(const Sequence& seq);
/// Ground-truth velocities (train split); throws on NaN velocities.
Vec3Series truth_velocities(const Sequence& seq);
std::vector<std::int64_t> state_times_us(const Sequence& seq);

/// {"f": [fx, fy, fz], "n_samples": n, "residual_rms": r}
std::string calibration_to_json(const CalibrationResult& c);
CalibrationResult calibration_from_json_text(const std::string& text, const std::string& source);

// Small file helpers shared by the CLI (atomic write = temp + rename).
std::string read_text_file(const std::string& path);
void write_text_file_atomic(const std::string& path, const std::string& content);
/// 17-significant-digit decimal, "nan" for NaN; the round-trip format.
std::string fmt_real(double v);

}  // namespace evlander
