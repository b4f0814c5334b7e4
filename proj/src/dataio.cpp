#include "evlander/dataio.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "evlander/errors.hpp"

namespace evlander {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path, 0, "missing or unreadable file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw_io("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw_io("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw_io("cannot rename " + tmp.string() + " to " + path + ": " + ec.message());
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::int64_t parse_int(const std::string& field, const std::string& file, long line,
                       const char* col) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(field.c_str(), &end, 10);
  if (field.empty() || end != field.c_str() + field.size() || errno == ERANGE) {
    throw ValidationError(file, line, std::string("column ") + col + ": not an integer: '" +
                                          field + "'");
  }
  return v;
}

double parse_real(const std::string& field, const std::string& file, long line, const char* col) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size()) {
    throw ValidationError(file, line,
                          std::string("column ") + col + ": not a number: '" + field + "'");
  }
  return v;
}

/// Streams non-empty lines with their 1-based numbers; validates the header.
class CsvReader {
public:
  CsvReader(const std::string& path, const std::string& expected_header)
      : path_(path), text_(read_text_file(path)) {
    if (!next_line()) throw ValidationError(path_, 0, "empty file, expected header '" +
                                                          expected_header + "'");
    if (line_ != expected_header) {
      throw ValidationError(path_, line_no_, "bad header '" + line_ + "', expected '" +
                                                 expected_header + "'");
    }
  }

  bool next_row(std::vector<std::string>& fields, std::size_t n_cols) {
    if (!next_line()) return false;
    fields = split_fields(line_);
    if (fields.size() != n_cols) {
      std::ostringstream os;
      os << "expected " << n_cols << " fields, got " << fields.size();
      throw ValidationError(path_, line_no_, os.str());
    }
    return true;
  }

  long line_no() const { return line_no_; }
  const std::string& path() const { return path_; }

private:
  bool next_line() {
    while (pos_ < text_.size()) {
      std::size_t end = text_.find('\n', pos_);
      if (end == std::string::npos) end = text_.size();
      line_ = text_.substr(pos_, end - pos_);
      if (!line_.empty() && line_.back() == '\r') line_.pop_back();
      pos_ = end + 1;
      ++line_no_;
      if (!line_.empty()) return true;
    }
    return false;
  }

  std::string path_;
  std::string text_;
  std::size_t pos_ = 0;
  long line_no_ = 0;
  std::string line_;
};

void require_finite(double v, const std::string& file, long line, const char* col) {
  if (!std::isfinite(v)) {
    throw ValidationError(file, line, std::string("column ") + col + " must be finite");
  }
}

json parse_manifest(const std::string& path) {
  const std::string text = read_text_file(path);
  json m;
  try {
    m = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(path, 0, std::string("invalid JSON: ") + e.what());
  }
  return m;
}

}  // namespace

Sequence read_sequence(const std::string& dir_path) {
  const fs::path dir(dir_path);
  const std::string manifest_path = (dir / "manifest.json").string();
  const std::string events_path = (dir / "events.csv").string();
  const std::string trajectory_path = (dir / "trajectory.csv").string();
  const std::string ranges_path = (dir / "ranges.csv").string();

  Sequence seq;
  {
    const json m = parse_manifest(manifest_path);
    if (!m.is_object()) throw ValidationError(manifest_path, 0, "manifest must be a JSON object");
    for (const char* key : {"id", "split", "sensor_width", "sensor_height"}) {
      if (!m.contains(key))
        throw ValidationError(manifest_path, 0, std::string("missing key '") + key + "'");
    }
    if (!m["id"].is_string() || m["id"].get<std::string>().empty())
      throw ValidationError(manifest_path, 0, "'id' must be a non-empty string");
    seq.id = m["id"].get<std::string>();
    const std::string split = m["split"].is_string() ? m["split"].get<std::string>() : "";
    if (split == "train") {
      seq.split = Split::Train;
    } else if (split == "test") {
      seq.split = Split::Test;
    } else {
      throw ValidationError(manifest_path, 0, "'split' must be \"train\" or \"test\"");
    }
    for (const char* key : {"sensor_width", "sensor_height"}) {
      if (!m[key].is_number_integer() || m[key].get<std::int64_t>() <= 0)
        throw ValidationError(manifest_path, 0, std::string("'") + key +
                                                    "' must be a positive integer");
    }
    seq.stream.sensor_width = m["sensor_width"].get<int>();
    seq.stream.sensor_height = m["sensor_height"].get<int>();
  }

  {
    CsvReader r(events_path, "t_us,x,y,p");
    std::vector<std::string> f;
    std::int64_t prev_t = -1;
    while (r.next_row(f, 4)) {
      Event e;
      e.t = parse_int(f[0], events_path, r.line_no(), "t_us");
      e.x = static_cast<int>(parse_int(f[1], events_path, r.line_no(), "x"));
      e.y = static_cast<int>(parse_int(f[2], events_path, r.line_no(), "y"));
      const std::int64_t p = parse_int(f[3], events_path, r.line_no(), "p");
      if (e.t < 0) throw ValidationError(events_path, r.line_no(), "negative timestamp");
      if (e.t < prev_t)
        throw ValidationError(events_path, r.line_no(),
                              "timestamps must be non-decreasing (" + std::to_string(e.t) +
                                  " after " + std::to_string(prev_t) + ")");
      prev_t = e.t;
      if (e.x < 0 || e.x >= seq.stream.sensor_width || e.y < 0 ||
          e.y >= seq.stream.sensor_height) {
        std::ostringstream os;
        os << "event pixel (" << e.x << ", " << e.y << ") outside sensor "
           << seq.stream.sensor_width << "x" << seq.stream.sensor_height;
        throw ValidationError(events_path, r.line_no(), os.str());
      }
      if (p == -1 || p == 0) {
        e.p = -1;
      } else if (p == 1) {
        e.p = +1;
      } else {
        throw ValidationError(events_path, r.line_no(),
                              "polarity must be -1/+1 (or 0/1), got " + std::to_string(p));
      }
      seq.stream.events.push_back(e);
    }
  }

  {
    CsvReader r(trajectory_path, "t,x,y,z,vx,vy,vz,phi,theta,psi,p,q,r");
    std::vector<std::string> f;
    double prev_t = -std::numeric_limits<double>::infinity();
    static const char* cols[] = {"t", "x", "y", "z", "vx", "vy", "vz",
                                 "phi", "theta", "psi", "p", "q", "r"};
    while (r.next_row(f, 13)) {
      double v[13];
      for (int i = 0; i < 13; ++i) v[i] = parse_real(f[i], trajectory_path, r.line_no(), cols[i]);
      LanderState s;
      s.t = v[0];
      s.pos = Vec3(v[1], v[2], v[3]);
      s.vel = Vec3(v[4], v[5], v[6]);
      s.euler = EulerAngles{v[7], v[8], v[9]};
      s.omega = Vec3(v[10], v[11], v[12]);
      require_finite(s.t, trajectory_path, r.line_no(), "t");
      if (s.t < prev_t)
        throw ValidationError(trajectory_path, r.line_no(), "timestamps must be non-decreasing");
      prev_t = s.t;
      for (int i = 7; i < 13; ++i) require_finite(v[i], trajectory_path, r.line_no(), cols[i]);
      const bool any_nan = s.pos.hasNaN() || s.vel.hasNaN();
      const bool all_nan = s.pos.array().isNaN().all() && s.vel.array().isNaN().all();
      if (seq.split == Split::Test && !all_nan) {
        throw ValidationError(trajectory_path, r.line_no(),
                              "test split requires NaN positions and velocities");
      }
      if (seq.split == Split::Train && any_nan) {
        throw ValidationError(trajectory_path, r.line_no(),
                              "train split requires finite positions and velocities");
      }
      if (seq.split == Split::Train) {
        for (int i = 1; i < 7; ++i)
          require_finite(v[i], trajectory_path, r.line_no(), cols[i]);
      }
      seq.trajectory.push_back(s);
    }
  }

  {
    CsvReader r(ranges_path, "t,d");
    std::vector<std::string> f;
    double prev_t = -std::numeric_limits<double>::infinity();
    while (r.next_row(f, 2)) {
      RangeReading rr;
      rr.t = parse_real(f[0], ranges_path, r.line_no(), "t");
      rr.d = parse_real(f[1], ranges_path, r.line_no(), "d");
      require_finite(rr.t, ranges_path, r.line_no(), "t");
      require_finite(rr.d, ranges_path, r.line_no(), "d");
      if (rr.d <= 0.0)
        throw ValidationError(ranges_path, r.line_no(), "range must be > 0, got " + f[1]);
      if (rr.t < prev_t)
        throw ValidationError(ranges_path, r.line_no(), "timestamps must be non-decreasing");
      prev_t = rr.t;
      seq.ranges.push_back(rr);
    }
  }

  return seq;
}

void write_sequence(const Sequence& seq, const std::string& dir_path) {
  for (const auto& s : seq.trajectory) {
    const bool all_nan = s.pos.array().isNaN().all() && s.vel.array().isNaN().all();
    const bool any_nan = s.pos.hasNaN() || s.vel.hasNaN();
    if (seq.split == Split::Test && !all_nan)
      throw_invalid("write_sequence: test split requires NaN positions and velocities");
    if (seq.split == Split::Train && any_nan)
      throw_invalid("write_sequence: train split requires finite positions and velocities");
  }
  for (const auto& e : seq.stream.events) {
    if (e.p != -1 && e.p != 1)
      throw_invalid("write_sequence: polarity must be -1 or +1, got " + std::to_string(e.p));
  }

  const fs::path dir(dir_path);
  std::error_code ec;
  fs::create_directories(dir, ec);

  json m;
  m["id"] = seq.id;
  m["split"] = seq.split == Split::Train ? "train" : "test";
  m["sensor_width"] = seq.stream.sensor_width;
  m["sensor_height"] = seq.stream.sensor_height;
  write_text_file_atomic((dir / "manifest.json").string(), m.dump(2) + "\n");

  {
    std::ostringstream os;
    os << "t_us,x,y,p\n";
    for (const auto& e : seq.stream.events)
      os << e.t << ',' << e.x << ',' << e.y << ',' << e.p << '\n';
    write_text_file_atomic((dir / "events.csv").string(), os.str());
  }
  {
    std::ostringstream os;
    os << "t,x,y,z,vx,vy,vz,phi,theta,psi,p,q,r\n";
    for (const auto& s : seq.trajectory) {
      os << fmt_real(s.t) << ',' << fmt_real(s.pos.x()) << ',' << fmt_real(s.pos.y()) << ','
         << fmt_real(s.pos.z()) << ',' << fmt_real(s.vel.x()) << ',' << fmt_real(s.vel.y()) << ','
         << fmt_real(s.vel.z()) << ',' << fmt_real(s.euler.phi) << ',' << fmt_real(s.euler.theta)
         << ',' << fmt_real(s.euler.psi) << ',' << fmt_real(s.omega.x()) << ','
         << fmt_real(s.omega.y()) << ',' << fmt_real(s.omega.z()) << '\n';
    }
    write_text_file_atomic((dir / "trajectory.csv").string(), os.str());
  }
  {
    std::ostringstream os;
    os << "t,d\n";
    for (const auto& r : seq.ranges) os << fmt_real(r.t) << ',' << fmt_real(r.d) << '\n';
    write_text_file_atomic((dir / "ranges.csv").string(), os.str());
  }
}

void write_submission(const std::vector<SubmissionEntry>& entries, const std::string& path) {
  std::ostringstream os;
  os << "sequence_id,t,vx,vy,vz\n";
  for (const auto& entry : entries) {
    std::vector<std::int64_t> missing;
    for (std::int64_t t : entry.state_times_us) {
      const auto it = std::lower_bound(
          entry.estimates.begin(), entry.estimates.end(), t,
          [](const TimedVec3& s, std::int64_t q) { return s.t_us < q; });
      if (it == entry.estimates.end() || it->t_us != t) {
        missing.push_back(t);
        continue;
      }
      os << entry.sequence_id << ',' << fmt_real(us_to_s(t)) << ',' << fmt_real(it->v.x()) << ','
         << fmt_real(it->v.y()) << ',' << fmt_real(it->v.z()) << '\n';
    }
    if (!missing.empty()) {
      std::ostringstream err;
      err << "submission for sequence '" << entry.sequence_id << "' is missing estimates at "
          << missing.size() << " state time(s):";
      for (std::size_t i = 0; i < missing.size() && i < 8; ++i)
        err << ' ' << fmt_real(us_to_s(missing[i])) << 's';
      if (missing.size() > 8) err << " ...";
      throw_invalid(err.str());
    }
  }
  write_text_file_atomic(path, os.str());
}

std::vector<SubmissionSeries> read_submission(const std::string& path) {
  CsvReader r(path, "sequence_id,t,vx,vy,vz");
  std::vector<SubmissionSeries> out;
  std::vector<std::string> f;
  while (r.next_row(f, 5)) {
    if (f[0].empty()) throw ValidationError(path, r.line_no(), "empty sequence_id");
    const double t = parse_real(f[1], path, r.line_no(), "t");
    require_finite(t, path, r.line_no(), "t");
    TimedVec3 s;
    s.t_us = s_to_us(t);
    s.v = Vec3(parse_real(f[2], path, r.line_no(), "vx"),
               parse_real(f[3], path, r.line_no(), "vy"),
               parse_real(f[4], path, r.line_no(), "vz"));
    if (s.v.hasNaN()) throw ValidationError(path, r.line_no(), "velocity must be finite");
    if (out.empty() || out.back().sequence_id != f[0]) {
      for (const auto& prev : out) {
        if (prev.sequence_id == f[0])
          throw ValidationError(path, r.line_no(),
                                "rows for sequence '" + f[0] + "' are not contiguous");
      }
      out.push_back(SubmissionSeries{f[0], {}});
    }
    auto& series = out.back().v;
    if (!series.empty() && s.t_us < series.back().t_us)
      throw ValidationError(path, r.line_no(), "timestamps must be non-decreasing per sequence");
    series.push_back(s);
  }
  return out;
}

Summary summarize(const Sequence& seq, const WindowingPolicy& policy) {
  Summary s;
  s.id = seq.id;
  s.split = seq.split;
  s.event_count = static_cast<std::int64_t>(seq.stream.events.size());
  s.duration_s = seq.stream.events.empty() ? 0.0 : us_to_s(seq.stream.events.back().t);
  s.events_per_second =
      s.duration_s > 0.0 ? static_cast<double>(s.event_count) / s.duration_s : 0.0;
  s.n_states = seq.trajectory.size();
  s.n_ranges = seq.ranges.size();
  if (seq.split == Split::Train && !seq.trajectory.empty()) {
    double acc = 0.0;
    for (const auto& st : seq.trajectory) acc += st.vel.norm();
    s.mean_speed_mps = acc / static_cast<double>(seq.trajectory.size());
    s.velocity_stats_available = true;
  }
  if (!seq.ranges.empty()) {
    s.range_min_m = seq.ranges.front().d;
    s.range_max_m = seq.ranges.front().d;
    for (const auto& r : seq.ranges) {
      s.range_min_m = std::min(s.range_min_m, r.d);
      s.range_max_m = std::max(s.range_max_m, r.d);
    }
  }
  s.frame_count = accumulate(seq.stream, policy).size();
  return s;
}

std::string summary_to_json(const Summary& s) {
  json j;
  j["id"] = s.id;
  j["split"] = s.split == Split::Train ? "train" : "test";
  j["event_count"] = s.event_count;
  j["duration_s"] = s.duration_s;
  j["events_per_second"] = s.events_per_second;
  j["n_states"] = s.n_states;
  j["n_ranges"] = s.n_ranges;
  if (s.velocity_stats_available) {
    j["mean_speed_mps"] = s.mean_speed_mps;
  } else {
    j["mean_speed_mps"] = nullptr;  // unavailable for the test split
  }
  j["range_min_m"] = s.range_min_m;
  j["range_max_m"] = s.range_max_m;
  j["frame_count"] = s.frame_count;
  return j.dump(2) + "\n";
}

InterpVec3 interpolate_series(const Vec3Series& series, std::int64_t t_us) {
  if (series.empty()) throw_invalid("interpolate_series: empty series");
  InterpVec3 out;
  if (t_us <= series.front().t_us) {
    out.v = series.front().v;
    out.clamped = t_us < series.front().t_us;
    return out;
  }
  if (t_us >= series.back().t_us) {
    out.v = series.back().v;
    out.clamped = t_us > series.back().t_us;
    return out;
  }
  const auto it = std::lower_bound(series.begin(), series.end(), t_us,
                                   [](const TimedVec3& s, std::int64_t q) { return s.t_us < q; });
  if (it->t_us == t_us) {
    out.v = it->v;
    return out;
  }
  const auto& a = *(it - 1);
  const auto& b = *it;
  const double w = static_cast<double>(t_us - a.t_us) / static_cast<double>(b.t_us - a.t_us);
  out.v = a.v * (1.0 - w) + b.v * w;
  return out;
}

std::vector<RangeSample> range_series(const Sequence& seq) {
  std::vector<RangeSample> out;
  out.reserve(seq.ranges.size());
  for (const auto& r : seq.ranges) out.push_back(RangeSample{s_to_us(r.t), r.d});
  return out;
}

std::vector<OrientationSample> orientation_series(const Sequence& seq) {
  std::vector<OrientationSample> out;
  out.reserve(seq.trajectory.size());
  for (const auto& s : seq.trajectory)
    out.push_back(OrientationSample{s_to_us(s.t), s.euler});
  return out;
}

Vec3Series truth_velocities(const Sequence& seq) {
  Vec3Series out;
  out.reserve(seq.trajectory.size());
  for (const auto& s : seq.trajectory) {
    if (s.vel.hasNaN())
      throw_invalid("sequence '" + seq.id + "' has NaN velocities; no ground truth available");
    out.push_back(TimedVec3{s_to_us(s.t), s.vel});
  }
  return out;
}

std::vector<std::int64_t> state_times_us(const Sequence& seq) {
  std::vector<std::int64_t> out;
  out.reserve(seq.trajectory.size());
  for (const auto& s : seq.trajectory) out.push_back(s_to_us(s.t));
  return out;
}

std::string calibration_to_json(const CalibrationResult& c) {
  json j;
  j["f"] = {c.f.x(), c.f.y(), c.f.z()};
  j["n_samples"] = c.n_samples;
  j["residual_rms"] = c.residual_rms;
  return j.dump(2) + "\n";
}

CalibrationResult calibration_from_json_text(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(source, 0, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("f") || !j["f"].is_array() || j["f"].size() != 3)
    throw ValidationError(source, 0, "calibration must contain a 3-element 'f' array");
  CalibrationResult c;
  for (int i = 0; i < 3; ++i) {
    if (!j["f"][static_cast<std::size_t>(i)].is_number())
      throw ValidationError(source, 0, "'f' entries must be numbers");
    c.f[i] = j["f"][static_cast<std::size_t>(i)].get<double>();
    if (!std::isfinite(c.f[i]))
      throw ValidationError(source, 0, "'f' entries must be finite");
  }
  c.n_samples = j.value("n_samples", 0);
  c.residual_rms = j.value("residual_rms", 0.0);
  return c;
}

}  // namespace evlander
