#include "evlander/events.hpp"

#include <algorithm>
#include <string>

#include "evlander/errors.hpp"

namespace evlander {

void validate_stream(const EventStream& stream, const std::string& source) {
  if (stream.sensor_width <= 0 || stream.sensor_height <= 0) {
    throw_invalid(source + ": sensor dimensions must be positive");
  }
  std::int64_t prev_t = 0;
  for (std::size_t i = 0; i < stream.events.size(); ++i) {
    const Event& e = stream.events[i];
    if (e.t < 0) {
      throw_invalid(source + ": event " + std::to_string(i) + " has negative timestamp");
    }
    if (i > 0 && e.t < prev_t) {
      throw_invalid(source + ": event " + std::to_string(i) +
                    " breaks timestamp order (t=" + std::to_string(e.t) +
                    " after t=" + std::to_string(prev_t) + ")");
    }
    if (e.x < 0 || e.x >= stream.sensor_width || e.y < 0 || e.y >= stream.sensor_height) {
      throw_invalid(source + ": event " + std::to_string(i) + " out of sensor bounds (x=" +
                    std::to_string(e.x) + ", y=" + std::to_string(e.y) + ")");
    }
    if (e.p != -1 && e.p != +1) {
      throw_invalid(source + ": event " + std::to_string(i) + " has polarity " +
                    std::to_string(e.p) + ", expected -1 or +1");
    }
    prev_t = e.t;
  }
}

std::int64_t Frame::set_pixel_count() const {
  return std::count_if(pixels.begin(), pixels.end(), [](std::uint8_t v) { return v != 0; });
}

namespace {

Frame make_frame(const EventStream& stream, const WindowingPolicy& policy,
                 std::size_t begin, std::size_t end,
                 std::int64_t t_start, std::int64_t t_end, bool partial) {
  Frame f;
  f.t_start = t_start;
  f.t_end = t_end;
  f.width = stream.sensor_width;
  f.height = stream.sensor_height;
  f.channels = policy.polarity_split ? 2 : 1;
  f.event_count = static_cast<std::int64_t>(end - begin);
  f.partial = partial;
  f.pixels.assign(static_cast<std::size_t>(f.channels) * f.width * f.height, 0);
  for (std::size_t i = begin; i < end; ++i) {
    const Event& e = stream.events[i];
    const int ch = policy.polarity_split ? (e.p > 0 ? 1 : 0) : 0;
    f.set_pixel(ch, e.x, e.y);
  }
  return f;
}

}  // namespace

std::vector<Frame> accumulate(const EventStream& stream, const WindowingPolicy& policy) {
  validate_stream(stream);
  if (policy.mode == WindowingMode::FixedTime && policy.dt_us <= 0) {
    throw_config("accumulate: FixedTime windowing requires dt_us > 0");
  }
  if (policy.mode == WindowingMode::FixedCount && policy.count <= 0) {
    throw_config("accumulate: FixedCount windowing requires count > 0");
  }

  std::vector<Frame> frames;
  if (stream.events.empty()) return frames;

  const std::int64_t t_last = stream.events.back().t;

  if (policy.mode == WindowingMode::FixedTime) {
    const std::int64_t dt = policy.dt_us;
    std::size_t i = 0;
    while (i < stream.events.size()) {
      const std::int64_t k = stream.events[i].t / dt;
      const std::int64_t w_start = k * dt;
      const std::int64_t w_end = w_start + dt;
      std::size_t j = i;
      while (j < stream.events.size() && stream.events[j].t < w_end) ++j;
      // The stream extends through the window iff an event lands in the
      // window's final microsecond; otherwise the trailing window is partial.
      const bool partial = (j == stream.events.size()) && (t_last + 1 < w_end);
      frames.push_back(make_frame(stream, policy, i, j, w_start, w_end, partial));
      i = j;
    }
  } else {
    const std::size_t n = stream.events.size();
    const std::size_t count = static_cast<std::size_t>(policy.count);
    for (std::size_t i = 0; i < n; i += count) {
      const std::size_t j = std::min(i + count, n);
      const std::int64_t w_start = stream.events[i].t;
      const std::int64_t w_end = stream.events[j - 1].t + 1;
      const bool partial = (j - i) < count;
      frames.push_back(make_frame(stream, policy, i, j, w_start, w_end, partial));
    }
  }
  return frames;
}

double frame_density(const Frame& frame) {
  const double cells = static_cast<double>(frame.width) * frame.height * frame.channels;
  if (cells <= 0) return 0.0;
  return static_cast<double>(frame.set_pixel_count()) / cells;
}

ImageF to_image(const Frame& frame, int channel) {
  ImageF img = ImageF::Zero(frame.height, frame.width);
  for (int c = 0; c < frame.channels; ++c) {
    if (channel >= 0 && c != channel) continue;
    for (int y = 0; y < frame.height; ++y) {
      for (int x = 0; x < frame.width; ++x) {
        if (frame.pixel(c, x, y)) img(y, x) = 1.0f;
      }
    }
  }
  return img;
}

Frame merge_channels(const Frame& frame) {
  if (frame.channels == 1) return frame;
  Frame out = frame;
  out.channels = 1;
  out.pixels.assign(static_cast<std::size_t>(frame.width) * frame.height, 0);
  for (int c = 0; c < frame.channels; ++c) {
    for (int y = 0; y < frame.height; ++y) {
      for (int x = 0; x < frame.width; ++x) {
        if (frame.pixel(c, x, y)) out.set_pixel(0, x, y);
      }
    }
  }
  return out;
}

}  // namespace evlander
