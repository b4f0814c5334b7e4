#pragma once

#include <cstdint>
#include <vector>

#include "evlander/types.hpp"

namespace evlander {

/// One sensor event: pixel (x, y) saw a brightness change of sign p
/// at time t (microseconds since sequence start).
struct Event {
  std::int64_t t = 0;
  int x = 0;
  int y = 0;
  int p = +1;  // polarity, -1 or +1
};

struct EventStream {
  int sensor_width = 0;
  int sensor_height = 0;
  std::vector<Event> events;  // sorted by t, non-decreasing

  bool empty() const { return events.empty(); }
  std::size_t size() const { return events.size(); }
};

/// Throws if events are unsorted, out of bounds, negative-time or carry a
/// bad polarity. `source` names the offending input in error messages.
void validate_stream(const EventStream& stream, const std::string& source = "stream");

enum class WindowingMode { FixedTime, FixedCount };

struct WindowingPolicy {
  WindowingMode mode = WindowingMode::FixedTime;
  std::int64_t dt_us = 100000;  // FixedTime window length
  std::int64_t count = 10000;   // FixedCount events per window
  bool polarity_split = false;
};

/// Binary occupancy image over one window. channels = 2 when the
/// accumulation split polarities (channel 0 = negative, 1 = positive).
/// Pixel storage is row-major per channel. t_end is exclusive.
struct Frame {
  std::int64_t t_start = 0;
  std::int64_t t_end = 0;
  int width = 0;
  int height = 0;
  int channels = 1;
  std::int64_t event_count = 0;
  bool partial = false;
  std::vector<std::uint8_t> pixels;

  bool pixel(int channel, int x, int y) const {
    return pixels[static_cast<std::size_t>(channel) * width * height +
                  static_cast<std::size_t>(y) * width + x] != 0;
  }
  void set_pixel(int channel, int x, int y) {
    pixels[static_cast<std::size_t>(channel) * width * height +
           static_cast<std::size_t>(y) * width + x] = 1;
  }
  std::int64_t set_pixel_count() const;
};

/// Splits the stream into frames. FixedTime windows are anchored at t = 0 of
/// the sequence; windows without events are skipped. FixedCount windows take
/// t_start/t_end from their first/last event. A trailing window that does not
/// reach its nominal extent is flagged partial.
std::vector<Frame> accumulate(const EventStream& stream, const WindowingPolicy& policy);

/// Set-pixel fraction in [0, 1] over all channels.
double frame_density(const Frame& frame);

/// Frame as a float image; channel = -1 merges all channels (logical OR).
ImageF to_image(const Frame& frame, int channel = -1);

/// Collapses a polarity-split frame to channels = 1 (logical OR). A
/// single-channel frame passes through unchanged.
Frame merge_channels(const Frame& frame);

}  // namespace evlander
