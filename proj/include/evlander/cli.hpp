#pragma once

#include <cstdint>
#include <string>

#include "evlander/ecc.hpp"
#include "evlander/egomotion.hpp"
#include "evlander/events.hpp"

namespace evlander {

/// Effective settings for one invocation. Precedence: command-line flags >
/// --config JSON file > these defaults. Echoed as run_config.json into every
/// output directory.
struct RunConfig {
  WindowingPolicy windowing;
  EccConfig ecc;
  EulerConvention euler_convention = EulerConvention::ZYX;
  std::string calibration_path;
  std::string output_dir;
  std::uint64_t seed = 1;
  int jobs = 0;  // 0 = one thread per hardware core
};

/// Entry point behind main(). Returns the process exit code:
/// 0 success, 1 internal/numerical failure, 2 rejected input or config.
int run_cli(int argc, const char* const* argv);

}  // namespace evlander
