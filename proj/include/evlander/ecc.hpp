#pragma once

#include <vector>

#include "evlander/events.hpp"
#include "evlander/homography.hpp"
#include "evlander/types.hpp"

namespace evlander {

struct EccConfig {
  int max_iterations = 100;
  double eps = 1e-6;          // stop when the correlation increment falls below this
  double smooth_sigma = 2.0;  // Gaussian pre-smoothing, pixels; must be > 0
  Homography init = Homography::identity();
};

struct EccResult {
  Homography homography;  // maps template (t) pixel coords onto target (t+1)
  double ecc_value = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> rho_trace;  // correlation after each accepted step, [0] = at init
};

/// Direct alignment of target onto template by iterative maximization of the
/// enhanced correlation coefficient over the 8 free homography parameters
/// (forward-additive Gauss-Newton with step halving, so the correlation is
/// non-decreasing across accepted iterations).
///
/// Throws: Error(Config) for bad settings (smooth_sigma <= 0 in particular),
/// DegenerateInputError for textureless frames after smoothing,
/// DivergenceError (with iteration index) when the iteration leaves the
/// valid region or produces non-finite values.
EccResult estimate_ecc(const ImageF& templ, const ImageF& target, const EccConfig& cfg);

/// Frame overload; both frames must be single-channel (merge polarity-split
/// frames upstream).
EccResult estimate_ecc(const Frame& templ, const Frame& target, const EccConfig& cfg);

}  // namespace evlander
