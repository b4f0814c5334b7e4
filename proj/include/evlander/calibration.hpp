#pragma once

#include <array>
#include <vector>

#include "evlander/types.hpp"

namespace evlander {

struct CalibrationResult {
  Vec3 f = Vec3::Ones();     // per-axis velocity scale factors
  double residual_rms = 0.0;  // m/s, after scaling, over all samples and axes
  int n_samples = 0;
};

/// SURROGATE score: mean of the three per-axis velocity RMSEs. The
/// competition's own score function is not public, so every output labels
/// this value SURROGATE.
struct TrajectoryScore {
  Vec3 rmse_per_axis = Vec3::Zero();  // m/s
  double score = 0.0;
};

/// Closed-form per-axis least squares: f_a = sum(est_a * truth_a) / sum(est_a^2),
/// pooled over all sequences. Series must be aligned sample-for-sample
/// (truth interpolated to the estimate timestamps beforehand).
/// No bias term is fitted.
CalibrationResult fit_scale_factors(const std::vector<Vec3Series>& estimated,
                                    const std::vector<Vec3Series>& truth);

/// Elementwise per-axis multiply; timestamps untouched.
Vec3Series apply_calibration(const Vec3Series& samples, const Vec3& f);

TrajectoryScore score_trajectory(const Vec3Series& estimated, const Vec3Series& truth);

struct NormalizedTrajectory {
  Vec3Series series;
  std::array<bool, 3> constant{{false, false, false}};  // axis std < 1e-12, mapped to zeros
};

/// Per axis: (v - mean) / std with population std. Constant axes become
/// zeros and are flagged rather than dividing by ~0.
NormalizedTrajectory normalize_trajectory(const Vec3Series& series);

/// Standard Pearson correlation of two aligned scalar series.
double pearson(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace evlander
