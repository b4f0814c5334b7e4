#include "evlander/calibration.hpp"

#include <cmath>
#include <sstream>

#include "evlander/errors.hpp"

namespace evlander {

namespace {

void check_aligned(const Vec3Series& est, const Vec3Series& truth, const char* what) {
  if (est.size() != truth.size()) {
    std::ostringstream os;
    os << what << ": series lengths differ (" << est.size() << " vs " << truth.size() << ")";
    throw_invalid(os.str());
  }
  for (std::size_t i = 0; i < est.size(); ++i) {
    if (est[i].t_us != truth[i].t_us) {
      std::ostringstream os;
      os << what << ": timestamps differ at sample " << i << " (" << est[i].t_us << " vs "
         << truth[i].t_us << ")";
      throw_invalid(os.str());
    }
  }
}

}  // namespace

CalibrationResult fit_scale_factors(const std::vector<Vec3Series>& estimated,
                                    const std::vector<Vec3Series>& truth) {
  if (estimated.size() != truth.size())
    throw_invalid("fit_scale_factors: sequence counts differ");
  if (estimated.empty()) throw_invalid("fit_scale_factors: no sequences");

  Vec3 num = Vec3::Zero();
  Vec3 den = Vec3::Zero();
  int n = 0;
  for (std::size_t s = 0; s < estimated.size(); ++s) {
    check_aligned(estimated[s], truth[s], "fit_scale_factors");
    for (std::size_t i = 0; i < estimated[s].size(); ++i) {
      const Vec3& e = estimated[s][i].v;
      const Vec3& t = truth[s][i].v;
      num += e.cwiseProduct(t);
      den += e.cwiseProduct(e);
      ++n;
    }
  }
  if (n < 1) throw_invalid("fit_scale_factors: no samples");
  for (int a = 0; a < 3; ++a) {
    if (den[a] == 0.0) {
      std::ostringstream os;
      os << "fit_scale_factors: axis " << "xyz"[a]
         << " has zero estimated energy; scale factor undefined";
      throw DegenerateInputError(os.str());
    }
  }

  CalibrationResult out;
  out.f = num.cwiseQuotient(den);
  out.n_samples = n;
  double ss = 0.0;
  for (std::size_t s = 0; s < estimated.size(); ++s) {
    for (std::size_t i = 0; i < estimated[s].size(); ++i) {
      const Vec3 r = out.f.cwiseProduct(estimated[s][i].v) - truth[s][i].v;
      ss += r.squaredNorm();
    }
  }
  out.residual_rms = std::sqrt(ss / (3.0 * n));
  return out;
}

Vec3Series apply_calibration(const Vec3Series& samples, const Vec3& f) {
  Vec3Series out = samples;
  for (auto& s : out) s.v = s.v.cwiseProduct(f);
  return out;
}

TrajectoryScore score_trajectory(const Vec3Series& estimated, const Vec3Series& truth) {
  check_aligned(estimated, truth, "score_trajectory");
  if (estimated.empty()) throw_invalid("score_trajectory: empty series");
  Vec3 ss = Vec3::Zero();
  for (std::size_t i = 0; i < estimated.size(); ++i) {
    const Vec3 d = estimated[i].v - truth[i].v;
    ss += d.cwiseProduct(d);
  }
  TrajectoryScore out;
  out.rmse_per_axis = (ss / static_cast<double>(estimated.size())).cwiseSqrt();
  out.score = out.rmse_per_axis.mean();
  return out;
}

NormalizedTrajectory normalize_trajectory(const Vec3Series& series) {
  if (series.size() < 2) throw_invalid("normalize_trajectory: need at least 2 samples");
  const double n = static_cast<double>(series.size());
  Vec3 mean = Vec3::Zero();
  for (const auto& s : series) mean += s.v;
  mean /= n;
  Vec3 var = Vec3::Zero();
  for (const auto& s : series) {
    const Vec3 d = s.v - mean;
    var += d.cwiseProduct(d);
  }
  var /= n;

  NormalizedTrajectory out;
  out.series = series;
  Vec3 inv_std = Vec3::Zero();
  for (int a = 0; a < 3; ++a) {
    const double sd = std::sqrt(var[a]);
    if (sd < 1e-12) {
      out.constant[static_cast<std::size_t>(a)] = true;
    } else {
      inv_std[a] = 1.0 / sd;
    }
  }
  for (auto& s : out.series) s.v = (s.v - mean).cwiseProduct(inv_std);
  return out;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw_invalid("pearson: series lengths differ");
  if (a.size() < 2) throw_invalid("pearson: need at least 2 samples");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0)
    throw DegenerateInputError("pearson: correlation undefined for a constant series");
  return sab / std::sqrt(saa * sbb);
}

}  // namespace evlander
