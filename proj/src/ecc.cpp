#include "evlander/ecc.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "evlander/errors.hpp"
#include "evlander/image.hpp"

namespace evlander {

namespace {

// The solver runs in centered, scaled pixel coordinates so the 8x8 normal
// equations stay well conditioned regardless of image size.
struct CoordNorm {
  double cx, cy, s;

  Mat3 to_norm() const {
    Mat3 n = Mat3::Identity();
    n(0, 0) = n(1, 1) = 1.0 / s;
    n(0, 2) = -cx / s;
    n(1, 2) = -cy / s;
    return n;
  }
  Mat3 to_pixel() const {
    Mat3 n = Mat3::Identity();
    n(0, 0) = n(1, 1) = s;
    n(0, 2) = cx;
    n(1, 2) = cy;
    return n;
  }
};

struct EvalState {
  double rho = 0.0;
  double t_mean = 0.0, i_mean = 0.0;
  double t_norm = 0.0, i_norm = 0.0;  // sqrt of zero-mean energies
  std::int64_t n_valid = 0;
  std::vector<std::uint8_t> valid;
  std::vector<float> wx, wy, iw;
};

constexpr double kFlatTol = 1e-8;

// Correlation between the zero-mean template and the target sampled through
// the candidate warp. Returns false when the overlap collapses or either
// side is flat over it.
bool evaluate(const ImageF& templ, const ImageF& target, const Mat3& h_pixel,
              EvalState& st) {
  const int height = static_cast<int>(templ.rows());
  const int width = static_cast<int>(templ.cols());
  const std::size_t n = static_cast<std::size_t>(width) * height;
  st.valid.assign(n, 0);
  st.wx.resize(n);
  st.wy.resize(n);
  st.iw.resize(n);

  double sum_t = 0.0, sum_i = 0.0;
  std::int64_t count = 0;
  std::size_t idx = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x, ++idx) {
      const double w = h_pixel(2, 0) * x + h_pixel(2, 1) * y + h_pixel(2, 2);
      if (std::abs(w) < 1e-12) continue;
      const double px = (h_pixel(0, 0) * x + h_pixel(0, 1) * y + h_pixel(0, 2)) / w;
      const double py = (h_pixel(1, 0) * x + h_pixel(1, 1) * y + h_pixel(1, 2)) / w;
      if (!std::isfinite(px) || !std::isfinite(py)) return false;
      if (!in_bilinear_bounds(target, px, py)) continue;
      const float s = bilinear(target, px, py);
      st.valid[idx] = 1;
      st.wx[idx] = static_cast<float>(px);
      st.wy[idx] = static_cast<float>(py);
      st.iw[idx] = s;
      sum_t += templ(y, x);
      sum_i += s;
      ++count;
    }
  }
  st.n_valid = count;
  if (count < static_cast<std::int64_t>(n / 4) || count < 16) return false;

  st.t_mean = sum_t / static_cast<double>(count);
  st.i_mean = sum_i / static_cast<double>(count);
  double tt = 0.0, ii = 0.0, ti = 0.0;
  idx = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x, ++idx) {
      if (!st.valid[idx]) continue;
      const double tz = templ(y, x) - st.t_mean;
      const double iz = st.iw[idx] - st.i_mean;
      tt += tz * tz;
      ii += iz * iz;
      ti += tz * iz;
    }
  }
  if (tt < kFlatTol || ii < kFlatTol) return false;
  st.t_norm = std::sqrt(tt);
  st.i_norm = std::sqrt(ii);
  st.rho = ti / (st.t_norm * st.i_norm);
  return std::isfinite(st.rho);
}

}  // namespace

EccResult estimate_ecc(const ImageF& templ_raw, const ImageF& target_raw,
                       const EccConfig& cfg) {
  if (!(cfg.smooth_sigma > 0.0)) {
    throw_config("estimate_ecc: smooth_sigma must be > 0 (got " +
                 std::to_string(cfg.smooth_sigma) +
                 "); zero-sigma smoothing blanks the images");
  }
  if (cfg.max_iterations < 1) throw_config("estimate_ecc: max_iterations must be >= 1");
  if (!(cfg.eps > 0.0)) throw_config("estimate_ecc: eps must be > 0");
  if (templ_raw.rows() != target_raw.rows() || templ_raw.cols() != target_raw.cols()) {
    throw_invalid("estimate_ecc: template and target dimensions differ");
  }
  if (templ_raw.rows() < 8 || templ_raw.cols() < 8) {
    throw_invalid("estimate_ecc: images must be at least 8x8");
  }

  const ImageF templ = gaussian_blur(templ_raw, cfg.smooth_sigma);
  const ImageF target = gaussian_blur(target_raw, cfg.smooth_sigma);
  if ((templ - templ.mean()).abs().maxCoeff() < kFlatTol) {
    throw DegenerateInputError("estimate_ecc: template is flat after smoothing");
  }
  if ((target - target.mean()).abs().maxCoeff() < kFlatTol) {
    throw DegenerateInputError("estimate_ecc: target is flat after smoothing");
  }

  ImageF grad_x, grad_y;
  gradients(target, grad_x, grad_y);

  const int height = static_cast<int>(templ.rows());
  const int width = static_cast<int>(templ.cols());
  const CoordNorm cn{(width - 1) / 2.0, (height - 1) / 2.0,
                     std::max(width, height) / 2.0};
  const Mat3 n_mat = cn.to_norm();
  const Mat3 n_inv = cn.to_pixel();

  // All iteration state lives in normalized coordinates.
  Mat3 h = n_mat * cfg.init.matrix() * n_inv;
  h /= h(2, 2);

  EvalState st;
  if (!evaluate(templ, target, n_inv * h * n_mat, st)) {
    throw DegenerateInputError(
        "estimate_ecc: initial warp has no usable overlap or flat content");
  }

  EccResult result;
  result.rho_trace.push_back(st.rho);

  bool converged = false;
  int iterations = 0;
  Eigen::Matrix<double, 8, 8> sum_ggt;
  Eigen::Matrix<double, 8, 1> sum_g, v_t, v_i, v_e;

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    sum_ggt.setZero();
    sum_g.setZero();
    v_t.setZero();
    v_i.setZero();
    v_e.setZero();

    // Steepest-descent accumulation: analytic warp Jacobian times the target
    // gradient sampled at the warped position, in normalized coordinates.
    std::size_t idx = 0;
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x, ++idx) {
        if (!st.valid[idx]) continue;
        const double xn = (x - cn.cx) / cn.s;
        const double yn = (y - cn.cy) / cn.s;
        const double d = h(2, 0) * xn + h(2, 1) * yn + 1.0;
        const double un = (h(0, 0) * xn + h(0, 1) * yn + h(0, 2)) / d;
        const double vn = (h(1, 0) * xn + h(1, 1) * yn + h(1, 2)) / d;
        // d(target)/d(normalized coords) = pixel gradient * scale
        const double gx = bilinear(grad_x, st.wx[idx], st.wy[idx]) * cn.s;
        const double gy = bilinear(grad_y, st.wx[idx], st.wy[idx]) * cn.s;

        Eigen::Matrix<double, 8, 1> g;
        g(0) = gx * xn / d;
        g(1) = gx * yn / d;
        g(2) = gx / d;
        g(3) = gy * xn / d;
        g(4) = gy * yn / d;
        g(5) = gy / d;
        const double cross = gx * un + gy * vn;
        g(6) = -cross * xn / d;
        g(7) = -cross * yn / d;

        const double tz = templ(y, x) - st.t_mean;
        const double iz = st.iw[idx] - st.i_mean;
        sum_ggt.noalias() += g * g.transpose();
        sum_g += g;
        v_t += tz * g;
        v_i += iz * g;
      }
    }

    // Project the Jacobian onto the zero-mean subspace; only the Gram matrix
    // changes since the residual vectors already have zero mean.
    const double nv = static_cast<double>(st.n_valid);
    sum_ggt.noalias() -= (sum_g * sum_g.transpose()) / nv;

    Eigen::FullPivLU<Eigen::Matrix<double, 8, 8>> lu(sum_ggt);
    if (!lu.isInvertible()) {
      throw DivergenceError(iter, "estimate_ecc: singular normal equations (insufficient texture)");
    }
    const Eigen::Matrix<double, 8, 1> hinv_vi = lu.solve(v_i);
    const double ii = st.i_norm * st.i_norm;
    const double ti = st.rho * st.t_norm * st.i_norm;
    const double num = ii - v_i.dot(hinv_vi);
    const double den = ti - v_t.dot(hinv_vi);
    if (!(den > 0.0)) {
      throw DivergenceError(iter,
                            "estimate_ecc: correlation denominator non-positive (images "
                            "uncorrelated under current warp)");
    }
    const double lambda = num / den;
    v_e = lambda * v_t - v_i;
    Eigen::Matrix<double, 8, 1> delta = lu.solve(v_e);
    if (!delta.allFinite()) {
      throw DivergenceError(iter, "estimate_ecc: non-finite parameter update");
    }

    // Step halving keeps the correlation non-decreasing.
    EvalState cand;
    bool accepted = false;
    for (int halving = 0; halving <= 8; ++halving) {
      Mat3 h_cand = h;
      h_cand(0, 0) += delta(0);
      h_cand(0, 1) += delta(1);
      h_cand(0, 2) += delta(2);
      h_cand(1, 0) += delta(3);
      h_cand(1, 1) += delta(4);
      h_cand(1, 2) += delta(5);
      h_cand(2, 0) += delta(6);
      h_cand(2, 1) += delta(7);
      if (evaluate(templ, target, n_inv * h_cand * n_mat, cand) &&
          cand.rho >= st.rho - 1e-15) {
        h = h_cand;
        accepted = true;
        break;
      }
      delta *= 0.5;
    }
    ++iterations;
    if (!accepted) {
      // No step in the halving budget improves the correlation: local optimum
      // at the line-search resolution.
      converged = true;
      break;
    }
    const double increment = cand.rho - st.rho;
    st = std::move(cand);
    result.rho_trace.push_back(st.rho);
    if (increment < cfg.eps) {
      converged = true;
      break;
    }
  }

  result.homography = Homography::from_matrix(n_inv * h * n_mat);
  result.ecc_value = st.rho;
  result.iterations = iterations;
  result.converged = converged;
  return result;
}

EccResult estimate_ecc(const Frame& templ, const Frame& target, const EccConfig& cfg) {
  if (templ.channels != 1 || target.channels != 1) {
    throw_invalid("estimate_ecc: frames must be single-channel; merge polarity channels first");
  }
  return estimate_ecc(to_image(templ), to_image(target), cfg);
}

}  // namespace evlander
