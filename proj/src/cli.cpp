#include "evlander/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "evlander/calibration.hpp"
#include "evlander/dataio.hpp"
#include "evlander/errors.hpp"
#include "evlander/homography.hpp"
#include "evlander/plot.hpp"
#include "evlander/png_io.hpp"
#include "evlander/simulator.hpp"

namespace evlander {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string euler_name(EulerConvention c) { return c == EulerConvention::ZYX ? "zyx" : "xyz"; }

std::string run_config_json(const RunConfig& cfg) {
  json j;
  j["windowing"] = {
      {"mode", cfg.windowing.mode == WindowingMode::FixedTime ? "fixed_time" : "fixed_count"},
      {"dt_us", cfg.windowing.dt_us},
      {"count", cfg.windowing.count},
      {"polarity_split", cfg.windowing.polarity_split}};
  j["ecc"] = {{"max_iterations", cfg.ecc.max_iterations},
              {"eps", cfg.ecc.eps},
              {"smooth_sigma", cfg.ecc.smooth_sigma}};
  j["euler_convention"] = euler_name(cfg.euler_convention);
  j["calibration_path"] = cfg.calibration_path;
  j["seed"] = cfg.seed;
  j["jobs"] = cfg.jobs;
  return j.dump(2) + "\n";
}

void echo_run_config(const RunConfig& cfg, const std::string& dir) {
  if (dir.empty()) return;
  write_text_file_atomic((fs::path(dir) / "run_config.json").string(), run_config_json(cfg));
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads; exceptions are
/// rethrown in index order so error messages are deterministic.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct SequenceRun {
  Sequence seq;
  std::vector<VelocitySample> samples;
  Vec3Series velocities;  // world frame, at pair midpoints
};

SequenceRun run_pipeline(const std::string& dir, const RunConfig& cfg) {
  SequenceRun run;
  run.seq = read_sequence(dir);
  const CameraModel cam =
      CameraModel::identity_for(run.seq.stream.sensor_width, run.seq.stream.sensor_height);
  EstimateOptions opts;
  opts.euler_convention = cfg.euler_convention;
  opts.polarity_mode = PolarityMode::Merge;
  run.samples = estimate_sequence(run.seq.stream, range_series(run.seq),
                                  orientation_series(run.seq), cfg.windowing, cfg.ecc, cam, opts);
  run.velocities.reserve(run.samples.size());
  for (const auto& s : run.samples) run.velocities.push_back(TimedVec3{s.t_us, s.v});
  return run;
}

int count_gap_fills(const std::vector<VelocitySample>& samples) {
  int n = 0;
  for (const auto& s : samples) n += s.gap_fill ? 1 : 0;
  return n;
}

// ---- summarize ----

int cmd_summarize(const std::vector<std::string>& dirs, const RunConfig& cfg) {
  std::vector<std::string> outputs(dirs.size());
  parallel_for(dirs.size(), cfg.jobs, [&](std::size_t i) {
    const Sequence seq = read_sequence(dirs[i]);
    outputs[i] = summary_to_json(summarize(seq, cfg.windowing));
  });
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    std::cout << outputs[i];
    if (!cfg.output_dir.empty()) {
      const Sequence seq = read_sequence(dirs[i]);
      write_text_file_atomic(
          (fs::path(cfg.output_dir) / ("summary_" + seq.id + ".json")).string(), outputs[i]);
    }
  }
  echo_run_config(cfg, cfg.output_dir);
  return 0;
}

// ---- view-events ----

std::string frame_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06zu.png", index);
  return buf;
}

int cmd_view_events(const std::string& dir, const RunConfig& cfg) {
  if (cfg.output_dir.empty()) throw_config("view-events requires --out DIR");
  const Sequence seq = read_sequence(dir);
  const std::vector<Frame> frames = accumulate(seq.stream, cfg.windowing);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Frame& f = frames[i];
    Raster r(f.width, f.height, 0x000000);
    for (int y = 0; y < f.height; ++y) {
      for (int x = 0; x < f.width; ++x) {
        if (f.channels == 2) {
          const bool neg = f.pixel(0, x, y);
          const bool pos = f.pixel(1, x, y);
          if (neg || pos)
            r.set(x, y, (pos ? 0x00ff00u : 0u) | (neg ? 0xff0000u : 0u));
        } else if (f.pixel(0, x, y)) {
          r.set(x, y, 0xffffff);
        }
      }
    }
    write_png((fs::path(cfg.output_dir) / frame_name(i)).string(), r);
  }
  echo_run_config(cfg, cfg.output_dir);
  std::cout << "wrote " << frames.size() << " frame image(s) to " << cfg.output_dir << "\n";
  return 0;
}

// ---- viz-warp ----

int cmd_viz_warp(const std::string& dir, const RunConfig& cfg) {
  if (cfg.output_dir.empty()) throw_config("viz-warp requires --out DIR");
  const Sequence seq = read_sequence(dir);
  std::vector<Frame> frames = accumulate(seq.stream, cfg.windowing);
  while (!frames.empty() && frames.back().partial) frames.pop_back();
  if (frames.size() < 2) throw_invalid("need at least 2 frames for warp visualization");

  json report;
  report["pairs"] = json::array();
  Homography warm = Homography::identity();
  for (std::size_t k = 0; k + 1 < frames.size(); ++k) {
    const ImageF a = to_image(frames[k]);
    const ImageF b = to_image(frames[k + 1]);
    EccConfig ecc = cfg.ecc;
    ecc.init = warm;
    Homography h = ecc.init;
    bool diverged = false;
    std::string error_text;
    try {
      const EccResult res = estimate_ecc(a, b, ecc);
      h = res.homography;
      warm = res.homography;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Config) throw;  // config problems abort the command
      diverged = true;
      error_text = e.what();
      warm = Homography::identity();
    }
    const WarpResult w = warp_frame(a, h);
    const ImageF diff = (w.image - b).abs() * w.valid;
    const double mean_diff =
        static_cast<double>(diff.sum()) / std::max(1.0, static_cast<double>(w.valid.sum()));

    Raster r(frames[k].width * 3 + 2, frames[k].height, 0x202020);
    auto blit = [&](const ImageF& img, int x_off) {
      for (int y = 0; y < img.rows(); ++y)
        for (int x = 0; x < img.cols(); ++x) {
          const float v = std::clamp(img(y, x), 0.0f, 1.0f);
          const auto g = static_cast<std::uint8_t>(std::lround(v * 255.0f));
          r.set(x + x_off, y,
                (static_cast<std::uint32_t>(g) << 16) | (static_cast<std::uint32_t>(g) << 8) | g);
        }
    };
    blit(a, 0);
    blit(w.image, frames[k].width + 1);
    blit(diff, 2 * frames[k].width + 2);

    char buf[64];
    std::snprintf(buf, sizeof(buf), "pair_%06zu_diff_%.4f.png", k, mean_diff);
    write_png((fs::path(cfg.output_dir) / buf).string(), r);

    json p;
    p["pair"] = k;
    p["mean_abs_diff"] = mean_diff;
    p["diverged"] = diverged;
    if (diverged) p["error"] = error_text;
    report["pairs"].push_back(p);
  }
  write_text_file_atomic((fs::path(cfg.output_dir) / "warp_report.json").string(),
                         report.dump(2) + "\n");
  echo_run_config(cfg, cfg.output_dir);
  std::cout << "wrote " << (frames.size() - 1) << " triptych(s) to " << cfg.output_dir << "\n";
  return 0;
}

// ---- compare-vel ----

int cmd_compare_vel(const std::string& dir, const RunConfig& cfg) {
  if (cfg.output_dir.empty()) throw_config("compare-vel requires --out DIR");
  SequenceRun run = run_pipeline(dir, cfg);
  if (!cfg.calibration_path.empty()) {
    const CalibrationResult cal = calibration_from_json_text(
        read_text_file(cfg.calibration_path), cfg.calibration_path);
    run.velocities = apply_calibration(run.velocities, cal.f);
  }

  const bool have_truth = run.seq.split == Split::Train;
  if (!have_truth)
    std::cerr << "warning: sequence '" << run.seq.id
              << "' is a test split without ground truth; truth columns omitted\n";

  Vec3Series truth;
  if (have_truth) {
    const Vec3Series truth_states = truth_velocities(run.seq);
    for (const auto& s : run.velocities)
      truth.push_back(TimedVec3{s.t_us, interpolate_series(truth_states, s.t_us).v});
  }

  const NormalizedTrajectory est_norm = normalize_trajectory(run.velocities);
  NormalizedTrajectory truth_norm;
  if (have_truth) truth_norm = normalize_trajectory(truth);

  // Aligned CSV.
  {
    std::ostringstream os;
    os << "t,est_vx,est_vy,est_vz";
    if (have_truth) os << ",truth_vx,truth_vy,truth_vz";
    os << ",est_nx,est_ny,est_nz";
    if (have_truth) os << ",truth_nx,truth_ny,truth_nz";
    os << "\n";
    for (std::size_t i = 0; i < run.velocities.size(); ++i) {
      os << fmt_real(us_to_s(run.velocities[i].t_us));
      for (int a = 0; a < 3; ++a) os << ',' << fmt_real(run.velocities[i].v[a]);
      if (have_truth)
        for (int a = 0; a < 3; ++a) os << ',' << fmt_real(truth[i].v[a]);
      for (int a = 0; a < 3; ++a) os << ',' << fmt_real(est_norm.series[i].v[a]);
      if (have_truth)
        for (int a = 0; a < 3; ++a) os << ',' << fmt_real(truth_norm.series[i].v[a]);
      os << "\n";
    }
    write_text_file_atomic(
        (fs::path(cfg.output_dir) / ("compare_vel_" + run.seq.id + ".csv")).string(), os.str());
  }

  // Per-axis Pearson correlations.
  json pj;
  pj["sequence_id"] = run.seq.id;
  pj["gap_fills"] = count_gap_fills(run.samples);
  const char* axis_names[3] = {"x", "y", "z"};
  if (have_truth) {
    for (int a = 0; a < 3; ++a) {
      std::vector<double> e, t;
      for (std::size_t i = 0; i < run.velocities.size(); ++i) {
        e.push_back(run.velocities[i].v[a]);
        t.push_back(truth[i].v[a]);
      }
      try {
        pj["pearson"][axis_names[a]] = pearson(e, t);
      } catch (const DegenerateInputError&) {
        pj["pearson"][axis_names[a]] = nullptr;  // undefined for a constant axis
      }
    }
  } else {
    pj["pearson"] = nullptr;
  }
  write_text_file_atomic((fs::path(cfg.output_dir) / ("pearson_" + run.seq.id + ".json")).string(),
                         pj.dump(2) + "\n");
  if (have_truth) std::cout << pj.dump(2) << "\n";

  // Plots: est bright, truth dim; x red, y green, z blue.
  const std::uint32_t est_colors[3] = {0xff5050, 0x50ff50, 0x5080ff};
  const std::uint32_t truth_colors[3] = {0x803030, 0x308030, 0x304880};
  auto plot_pair = [&](const Vec3Series& est, const Vec3Series& tru, bool with_truth,
                       const std::string& name) {
    std::vector<PlotSeries> series;
    for (int a = 0; a < 3; ++a) {
      if (with_truth) {
        PlotSeries st;
        st.color = truth_colors[a];
        for (const auto& s : tru) {
          st.t.push_back(us_to_s(s.t_us));
          st.v.push_back(s.v[a]);
        }
        series.push_back(std::move(st));
      }
      PlotSeries se;
      se.color = est_colors[a];
      for (const auto& s : est) {
        se.t.push_back(us_to_s(s.t_us));
        se.v.push_back(s.v[a]);
      }
      series.push_back(std::move(se));
    }
    write_png((fs::path(cfg.output_dir) / (name + "_" + run.seq.id + ".png")).string(),
              render_plot(series));
  };
  plot_pair(run.velocities, truth, have_truth, "vel_raw");
  plot_pair(est_norm.series, truth_norm.series, have_truth, "vel_norm");

  echo_run_config(cfg, cfg.output_dir);
  return 0;
}

// ---- calibrate ----

int cmd_calibrate(const std::vector<std::string>& dirs, const std::string& out_file,
                  const RunConfig& cfg) {
  if (dirs.empty()) throw_config("calibrate needs at least one train sequence directory");
  std::vector<Vec3Series> est(dirs.size()), truth(dirs.size());
  parallel_for(dirs.size(), cfg.jobs, [&](std::size_t i) {
    SequenceRun run = run_pipeline(dirs[i], cfg);
    if (run.seq.split != Split::Train)
      throw_invalid("sequence '" + run.seq.id + "' is not a train split; cannot calibrate on it");
    const Vec3Series truth_states = truth_velocities(run.seq);
    est[i] = run.velocities;
    for (const auto& s : run.velocities)
      truth[i].push_back(TimedVec3{s.t_us, interpolate_series(truth_states, s.t_us).v});
  });
  const CalibrationResult cal = fit_scale_factors(est, truth);
  write_text_file_atomic(out_file, calibration_to_json(cal));
  const fs::path parent = fs::path(out_file).parent_path();
  echo_run_config(cfg, parent.empty() ? std::string(".") : parent.string());
  std::cout << "factors: [" << fmt_real(cal.f.x()) << ", " << fmt_real(cal.f.y()) << ", "
            << fmt_real(cal.f.z()) << "]\nresidual_rms: " << fmt_real(cal.residual_rms)
            << " m/s over " << cal.n_samples << " samples\n";
  return 0;
}

// ---- estimate ----

int cmd_estimate(const std::vector<std::string>& dirs, const std::string& out_file,
                 const RunConfig& cfg) {
  if (dirs.empty()) throw_config("estimate needs at least one sequence directory");
  if (cfg.calibration_path.empty())
    throw_config("estimate requires --calibration PATH (no silent uncalibrated output)");
  const CalibrationResult cal =
      calibration_from_json_text(read_text_file(cfg.calibration_path), cfg.calibration_path);

  std::vector<SubmissionEntry> entries(dirs.size());
  parallel_for(dirs.size(), cfg.jobs, [&](std::size_t i) {
    SequenceRun run = run_pipeline(dirs[i], cfg);
    const Vec3Series calibrated = apply_calibration(run.velocities, cal.f);
    SubmissionEntry entry;
    entry.sequence_id = run.seq.id;
    entry.state_times_us = state_times_us(run.seq);
    for (const std::int64_t t : entry.state_times_us)
      entry.estimates.push_back(TimedVec3{t, interpolate_series(calibrated, t).v});
    entries[i] = std::move(entry);
  });
  write_submission(entries, out_file);
  const fs::path parent = fs::path(out_file).parent_path();
  echo_run_config(cfg, parent.empty() ? std::string(".") : parent.string());
  std::size_t rows = 0;
  for (const auto& e : entries) rows += e.state_times_us.size();
  std::cout << "wrote " << rows << " row(s) for " << entries.size() << " sequence(s) to "
            << out_file << "\n";
  return 0;
}

// ---- score ----

int cmd_score(const std::string& submission_path, const std::string& truth_path,
              const std::string& out_file, const RunConfig& cfg) {
  const auto submission = read_submission(submission_path);
  const auto truth = read_submission(truth_path);
  if (submission.empty()) throw_invalid("submission contains no rows");

  json report;
  report["note"] = "SURROGATE score: mean per-axis velocity RMSE, m/s";
  report["sequences"] = json::array();
  double mean_score = 0.0;
  int scored = 0;
  for (const auto& sub : submission) {
    const auto it = std::find_if(truth.begin(), truth.end(), [&](const SubmissionSeries& t) {
      return t.sequence_id == sub.sequence_id;
    });
    if (it == truth.end())
      throw_invalid("truth file has no rows for sequence '" + sub.sequence_id + "'");
    const TrajectoryScore score = score_trajectory(sub.v, it->v);
    std::cout << sub.sequence_id << " rmse=[" << fmt_real(score.rmse_per_axis.x()) << ", "
              << fmt_real(score.rmse_per_axis.y()) << ", " << fmt_real(score.rmse_per_axis.z())
              << "] score(SURROGATE)=" << fmt_real(score.score) << "\n";
    json sj;
    sj["sequence_id"] = sub.sequence_id;
    sj["rmse_per_axis"] = {score.rmse_per_axis.x(), score.rmse_per_axis.y(),
                           score.rmse_per_axis.z()};
    sj["score"] = score.score;
    report["sequences"].push_back(sj);
    mean_score += score.score;
    ++scored;
  }
  mean_score /= scored;
  report["mean_score"] = mean_score;
  std::cout << "mean score(SURROGATE)=" << fmt_real(mean_score) << "\n";
  if (!out_file.empty()) {
    write_text_file_atomic(out_file, report.dump(2) + "\n");
    const fs::path parent = fs::path(out_file).parent_path();
    echo_run_config(cfg, parent.empty() ? std::string(".") : parent.string());
  }
  return 0;
}

// ---- simulate ----

int cmd_simulate(const std::string& profile_path, const std::string& split_name,
                 const std::string& id_override, bool seed_given, const RunConfig& cfg) {
  if (cfg.output_dir.empty()) throw_config("simulate requires --out DIR");
  SimProfile profile = profile_from_json_text(read_text_file(profile_path), profile_path);
  if (seed_given) profile.scene.texture_seed = cfg.seed;
  if (!id_override.empty()) profile.id = id_override;
  Split split;
  if (split_name == "train") {
    split = Split::Train;
  } else if (split_name == "test") {
    split = Split::Test;
  } else {
    throw_config("--split must be 'train' or 'test'");
  }

  const GeneratedSequence gen =
      generate_sequence(profile.scene, profile.profile, profile.rig, split, profile.id);
  const fs::path seq_dir = fs::path(cfg.output_dir) / profile.id;
  write_sequence(gen.sequence, seq_dir.string());
  if (split == Split::Test) {
    SubmissionEntry entry;
    entry.sequence_id = profile.id;
    for (const auto& s : gen.truth) {
      entry.state_times_us.push_back(s_to_us(s.t));
      entry.estimates.push_back(TimedVec3{s_to_us(s.t), s.vel});
    }
    write_submission({entry}, (seq_dir / "truth.csv").string());
  }
  write_text_file_atomic((seq_dir / "profile_used.json").string(), profile_to_json(profile));
  echo_run_config(cfg, seq_dir.string());
  std::cout << "wrote sequence '" << profile.id << "' (" << gen.sequence.stream.events.size()
            << " events) to " << seq_dir.string() << "\n";
  return 0;
}

// ---- config file / flag plumbing ----

void apply_config_file(RunConfig& cfg, const std::string& path) {
  const std::string text = read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(path, 0, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError(path, 0, "config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "dt_us") {
      cfg.windowing.dt_us = value.get<std::int64_t>();
      cfg.windowing.mode = WindowingMode::FixedTime;
    } else if (key == "window_count") {
      cfg.windowing.count = value.get<std::int64_t>();
      cfg.windowing.mode = WindowingMode::FixedCount;
    } else if (key == "polarity_split") {
      cfg.windowing.polarity_split = value.get<bool>();
    } else if (key == "sigma") {
      cfg.ecc.smooth_sigma = value.get<double>();
    } else if (key == "max_iter") {
      cfg.ecc.max_iterations = value.get<int>();
    } else if (key == "eps") {
      cfg.ecc.eps = value.get<double>();
    } else if (key == "euler_convention") {
      const std::string name = value.get<std::string>();
      if (name == "zyx") {
        cfg.euler_convention = EulerConvention::ZYX;
      } else if (name == "xyz") {
        cfg.euler_convention = EulerConvention::XYZ;
      } else {
        throw ValidationError(path, 0, "euler_convention must be 'zyx' or 'xyz'");
      }
    } else if (key == "seed") {
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "jobs") {
      cfg.jobs = value.get<int>();
    } else if (key == "calibration") {
      cfg.calibration_path = value.get<std::string>();
    } else {
      throw ValidationError(path, 0, "unknown config key '" + key + "'");
    }
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Event-camera descent velocity estimation toolkit"};
  app.require_subcommand(1);
  // Global flags may appear before or after the subcommand name.
  app.fallthrough();

  std::string config_path;
  RunConfig cfg;
  // Flag presence trackers; flags beat config-file values.
  std::int64_t flag_dt_us = 0;
  std::int64_t flag_count = 0;
  bool flag_polarity = false;
  double flag_sigma = 0.0;
  int flag_max_iter = 0;
  double flag_eps = 0.0;
  std::string flag_euler;
  std::uint64_t flag_seed = 0;
  int flag_jobs = 0;

  app.add_option("--config", config_path, "JSON config file (flags take precedence)");
  auto* opt_out = app.add_option("--out", cfg.output_dir, "output directory");
  auto* opt_seed = app.add_option("--seed", flag_seed, "simulator texture seed override");
  auto* opt_dt = app.add_option("--dt-us", flag_dt_us, "fixed-time window length, microseconds");
  auto* opt_count =
      app.add_option("--window-count", flag_count, "fixed-count events per window");
  auto* opt_pol = app.add_flag("--polarity-split", flag_polarity,
                               "accumulate polarities into separate channels");
  auto* opt_sigma = app.add_option("--sigma", flag_sigma, "ECC Gaussian smoothing sigma, pixels");
  auto* opt_iter = app.add_option("--max-iter", flag_max_iter, "ECC iteration cap");
  auto* opt_eps = app.add_option("--eps", flag_eps, "ECC convergence threshold");
  auto* opt_euler = app.add_option("--euler-convention", flag_euler, "zyx (default) or xyz")
                        ->check(CLI::IsMember({"zyx", "xyz"}));
  auto* opt_jobs = app.add_option("--jobs", flag_jobs, "parallel sequence workers (0 = auto)");
  auto* opt_cal =
      app.add_option("--calibration", cfg.calibration_path, "calibration JSON from 'calibrate'");

  std::vector<std::string> dirs;
  std::string seq_dir;
  std::string out_file;
  std::string submission_path, truth_path;
  std::string profile_path, split_name = "train", id_override;

  auto* summarize_cmd = app.add_subcommand("summarize", "sequence statistics as JSON");
  summarize_cmd->add_option("dirs", dirs, "sequence directories")->required()->expected(-1);

  auto* view_cmd = app.add_subcommand("view-events", "accumulated frames as numbered PNGs");
  view_cmd->add_option("dir", seq_dir, "sequence directory")->required();

  auto* warp_cmd = app.add_subcommand("viz-warp", "per-pair warp/diff triptychs");
  warp_cmd->add_option("dir", seq_dir, "sequence directory")->required();

  auto* compare_cmd = app.add_subcommand("compare-vel", "estimated vs truth velocity export");
  compare_cmd->add_option("dir", seq_dir, "sequence directory")->required();

  auto* calibrate_cmd = app.add_subcommand("calibrate", "fit per-axis scale factors");
  calibrate_cmd->add_option("dirs", dirs, "train sequence directories")->required()->expected(-1);
  calibrate_cmd->add_option("--out-file", out_file, "calibration JSON path")
      ->default_val("calibration.json");

  auto* estimate_cmd = app.add_subcommand("estimate", "produce a submission CSV");
  estimate_cmd->add_option("dirs", dirs, "sequence directories")->required()->expected(-1);
  estimate_cmd->add_option("--out-file", out_file, "submission CSV path")
      ->default_val("submission.csv");

  auto* score_cmd = app.add_subcommand("score", "surrogate-score a submission");
  score_cmd->add_option("--submission", submission_path, "submission CSV")->required();
  score_cmd->add_option("--truth", truth_path, "truth CSV (submission format)")->required();
  score_cmd->add_option("--out-file", out_file, "optional JSON report path");

  auto* simulate_cmd = app.add_subcommand("simulate", "generate a synthetic sequence");
  simulate_cmd->add_option("--profile", profile_path, "descent profile JSON")->required();
  simulate_cmd->add_option("--split", split_name, "train or test")
      ->check(CLI::IsMember({"train", "test"}));
  simulate_cmd->add_option("--id", id_override, "sequence id override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    if (opt_dt->count()) {
      cfg.windowing.dt_us = flag_dt_us;
      cfg.windowing.mode = WindowingMode::FixedTime;
    }
    if (opt_count->count()) {
      cfg.windowing.count = flag_count;
      cfg.windowing.mode = WindowingMode::FixedCount;
    }
    if (opt_pol->count()) cfg.windowing.polarity_split = flag_polarity;
    if (opt_sigma->count()) cfg.ecc.smooth_sigma = flag_sigma;
    if (opt_iter->count()) cfg.ecc.max_iterations = flag_max_iter;
    if (opt_eps->count()) cfg.ecc.eps = flag_eps;
    if (opt_euler->count())
      cfg.euler_convention = flag_euler == "xyz" ? EulerConvention::XYZ : EulerConvention::ZYX;
    if (opt_seed->count()) cfg.seed = flag_seed;
    if (opt_jobs->count()) cfg.jobs = flag_jobs;
    if (cfg.windowing.mode == WindowingMode::FixedTime && cfg.windowing.dt_us <= 0)
      throw_config("--dt-us must be > 0");
    if (cfg.windowing.mode == WindowingMode::FixedCount && cfg.windowing.count <= 0)
      throw_config("--window-count must be > 0");
    (void)opt_out;
    (void)opt_cal;

    if (summarize_cmd->parsed()) return cmd_summarize(dirs, cfg);
    if (view_cmd->parsed()) return cmd_view_events(seq_dir, cfg);
    if (warp_cmd->parsed()) return cmd_viz_warp(seq_dir, cfg);
    if (compare_cmd->parsed()) return cmd_compare_vel(seq_dir, cfg);
    if (calibrate_cmd->parsed()) return cmd_calibrate(dirs, out_file, cfg);
    if (estimate_cmd->parsed()) return cmd_estimate(dirs, out_file, cfg);
    if (score_cmd->parsed()) return cmd_score(submission_path, truth_path, out_file, cfg);
    if (simulate_cmd->parsed())
      return cmd_simulate(profile_path, split_name, id_override, opt_seed->count() > 0, cfg);
    throw_config("no subcommand given");
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace evlander
