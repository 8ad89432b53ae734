// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "beamtrack/array.hpp"
#include "beamtrack/config.hpp"
#include "beamtrack/harness.hpp"
#include "beamtrack/trackers.hpp"
#include "beamtrack/version.hpp"

namespace beamtrack::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CommonFlags {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<long long> trials;
  std::optional<long long> slots;
  std::optional<double> snr_db;
  std::optional<int> antennas;
  std::optional<int> track_antennas;
  std::optional<int> jobs;
  std::vector<std::string> algorithms;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "JSON run config; flags override its values")
      ->check(CLI::ExistingFile);
  app->add_option("--out", f.out, "Output directory")->capture_default_str();
  app->add_option("--seed", f.seed, "Master seed");
  app->add_option("--trials", f.trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  app->add_option("--slots", f.slots, "Tracked slots per trial")->check(CLI::PositiveNumber);
  app->add_option("--snr-db", f.snr_db, "SNR |beta|^2/sigma^2 in dB");
  app->add_option("--antennas", f.antennas, "Array size M")->check(CLI::Range(2, 4096));
  app->add_option("--track-antennas", f.track_antennas, "Sub-array used for tracking pilots")
      ->check(CLI::Range(2, 4096));
  app->add_option("--jobs", f.jobs, "Worker threads (default: available parallelism)")
      ->check(CLI::PositiveNumber);
}

void add_algorithms(CLI::App* app, CommonFlags& f) {
  app->add_option("--algorithms", f.algorithms,
                  "Comma-separated subset of recursive,aoa,ieee80211ad,least_squares,"
                  "compressed_sensing")
      ->delimiter(',');
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config '" + path + "' is not valid JSON: " + e.what());
  }
}

RunConfig resolve(RunConfig cfg, const CommonFlags& f) {
  if (!f.config.empty()) cfg = merge_run_config(cfg, read_json_file(f.config));
  if (f.seed) cfg.seed = *f.seed;
  if (f.trials) cfg.trials = *f.trials;
  if (f.slots) cfg.slots = *f.slots;
  if (f.snr_db) cfg.snr_db = *f.snr_db;
  if (f.antennas) cfg.antennas = *f.antennas;
  if (f.track_antennas) cfg.track_antennas = *f.track_antennas;
  if (f.jobs) cfg.jobs = *f.jobs;
  if (!f.algorithms.empty()) {
    cfg.algorithms.clear();
    for (const auto& a : f.algorithms) cfg.algorithms.push_back(parse_algorithm(a));
  }
  cfg.validate();
  return cfg;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir + "'");
  }

  template <class Writer>
  void write(const std::string& name, Writer&& writer) {
    const fs::path path = dir_ / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    writer(os);
    os.flush();
    if (!os) throw std::runtime_error("failed writing '" + path.string() + "'");
    files_.push_back(name);
  }

  void manifest(const std::string& subcommand, std::uint64_t seed, json config, json extra) {
    json m = {
        {"tool", "beamtrack"},
        {"version", kVersion},
        {"subcommand", subcommand},
        {"seed", seed},
        {"config", std::move(config)},
        {"parameters", std::move(extra)},
        {"outputs", files_},
    };
    write("run.json", [&](std::ostream& os) { os << m.dump(2) << '\n'; });
  }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

std::string csv_name(const std::string& prefix, Algorithm alg, const std::string& suffix = "") {
  return prefix + "_" + std::string(algorithm_name(alg)) + suffix + ".csv";
}

// ---- subcommands -----------------------------------------------------------

void run_static(const RunConfig& cfg, const std::string& out_dir, std::ostream& out) {
  const auto summary = run_experiment(cfg);
  OutputDir dir(out_dir);
  std::string plot = "set logscale xy\nset xlabel 'slot n'\nset ylabel 'MSE_h'\nset datafile "
                     "separator ','\nplot ";
  bool first = true;
  for (const auto& s : summary.algorithms) {
    const auto name = csv_name("static", s.algorithm);
    dir.write(name, [&](std::ostream& os) { write_slot_csv(os, s); });
    dir.write(csv_name("static", s.algorithm, "_trials"),
              [&](std::ostream& os) { write_trial_csv(os, s); });
    plot += std::string(first ? "" : ", ") + "'" + name + "' using 1:2 with lines title '" +
            std::string(algorithm_name(s.algorithm)) + "'";
    if (first) {
      plot += ", '' using 1:6 with lines dashtype 2 title 'efficient-estimator bound'";
      first = false;
    }
    const auto& last = s.rows.back();
    out << algorithm_name(s.algorithm) << ": slot " << last.slot
        << " mean_mse_h=" << fmt(last.mean_mse_h)
        << " n*mean_mse_h=" << fmt(static_cast<double>(last.slot) * last.mean_mse_h)
        << " conv_frac=" << fmt(last.conv_frac) << '\n';
  }
  dir.write("static.gp", [&](std::ostream& os) { os << plot << '\n'; });
  dir.manifest("static", cfg.seed, to_json(cfg), json::object());
}

void write_dynamic_summary(std::ostream& os, const RunSummary& summary) {
  os << "algorithm,track_antennas,window_mean_rate,window_mean_mse_h,convergence_fraction\n";
  for (const auto& s : summary.algorithms) {
    const bool sub = s.algorithm == Algorithm::kRecursive || s.algorithm == Algorithm::kAoA;
    os << algorithm_name(s.algorithm) << ','
       << (sub ? summary.config.track_geometry() : summary.config.data_geometry()).num_antennas()
       << ',' << fmt(s.window_mean_rate) << ',' << fmt(s.window_mean_mse_h) << ','
       << fmt(s.convergence_fraction) << '\n';
  }
}

void run_dynamic(const RunConfig& cfg, const std::string& out_dir, std::ostream& out) {
  const auto summary = run_experiment(cfg);
  OutputDir dir(out_dir);
  std::string plot = "set xlabel 'slot n'\nset ylabel 'rate (bits/s/Hz)'\nset datafile "
                     "separator ','\nplot ";
  bool first = true;
  for (const auto& s : summary.algorithms) {
    const auto name = csv_name("dynamic", s.algorithm);
    dir.write(name, [&](std::ostream& os) { write_slot_csv(os, s); });
    dir.write(csv_name("dynamic", s.algorithm, "_trace"),
              [&](std::ostream& os) { write_trace_csv(os, s); });
    plot += std::string(first ? "" : ", ") + "'" + name + "' using 1:4 with lines title '" +
            std::string(algorithm_name(s.algorithm)) + "'";
    first = false;
    out << algorithm_name(s.algorithm) << ": mean rate after warm-up "
        << fmt(s.window_mean_rate) << " bits/s/Hz, mean MSE_h " << fmt(s.window_mean_mse_h)
        << '\n';
  }
  dir.write("dynamic_summary.csv", [&](std::ostream& os) { write_dynamic_summary(os, summary); });
  dir.write("dynamic.gp", [&](std::ostream& os) { os << plot << '\n'; });
  dir.manifest("dynamic", cfg.seed, to_json(cfg), json::object());
}

struct SweepSpeedFlags {
  double omega_min = 1e-3;
  double omega_max = 0.3;
  int omega_points = 20;
  std::vector<int> track_list{4, 8};
};

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi >= lo) || points < 1) {
    throw std::invalid_argument("omega grid needs 0 < min <= max and at least one point");
  }
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    g[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, t);
  }
  return g;
}

void run_sweep_speed(const RunConfig& cfg, const SweepSpeedFlags& sf, const std::string& out_dir,
                     std::ostream& out) {
  const auto grid = log_grid(sf.omega_min, sf.omega_max, sf.omega_points);
  std::vector<Algorithm> tracked;
  std::vector<Algorithm> baselines;
  for (auto a : cfg.algorithms) {
    (a == Algorithm::kRecursive || a == Algorithm::kAoA ? tracked : baselines).push_back(a);
  }
  std::string rows = "omega,algorithm,track_antennas,mean_rate,mean_mse_h\n";
  auto emit = [&](double omega, const RunSummary& s) {
    for (const auto& a : s.algorithms) {
      const bool sub = a.algorithm == Algorithm::kRecursive || a.algorithm == Algorithm::kAoA;
      rows += fmt(omega) + "," + std::string(algorithm_name(a.algorithm)) + "," +
              std::to_string((sub ? s.config.track_geometry() : s.config.data_geometry())
                                 .num_antennas()) +
              "," + fmt(a.window_mean_rate) + "," + fmt(a.window_mean_mse_h) + "\n";
    }
  };
  for (double omega : grid) {
    RunConfig c = cfg;
    c.trajectory.kind = TrajectoryKind::kFixedVelocity;
    c.trajectory.omega = omega;
    c.trace_trials = 0;
    if (!tracked.empty()) {
      for (int mt : sf.track_list) {
        c.algorithms = tracked;
        c.track_antennas = mt;
        emit(omega, run_experiment(c));
      }
    }
    if (!baselines.empty()) {
      c.algorithms = baselines;
      c.track_antennas = 0;
      emit(omega, run_experiment(c));
    }
    out << "omega " << fmt(omega) << " done\n";
  }
  OutputDir dir(out_dir);
  dir.write("sweep_speed.csv", [&](std::ostream& os) { os << rows; });
  dir.write("sweep_speed.gp", [&](std::ostream& os) {
    os << "set logscale x\nset xlabel 'omega (rad/slot)'\nset ylabel 'rate (bits/s/Hz)'\n"
          "set datafile separator ','\n"
          "plot 'sweep_speed.csv' using 1:($2 eq 'recursive' ? $4 : 1/0) with points "
          "title 'recursive'\n";
  });
  json extra = {{"omega_grid", grid}, {"track_antennas_list", sf.track_list}};
  dir.manifest("sweep-speed", cfg.seed, to_json(cfg), extra);
}

void run_crlb(const RunConfig& cfg, long long n_max, const std::string& out_dir,
              std::ostream& out) {
  const auto geom = cfg.track_geometry();
  const auto data = cfg.data_geometry();
  const double rho = cfg.rho();
  const double imax = i_max(geom, rho);
  const double sigma2 = std::norm(cfg.beta) / rho;
  const double limit = channel_mse_limit(data, sigma2);
  out << "i_max = " << fmt(imax) << " (" << fmt(imax / (kPi * kPi)) << " pi^2)\n";
  out << "alpha_star = " << fmt(alpha_star(geom)) << '\n';
  out << "n * MSE_h limit = " << fmt(limit) << '\n';
  OutputDir dir(out_dir);
  dir.write("crlb.csv", [&](std::ostream& os) {
    os << "n,crlb_min,crlb_h\n";
    for (long long n : report_slots(ReportGrid::kLog, n_max)) {
      os << n << ',' << fmt(crlb_min(geom, rho, n)) << ',' << fmt(limit / n) << '\n';
    }
  });
  json extra = {{"n_max", n_max}, {"i_max", imax}, {"alpha_star", alpha_star(geom)},
                {"mse_h_limit", limit}};
  dir.manifest("crlb", cfg.seed, to_json(cfg), extra);
}

void run_stable_points(const RunConfig& cfg, double x, int samples, const std::string& out_dir,
                       std::ostream& out) {
  const auto geom = cfg.track_geometry();
  if (samples < 2) throw std::invalid_argument("--samples must be at least 2");
  if (!(x >= -1.0 && x <= 1.0)) throw std::invalid_argument("--x must lie in [-1, 1]");
  const auto points = stable_points(geom, x);
  OutputDir dir(out_dir);
  dir.write("surrogate_curve.csv", [&](std::ostream& os) {
    os << "v,f\n";
    for (int i = 0; i < samples; ++i) {
      const double v = -1.0 + 2.0 * i / (samples - 1);
      os << fmt(v) << ',' << fmt(surrogate_f(geom, v, x)) << '\n';
    }
  });
  constexpr double kStep = 1e-6;
  dir.write("stable_points.csv", [&](std::ostream& os) {
    os << "index,v,slope\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double v = points[i];
      const double slope =
          (surrogate_f(geom, v + kStep, x) - surrogate_f(geom, v - kStep, x)) / (2.0 * kStep);
      os << i << ',' << fmt(v) << ',' << fmt(slope) << '\n';
      out << "stable point " << fmt(v) << '\n';
    }
  });
  dir.write("stable_points.gp", [&](std::ostream& os) {
    os << "set xlabel 'v'\nset ylabel 'f(v, x)'\nset datafile separator ','\n"
          "plot 'surrogate_curve.csv' using 1:2 with lines title 'f', "
          "'stable_points.csv' using 2:(0) with points pointtype 7 title 'stable points'\n";
  });
  dir.manifest("analyze-stable-points", cfg.seed, to_json(cfg),
               json{{"x", x}, {"samples", samples}});
}

void run_init_quality(const RunConfig& cfg, const std::vector<double>& snr_list,
                      const std::vector<int>& factors, const std::string& out_dir,
                      std::ostream& out) {
  const auto geom = cfg.track_geometry();
  std::string rows = "snr_db,dictionary_factor,dictionary_size,trials,hits,hit_rate\n";
  for (double snr : snr_list) {
    for (int f : factors) {
      if (f < 1) throw std::invalid_argument("dictionary factors must be >= 1");
      const int size = f * geom.num_antennas();
      const auto q = init_quality(geom, db_to_linear(snr), cfg.beta, size, cfg.trials, cfg.seed);
      rows += fmt(snr) + "," + std::to_string(f) + "," + std::to_string(size) + "," +
              std::to_string(q.trials) + "," + std::to_string(q.hits) + "," + fmt(q.hit_rate()) +
              "\n";
      out << "snr " << fmt(snr) << " dB, M0 = " << size << ": hit rate " << fmt(q.hit_rate())
          << '\n';
    }
  }
  OutputDir dir(out_dir);
  dir.write("init_quality.csv", [&](std::ostream& os) { os << rows; });
  dir.write("init_quality.gp", [&](std::ostream& os) {
    os << "set xlabel 'SNR (dB)'\nset ylabel 'mainlobe hit rate'\nset datafile separator ','\n"
          "plot 'init_quality.csv' using 1:6 with points title 'hit rate'\n";
  });
  dir.manifest("init-quality", cfg.seed, to_json(cfg),
               json{{"snr_db_list", snr_list}, {"dictionary_factors", factors}});
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Analog beam tracking simulator", "beamtrack"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  CommonFlags st_flags;
  std::string st_init;
  std::optional<double> st_alpha_scale;
  auto* st = app.add_subcommand("static", "Static-direction convergence of every tracker");
  add_common(st, st_flags);
  add_algorithms(st, st_flags);
  st->add_option("--init", st_init, "Direction initialisation: sweep or uniform")
      ->check(CLI::IsMember({"sweep", "uniform"}));
  st->add_option("--alpha-scale", st_alpha_scale, "Step-size coefficient relative to alpha*")
      ->check(CLI::PositiveNumber);

  CommonFlags dy_flags;
  std::string dy_traj;
  std::optional<double> dy_omega;
  std::optional<int> dy_trace;
  auto* dy = app.add_subcommand("dynamic", "Tracking a moving direction");
  add_common(dy, dy_flags);
  add_algorithms(dy, dy_flags);
  dy->add_option("--trajectory", dy_traj, "sinusoidal or fixed_velocity")
      ->check(CLI::IsMember({"sinusoidal", "fixed_velocity"}));
  dy->add_option("--omega", dy_omega, "Angular speed for fixed_velocity (rad/slot)")
      ->check(CLI::NonNegativeNumber);
  dy->add_option("--trace-trials", dy_trace, "Trials written to the per-slot trace")
      ->check(CLI::NonNegativeNumber);

  CommonFlags sw_flags;
  SweepSpeedFlags sw;
  auto* sp = app.add_subcommand("sweep-speed", "Mean rate and MSE versus angular speed");
  add_common(sp, sw_flags);
  add_algorithms(sp, sw_flags);
  sp->add_option("--omega-min", sw.omega_min)->check(CLI::PositiveNumber)->capture_default_str();
  sp->add_option("--omega-max", sw.omega_max)->check(CLI::PositiveNumber)->capture_default_str();
  sp->add_option("--omega-points", sw.omega_points)
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sp->add_option("--track-antennas-list", sw.track_list,
                 "Tracking sub-array sizes for the recursive trackers")
      ->delimiter(',')
      ->check(CLI::Range(2, 4096));

  CommonFlags cr_flags;
  long long cr_n = 1000;
  auto* cr = app.add_subcommand("crlb", "Fisher-information bound and step-size constants");
  add_common(cr, cr_flags);
  cr->add_option("--n-max", cr_n, "Last slot of the bound table")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CommonFlags sa_flags;
  double sa_x = 0.5;
  int sa_samples = 2001;
  auto* sa = app.add_subcommand("analyze-stable-points", "Surrogate curve and its stable points");
  add_common(sa, sa_flags);
  sa->add_option("--x", sa_x, "True direction sin(theta)")->capture_default_str();
  sa->add_option("--samples", sa_samples, "Curve samples over [-1, 1]")->capture_default_str();

  CommonFlags iq_flags;
  std::vector<double> iq_snr{-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0};
  std::vector<int> iq_factors{1, 2, 4, 8};
  auto* iq = app.add_subcommand("init-quality", "Stage-1 mainlobe hit probability");
  add_common(iq, iq_flags);
  iq->add_option("--snr-list", iq_snr, "SNR values in dB")->delimiter(',');
  iq->add_option("--factors", iq_factors, "Dictionary sizes as multiples of M")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (st->parsed()) {
      RunConfig base;
      if (!st_init.empty()) base.init = parse_init_mode(st_init);
      if (st_alpha_scale) base.alpha_scale = *st_alpha_scale;
      run_static(resolve(base, st_flags), st_flags.out, out);
    } else if (dy->parsed()) {
      RunConfig base;
      base.trajectory.kind = TrajectoryKind::kSinusoidal;
      base.trials = 1000;
      RunConfig cfg = resolve(base, dy_flags);
      if (!dy_traj.empty()) cfg.trajectory.kind = parse_trajectory(dy_traj);
      if (dy_omega) cfg.trajectory.omega = *dy_omega;
      if (dy_trace) cfg.trace_trials = *dy_trace;
      if (cfg.trajectory.kind == TrajectoryKind::kStatic) {
        throw std::invalid_argument("dynamic runs need a moving trajectory");
      }
      run_dynamic(cfg, dy_flags.out, out);
    } else if (sp->parsed()) {
      RunConfig base;
      base.trajectory.kind = TrajectoryKind::kFixedVelocity;
      base.trials = 200;
      base.trace_trials = 0;
      run_sweep_speed(resolve(base, sw_flags), sw, sw_flags.out, out);
    } else if (cr->parsed()) {
      run_crlb(resolve(RunConfig{}, cr_flags), cr_n, cr_flags.out, out);
    } else if (sa->parsed()) {
      run_stable_points(resolve(RunConfig{}, sa_flags), sa_x, sa_samples, sa_flags.out, out);
    } else if (iq->parsed()) {
      run_init_quality(resolve(RunConfig{}, iq_flags), iq_snr, iq_factors, iq_flags.out, out);
    }
  } catch (const nlohmann::json::exception& e) {
    err << "beamtrack: bad config value: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "beamtrack: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "beamtrack: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace beamtrack::cli
