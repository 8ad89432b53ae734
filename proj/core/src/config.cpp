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

#include "beamtrack/config.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

namespace beamtrack {

using nlohmann::json;

std::string_view report_grid_name(ReportGrid grid) {
  return grid == ReportGrid::kAll ? "all" : "log";
}

ReportGrid parse_report_grid(std::string_view name) {
  if (name == "all") return ReportGrid::kAll;
  if (name == "log") return ReportGrid::kLog;
  throw std::invalid_argument("unknown report grid '" + std::string(name) + "'");
}

namespace {

bool is_static(const RunConfig& c) { return c.trajectory.kind == TrajectoryKind::kStatic; }

std::string_view step_name(StepSizeSchedule::Kind k) {
  return k == StepSizeSchedule::Kind::kFixed ? "fixed" : "diminishing";
}

StepSizeSchedule::Kind parse_step(std::string_view name) {
  if (name == "fixed") return StepSizeSchedule::Kind::kFixed;
  if (name == "diminishing") return StepSizeSchedule::Kind::kDiminishing;
  throw std::invalid_argument("unknown step-size kind '" + std::string(name) + "'");
}

cplx parse_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw std::invalid_argument("complex values are written as [re, im]");
}

Trajectory merge_trajectory(Trajectory t, const json& j) {
  if (!j.is_object()) throw std::invalid_argument("'trajectory' must be an object");
  for (const auto& [key, v] : j.items()) {
    if (key == "kind") {
      t.kind = parse_trajectory(v.get<std::string>());
    } else if (key == "omega") {
      t.omega = v.get<double>();
    } else if (key == "amplitude") {
      t.amplitude = v.get<double>();
    } else if (key == "period") {
      t.period = v.get<double>();
    } else if (key == "jitter") {
      t.jitter = v.get<double>();
    } else if (key == "band") {
      t.band = v.get<double>();
    } else if (key == "static_x") {
      t.static_x = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
    } else {
      throw std::invalid_argument("unknown trajectory key '" + key + "'");
    }
  }
  return t;
}

template <class T>
std::optional<T> optional_or_auto(const json& v) {
  if (v.is_null() || (v.is_string() && v.get<std::string>() == "auto")) return std::nullopt;
  return v.get<T>();
}

}  // namespace

double RunConfig::rho() const { return db_to_linear(snr_db); }

ArrayGeometry RunConfig::data_geometry() const {
  return ArrayGeometry(antennas, spacing_over_wavelength);
}

ArrayGeometry RunConfig::track_geometry() const {
  return data_geometry().subarray(track_antennas == 0 ? antennas : track_antennas);
}

StepSizeSchedule RunConfig::schedule() const {
  const double a = alpha ? *alpha : alpha_scale * alpha_star(track_geometry());
  const auto kind = step.value_or(is_static(*this) ? StepSizeSchedule::Kind::kDiminishing
                                                   : StepSizeSchedule::Kind::kFixed);
  return kind == StepSizeSchedule::Kind::kFixed ? StepSizeSchedule::fixed(a)
                                                : StepSizeSchedule::diminishing(a, n0);
}

int RunConfig::dictionary_size() const {
  return dictionary_factor * track_geometry().num_antennas();
}

std::size_t RunConfig::resolved_ls_window() const {
  if (ls_window) return static_cast<std::size_t>(*ls_window);
  return is_static(*this) ? 0 : static_cast<std::size_t>(antennas);
}

std::size_t RunConfig::resolved_cs_window() const {
  if (cs_window) return static_cast<std::size_t>(*cs_window);
  return is_static(*this) ? 0 : static_cast<std::size_t>(std::max(1, antennas / 2));
}

ReportGrid RunConfig::resolved_report() const {
  return report.value_or(is_static(*this) ? ReportGrid::kLog : ReportGrid::kAll);
}

int RunConfig::resolved_jobs() const {
  if (jobs > 0) return jobs;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void RunConfig::validate() const {
  if (antennas < 2) throw std::invalid_argument("antennas must be at least 2");
  if (!(spacing_over_wavelength > 0.0)) {
    throw std::invalid_argument("element spacing must be positive");
  }
  if (track_antennas < 0 || track_antennas > antennas || track_antennas == 1) {
    throw std::invalid_argument("track_antennas must be 0 or in [2, antennas]");
  }
  if (!(std::norm(beta) > 0.0)) throw std::invalid_argument("beta must be nonzero");
  if (algorithms.empty()) throw std::invalid_argument("no algorithms selected");
  if (dictionary_factor < 1) throw std::invalid_argument("dictionary_factor must be >= 1");
  if (ad11_period < 3) throw std::invalid_argument("ad11_period must be >= 3");
  if (ls_window && *ls_window != 0 && *ls_window < antennas) {
    throw std::invalid_argument("ls_window must be 0 or at least the array size");
  }
  if (cs_window && *cs_window < 0) throw std::invalid_argument("cs_window must be >= 0");
  if (cs_dictionary_size < 2) throw std::invalid_argument("cs_dictionary_size must be >= 2");
  if (trials < 1) throw std::invalid_argument("trials must be positive");
  if (slots < 1) throw std::invalid_argument("slots must be positive");
  if (warmup_slots < 0) throw std::invalid_argument("warmup_slots must be >= 0");
  if (jobs < 0) throw std::invalid_argument("jobs must be >= 0");
  if (trace_trials < 0) throw std::invalid_argument("trace_trials must be >= 0");
  if (!(alpha_scale > 0.0) || (alpha && !(*alpha > 0.0))) {
    throw std::invalid_argument("step-size coefficient must be positive");
  }
  if (!(n0 >= 0.0)) throw std::invalid_argument("n0 must be >= 0");
}

RunConfig merge_run_config(const RunConfig& base, const json& j) {
  if (!j.is_object()) throw std::invalid_argument("run config must be a JSON object");
  RunConfig c = base;
  for (const auto& [key, v] : j.items()) {
    if (key == "antennas") {
      c.antennas = v.get<int>();
    } else if (key == "spacing_over_wavelength") {
      c.spacing_over_wavelength = v.get<double>();
    } else if (key == "snr_db") {
      c.snr_db = v.get<double>();
    } else if (key == "beta") {
      c.beta = parse_complex(v);
    } else if (key == "algorithms") {
      c.algorithms.clear();
      for (const auto& a : v) c.algorithms.push_back(parse_algorithm(a.get<std::string>()));
    } else if (key == "track_antennas") {
      c.track_antennas = v.get<int>();
    } else if (key == "step") {
      c.step = v.is_null() || v == "auto" ? std::nullopt
                                         : std::optional(parse_step(v.get<std::string>()));
    } else if (key == "alpha") {
      c.alpha = optional_or_auto<double>(v);
    } else if (key == "alpha_scale") {
      c.alpha_scale = v.get<double>();
    } else if (key == "n0") {
      c.n0 = v.get<double>();
    } else if (key == "dictionary_factor") {
      c.dictionary_factor = v.get<int>();
    } else if (key == "init") {
      c.init = parse_init_mode(v.get<std::string>());
    } else if (key == "ad11_period") {
      c.ad11_period = v.get<int>();
    } else if (key == "ls_window") {
      c.ls_window = optional_or_auto<int>(v);
    } else if (key == "cs_window") {
      c.cs_window = optional_or_auto<int>(v);
    } else if (key == "cs_dictionary_size") {
      c.cs_dictionary_size = v.get<int>();
    } else if (key == "trajectory") {
      c.trajectory = merge_trajectory(c.trajectory, v);
    } else if (key == "trials") {
      c.trials = v.get<long long>();
    } else if (key == "slots") {
      c.slots = v.get<long long>();
    } else if (key == "report") {
      c.report = v.is_null() || v == "auto"
                     ? std::nullopt
                     : std::optional(parse_report_grid(v.get<std::string>()));
    } else if (key == "warmup_slots") {
      c.warmup_slots = v.get<int>();
    } else if (key == "seed") {
      c.seed = v.get<std::uint64_t>();
    } else if (key == "jobs") {
      c.jobs = v.get<int>();
    } else if (key == "trace_trials") {
      c.trace_trials = v.get<int>();
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  return c;
}

RunConfig run_config_from_json(const json& j) { return merge_run_config(RunConfig{}, j); }

json to_json(const RunConfig& c) {
  json algs = json::array();
  for (auto a : c.algorithms) algs.push_back(std::string(algorithm_name(a)));
  json traj = {
      {"kind", std::string(trajectory_name(c.trajectory.kind))},
      {"omega", c.trajectory.omega},
      {"amplitude", c.trajectory.amplitude},
      {"period", c.trajectory.period},
      {"jitter", c.trajectory.jitter},
      {"band", c.trajectory.band},
      {"static_x", c.trajectory.static_x ? json(*c.trajectory.static_x) : json(nullptr)},
  };
  // Resolved values are written so the echo is self-describing.
  const auto sched = c.schedule();
  return json{
      {"antennas", c.antennas},
      {"spacing_over_wavelength", c.spacing_over_wavelength},
      {"snr_db", c.snr_db},
      {"beta", {c.beta.real(), c.beta.imag()}},
      {"algorithms", algs},
      {"track_antennas", c.track_geometry().num_antennas()},
      {"step", std::string(step_name(sched.kind()))},
      {"alpha", sched.alpha()},
      {"alpha_scale", c.alpha_scale},
      {"n0", c.n0},
      {"dictionary_factor", c.dictionary_factor},
      {"init", std::string(init_mode_name(c.init))},
      {"ad11_period", c.ad11_period},
      {"ls_window", c.resolved_ls_window()},
      {"cs_window", c.resolved_cs_window()},
      {"cs_dictionary_size", c.cs_dictionary_size},
      {"trajectory", traj},
      {"trials", c.trials},
      {"slots", c.slots},
      {"report", std::string(report_grid_name(c.resolved_report()))},
      {"warmup_slots", c.warmup_slots},
      {"seed", c.seed},
      {"trace_trials", c.trace_trials},
  };
}

}  // namespace beamtrack
