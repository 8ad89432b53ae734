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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "beamtrack/algorithms.hpp"
#include "beamtrack/scenarios.hpp"
#include "beamtrack/trackers.hpp"

namespace beamtrack {

enum class ReportGrid {
  kAll,  // every slot
  kLog,  // 1..16, ~20 points per decade, powers of two, the last slot
};

std::string_view report_grid_name(ReportGrid grid);
ReportGrid parse_report_grid(std::string_view name);

/// One experiment. Every field has a JSON key of the same name; absent keys
/// keep the defaults below. Optional fields resolve from the trajectory kind
/// (static runs accumulate every pilot with a diminishing step, moving runs
/// use sliding windows and a fixed step).
struct RunConfig {
  int antennas = 16;
  double spacing_over_wavelength = 0.5;
  double snr_db = 10.0;
  cplx beta{0.70710678118654752, 0.70710678118654752};

  std::vector<Algorithm> algorithms{Algorithm::kRecursive, Algorithm::kIeee80211ad,
                                    Algorithm::kLeastSquares, Algorithm::kCompressedSensing};

  int track_antennas = 0;  // 0: the full array
  std::optional<StepSizeSchedule::Kind> step;
  std::optional<double> alpha;  // absolute; default alpha_scale * alpha_star(track array)
  double alpha_scale = 1.0;
  double n0 = 0.0;
  int dictionary_factor = 2;  // M0 = dictionary_factor * M_track
  InitMode init = InitMode::kSweep;

  int ad11_period = 3;
  std::optional<int> ls_window;  // 0: accumulate every pilot
  std::optional<int> cs_window;
  int cs_dictionary_size = 1024;

  Trajectory trajectory;
  long long trials = 10000;
  long long slots = 1000;
  std::optional<ReportGrid> report;
  int warmup_slots = 50;
  std::uint64_t seed = 1;
  int jobs = 0;  // 0: available parallelism
  int trace_trials = 1;

  double rho() const;
  ArrayGeometry data_geometry() const;
  ArrayGeometry track_geometry() const;
  StepSizeSchedule schedule() const;
  int dictionary_size() const;
  std::size_t resolved_ls_window() const;
  std::size_t resolved_cs_window() const;
  ReportGrid resolved_report() const;
  int resolved_jobs() const;

  /// Throws std::invalid_argument on inconsistent values.
  void validate() const;
};

/// Overlays the keys present in `j` on `base`. Unknown keys are rejected.
RunConfig merge_run_config(const RunConfig& base, const nlohmann::json& j);
RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace beamtrack
