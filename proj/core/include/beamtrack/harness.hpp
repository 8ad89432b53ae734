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
#include <ostream>
#include <span>
#include <vector>

#include "beamtrack/algorithms.hpp"
#include "beamtrack/array.hpp"
#include "beamtrack/config.hpp"

namespace beamtrack {

/// ||beta a(x_hat) - beta a(x)||^2 on `geom`.
double mse_h(const ArrayGeometry& geom, double x_hat, double x, cplx beta);

/// ||h_hat - beta a(x)||^2 for a direct channel estimate.
double mse_h(const ArrayGeometry& geom, std::span<const cplx> h_hat, double x, cplx beta);

/// log2(1 + rho |w^H a(x)|^2).
double achievable_rate(const ArrayGeometry& geom, const BeamformingWeights& w, double x,
                       double rho);

/// Reported slot numbers for `slots` tracked slots, ascending.
std::vector<long long> report_slots(ReportGrid grid, long long slots);

/// One row of the per-slot CSV. Columns without a meaning for an algorithm
/// (direction error for LS, the bound for moving targets) are NaN.
struct SlotRow {
  long long slot;
  double mean_mse_h;
  double n_mse_times_imax;  // n * mean (x_hat - x)^2 * i_max(track array)
  double mean_rate;
  double conv_frac;   // share of trials with |x_hat - x| < lambda/(2 M d)
  double crlb_h_ref;  // channel MSE of an efficient estimator after n pilots
};

struct TrialRecord {
  std::uint64_t trial;
  double x_final;
  std::optional<double> x_hat_final;
  bool converged;
  double window_mean_rate;   // slots after the warm-up that were evaluated
  double window_mean_mse_h;
};

struct TraceRow {
  std::uint64_t trial;
  long long slot;
  double theta;
  double x;
  std::optional<double> theta_hat;
  std::optional<double> x_hat;
  double rate;
  double mse_h;
};

struct AlgorithmSummary {
  Algorithm algorithm;
  std::vector<SlotRow> rows;
  std::vector<TrialRecord> trials;
  std::vector<TraceRow> trace;
  double convergence_fraction;  // NaN without a direction estimate
  double window_mean_rate;
  double window_mean_mse_h;
};

struct RunSummary {
  RunConfig config;
  std::vector<AlgorithmSummary> algorithms;

  /// Throws std::out_of_range if `alg` was not part of the run.
  const AlgorithmSummary& at(Algorithm alg) const;
};

/// Runs config.trials independent trials of every selected algorithm. Trials
/// are split into fixed blocks spread over config.resolved_jobs() threads and
/// reduced in block order, so the result does not depend on the job count.
RunSummary run_experiment(const RunConfig& config);

/// Stage-1 sweep quality: share of trials with x uniform on [-1, 1] whose
/// coarse estimate lands inside mainlobe_interval(geom, x).
struct InitQuality {
  long long trials;
  long long hits;
  double hit_rate() const { return static_cast<double>(hits) / static_cast<double>(trials); }
};

InitQuality init_quality(const ArrayGeometry& geom, double rho, cplx beta, int dictionary_size,
                         long long trials, std::uint64_t seed);

inline constexpr const char* kSlotCsvHeader =
    "slot,mean_mse_h,n_mse_times_imax,mean_rate,conv_frac,crlb_h_ref";

void write_slot_csv(std::ostream& os, const AlgorithmSummary& summary);
void write_trace_csv(std::ostream& os, const AlgorithmSummary& summary);
void write_trial_csv(std::ostream& os, const AlgorithmSummary& summary);

}  // namespace beamtrack
