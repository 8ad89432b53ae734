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

// Uniform slot-by-slot interface over every tracker so the experiment runner
// can drive them identically: one pilot per slot, estimate after the pilot.

#pragma once

#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string_view>

#include "beamtrack/array.hpp"
#include "beamtrack/baselines.hpp"
#include "beamtrack/trackers.hpp"

namespace beamtrack {

enum class Algorithm {
  kRecursive,          // sine-domain recursive tracker
  kAoA,                // angle-domain recursive tracker
  kIeee80211ad,        // codebook sweep and refine
  kLeastSquares,       // LS channel estimate + phase-only beam
  kCompressedSensing,  // random probes + one-sparse OMP
};

std::string_view algorithm_name(Algorithm alg);
Algorithm parse_algorithm(std::string_view name);

enum class InitMode {
  kSweep,    // Stage-1 codebook sweep
  kUniform,  // x_hat0 supplied by the caller (uniform draw), no sweep
};

std::string_view init_mode_name(InitMode mode);
InitMode parse_init_mode(std::string_view name);

struct TrackerSetup {
  ArrayGeometry data_geom{16};
  ArrayGeometry track_geom{16};
  StepSizeSchedule schedule = StepSizeSchedule::diminishing(1.0);
  int dictionary_size = 32;
  InitMode init = InitMode::kSweep;
  double initial_direction = 0.0;  // used with InitMode::kUniform
  int ad11_period = 3;
  std::size_t ls_window = 0;
  std::size_t cs_window = 0;
  std::shared_ptr<const CsDictionary> cs_dictionary;
};

/// State after this slot's pilot. `x_hat` is absent for trackers that do not
/// estimate a direction (LS). When `data_beam` is absent the data beam is
/// conjugate_beam(data_geom, *x_hat). `channel` holds a normalized estimate of
/// a(x) for trackers that reconstruct h directly.
struct TrackerEstimate {
  std::optional<double> x_hat;
  std::optional<double> theta_hat;
  std::optional<CVector> channel;
  std::optional<BeamformingWeights> data_beam;
};

class BeamTracker {
 public:
  virtual ~BeamTracker() = default;

  /// Array the pilots are received on.
  virtual const ArrayGeometry& pilot_geometry() const = 0;

  /// Whether the tracker consumes the warm-up codebook sweep.
  virtual bool needs_sweep() const { return true; }

  /// Warm-up pilots observed with dft_codebook(pilot_geometry()) in order.
  virtual void train(std::span<const Observation> sweep) = 0;

  virtual BeamformingWeights next_probe() = 0;
  virtual void update(const Observation& y) = 0;
  virtual TrackerEstimate estimate() const = 0;
};

std::unique_ptr<BeamTracker> make_tracker(Algorithm alg, const TrackerSetup& setup,
                                          std::mt19937_64 probe_rng);

}  // namespace beamtrack
