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

// Recursive analog beam tracking.
//
// Stage 1 sweeps the DFT codebook once and picks the strongest dictionary
// direction. Stage 2 probes one pilot per slot along the current estimate and
// moves the estimate against Im{y}, which is a stochastic Newton step on the
// pilot log-likelihood.

#pragma once

#include <span>
#include <vector>

#include "beamtrack/array.hpp"

namespace beamtrack {

class StepSizeSchedule {
 public:
  enum class Kind { kDiminishing, kFixed };

  /// a_n = alpha / (n + n0).
  static StepSizeSchedule diminishing(double alpha, double n0 = 0.0);
  /// a_n = alpha.
  static StepSizeSchedule fixed(double alpha);

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double n0() const { return n0_; }

  /// Step size for slot n >= 1.
  double operator()(long long n) const;

 private:
  StepSizeSchedule(Kind kind, double alpha, double n0);

  Kind kind_;
  double alpha_;
  double n0_;
};

/// M0 uniformly spaced sine values (2k - 1 - M0)/M0, k = 1..M0.
class SweepDictionary {
 public:
  explicit SweepDictionary(int size);

  int size() const { return static_cast<int>(points_.size()); }
  std::span<const double> points() const { return points_; }

 private:
  std::vector<double> points_;
};

/// Directions (2m - M - 1)/M, m = 1..M.
std::vector<double> codebook_directions(const ArrayGeometry& geom);

/// Conjugate beams along codebook_directions(geom), in order.
std::vector<BeamformingWeights> dft_codebook(const ArrayGeometry& geom);

/// Stage-1 estimate from M pilots taken with dft_codebook(geom) in order:
/// argmax over the dictionary of |a(v)^H sum_m y_m w_m|. Ties go to the
/// smallest v. Throws std::invalid_argument if pilots.size() != M.
double coarse_sweep(const ArrayGeometry& geom, const SweepDictionary& dict,
                    std::span<const Observation> pilots);

/// lambda / (sqrt(M) (M-1) pi d). With this coefficient the first step from
/// near the true direction is a full Newton step.
double alpha_star(const ArrayGeometry& geom);

struct SineTrackerState {
  double x_hat;
  long long slot = 1;  // slot whose pilot is consumed by the next step
  StepSizeSchedule schedule;
  ArrayGeometry track_geom;

  /// Beam for the next pilot: conjugate_beam(track_geom, x_hat).
  BeamformingWeights probe_beam() const { return conjugate_beam(track_geom, x_hat); }
};

SineTrackerState make_sine_tracker(const ArrayGeometry& track_geom, double x_hat0,
                                   StepSizeSchedule schedule);

/// x_hat <- clip(x_hat - a_n Im{y}, -1, 1); slot advances by one. `y` must
/// have been observed with state.probe_beam().
SineTrackerState recursive_step(const SineTrackerState& state, const Observation& y);

/// Angle-domain variant: theta_hat <- clip(theta_hat - a_n Im{y}/cos(theta_hat),
/// -pi/2, pi/2), probing with conjugate_beam(sin(theta_hat)). Slots where
/// |cos(theta_hat)| < kCosineGuard leave theta_hat unchanged.
struct AoATrackerState {
  static constexpr double kCosineGuard = 1e-6;

  double theta_hat;
  long long slot = 1;
  StepSizeSchedule schedule;
  ArrayGeometry track_geom;

  BeamformingWeights probe_beam() const;
};

AoATrackerState make_aoa_tracker(const ArrayGeometry& track_geom, double theta_hat0,
                                 StepSizeSchedule schedule);

AoATrackerState aoa_step(const AoATrackerState& state, const Observation& y);

}  // namespace beamtrack
