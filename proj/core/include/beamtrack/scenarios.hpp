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
#include <random>
#include <string_view>
#include <vector>

#include "beamtrack/array.hpp"

namespace beamtrack {

enum class TrajectoryKind { kStatic, kSinusoidal, kFixedVelocity };

std::string_view trajectory_name(TrajectoryKind kind);
TrajectoryKind parse_trajectory(std::string_view name);

/// Ground-truth direction process.
///
///   static          x uniform on [-1, 1] per trial (or `static_x` when set)
///   sinusoidal      theta_n = amplitude sin(2 pi n / period) + jitter * N(0, 1)
///   fixed_velocity  theta_n = theta_{n-1} + s omega, theta_0 = 0, with s
///                   flipped before any step that would leave [-band, band]
struct Trajectory {
  TrajectoryKind kind = TrajectoryKind::kStatic;
  long long length = 1000;
  double omega = 0.064;
  double amplitude = kPi / 3.0;
  double period = 1000.0;
  double jitter = 0.005;
  double band = kPi / 3.0;
  std::optional<double> static_x;
};

/// Index 0 is the direction seen by the warm-up sweep; 1..length are the
/// tracked slots.
struct TrajectorySamples {
  std::vector<double> theta;
  std::vector<double> x;
};

TrajectorySamples generate(const Trajectory& traj, std::mt19937_64& rng);

enum class Stream : std::uint64_t {
  kTrajectory = 1,
  kObservation = 2,
  kProbe = 3,
  kInit = 4,
};

/// Derives independent generators from a master seed. Each (trial, stream,
/// lane) triple maps to its own seed, so results do not depend on the order
/// or thread in which trials run.
class RngPlan {
 public:
  explicit RngPlan(std::uint64_t master_seed) : master_(master_seed) {}

  std::uint64_t master_seed() const { return master_; }
  std::uint64_t seed_for(std::uint64_t trial, Stream stream, std::uint64_t lane = 0) const;
  std::mt19937_64 stream(std::uint64_t trial, Stream stream, std::uint64_t lane = 0) const {
    return std::mt19937_64(seed_for(trial, stream, lane));
  }

 private:
  std::uint64_t master_;
};

/// CN(0, 1): independent N(0, 1/2) real and imaginary parts.
cplx complex_normal(std::mt19937_64& rng);

}  // namespace beamtrack
