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

#include "beamtrack/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace beamtrack {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::string_view trajectory_name(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::kStatic:
      return "static";
    case TrajectoryKind::kSinusoidal:
      return "sinusoidal";
    case TrajectoryKind::kFixedVelocity:
      return "fixed_velocity";
  }
  return "static";
}

TrajectoryKind parse_trajectory(std::string_view name) {
  if (name == "static") return TrajectoryKind::kStatic;
  if (name == "sinusoidal") return TrajectoryKind::kSinusoidal;
  if (name == "fixed_velocity") return TrajectoryKind::kFixedVelocity;
  throw std::invalid_argument("unknown trajectory kind '" + std::string(name) + "'");
}

TrajectorySamples generate(const Trajectory& traj, std::mt19937_64& rng) {
  if (traj.length <= 0) {
    throw std::invalid_argument("trajectory length must be positive");
  }
  const auto count = static_cast<std::size_t>(traj.length) + 1;
  TrajectorySamples out;
  out.theta.resize(count);

  switch (traj.kind) {
    case TrajectoryKind::kStatic: {
      double x;
      if (traj.static_x) {
        x = *traj.static_x;
        if (!(x >= -1.0 && x <= 1.0)) throw std::domain_error("static direction outside [-1, 1]");
      } else {
        x = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
      }
      std::fill(out.theta.begin(), out.theta.end(), std::asin(x));
      out.x.assign(count, x);
      return out;
    }
    case TrajectoryKind::kSinusoidal: {
      std::normal_distribution<double> jitter(0.0, 1.0);
      for (std::size_t n = 0; n < count; ++n) {
        const double clean =
            traj.amplitude * std::sin(2.0 * kPi * static_cast<double>(n) / traj.period);
        out.theta[n] = std::clamp(clean + traj.jitter * jitter(rng), -kPi / 2.0, kPi / 2.0);
      }
      break;
    }
    case TrajectoryKind::kFixedVelocity: {
      if (!(traj.omega >= 0.0)) throw std::invalid_argument("angular velocity must be nonnegative");
      if (traj.omega > 2.0 * traj.band) {
        throw std::invalid_argument("angular velocity larger than the band it must stay in");
      }
      double theta = 0.0;
      double sign = 1.0;
      out.theta[0] = theta;
      for (std::size_t n = 1; n < count; ++n) {
        if (std::abs(theta + sign * traj.omega) > traj.band) sign = -sign;
        theta += sign * traj.omega;
        out.theta[n] = theta;
      }
      break;
    }
  }
  out.x.resize(count);
  for (std::size_t n = 0; n < count; ++n) {
    out.x[n] = std::clamp(std::sin(out.theta[n]), -1.0, 1.0);
  }
  return out;
}

std::uint64_t RngPlan::seed_for(std::uint64_t trial, Stream stream, std::uint64_t lane) const {
  std::uint64_t h = splitmix64(master_);
  h = splitmix64(h ^ trial);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  return splitmix64(h ^ lane);
}

cplx complex_normal(std::mt19937_64& rng) {
  std::normal_distribution<double> half(0.0, std::sqrt(0.5));
  const double re = half(rng);
  const double im = half(rng);
  return {re, im};
}

}  // namespace beamtrack
