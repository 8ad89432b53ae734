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

#include "beamtrack/trackers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace beamtrack {

StepSizeSchedule::StepSizeSchedule(Kind kind, double alpha, double n0)
    : kind_(kind), alpha_(alpha), n0_(n0) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("step-size coefficient must be positive");
  }
  if (!(n0 >= 0.0) || !std::isfinite(n0)) {
    throw std::invalid_argument("step-size offset must be nonnegative");
  }
}

StepSizeSchedule StepSizeSchedule::diminishing(double alpha, double n0) {
  return StepSizeSchedule(Kind::kDiminishing, alpha, n0);
}

StepSizeSchedule StepSizeSchedule::fixed(double alpha) {
  return StepSizeSchedule(Kind::kFixed, alpha, 0.0);
}

double StepSizeSchedule::operator()(long long n) const {
  if (n < 1) {
    throw std::invalid_argument("step sizes are indexed from slot 1");
  }
  if (kind_ == Kind::kFixed) return alpha_;
  return alpha_ / (static_cast<double>(n) + n0_);
}

SweepDictionary::SweepDictionary(int size) {
  if (size < 1) {
    throw std::invalid_argument("dictionary size must be positive");
  }
  points_.reserve(static_cast<std::size_t>(size));
  for (int k = 1; k <= size; ++k) {
    points_.push_back(static_cast<double>(2 * k - 1 - size) / size);
  }
}

std::vector<double> codebook_directions(const ArrayGeometry& geom) {
  const int M = geom.num_antennas();
  std::vector<double> dirs;
  dirs.reserve(geom.size());
  for (int m = 1; m <= M; ++m) {
    dirs.push_back(static_cast<double>(2 * m - M - 1) / M);
  }
  return dirs;
}

std::vector<BeamformingWeights> dft_codebook(const ArrayGeometry& geom) {
  std::vector<BeamformingWeights> book;
  book.reserve(geom.size());
  for (double x : codebook_directions(geom)) {
    book.push_back(conjugate_beam(geom, x));
  }
  return book;
}

double coarse_sweep(const ArrayGeometry& geom, const SweepDictionary& dict,
                    std::span<const Observation> pilots) {
  if (pilots.size() != geom.size()) {
    throw std::invalid_argument("coarse sweep needs exactly " +
                                std::to_string(geom.num_antennas()) + " pilots, got " +
                                std::to_string(pilots.size()));
  }
  const auto book = dft_codebook(geom);
  CVector combined(geom.size(), cplx{0.0, 0.0});
  for (std::size_t m = 0; m < book.size(); ++m) {
    for (std::size_t i = 0; i < combined.size(); ++i) {
      combined[i] += pilots[m].y * book[m][i];
    }
  }
  double best_v = dict.points().front();
  double best = -1.0;
  for (double v : dict.points()) {
    const auto a = steering_vector(geom, v);
    const double score = std::abs(inner(a.entries(), combined));
    if (score > best) {
      best = score;
      best_v = v;
    }
  }
  return best_v;
}

double alpha_star(const ArrayGeometry& geom) {
  const double M = geom.num_antennas();
  return 1.0 / (std::sqrt(M) * (M - 1.0) * kPi * geom.spacing_over_wavelength());
}

SineTrackerState make_sine_tracker(const ArrayGeometry& track_geom, double x_hat0,
                                   StepSizeSchedule schedule) {
  if (!(x_hat0 >= -1.0 && x_hat0 <= 1.0)) {
    throw std::domain_error("initial direction must lie in [-1, 1]");
  }
  return SineTrackerState{x_hat0, 1, schedule, track_geom};
}

SineTrackerState recursive_step(const SineTrackerState& state, const Observation& y) {
  SineTrackerState next = state;
  next.x_hat = std::clamp(state.x_hat - state.schedule(state.slot) * y.y.imag(), -1.0, 1.0);
  ++next.slot;
  return next;
}

BeamformingWeights AoATrackerState::probe_beam() const {
  return conjugate_beam(track_geom, std::clamp(std::sin(theta_hat), -1.0, 1.0));
}

AoATrackerState make_aoa_tracker(const ArrayGeometry& track_geom, double theta_hat0,
                                 StepSizeSchedule schedule) {
  if (!(std::abs(theta_hat0) <= kPi / 2.0)) {
    throw std::domain_error("initial angle must lie in [-pi/2, pi/2]");
  }
  return AoATrackerState{theta_hat0, 1, schedule, track_geom};
}

AoATrackerState aoa_step(const AoATrackerState& state, const Observation& y) {
  AoATrackerState next = state;
  const double c = std::cos(state.theta_hat);
  if (std::abs(c) >= AoATrackerState::kCosineGuard) {
    next.theta_hat = std::clamp(state.theta_hat - state.schedule(state.slot) / c * y.y.imag(),
                                -kPi / 2.0, kPi / 2.0);
  }
  ++next.slot;
  return next;
}

}  // namespace beamtrack
