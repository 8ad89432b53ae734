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

#include "beamtrack/algorithms.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace beamtrack {

std::string_view algorithm_name(Algorithm alg) {
  switch (alg) {
    case Algorithm::kRecursive:
      return "recursive";
    case Algorithm::kAoA:
      return "aoa";
    case Algorithm::kIeee80211ad:
      return "ieee80211ad";
    case Algorithm::kLeastSquares:
      return "least_squares";
    case Algorithm::kCompressedSensing:
      return "compressed_sensing";
  }
  return "recursive";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "recursive") return Algorithm::kRecursive;
  if (name == "aoa") return Algorithm::kAoA;
  if (name == "ieee80211ad") return Algorithm::kIeee80211ad;
  if (name == "least_squares") return Algorithm::kLeastSquares;
  if (name == "compressed_sensing") return Algorithm::kCompressedSensing;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

std::string_view init_mode_name(InitMode mode) {
  return mode == InitMode::kSweep ? "sweep" : "uniform";
}

InitMode parse_init_mode(std::string_view name) {
  if (name == "sweep") return InitMode::kSweep;
  if (name == "uniform") return InitMode::kUniform;
  throw std::invalid_argument("unknown init mode '" + std::string(name) + "'");
}

namespace {

class RecursiveTracker final : public BeamTracker {
 public:
  explicit RecursiveTracker(const TrackerSetup& s)
      : dict_(s.dictionary_size),
        sweep_(s.init == InitMode::kSweep),
        state_(make_sine_tracker(s.track_geom, sweep_ ? 0.0 : s.initial_direction, s.schedule)) {}

  const ArrayGeometry& pilot_geometry() const override { return state_.track_geom; }
  bool needs_sweep() const override { return sweep_; }

  void train(std::span<const Observation> sweep) override {
    state_.x_hat = coarse_sweep(state_.track_geom, dict_, sweep);
  }

  BeamformingWeights next_probe() override { return state_.probe_beam(); }
  void update(const Observation& y) override { state_ = recursive_step(state_, y); }

  TrackerEstimate estimate() const override {
    TrackerEstimate e;
    e.x_hat = state_.x_hat;
    e.theta_hat = std::asin(state_.x_hat);
    return e;
  }

 private:
  SweepDictionary dict_;
  bool sweep_;
  SineTrackerState state_;
};

class AoATracker final : public BeamTracker {
 public:
  explicit AoATracker(const TrackerSetup& s)
      : dict_(s.dictionary_size),
        sweep_(s.init == InitMode::kSweep),
        state_(make_aoa_tracker(s.track_geom, sweep_ ? 0.0 : std::asin(s.initial_direction),
                                s.schedule)) {}

  const ArrayGeometry& pilot_geometry() const override { return state_.track_geom; }
  bool needs_sweep() const override { return sweep_; }

  void train(std::span<const Observation> sweep) override {
    state_.theta_hat = std::asin(coarse_sweep(state_.track_geom, dict_, sweep));
  }

  BeamformingWeights next_probe() override { return state_.probe_beam(); }
  void update(const Observation& y) override { state_ = aoa_step(state_, y); }

  TrackerEstimate estimate() const override {
    TrackerEstimate e;
    e.theta_hat = state_.theta_hat;
    e.x_hat = std::sin(state_.theta_hat);
    return e;
  }

 private:
  SweepDictionary dict_;
  bool sweep_;
  AoATrackerState state_;
};

class Ad11Tracker final : public BeamTracker {
 public:
  explicit Ad11Tracker(const TrackerSetup& s)
      : geom_(s.data_geom),
        codebook_(dft_codebook(s.data_geom)),
        directions_(codebook_directions(s.data_geom)),
        state_(make_ad11_state(s.ad11_period)) {}

  const ArrayGeometry& pilot_geometry() const override { return geom_; }

  void train(std::span<const Observation> sweep) override {
    for (const auto& y : sweep) state_ = ad11_step(state_, y, codebook_).state;
  }

  BeamformingWeights next_probe() override {
    return codebook_[static_cast<std::size_t>(ad11_probe_index(state_, geom_.num_antennas()) - 1)];
  }

  void update(const Observation& y) override { state_ = ad11_step(state_, y, codebook_).state; }

  TrackerEstimate estimate() const override {
    TrackerEstimate e;
    const auto best = static_cast<std::size_t>(state_.best_index - 1);
    e.x_hat = directions_[best];
    e.theta_hat = std::asin(directions_[best]);
    e.data_beam = codebook_[best];
    return e;
  }

 private:
  ArrayGeometry geom_;
  std::vector<BeamformingWeights> codebook_;
  std::vector<double> directions_;
  Ad11State state_;
};

class LsTracker final : public BeamTracker {
 public:
  explicit LsTracker(const TrackerSetup& s)
      : geom_(s.data_geom), codebook_(dft_codebook(s.data_geom)), ls_(s.data_geom, s.ls_window) {}

  const ArrayGeometry& pilot_geometry() const override { return geom_; }

  void train(std::span<const Observation> sweep) override {
    for (std::size_t m = 0; m < sweep.size(); ++m) ls_.push(sweep[m], codebook_[m]);
  }

  BeamformingWeights next_probe() override {
    last_probe_ = cursor_;
    cursor_ = (cursor_ + 1) % codebook_.size();
    return codebook_[last_probe_];
  }

  void update(const Observation& y) override { ls_.push(y, codebook_[last_probe_]); }

  TrackerEstimate estimate() const override {
    TrackerEstimate e;
    e.channel = ls_.estimate();
    e.data_beam = phase_only_beam(*e.channel);
    return e;
  }

 private:
  ArrayGeometry geom_;
  std::vector<BeamformingWeights> codebook_;
  LsEstimator ls_;
  std::size_t cursor_ = 0;
  std::size_t last_probe_ = 0;
};

class CsTracker final : public BeamTracker {
 public:
  CsTracker(const TrackerSetup& s, std::mt19937_64 rng)
      : geom_(s.data_geom),
        codebook_(dft_codebook(s.data_geom)),
        cs_(s.cs_dictionary ? s.cs_dictionary : std::make_shared<const CsDictionary>(s.data_geom),
            s.cs_window),
        last_probe_(codebook_.front()),
        rng_(std::move(rng)) {}

  const ArrayGeometry& pilot_geometry() const override { return geom_; }

  void train(std::span<const Observation> sweep) override {
    for (std::size_t m = 0; m < sweep.size(); ++m) cs_.push(sweep[m], codebook_[m]);
  }

  BeamformingWeights next_probe() override {
    last_probe_ = random_qpsk_beam(geom_.num_antennas(), rng_);
    return last_probe_;
  }

  void update(const Observation& y) override { cs_.push(y, last_probe_); }

  TrackerEstimate estimate() const override {
    TrackerEstimate e;
    e.x_hat = cs_.estimate();
    e.theta_hat = std::asin(*e.x_hat);
    return e;
  }

 private:
  ArrayGeometry geom_;
  std::vector<BeamformingWeights> codebook_;
  CsEstimator cs_;
  BeamformingWeights last_probe_;
  std::mt19937_64 rng_;
};

}  // namespace

std::unique_ptr<BeamTracker> make_tracker(Algorithm alg, const TrackerSetup& setup,
                                          std::mt19937_64 probe_rng) {
  switch (alg) {
    case Algorithm::kRecursive:
      return std::make_unique<RecursiveTracker>(setup);
    case Algorithm::kAoA:
      return std::make_unique<AoATracker>(setup);
    case Algorithm::kIeee80211ad:
      return std::make_unique<Ad11Tracker>(setup);
    case Algorithm::kLeastSquares:
      return std::make_unique<LsTracker>(setup);
    case Algorithm::kCompressedSensing:
      return std::make_unique<CsTracker>(setup, std::move(probe_rng));
  }
  throw std::invalid_argument("unknown algorithm");
}

}  // namespace beamtrack
