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

// Reference trackers: codebook sweep-and-refine (IEEE 802.11ad style),
// least-squares channel estimation with a phase-only beam, and one-sparse
// orthogonal matching pursuit over a fine sine grid.

#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "beamtrack/array.hpp"
#include "beamtrack/trackers.hpp"

namespace beamtrack {

// ---- sweep and refine ------------------------------------------------------

struct Ad11State {
  enum class Phase { kSweeping, kTracking };

  int best_index = 1;  // 1-based codebook index
  Phase phase = Phase::kSweeping;
  int sweep_cursor = 0;
  double sweep_best_magnitude = -1.0;
  int probe_cursor = 0;  // position inside the current refinement round
  std::array<double, 3> probe_buffer{};
  int period = 3;
};

Ad11State make_ad11_state(int period = 3);

/// Indices probed by a refinement round around `best`: {best-1, best, best+1},
/// shifted inwards at the codebook edges. Requires M >= 3.
std::array<int, 3> ad11_neighbors(int best, int codebook_size);

/// 1-based codebook index of the pilot beam for the next slot.
int ad11_probe_index(const Ad11State& state, int codebook_size);

struct Ad11Step {
  Ad11State state;
  BeamformingWeights data_beam;
};

/// Consume one pilot observed with codebook[ad11_probe_index(state) - 1].
Ad11Step ad11_step(const Ad11State& state, const Observation& y,
                   std::span<const BeamformingWeights> codebook);

// ---- least squares ---------------------------------------------------------

/// Solves y_i = w_i^H h in the least-squares sense. Since pilots are
/// normalized by beta, the result estimates a(x). Throws std::invalid_argument
/// when the weights do not span the array.
CVector ls_estimate(std::span<const Observation> pilots,
                    std::span<const BeamformingWeights> weights);

/// Entry m = exp(j arg(h_m)) / sqrt(M).
BeamformingWeights phase_only_beam(std::span<const cplx> h_hat);

/// Sliding-window LS estimator. `window == 0` keeps every pilot and solves
/// the accumulated normal equations instead.
class LsEstimator {
 public:
  LsEstimator(const ArrayGeometry& geom, std::size_t window);

  void push(const Observation& y, const BeamformingWeights& w);
  std::size_t count() const { return count_; }
  CVector estimate() const;

 private:
  ArrayGeometry geom_;
  std::size_t window_;
  std::size_t count_ = 0;
  std::deque<Observation> pilots_;
  std::deque<BeamformingWeights> weights_;
  CVector gram_;  // M x M row-major, sum w w^H
  CVector rhs_;   // sum w y
};

// ---- compressed sensing ----------------------------------------------------

/// Uniform sine grid with precomputed conj(a(g)) phasors.
class CsDictionary {
 public:
  CsDictionary(const ArrayGeometry& geom, int size = 1024);

  const ArrayGeometry& geometry() const { return geom_; }
  std::span<const double> points() const { return grid_.points(); }

  /// argmax_g |a(g)^H v|^2 / (a(g)^H G a(g)) where `lags[d]` holds the sum of
  /// G along its d-th subdiagonal. Ties go to the smallest g.
  double argmax(std::span<const cplx> v, std::span<const cplx> lags) const;

 private:
  ArrayGeometry geom_;
  SweepDictionary grid_;
  CVector phasors_;  // grid-major, exp(+j k m g)
};

/// Random probing beam with entries drawn from {+-1, +-j}/sqrt(M).
BeamformingWeights random_qpsk_beam(int num_antennas, std::mt19937_64& rng);

/// One-sparse OMP: the dictionary point whose normalized measurement column
/// best matches the pilots. Throws std::invalid_argument on an empty window.
double cs_estimate(const CsDictionary& dict, std::span<const Observation> pilots,
                   std::span<const BeamformingWeights> weights);

/// Sliding-window OMP estimator; `window == 0` keeps every pilot.
class CsEstimator {
 public:
  CsEstimator(std::shared_ptr<const CsDictionary> dict, std::size_t window);

  void push(const Observation& y, const BeamformingWeights& w);
  std::size_t count() const { return count_; }
  double estimate() const;

 private:
  std::shared_ptr<const CsDictionary> dict_;
  std::size_t window_;
  std::size_t count_ = 0;
  std::deque<Observation> pilots_;
  std::deque<BeamformingWeights> weights_;
  CVector v_;
  CVector lags_;
};

}  // namespace beamtrack
