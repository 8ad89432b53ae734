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

#include "beamtrack/baselines.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace beamtrack {

namespace {

using EMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EVector = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

constexpr double kRankThreshold = 1e-10;

CVector solve_full_rank(const EMatrix& a, const EVector& b) {
  Eigen::ColPivHouseholderQR<EMatrix> qr(a);
  qr.setThreshold(kRankThreshold);
  if (qr.rank() < a.cols()) {
    throw std::invalid_argument("pilot weights do not span the array (rank " +
                                std::to_string(qr.rank()) + " < " + std::to_string(a.cols()) +
                                ")");
  }
  const EVector h = qr.solve(b);
  return CVector(h.data(), h.data() + h.size());
}

void accumulate_lags(std::span<const cplx> w, std::span<cplx> lags) {
  const std::size_t M = w.size();
  for (std::size_t d = 0; d < M; ++d) {
    cplx acc{0.0, 0.0};
    for (std::size_t l = 0; l + d < M; ++l) acc += w[l + d] * std::conj(w[l]);
    lags[d] += acc;
  }
}

}  // namespace

// ---- sweep and refine ------------------------------------------------------

Ad11State make_ad11_state(int period) {
  if (period < 3) {
    throw std::invalid_argument("refinement period must cover the three probes");
  }
  Ad11State s;
  s.period = period;
  return s;
}

std::array<int, 3> ad11_neighbors(int best, int codebook_size) {
  if (codebook_size < 3) {
    throw std::invalid_argument("sweep-and-refine needs at least 3 codebook beams");
  }
  const int centre = std::clamp(best, 2, codebook_size - 1);
  return {centre - 1, centre, centre + 1};
}

int ad11_probe_index(const Ad11State& state, int codebook_size) {
  if (state.phase == Ad11State::Phase::kSweeping) return state.sweep_cursor + 1;
  if (state.probe_cursor < 3) {
    return ad11_neighbors(state.best_index, codebook_size)[state.probe_cursor];
  }
  return state.best_index;
}

Ad11Step ad11_step(const Ad11State& state, const Observation& y,
                   std::span<const BeamformingWeights> codebook) {
  const int M = static_cast<int>(codebook.size());
  Ad11State next = state;
  const double magnitude = std::abs(y.y);
  if (state.phase == Ad11State::Phase::kSweeping) {
    if (magnitude > state.sweep_best_magnitude) {
      next.sweep_best_magnitude = magnitude;
      next.best_index = state.sweep_cursor + 1;
    }
    if (++next.sweep_cursor == M) {
      next.phase = Ad11State::Phase::kTracking;
      next.probe_cursor = 0;
    }
  } else {
    if (state.probe_cursor < 3) {
      next.probe_buffer[static_cast<std::size_t>(state.probe_cursor)] = magnitude;
    }
    if (state.probe_cursor == 2) {
      const auto probes = ad11_neighbors(state.best_index, M);
      const auto it = std::max_element(next.probe_buffer.begin(), next.probe_buffer.end());
      next.best_index = probes[static_cast<std::size_t>(it - next.probe_buffer.begin())];
    }
    next.probe_cursor = (state.probe_cursor + 1) % state.period;
  }
  return Ad11Step{next, codebook[static_cast<std::size_t>(next.best_index - 1)]};
}

// ---- least squares ---------------------------------------------------------

CVector ls_estimate(std::span<const Observation> pilots,
                    std::span<const BeamformingWeights> weights) {
  if (pilots.size() != weights.size() || pilots.empty()) {
    throw std::invalid_argument("least squares needs matching, non-empty pilot and weight lists");
  }
  const auto M = static_cast<Eigen::Index>(weights.front().size());
  EMatrix a(static_cast<Eigen::Index>(pilots.size()), M);
  EVector b(a.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const auto& w = weights[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(w.size()) != M) {
      throw std::invalid_argument("pilot weights have inconsistent lengths");
    }
    for (Eigen::Index m = 0; m < M; ++m) a(i, m) = std::conj(w[static_cast<std::size_t>(m)]);
    b(i) = pilots[static_cast<std::size_t>(i)].y;
  }
  return solve_full_rank(a, b);
}

BeamformingWeights phase_only_beam(std::span<const cplx> h_hat) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(h_hat.size()));
  CVector e(h_hat.size());
  for (std::size_t m = 0; m < e.size(); ++m) {
    e[m] = std::polar(scale, std::arg(h_hat[m]));
  }
  return BeamformingWeights(std::move(e));
}

LsEstimator::LsEstimator(const ArrayGeometry& geom, std::size_t window)
    : geom_(geom), window_(window) {
  if (window_ == 0) {
    gram_.assign(geom.size() * geom.size(), cplx{0.0, 0.0});
    rhs_.assign(geom.size(), cplx{0.0, 0.0});
  }
}

void LsEstimator::push(const Observation& y, const BeamformingWeights& w) {
  if (w.size() != geom_.size()) {
    throw std::invalid_argument("pilot weight length does not match the array");
  }
  ++count_;
  if (window_ == 0) {
    const std::size_t M = geom_.size();
    for (std::size_t r = 0; r < M; ++r) {
      rhs_[r] += w[r] * y.y;
      for (std::size_t c = 0; c < M; ++c) gram_[r * M + c] += w[r] * std::conj(w[c]);
    }
    return;
  }
  pilots_.push_back(y);
  weights_.push_back(w);
  if (pilots_.size() > window_) {
    pilots_.pop_front();
    weights_.pop_front();
  }
}

CVector LsEstimator::estimate() const {
  if (window_ != 0) {
    const std::vector<Observation> p(pilots_.begin(), pilots_.end());
    const std::vector<BeamformingWeights> w(weights_.begin(), weights_.end());
    return ls_estimate(p, w);
  }
  if (count_ == 0) throw std::invalid_argument("least squares has no pilots yet");
  const auto M = static_cast<Eigen::Index>(geom_.size());
  const EMatrix g = Eigen::Map<const EMatrix>(gram_.data(), M, M);
  const EVector b = Eigen::Map<const EVector>(rhs_.data(), M);
  return solve_full_rank(g, b);
}

// ---- compressed sensing ----------------------------------------------------

CsDictionary::CsDictionary(const ArrayGeometry& geom, int size) : geom_(geom), grid_(size) {
  const std::size_t M = geom.size();
  const double k = geom.phase_scale();
  phasors_.resize(M * static_cast<std::size_t>(size));
  for (std::size_t g = 0; g < static_cast<std::size_t>(size); ++g) {
    for (std::size_t m = 0; m < M; ++m) {
      phasors_[g * M + m] = std::polar(1.0, k * static_cast<double>(m) * grid_.points()[g]);
    }
  }
}

double CsDictionary::argmax(std::span<const cplx> v, std::span<const cplx> lags) const {
  const std::size_t M = geom_.size();
  if (v.size() != M || lags.size() != M) {
    throw std::invalid_argument("matched-filter inputs do not match the dictionary array");
  }
  const auto pts = grid_.points();
  double best_num = -1.0;
  double best_den = 1.0;
  std::size_t best = 0;
  for (std::size_t g = 0; g < pts.size(); ++g) {
    const cplx* t = &phasors_[g * M];
    cplx num{0.0, 0.0};
    cplx tail{0.0, 0.0};
    num += t[0] * v[0];
    for (std::size_t m = 1; m < M; ++m) {
      num += t[m] * v[m];
      tail += t[m] * lags[m];
    }
    const double den = lags[0].real() + 2.0 * tail.real();
    if (!(den > 0.0)) continue;
    const double n2 = std::norm(num);
    // n2 / den > best_num / best_den without dividing
    if (n2 * best_den > best_num * den) {
      best_num = n2;
      best_den = den;
      best = g;
    }
  }
  return pts[best];
}

BeamformingWeights random_qpsk_beam(int num_antennas, std::mt19937_64& rng) {
  static constexpr std::array<cplx, 4> kSymbols{cplx{1, 0}, cplx{-1, 0}, cplx{0, 1}, cplx{0, -1}};
  std::uniform_int_distribution<int> pick(0, 3);
  const double scale = 1.0 / std::sqrt(static_cast<double>(num_antennas));
  CVector e(static_cast<std::size_t>(num_antennas));
  for (auto& entry : e) entry = scale * kSymbols[static_cast<std::size_t>(pick(rng))];
  return BeamformingWeights(std::move(e));
}

double cs_estimate(const CsDictionary& dict, std::span<const Observation> pilots,
                   std::span<const BeamformingWeights> weights) {
  if (pilots.empty() || pilots.size() != weights.size()) {
    throw std::invalid_argument("sparse recovery needs matching, non-empty pilot and weight lists");
  }
  const std::size_t M = dict.geometry().size();
  CVector v(M, cplx{0.0, 0.0});
  CVector lags(M, cplx{0.0, 0.0});
  for (std::size_t i = 0; i < pilots.size(); ++i) {
    const auto w = weights[i].entries();
    if (w.size() != M) throw std::invalid_argument("pilot weight length does not match the array");
    for (std::size_t m = 0; m < M; ++m) v[m] += w[m] * pilots[i].y;
    accumulate_lags(w, lags);
  }
  return dict.argmax(v, lags);
}

CsEstimator::CsEstimator(std::shared_ptr<const CsDictionary> dict, std::size_t window)
    : dict_(std::move(dict)), window_(window) {
  if (!dict_) throw std::invalid_argument("sparse recovery needs a dictionary");
  v_.assign(dict_->geometry().size(), cplx{0.0, 0.0});
  lags_.assign(dict_->geometry().size(), cplx{0.0, 0.0});
}

void CsEstimator::push(const Observation& y, const BeamformingWeights& w) {
  if (w.size() != dict_->geometry().size()) {
    throw std::invalid_argument("pilot weight length does not match the array");
  }
  ++count_;
  if (window_ == 0) {
    for (std::size_t m = 0; m < v_.size(); ++m) v_[m] += w[m] * y.y;
    accumulate_lags(w.entries(), lags_);
    return;
  }
  pilots_.push_back(y);
  weights_.push_back(w);
  if (pilots_.size() > window_) {
    pilots_.pop_front();
    weights_.pop_front();
  }
}

double CsEstimator::estimate() const {
  if (count_ == 0) throw std::invalid_argument("sparse recovery has no pilots yet");
  if (window_ == 0) return dict_->argmax(v_, lags_);
  const std::vector<Observation> p(pilots_.begin(), pilots_.end());
  const std::vector<BeamformingWeights> w(weights_.begin(), weights_.end());
  return cs_estimate(*dict_, p, w);
}

}  // namespace beamtrack
