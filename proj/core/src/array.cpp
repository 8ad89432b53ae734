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

#include "beamtrack/array.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace beamtrack {

namespace {

void require_direction(double x, const char* what) {
  if (!(x >= -1.0 && x <= 1.0)) {
    throw std::domain_error(std::string(what) + " must lie in [-1, 1], got " + std::to_string(x));
  }
}

void require_same_size(const ArrayGeometry& geom, std::size_t n) {
  if (geom.size() != n) {
    throw std::invalid_argument("beam has " + std::to_string(n) + " entries, array has " +
                                std::to_string(geom.num_antennas()));
  }
}

}  // namespace

ArrayGeometry::ArrayGeometry(int num_antennas, double spacing_over_wavelength)
    : num_antennas_(num_antennas), spacing_ratio_(spacing_over_wavelength) {
  if (num_antennas < 2) {
    throw std::invalid_argument("array needs at least 2 antennas");
  }
  if (!(spacing_over_wavelength > 0.0) || !std::isfinite(spacing_over_wavelength)) {
    throw std::invalid_argument("antenna spacing must be positive");
  }
}

ArrayGeometry ArrayGeometry::from_lengths(int num_antennas, double spacing, double wavelength) {
  if (!(spacing > 0.0) || !(wavelength > 0.0)) {
    throw std::invalid_argument("spacing and wavelength must be positive");
  }
  return ArrayGeometry(num_antennas, spacing / wavelength);
}

ArrayGeometry ArrayGeometry::subarray(int num_antennas) const {
  if (num_antennas > num_antennas_) {
    throw std::invalid_argument("subarray larger than the array");
  }
  return ArrayGeometry(num_antennas, spacing_ratio_);
}

ChannelState ChannelState::make(double x, cplx beta, double snr) {
  require_direction(x, "direction");
  if (!(snr > 0.0) || !std::isfinite(snr)) {
    throw std::invalid_argument("SNR must be positive");
  }
  return ChannelState{x, beta, snr};
}

double ChannelState::theta() const { return std::asin(std::clamp(x, -1.0, 1.0)); }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

BeamformingWeights::BeamformingWeights(CVector entries) : entries_(std::move(entries)) {
  if (entries_.size() < 2) {
    throw std::invalid_argument("beam needs at least 2 entries");
  }
  const double expected = 1.0 / std::sqrt(static_cast<double>(entries_.size()));
  for (const auto& e : entries_) {
    if (std::abs(std::abs(e) - expected) > 1e-9) {
      throw std::invalid_argument("beam entries must have modulus 1/sqrt(M)");
    }
  }
}

BeamformingWeights BeamformingWeights::from_phases(std::span<const double> phases) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(phases.size()));
  CVector e(phases.size());
  for (std::size_t m = 0; m < phases.size(); ++m) {
    e[m] = std::polar(scale, -phases[m]);
  }
  return BeamformingWeights(std::move(e));
}

cplx inner(std::span<const cplx> w, std::span<const cplx> v) {
  if (w.size() != v.size()) {
    throw std::invalid_argument("inner product of vectors with different lengths");
  }
  cplx acc{0.0, 0.0};
  for (std::size_t m = 0; m < w.size(); ++m) {
    acc += std::conj(w[m]) * v[m];
  }
  return acc;
}

double squared_norm(std::span<const cplx> v) {
  double acc = 0.0;
  for (const auto& e : v) acc += std::norm(e);
  return acc;
}

SteeringVector steering_vector(const ArrayGeometry& geom, double x) {
  require_direction(x, "direction");
  const double k = geom.phase_scale();
  CVector e(geom.size());
  for (std::size_t m = 0; m < e.size(); ++m) {
    e[m] = std::polar(1.0, -k * static_cast<double>(m) * x);
  }
  return SteeringVector(std::move(e));
}

BeamformingWeights conjugate_beam(const ArrayGeometry& geom, double x_hat) {
  require_direction(x_hat, "beam direction");
  const double k = geom.phase_scale();
  const double scale = 1.0 / std::sqrt(static_cast<double>(geom.num_antennas()));
  CVector e(geom.size());
  for (std::size_t m = 0; m < e.size(); ++m) {
    e[m] = std::polar(scale, -k * static_cast<double>(m) * x_hat);
  }
  return BeamformingWeights(std::move(e), BeamformingWeights::Unchecked{});
}

Observation observe(const ArrayGeometry& geom, const ChannelState& chan,
                    const BeamformingWeights& w, cplx noise) {
  require_same_size(geom, w.size());
  const auto a = steering_vector(geom, chan.x);
  return Observation{inner(w.entries(), a.entries()) + noise / std::sqrt(chan.snr)};
}

double fisher_information(const ArrayGeometry& geom, const ChannelState& chan, double x,
                          const BeamformingWeights& w) {
  require_same_size(geom, w.size());
  const auto a = steering_vector(geom, x);
  const double k = geom.phase_scale();
  // d/dx (w^H a(x)) = sum_m conj(w_m) (-j k m) a_m(x); the -j does not change the modulus.
  cplx derivative{0.0, 0.0};
  for (std::size_t m = 0; m < a.size(); ++m) {
    derivative += k * static_cast<double>(m) * std::conj(w[m]) * a[m];
  }
  return 2.0 * chan.snr * std::norm(derivative);
}

double i_max(const ArrayGeometry& geom, double rho) {
  const double M = geom.num_antennas();
  const double r = geom.spacing_over_wavelength();
  return 2.0 * M * (M - 1.0) * (M - 1.0) * kPi * kPi * r * r * rho;
}

double crlb_min(const ArrayGeometry& geom, double rho, long long n) {
  if (n <= 0) {
    throw std::invalid_argument("CRLB needs at least one slot");
  }
  return 1.0 / (static_cast<double>(n) * i_max(geom, rho));
}

double channel_mse_limit(const ArrayGeometry& geom, double noise_power) {
  const double M = geom.num_antennas();
  return (2.0 * M - 1.0) * noise_power / (3.0 * (M - 1.0));
}

double surrogate_f(const ArrayGeometry& geom, double v, double x) {
  // a(v)^H a(x) = sum_m exp(j k m (v - x))
  const double u = geom.phase_scale() * (v - x);
  double im = 0.0;
  for (int m = 1; m < geom.num_antennas(); ++m) {
    im += std::sin(u * m);
  }
  return -im / std::sqrt(static_cast<double>(geom.num_antennas()));
}

std::vector<double> stable_points(const ArrayGeometry& geom, double x) {
  require_direction(x, "direction");
  const double spacing = 1.0 / ((geom.num_antennas() - 1) * geom.spacing_over_wavelength());
  const auto k_lo = static_cast<long long>(std::ceil((-1.0 - x) / spacing)) - 1;
  const auto k_hi = static_cast<long long>(std::floor((1.0 - x) / spacing)) + 1;
  std::vector<double> points;
  for (long long k = k_lo; k <= k_hi; ++k) {
    const double v = k == 0 ? x : x + static_cast<double>(k) * spacing;
    if (v > -1.0 && v <= 1.0) points.push_back(v);
  }
  return points;
}

bool Interval::contains(double v) const {
  const bool above = lo_closed ? v >= lo : v > lo;
  const bool below = hi_closed ? v <= hi : v < hi;
  return above && below;
}

Interval mainlobe_interval(const ArrayGeometry& geom, double x0) {
  require_direction(x0, "direction");
  const double half = 1.0 / (geom.num_antennas() * geom.spacing_over_wavelength());
  Interval iv{x0 - half, x0 + half, false, false};
  if (iv.lo < -1.0) {
    iv.lo = -1.0;
    iv.lo_closed = true;
  }
  if (iv.hi > 1.0) {
    iv.hi = 1.0;
    iv.hi_closed = true;
  }
  return iv;
}

double log_likelihood(const ArrayGeometry& geom, const ChannelState& chan, const Observation& y,
                      double x, const BeamformingWeights& w) {
  require_same_size(geom, w.size());
  const auto a = steering_vector(geom, x);
  const cplx residual = y.y - inner(w.entries(), a.entries());
  return std::log(chan.snr / kPi) - chan.snr * std::norm(residual);
}

double beam_gain(const ArrayGeometry& geom, const BeamformingWeights& w, double x) {
  require_same_size(geom, w.size());
  const auto a = steering_vector(geom, x);
  return std::norm(inner(w.entries(), a.entries()));
}

}  // namespace beamtrack
