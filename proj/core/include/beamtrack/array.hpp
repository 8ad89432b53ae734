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

// Uniform linear array model: steering vectors, analog beams, pilot
// observations and the Fisher-information analytics that bound any tracker.
//
// Phase convention: entry m (0-based) of a(x) is exp(-j*k*m*x) with
// k = 2*pi*d/lambda, and every inner product is written w^H a(x).

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace beamtrack {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

inline constexpr double kPi = 3.14159265358979323846;

class ArrayGeometry {
 public:
  /// Array of `num_antennas` elements spaced `spacing_over_wavelength`
  /// wavelengths apart. Only the ratio d/lambda enters the model.
  explicit ArrayGeometry(int num_antennas, double spacing_over_wavelength = 0.5);

  static ArrayGeometry from_lengths(int num_antennas, double spacing, double wavelength);

  int num_antennas() const { return num_antennas_; }
  std::size_t size() const { return static_cast<std::size_t>(num_antennas_); }
  double spacing_over_wavelength() const { return spacing_ratio_; }

  /// 2*pi*d/lambda.
  double phase_scale() const { return 2.0 * kPi * spacing_ratio_; }

  /// First `num_antennas` elements of this array.
  ArrayGeometry subarray(int num_antennas) const;

  bool operator==(const ArrayGeometry&) const = default;

 private:
  int num_antennas_;
  double spacing_ratio_;
};

/// True direction (sine of the AoA), normalized complex gain and per-antenna
/// SNR of the single-path channel.
struct ChannelState {
  double x = 0.0;
  cplx beta{1.0 / 1.4142135623730951, 1.0 / 1.4142135623730951};
  double snr = 10.0;

  static ChannelState make(double x, cplx beta, double snr);

  double theta() const;
  double noise_power() const { return std::norm(beta) / snr; }
};

double db_to_linear(double db);

class SteeringVector {
 public:
  explicit SteeringVector(CVector entries) : entries_(std::move(entries)) {}

  std::span<const cplx> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const cplx& operator[](std::size_t m) const { return entries_[m]; }

 private:
  CVector entries_;
};

/// Phase-shifter beam: every entry has modulus 1/sqrt(M).
class BeamformingWeights {
 public:
  /// Entries must each have modulus 1/sqrt(M) (checked to 1e-9).
  explicit BeamformingWeights(CVector entries);

  /// Beam from phase-shifter settings phi_m: entry m = exp(-j*phi_m)/sqrt(M).
  static BeamformingWeights from_phases(std::span<const double> phases);

  std::span<const cplx> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const cplx& operator[](std::size_t m) const { return entries_[m]; }

  /// Phase-shifter setting of element m, i.e. -arg(entry m).
  double phase(std::size_t m) const { return -std::arg(entries_[m]); }

  bool operator==(const BeamformingWeights&) const = default;

 private:
  struct Unchecked {};
  BeamformingWeights(CVector entries, Unchecked) : entries_(std::move(entries)) {}
  friend BeamformingWeights conjugate_beam(const ArrayGeometry&, double);

  CVector entries_;
};

struct Observation {
  cplx y;
};

/// w^H v.
cplx inner(std::span<const cplx> w, std::span<const cplx> v);
double squared_norm(std::span<const cplx> v);

/// Throws std::domain_error unless x lies in [-1, 1].
SteeringVector steering_vector(const ArrayGeometry& geom, double x);

/// a(x_hat)/sqrt(M).
BeamformingWeights conjugate_beam(const ArrayGeometry& geom, double x_hat);

/// Noisy normalized pilot y = w^H a(x) + noise/sqrt(rho). `noise` is a
/// CN(0, 1) sample supplied by the caller.
Observation observe(const ArrayGeometry& geom, const ChannelState& chan,
                    const BeamformingWeights& w, cplx noise);

/// I(x, w) = 2*rho*|d/dx (w^H a(x))|^2, which for phase-shifter beams equals
/// (2 rho/M)|sum_m k m exp(j(phi_m - k m x))|^2.
double fisher_information(const ArrayGeometry& geom, const ChannelState& chan, double x,
                          const BeamformingWeights& w);

/// 2 M (M-1)^2 pi^2 (d/lambda)^2 rho.
double i_max(const ArrayGeometry& geom, double rho);

/// 1/(n * i_max). Boundary clipping of the estimator is not modelled.
double crlb_min(const ArrayGeometry& geom, double rho, long long n);

/// Limit of n * E||h(x_hat_n) - h(x)||^2 along an efficient estimator:
/// (2M - 1) sigma^2 / (3 (M - 1)).
double channel_mse_limit(const ArrayGeometry& geom, double noise_power);

/// f(v, x) = -Im{a(v)^H a(x)}/sqrt(M). Defined for every real v and x; the
/// array pattern is periodic so no range check is applied.
double surrogate_f(const ArrayGeometry& geom, double v, double x);

/// { x + k lambda/((M-1) d) : k in Z } restricted to (-1, 1], ascending.
std::vector<double> stable_points(const ArrayGeometry& geom, double x);

struct Interval {
  double lo;
  double hi;
  bool lo_closed;
  bool hi_closed;

  bool contains(double v) const;
  double width() const { return hi - lo; }
};

/// (x0 - lambda/(M d), x0 + lambda/(M d)) intersected with [-1, 1].
Interval mainlobe_interval(const ArrayGeometry& geom, double x0);

/// log p(y | x, w) = log(rho/pi) - rho |y - w^H a(x)|^2.
double log_likelihood(const ArrayGeometry& geom, const ChannelState& chan, const Observation& y,
                      double x, const BeamformingWeights& w);

/// |w^H a(x)|^2 with a(x) evaluated on `geom` (which must match w).
double beam_gain(const ArrayGeometry& geom, const BeamformingWeights& w, double x);

}  // namespace beamtrack
