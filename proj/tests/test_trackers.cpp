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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <ranges>

#include "beamtrack/array.hpp"
#include "beamtrack/scenarios.hpp"
#include "beamtrack/trackers.hpp"

namespace bt = beamtrack;
using bt::cplx;

namespace {

const bt::ArrayGeometry kM16{16};
const cplx kBeta{M_SQRT1_2, M_SQRT1_2};

std::vector<bt::Observation> sweep_pilots(const bt::ArrayGeometry& g, double x, double rho,
                                          std::mt19937_64* rng) {
  const auto chan = bt::ChannelState::make(x, kBeta, rho);
  std::vector<bt::Observation> out;
  for (const auto& w : bt::dft_codebook(g)) {
    out.push_back(bt::observe(g, chan, w, rng ? bt::complex_normal(*rng) : cplx{}));
  }
  return out;
}

double wrap_distance(double a, double b) {
  // directions are 2-periodic at d = lambda/2
  const double d = std::fmod(std::abs(a - b), 2.0);
  return std::min(d, 2.0 - d);
}

}  // namespace

TEST(StepSize, Schedules) {
  const auto dim = bt::StepSizeSchedule::diminishing(0.5, 2.0);
  EXPECT_DOUBLE_EQ(dim(1), 0.5 / 3.0);
  EXPECT_DOUBLE_EQ(dim(8), 0.05);
  const auto fix = bt::StepSizeSchedule::fixed(0.25);
  EXPECT_DOUBLE_EQ(fix(1), 0.25);
  EXPECT_DOUBLE_EQ(fix(1000), 0.25);
  EXPECT_THROW(dim(0), std::invalid_argument);
  EXPECT_THROW(bt::StepSizeSchedule::fixed(0.0), std::invalid_argument);
  EXPECT_THROW(bt::StepSizeSchedule::diminishing(1.0, -1.0), std::invalid_argument);
}

TEST(StepSize, AlphaStarFrozen) {
  EXPECT_NEAR(bt::alpha_star(kM16), 1.0 / (30.0 * bt::kPi), 1e-15);
  EXPECT_NEAR(bt::alpha_star(kM16), 0.0106103295, 1e-10);
  EXPECT_NEAR(bt::alpha_star(bt::ArrayGeometry(8)), 0.0321541541, 1e-10);
  // alpha*^2 i_max = 2 rho
  EXPECT_NEAR(std::pow(bt::alpha_star(kM16), 2) * bt::i_max(kM16, 10.0), 20.0, 1e-10);
}

TEST(Codebook, DirectionsAndDictionary) {
  const auto dirs = bt::codebook_directions(bt::ArrayGeometry(4));
  const std::vector<double> expect{-0.75, -0.25, 0.25, 0.75};
  ASSERT_EQ(dirs.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(dirs[i], expect[i]);
  const bt::SweepDictionary d(32);
  EXPECT_DOUBLE_EQ(d.points().front(), -31.0 / 32.0);
  EXPECT_DOUBLE_EQ(d.points().back(), 31.0 / 32.0);
  // DFT beams are orthonormal
  const auto cb = bt::dft_codebook(kM16);
  for (std::size_t i = 0; i < cb.size(); ++i) {
    for (std::size_t j = 0; j < cb.size(); ++j) {
      const double ip = std::abs(bt::inner(cb[i].entries(), cb[j].entries()));
      EXPECT_NEAR(ip, i == j ? 1.0 : 0.0, 1e-12);
    }
  }
}

TEST(CoarseSweep, NoiselessPicksNearestDictionaryPoint) {
  const bt::SweepDictionary dict(32);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-0.95, 0.95);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng);
    const double v = bt::coarse_sweep(kM16, dict, sweep_pilots(kM16, x, 10.0, nullptr));
    EXPECT_LE(std::abs(v - x), 1.0 / 32.0 + 1e-12) << "x=" << x;
  }
}

TEST(CoarseSweep, OnGridDirectionIsRecoveredExactly) {
  const bt::SweepDictionary dict(64);
  for (double x : {-63.0 / 64, -0.5 + 1.0 / 64, 1.0 / 64, 33.0 / 64}) {
    EXPECT_DOUBLE_EQ(bt::coarse_sweep(kM16, dict, sweep_pilots(kM16, x, 10.0, nullptr)), x);
  }
}

TEST(CoarseSweep, WrongPilotCountThrows) {
  const bt::SweepDictionary dict(32);
  auto p = sweep_pilots(kM16, 0.2, 10.0, nullptr);
  p.pop_back();
  EXPECT_THROW(bt::coarse_sweep(kM16, dict, p), std::invalid_argument);
}

TEST(Recursive, UpdateRuleAndClipping) {
  auto s = bt::make_sine_tracker(kM16, 0.99, bt::StepSizeSchedule::fixed(1.0));
  s = bt::recursive_step(s, bt::Observation{{0.0, -0.05}});
  EXPECT_DOUBLE_EQ(s.x_hat, 1.0);
  EXPECT_EQ(s.slot, 2);
  auto d = bt::make_sine_tracker(kM16, 0.2, bt::StepSizeSchedule::diminishing(0.5));
  d = bt::recursive_step(d, bt::Observation{{3.0, 0.1}});
  EXPECT_DOUBLE_EQ(d.x_hat, 0.2 - 0.5 * 0.1);
  d = bt::recursive_step(d, bt::Observation{{0.0, -0.2}});
  EXPECT_DOUBLE_EQ(d.x_hat, 0.15 + 0.25 * 0.2);
  EXPECT_THROW(bt::make_sine_tracker(kM16, 1.5, bt::StepSizeSchedule::fixed(1.0)),
               std::domain_error);
}

TEST(Recursive, NoiselessFixedPointIsTruth) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (int i = 0; i < 50; ++i) {
    const double x = u(rng);
    auto s = bt::make_sine_tracker(kM16, x + 0.03, bt::StepSizeSchedule::fixed(bt::alpha_star(kM16)));
    const auto chan = bt::ChannelState::make(x, kBeta, 10.0);
    for (int n = 0; n < 200; ++n) {
      s = bt::recursive_step(s, bt::observe(kM16, chan, s.probe_beam(), {}));
    }
    EXPECT_NEAR(s.x_hat, x, 1e-12);
  }
}

TEST(Recursive, ConvergesToStablePointFromAnywhereWithLargeStep) {
  // From a uniform start the iterate settles on a zero of f with negative
  // slope. With a step 16x the Newton coefficient the sidelobe points, whose
  // slope is ~M times smaller, contract within the horizon.
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double alpha = 16.0 * bt::alpha_star(kM16);
  int hits = 0;
  constexpr int kTrials = 400;
  for (int t = 0; t < kTrials; ++t) {
    const double x = u(rng);
    auto s = bt::make_sine_tracker(kM16, u(rng), bt::StepSizeSchedule::diminishing(alpha));
    const auto chan = bt::ChannelState::make(x, kBeta, 10.0);
    for (int n = 0; n < 1000; ++n) {
      s = bt::recursive_step(s, bt::observe(kM16, chan, s.probe_beam(), bt::complex_normal(rng)));
    }
    auto pts = bt::stable_points(kM16, x);
    pts.push_back(-1.0);
    pts.push_back(1.0);
    const double best = std::ranges::min(
        pts | std::views::transform([&](double p) { return std::abs(p - s.x_hat); }));
    hits += best < 1e-2 ? 1 : 0;
  }
  EXPECT_GE(hits, static_cast<int>(0.98 * kTrials));
}

TEST(Recursive, MainlobeStartLocksOn) {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  std::uniform_real_distribution<double> off(-0.1, 0.1);
  for (int t = 0; t < 100; ++t) {
    const double x = u(rng);
    auto s = bt::make_sine_tracker(kM16, x + off(rng),
                                   bt::StepSizeSchedule::diminishing(bt::alpha_star(kM16)));
    const auto chan = bt::ChannelState::make(x, kBeta, 10.0);
    for (int n = 0; n < 500; ++n) {
      s = bt::recursive_step(s, bt::observe(kM16, chan, s.probe_beam(), bt::complex_normal(rng)));
    }
    EXPECT_LT(wrap_distance(s.x_hat, x), 0.01);
  }
}

TEST(AoA, UpdateDividesByCosine) {
  const double th = 0.6;
  auto s = bt::make_aoa_tracker(kM16, th, bt::StepSizeSchedule::fixed(0.1));
  s = bt::aoa_step(s, bt::Observation{{0.0, 0.2}});
  EXPECT_DOUBLE_EQ(s.theta_hat, th - 0.1 * 0.2 / std::cos(th));
  EXPECT_EQ(s.slot, 2);
  const auto w = bt::make_aoa_tracker(kM16, th, bt::StepSizeSchedule::fixed(0.1)).probe_beam();
  EXPECT_EQ(w, bt::conjugate_beam(kM16, std::sin(th)));
}

TEST(AoA, GuardAndClipping) {
  auto s = bt::make_aoa_tracker(kM16, bt::kPi / 2.0, bt::StepSizeSchedule::fixed(1.0));
  s = bt::aoa_step(s, bt::Observation{{0.0, 0.5}});
  EXPECT_DOUBLE_EQ(s.theta_hat, bt::kPi / 2.0);
  auto c = bt::make_aoa_tracker(kM16, 1.5, bt::StepSizeSchedule::fixed(1.0));
  c = bt::aoa_step(c, bt::Observation{{0.0, -1.0}});
  EXPECT_DOUBLE_EQ(c.theta_hat, bt::kPi / 2.0);
}

TEST(AoA, TracksStaticDirection) {
  std::mt19937_64 rng(25);
  const double theta = 0.4;
  const double x = std::sin(theta);
  auto s = bt::make_aoa_tracker(kM16, theta + 0.05,
                                bt::StepSizeSchedule::diminishing(bt::alpha_star(kM16)));
  const auto chan = bt::ChannelState::make(x, kBeta, 10.0);
  for (int n = 0; n < 1000; ++n) {
    s = bt::aoa_step(s, bt::observe(kM16, chan, s.probe_beam(), bt::complex_normal(rng)));
  }
  EXPECT_NEAR(s.theta_hat, theta, 3e-3);
}
