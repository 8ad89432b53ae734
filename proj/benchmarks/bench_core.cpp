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

#include <benchmark/benchmark.h>

#include <memory>
#include <random>
#include <vector>

#include "beamtrack/array.hpp"
#include "beamtrack/baselines.hpp"
#include "beamtrack/config.hpp"
#include "beamtrack/harness.hpp"
#include "beamtrack/scenarios.hpp"
#include "beamtrack/trackers.hpp"

namespace bt = beamtrack;

namespace {

const bt::cplx kBeta{M_SQRT1_2, M_SQRT1_2};

void BM_SteeringVector(benchmark::State& state) {
  const bt::ArrayGeometry g(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bt::steering_vector(g, 0.1));
}
BENCHMARK(BM_SteeringVector)->Arg(16)->Arg(64);

void BM_RecursiveStep(benchmark::State& state) {
  const bt::ArrayGeometry g(16);
  const auto chan = bt::ChannelState::make(0.3, kBeta, 10.0);
  auto s = bt::make_sine_tracker(g, 0.28, bt::StepSizeSchedule::diminishing(bt::alpha_star(g)));
  std::mt19937_64 rng(1);
  for (auto _ : state) {
    const auto y = bt::observe(g, chan, s.probe_beam(), bt::complex_normal(rng));
    s = bt::recursive_step(s, y);
    const double x_hat = s.x_hat;
    benchmark::DoNotOptimize(x_hat);
  }
}
BENCHMARK(BM_RecursiveStep);

struct Pilots {
  std::vector<bt::Observation> y;
  std::vector<bt::BeamformingWeights> w;
};

Pilots qpsk_pilots(const bt::ArrayGeometry& g, int count) {
  std::mt19937_64 rng(2);
  const auto chan = bt::ChannelState::make(-0.4, kBeta, 10.0);
  Pilots p;
  for (int i = 0; i < count; ++i) {
    p.w.push_back(bt::random_qpsk_beam(g.num_antennas(), rng));
    p.y.push_back(bt::observe(g, chan, p.w.back(), bt::complex_normal(rng)));
  }
  return p;
}

void BM_LsEstimate(benchmark::State& state) {
  const bt::ArrayGeometry g(16);
  const auto p = qpsk_pilots(g, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bt::ls_estimate(p.y, p.w));
}
BENCHMARK(BM_LsEstimate)->Arg(16)->Arg(64);

void BM_CsEstimate(benchmark::State& state) {
  const bt::ArrayGeometry g(16);
  const bt::CsDictionary dict(g, 1024);
  const auto p = qpsk_pilots(g, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bt::cs_estimate(dict, p.y, p.w));
}
BENCHMARK(BM_CsEstimate)->Arg(8)->Arg(64);

void BM_StaticTrial(benchmark::State& state) {
  bt::RunConfig cfg;
  cfg.algorithms = {bt::Algorithm::kRecursive};
  cfg.trials = 1;
  cfg.slots = 1000;
  cfg.jobs = 1;
  cfg.trace_trials = 0;
  for (auto _ : state) benchmark::DoNotOptimize(bt::run_experiment(cfg));
}
BENCHMARK(BM_StaticTrial)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
