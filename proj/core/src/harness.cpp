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

#include "beamtrack/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include "beamtrack/scenarios.hpp"

namespace beamtrack {

double mse_h(const ArrayGeometry& geom, double x_hat, double x, cplx beta) {
  const double k = geom.phase_scale();
  const double half = 0.5 * k * (x_hat - x);
  double acc = 0.0;
  for (int m = 1; m < geom.num_antennas(); ++m) {
    const double s = std::sin(half * m);
    acc += s * s;
  }
  return 4.0 * std::norm(beta) * acc;
}

double mse_h(const ArrayGeometry& geom, std::span<const cplx> h_hat, double x, cplx beta) {
  if (h_hat.size() != geom.size()) {
    throw std::invalid_argument("channel estimate length does not match the array");
  }
  const auto a = steering_vector(geom, x);
  double acc = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) acc += std::norm(h_hat[m] - beta * a[m]);
  return acc;
}

double achievable_rate(const ArrayGeometry& geom, const BeamformingWeights& w, double x,
                       double rho) {
  return std::log2(1.0 + rho * beam_gain(geom, w, x));
}

std::vector<long long> report_slots(ReportGrid grid, long long slots) {
  if (slots < 1) throw std::invalid_argument("slot count must be positive");
  std::vector<long long> out;
  if (grid == ReportGrid::kAll) {
    out.resize(static_cast<std::size_t>(slots));
    for (long long n = 1; n <= slots; ++n) out[static_cast<std::size_t>(n - 1)] = n;
    return out;
  }
  std::set<long long> s;
  for (long long n = 1; n <= std::min<long long>(16, slots); ++n) s.insert(n);
  for (int k = 0;; ++k) {
    const auto n = std::llround(std::pow(10.0, k / 20.0));
    if (n > slots) break;
    s.insert(n);
  }
  for (long long n = 1; n <= slots; n *= 2) s.insert(n);
  s.insert(slots);
  return {s.begin(), s.end()};
}

const AlgorithmSummary& RunSummary::at(Algorithm alg) const {
  for (const auto& a : algorithms) {
    if (a.algorithm == alg) return a;
  }
  throw std::out_of_range("algorithm '" + std::string(algorithm_name(alg)) + "' was not run");
}

namespace {

constexpr std::uint64_t kBlockTrials = 16;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct SlotSums {
  std::vector<double> mse;
  std::vector<double> rate;
  std::vector<double> sq_err;
  std::vector<long long> converged;
  std::vector<long long> with_direction;

  explicit SlotSums(std::size_t rows)
      : mse(rows, 0.0), rate(rows, 0.0), sq_err(rows, 0.0), converged(rows, 0),
        with_direction(rows, 0) {}

  void add(const SlotSums& o) {
    for (std::size_t r = 0; r < mse.size(); ++r) {
      mse[r] += o.mse[r];
      rate[r] += o.rate[r];
      sq_err[r] += o.sq_err[r];
      converged[r] += o.converged[r];
      with_direction[r] += o.with_direction[r];
    }
  }
};

struct AlgorithmBlock {
  SlotSums sums;
  std::vector<TrialRecord> trials;
  std::vector<TraceRow> trace;
};

using Block = std::vector<AlgorithmBlock>;

struct Context {
  const RunConfig& cfg;
  ArrayGeometry data;
  ArrayGeometry track;
  double rho;
  StepSizeSchedule schedule;
  RngPlan plan;
  std::vector<long long> slots;
  std::vector<int> row_of;  // slot -> row, -1 when not reported
  bool window_all;
  std::shared_ptr<const CsDictionary> cs_dict;
};

TrackerSetup make_setup(const Context& ctx, double initial_direction) {
  TrackerSetup s;
  s.data_geom = ctx.data;
  s.track_geom = ctx.track;
  s.schedule = ctx.schedule;
  s.dictionary_size = ctx.cfg.dictionary_size();
  s.init = ctx.cfg.init;
  s.initial_direction = initial_direction;
  s.ad11_period = ctx.cfg.ad11_period;
  s.ls_window = ctx.cfg.resolved_ls_window();
  s.cs_window = ctx.cfg.resolved_cs_window();
  s.cs_dictionary = ctx.cs_dict;
  return s;
}

void run_trial(const Context& ctx, std::uint64_t trial, Block& out) {
  const RunConfig& cfg = ctx.cfg;
  Trajectory traj = cfg.trajectory;
  traj.length = cfg.slots;
  auto traj_rng = ctx.plan.stream(trial, Stream::kTrajectory);
  const auto truth = generate(traj, traj_rng);

  double initial = 0.0;
  if (cfg.init == InitMode::kUniform) {
    auto init_rng = ctx.plan.stream(trial, Stream::kInit);
    initial = std::uniform_real_distribution<double>(-1.0, 1.0)(init_rng);
  }
  const bool traced = trial < static_cast<std::uint64_t>(cfg.trace_trials);
  const TrackerSetup setup = make_setup(ctx, initial);
  const long long N = cfg.slots;

  for (std::size_t k = 0; k < cfg.algorithms.size(); ++k) {
    const Algorithm alg = cfg.algorithms[k];
    const auto lane = static_cast<std::uint64_t>(alg) + 1;
    auto tracker = make_tracker(alg, setup, ctx.plan.stream(trial, Stream::kProbe, lane));
    auto noise = ctx.plan.stream(trial, Stream::kObservation, lane);
    const ArrayGeometry pg = tracker->pilot_geometry();
    const double radius = 1.0 / (2.0 * pg.num_antennas() * pg.spacing_over_wavelength());

    if (tracker->needs_sweep()) {
      const auto chan = ChannelState::make(truth.x[0], cfg.beta, ctx.rho);
      const auto codebook = dft_codebook(pg);
      std::vector<Observation> sweep;
      sweep.reserve(codebook.size());
      for (const auto& w : codebook) sweep.push_back(observe(pg, chan, w, complex_normal(noise)));
      tracker->train(sweep);
    }

    AlgorithmBlock& ab = out[k];
    double w_rate = 0.0;
    double w_mse = 0.0;
    long long w_count = 0;
    long long pilots = 0;
    TrialRecord rec{trial, truth.x.back(), std::nullopt, false, kNaN, kNaN};

    for (long long n = 1; n <= N; ++n) {
      const double x = truth.x[static_cast<std::size_t>(n)];
      const auto chan = ChannelState::make(x, cfg.beta, ctx.rho);
      const auto probe = tracker->next_probe();
      tracker->update(observe(pg, chan, probe, complex_normal(noise)));
      ++pilots;

      const int row = ctx.row_of[static_cast<std::size_t>(n)];
      const bool in_window = ctx.window_all && n > cfg.warmup_slots;
      if (row < 0 && !in_window && !traced && n != N) continue;

      const auto est = tracker->estimate();
      double m;
      if (est.channel) {
        CVector h(est.channel->size());
        for (std::size_t i = 0; i < h.size(); ++i) h[i] = cfg.beta * (*est.channel)[i];
        m = mse_h(ctx.data, h, x, cfg.beta);
      } else {
        m = mse_h(ctx.data, *est.x_hat, x, cfg.beta);
      }
      const double rate = achievable_rate(
          ctx.data, est.data_beam ? *est.data_beam : conjugate_beam(ctx.data, *est.x_hat), x,
          ctx.rho);

      if (row >= 0) {
        const auto r = static_cast<std::size_t>(row);
        ab.sums.mse[r] += m;
        ab.sums.rate[r] += rate;
        if (est.x_hat) {
          const double e = *est.x_hat - x;
          ab.sums.sq_err[r] += e * e;
          ab.sums.converged[r] += std::abs(e) < radius ? 1 : 0;
          ++ab.sums.with_direction[r];
        }
      }
      if (in_window) {
        w_rate += rate;
        w_mse += m;
        ++w_count;
      }
      if (traced) {
        ab.trace.push_back(TraceRow{trial, n, truth.theta[static_cast<std::size_t>(n)], x,
                                    est.theta_hat, est.x_hat, rate, m});
      }
      if (n == N) {
        rec.x_hat_final = est.x_hat;
        rec.converged = est.x_hat && std::abs(*est.x_hat - x) < radius;
      }
    }
    if (pilots != N) {
      throw std::logic_error("tracker consumed a different number of pilots than slots");
    }
    if (w_count > 0) {
      rec.window_mean_rate = w_rate / static_cast<double>(w_count);
      rec.window_mean_mse_h = w_mse / static_cast<double>(w_count);
    }
    ab.trials.push_back(rec);
  }
}

Block make_block(const Context& ctx) {
  Block b;
  for (std::size_t k = 0; k < ctx.cfg.algorithms.size(); ++k) {
    b.push_back(AlgorithmBlock{SlotSums(ctx.slots.size()), {}, {}});
  }
  return b;
}

void merge(Block& into, Block&& from) {
  for (std::size_t k = 0; k < into.size(); ++k) {
    into[k].sums.add(from[k].sums);
    auto& t = into[k].trials;
    t.insert(t.end(), from[k].trials.begin(), from[k].trials.end());
    auto& tr = into[k].trace;
    tr.insert(tr.end(), from[k].trace.begin(), from[k].trace.end());
  }
}

double bound_numerator(const ArrayGeometry& data, cplx beta) {
  const double k = data.phase_scale();
  double acc = 0.0;
  for (int m = 1; m < data.num_antennas(); ++m) acc += static_cast<double>(m) * m;
  return std::norm(beta) * k * k * acc;
}

}  // namespace

RunSummary run_experiment(const RunConfig& cfg) {
  cfg.validate();
  Context ctx{cfg,
              cfg.data_geometry(),
              cfg.track_geometry(),
              cfg.rho(),
              cfg.schedule(),
              RngPlan(cfg.seed),
              report_slots(cfg.resolved_report(), cfg.slots),
              {},
              cfg.resolved_report() == ReportGrid::kAll,
              nullptr};
  ctx.row_of.assign(static_cast<std::size_t>(cfg.slots) + 1, -1);
  for (std::size_t r = 0; r < ctx.slots.size(); ++r) {
    ctx.row_of[static_cast<std::size_t>(ctx.slots[r])] = static_cast<int>(r);
  }
  if (std::find(cfg.algorithms.begin(), cfg.algorithms.end(), Algorithm::kCompressedSensing) !=
      cfg.algorithms.end()) {
    ctx.cs_dict = std::make_shared<const CsDictionary>(ctx.data, cfg.cs_dictionary_size);
  }

  const auto trials = static_cast<std::uint64_t>(cfg.trials);
  const std::uint64_t blocks = (trials + kBlockTrials - 1) / kBlockTrials;
  Block total = make_block(ctx);
  std::map<std::uint64_t, Block> ready;
  std::uint64_t next_merge = 0;
  std::atomic<std::uint64_t> next_block{0};
  std::mutex mu;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::uint64_t b = next_block.fetch_add(1);
      if (b >= blocks) return;
      Block block = make_block(ctx);
      try {
        const std::uint64_t end = std::min(trials, (b + 1) * kBlockTrials);
        for (std::uint64_t t = b * kBlockTrials; t < end; ++t) run_trial(ctx, t, block);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next_block.store(blocks);
        return;
      }
      std::lock_guard lock(mu);
      ready.emplace(b, std::move(block));
      while (!ready.empty() && ready.begin()->first == next_merge) {
        merge(total, std::move(ready.begin()->second));
        ready.erase(ready.begin());
        ++next_merge;
      }
    }
  };
  {
    const auto jobs = static_cast<std::uint64_t>(cfg.resolved_jobs());
    std::vector<std::jthread> pool;
    for (std::uint64_t j = 1; j < std::min(jobs, blocks); ++j) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  RunSummary summary{cfg, {}};
  const bool is_static = cfg.trajectory.kind == TrajectoryKind::kStatic;
  const double numerator = bound_numerator(ctx.data, cfg.beta);
  const double count = static_cast<double>(trials);
  for (std::size_t k = 0; k < cfg.algorithms.size(); ++k) {
    const Algorithm alg = cfg.algorithms[k];
    const bool on_track_array = alg == Algorithm::kRecursive || alg == Algorithm::kAoA;
    const double imax = i_max(on_track_array ? ctx.track : ctx.data, ctx.rho);
    auto& ab = total[k];

    AlgorithmSummary s{alg, {}, std::move(ab.trials), std::move(ab.trace), kNaN, kNaN, kNaN};
    for (std::size_t r = 0; r < ctx.slots.size(); ++r) {
      const auto n = static_cast<double>(ctx.slots[r]);
      const long long nd = ab.sums.with_direction[r];
      s.rows.push_back(SlotRow{
          ctx.slots[r],
          ab.sums.mse[r] / count,
          nd > 0 ? n * (ab.sums.sq_err[r] / static_cast<double>(nd)) * imax : kNaN,
          ab.sums.rate[r] / count,
          nd > 0 ? static_cast<double>(ab.sums.converged[r]) / static_cast<double>(nd) : kNaN,
          is_static ? numerator / (n * imax) : kNaN,
      });
    }

    long long with_dir = 0;
    long long conv = 0;
    double w_rate = 0.0;
    double w_mse = 0.0;
    long long w_trials = 0;
    for (const auto& t : s.trials) {
      if (t.x_hat_final) {
        ++with_dir;
        conv += t.converged ? 1 : 0;
      }
      if (!std::isnan(t.window_mean_rate)) {
        w_rate += t.window_mean_rate;
        w_mse += t.window_mean_mse_h;
        ++w_trials;
      }
    }
    if (with_dir > 0) s.convergence_fraction = static_cast<double>(conv) / with_dir;
    if (w_trials > 0) {
      s.window_mean_rate = w_rate / static_cast<double>(w_trials);
      s.window_mean_mse_h = w_mse / static_cast<double>(w_trials);
    }
    summary.algorithms.push_back(std::move(s));
  }
  return summary;
}

InitQuality init_quality(const ArrayGeometry& geom, double rho, cplx beta, int dictionary_size,
                         long long trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be positive");
  const RngPlan plan(seed);
  const SweepDictionary dict(dictionary_size);
  const auto codebook = dft_codebook(geom);
  std::vector<Observation> sweep(codebook.size());
  InitQuality q{trials, 0};
  for (long long t = 0; t < trials; ++t) {
    auto truth_rng = plan.stream(static_cast<std::uint64_t>(t), Stream::kTrajectory);
    auto noise = plan.stream(static_cast<std::uint64_t>(t), Stream::kObservation);
    const double x = std::uniform_real_distribution<double>(-1.0, 1.0)(truth_rng);
    const auto chan = ChannelState::make(x, beta, rho);
    for (std::size_t m = 0; m < codebook.size(); ++m) {
      sweep[m] = observe(geom, chan, codebook[m], complex_normal(noise));
    }
    if (mainlobe_interval(geom, x).contains(coarse_sweep(geom, dict, sweep))) ++q.hits;
  }
  return q;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string("nan"); }

}  // namespace

void write_slot_csv(std::ostream& os, const AlgorithmSummary& s) {
  os << kSlotCsvHeader << '\n';
  for (const auto& r : s.rows) {
    os << r.slot << ',' << fmt(r.mean_mse_h) << ',' << fmt(r.n_mse_times_imax) << ','
       << fmt(r.mean_rate) << ',' << fmt(r.conv_frac) << ',' << fmt(r.crlb_h_ref) << '\n';
  }
}

void write_trace_csv(std::ostream& os, const AlgorithmSummary& s) {
  os << "trial,slot,theta,x,theta_hat,x_hat,rate,mse_h\n";
  for (const auto& r : s.trace) {
    os << r.trial << ',' << r.slot << ',' << fmt(r.theta) << ',' << fmt(r.x) << ','
       << fmt(r.theta_hat) << ',' << fmt(r.x_hat) << ',' << fmt(r.rate) << ',' << fmt(r.mse_h)
       << '\n';
  }
}

void write_trial_csv(std::ostream& os, const AlgorithmSummary& s) {
  os << "trial,x_final,x_hat_final,converged,window_mean_rate,window_mean_mse_h\n";
  for (const auto& t : s.trials) {
    os << t.trial << ',' << fmt(t.x_final) << ',' << fmt(t.x_hat_final) << ','
       << (t.converged ? 1 : 0) << ',' << fmt(t.window_mean_rate) << ','
       << fmt(t.window_mean_mse_h) << '\n';
  }
}

}  // namespace beamtrack
