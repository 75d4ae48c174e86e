// Copyright 2026 The todsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TODSIM_HARNESS_HPP
#define TODSIM_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "todsim/analysis.hpp"
#include "todsim/config.hpp"
#include "todsim/fog_env.hpp"

namespace todsim {

// One concrete simulation: a seeded environment plus a fully resolved
// policy (gamma/rho already chosen).
struct RunJob {
  EnvConfig env;  // seed set per run
  PolicyKind policy = PolicyKind::tod;
  double gamma = 0.0;  // tod/iir only
  double xi = 0.6;
  double rho = 0.0;    // iir only
};

// Reduced outputs of one run; series are kept at full resolution.
struct RunMetrics {
  std::uint64_t seed = 0;
  double gamma = 0.0;
  double rho = 0.0;
  double mean_latency = 0.0;
  double final_success = 0.0;
  double final_zeta_r = 0.0;
  double final_zeta_p = 0.0;
  std::int64_t successes = 0;
  std::vector<double> zeta_r;
  std::vector<double> zeta_p;
  std::vector<double> success;
  std::vector<std::int64_t> cdf_counts;  // finished tasks per grid point
  std::vector<std::int64_t> suboptimal;  // per node
  std::vector<std::optional<double>> delta_mu;  // per node
};

// Plays the slot loop (generate, broadcast, select, step, feed back)
// over the full horizon and returns the trace.
RunHistory simulate_run(const RunJob& job);

// simulate_run plus metric extraction against `cdf_grid`.
RunMetrics run_metrics(const RunJob& job, std::span<const double> cdf_grid);

// Runs independent jobs, OpenMP-parallel when `jobs` != 1. Results sit
// at their job's index, so output is identical for any thread count;
// jobs == 1 is the serial reference path.
std::vector<RunMetrics> run_batch(std::span<const RunJob> batch,
                                  std::span<const double> cdf_grid,
                                  int jobs);

// Latency grid used for CDF outputs: 0.5, 1.0, ..., 50 slots.
std::vector<double> default_latency_grid();

// Per-run seeds split off one master seed.
std::vector<std::uint64_t> derive_seeds(std::uint64_t master, int count);

// Concrete discount factor for a spec: fixed value, or the breakpoint
// rule applied to the spec's environment. Throws on sweep mode.
double resolve_gamma(const ExperimentSpec& spec);

struct SeedSummary {
  std::uint64_t seed = 0;
  double gamma = 0.0;
  double rho = 0.0;
  double mean_latency = 0.0;
  double success_ratio = 0.0;
  double zeta_r_final = 0.0;
  double zeta_p_final = 0.0;
  std::int64_t successes = 0;
};

struct ExperimentResult {
  PolicyKind policy = PolicyKind::tod;
  double gamma_used = 0.0;
  double rho_used = 0.0;
  double mean_latency = 0.0;  // over seeds
  std::vector<SeedSummary> per_seed;
};

// Runs spec.policy over every seed and writes trace.csv (or
// trace_<seed>.csv when several seeds), summary.csv, and
// bound_inputs.csv under spec.output_dir.
ExperimentResult run_experiment(const ExperimentSpec& spec);

struct SweepRow {
  double gamma = 0.0;
  double mean_latency = 0.0;
  int seeds = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // grid order
  double best_gamma = 0.0;     // lowest mean latency, first grid hit on ties
};

// Evaluates every gamma in the spec's grid across all seeds and writes
// sweep.csv.
SweepResult sweep_gamma(const ExperimentSpec& spec);

struct PolicySeries {
  PolicyKind policy = PolicyKind::tod;
  double gamma_used = 0.0;
  double rho_used = 0.0;
  double mean_latency = 0.0;
  std::vector<std::pair<double, double>> cdf;  // pooled over seeds
  std::vector<double> zeta_r;   // per-slot mean over seeds
  std::vector<double> zeta_p;
  std::vector<double> success;
};

struct CompareResult {
  std::vector<PolicySeries> policies;
};

// Runs several policies on one environment and seed set and writes the
// combined cdf.csv, success.csv, and regret.csv. All specs must agree on
// env and seeds (MismatchedConfig otherwise); outputs land in the first
// spec's output_dir.
CompareResult compare(const std::vector<ExperimentSpec>& specs);

}  // namespace todsim

#endif  // TODSIM_HARNESS_HPP
