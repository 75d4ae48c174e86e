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

#include "todsim/harness.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "todsim/baselines.hpp"
#include "todsim/csv.hpp"
#include "todsim/errors.hpp"
#include "todsim/policy.hpp"
#include "todsim/rng.hpp"

namespace todsim {

namespace {

namespace fs = std::filesystem;

std::ofstream open_csv(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("io: cannot write " + path.string());
  }
  return out;
}

void validate_job(const RunJob& job) {
  validate(job.env);
  if (job.policy == PolicyKind::tod || job.policy == PolicyKind::iir) {
    validate(PolicyConfig{job.env.node_count, job.gamma, job.xi,
                          job.env.tau_max});
  }
  if (job.policy == PolicyKind::iir) {
    validate(IirConfig{job.gamma, job.rho, job.env.horizon});
  }
}

// Slots emitted for downsampled per-slot series: every Nth plus the last.
bool keep_slot(int t, int horizon, int downsample) {
  return t % downsample == 0 || t == horizon;
}

}  // namespace

RunHistory simulate_run(const RunJob& job) {
  validate_job(job);
  Env env(job.env);
  const int k = job.env.node_count;
  const int horizon = job.env.horizon;

  const bool learns =
      job.policy == PolicyKind::tod || job.policy == PolicyKind::iir;
  PolicyState learner;
  if (learns) {
    learner = new_policy(
        PolicyConfig{k, job.gamma, job.xi, job.env.tau_max});
  }
  const IirConfig iir{job.gamma, job.rho, horizon};

  RunHistory history;
  history.node_count = k;
  history.slots.reserve(static_cast<std::size_t>(horizon));

  for (int t = 1; t <= horizon; ++t) {
    env.generate_task(t);
    const TaskContext ctx = env.context();

    int chosen = 0;
    switch (job.policy) {
      case PolicyKind::tod:
        chosen = select_node(learner, ctx);
        break;
      case PolicyKind::greedy:
        chosen = greedy_select(env.peek_realization());
        break;
      case PolicyKind::round_robin:
        chosen = round_robin_select(t, k);
        break;
      case PolicyKind::iir:
        chosen = iir_select(learner, ctx, iir);
        break;
    }

    std::vector<double> mu = env.expected_latencies(ctx.length_kb);
    SlotOutcome outcome = env.step(chosen);
    if (learns) advance_slot(learner, outcome.completions, chosen);

    SlotRecord record;
    record.t = t;
    record.chosen = chosen;
    record.latency = outcome.realized_latency;
    record.success = outcome.success;
    record.mu = std::move(mu);
    record.u = std::move(outcome.realization.latency);
    record.opt_expected = outcome.opt_expected;
    record.opt_realized = outcome.opt_realized;
    history.slots.push_back(std::move(record));
  }
  return history;
}

namespace {

RunMetrics reduce_history(const RunHistory& history, const RunJob& job,
                          std::span<const double> cdf_grid) {
  RunMetrics m;
  m.seed = job.env.seed;
  m.gamma = job.gamma;
  m.rho = job.rho;

  // A failed task is discarded at the deadline, so the time it occupies
  // the system is tau_max; its would-be completion time only matters to
  // the regret series.
  double latency_sum = 0.0;
  for (const SlotRecord& slot : history.slots) {
    latency_sum += slot.success ? slot.latency : job.env.tau_max;
    if (slot.success) ++m.successes;
  }
  const double n = static_cast<double>(history.slots.size());
  m.mean_latency = latency_sum / n;
  m.zeta_r = pseudo_regret(history, RegretReference::realized);
  m.zeta_p = pseudo_regret(history, RegretReference::expected);
  m.success = success_ratio(history, job.env.tau_max);
  m.final_zeta_r = m.zeta_r.back();
  m.final_zeta_p = m.zeta_p.back();
  m.final_success = m.success.back();

  const auto cdf = latency_cdf(history, cdf_grid);
  m.cdf_counts.reserve(cdf.size());
  for (const auto& [x, fraction] : cdf) {
    m.cdf_counts.push_back(
        static_cast<std::int64_t>(std::llround(fraction * n)));
  }
  m.suboptimal = count_suboptimal_pulls(history);
  m.delta_mu = measure_delta_mu(history);
  return m;
}

}  // namespace

RunMetrics run_metrics(const RunJob& job, std::span<const double> cdf_grid) {
  return reduce_history(simulate_run(job), job, cdf_grid);
}

std::vector<RunMetrics> run_batch(std::span<const RunJob> batch,
                                  std::span<const double> cdf_grid,
                                  int jobs) {
  for (const RunJob& job : batch) validate_job(job);
  std::vector<RunMetrics> results(batch.size());

  if (jobs == 1 || batch.size() <= 1) {
    // Serial reference path, also the fallback without OpenMP.
    for (std::size_t i = 0; i < batch.size(); ++i) {
      results[i] = run_metrics(batch[i], cdf_grid);
    }
    return results;
  }

#ifdef _OPENMP
  int threads = jobs > 0 ? jobs : omp_get_max_threads();
  threads = std::max(1, threads);
  std::vector<std::exception_ptr> errors(batch.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(batch.size()); ++i) {
    try {
      results[static_cast<std::size_t>(i)] =
          run_metrics(batch[static_cast<std::size_t>(i)], cdf_grid);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const std::exception_ptr& err : errors) {
    if (err) std::rethrow_exception(err);
  }
#else
  for (std::size_t i = 0; i < batch.size(); ++i) {
    results[i] = run_metrics(batch[i], cdf_grid);
  }
#endif
  return results;
}

std::vector<double> default_latency_grid() {
  std::vector<double> grid;
  grid.reserve(100);
  for (int i = 1; i <= 100; ++i) grid.push_back(0.5 * i);
  return grid;
}

std::vector<std::uint64_t> derive_seeds(std::uint64_t master, int count) {
  std::vector<std::uint64_t> seeds;
  seeds.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    seeds.push_back(derive_stream(master, static_cast<std::uint64_t>(i)));
  }
  return seeds;
}

double resolve_gamma(const ExperimentSpec& spec) {
  switch (spec.gamma.kind) {
    case GammaMode::Kind::fixed:
      return spec.gamma.value;
    case GammaMode::Kind::automatic:
      return recommended_gamma(spec.env.breakpoints.count, spec.env.horizon,
                               spec.env.tau_max);
    case GammaMode::Kind::sweep:
      throw InvalidConfig(
          "resolve_gamma: sweep mode has no single gamma; run sweep-gamma");
  }
  throw InvalidConfig("resolve_gamma: bad mode");
}

namespace {

RunJob job_for(const ExperimentSpec& spec, std::uint64_t seed, double gamma,
               double rho) {
  RunJob job;
  job.env = spec.env;
  job.env.seed = seed;
  job.policy = spec.policy;
  job.gamma = gamma;
  job.xi = spec.xi;
  job.rho = rho;
  return job;
}

// Picks the exploration fraction with the lowest mean final regret over
// the seeds; metrics for the winning fraction are returned by value.
struct RhoSearchOutcome {
  double rho = 0.0;
  std::vector<RunMetrics> metrics;
};

RhoSearchOutcome search_rho(const ExperimentSpec& spec, double gamma,
                            std::span<const double> cdf_grid) {
  const std::vector<double>& grid =
      spec.rho.search ? spec.rho.grid : std::vector<double>{spec.rho.value};
  if (grid.empty()) {
    throw InvalidConfig("iir: empty rho grid");
  }
  std::vector<RunJob> jobs;
  jobs.reserve(grid.size() * spec.seeds.size());
  for (double rho : grid) {
    for (std::uint64_t seed : spec.seeds) {
      jobs.push_back(job_for(spec, seed, gamma, rho));
    }
  }
  std::vector<RunMetrics> all = run_batch(jobs, cdf_grid, spec.jobs);

  RhoSearchOutcome best;
  double best_score = 0.0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double mean_final = 0.0;
    for (std::size_t s = 0; s < spec.seeds.size(); ++s) {
      mean_final += all[g * spec.seeds.size() + s].final_zeta_r;
    }
    mean_final /= static_cast<double>(spec.seeds.size());
    if (g == 0 || mean_final < best_score) {
      best_score = mean_final;
      best.rho = grid[g];
      best.metrics.assign(
          all.begin() + static_cast<std::ptrdiff_t>(g * spec.seeds.size()),
          all.begin() +
              static_cast<std::ptrdiff_t>((g + 1) * spec.seeds.size()));
    }
  }
  return best;
}

void write_trace(const fs::path& path, PolicyKind policy,
                 const RunHistory& history) {
  std::ofstream out = open_csv(path);
  std::string buf;
  buf.reserve(1 << 16);
  buf += "t,policy,chosen,opt_expected,opt_realized,latency_slots,success,"
         "regret_r_cum,regret_p_cum\n";
  double cum_r = 0.0;
  double cum_p = 0.0;
  for (const SlotRecord& slot : history.slots) {
    cum_r += slot.latency -
             slot.u[static_cast<std::size_t>(slot.opt_realized - 1)];
    cum_p += slot.latency -
             slot.mu[static_cast<std::size_t>(slot.opt_expected - 1)];
    append_num(buf, slot.t);
    buf += ',';
    buf += to_string(policy);
    buf += ',';
    append_num(buf, slot.chosen);
    buf += ',';
    append_num(buf, slot.opt_expected);
    buf += ',';
    append_num(buf, slot.opt_realized);
    buf += ',';
    append_num(buf, slot.latency);
    buf += ',';
    buf += slot.success ? '1' : '0';
    buf += ',';
    append_num(buf, cum_r);
    buf += ',';
    append_num(buf, cum_p);
    buf += '\n';
    if (buf.size() > (1 << 15)) {
      out << buf;
      buf.clear();
    }
  }
  out << buf;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (spec.seeds.empty()) {
    throw InvalidConfig("run: at least one seed is required");
  }
  const std::vector<double> grid = default_latency_grid();
  const bool needs_gamma =
      spec.policy == PolicyKind::tod || spec.policy == PolicyKind::iir;
  const double gamma = needs_gamma ? resolve_gamma(spec) : 0.0;

  double rho = 0.0;
  if (spec.policy == PolicyKind::iir) {
    rho = spec.rho.search ? search_rho(spec, gamma, grid).rho
                          : spec.rho.value;
  }

  const fs::path out_dir(spec.output_dir);
  fs::create_directories(out_dir);

  ExperimentResult result;
  result.policy = spec.policy;
  result.gamma_used = gamma;
  result.rho_used = rho;

  std::string summary;
  summary += "policy,seed,gamma,rho,horizon,upsilon,mean_latency_slots,"
             "success_ratio,zeta_r_final,zeta_p_final,successes,failures\n";
  std::string bounds;
  bounds += "seed,node,gamma,xi,tau_max,horizon,upsilon,n_k,delta_mu,"
            "suboptimal_pulls\n";

  double latency_acc = 0.0;
  for (std::uint64_t seed : spec.seeds) {
    const RunJob job = job_for(spec, seed, gamma, rho);
    const RunHistory history = simulate_run(job);
    const RunMetrics metrics = reduce_history(history, job, grid);

    const fs::path trace_path =
        spec.seeds.size() == 1
            ? out_dir / "trace.csv"
            : out_dir / ("trace_" + std::to_string(seed) + ".csv");
    write_trace(trace_path, spec.policy, history);

    SeedSummary row;
    row.seed = seed;
    row.gamma = gamma;
    row.rho = rho;
    row.mean_latency = metrics.mean_latency;
    row.success_ratio = metrics.final_success;
    row.zeta_r_final = metrics.final_zeta_r;
    row.zeta_p_final = metrics.final_zeta_p;
    row.successes = metrics.successes;
    result.per_seed.push_back(row);
    latency_acc += metrics.mean_latency;

    summary += to_string(spec.policy);
    summary += ',';
    append_num(summary, seed);
    summary += ',';
    append_num(summary, gamma);
    summary += ',';
    append_num(summary, rho);
    summary += ',';
    append_num(summary, spec.env.horizon);
    summary += ',';
    append_num(summary, spec.env.breakpoints.count);
    summary += ',';
    append_num(summary, metrics.mean_latency);
    summary += ',';
    append_num(summary, metrics.final_success);
    summary += ',';
    append_num(summary, metrics.final_zeta_r);
    summary += ',';
    append_num(summary, metrics.final_zeta_p);
    summary += ',';
    append_num(summary, metrics.successes);
    summary += ',';
    append_num(summary,
               static_cast<std::int64_t>(spec.env.horizon) - metrics.successes);
    summary += '\n';

    for (int node = 1; node <= spec.env.node_count; ++node) {
      append_num(bounds, seed);
      bounds += ',';
      append_num(bounds, node);
      bounds += ',';
      append_num(bounds, gamma);
      bounds += ',';
      append_num(bounds, spec.xi);
      bounds += ',';
      append_num(bounds, spec.env.tau_max);
      bounds += ',';
      append_num(bounds, spec.env.horizon);
      bounds += ',';
      append_num(bounds, spec.env.breakpoints.count);
      bounds += ',';
      append_num(bounds, spec.env.node_count);  // n_K proxy: full warm-up
      bounds += ',';
      const auto& gap = metrics.delta_mu[static_cast<std::size_t>(node - 1)];
      if (gap.has_value()) append_num(bounds, *gap);
      bounds += ',';
      append_num(bounds, metrics.suboptimal[static_cast<std::size_t>(node - 1)]);
      bounds += '\n';
    }
  }
  result.mean_latency = latency_acc / static_cast<double>(spec.seeds.size());

  open_csv(out_dir / "summary.csv") << summary;
  open_csv(out_dir / "bound_inputs.csv") << bounds;
  return result;
}

SweepResult sweep_gamma(const ExperimentSpec& spec) {
  if (spec.gamma.grid.empty()) {
    throw InvalidConfig("sweep-gamma: gamma grid is empty");
  }
  if (spec.policy != PolicyKind::tod && spec.policy != PolicyKind::iir) {
    throw InvalidConfig("sweep-gamma: policy has no discount factor");
  }
  const std::vector<double> grid = default_latency_grid();

  std::vector<RunJob> jobs;
  jobs.reserve(spec.gamma.grid.size() * spec.seeds.size());
  for (double gamma : spec.gamma.grid) {
    for (std::uint64_t seed : spec.seeds) {
      jobs.push_back(job_for(spec, seed, gamma,
                             spec.rho.search ? 0.1 : spec.rho.value));
    }
  }
  const std::vector<RunMetrics> all = run_batch(jobs, grid, spec.jobs);

  SweepResult result;
  for (std::size_t g = 0; g < spec.gamma.grid.size(); ++g) {
    double mean = 0.0;
    for (std::size_t s = 0; s < spec.seeds.size(); ++s) {
      mean += all[g * spec.seeds.size() + s].mean_latency;
    }
    mean /= static_cast<double>(spec.seeds.size());
    result.rows.push_back(SweepRow{spec.gamma.grid[g], mean,
                                   static_cast<int>(spec.seeds.size())});
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < result.rows.size(); ++g) {
    if (result.rows[g].mean_latency < result.rows[best].mean_latency) {
      best = g;
    }
  }
  result.best_gamma = result.rows[best].gamma;

  const fs::path out_dir(spec.output_dir);
  fs::create_directories(out_dir);
  std::string csv = "gamma,mean_latency,seeds\n";
  for (const SweepRow& row : result.rows) {
    append_num(csv, row.gamma);
    csv += ',';
    append_num(csv, row.mean_latency);
    csv += ',';
    append_num(csv, row.seeds);
    csv += '\n';
  }
  open_csv(out_dir / "sweep.csv") << csv;
  return result;
}

CompareResult compare(const std::vector<ExperimentSpec>& specs) {
  if (specs.empty()) {
    throw InvalidConfig("compare: no specs given");
  }
  for (const ExperimentSpec& spec : specs) {
    if (!(spec.env == specs.front().env) || spec.seeds != specs.front().seeds) {
      throw MismatchedConfig(
          "compare: all specs must share the environment and seeds");
    }
  }
  const ExperimentSpec& base = specs.front();
  const std::vector<double> grid = default_latency_grid();
  const int horizon = base.env.horizon;
  const double n_runs = static_cast<double>(base.seeds.size());

  CompareResult result;
  for (const ExperimentSpec& spec : specs) {
    const bool needs_gamma =
        spec.policy == PolicyKind::tod || spec.policy == PolicyKind::iir;
    const double gamma = needs_gamma ? resolve_gamma(spec) : 0.0;

    std::vector<RunMetrics> metrics;
    double rho = 0.0;
    if (spec.policy == PolicyKind::iir) {
      RhoSearchOutcome outcome = search_rho(spec, gamma, grid);
      rho = outcome.rho;
      metrics = std::move(outcome.metrics);
    } else {
      std::vector<RunJob> jobs;
      jobs.reserve(spec.seeds.size());
      for (std::uint64_t seed : spec.seeds) {
        jobs.push_back(job_for(spec, seed, gamma, rho));
      }
      metrics = run_batch(jobs, grid, spec.jobs);
    }

    PolicySeries series;
    series.policy = spec.policy;
    series.gamma_used = gamma;
    series.rho_used = rho;
    series.zeta_r.assign(static_cast<std::size_t>(horizon), 0.0);
    series.zeta_p.assign(static_cast<std::size_t>(horizon), 0.0);
    series.success.assign(static_cast<std::size_t>(horizon), 0.0);
    std::vector<std::int64_t> cdf_counts(grid.size(), 0);
    for (const RunMetrics& m : metrics) {
      series.mean_latency += m.mean_latency;
      for (int t = 0; t < horizon; ++t) {
        series.zeta_r[static_cast<std::size_t>(t)] +=
            m.zeta_r[static_cast<std::size_t>(t)];
        series.zeta_p[static_cast<std::size_t>(t)] +=
            m.zeta_p[static_cast<std::size_t>(t)];
        series.success[static_cast<std::size_t>(t)] +=
            m.success[static_cast<std::size_t>(t)];
      }
      for (std::size_t i = 0; i < grid.size(); ++i) {
        cdf_counts[i] += m.cdf_counts[i];
      }
    }
    series.mean_latency /= n_runs;
    for (int t = 0; t < horizon; ++t) {
      series.zeta_r[static_cast<std::size_t>(t)] /= n_runs;
      series.zeta_p[static_cast<std::size_t>(t)] /= n_runs;
      series.success[static_cast<std::size_t>(t)] /= n_runs;
    }
    series.cdf.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      series.cdf.emplace_back(
          grid[i], static_cast<double>(cdf_counts[i]) /
                       (n_runs * static_cast<double>(horizon)));
    }
    result.policies.push_back(std::move(series));
  }

  const fs::path out_dir(base.output_dir);
  fs::create_directories(out_dir);

  std::string cdf_csv = "policy,latency_slots,fraction\n";
  std::string success_csv = "policy,t,ratio\n";
  std::string regret_csv = "policy,reference,t,zeta_hat\n";
  for (const PolicySeries& series : result.policies) {
    for (const auto& [x, fraction] : series.cdf) {
      cdf_csv += to_string(series.policy);
      cdf_csv += ',';
      append_num(cdf_csv, x);
      cdf_csv += ',';
      append_num(cdf_csv, fraction);
      cdf_csv += '\n';
    }
    for (int t = 1; t <= horizon; ++t) {
      if (!keep_slot(t, horizon, base.downsample)) continue;
      success_csv += to_string(series.policy);
      success_csv += ',';
      append_num(success_csv, t);
      success_csv += ',';
      append_num(success_csv, series.success[static_cast<std::size_t>(t - 1)]);
      success_csv += '\n';
    }
    for (const char* ref : {"realized", "expected"}) {
      const std::vector<double>& zeta =
          ref[0] == 'r' ? series.zeta_r : series.zeta_p;
      for (int t = 1; t <= horizon; ++t) {
        if (!keep_slot(t, horizon, base.downsample)) continue;
        regret_csv += to_string(series.policy);
        regret_csv += ',';
        regret_csv += ref;
        regret_csv += ',';
        append_num(regret_csv, t);
        regret_csv += ',';
        append_num(regret_csv, zeta[static_cast<std::size_t>(t - 1)]);
        regret_csv += '\n';
      }
    }
  }
  open_csv(out_dir / "cdf.csv") << cdf_csv;
  open_csv(out_dir / "success.csv") << success_csv;
  open_csv(out_dir / "regret.csv") << regret_csv;
  return result;
}

}  // namespace todsim
