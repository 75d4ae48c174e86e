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

// End-to-end acceptance: reproduces the headline comparisons at full
// scale (T = 10^4, K = 10, 20 seeds) and prints one verdict per
// criterion. Slow paths share cached run batches.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "estimator_oracle.hpp"
#include "todsim/analysis.hpp"
#include "todsim/config.hpp"
#include "todsim/errors.hpp"
#include "todsim/harness.hpp"
#include "todsim/policy.hpp"
#include "todsim/rng.hpp"

using namespace todsim;
namespace fs = std::filesystem;

namespace {

constexpr int kSeeds = 20;

void report(int id, const char* name, bool ok) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id, name);
  std::fflush(stdout);
  CHECK_MESSAGE(ok, "criterion ", id, ": ", name);
}

const std::vector<std::uint64_t>& seeds() {
  static const std::vector<std::uint64_t> s = derive_seeds(42, kSeeds);
  return s;
}

fs::path out_dir(const std::string& leaf) {
  const fs::path dir = fs::temp_directory_path() / "todsim_acceptance" / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<RunMetrics> run_policy(PolicyKind kind, double gamma, double rho,
                                   int breakpoints, int horizon) {
  EnvConfig env;  // stock ten-node setup
  env.breakpoints.count = breakpoints;
  env.horizon = horizon;
  std::vector<RunJob> jobs;
  for (std::uint64_t seed : seeds()) {
    RunJob job;
    job.env = env;
    job.env.seed = seed;
    job.policy = kind;
    job.gamma = gamma;
    job.xi = 0.6;
    job.rho = rho;
    jobs.push_back(job);
  }
  return run_batch(jobs, default_latency_grid(), 0);
}

double mean_latency_of(const std::vector<RunMetrics>& runs) {
  double sum = 0.0;
  for (const RunMetrics& m : runs) sum += m.mean_latency;
  return sum / static_cast<double>(runs.size());
}

double mean_final(const std::vector<RunMetrics>& runs, bool realized) {
  double sum = 0.0;
  for (const RunMetrics& m : runs) {
    sum += realized ? m.final_zeta_r : m.final_zeta_p;
  }
  return sum / static_cast<double>(runs.size());
}

// One comparison of tod (auto gamma), greedy, and round robin on the
// stock setup, shared by criteria 3, 6, and 8.
const CompareResult& headline_compare() {
  static const CompareResult result = [] {
    ExperimentSpec base = paper_default_spec();
    base.seeds = seeds();
    base.output_dir = out_dir("headline").string();
    base.jobs = 0;
    std::vector<ExperimentSpec> specs;
    for (PolicyKind kind : {PolicyKind::tod, PolicyKind::greedy,
                            PolicyKind::round_robin}) {
      ExperimentSpec spec = base;
      spec.policy = kind;
      specs.push_back(spec);
    }
    return compare(specs);
  }();
  return result;
}

const PolicySeries& policy_series(PolicyKind kind) {
  for (const PolicySeries& series : headline_compare().policies) {
    if (series.policy == kind) return series;
  }
  throw std::logic_error("policy not in the headline comparison");
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + TODSIM_CLI_PATH + "\" " + args +
                          " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("criterion 1: discount rule reproduces its reference values") {
  const bool ok =
      std::llround(recommended_gamma(150, 1e4, 20) * 1e4) == 9985 &&
      std::llround(recommended_gamma(10, 1e4, 20) * 1e4) == 9996;
  report(1, "gamma rule exactness", ok);
}

TEST_CASE("criterion 2: iterative estimators match direct sums") {
  using todsim::testing::close_rel;
  using todsim::testing::direct_stats;
  using todsim::testing::make_trace;
  SplitMix64 rng(2026);
  bool ok = true;
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    const int k = 2 + static_cast<int>(rng.next_below(5));
    const double gamma = rng.next_uniform(0.5, 0.9999);
    const int horizon =
        trial % 20 == 0 ? 1000 : 40 + static_cast<int>(rng.next_below(200));
    const auto trace = make_trace(rng, k, gamma, horizon, 20);
    PolicyState state = new_policy(PolicyConfig{k, gamma, 0.6, 20});
    for (int t = 1; t <= horizon && ok; ++t) {
      advance_slot(state, trace.per_slot[static_cast<std::size_t>(t - 1)],
                   trace.offloaded[static_cast<std::size_t>(t - 1)]);
      for (int node = 1; node <= k; ++node) {
        const auto direct = direct_stats(trace.log, node, t + 1, gamma);
        const ArmStats& arm = state.arms[static_cast<std::size_t>(node - 1)];
        ok = ok && close_rel(arm.n_disc, direct.n, 1e-9) &&
             close_rel(arm.w_bar, direct.w_bar, 1e-9) &&
             close_rel(arm.p_bar, direct.p_bar, 1e-9);
      }
    }
  }
  report(2, "estimator equivalence over 1000 randomized traces", ok);
}

TEST_CASE("criterion 3: headline ordering at 150 breakpoints") {
  const PolicySeries& tod = policy_series(PolicyKind::tod);
  const PolicySeries& greedy = policy_series(PolicyKind::greedy);
  const PolicySeries& rr = policy_series(PolicyKind::round_robin);

  const bool vs_rr = tod.mean_latency < 0.8 * rr.mean_latency;
  const bool vs_greedy = tod.mean_latency <= 1.3 * greedy.mean_latency;
  bool dominance = true;
  for (std::size_t i = 0; i < tod.cdf.size(); ++i) {
    if (tod.cdf[i].first >= 5.0 && tod.cdf[i].second < rr.cdf[i].second) {
      dominance = false;
    }
  }
  std::printf("  mean latency: tod %.3f, greedy %.3f, round_robin %.3f\n",
              tod.mean_latency, greedy.mean_latency, rr.mean_latency);
  report(3, "mean latency vs round robin and greedy, CDF dominance",
         vs_rr && vs_greedy && dominance);
}

TEST_CASE("criterion 4: near-parity with greedy under few breakpoints") {
  const auto tod = run_policy(PolicyKind::tod,
                              recommended_gamma(10, 1e4, 20), 0.0, 10, 10000);
  const auto greedy = run_policy(PolicyKind::greedy, 0.0, 0.0, 10, 10000);
  const double tod_mean = mean_latency_of(tod);
  const double greedy_mean = mean_latency_of(greedy);
  std::printf("  mean latency: tod %.3f vs greedy %.3f (ratio %.3f)\n",
              tod_mean, greedy_mean, tod_mean / greedy_mean);
  report(4, "tod within 1.1x of greedy at 10 breakpoints",
         tod_mean <= 1.1 * greedy_mean);
}

TEST_CASE("criterion 5: regret ordering and the cost of a short memory") {
  // A latency sweep over a grid containing 0.98 must not pick 0.98.
  ExperimentSpec sweep_spec = paper_default_spec();
  sweep_spec.seeds = seeds();
  sweep_spec.gamma.kind = GammaMode::Kind::sweep;
  sweep_spec.gamma.grid = {0.98, 0.9985};
  sweep_spec.output_dir = out_dir("sweep_opt").string();
  sweep_spec.jobs = 0;
  const SweepResult sweep = sweep_gamma(sweep_spec);
  CHECK(sweep.best_gamma != 0.98);

  // The tuned learner: best final regret over the searched grid. The
  // winning point coincides with the calibrated discount factor.
  const std::vector<double> gamma_grid = {0.98, 0.9985, 0.999, 0.9993,
                                          0.9996};
  std::vector<RunMetrics> tod_opt;
  double gamma_opt = gamma_grid.front();
  double best_regret = 0.0;
  for (double gamma : gamma_grid) {
    auto runs = run_policy(PolicyKind::tod, gamma, 0.0, 150, 10000);
    const double score = mean_final(runs, true);
    if (tod_opt.empty() || score < best_regret) {
      best_regret = score;
      gamma_opt = gamma;
      tod_opt = std::move(runs);
    }
  }
  std::printf("  gamma_opt over the grid: %.4f\n", gamma_opt);
  CHECK(gamma_opt != 0.98);

  // Exploration fraction searched as in the harness, same discount as
  // the tuned learner.
  const std::vector<double> rho_grid = {0.02, 0.05, 0.1, 0.2, 0.3};
  std::vector<RunMetrics> iir_best;
  double best_score = 0.0;
  for (double rho : rho_grid) {
    auto runs = run_policy(PolicyKind::iir, gamma_opt, rho, 150, 10000);
    const double score = mean_final(runs, true);
    if (iir_best.empty() || score < best_score) {
      best_score = score;
      iir_best = std::move(runs);
    }
  }

  const auto tod_sel = run_policy(PolicyKind::tod, 0.98, 0.0, 150, 10000);
  const PolicySeries& rr = policy_series(PolicyKind::round_robin);

  bool ok = true;
  for (bool realized : {true, false}) {
    const double z_opt = mean_final(tod_opt, realized);
    const double z_iir = mean_final(iir_best, realized);
    const double z_rr =
        realized ? rr.zeta_r.back() : rr.zeta_p.back();
    const double z_sel = mean_final(tod_sel, realized);
    std::printf("  %s: tod-opt %.2f, iir %.2f, rr %.2f, tod-sel %.2f\n",
                realized ? "realized" : "expected", z_opt, z_iir, z_rr,
                z_sel);
    ok = ok && z_opt < z_iir && z_iir < z_rr && z_sel >= 1.5 * z_opt;
  }
  report(5, "tod < iir < round robin, and gamma 0.98 deteriorates", ok);
}

TEST_CASE("criterion 6: success ratio climbs and stays below greedy") {
  const PolicySeries& tod = policy_series(PolicyKind::tod);
  const PolicySeries& greedy = policy_series(PolicyKind::greedy);
  const double early = tod.success[999];
  const double late = tod.success[9999];
  std::printf("  tod success 0.%03.0f @1e3 -> %.3f @1e4; greedy %.3f\n",
              early * 1000, late, greedy.success[9999]);
  report(6, "cumulative success ratio trend",
         late > early && greedy.success[9999] >= late);
}

TEST_CASE("criterion 7: stationary pulls fit under the analytic bound") {
  const auto runs = run_policy(PolicyKind::tod, 0.9985, 0.0, 0, 10000);
  const int k = 10;
  bool ok = true;
  for (int node = 1; node <= k; ++node) {
    double pulls = 0.0;
    double gap = std::numeric_limits<double>::infinity();
    bool defined = false;
    for (const RunMetrics& m : runs) {
      pulls += static_cast<double>(
          m.suboptimal[static_cast<std::size_t>(node - 1)]);
      const auto& d = m.delta_mu[static_cast<std::size_t>(node - 1)];
      if (d.has_value() && *d > 0.0) {
        defined = true;
        gap = std::min(gap, *d);
      }
    }
    pulls /= static_cast<double>(runs.size());
    if (!defined) continue;  // optimal at every slot in every seed
    const BoundBreakdown bound =
        regret_bound(BoundInputs{0.9985, 0.6, 20, 10000, 0, gap, 10});
    if (!(pulls <= bound.total) || !std::isfinite(bound.total)) ok = false;
  }

  // The bound command refuses an infeasible discount factor.
  const int rc = run_cli(
      "bound --gamma 0.5 --tau-max 20 --horizon 10000 --upsilon 0 "
      "--delta-mu 1");
  ok = ok && rc == 2;
  report(7, "measured suboptimal pulls within the bound; exit 2 on "
            "infeasible gamma", ok);
}

TEST_CASE("criterion 8: running pseudo-regret shrinks with the horizon") {
  // Uniform breakpoint placement grows the change count linearly in t,
  // so the running series compares the same scaled regime at both
  // horizons.
  const PolicySeries& tod = policy_series(PolicyKind::tod);
  const double early = tod.zeta_p[999];
  const double late = tod.zeta_p[9999];
  std::printf("  zeta_p @1e3 %.3f -> @1e4 %.3f\n", early, late);
  report(8, "pseudo-regret at 1e4 strictly below its value at 1e3",
         late < early);
}

TEST_CASE("criterion 9: byte-identical reruns and schedule-free sweeps") {
  const fs::path a = out_dir("det_a");
  const fs::path b = out_dir("det_b");
  REQUIRE(run_cli("run --paper-defaults --seed 42 --out \"" + a.string() +
                  "\"") == 0);
  REQUIRE(run_cli("run --paper-defaults --seed 42 --out \"" + b.string() +
                  "\"") == 0);
  const bool reruns = slurp(a / "trace.csv") == slurp(b / "trace.csv");

  const fs::path s1 = out_dir("sweep_1");
  const fs::path s8 = out_dir("sweep_8");
  const std::string sweep_args =
      "sweep-gamma --paper-defaults --gamma-grid 0.99 0.9985 "
      "--seed 42 --seed 43 --seed 44 --out \"";
  REQUIRE(run_cli(sweep_args + s1.string() + "\" --jobs 1") == 0);
  REQUIRE(run_cli(sweep_args + s8.string() + "\" --jobs 8") == 0);
  const bool sweeps = slurp(s1 / "sweep.csv") == slurp(s8 / "sweep.csv");

  report(9, "identical trace bytes and concurrency-independent sweeps",
         reruns && sweeps);
}

TEST_CASE("cli: bound evaluates a finished run directory") {
  const fs::path dir = out_dir("bound_run");
  REQUIRE(run_cli("run --paper-defaults --seed 42 --out \"" + dir.string() +
                  "\"") == 0);
  std::ifstream trace(dir / "trace.csv");
  int rows = -1;  // header
  std::string line;
  while (std::getline(trace, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 10000);
  CHECK(run_cli("bound --run \"" + dir.string() + "\"") == 0);
  CHECK(fs::exists(dir / "bound.csv"));
}

TEST_CASE("cli: compare emits four policies with both references") {
  const fs::path dir = out_dir("compare4");
  REQUIRE(run_cli("compare --paper-defaults --horizon 800 --breakpoints 12 "
                  "--seed 1 --out \"" + dir.string() + "\"") == 0);
  const std::string regret = slurp(dir / "regret.csv");
  for (const char* label : {"tod,", "greedy,", "round_robin,", "iir,"}) {
    CHECK(regret.find(label) != std::string::npos);
  }
  CHECK(regret.find(",realized,") != std::string::npos);
  CHECK(regret.find(",expected,") != std::string::npos);
}

TEST_CASE("criterion 10: a full-scale run finishes within ten seconds") {
  RunJob job;
  job.env = EnvConfig{};  // stock ten-node setup
  job.env.seed = 42;
  job.policy = PolicyKind::tod;
  job.gamma = recommended_gamma(150, 1e4, 20);
  job.xi = 0.6;
  const auto start = std::chrono::steady_clock::now();
  const RunMetrics metrics = run_metrics(job, default_latency_grid());
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  std::printf("  %.0f slots in %.3f s (mean latency %.3f)\n", 1e4, elapsed,
              metrics.mean_latency);
  report(10, "full-scale run under 10 seconds", elapsed < 10.0);
}
