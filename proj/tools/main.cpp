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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "todsim/analysis.hpp"
#include "todsim/csv.hpp"
#include "todsim/errors.hpp"
#include "todsim/harness.hpp"

namespace {

using namespace todsim;

struct CommonOpts {
  std::string config_path;
  bool paper_defaults = false;
  std::vector<std::uint64_t> seeds;
  std::string out;
  std::string policy;
  std::string gamma;
  std::vector<double> gamma_grid;
  int jobs = -1;
  int downsample = 0;
  int horizon = 0;
  int breakpoints = -1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "Experiment config file");
  cmd->add_flag("--paper-defaults", opts.paper_defaults,
                "Use the built-in default setup (implied without --config)");
  cmd->add_option("--seed", opts.seeds, "Run seed, repeatable");
  cmd->add_option("--out", opts.out, "Output directory");
  cmd->add_option("--policy", opts.policy,
                  "Policy: tod, greedy, round_robin, iir");
  cmd->add_option("--gamma", opts.gamma, "Discount factor, or 'auto'");
  cmd->add_option("--gamma-grid", opts.gamma_grid,
                  "Gamma values for sweep-gamma");
  cmd->add_option("--jobs", opts.jobs, "Parallel runs (1 = serial)");
  cmd->add_option("--downsample", opts.downsample,
                  "Keep every Nth row of per-slot series");
  cmd->add_option("--horizon", opts.horizon, "Override slot count");
  cmd->add_option("--breakpoints", opts.breakpoints,
                  "Override breakpoint count");
}

ExperimentSpec build_spec(const CommonOpts& opts) {
  if (!opts.config_path.empty() && opts.paper_defaults) {
    throw InvalidConfig("give either --config or --paper-defaults, not both");
  }
  ExperimentSpec spec = opts.config_path.empty()
                            ? paper_default_spec()
                            : load_spec(opts.config_path);
  if (!opts.seeds.empty()) spec.seeds = opts.seeds;
  if (!opts.out.empty()) spec.output_dir = opts.out;
  if (!opts.policy.empty()) {
    const auto kind = parse_policy(opts.policy);
    if (!kind) throw InvalidConfig("unknown policy '" + opts.policy + "'");
    spec.policy = *kind;
  }
  if (!opts.gamma.empty()) {
    if (opts.gamma == "auto") {
      spec.gamma.kind = GammaMode::Kind::automatic;
      spec.gamma.value = 0.0;
    } else if (opts.gamma == "sweep") {
      spec.gamma.kind = GammaMode::Kind::sweep;
      spec.gamma.value = 0.0;
    } else {
      spec.gamma.kind = GammaMode::Kind::fixed;
      spec.gamma.value = std::stod(opts.gamma);
    }
  }
  if (!opts.gamma_grid.empty()) spec.gamma.grid = opts.gamma_grid;
  if (opts.jobs >= 0) spec.jobs = opts.jobs;
  if (opts.downsample > 0) spec.downsample = opts.downsample;
  if (opts.horizon > 0) spec.env.horizon = opts.horizon;
  if (opts.breakpoints >= 0) spec.env.breakpoints.count = opts.breakpoints;
  return spec;
}

int cmd_run(const CommonOpts& opts) {
  const ExperimentSpec spec = build_spec(opts);
  const ExperimentResult result = run_experiment(spec);
  std::cout << "policy=" << to_string(result.policy);
  if (result.gamma_used > 0.0) std::cout << " gamma=" << result.gamma_used;
  if (spec.policy == PolicyKind::iir) std::cout << " rho=" << result.rho_used;
  std::cout << "\n";
  for (const SeedSummary& row : result.per_seed) {
    std::cout << "seed " << row.seed << ": mean latency "
              << row.mean_latency << " slots, success "
              << row.success_ratio << ", zeta_r " << row.zeta_r_final
              << ", zeta_p " << row.zeta_p_final << "\n";
  }
  std::cout << "mean latency over seeds: " << result.mean_latency
            << " slots\n";
  std::cout << "wrote " << spec.output_dir << "/{trace,summary,bound_inputs}"
            << ".csv\n";
  return 0;
}

int cmd_sweep(const CommonOpts& opts) {
  ExperimentSpec spec = build_spec(opts);
  if (spec.gamma.grid.empty()) {
    throw InvalidConfig("sweep-gamma needs --gamma-grid or a config grid");
  }
  const SweepResult result = sweep_gamma(spec);
  for (const SweepRow& row : result.rows) {
    std::cout << "gamma " << num_to_string(row.gamma) << ": mean latency "
              << row.mean_latency << " slots over " << row.seeds
              << " seed(s)\n";
  }
  std::cout << "best gamma: " << num_to_string(result.best_gamma) << "\n";
  std::cout << "wrote " << spec.output_dir << "/sweep.csv\n";
  return 0;
}

int cmd_compare(const CommonOpts& opts) {
  const ExperimentSpec base = build_spec(opts);
  std::vector<ExperimentSpec> specs;
  for (PolicyKind kind : {PolicyKind::tod, PolicyKind::greedy,
                          PolicyKind::round_robin, PolicyKind::iir}) {
    ExperimentSpec spec = base;
    spec.policy = kind;
    specs.push_back(std::move(spec));
  }
  const CompareResult result = compare(specs);
  for (const PolicySeries& series : result.policies) {
    std::cout << to_string(series.policy) << ": mean latency "
              << series.mean_latency << " slots, final zeta_r "
              << series.zeta_r.back() << ", final zeta_p "
              << series.zeta_p.back();
    if (series.policy == PolicyKind::iir) {
      std::cout << " (rho " << series.rho_used << ")";
    }
    std::cout << "\n";
  }
  std::cout << "wrote " << base.output_dir << "/{cdf,success,regret}.csv\n";
  return 0;
}

int cmd_gamma(double upsilon, double horizon, int tau_max) {
  const double gamma = recommended_gamma(upsilon, horizon, tau_max);
  std::cout << num_to_string(gamma) << "\n";
  return 0;
}

struct BoundArgs {
  std::string run_dir;
  double gamma = 0.0;
  double xi = 0.6;
  int tau_max = 20;
  double horizon = 10000;
  double upsilon = 0.0;
  double delta_mu = 0.0;
  double n_k = 10.0;
  std::string out;
};

void print_bound(const BoundBreakdown& bound) {
  std::cout << "  bound " << bound.total << " = 1 + " << bound.stationary_term
            << " + " << bound.breakpoint_term << " + " << bound.tail_term
            << "\n";
}

int cmd_bound(const BoundArgs& args) {
  if (args.run_dir.empty()) {
    if (!(args.delta_mu > 0.0) || !(args.gamma > 0.0)) {
      throw InvalidConfig("bound needs --run, or --gamma and --delta-mu");
    }
    const BoundInputs inputs{args.gamma, args.xi, args.tau_max, args.horizon,
                             args.upsilon, args.delta_mu, args.n_k};
    const BoundBreakdown bound = regret_bound(inputs);
    std::cout << "gamma " << num_to_string(args.gamma) << " delta_mu "
              << args.delta_mu << "\n";
    print_bound(bound);
    return 0;
  }

  const std::filesystem::path path =
      std::filesystem::path(args.run_dir) / "bound_inputs.csv";
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("io: cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("io: empty " + path.string());
  }
  std::string csv =
      "seed,node,delta_mu,suboptimal_pulls,bound_total,stationary_term,"
      "breakpoint_term,tail_term\n";
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() < 10) {
      throw std::runtime_error("io: malformed row in " + path.string());
    }
    const std::string& seed = fields[0];
    const std::string& node = fields[1];
    BoundInputs inputs;
    inputs.gamma = std::stod(fields[2]);
    inputs.xi = std::stod(fields[3]);
    inputs.tau_max = std::stoi(fields[4]);
    inputs.horizon = std::stod(fields[5]);
    inputs.upsilon = std::stod(fields[6]);
    inputs.n_k = std::stod(fields[7]);
    const std::string& pulls = fields[9];
    std::cout << "seed " << seed << " node " << node << ": ";
    if (fields[8].empty()) {
      std::cout << "optimal at every slot, gap undefined\n";
      continue;
    }
    inputs.delta_mu = std::stod(fields[8]);
    const BoundBreakdown bound = regret_bound(inputs);
    std::cout << "delta_mu " << inputs.delta_mu << ", suboptimal pulls "
              << pulls << "\n";
    print_bound(bound);
    csv += seed + ',' + node + ',' + fields[8] + ',' + pulls + ',';
    append_num(csv, bound.total);
    csv += ',';
    append_num(csv, bound.stationary_term);
    csv += ',';
    append_num(csv, bound.breakpoint_term);
    csv += ',';
    append_num(csv, bound.tail_term);
    csv += '\n';
  }
  const std::filesystem::path out_dir(
      args.out.empty() ? args.run_dir : args.out);
  std::filesystem::create_directories(out_dir);
  std::ofstream out(out_dir / "bound.csv", std::ios::binary);
  if (!out) {
    throw std::runtime_error("io: cannot write bound.csv");
  }
  out << csv;
  std::cout << "wrote " << (out_dir / "bound.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discounted-UCB task offloading simulator"};
  app.require_subcommand(1);

  CommonOpts run_opts;
  CLI::App* run_cmd =
      app.add_subcommand("run", "Simulate one policy over the given seeds");
  add_common(run_cmd, run_opts);

  CommonOpts sweep_opts;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep-gamma", "Evaluate mean latency over a gamma grid");
  add_common(sweep_cmd, sweep_opts);

  CommonOpts compare_opts;
  CLI::App* compare_cmd = app.add_subcommand(
      "compare", "Run tod/greedy/round_robin/iir on one environment");
  add_common(compare_cmd, compare_opts);

  double g_upsilon = 0.0;
  double g_horizon = 10000.0;
  int g_tau_max = 20;
  CLI::App* gamma_cmd = app.add_subcommand(
      "gamma", "Print the breakpoint-balancing discount factor");
  gamma_cmd->add_option("--upsilon", g_upsilon, "Breakpoint count")
      ->required();
  gamma_cmd->add_option("--horizon", g_horizon, "Slot count");
  gamma_cmd->add_option("--tau-max", g_tau_max, "Latency cap in slots");

  BoundArgs bound_args;
  CLI::App* bound_cmd = app.add_subcommand(
      "bound", "Evaluate the suboptimal-offload upper bound");
  bound_cmd->add_option("--run", bound_args.run_dir,
                        "Finished run directory with bound_inputs.csv");
  bound_cmd->add_option("--gamma", bound_args.gamma, "Discount factor");
  bound_cmd->add_option("--xi", bound_args.xi, "Exploration constant");
  bound_cmd->add_option("--tau-max", bound_args.tau_max, "Latency cap");
  bound_cmd->add_option("--horizon", bound_args.horizon, "Slot count");
  bound_cmd->add_option("--upsilon", bound_args.upsilon, "Breakpoint count");
  bound_cmd->add_option("--delta-mu", bound_args.delta_mu,
                        "Minimal expected-latency gap");
  bound_cmd->add_option("--n-k", bound_args.n_k,
                        "Discounted count after warm-up");
  bound_cmd->add_option("--out", bound_args.out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(run_opts);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_opts);
    if (compare_cmd->parsed()) return cmd_compare(compare_opts);
    if (gamma_cmd->parsed()) {
      return cmd_gamma(g_upsilon, g_horizon, g_tau_max);
    }
    if (bound_cmd->parsed()) return cmd_bound(bound_args);
  } catch (const InfeasibleGamma& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
