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

#ifndef TODSIM_ANALYSIS_HPP
#define TODSIM_ANALYSIS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace todsim {

// One slot of a finished run: what was chosen, what it cost, and the
// oracle vectors needed by the metrics.
struct SlotRecord {
  int t = 0;
  int chosen = 0;
  double latency = 0.0;  // realized latency of the chosen node
  bool success = false;
  std::vector<double> mu;  // expected latency per node
  std::vector<double> u;   // realized latency per node
  int opt_expected = 0;
  int opt_realized = 0;
};

struct RunHistory {
  int node_count = 0;
  std::vector<SlotRecord> slots;
};

// Discount factor balancing stationary accuracy against reaction speed:
// 1 - sqrt(upsilon/horizon) / (4 tau_max). Throws std::invalid_argument
// when the inputs leave (0,1).
double recommended_gamma(double upsilon, double horizon, int tau_max);

// Left-hand side of the feasibility condition
// gamma^tau_max (1 - gamma^(1/(1-gamma))) / (1 - gamma), compared to e.
double feasibility_lhs(double gamma, int tau_max);
bool gamma_feasible(double gamma, int tau_max);

struct BoundInputs {
  double gamma = 0.9985;
  double xi = 0.6;
  int tau_max = 20;
  double horizon = 10000;  // T
  double upsilon = 150;    // breakpoints before T
  double delta_mu = 1.0;   // minimal expected-latency gap of the node
  double n_k = 10;         // total discounted count after warm-up
};

struct BoundBreakdown {
  double total = 0.0;
  double warm_term = 1.0;        // the constant 1
  double stationary_term = 0.0;  // T (1-gamma) B(gamma)
  double breakpoint_term = 0.0;  // upsilon C(gamma)
  double tail_term = 0.0;        // 2 / (1-gamma)
  double b_value = 0.0;
  double c_value = 0.0;
};

// Upper bound on the expected number of suboptimal offloads to a node.
// Throws InfeasibleGamma when the discount factor fails the feasibility
// condition, std::invalid_argument on non-positive delta_mu or xi <= 1/2.
BoundBreakdown regret_bound(const BoundInputs& inputs);

// Per-node count of slots where the node was chosen while another node
// had strictly the best expected latency.
std::vector<std::int64_t> count_suboptimal_pulls(const RunHistory& history);

enum class RegretReference { expected, realized };

// Running average excess latency over the per-slot reference: the
// expected-optimal node's mean latency, or the realized minimum.
std::vector<double> pseudo_regret(const RunHistory& history,
                                  RegretReference reference);

// Running fraction of tasks finishing within tau_max.
std::vector<double> success_ratio(const RunHistory& history, int tau_max);

// Empirical CDF of realized latency on the given ascending grid. Failed
// tasks count as infinite latency and never fall below a finite point.
std::vector<std::pair<double, double>> latency_cdf(
    const RunHistory& history, std::span<const double> grid);

// Minimal expected-latency gap per node over the slots where it was not
// optimal; nullopt for a node that was optimal throughout.
std::vector<std::optional<double>> measure_delta_mu(const RunHistory& history);

}  // namespace todsim

#endif  // TODSIM_ANALYSIS_HPP
