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

#ifndef TODSIM_BASELINES_HPP
#define TODSIM_BASELINES_HPP

#include "todsim/fog_env.hpp"
#include "todsim/policy.hpp"

namespace todsim {

// Non-causal oracle: reads the counterfactual draw and picks the node
// with the lowest realized latency, ties to the lowest id.
int greedy_select(const TaskRealization& realization);

// Cycles through the nodes with equal shares: 1, 2, ..., K, 1, ...
int round_robin_select(int t, int node_count);

// Two-phase baseline: a round-robin exploration prefix followed by pure
// exploitation of the discounted estimate, with no exploration bonus.
struct IirConfig {
  double gamma = 0.9985;
  double explore_fraction = 0.1;  // rho, share of the horizon spent cycling
  int horizon = 10000;
};

void validate(const IirConfig& config);

// Estimator updates are shared with the discounted-UCB learner via
// advance_slot; only the selection rule differs.
int iir_select(const PolicyState& state, const TaskContext& ctx,
               const IirConfig& config);

}  // namespace todsim

#endif  // TODSIM_BASELINES_HPP
