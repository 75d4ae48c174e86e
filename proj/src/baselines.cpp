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

#include "todsim/baselines.hpp"

#include <cassert>

#include "todsim/errors.hpp"
#include "todsim/util.hpp"

namespace todsim {

int greedy_select(const TaskRealization& realization) {
  assert(!realization.latency.empty());
  return argmin_node(realization.latency);
}

int round_robin_select(int t, int node_count) {
  assert(t >= 1 && node_count >= 1);
  return (t - 1) % node_count + 1;
}

void validate(const IirConfig& config) {
  if (!(config.explore_fraction > 0.0 && config.explore_fraction < 1.0)) {
    throw InvalidConfig("iir: explore_fraction must lie in (0,1)");
  }
  if (!(config.gamma > 0.0 && config.gamma < 1.0)) {
    throw InvalidConfig("iir: gamma must lie in (0,1)");
  }
  if (config.horizon < 1) {
    throw InvalidConfig("iir: horizon must be positive");
  }
}

int iir_select(const PolicyState& state, const TaskContext& ctx,
               const IirConfig& config) {
  assert(ctx.task_id == state.t);
  if (state.t <= config.explore_fraction * config.horizon) {
    return round_robin_select(state.t, state.config.node_count);
  }
  // Exploit the reward estimate alone; maximizing tau_max - mu is
  // minimizing the latency estimate.
  int best = 1;
  double best_mu = estimate_latency(state, ctx, 1);
  for (int node = 2; node <= state.config.node_count; ++node) {
    const double mu = estimate_latency(state, ctx, node);
    if (mu < best_mu) {
      best_mu = mu;
      best = node;
    }
  }
  return best;
}

}  // namespace todsim
