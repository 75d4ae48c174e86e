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

#include "todsim/policy.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <string>

#include "todsim/errors.hpp"

namespace todsim {

void validate(const PolicyConfig& config) {
  if (config.node_count < 2) {
    throw InvalidConfig("policy: node_count must be at least 2");
  }
  if (!(config.gamma > 0.0 && config.gamma < 1.0)) {
    throw InvalidConfig("policy: gamma must lie in the open interval (0,1)");
  }
  if (!(config.xi > 0.5)) {
    throw InvalidConfig("policy: xi must exceed 1/2");
  }
  if (config.tau_max < 1) {
    throw InvalidConfig("policy: tau_max must be at least 1 slot");
  }
}

PolicyState new_policy(const PolicyConfig& config) {
  validate(config);
  PolicyState state;
  state.config = config;
  state.t = 1;
  state.arms.assign(static_cast<std::size_t>(config.node_count), ArmStats{});
  state.n_total = 0.0;
  return state;
}

std::pair<double, double> normalize_feedback(double tau_w, double tau_p,
                                             double queue_at_issue,
                                             double length_kb) {
  if (!(length_kb > 0.0)) {
    throw std::invalid_argument("normalize_feedback: task length must be > 0");
  }
  assert(tau_w >= 0.0 && tau_p >= 0.0);
  const double w_obs = queue_at_issue > 0.0 ? tau_w / queue_at_issue : 0.0;
  const double p_obs = tau_p / length_kb;
  return {w_obs, p_obs};
}

double estimate_latency(const PolicyState& state, const TaskContext& ctx,
                        int node) {
  assert(node >= 1 && node <= state.config.node_count);
  const ArmStats& arm = state.arms[static_cast<std::size_t>(node - 1)];
  const std::size_t i = static_cast<std::size_t>(node - 1);
  return ctx.length_kb * ctx.tx_cost[i] + ctx.queue_kb[i] * arm.w_bar +
         ctx.length_kb * arm.p_bar;
}

double exploration_bonus(const PolicyState& state, int node) {
  const ArmStats& arm = state.arms[static_cast<std::size_t>(node - 1)];
  if (arm.n_disc <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  // The total discounted count can sit below one early on (or after long
  // droughts); a negative log would make the bonus imaginary, so it is
  // clamped at zero.
  const double log_n = state.n_total > 1.0 ? std::log(state.n_total) : 0.0;
  return 2.0 * state.config.tau_max *
         std::sqrt(state.config.xi * log_n / arm.n_disc);
}

double ucb_score(const PolicyState& state, const TaskContext& ctx, int node) {
  const ArmStats& arm = state.arms[static_cast<std::size_t>(node - 1)];
  if (arm.n_disc <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  const double reward_estimate =
      state.config.tau_max - estimate_latency(state, ctx, node);
  return reward_estimate + exploration_bonus(state, node);
}

int select_node(const PolicyState& state, const TaskContext& ctx) {
  assert(ctx.task_id == state.t);
  const int k = state.config.node_count;
  if (state.t <= k) {
    return state.t;  // warm-up: each node exactly once
  }
  int best = 1;
  double best_score = ucb_score(state, ctx, 1);
  for (int node = 2; node <= k; ++node) {
    const double score = ucb_score(state, ctx, node);
    if (score > best_score) {
      best_score = score;
      best = node;
    }
  }
  return best;
}

void advance_slot(PolicyState& state,
                  std::span<const CompletedFeedback> completions,
                  int offloaded_to) {
  const int t = state.t;
  const double gamma = state.config.gamma;
  for (const CompletedFeedback& fb : completions) {
    if (fb.receipt_slot <= t) {
      throw StaleFeedback("advance_slot: feedback for task " +
                          std::to_string(fb.task_id) + " arrived at slot " +
                          std::to_string(fb.receipt_slot) +
                          " but the learner is already at slot " +
                          std::to_string(t));
    }
    if (fb.receipt_slot > t + 1) {
      throw std::invalid_argument(
          "advance_slot: feedback with receipt slot " +
          std::to_string(fb.receipt_slot) + " does not belong to slot " +
          std::to_string(t));
    }
    assert(fb.node >= 1 && fb.node <= state.config.node_count);
  }

  assert(offloaded_to >= 1 && offloaded_to <= state.config.node_count);
  // Increment before folding in completions: the slot-t task itself can
  // already complete with receipt t+1.
  state.arms[static_cast<std::size_t>(offloaded_to - 1)].pending += 1;

  for (std::size_t i = 0; i < state.arms.size(); ++i) {
    ArmStats& arm = state.arms[i];
    const int node = static_cast<int>(i) + 1;

    double weight_sum = 0.0;
    double wait_weight_sum = 0.0;
    double w_corr = 0.0;
    double p_corr = 0.0;
    bool any = false;
    for (const CompletedFeedback& fb : completions) {
      if (fb.node != node) continue;
      // Receipt slots are integral, so the discount weight of a fresh
      // arrival is gamma^((t+1) - receipt) = 1; the pow keeps the update
      // aligned with the general form.
      const double w = std::pow(gamma, static_cast<double>(t + 1) -
                                           static_cast<double>(fb.receipt_slot));
      weight_sum += w;
      p_corr += w * (fb.p_obs - arm.p_bar);
      if (fb.queue_observed) {
        wait_weight_sum += w;
        w_corr += w * (fb.w_obs - arm.w_bar);
      }
      arm.pending -= 1;
      any = true;
    }

    arm.n_disc *= gamma;
    arm.n_wait *= gamma;
    if (any) {
      // Incremental form of the weighted-mean update: exact no-op when
      // every observation equals the current mean, and the means stay
      // untouched on slots without arrivals.
      arm.n_disc += weight_sum;
      arm.p_bar += p_corr / arm.n_disc;
      if (wait_weight_sum > 0.0) {
        arm.n_wait += wait_weight_sum;
        arm.w_bar += w_corr / arm.n_wait;
      }
    }
    assert(arm.pending >= 0);
  }

  double total = 0.0;
  for (const ArmStats& arm : state.arms) total += arm.n_disc;
  state.n_total = total;
  state.t = t + 1;
}

}  // namespace todsim
