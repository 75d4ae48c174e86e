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

#ifndef TODSIM_POLICY_HPP
#define TODSIM_POLICY_HPP

#include <span>
#include <utility>
#include <vector>

namespace todsim {

// Nodes are numbered 1..K; node K is the local (task) node, the rest are
// helpers. Vectors indexed by node store node i at position i-1.

struct PolicyConfig {
  int node_count = 10;     // K, helpers plus the local node
  double gamma = 0.9985;   // discount factor, in (0,1)
  double xi = 0.6;         // exploration constant, > 1/2
  int tau_max = 20;        // maximum permitted latency, slots
};

// Throws InvalidConfig if any field is out of range.
void validate(const PolicyConfig& config);

// Discounted per-node statistics. `n_disc` is the discounted feedback
// count; `w_bar` / `p_bar` are discounted means of per-KB waiting and
// processing delay. Zero count implies zero means by convention.
// A task issued against an empty queue observes no waiting at all, so
// such feedback contributes to `n_disc` and `p_bar` but leaves `w_bar`
// alone; `n_wait` is the discounted count of wait-bearing feedback.
struct ArmStats {
  double n_disc = 0.0;
  double n_wait = 0.0;
  double w_bar = 0.0;   // slots per KB
  double p_bar = 0.0;   // slots per KB
  int pending = 0;      // tasks offloaded to this node awaiting feedback
};

// Everything the decision-maker sees at slot t: the task length, the
// known per-KB transmission cost of each node, and the queue lengths
// nodes broadcast at the slot boundary.
struct TaskContext {
  int task_id = 0;             // the issuing slot
  double length_kb = 0.0;      // L_t
  std::vector<double> tx_cost;   // slots per KB, zero for the local node
  std::vector<double> queue_kb;  // broadcast queue lengths
};

// A delivered (possibly slot-delayed) observation for one task.
struct CompletedFeedback {
  int task_id = 0;       // slot the task was issued
  int node = 0;          // node that processed it
  int receipt_slot = 0;  // slot the feedback arrived
  double w_obs = 0.0;    // normalized waiting delay, slots per KB
  double p_obs = 0.0;    // normalized processing delay, slots per KB
  bool queue_observed = true;  // false when the issue-time queue was empty
};

struct PolicyState {
  PolicyConfig config;
  int t = 1;  // current slot
  std::vector<ArmStats> arms;
  double n_total = 0.0;  // cached sum of arms' discounted counts
};

// Fresh learner at slot 1 with zeroed statistics.
PolicyState new_policy(const PolicyConfig& config);

// Turns raw waiting/processing times into per-KB observations.
// A zero queue at issue yields a zero waiting observation.
// Throws std::invalid_argument when length_kb <= 0.
std::pair<double, double> normalize_feedback(double tau_w, double tau_p,
                                             double queue_at_issue,
                                             double length_kb);

// Estimated latency of running the context's task on `node`:
// transmission plus queue-weighted waiting plus length-weighted processing.
double estimate_latency(const PolicyState& state, const TaskContext& ctx,
                        int node);

// Exploration bonus c_t for `node`; zero log below count one, +infinity
// never (unplayed arms are handled by ucb_score's sentinel).
double exploration_bonus(const PolicyState& state, int node);

// Upper confidence score: reward estimate plus exploration bonus.
// Returns +infinity for a node with no discounted feedback, which forces
// re-exploration.
double ucb_score(const PolicyState& state, const TaskContext& ctx, int node);

// Warm-up slots t <= K pick node t; afterwards the highest UCB score
// wins, ties to the lowest node id.
int select_node(const PolicyState& state, const TaskContext& ctx);

// One slot transition: discount every arm, fold in the completions that
// arrived during this slot, track pending counts, advance the clock.
// Completions must carry receipt_slot == state.t + 1; earlier receipts
// throw StaleFeedback.
void advance_slot(PolicyState& state,
                  std::span<const CompletedFeedback> completions,
                  int offloaded_to);

}  // namespace todsim

#endif  // TODSIM_POLICY_HPP
