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

#ifndef TODSIM_FOG_ENV_HPP
#define TODSIM_FOG_ENV_HPP

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "todsim/policy.hpp"
#include "todsim/rng.hpp"

namespace todsim {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Range&) const = default;
};

struct QueueParams {
  // Per-slot drain of node i is service_floor + service_coeff * cpu_i.
  // The floor keeps every queue draining even after a capability drop,
  // so aggregate capacity stays above the offered load; the coefficient
  // is small enough that no single node can absorb the full task stream,
  // which keeps queue lengths informative. Background load is a trickle
  // below the floor.
  double bg_prob = 0.02;        // per-node chance of a background arrival
  Range bg_size_kb{0.1, 0.5};   // size of such an arrival
  double service_floor = 0.03;   // KB drained per slot regardless of CPU
  double service_coeff = 0.15;   // KB drained per slot per CPU unit
  // Queues start at a draw from this range rather than empty, as if the
  // network had already been running when measurement begins.
  Range init_kb{0.0, 100.0};
  double max_kb = 100.0;  // finite per-node buffer
  bool operator==(const QueueParams&) const = default;
};

struct BreakpointParams {
  int count = 150;      // abrupt expectation changes over the horizon
  double factor = 16.0; // CPU capability multiplier/divisor
  bool operator==(const BreakpointParams&) const = default;
};

struct EnvConfig {
  int node_count = 10;  // K, helpers plus the local node
  int horizon = 10000;  // T, slots
  double slot_ms = 20.0;  // wall-clock per slot, metadata only
  Range length_kb{1.0, 15.0};       // task size L_t
  Range complexity{1.0, 10.0};      // per-task complexity draw
  Range cpu{1.0, 10.0};             // initial per-node CPU capability
  Range tx_slots_per_kb{0.002, 0.02};  // helper transmission cost T(i)
  // Waiting rate per queued KB is the mean-complexity load over the
  // node's capability scaled by this factor; the band is symmetric, so
  // mu_w is its midpoint times mean(complexity)/cpu.
  Range wait_factor{0.365, 0.395};
  BreakpointParams breakpoints{};
  QueueParams queue{};
  int tau_max = 20;  // slots; beyond this a task fails
  bool censor_timeouts = true;  // deliver a capped observation on failure
  std::uint64_t seed = 1;
  bool operator==(const EnvConfig&) const = default;
};

// Throws InvalidConfig on out-of-range fields (including a transmission
// delay that could exceed one slot).
void validate(const EnvConfig& config);

// Ground-truth state of one node. `mu_w` / `mu_p` are the current
// expectations of per-KB waiting and processing delay, never shown to
// the learner.
struct NodeTruth {
  int index = 0;
  double cpu = 0.0;
  double tx = 0.0;        // slots per KB, zero for the local node
  double queue_kb = 0.0;
  double mu_w = 0.0;
  double mu_p = 0.0;
};

// Counterfactual per-node draws for one slot: every node's would-be
// waiting rate, processing rate, and total latency for this task.
struct TaskRealization {
  std::vector<double> wait_per_kb;  // W_t(i)
  std::vector<double> proc_per_kb;  // P_t(i)
  std::vector<double> latency;      // U_t(i)
};

struct SlotOutcome {
  std::vector<double> queues;  // broadcast at slot start
  TaskRealization realization;
  std::vector<CompletedFeedback> completions;  // arrivals during this slot
  double realized_latency = 0.0;  // U of the chosen node
  int opt_expected = 0;   // argmin of expected latency
  int opt_realized = 0;   // argmin of realized latency
  bool success = false;   // realized latency within tau_max
};

enum class BreakDirection { multiply, divide };

struct Breakpoint {
  int slot = 0;  // first slot the new capability is in effect
  int node = 0;
  BreakDirection direction = BreakDirection::multiply;
};

struct Task {
  double length_kb = 0.0;
  double complexity = 0.0;
};

// Discrete-time fog network simulator. One instance per run; copyable
// value type, so snapshotting mid-run state is cheap. All randomness
// comes from a stream derived from the config seed, and a slot's draws
// never depend on the node chosen in it, so different policies replayed
// on one seed face identical task and delay sequences.
class Env {
 public:
  explicit Env(EnvConfig config);

  const EnvConfig& config() const { return config_; }
  int current_slot() const { return t_; }
  const std::vector<NodeTruth>& nodes() const { return nodes_; }
  const std::vector<Breakpoint>& schedule() const { return schedule_; }
  std::size_t breakpoints_applied() const { return next_breakpoint_; }

  // Draws the slot-t task (length and complexity) and caches it for the
  // rest of the slot. Must be called exactly once per slot, in order.
  Task generate_task(int t);

  // Decision context for the current slot; requires generate_task first.
  TaskContext context() const;

  // Fresh counterfactual delay draw for all nodes given current queues.
  // Consumes the stream; step() uses peek_realization() instead so the
  // slot's draw happens once.
  TaskRealization realize_delays(int t, double length_kb,
                                 double complexity);

  // The current slot's realization, drawn on first call and cached.
  // Non-causal callers (the greedy oracle) may look before deciding.
  const TaskRealization& peek_realization();

  // Executes the slot: enqueues the chosen node's task for delayed
  // feedback (censoring it if it exceeds tau_max), evolves queues,
  // applies any breakpoint due at t+1, and returns the outcome with the
  // feedbacks that arrived during this slot. Throws std::out_of_range
  // past the horizon.
  SlotOutcome step(int chosen);

  // Multiplies or divides one node's CPU capability by the configured
  // factor and refreshes its delay expectations.
  void apply_breakpoint(int node, BreakDirection direction);

  // Oracle expectation of the latency of a length-L task on `node` right
  // now. Drives the greedy-expected reference and the regret metrics.
  double true_expected_latency(int t, double length_kb, int node) const;

  // true_expected_latency for every node at once.
  std::vector<double> expected_latencies(double length_kb) const;

 private:
  struct PendingFeedback {
    int issue_slot = 0;
    int receipt_slot = 0;
    CompletedFeedback feedback;
  };

  void build_schedule();
  double service_rate(const NodeTruth& node) const;
  double mean_complexity() const {
    return 0.5 * (config_.complexity.lo + config_.complexity.hi);
  }
  void refresh_expectations(NodeTruth& node) const;

  EnvConfig config_;
  SplitMix64 rng_;
  std::vector<NodeTruth> nodes_;
  std::vector<Breakpoint> schedule_;
  std::size_t next_breakpoint_ = 0;
  int t_ = 1;
  std::optional<Task> task_;
  std::optional<TaskRealization> realization_;
  std::deque<PendingFeedback> pending_;
};

}  // namespace todsim

#endif  // TODSIM_FOG_ENV_HPP
