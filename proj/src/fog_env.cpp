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

#include "todsim/fog_env.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "todsim/errors.hpp"
#include "todsim/util.hpp"

namespace todsim {

namespace {

void check_range(const Range& r, const char* name, double min_lo) {
  if (!(r.lo >= min_lo) || !(r.hi >= r.lo)) {
    throw InvalidConfig(std::string("env: bad range for ") + name);
  }
}

}  // namespace

void validate(const EnvConfig& config) {
  if (config.node_count < 2) {
    throw InvalidConfig("env: node_count must be at least 2");
  }
  if (config.horizon < 1) {
    throw InvalidConfig("env: horizon must be at least 1 slot");
  }
  if (!(config.slot_ms > 0.0)) {
    throw InvalidConfig("env: slot_ms must be positive");
  }
  if (config.tau_max < 1) {
    throw InvalidConfig("env: tau_max must be at least 1 slot");
  }
  check_range(config.length_kb, "length_kb", 1e-12);
  check_range(config.complexity, "complexity", 1e-12);
  check_range(config.cpu, "cpu", 1e-12);
  check_range(config.tx_slots_per_kb, "tx_slots_per_kb", 0.0);
  check_range(config.wait_factor, "wait_factor", 0.0);
  if (config.length_kb.hi * config.tx_slots_per_kb.hi > 1.0) {
    throw InvalidConfig(
        "env: max task length times max tx cost exceeds one slot");
  }
  if (!(config.breakpoints.factor > 1.0)) {
    throw InvalidConfig("env: breakpoint factor must exceed 1");
  }
  if (config.breakpoints.count < 0 ||
      config.breakpoints.count > config.horizon) {
    throw InvalidConfig("env: breakpoint count must lie in [0, horizon]");
  }
  if (config.breakpoints.count > 0 &&
      config.breakpoints.count > config.horizon - config.node_count) {
    throw InvalidConfig(
        "env: breakpoint count exceeds the slots available after warm-up");
  }
  if (!(config.queue.bg_prob >= 0.0 && config.queue.bg_prob <= 1.0)) {
    throw InvalidConfig("env: queue bg_prob must lie in [0,1]");
  }
  check_range(config.queue.bg_size_kb, "queue bg_size_kb", 0.0);
  check_range(config.queue.init_kb, "queue init_kb", 0.0);
  if (!(config.queue.max_kb > 0.0) ||
      config.queue.init_kb.hi > config.queue.max_kb) {
    throw InvalidConfig("env: queue max_kb must be positive and at least "
                        "the initial fill");
  }
  if (!(config.queue.service_coeff >= 0.0) ||
      !(config.queue.service_floor >= 0.0)) {
    throw InvalidConfig("env: queue service rates must be non-negative");
  }
}

Env::Env(EnvConfig config)
    : config_(config), rng_(derive_stream(config.seed, 0)) {
  validate(config_);
  const int k = config_.node_count;
  const double midpoint = std::sqrt(config_.cpu.lo * config_.cpu.hi);
  nodes_.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    NodeTruth& node = nodes_[static_cast<std::size_t>(i)];
    node.index = i + 1;
    node.cpu = rng_.next_uniform(config_.cpu.lo, config_.cpu.hi);
    // Nodes alternate between their draw and one factor away as
    // breakpoints strike; starting half of them in the flipped state
    // makes the capability process stationary from the first slot.
    if (config_.breakpoints.count > 0 && rng_.next_bernoulli(0.5)) {
      node.cpu = node.cpu < midpoint ? node.cpu * config_.breakpoints.factor
                                     : node.cpu / config_.breakpoints.factor;
    }
    node.queue_kb = rng_.next_uniform(config_.queue.init_kb.lo,
                                      config_.queue.init_kb.hi);
  }
  // The local node processes in place: no transmission cost.
  for (int i = 0; i < k - 1; ++i) {
    nodes_[static_cast<std::size_t>(i)].tx =
        rng_.next_uniform(config_.tx_slots_per_kb.lo,
                          config_.tx_slots_per_kb.hi);
  }
  nodes_.back().tx = 0.0;
  for (NodeTruth& node : nodes_) refresh_expectations(node);
  build_schedule();
}

double Env::service_rate(const NodeTruth& node) const {
  return config_.queue.service_floor +
         config_.queue.service_coeff * node.cpu;
}

void Env::refresh_expectations(NodeTruth& node) const {
  // Both delay rates scale with the complexity mean over the node's
  // capability, so a breakpoint shifts them together.
  node.mu_p = mean_complexity() / node.cpu;
  node.mu_w = 0.5 * (config_.wait_factor.lo + config_.wait_factor.hi) *
              mean_complexity() / node.cpu;
}

void Env::build_schedule() {
  const int count = config_.breakpoints.count;
  schedule_.clear();
  next_breakpoint_ = 0;
  if (count == 0) return;

  // Distinct change slots, uniform over the post-warm-up horizon.
  const int k = config_.node_count;
  std::vector<int> population(
      static_cast<std::size_t>(config_.horizon - k));
  std::iota(population.begin(), population.end(), k + 1);
  for (int j = 0; j < count; ++j) {
    const std::uint64_t span = population.size() - static_cast<std::size_t>(j);
    const std::size_t pick =
        static_cast<std::size_t>(j) +
        static_cast<std::size_t>(rng_.next_below(span));
    std::swap(population[static_cast<std::size_t>(j)], population[pick]);
  }
  population.resize(static_cast<std::size_t>(count));
  std::sort(population.begin(), population.end());

  schedule_.reserve(static_cast<std::size_t>(count));
  for (int slot : population) {
    Breakpoint bp;
    bp.slot = slot;
    bp.node = static_cast<int>(rng_.next_below(
                  static_cast<std::uint64_t>(k))) + 1;
    schedule_.push_back(bp);
  }

  // Directions keep each node's capability bounded: a node below the
  // geometric midpoint of the capability range moves up, one above it
  // moves down, so every node oscillates between its draw and one factor
  // away. The trajectory only changes at breakpoints, so it can be
  // resolved here.
  const double midpoint = std::sqrt(config_.cpu.lo * config_.cpu.hi);
  std::vector<double> cpu(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) cpu[i] = nodes_[i].cpu;
  for (Breakpoint& bp : schedule_) {
    const std::size_t i = static_cast<std::size_t>(bp.node - 1);
    bp.direction = cpu[i] < midpoint ? BreakDirection::multiply
                                     : BreakDirection::divide;
    cpu[i] = bp.direction == BreakDirection::multiply
                 ? cpu[i] * config_.breakpoints.factor
                 : cpu[i] / config_.breakpoints.factor;
  }
}

Task Env::generate_task(int t) {
  if (t != t_) {
    throw std::logic_error("generate_task: expected slot " +
                           std::to_string(t_) + ", got " + std::to_string(t));
  }
  if (t_ > config_.horizon) {
    throw std::out_of_range("generate_task: past the horizon");
  }
  if (task_.has_value()) {
    throw std::logic_error("generate_task: slot already has a task");
  }
  Task task;
  task.length_kb = rng_.next_uniform(config_.length_kb.lo,
                                     config_.length_kb.hi);
  task.complexity = rng_.next_uniform(config_.complexity.lo,
                                      config_.complexity.hi);
  task_ = task;
  return task;
}

TaskContext Env::context() const {
  if (!task_.has_value()) {
    throw std::logic_error("context: no task generated for this slot");
  }
  TaskContext ctx;
  ctx.task_id = t_;
  ctx.length_kb = task_->length_kb;
  ctx.tx_cost.reserve(nodes_.size());
  ctx.queue_kb.reserve(nodes_.size());
  for (const NodeTruth& node : nodes_) {
    ctx.tx_cost.push_back(node.tx);
    ctx.queue_kb.push_back(node.queue_kb);
  }
  return ctx;
}

TaskRealization Env::realize_delays(int t, double length_kb,
                                    double complexity) {
  assert(t == t_);
  (void)t;
  TaskRealization real;
  const std::size_t k = nodes_.size();
  real.wait_per_kb.resize(k);
  real.proc_per_kb.resize(k);
  real.latency.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const NodeTruth& node = nodes_[i];
    const double jitter =
        rng_.next_uniform(config_.wait_factor.lo, config_.wait_factor.hi);
    real.wait_per_kb[i] = jitter * mean_complexity() / node.cpu;
    real.proc_per_kb[i] = complexity / node.cpu;
    real.latency[i] = length_kb * node.tx + node.queue_kb * real.wait_per_kb[i] +
                      length_kb * real.proc_per_kb[i];
  }
  return real;
}

const TaskRealization& Env::peek_realization() {
  if (!task_.has_value()) {
    throw std::logic_error("peek_realization: no task generated");
  }
  if (!realization_.has_value()) {
    realization_ = realize_delays(t_, task_->length_kb, task_->complexity);
  }
  return *realization_;
}

SlotOutcome Env::step(int chosen) {
  if (t_ > config_.horizon) {
    throw std::out_of_range("step: past the horizon");
  }
  if (chosen < 1 || chosen > config_.node_count) {
    throw std::invalid_argument("step: chosen node out of range");
  }
  if (!task_.has_value()) {
    throw std::logic_error("step: no task generated for this slot");
  }
  const int t = t_;
  const Task task = *task_;
  const std::size_t chosen_ix = static_cast<std::size_t>(chosen - 1);

  SlotOutcome outcome;
  outcome.queues.reserve(nodes_.size());
  for (const NodeTruth& node : nodes_) outcome.queues.push_back(node.queue_kb);

  // All counterfactual draws happen before the decision is read.
  outcome.realization = peek_realization();
  const TaskRealization& real = outcome.realization;

  outcome.opt_expected = argmin_node(expected_latencies(task.length_kb));
  outcome.opt_realized = argmin_node(real.latency);
  outcome.realized_latency = real.latency[chosen_ix];
  outcome.success = outcome.realized_latency <= config_.tau_max;

  const double queue_at_issue = nodes_[chosen_ix].queue_kb;
  if (outcome.success || config_.censor_timeouts) {
    // Feedback carries the task's per-KB rates. A failed task reports the
    // same rates as a deadline progress report (the queue and the task
    // advanced at those rates until the cutoff), delivered at the
    // deadline itself; that keeps missing feedbacks per node bounded by
    // tau_max while telling the learner how slow the node really was.
    const int receipt =
        outcome.success
            ? t + static_cast<int>(std::ceil(outcome.realized_latency))
            : t + config_.tau_max;
    const double tau_w = queue_at_issue * real.wait_per_kb[chosen_ix];
    const double tau_p = task.length_kb * real.proc_per_kb[chosen_ix];
    const auto [w_obs, p_obs] =
        normalize_feedback(tau_w, tau_p, queue_at_issue, task.length_kb);
    PendingFeedback pf;
    pf.issue_slot = t;
    pf.receipt_slot = receipt;
    pf.feedback = CompletedFeedback{t, chosen, receipt, w_obs, p_obs,
                                    queue_at_issue > 0.0};
    pending_.push_back(pf);
  }
  // Otherwise the task is discarded outright and never reports back.

  for (auto it = pending_.begin(); it != pending_.end();) {
    if (it->receipt_slot == t + 1) {
      outcome.completions.push_back(it->feedback);
      it = pending_.erase(it);
    } else {
      ++it;
    }
  }

  // Queue evolution: background traffic plus the offloaded task against
  // the node's drain rate, within the finite buffer.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    NodeTruth& node = nodes_[i];
    double inflow = 0.0;
    if (rng_.next_bernoulli(config_.queue.bg_prob)) {
      inflow += rng_.next_uniform(config_.queue.bg_size_kb.lo,
                                  config_.queue.bg_size_kb.hi);
    }
    if (i == chosen_ix) inflow += task.length_kb;
    node.queue_kb = std::min(
        config_.queue.max_kb,
        std::max(0.0, node.queue_kb + inflow - service_rate(node)));
  }

  while (next_breakpoint_ < schedule_.size() &&
         schedule_[next_breakpoint_].slot == t + 1) {
    const Breakpoint& bp = schedule_[next_breakpoint_];
    apply_breakpoint(bp.node, bp.direction);
    ++next_breakpoint_;
  }

  t_ = t + 1;
  task_.reset();
  realization_.reset();
  return outcome;
}

void Env::apply_breakpoint(int node, BreakDirection direction) {
  if (node < 1 || node > config_.node_count) {
    throw std::invalid_argument("apply_breakpoint: node out of range");
  }
  NodeTruth& n = nodes_[static_cast<std::size_t>(node - 1)];
  n.cpu = direction == BreakDirection::multiply
              ? n.cpu * config_.breakpoints.factor
              : n.cpu / config_.breakpoints.factor;
  refresh_expectations(n);
}

double Env::true_expected_latency(int t, double length_kb, int node) const {
  assert(t == t_);
  (void)t;
  const NodeTruth& n = nodes_[static_cast<std::size_t>(node - 1)];
  return length_kb * n.tx + n.queue_kb * n.mu_w + length_kb * n.mu_p;
}

std::vector<double> Env::expected_latencies(double length_kb) const {
  std::vector<double> mu;
  mu.reserve(nodes_.size());
  for (const NodeTruth& node : nodes_) {
    mu.push_back(length_kb * node.tx + node.queue_kb * node.mu_w +
                 length_kb * node.mu_p);
  }
  return mu;
}

}  // namespace todsim
