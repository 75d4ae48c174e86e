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

#include "todsim/analysis.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "todsim/errors.hpp"

namespace todsim {

double recommended_gamma(double upsilon, double horizon, int tau_max) {
  if (!(upsilon > 0.0) || !(upsilon <= horizon)) {
    throw std::invalid_argument(
        "recommended_gamma: upsilon must lie in (0, horizon]");
  }
  if (tau_max < 1) {
    throw std::invalid_argument("recommended_gamma: tau_max must be >= 1");
  }
  const double gamma =
      1.0 - std::sqrt(upsilon / horizon) / (4.0 * tau_max);
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("recommended_gamma: result outside (0,1)");
  }
  return gamma;
}

double feasibility_lhs(double gamma, int tau_max) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("feasibility_lhs: gamma must lie in (0,1)");
  }
  const double one_minus = 1.0 - gamma;
  return std::pow(gamma, tau_max) *
         (1.0 - std::pow(gamma, 1.0 / one_minus)) / one_minus;
}

bool gamma_feasible(double gamma, int tau_max) {
  return feasibility_lhs(gamma, tau_max) > std::numbers::e;
}

BoundBreakdown regret_bound(const BoundInputs& inputs) {
  if (!(inputs.xi > 0.5)) {
    throw std::invalid_argument("regret_bound: xi must exceed 1/2");
  }
  if (!(inputs.delta_mu > 0.0)) {
    throw std::invalid_argument("regret_bound: delta_mu must be positive");
  }
  if (inputs.tau_max < 1 || !(inputs.horizon >= 1.0) ||
      !(inputs.upsilon >= 0.0)) {
    throw std::invalid_argument("regret_bound: bad horizon inputs");
  }
  if (!gamma_feasible(inputs.gamma, inputs.tau_max)) {
    throw InfeasibleGamma(
        "regret_bound: gamma fails the feasibility condition");
  }

  const double gamma = inputs.gamma;
  const double tau = static_cast<double>(inputs.tau_max);
  const double one_minus = 1.0 - gamma;
  const double log_gamma = std::log(gamma);

  // B(gamma): the stationary estimation-error contribution.
  const double log_shrink = tau * log_gamma + std::log(one_minus);
  const double scaled =
      std::ceil(inputs.horizon * one_minus) / (inputs.horizon * one_minus);
  const double gamma_window = std::exp(-log_gamma / one_minus);
  const double b_value =
      (-16.0 * tau * tau * inputs.xi * log_shrink /
           (inputs.delta_mu * inputs.delta_mu) +
       tau) *
          scaled * gamma_window +
      2.0 / std::pow(gamma, tau) * (tau * log_gamma - std::log(one_minus));

  BoundBreakdown out;
  out.warm_term = 1.0;
  out.stationary_term = inputs.horizon * one_minus * b_value;
  out.tail_term = 2.0 / one_minus;
  out.b_value = b_value;

  // C(gamma): slots of poor estimation after each abrupt change. Only
  // needed when breakpoints exist; its log demands n_k > 1.
  if (inputs.upsilon > 0.0) {
    if (!(inputs.n_k > 1.0)) {
      throw std::invalid_argument(
          "regret_bound: n_k must exceed 1 when upsilon > 0");
    }
    const double c_value =
        std::log(one_minus * inputs.xi * std::log(inputs.n_k)) / log_gamma +
        tau;
    out.c_value = c_value;
    out.breakpoint_term = inputs.upsilon * c_value;
  }

  out.total =
      out.warm_term + out.stationary_term + out.breakpoint_term + out.tail_term;
  return out;
}

std::vector<std::int64_t> count_suboptimal_pulls(const RunHistory& history) {
  std::vector<std::int64_t> counts(
      static_cast<std::size_t>(history.node_count), 0);
  for (const SlotRecord& slot : history.slots) {
    if (slot.chosen != slot.opt_expected) {
      counts[static_cast<std::size_t>(slot.chosen - 1)] += 1;
    }
  }
  return counts;
}

std::vector<double> pseudo_regret(const RunHistory& history,
                                  RegretReference reference) {
  std::vector<double> series;
  series.reserve(history.slots.size());
  double cumulative = 0.0;
  for (std::size_t i = 0; i < history.slots.size(); ++i) {
    const SlotRecord& slot = history.slots[i];
    const double ref =
        reference == RegretReference::expected
            ? slot.mu[static_cast<std::size_t>(slot.opt_expected - 1)]
            : slot.u[static_cast<std::size_t>(slot.opt_realized - 1)];
    cumulative += slot.latency - ref;
    series.push_back(cumulative / static_cast<double>(i + 1));
  }
  return series;
}

std::vector<double> success_ratio(const RunHistory& history, int tau_max) {
  std::vector<double> series;
  series.reserve(history.slots.size());
  std::int64_t successes = 0;
  for (std::size_t i = 0; i < history.slots.size(); ++i) {
    if (history.slots[i].latency <= tau_max) ++successes;
    series.push_back(static_cast<double>(successes) /
                     static_cast<double>(i + 1));
  }
  return series;
}

std::vector<std::pair<double, double>> latency_cdf(
    const RunHistory& history, std::span<const double> grid) {
  assert(std::is_sorted(grid.begin(), grid.end()));
  std::vector<double> finished;
  finished.reserve(history.slots.size());
  for (const SlotRecord& slot : history.slots) {
    if (slot.success) finished.push_back(slot.latency);
  }
  std::sort(finished.begin(), finished.end());

  std::vector<std::pair<double, double>> cdf;
  cdf.reserve(grid.size());
  const double total = static_cast<double>(history.slots.size());
  for (double x : grid) {
    const auto upper =
        std::upper_bound(finished.begin(), finished.end(), x);
    const double count =
        static_cast<double>(std::distance(finished.begin(), upper));
    cdf.emplace_back(x, total > 0.0 ? count / total : 0.0);
  }
  return cdf;
}

std::vector<std::optional<double>> measure_delta_mu(
    const RunHistory& history) {
  std::vector<std::optional<double>> gaps(
      static_cast<std::size_t>(history.node_count));
  for (const SlotRecord& slot : history.slots) {
    const double best = slot.mu[static_cast<std::size_t>(slot.opt_expected - 1)];
    for (int node = 1; node <= history.node_count; ++node) {
      if (node == slot.opt_expected) continue;
      const double gap = slot.mu[static_cast<std::size_t>(node - 1)] - best;
      auto& entry = gaps[static_cast<std::size_t>(node - 1)];
      if (!entry.has_value() || gap < *entry) entry = gap;
    }
  }
  return gaps;
}

}  // namespace todsim
