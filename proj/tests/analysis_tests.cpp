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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <optional>
#include <vector>

#include "todsim/analysis.hpp"
#include "todsim/errors.hpp"
#include "todsim/rng.hpp"

using namespace todsim;

namespace {

// Minimal two-node history row; latency is the chosen node's entry of u.
SlotRecord row(int t, int chosen, std::vector<double> mu,
               std::vector<double> u, int tau_max = 20) {
  SlotRecord r;
  r.t = t;
  r.chosen = chosen;
  r.mu = std::move(mu);
  r.u = std::move(u);
  r.latency = r.u[static_cast<std::size_t>(chosen - 1)];
  r.success = r.latency <= tau_max;
  int opt_e = 1;
  int opt_r = 1;
  for (int i = 2; i <= static_cast<int>(r.mu.size()); ++i) {
    if (r.mu[static_cast<std::size_t>(i - 1)] <
        r.mu[static_cast<std::size_t>(opt_e - 1)]) {
      opt_e = i;
    }
    if (r.u[static_cast<std::size_t>(i - 1)] <
        r.u[static_cast<std::size_t>(opt_r - 1)]) {
      opt_r = i;
    }
  }
  r.opt_expected = opt_e;
  r.opt_realized = opt_r;
  return r;
}

}  // namespace

TEST_CASE("recommended gamma reproduces its reference values") {
  const double g150 = recommended_gamma(150, 1e4, 20);
  const double g10 = recommended_gamma(10, 1e4, 20);
  CHECK(g150 == doctest::Approx(0.998469068910761).epsilon(1e-14));
  CHECK(g10 == doctest::Approx(0.999604715292479).epsilon(1e-14));
  CHECK(std::llround(g150 * 1e4) == 9985);
  CHECK(std::llround(g10 * 1e4) == 9996);

  CHECK(recommended_gamma(1e4, 1e4, 20) ==
        doctest::Approx(1.0 - 1.0 / 80.0).epsilon(1e-14));
  CHECK_THROWS_AS(recommended_gamma(0, 1e4, 20), std::invalid_argument);
  CHECK_THROWS_AS(recommended_gamma(2e4, 1e4, 20), std::invalid_argument);
  CHECK_THROWS_AS(recommended_gamma(100, 1e4, 0), std::invalid_argument);
}

TEST_CASE("recommended gamma lands in (0,1) across the input space") {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const double horizon = rng.next_uniform(1.0, 1e7);
    const double upsilon = rng.next_uniform(1e-6, 1.0) * horizon;
    const int tau = 1 + static_cast<int>(rng.next_below(500));
    const double gamma = recommended_gamma(upsilon, horizon, tau);
    CHECK(gamma > 0.0);
    CHECK(gamma < 1.0);
  }
}

TEST_CASE("gamma feasibility matches the high-precision inequality") {
  CHECK(feasibility_lhs(0.9985, 20) ==
        doctest::Approx(409.128449072).epsilon(1e-9));
  CHECK(gamma_feasible(0.9985, 20));
  CHECK(feasibility_lhs(0.98, 20) ==
        doctest::Approx(21.2242695129).epsilon(1e-9));
  CHECK(gamma_feasible(0.98, 20));
  CHECK(feasibility_lhs(0.5, 20) ==
        doctest::Approx(1.43051147461e-06).epsilon(1e-9));
  CHECK_FALSE(gamma_feasible(0.5, 20));
}

TEST_CASE("regret bound evaluates its closed form term by term") {
  CHECK_THROWS_AS(
      regret_bound(BoundInputs{0.5, 0.6, 20, 1e4, 150, 2.0, 10}),
      InfeasibleGamma);
  CHECK_THROWS_AS(
      regret_bound(BoundInputs{0.9985, 0.5, 20, 1e4, 150, 2.0, 10}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      regret_bound(BoundInputs{0.9985, 0.6, 20, 1e4, 150, 0.0, 10}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      regret_bound(BoundInputs{0.9985, 0.6, 20, 1e4, 150, 2.0, 1.0}),
      std::invalid_argument);

  // Values frozen from an independent long-double evaluation of the
  // bound, term by term, at gamma=0.9985, xi=0.6, tau=20, T=1e4, 150
  // breakpoints, gap 2, n_K=10.
  const BoundBreakdown out =
      regret_bound(BoundInputs{0.9985, 0.6, 20, 1e4, 150, 2.0, 10});
  CHECK(out.b_value == doctest::Approx(17126.9481435118).epsilon(1e-10));
  CHECK(out.c_value == doctest::Approx(4136.29858495472).epsilon(1e-10));
  CHECK(out.stationary_term ==
        doctest::Approx(256904.222152677).epsilon(1e-10));
  CHECK(out.breakpoint_term ==
        doctest::Approx(620444.787743208).epsilon(1e-10));
  CHECK(out.tail_term == doctest::Approx(1333.33333333333).epsilon(1e-10));
  CHECK(out.total == doctest::Approx(878683.343229218).epsilon(1e-10));
  CHECK(out.total > 0.0);

  // Without breakpoints the middle term drops exactly.
  const BoundBreakdown stationary =
      regret_bound(BoundInputs{0.9985, 0.6, 20, 1e4, 0, 2.0, 10});
  CHECK(stationary.breakpoint_term == 0.0);
  CHECK(stationary.total ==
        stationary.warm_term + stationary.stationary_term +
            stationary.tail_term);
}

TEST_CASE("regret bound shrinks as the gap grows") {
  double prev = std::numeric_limits<double>::infinity();
  for (double gap : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double total =
        regret_bound(BoundInputs{0.9985, 0.6, 20, 1e4, 150, gap, 10}).total;
    CHECK(total <= prev);
    prev = total;
  }
}

TEST_CASE("suboptimal pulls count chosen-but-not-best slots") {
  RunHistory always_best;
  always_best.node_count = 2;
  always_best.slots.push_back(row(1, 2, {5.0, 4.0}, {5.0, 4.0}));
  always_best.slots.push_back(row(2, 2, {5.0, 4.0}, {5.0, 4.0}));
  for (std::int64_t c : count_suboptimal_pulls(always_best)) CHECK(c == 0);

  RunHistory hist;
  hist.node_count = 2;
  hist.slots.push_back(row(1, 1, {5.0, 4.0}, {5.0, 4.0}));
  hist.slots.push_back(row(2, 2, {5.0, 4.0}, {5.0, 4.0}));
  hist.slots.push_back(row(3, 1, {5.0, 4.0}, {5.0, 4.0}));
  const auto counts = count_suboptimal_pulls(hist);
  CHECK(counts[0] == 2);
  CHECK(counts[1] == 0);

  // Partition identity: suboptimal plus optimal slots cover the run.
  SplitMix64 rng(5);
  RunHistory random;
  random.node_count = 3;
  std::int64_t optimal = 0;
  for (int t = 1; t <= 300; ++t) {
    std::vector<double> mu = {rng.next_uniform(1, 9), rng.next_uniform(1, 9),
                              rng.next_uniform(1, 9)};
    std::vector<double> u = mu;
    const int chosen = static_cast<int>(rng.next_below(3)) + 1;
    random.slots.push_back(row(t, chosen, mu, u));
    if (random.slots.back().chosen == random.slots.back().opt_expected) {
      ++optimal;
    }
  }
  const auto tail = count_suboptimal_pulls(random);
  std::int64_t suboptimal = 0;
  for (std::int64_t c : tail) suboptimal += c;
  CHECK(suboptimal + optimal == 300);
}

TEST_CASE("pseudo regret is the running average excess") {
  RunHistory hist;
  hist.node_count = 2;
  // Chosen node 2 with latencies 5, 6, 7 against an expected optimum 5.
  hist.slots.push_back(row(1, 2, {5.0, 6.0}, {9.0, 5.0}));
  hist.slots.push_back(row(2, 2, {5.0, 6.0}, {9.0, 6.0}));
  hist.slots.push_back(row(3, 2, {5.0, 6.0}, {9.0, 7.0}));
  const auto expected = pseudo_regret(hist, RegretReference::expected);
  REQUIRE(expected.size() == 3);
  CHECK(expected[0] == doctest::Approx(0.0));
  CHECK(expected[1] == doctest::Approx(0.5));
  CHECK(expected[2] == doctest::Approx(1.0));

  // The realized reference subtracts the per-slot minimum draw.
  const auto realized = pseudo_regret(hist, RegretReference::realized);
  CHECK(realized[0] == doctest::Approx(0.0));  // chose the realized best
}

TEST_CASE("success ratio series follows the cap") {
  RunHistory hist;
  hist.node_count = 2;
  hist.slots.push_back(row(1, 1, {1, 2}, {5.0, 9.0}));
  hist.slots.push_back(row(2, 1, {1, 2}, {25.0, 9.0}));
  hist.slots.push_back(row(3, 1, {1, 2}, {10.0, 9.0}));
  const auto series = success_ratio(hist, 20);
  REQUIRE(series.size() == 3);
  CHECK(series[0] == doctest::Approx(1.0));
  CHECK(series[1] == doctest::Approx(0.5));
  CHECK(series[2] == doctest::Approx(2.0 / 3.0));
  for (double v : series) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  const auto harsh = success_ratio(hist, 1);
  CHECK(harsh.back() == 0.0);
}

TEST_CASE("latency cdf counts finished tasks and is monotone") {
  RunHistory hist;
  hist.node_count = 1;
  for (double latency : {5.0, 25.0, 10.0}) {
    SlotRecord r = row(1, 1, {1.0}, {latency}, 100);  // all succeed
    hist.slots.push_back(r);
  }
  const std::vector<double> grid = {10.0, 20.0, 30.0};
  const auto cdf = latency_cdf(hist, grid);
  REQUIRE(cdf.size() == 3);
  CHECK(cdf[0].second == doctest::Approx(2.0 / 3.0));
  CHECK(cdf[1].second == doctest::Approx(2.0 / 3.0));
  CHECK(cdf[2].second == doctest::Approx(1.0));

  CHECK(latency_cdf(hist, {}).empty());

  // Failed tasks never land below a finite grid point.
  hist.slots[1].success = false;
  const auto censored = latency_cdf(hist, grid);
  CHECK(censored[2].second == doctest::Approx(2.0 / 3.0));

  SplitMix64 rng(9);
  RunHistory random;
  random.node_count = 1;
  for (int t = 1; t <= 200; ++t) {
    random.slots.push_back(row(t, 1, {1.0}, {rng.next_uniform(0, 60)}));
  }
  std::vector<double> wide;
  for (int i = 0; i <= 70; ++i) wide.push_back(i);
  const auto curve = latency_cdf(random, wide);
  for (std::size_t i = 1; i < curve.size(); ++i) {
    CHECK(curve[i].second >= curve[i - 1].second);
    CHECK(curve[i].second <= 1.0);
  }
}

TEST_CASE("delta mu is the minimal gap over suboptimal slots") {
  RunHistory hist;
  hist.node_count = 2;
  hist.slots.push_back(row(1, 1, {3.0, 5.0}, {3.0, 5.0}));
  hist.slots.push_back(row(2, 1, {4.0, 4.5}, {4.0, 4.5}));
  const auto gaps = measure_delta_mu(hist);
  REQUIRE(gaps.size() == 2);
  CHECK_FALSE(gaps[0].has_value());  // node 1 optimal throughout
  REQUIRE(gaps[1].has_value());
  CHECK(*gaps[1] == doctest::Approx(0.5));

  RunHistory flat;
  flat.node_count = 2;
  flat.slots.push_back(row(1, 1, {3.0, 4.0}, {3.0, 4.0}));
  flat.slots.push_back(row(2, 1, {6.0, 7.0}, {6.0, 7.0}));
  const auto equal = measure_delta_mu(flat);
  CHECK(*equal[1] == doctest::Approx(1.0));
}

TEST_CASE("cdf at the cap equals the final success ratio") {
  SplitMix64 rng(13);
  RunHistory hist;
  hist.node_count = 1;
  const int tau_max = 20;
  for (int t = 1; t <= 500; ++t) {
    hist.slots.push_back(row(t, 1, {1.0}, {rng.next_uniform(0, 40)}, tau_max));
  }
  const std::vector<double> cap_grid = {static_cast<double>(tau_max)};
  const auto cdf = latency_cdf(hist, cap_grid);
  const auto ratio = success_ratio(hist, tau_max);
  CHECK(cdf[0].second == doctest::Approx(ratio.back()));
}
