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

// Benchmark of the batch runner: serial reference loop versus the
// OpenMP-parallel path on identical jobs, with an equality check on
// every metric so the speedup never comes at the cost of determinism.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "todsim/config.hpp"
#include "todsim/harness.hpp"

using namespace todsim;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

bool same_results(const std::vector<RunMetrics>& a,
                  const std::vector<RunMetrics>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].mean_latency != b[i].mean_latency ||
        a[i].final_zeta_r != b[i].final_zeta_r ||
        a[i].final_zeta_p != b[i].final_zeta_p ||
        a[i].successes != b[i].successes ||
        a[i].cdf_counts != b[i].cdf_counts) {
      return false;
    }
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  int n_runs = 32;
  if (argc > 1) n_runs = std::atoi(argv[1]);
  if (n_runs < 1) n_runs = 1;

  const ExperimentSpec spec = paper_default_spec();
  const double gamma = resolve_gamma(spec);
  const std::vector<double> grid = default_latency_grid();

  std::vector<RunJob> jobs;
  jobs.reserve(static_cast<std::size_t>(n_runs));
  for (std::uint64_t seed : derive_seeds(2026, n_runs)) {
    RunJob job;
    job.env = spec.env;
    job.env.seed = seed;
    job.policy = PolicyKind::tod;
    job.gamma = gamma;
    job.xi = spec.xi;
    jobs.push_back(job);
  }

  std::cout << "batch of " << n_runs << " runs, horizon "
            << spec.env.horizon << ", " << spec.env.node_count << " nodes\n";

  auto start = std::chrono::steady_clock::now();
  const std::vector<RunMetrics> serial = run_batch(jobs, grid, 1);
  const double serial_s = seconds_since(start);
  std::cout << "serial reference: " << serial_s << " s ("
            << n_runs / serial_s << " runs/s)\n";

#ifdef _OPENMP
  const int threads = omp_get_max_threads();
#else
  const int threads = 1;
#endif
  start = std::chrono::steady_clock::now();
  const std::vector<RunMetrics> parallel = run_batch(jobs, grid, 0);
  const double parallel_s = seconds_since(start);
  std::cout << "parallel (" << threads << " threads): " << parallel_s
            << " s (" << n_runs / parallel_s << " runs/s)\n";
  std::cout << "speedup: " << serial_s / parallel_s << "x\n";

  if (!same_results(serial, parallel)) {
    std::cerr << "MISMATCH: parallel results differ from the serial "
                 "reference\n";
    return 1;
  }
  std::cout << "parallel results match the serial reference\n";
  return 0;
}
