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

#ifndef TODSIM_CONFIG_HPP
#define TODSIM_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "todsim/fog_env.hpp"

namespace todsim {

enum class PolicyKind { tod, greedy, round_robin, iir };

std::string_view to_string(PolicyKind kind);
std::optional<PolicyKind> parse_policy(std::string_view name);

struct GammaMode {
  enum class Kind { fixed, automatic, sweep };
  Kind kind = Kind::automatic;
  double value = 0.0;           // fixed only
  std::vector<double> grid;     // sweep only
  bool operator==(const GammaMode&) const = default;
};

struct RhoMode {
  bool search = true;  // grid-search the exploration fraction
  double value = 0.1;  // used when search is off
  std::vector<double> grid = {0.02, 0.05, 0.1, 0.2, 0.3};
  bool operator==(const RhoMode&) const = default;
};

// A full experiment: environment, policy selection, and run plumbing.
// The per-run environment seed is taken from `seeds`, not env.seed.
struct ExperimentSpec {
  EnvConfig env;
  PolicyKind policy = PolicyKind::tod;
  GammaMode gamma;
  double xi = 0.6;
  RhoMode rho;
  std::vector<std::uint64_t> seeds = {1};
  std::string output_dir = "out";
  int downsample = 10;  // per-slot series keep every Nth row
  int jobs = 0;         // parallel runs; 0 = hardware, 1 = serial
  bool operator==(const ExperimentSpec&) const = default;
};

// The simulation setup used throughout: ten nodes, 10^4 slots, 20 ms
// slots, Unif(1,15) KB tasks, Unif(1,10) complexity and CPU draws,
// tau_max 20, xi 0.6, 150 breakpoints of factor 16.
ExperimentSpec paper_default_spec();

// Throws InvalidConfig on syntax errors, unknown keys, or bad values.
ExperimentSpec parse_spec(std::string_view text);
ExperimentSpec load_spec(const std::filesystem::path& path);

// Canonical text form; parse(serialize(s)) == s.
std::string serialize_spec(const ExperimentSpec& spec);

}  // namespace todsim

#endif  // TODSIM_CONFIG_HPP
