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

#ifndef TODSIM_ERRORS_HPP
#define TODSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace todsim {

// Constructor/parameter validation failed.
struct InvalidConfig : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A feedback whose receipt slot already passed was handed to the learner.
struct StaleFeedback : std::logic_error {
  using std::logic_error::logic_error;
};

// The discount factor violates the feasibility condition of the bound.
struct InfeasibleGamma : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Experiment specs combined into one comparison disagree on env/seeds.
struct MismatchedConfig : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace todsim

#endif  // TODSIM_ERRORS_HPP
