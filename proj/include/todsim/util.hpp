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

#ifndef TODSIM_UTIL_HPP
#define TODSIM_UTIL_HPP

#include <cstddef>
#include <span>

namespace todsim {

// Index of the maximum element, ties broken by lowest index.
// Returned as a 1-based node id.
inline int argmax_node(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return static_cast<int>(best) + 1;
}

// Index of the minimum element, ties broken by lowest index. 1-based.
inline int argmin_node(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  return static_cast<int>(best) + 1;
}

}  // namespace todsim

#endif  // TODSIM_UTIL_HPP
