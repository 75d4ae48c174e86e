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

#ifndef TODSIM_CSV_HPP
#define TODSIM_CSV_HPP

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

namespace todsim {

// Shortest round-trip decimal representation. Locale-free and
// deterministic, which keeps emitted CSV byte-stable.
inline void append_num(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

inline void append_num(std::string& out, std::int64_t v) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

inline void append_num(std::string& out, std::uint64_t v) {
  char buf[24];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

inline void append_num(std::string& out, int v) {
  append_num(out, static_cast<std::int64_t>(v));
}

inline std::string num_to_string(double v) {
  std::string s;
  append_num(s, v);
  return s;
}

}  // namespace todsim

#endif  // TODSIM_CSV_HPP
