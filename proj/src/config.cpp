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

#include "todsim/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "todsim/csv.hpp"
#include "todsim/errors.hpp"

namespace todsim {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == ',')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != ',') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view v, const std::string& key) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    throw InvalidConfig("config: bad number for '" + key + "'");
  }
  return out;
}

std::int64_t parse_int(std::string_view v, const std::string& key) {
  std::int64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    throw InvalidConfig("config: bad integer for '" + key + "'");
  }
  return out;
}

std::uint64_t parse_u64(std::string_view v, const std::string& key) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    throw InvalidConfig("config: bad unsigned integer for '" + key + "'");
  }
  return out;
}

bool parse_bool(std::string_view v, const std::string& key) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw InvalidConfig("config: expected true/false for '" + key + "'");
}

Range parse_range(std::string_view v, const std::string& key) {
  const auto parts = split_ws(v);
  if (parts.size() != 2) {
    throw InvalidConfig("config: '" + key + "' needs two numbers");
  }
  return Range{parse_double(parts[0], key), parse_double(parts[1], key)};
}

std::vector<double> parse_doubles(std::string_view v, const std::string& key) {
  std::vector<double> out;
  for (auto part : split_ws(v)) out.push_back(parse_double(part, key));
  return out;
}

void append_range(std::string& out, const Range& r) {
  append_num(out, r.lo);
  out += ' ';
  append_num(out, r.hi);
}

}  // namespace

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::tod: return "tod";
    case PolicyKind::greedy: return "greedy";
    case PolicyKind::round_robin: return "round_robin";
    case PolicyKind::iir: return "iir";
  }
  return "?";
}

std::optional<PolicyKind> parse_policy(std::string_view name) {
  if (name == "tod") return PolicyKind::tod;
  if (name == "greedy") return PolicyKind::greedy;
  if (name == "round_robin" || name == "round-robin") {
    return PolicyKind::round_robin;
  }
  if (name == "iir") return PolicyKind::iir;
  return std::nullopt;
}

ExperimentSpec paper_default_spec() {
  return ExperimentSpec{};  // the defaults above are that setup
}

ExperimentSpec parse_spec(std::string_view text) {
  ExperimentSpec spec;
  spec.rho.grid.clear();  // filled from file or re-defaulted below
  bool rho_grid_seen = false;

  std::string section;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw InvalidConfig("config: unterminated section at line " +
                            std::to_string(line_no));
      }
      section = std::string(line.substr(1, line.size() - 2));
      if (section != "env" && section != "policy" && section != "run") {
        throw InvalidConfig("config: unknown section [" + section + "]");
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidConfig("config: expected key = value at line " +
                          std::to_string(line_no));
    }
    const std::string key = std::string(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const std::string qualified = section + "." + key;

    if (section == "env") {
      EnvConfig& env = spec.env;
      if (key == "nodes") env.node_count = static_cast<int>(parse_int(value, qualified));
      else if (key == "horizon") env.horizon = static_cast<int>(parse_int(value, qualified));
      else if (key == "slot_ms") env.slot_ms = parse_double(value, qualified);
      else if (key == "length_kb") env.length_kb = parse_range(value, qualified);
      else if (key == "complexity") env.complexity = parse_range(value, qualified);
      else if (key == "cpu") env.cpu = parse_range(value, qualified);
      else if (key == "tx_slots_per_kb") env.tx_slots_per_kb = parse_range(value, qualified);
      else if (key == "wait_factor") env.wait_factor = parse_range(value, qualified);
      else if (key == "breakpoints") env.breakpoints.count = static_cast<int>(parse_int(value, qualified));
      else if (key == "breakpoint_factor") env.breakpoints.factor = parse_double(value, qualified);
      else if (key == "queue_bg_prob") env.queue.bg_prob = parse_double(value, qualified);
      else if (key == "queue_bg_kb") env.queue.bg_size_kb = parse_range(value, qualified);
      else if (key == "queue_init_kb") env.queue.init_kb = parse_range(value, qualified);
      else if (key == "queue_max_kb") env.queue.max_kb = parse_double(value, qualified);
      else if (key == "queue_service_floor") env.queue.service_floor = parse_double(value, qualified);
      else if (key == "queue_service_coeff") env.queue.service_coeff = parse_double(value, qualified);
      else if (key == "tau_max") env.tau_max = static_cast<int>(parse_int(value, qualified));
      else if (key == "censor_timeouts") env.censor_timeouts = parse_bool(value, qualified);
      else if (key == "seed") env.seed = parse_u64(value, qualified);
      else throw InvalidConfig("config: unknown key '" + qualified + "'");
    } else if (section == "policy") {
      if (key == "name") {
        const auto kind = parse_policy(value);
        if (!kind) throw InvalidConfig("config: unknown policy '" + std::string(value) + "'");
        spec.policy = *kind;
      } else if (key == "gamma") {
        if (value == "auto") {
          spec.gamma.kind = GammaMode::Kind::automatic;
        } else if (value == "sweep") {
          spec.gamma.kind = GammaMode::Kind::sweep;
        } else {
          spec.gamma.kind = GammaMode::Kind::fixed;
          spec.gamma.value = parse_double(value, qualified);
        }
      } else if (key == "gamma_grid") {
        spec.gamma.grid = parse_doubles(value, qualified);
      } else if (key == "xi") {
        spec.xi = parse_double(value, qualified);
      } else if (key == "iir_rho") {
        if (value == "search") {
          spec.rho.search = true;
        } else {
          spec.rho.search = false;
          spec.rho.value = parse_double(value, qualified);
        }
      } else if (key == "iir_rho_grid") {
        spec.rho.grid = parse_doubles(value, qualified);
        rho_grid_seen = true;
      } else {
        throw InvalidConfig("config: unknown key '" + qualified + "'");
      }
    } else if (section == "run") {
      if (key == "seeds") {
        spec.seeds.clear();
        for (auto part : split_ws(value)) {
          spec.seeds.push_back(parse_u64(part, qualified));
        }
      } else if (key == "out") {
        spec.output_dir = std::string(value);
      } else if (key == "downsample") {
        spec.downsample = static_cast<int>(parse_int(value, qualified));
      } else if (key == "jobs") {
        spec.jobs = static_cast<int>(parse_int(value, qualified));
      } else {
        throw InvalidConfig("config: unknown key '" + qualified + "'");
      }
    } else {
      throw InvalidConfig("config: key outside any section at line " +
                          std::to_string(line_no));
    }
  }

  if (!rho_grid_seen) spec.rho.grid = RhoMode{}.grid;
  if (spec.seeds.empty()) {
    throw InvalidConfig("config: at least one seed is required");
  }
  for (double g : spec.gamma.grid) {
    if (!(g > 0.0 && g < 1.0)) {
      throw InvalidConfig("config: gamma grid values must lie in (0,1)");
    }
  }
  if (spec.downsample < 1) {
    throw InvalidConfig("config: downsample must be at least 1");
  }
  return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("config: cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

std::string serialize_spec(const ExperimentSpec& spec) {
  std::string out;
  out += "[env]\n";
  out += "nodes = "; append_num(out, spec.env.node_count); out += '\n';
  out += "horizon = "; append_num(out, spec.env.horizon); out += '\n';
  out += "slot_ms = "; append_num(out, spec.env.slot_ms); out += '\n';
  out += "length_kb = "; append_range(out, spec.env.length_kb); out += '\n';
  out += "complexity = "; append_range(out, spec.env.complexity); out += '\n';
  out += "cpu = "; append_range(out, spec.env.cpu); out += '\n';
  out += "tx_slots_per_kb = "; append_range(out, spec.env.tx_slots_per_kb); out += '\n';
  out += "wait_factor = "; append_range(out, spec.env.wait_factor); out += '\n';
  out += "breakpoints = "; append_num(out, spec.env.breakpoints.count); out += '\n';
  out += "breakpoint_factor = "; append_num(out, spec.env.breakpoints.factor); out += '\n';
  out += "queue_bg_prob = "; append_num(out, spec.env.queue.bg_prob); out += '\n';
  out += "queue_bg_kb = "; append_range(out, spec.env.queue.bg_size_kb); out += '\n';
  out += "queue_init_kb = "; append_range(out, spec.env.queue.init_kb); out += '\n';
  out += "queue_max_kb = "; append_num(out, spec.env.queue.max_kb); out += '\n';
  out += "queue_service_floor = "; append_num(out, spec.env.queue.service_floor); out += '\n';
  out += "queue_service_coeff = "; append_num(out, spec.env.queue.service_coeff); out += '\n';
  out += "tau_max = "; append_num(out, spec.env.tau_max); out += '\n';
  out += "censor_timeouts = ";
  out += spec.env.censor_timeouts ? "true" : "false";
  out += '\n';
  out += "seed = "; append_num(out, spec.env.seed); out += '\n';

  out += "\n[policy]\n";
  out += "name = ";
  out += to_string(spec.policy);
  out += '\n';
  out += "gamma = ";
  switch (spec.gamma.kind) {
    case GammaMode::Kind::automatic: out += "auto"; break;
    case GammaMode::Kind::sweep: out += "sweep"; break;
    case GammaMode::Kind::fixed: append_num(out, spec.gamma.value); break;
  }
  out += '\n';
  if (!spec.gamma.grid.empty()) {
    out += "gamma_grid =";
    for (double g : spec.gamma.grid) {
      out += ' ';
      append_num(out, g);
    }
    out += '\n';
  }
  out += "xi = "; append_num(out, spec.xi); out += '\n';
  out += "iir_rho = ";
  if (spec.rho.search) {
    out += "search";
  } else {
    append_num(out, spec.rho.value);
  }
  out += '\n';
  out += "iir_rho_grid =";
  for (double r : spec.rho.grid) {
    out += ' ';
    append_num(out, r);
  }
  out += '\n';

  out += "\n[run]\n";
  out += "seeds =";
  for (std::uint64_t s : spec.seeds) {
    out += ' ';
    append_num(out, s);
  }
  out += '\n';
  out += "out = " + spec.output_dir + '\n';
  out += "downsample = "; append_num(out, spec.downsample); out += '\n';
  out += "jobs = "; append_num(out, spec.jobs); out += '\n';
  return out;
}

}  // namespace todsim
