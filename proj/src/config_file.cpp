/*
   Copyright 2026 The csamimo Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "csamimo/config_file.hpp"

#include <charconv>
#include <fstream>

#include <fmt/format.h>

#include "csamimo/error.hpp"

namespace csamimo {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T to_number(std::string_view key, std::string_view text) {
  T value{};
  text = trim(text);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kInvalidConfig, fmt::format("{}: cannot parse '{}'", key, text));
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  while (true) {
    const auto pos = text.find(sep);
    parts.push_back(trim(text.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  return parts;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open config file '{}'", path));
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    view = trim(view.substr(0, view.find('#')));
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidConfig,
                  fmt::format("{}:{}: expected 'key = value'", path, line_no));
    }
    entries.emplace_back(std::string(trim(view.substr(0, eq))),
                         std::string(trim(view.substr(eq + 1))));
  }
  return entries;
}

std::vector<int> parse_int_list(std::string_view text) {
  text = trim(text);
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) {
      throw Error(ErrorCode::kInvalidConfig, fmt::format("range '{}' is not start:stop:step", text));
    }
    const int start = to_number<int>("range", parts[0]);
    const int stop = to_number<int>("range", parts[1]);
    const int step = to_number<int>("range", parts[2]);
    if (step <= 0 || stop < start) {
      throw Error(ErrorCode::kInvalidConfig, fmt::format("range '{}' is empty", text));
    }
    std::vector<int> values;
    for (int v = start; v <= stop; v += step) values.push_back(v);
    return values;
  }
  std::vector<int> values;
  for (auto part : split(text, ',')) {
    if (!part.empty()) values.push_back(to_number<int>("list", part));
  }
  return values;
}

std::vector<Algorithm> parse_algorithm_list(std::string_view text) {
  std::vector<Algorithm> algorithms;
  for (auto part : split(text, ',')) {
    if (!part.empty()) algorithms.push_back(parse_algorithm(part));
  }
  return algorithms;
}

void apply_setting(SweepSpec& spec, std::string_view key, std::string_view value) {
  SystemConfig& c = spec.config;
  if (key == "k_a") {
    c.k_a = to_number<int>(key, value);
  } else if (key == "m") {
    c.m = to_number<int>(key, value);
  } else if (key == "n_slots") {
    c.n_slots = to_number<int>(key, value);
  } else if (key == "n_p") {
    c.n_p = to_number<int>(key, value);
  } else if (key == "n_d") {
    c.n_d = to_number<int>(key, value);
  } else if (key == "r") {
    c.r = to_number<int>(key, value);
  } else if (key == "noise_var") {
    c.noise_var = to_number<double>(key, value);
  } else if (key == "channel_var") {
    c.channel_var = to_number<double>(key, value);
  } else if (key == "t") {
    c.t = to_number<int>(key, value);
  } else if (key == "latency_ms") {
    c.latency_ms = to_number<double>(key, value);
  } else if (key == "symbol_rate") {
    c.symbol_rate = to_number<double>(key, value);
  } else if (key == "ka_values") {
    spec.ka_values = parse_int_list(value);
  } else if (key == "algorithms") {
    spec.algorithms = parse_algorithm_list(value);
  } else if (key == "min_frames") {
    spec.min_frames = to_number<std::int64_t>(key, value);
  } else if (key == "max_frames") {
    spec.max_frames = to_number<std::int64_t>(key, value);
  } else if (key == "target_loss_events") {
    spec.target_loss_events = to_number<std::int64_t>(key, value);
  } else if (key == "base_seed") {
    spec.base_seed = to_number<std::uint64_t>(key, value);
  } else {
    throw Error(ErrorCode::kInvalidConfig, fmt::format("unknown config key '{}'", key));
  }
}

}  // namespace csamimo
