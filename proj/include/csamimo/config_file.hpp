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

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "csamimo/harness.hpp"

namespace csamimo {

/// Flat `key = value` file; '#' starts a comment. Keys are the SystemConfig
/// and SweepSpec field names (k_a, m, n_slots, ..., ka_values, algorithms,
/// min_frames, max_frames, target_loss_events, base_seed).
std::vector<std::pair<std::string, std::string>> read_key_values(const std::string& path);

/// Throws Error{kInvalidConfig} for unknown keys or malformed values.
void apply_setting(SweepSpec& spec, std::string_view key, std::string_view value);

/// "a,b,c" or "start:stop:step" (inclusive stop).
std::vector<int> parse_int_list(std::string_view text);

std::vector<Algorithm> parse_algorithm_list(std::string_view text);

}  // namespace csamimo
