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
#include <vector>

#include "csamimo/analysis.hpp"
#include "csamimo/harness.hpp"

namespace csamimo {

// All writers emit a header row, one record per line, and doubles in their
// shortest round-trip form. Unwritable paths throw Error{kIo}.

void emit_csv(const std::vector<PlrRecord>& records, const std::string& path);
std::string format_plr_csv(const std::vector<PlrRecord>& records);
std::vector<PlrRecord> parse_plr_csv(const std::string& path);

void emit_singleton_csv(const std::vector<SingletonRecord>& records, const std::string& path);
std::string format_singleton_csv(const std::vector<SingletonRecord>& records);

void emit_analysis_csv(const std::vector<FailureCurvePoint>& curve, const std::string& path);
std::string format_analysis_csv(const std::vector<FailureCurvePoint>& curve);

}  // namespace csamimo
