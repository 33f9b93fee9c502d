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

#include "csamimo/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "csamimo/error.hpp"

namespace csamimo {

namespace {

constexpr const char* kPlrHeader =
    "algorithm,mac,ka,frames_run,packets_sent,packets_lost,plr,ci_low,ci_high,mean_n_up,"
    "mean_n_pa,wall_seconds";

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot open '{}' for writing", path));
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, fmt::format("failed writing '{}'", path));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

template <typename T>
T parse_number(const std::string& text, const std::string& path) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kInvalidInput, fmt::format("'{}': bad number '{}'", path, text));
  }
  return value;
}

}  // namespace

std::string format_plr_csv(const std::vector<PlrRecord>& records) {
  std::string out = kPlrHeader;
  out += '\n';
  for (const PlrRecord& r : records) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", to_string(r.algorithm), r.mac,
                       r.ka, r.frames_run, r.packets_sent, r.packets_lost, r.plr, r.ci_low,
                       r.ci_high, r.mean_n_up, r.mean_n_pa, r.wall_seconds);
  }
  return out;
}

void emit_csv(const std::vector<PlrRecord>& records, const std::string& path) {
  write_file(path, format_plr_csv(records));
}

std::vector<PlrRecord> parse_plr_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open '{}' for reading", path));
  std::string line;
  if (!std::getline(in, line) || line != kPlrHeader) {
    throw Error(ErrorCode::kInvalidInput, fmt::format("'{}': missing PLR header", path));
  }
  std::vector<PlrRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 12) {
      throw Error(ErrorCode::kInvalidInput,
                  fmt::format("'{}': expected 12 fields, got {}", path, f.size()));
    }
    PlrRecord r;
    r.algorithm = parse_algorithm(f[0]);
    r.mac = f[1];
    r.ka = parse_number<int>(f[2], path);
    r.frames_run = parse_number<std::int64_t>(f[3], path);
    r.packets_sent = parse_number<std::int64_t>(f[4], path);
    r.packets_lost = parse_number<std::int64_t>(f[5], path);
    r.plr = parse_number<double>(f[6], path);
    r.ci_low = parse_number<double>(f[7], path);
    r.ci_high = parse_number<double>(f[8], path);
    r.mean_n_up = parse_number<double>(f[9], path);
    r.mean_n_pa = parse_number<double>(f[10], path);
    r.wall_seconds = parse_number<double>(f[11], path);
    records.push_back(std::move(r));
  }
  return records;
}

std::string format_singleton_csv(const std::vector<SingletonRecord>& records) {
  std::string out = "algorithm,a_total,a_pilot,p,trials,failures,fail_prob,ci_low,ci_high\n";
  for (const SingletonRecord& r : records) {
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", to_string(r.algorithm), r.a_total,
                       r.a_pilot, r.p, r.trials, r.failures, r.fail_prob, r.ci_low, r.ci_high);
  }
  return out;
}

void emit_singleton_csv(const std::vector<SingletonRecord>& records, const std::string& path) {
  write_file(path, format_singleton_csv(records));
}

std::string format_analysis_csv(const std::vector<FailureCurvePoint>& curve) {
  std::string out = "a_total,a_pilot,m,n_d,t,p_e,p_fail\n";
  for (const FailureCurvePoint& c : curve) {
    out += fmt::format("{},{},{},{},{},{},{}\n", c.a_total, c.a_pilot, c.m, c.n_d, c.t, c.p_e,
                       c.p_fail);
  }
  return out;
}

void emit_analysis_csv(const std::vector<FailureCurvePoint>& curve, const std::string& path) {
  write_file(path, format_analysis_csv(curve));
}

}  // namespace csamimo
