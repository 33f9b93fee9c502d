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


#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <gtest/gtest.h>

#include "csamimo/config_file.hpp"
#include "csamimo/csv.hpp"
#include "csamimo/error.hpp"
#include "csamimo/harness.hpp"

namespace csamimo {
namespace {

SweepSpec small_sweep() {
  SweepSpec spec;
  spec.config.m = 64;
  spec.config.n_slots = 10;
  spec.config.n_p = 16;
  spec.config.n_d = 64;
  spec.config.t = 4;
  spec.ka_values = {20, 40};
  spec.algorithms = {Algorithm::kSnb, Algorithm::kPab};
  spec.max_frames = 10;
  spec.target_loss_events = 1000;
  spec.record_wall_time = false;
  return spec;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("csamimo_test_" + name)).string();
}

TEST(Wilson, KnownIntervals) {
  const WilsonInterval a = wilson_interval(10, 100);
  EXPECT_NEAR(a.low, 0.05523, 1e-5);
  EXPECT_NEAR(a.high, 0.17437, 1e-5);
  const WilsonInterval zero = wilson_interval(0, 100);
  EXPECT_EQ(zero.low, 0.0);
  const double z2 = 1.959963984540054 * 1.959963984540054;
  EXPECT_NEAR(zero.high, z2 / (100.0 + z2), 1e-15);
  const WilsonInterval all = wilson_interval(100, 100);
  EXPECT_EQ(all.high, 1.0);
  EXPECT_NEAR(all.low, 100.0 / (100.0 + z2), 1e-15);
  const WilsonInterval none = wilson_interval(0, 0);
  EXPECT_EQ(none.low, 0.0);
  EXPECT_EQ(none.high, 1.0);
}

TEST(Wilson, BracketsEstimateAndShrinks) {
  for (std::int64_t n : {10, 1000, 100000}) {
    for (std::int64_t k : {std::int64_t{0}, n / 7, n / 2, n}) {
      const WilsonInterval ci = wilson_interval(k, n);
      const double phat = static_cast<double>(k) / n;
      EXPECT_LE(ci.low, phat);
      EXPECT_GE(ci.high, phat);
    }
  }
  const WilsonInterval small = wilson_interval(5, 50);
  const WilsonInterval large = wilson_interval(500, 5000);
  EXPECT_LT(large.high - large.low, small.high - small.low);
}

TEST(ParallelFor, VisitsEveryIndexOnceAndPropagatesErrors) {
  for (int workers : {1, 3, 8}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(1000, workers, [&](std::int64_t i) { ++hits[static_cast<std::size_t>(i)]; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
  EXPECT_THROW(parallel_for(100, 4,
                            [](std::int64_t i) {
                              if (i == 37) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
  parallel_for(0, 4, [](std::int64_t) { FAIL(); });
}

TEST(StreamIds, DistinctAcrossLoadsAndFrames) {
  EXPECT_NE(frame_stream_id(800, 1), frame_stream_id(801, 1));
  EXPECT_NE(frame_stream_id(800, 1), frame_stream_id(800, 2));
  EXPECT_EQ(frame_stream_id(3, 5), (std::uint64_t{3} << 32) | 5U);
}

TEST(PlrPoint, LogicalSingleUserNeverLoses) {
  SweepSpec spec;
  spec.max_frames = 50;
  const PlrRecord r = run_plr_point(spec, Algorithm::kLogical, 1);
  EXPECT_EQ(r.frames_run, 50);
  EXPECT_EQ(r.packets_sent, 50);
  EXPECT_EQ(r.packets_lost, 0);
  EXPECT_EQ(r.plr, 0.0);
  EXPECT_EQ(r.ci_low, 0.0);
  EXPECT_GT(r.ci_high, 0.0);
  EXPECT_EQ(r.mean_n_up, 1.0);
  EXPECT_EQ(r.mean_n_pa, 2.0);
  EXPECT_EQ(r.mac, "baseline");
}

TEST(PlrPoint, ZeroLoadIsWellDefined) {
  SweepSpec spec = small_sweep();
  const PlrRecord r = run_plr_point(spec, Algorithm::kSnb, 0);
  EXPECT_EQ(r.packets_sent, 0);
  EXPECT_EQ(r.plr, 0.0);
  EXPECT_EQ(r.frames_run, spec.max_frames);
}

TEST(PlrPoint, AccountingIsConsistent) {
  SweepSpec spec = small_sweep();
  spec.max_frames = 7;  // not a multiple of the batch size
  const PlrRecord r = run_plr_point(spec, Algorithm::kPab, 40);
  EXPECT_EQ(r.frames_run, 7);
  EXPECT_EQ(r.packets_sent, 7 * 40);
  EXPECT_LE(r.packets_lost, r.packets_sent);
  EXPECT_DOUBLE_EQ(r.plr, static_cast<double>(r.packets_lost) / r.packets_sent);
  EXPECT_EQ(r.wall_seconds, 0.0);
  // Every decoded user is subtracted once per replica.
  const double decoded_per_frame = 40.0 * (1.0 - r.plr);
  EXPECT_NEAR(r.mean_n_up + r.mean_n_pa, 3.0 * decoded_per_frame, 1e-9);
  EXPECT_NEAR(r.mean_n_up, decoded_per_frame, 1e-9);
}

TEST(PlrPoint, StopsAtTargetButNotBeforeMinimum) {
  SweepSpec spec;
  spec.min_frames = 3;
  spec.max_frames = 1000;
  spec.target_loss_events = 1;
  // Far beyond the peeling threshold: every frame loses packets.
  const PlrRecord r = run_plr_point(spec, Algorithm::kLogical, 6000);
  EXPECT_EQ(r.frames_run, 3);
  EXPECT_GT(r.packets_lost, 0);

  spec.min_frames = 1;
  spec.target_loss_events = 15000;
  const PlrRecord r2 = run_plr_point(spec, Algorithm::kLogical, 6000);
  EXPECT_GE(r2.packets_lost, 15000);
  ASSERT_GT(r2.frames_run, 1);
  // Stopped at the first frame where the target was reached.
  spec.max_frames = r2.frames_run - 1;
  const PlrRecord r3 = run_plr_point(spec, Algorithm::kLogical, 6000);
  EXPECT_LT(r3.packets_lost, 15000);
}

TEST(PlrPoint, InfeasibleSpecsAreRejected) {
  SweepSpec spec = small_sweep();
  spec.config.r = 11;
  EXPECT_THROW(run_plr_point(spec, Algorithm::kSnb, 10), Error);
  spec = small_sweep();
  spec.max_frames = 0;
  EXPECT_THROW(run_plr_point(spec, Algorithm::kSnb, 10), Error);
  spec = small_sweep();
  spec.ka_values = {-4};
  EXPECT_THROW(run_plr_sweep(spec), Error);
  spec = small_sweep();
  spec.config.n_p = 12;
  EXPECT_THROW(run_plr_sweep(spec), Error);
}

TEST(PlrSweep, IndependentOfWorkerCount) {
  SweepSpec spec = small_sweep();
  spec.workers = 1;
  const auto a = run_plr_sweep(spec);
  spec.workers = 3;
  const auto b = run_plr_sweep(spec);
  ASSERT_EQ(a.size(), 4U);
  EXPECT_EQ(a, b);
  EXPECT_EQ(format_plr_csv(a), format_plr_csv(b));
}

TEST(PlrSweep, ProgressCallbackSeesEveryPoint) {
  SweepSpec spec = small_sweep();
  spec.max_frames = 2;
  int calls = 0;
  const auto records = run_plr_sweep(spec, [&](const PlrRecord&) { ++calls; });
  EXPECT_EQ(calls, 4);
  EXPECT_EQ(records[0].algorithm, Algorithm::kSnb);
  EXPECT_EQ(records[0].ka, 20);
  EXPECT_EQ(records[3].algorithm, Algorithm::kPab);
  EXPECT_EQ(records[3].ka, 40);
}

TEST(PairedFrames, AlgorithmsSeeTheSameFrames) {
  SweepSpec spec = small_sweep();
  const auto paired = run_paired_frames(spec.config, 40, 6,
                                        {Algorithm::kSnb, Algorithm::kPrce, Algorithm::kLogical},
                                        spec.base_seed, {}, 2);
  ASSERT_EQ(paired.decoded.size(), 3U);
  for (std::size_t f = 0; f < 6; ++f) {
    EXPECT_GE(paired.decoded[2][f], paired.decoded[1][f]);
    int count = 0;
    for (auto d : paired.user_decoded[1][f]) count += d;
    EXPECT_EQ(count, paired.decoded[1][f]);
  }
  // The paired LOGICAL counts equal the ones of the PLR harness frames.
  SweepSpec one = spec;
  one.max_frames = 6;
  const PlrRecord r = run_plr_point(one, Algorithm::kLogical, 40);
  int decoded = 0;
  for (int d : paired.decoded[2]) decoded += d;
  EXPECT_EQ(r.packets_sent - r.packets_lost, decoded);
}

TEST(Csv, HeaderOnlyForEmptyInput) {
  EXPECT_EQ(format_plr_csv({}),
            "algorithm,mac,ka,frames_run,packets_sent,packets_lost,plr,ci_low,ci_high,"
            "mean_n_up,mean_n_pa,wall_seconds\n");
  EXPECT_EQ(format_singleton_csv({}),
            "algorithm,a_total,a_pilot,p,trials,failures,fail_prob,ci_low,ci_high\n");
  EXPECT_EQ(format_analysis_csv({}), "a_total,a_pilot,m,n_d,t,p_e,p_fail\n");
}

TEST(Csv, PlrRoundTripIsExact) {
  PlrRecord a;
  a.algorithm = Algorithm::kPab;
  a.ka = 1300;
  a.frames_run = 200;
  a.packets_sent = 260000;
  a.packets_lost = 2573;
  a.plr = 2573.0 / 260000.0;
  a.ci_low = 0.1 / 3.0;
  a.ci_high = 1.0 / 7.0;
  a.mean_n_up = 1287.123456789;
  a.mean_n_pa = 2574.987654321;
  a.wall_seconds = 12.5;
  PlrRecord b;
  b.algorithm = Algorithm::kLogical;
  const std::string path = temp_path("roundtrip.csv");
  emit_csv({a, b}, path);
  const auto back = parse_plr_csv(path);
  ASSERT_EQ(back.size(), 2U);
  EXPECT_EQ(back[0], a);
  EXPECT_EQ(back[1], b);
  std::remove(path.c_str());
}

TEST(Csv, EveryRowHasTheHeaderColumnCount) {
  SweepSpec spec = small_sweep();
  spec.max_frames = 2;
  std::vector<FailureCurvePoint> curve = failure_curve(256, 256, 10, 1, {5, 50, 500});
  SingletonRecord s;
  for (const std::string& text :
       {format_plr_csv(run_plr_sweep(spec)), format_analysis_csv(curve),
        format_singleton_csv({s, s})}) {
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    const auto columns = std::count(line.begin(), line.end(), ',');
    int rows = 0;
    while (std::getline(in, line)) {
      EXPECT_EQ(std::count(line.begin(), line.end(), ','), columns) << line;
      ++rows;
    }
    EXPECT_GE(rows, 2);
  }
}

TEST(Csv, UnwritablePathIsAnIoError) {
  try {
    emit_csv({}, "/nonexistent-dir/out.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/out.csv"), std::string::npos);
  }
  EXPECT_THROW(emit_analysis_csv({}, "/nonexistent-dir/a.csv"), Error);
  EXPECT_THROW(emit_singleton_csv({}, "/nonexistent-dir/s.csv"), Error);
  EXPECT_THROW(parse_plr_csv("/nonexistent-dir/in.csv"), Error);
}

TEST(Singleton, SnbIgnoresOutOfPilotSubtraction) {
  SingletonSpec spec;
  spec.a_total = 60;
  spec.a_pilot = 2;
  spec.trials = 60;
  spec.method = SingletonMethod::kFullSlot;
  spec.p = 0.0;
  const SingletonRecord a = run_singleton_experiment(spec);
  spec.p = 1.0;
  const SingletonRecord b = run_singleton_experiment(spec);
  EXPECT_EQ(a.failures, b.failures);
  for (std::int64_t i = 0; i < 20; ++i) {
    spec.p = 0.0;
    const bool x = singleton_trial_fails(spec, i);
    spec.p = 0.7;
    EXPECT_EQ(x, singleton_trial_fails(spec, i));
  }
}

TEST(Singleton, PabBenefitsFromSubtraction) {
  SingletonSpec spec;
  spec.algorithm = Algorithm::kPab;
  spec.a_total = 40;
  spec.a_pilot = 2;
  spec.trials = 150;
  spec.p = 0.0;
  const SingletonRecord none = run_singleton_experiment(spec);
  spec.p = 1.0;
  const SingletonRecord all = run_singleton_experiment(spec);
  spec.p = 0.5;
  const SingletonRecord half = run_singleton_experiment(spec);
  EXPECT_GT(none.fail_prob, 0.7);
  EXPECT_LT(all.fail_prob, 0.25);
  EXPECT_LT(half.fail_prob, none.fail_prob);
  EXPECT_GT(half.fail_prob, all.fail_prob);
}

TEST(Singleton, ProjectedSamplingMatchesFullSlot) {
  SingletonSpec spec;
  spec.a_total = 62;
  spec.a_pilot = 1;
  spec.trials = 1500;
  spec.method = SingletonMethod::kProjected;
  const SingletonRecord proj = run_singleton_experiment(spec);
  spec.method = SingletonMethod::kFullSlot;
  spec.seed = 2;
  const SingletonRecord full = run_singleton_experiment(spec);
  const double p = 0.5 * (proj.fail_prob + full.fail_prob);
  const double se = std::sqrt(2.0 * p * (1.0 - p) / 1500.0);
  EXPECT_GT(p, 0.1);
  EXPECT_LT(p, 0.9);
  EXPECT_NEAR(proj.fail_prob, full.fail_prob, 4.0 * se);
}

TEST(Singleton, SharersOnThePilotRaiseFailure) {
  SingletonSpec spec;
  spec.a_total = 40;
  spec.trials = 2000;
  spec.a_pilot = 1;
  const SingletonRecord one = run_singleton_experiment(spec);
  spec.a_pilot = 3;
  const SingletonRecord three = run_singleton_experiment(spec);
  EXPECT_LT(one.fail_prob, three.fail_prob);
}

TEST(Singleton, RejectsInvalidSpecs) {
  SingletonSpec spec;
  spec.a_pilot = 3;
  spec.a_total = 2;
  EXPECT_THROW(run_singleton_experiment(spec), Error);
  spec = SingletonSpec{};
  spec.p = 1.5;
  EXPECT_THROW(run_singleton_experiment(spec), Error);
  spec = SingletonSpec{};
  spec.algorithm = Algorithm::kLogical;
  EXPECT_THROW(run_singleton_experiment(spec), Error);
  spec = SingletonSpec{};
  spec.algorithm = Algorithm::kPab;
  spec.method = SingletonMethod::kProjected;
  EXPECT_THROW(run_singleton_experiment(spec), Error);
}

TEST(Config, IntegerListsAndRanges) {
  EXPECT_EQ(parse_int_list("1,2, 5"), (std::vector<int>{1, 2, 5}));
  EXPECT_EQ(parse_int_list("100:400:100"), (std::vector<int>{100, 200, 300, 400}));
  EXPECT_EQ(parse_int_list("100:450:100"), (std::vector<int>{100, 200, 300, 400}));
  EXPECT_THROW(parse_int_list("1:5"), Error);
  EXPECT_THROW(parse_int_list("5:1:1"), Error);
  EXPECT_THROW(parse_int_list("1:5:0"), Error);
  EXPECT_THROW(parse_int_list("1,x"), Error);
}

TEST(Config, FileSettingsApply) {
  const std::string path = temp_path("config.txt");
  {
    std::ofstream out(path);
    out << "# sweep\n"
        << "m = 128\n"
        << "noise_var = 0.05   # lower noise\n"
        << "\n"
        << "ka_values = 100:300:100\n"
        << "algorithms = SNB, pab\n"
        << "max_frames = 40\n"
        << "base_seed = 18446744073709551615\n";
  }
  SweepSpec spec;
  for (const auto& [k, v] : read_key_values(path)) apply_setting(spec, k, v);
  std::remove(path.c_str());
  EXPECT_EQ(spec.config.m, 128);
  EXPECT_DOUBLE_EQ(spec.config.noise_var, 0.05);
  EXPECT_EQ(spec.ka_values, (std::vector<int>{100, 200, 300}));
  EXPECT_EQ(spec.algorithms, (std::vector<Algorithm>{Algorithm::kSnb, Algorithm::kPab}));
  EXPECT_EQ(spec.max_frames, 40);
  EXPECT_EQ(spec.base_seed, 18446744073709551615ULL);
}

TEST(Config, BadEntriesAreConfigErrors) {
  SweepSpec spec;
  auto code_of = [&](std::string_view k, std::string_view v) {
    try {
      apply_setting(spec, k, v);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  EXPECT_EQ(code_of("antennas", "4"), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of("m", "4.5"), ErrorCode::kInvalidConfig);
  EXPECT_EQ(code_of("noise_var", "abc"), ErrorCode::kInvalidConfig);
  const std::string path = temp_path("bad_config.txt");
  {
    std::ofstream out(path);
    out << "m 128\n";
  }
  EXPECT_THROW(read_key_values(path), Error);
  std::remove(path.c_str());
  EXPECT_THROW(read_key_values("/nonexistent-dir/cfg"), Error);
}

}  // namespace
}  // namespace csamimo
