// Copyright 2026 The dbmatch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dbmatch/experiments.h"

#include <cmath>

#include <gtest/gtest.h>

#include "dbmatch/error.h"

namespace dbmatch {
namespace {

Pmf P(std::vector<double> v) { return Pmf::FromProbabilities(std::move(v)); }

ExperimentConfig Bsc(std::size_t n, std::uint64_t m, int trials) {
  ExperimentConfig cfg;
  cfg.p_x = Pmf::Uniform(2);
  cfg.p_s = P({0.2, 0.5, 0.3});
  cfg.channel = Channel::Symmetric(2, 0.1);
  cfg.n = n;
  cfg.m = m;
  cfg.trials = trials;
  cfg.master_seed = 11;
  return cfg;
}

ExperimentConfig Noiseless(std::uint64_t m) {
  ExperimentConfig cfg;
  cfg.alphabet_size = 4;
  cfg.p_x = Pmf::Uniform(4);
  cfg.p_s = P({0.0, 1.0});
  cfg.channel = Channel::Identity(4);
  cfg.n = 20;
  cfg.m = m;
  cfg.trials = 4;
  cfg.master_seed = 3;
  return cfg;
}

ExperimentConfig Typewriter(std::uint64_t m, int trials) {
  ExperimentConfig cfg;
  cfg.alphabet_size = 3;
  cfg.p_x = Pmf::Uniform(3);
  cfg.p_s = P({0.2, 0.5, 0.3});
  cfg.channel = Channel::FromRows({{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}});
  cfg.n = 60;
  cfg.m = m;
  cfg.trials = trials;
  cfg.master_seed = 5;
  cfg.deletion_search = DeletionSearch::kDynamicProgramming;
  return cfg;
}

double MeanError(const std::vector<TrialRecord>& records) {
  double sum = 0.0;
  for (const TrialRecord& r : records) {
    EXPECT_FALSE(r.infrastructure_failure) << r.failure;
    sum += r.error_rate;
  }
  return sum / static_cast<double>(records.size());
}

void ExpectSameRecords(const std::vector<TrialRecord>& a, const std::vector<TrialRecord>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t t = 0; t < a.size(); ++t) {
    EXPECT_EQ(a[t].k, b[t].k);
    EXPECT_EQ(a[t].k_tilde, b[t].k_tilde);
    EXPECT_EQ(a[t].seed_rows, b[t].seed_rows);
    EXPECT_EQ(a[t].min_distance, b[t].min_distance);
    EXPECT_EQ(a[t].pattern_exact, b[t].pattern_exact);
    EXPECT_EQ(a[t].outcomes.correct, b[t].outcomes.correct);
    EXPECT_EQ(a[t].outcomes.wrong, b[t].outcomes.wrong);
    EXPECT_EQ(a[t].outcomes.none, b[t].outcomes.none);
    EXPECT_EQ(a[t].error_rate, b[t].error_rate);
  }
}

TEST(ExperimentTest, SetupQuantities) {
  const Experiment e(Bsc(20, 32, 1));
  ASSERT_FALSE(e.setup_error().has_value());
  EXPECT_NEAR(e.capacity().total, 0.48812796, 1e-8);
  EXPECT_NEAR(e.disagreement().p0, 0.5, 1e-12);
  EXPECT_NEAR(e.disagreement().p1, 0.18, 1e-12);
  EXPECT_NEAR(e.tau(), 0.34, 1e-12);
  EXPECT_NEAR(e.model().epsilon(), 0.1 * e.model().entropies().xys, 1e-12);
}

TEST(ExperimentTest, SeedRowsFor) {
  ExperimentConfig cfg = Bsc(20, 32, 1);
  const Experiment expected(cfg);
  const SigmaChoice& s = expected.sigma();
  EXPECT_EQ(expected.SeedRowsFor(0), RecommendSeedSize(20, 0.8, s.q0, s.q1));
  cfg.seed_sizing = SeedSizing::kRealized;
  EXPECT_EQ(Experiment(cfg).SeedRowsFor(10), RecommendSeedSize(20, 0.5, s.q0, s.q1));
  cfg.seed_order = 2.0;
  EXPECT_EQ(Experiment(cfg).SeedRowsFor(10),
            static_cast<std::uint64_t>(std::ceil(RecommendSeedSize(20, 0.5, s.q0, s.q1) * 20.0)));
  cfg.seed_rows = 7;
  EXPECT_EQ(Experiment(cfg).SeedRowsFor(10), 7u);
}

TEST(ExperimentTest, DeterministicAndThreadInvariant) {
  const Experiment e(Bsc(20, 64, 6));
  const auto one = RunSimulation(e, 1);
  ExpectSameRecords(one, RunSimulation(e, 1));
  ExpectSameRecords(one, RunSimulation(e, 4));
}

TEST(ExperimentTest, DifferentSeedsDiffer) {
  ExperimentConfig cfg = Bsc(20, 64, 6);
  const auto a = RunSimulation(Experiment(cfg));
  cfg.master_seed = 12;
  const auto b = RunSimulation(Experiment(cfg));
  bool differ = false;
  for (std::size_t t = 0; t < a.size(); ++t) differ |= a[t].k != b[t].k || a[t].error_rate != b[t].error_rate;
  EXPECT_TRUE(differ);
}

TEST(ExperimentTest, NoiselessHasZeroError) {
  const auto records = RunSimulation(Experiment(Noiseless(50)));
  for (const TrialRecord& r : records) {
    EXPECT_TRUE(r.replica_correct);
    EXPECT_TRUE(r.pattern_exact);
    EXPECT_FALSE(r.sampled);
    EXPECT_EQ(r.outcomes.correct, 50.0);
  }
  EXPECT_EQ(MeanError(records), 0.0);
}

TEST(ExperimentTest, NoiselessSampledHasZeroError) {
  ExperimentConfig cfg = Noiseless(5000);
  cfg.full_match_cap = 1000;
  cfg.probe_rows = 32;
  const auto records = RunSimulation(Experiment(cfg));
  for (const TrialRecord& r : records) {
    EXPECT_TRUE(r.sampled);
    EXPECT_NEAR(r.outcomes.evaluated(), 32.0, 1e-9);
    // Each of the 4999 rivals matches a probe only by equality, w.p. 4^-20.
    EXPECT_NEAR(r.outcomes.correct, 32.0 * std::pow(1.0 - std::pow(4.0, -20), 4999), 1e-9);
  }
  EXPECT_LT(MeanError(records), 1e-8);
}

TEST(ExperimentTest, SampledAndFullAgreeOnStages) {
  // The pattern and seeds share streams across the two paths.
  ExperimentConfig cfg = Bsc(30, 400, 8);
  const auto full = RunSimulation(Experiment(cfg));
  cfg.full_match_cap = 100;
  const auto sampled = RunSimulation(Experiment(cfg));
  for (std::size_t t = 0; t < full.size(); ++t) {
    EXPECT_EQ(full[t].k, sampled[t].k);
    EXPECT_TRUE(sampled[t].sampled);
    EXPECT_NEAR(sampled[t].outcomes.evaluated(), static_cast<double>(cfg.probe_rows), 1e-9);
  }
  EXPECT_NEAR(MeanError(full), MeanError(sampled), 0.2);
}

TEST(ExperimentTest, IndependentDatabasesIsInfrastructureFailure) {
  ExperimentConfig cfg = Bsc(10, 16, 3);
  cfg.channel = Channel::Independent(Pmf::Uniform(2));
  const Experiment e(cfg);
  ASSERT_TRUE(e.setup_error().has_value());
  EXPECT_EQ(e.setup_error()->code(), ErrorCode::kIndependentDatabases);
  const auto records = RunSimulation(e);
  for (const TrialRecord& r : records) EXPECT_TRUE(r.infrastructure_failure);
  const SweepPoint point = Aggregate(0.1, 16, records);
  EXPECT_EQ(point.trials, 0u);
  EXPECT_EQ(point.infrastructure_failures, 3u);
  EXPECT_TRUE(std::isnan(point.mean_error_rate));
}

TEST(ExperimentTest, SearchCapIsInfrastructureFailure) {
  ExperimentConfig cfg = Bsc(40, 64, 2);
  cfg.search_cap = 1;
  cfg.seed_rows = 5;
  cfg.p_s = P({0.5, 0.5});
  for (const TrialRecord& r : RunSimulation(Experiment(cfg))) {
    EXPECT_TRUE(r.infrastructure_failure);
    EXPECT_FALSE(r.failure.empty());
  }
}

TEST(ExperimentTest, RunMismatchCountsEveryRowAsError) {
  ExperimentConfig cfg = Bsc(10, 64, 3);
  cfg.p_s = P({0.0, 0.0, 1.0});
  cfg.tau = 0.181;  // Just above p1: replica pairs split half the time.
  for (const TrialRecord& r : RunSimulation(Experiment(cfg))) {
    EXPECT_TRUE(r.run_mismatch);
    EXPECT_GT(r.k_tilde, cfg.n);
    EXPECT_EQ(r.error_rate, 1.0);
    EXPECT_EQ(r.outcomes.none, 64.0);
    EXPECT_FALSE(r.infrastructure_failure);
  }
}

TEST(ExperimentTest, MaxLikelihoodNeedsFullMatching) {
  ExperimentConfig cfg = Noiseless(5000);
  cfg.decoder = Decoder::kMaxLikelihood;
  cfg.full_match_cap = 100;
  EXPECT_THROW(RunSimulation(Experiment(cfg)), Error);
  cfg.m = 50;
  EXPECT_EQ(MeanError(RunSimulation(Experiment(cfg))), 0.0);
}

TEST(AggregateTest, MeansExcludeInfrastructureFailures) {
  std::vector<TrialRecord> records(4);
  records[0].error_rate = 0.2;
  records[0].replica_correct = true;
  records[1].error_rate = 0.4;
  records[1].deletion_correct = true;
  records[2].error_rate = 0.6;
  records[2].replica_correct = true;
  records[3].infrastructure_failure = true;
  const SweepPoint p = Aggregate(0.3, 8, records);
  EXPECT_EQ(p.trials, 3u);
  EXPECT_EQ(p.infrastructure_failures, 1u);
  EXPECT_NEAR(p.mean_error_rate, 0.4, 1e-12);
  const double half = 1.96 * 0.2 / std::sqrt(3.0);
  EXPECT_NEAR(p.ci_low, 0.4 - half, 1e-12);
  EXPECT_NEAR(p.ci_high, 0.4 + half, 1e-12);
  EXPECT_NEAR(p.replica_success_rate, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(p.deletion_success_rate, 1.0 / 3.0, 1e-12);
  EXPECT_EQ(p.records.size(), 4u);
}

TEST(SweepTest, GridHandling) {
  ExperimentConfig cfg = Bsc(16, 1, 2);
  const Experiment e(cfg);
  EXPECT_THROW(RunSweep(e, {}), Error);
  const SweepResult result = RunSweep(e, {0.25, 0.5, 10.0});
  ASSERT_EQ(result.points.size(), 3u);
  EXPECT_EQ(result.points[0].m, 16u);
  EXPECT_EQ(result.points[1].m, 256u);
  EXPECT_EQ(result.points[2].infrastructure_failures, 2u);
  EXPECT_TRUE(result.low_trial_count);
  EXPECT_NEAR(result.capacity, 0.48812796, 1e-8);
}

TEST(SweepTest, TypewriterGridBelowCapacity) {
  const Experiment e(Typewriter(1, 20));
  const double c = e.capacity().total;
  const SweepResult result = RunSweep(e, {0.3 * c, 0.5 * c, 0.7 * c}, 4);
  for (const SweepPoint& p : result.points) {
    EXPECT_EQ(p.trials, 20u);
    EXPECT_LT(p.mean_error_rate, 0.1) << p.rate;
  }
}

TEST(SweepTest, TypewriterGridAboveCapacity) {
  const Experiment e(Typewriter(1, 20));
  const double c = e.capacity().total;
  const SweepResult result = RunSweep(e, {c + 0.1, c + 0.2, c + 0.3}, 4);
  for (const SweepPoint& p : result.points) {
    EXPECT_TRUE(p.records.front().sampled);
    EXPECT_GT(p.mean_error_rate, 0.5) << p.rate;
  }
}

// The matcher example run end to end: pattern estimation included.
TEST(MatcherExampleTest, BinarySymmetricEndToEnd) {
  ExperimentConfig cfg = Bsc(60, 64, 50);
  cfg.epsilon = 0.12;
  cfg.deletion_search = DeletionSearch::kDynamicProgramming;
  EXPECT_EQ(RowsForRate(60, 0.1), 64u);
  EXPECT_LE(MeanError(RunSimulation(Experiment(cfg), 4)), 0.05);
}

TEST(DetectionBenchTest, ShapesAndMonotoneBound) {
  ExperimentConfig cfg = Bsc(30, 2000, 20);
  cfg.bench_rows = {100, 1000, 2000};
  cfg.bench_seed_rows = {5, 100};
  const BenchSummary s = DetectionBench(Experiment(cfg), 2);
  ASSERT_EQ(s.replica.size(), 3u);
  ASSERT_EQ(s.deletion.size(), 2u);
  EXPECT_EQ(s.deletion_stage_rows, 2000u);
  EXPECT_GT(s.replica[0].error_bound, s.replica[2].error_bound);
  EXPECT_GE(s.replica[2].success_rate, 0.9);
  EXPECT_GE(s.deletion[1].success_rate, s.deletion[0].success_rate);
  EXPECT_EQ(s.deletion[1].trials + s.deletion[1].infrastructure_failures, 20u);
}

}  // namespace
}  // namespace dbmatch
