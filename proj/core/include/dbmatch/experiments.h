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

#ifndef DBMATCH_EXPERIMENTS_H_
#define DBMATCH_EXPERIMENTS_H_

// Seeded end-to-end trials, rate sweeps and detection benchmarks.
//
// Trial t at grid point p draws every random quantity from the substream
// tree rooted at StreamKey(masterSeed).Child(p).Child(t), so results do not
// depend on thread count or scheduling.
//
// Trials with m <= fullMatchCap match every labeled row against every
// unlabeled row. Larger trials are evaluated on probeRows labeled rows drawn
// uniformly; unlabeled rows are generated on demand from their substreams.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dbmatch/config.h"
#include "dbmatch/error.h"
#include "dbmatch/matcher.h"
#include "dbmatch/probability.h"
#include "dbmatch/rng.h"

namespace dbmatch {

// Row counts by outcome. Sampled trials hold expected counts over the
// unmaterialized rows (see RunTrial), so the fields are fractional there.
struct OutcomeCounts {
  double correct = 0.0;
  double wrong = 0.0;
  double ambiguous = 0.0;
  double none = 0.0;

  double evaluated() const { return correct + wrong + ambiguous + none; }
  double errors() const { return wrong + ambiguous + none; }
};

struct TrialRecord {
  std::uint64_t trial = 0;
  std::uint64_t m = 0;
  std::size_t n = 0;
  // Columns of D2 and detected runs.
  std::size_t k = 0;
  std::size_t k_tilde = 0;
  std::uint64_t seed_rows = 0;
  bool sampled = false;
  bool replica_correct = false;
  bool deletion_correct = false;
  bool pattern_exact = false;
  // More runs than original columns; every evaluated row counts as an error.
  bool run_mismatch = false;
  std::uint64_t min_distance = 0;
  OutcomeCounts outcomes;
  double error_rate = 1.0;
  bool infrastructure_failure = false;
  std::string failure;
  double wall_seconds = 0.0;
};

class Experiment {
 public:
  explicit Experiment(ExperimentConfig config);

  const ExperimentConfig& config() const { return config_; }
  // Set when the distributions make the pipeline inapplicable (independent
  // databases, enumeration caps); every trial then reports it.
  const std::optional<Error>& setup_error() const { return setup_error_; }

  const CapacityBreakdown& capacity() const { return capacity_; }
  const DisagreementProbabilities& disagreement() const { return p_; }
  double tau() const { return tau_; }
  const SigmaChoice& sigma() const { return *sigma_; }
  const TypicalityModel& model() const { return *model_; }

  // Seed count for a trial that detected k_tilde runs.
  std::uint64_t SeedRowsFor(std::size_t k_tilde) const;

  // With m above fullMatchCap, only probeRows labeled rows and their true
  // sources are generated. Each probe contributes its exact outcome
  // probabilities given the probe, its source and the estimated pattern;
  // the other m - 1 rows are i.i.d. and independent of both.
  TrialRecord RunTrial(std::uint64_t m, StreamKey trial_key,
                       std::uint64_t trial_index, int threads = 1) const;

 private:
  void RunTrialImpl(std::uint64_t m, StreamKey key, int threads,
                    TrialRecord& record) const;

  ExperimentConfig config_;
  std::optional<Error> setup_error_;
  CapacityBreakdown capacity_;
  DisagreementProbabilities p_;
  double tau_ = 0.5;
  std::optional<SigmaChoice> sigma_;
  std::optional<TypicalityModel> model_;
};

StreamKey TrialKey(std::uint64_t master_seed, std::uint64_t point,
                   std::uint64_t trial);

// All trials of the config at its own m (grid point 0).
std::vector<TrialRecord> RunSimulation(const Experiment& experiment,
                                       int threads = 1);

struct SweepPoint {
  double rate = 0.0;
  std::uint64_t m = 0;
  // Trials that completed; infrastructure failures are excluded from every
  // mean below.
  std::uint64_t trials = 0;
  std::uint64_t infrastructure_failures = 0;
  double mean_error_rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double replica_success_rate = 0.0;
  double deletion_success_rate = 0.0;
  std::vector<TrialRecord> records;
};

// Mean and 95% normal-approximation interval over completed trials.
SweepPoint Aggregate(double rate, std::uint64_t m,
                     std::vector<TrialRecord> records);

inline constexpr std::uint64_t kRecommendedMinTrials = 30;

struct SweepResult {
  std::vector<SweepPoint> points;
  double capacity = 0.0;
  bool low_trial_count = false;
};

// One batch of trials per rate; an empty grid is rejected.
SweepResult RunSweep(const Experiment& experiment,
                     const std::vector<double>& rates, int threads = 1);

struct ReplicaBenchPoint {
  std::uint64_t m = 0;
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double success_rate = 0.0;
  // Mean over trials of the union bound at the realized K.
  double error_bound = 0.0;
};

struct DeletionBenchPoint {
  std::uint64_t seed_rows = 0;
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  std::uint64_t infrastructure_failures = 0;
  double success_rate = 0.0;
};

struct BenchSummary {
  double tau = 0.0;
  double p0 = 0.0;
  double p1 = 0.0;
  double q0 = 0.0;
  double q1 = 0.0;
  std::uint64_t recommended_seed_rows = 0;
  // Rows used to detect the runs fed to the deletion stage.
  std::uint64_t deletion_stage_rows = 0;
  std::vector<ReplicaBenchPoint> replica;
  std::vector<DeletionBenchPoint> deletion;
};

// Replica detection at every m in benchRows (nested row prefixes of one
// database per trial) and deletion detection at every B in benchSeedRows
// (nested seed prefixes), all against ground truth. The deletion stage uses
// runs detected from min(m, replicaRowsCap) rows.
BenchSummary DetectionBench(const Experiment& experiment, int threads = 1);

}  // namespace dbmatch

#endif  // DBMATCH_EXPERIMENTS_H_
