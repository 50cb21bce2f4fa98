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

#ifndef DBMATCH_CONFIG_H_
#define DBMATCH_CONFIG_H_

// Experiment configuration, read from JSON.
//
// Required: alphabetSize, pX, pS, channel (row-major flat list or nested
// rows), n, rate or m, epsilon (number or "auto"), trials, masterSeed.
// Optional: tau, seedRows, seedOrder, seedSizing ("expected" | "realized"),
// searchCap, sMaxCap, sigmaCap, deletionSearch ("exhaustive" | "dp"),
// decoder ("typicality" | "ml"), fullMatchCap, probeRows, rivalStateCap,
// replicaRowsCap, memoryCap, rateGrid, benchRows, benchSeedRows.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dbmatch/detection.h"
#include "dbmatch/probability.h"

namespace dbmatch {

enum class SeedSizing { kExpected, kRealized };
enum class Decoder { kTypicality, kMaxLikelihood };

struct ExperimentConfig {
  int alphabet_size = 2;
  Pmf p_x = Pmf::Uniform(2);
  Pmf p_s = Pmf::PointMass(2, 1);
  Channel channel = Channel::Identity(2);

  std::size_t n = 0;
  std::optional<double> rate;
  std::optional<std::uint64_t> m;
  // nullopt means 0.1 * H(X, Y^S, S).
  std::optional<double> epsilon;
  std::optional<double> tau;
  std::optional<std::uint64_t> seed_rows;
  std::optional<double> seed_order;
  SeedSizing seed_sizing = SeedSizing::kExpected;
  int trials = 1;
  std::uint64_t master_seed = 0;

  std::uint64_t search_cap = 10'000'000;
  int s_max_cap = 4;
  int sigma_cap = 8;
  DeletionSearch deletion_search = DeletionSearch::kExhaustive;
  Decoder decoder = Decoder::kTypicality;

  // Above this many rows a trial evaluates sampled labeled rows instead of
  // materializing and matching the whole database.
  std::uint64_t full_match_cap = 4096;
  std::uint64_t probe_rows = 64;
  std::uint64_t rival_state_cap = std::uint64_t{1} << 22;
  std::uint64_t replica_rows_cap = std::uint64_t{1} << 16;
  std::uint64_t memory_cap = std::uint64_t{1} << 31;

  std::vector<double> rate_grid;
  std::vector<std::uint64_t> bench_rows;
  std::vector<std::uint64_t> bench_seed_rows;
};

enum class ConfigScope {
  // Only the distributions are required (capacity queries).
  kDistributions,
  kExperiment,
};

ExperimentConfig ParseConfig(const std::string& json_text,
                             ConfigScope scope = ConfigScope::kExperiment);
ExperimentConfig LoadConfig(const std::string& path,
                            ConfigScope scope = ConfigScope::kExperiment);

// max(2, round(2^(n R))). kSizeOverflow past 2^62.
std::uint64_t RowsForRate(std::size_t n, double rate);
// Explicit m, else RowsForRate.
std::uint64_t EffectiveRows(const ExperimentConfig& config);

}  // namespace dbmatch

#endif  // DBMATCH_CONFIG_H_
