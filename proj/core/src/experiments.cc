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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <unordered_set>
#include <utility>

#include "dbmatch/database.h"
#include "dbmatch/detection.h"
#include "dbmatch/parallel.h"

namespace dbmatch {
namespace {

// `count` distinct uniform values from [0, bound), sorted.
std::vector<std::uint64_t> SampleDistinct(std::uint64_t bound, std::uint64_t count,
                                          Xoshiro256& engine) {
  count = std::min(count, bound);
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::uint64_t> values;
  values.reserve(count);
  while (values.size() < count) {
    const std::uint64_t v = engine.NextBelow(bound);
    if (seen.insert(v).second) values.push_back(v);
  }
  std::sort(values.begin(), values.end());
  return values;
}

// Outcome probabilities of one probe among m rows, given whether its true row
// is typical and the acceptance probability q of each of the m - 1 others.
OutcomeCounts ProbeOutcomes(bool true_typical, double q, std::uint64_t m) {
  const double rivals = static_cast<double>(m - 1);
  const double log_miss = std::log1p(-q);
  const double none_rival = q >= 1.0 ? (m == 1 ? 1.0 : 0.0) : std::exp(rivals * log_miss);
  const double one_rival =
      m < 2 ? 0.0
      : q >= 1.0 ? (m == 2 ? 1.0 : 0.0)
                 : rivals * q * std::exp((rivals - 1.0) * log_miss);
  OutcomeCounts o;
  if (true_typical) {
    o.correct = none_rival;
    o.ambiguous = 1.0 - none_rival;
  } else {
    o.none = none_rival;
    o.wrong = one_rival;
    o.ambiguous = std::max(0.0, 1.0 - none_rival - one_rival);
  }
  return o;
}

void Add(OutcomeCounts& total, const OutcomeCounts& o) {
  total.correct += o.correct;
  total.wrong += o.wrong;
  total.ambiguous += o.ambiguous;
  total.none += o.none;
}

}  // namespace

StreamKey TrialKey(std::uint64_t master_seed, std::uint64_t point,
                   std::uint64_t trial) {
  return StreamKey(master_seed).Child(point).Child(trial);
}

Experiment::Experiment(ExperimentConfig config) : config_(std::move(config)) {
  try {
    CapacityOptions cap;
    cap.max_repetitions = config_.s_max_cap;
    capacity_ = ComputeCapacityBreakdown(config_.p_x, config_.p_s, config_.channel, cap);
    if (std::abs(capacity_.total - capacity_.direct) > kIdentityTolerance) {
      throw Error(ErrorCode::kInternal, "capacity decomposition check failed");
    }
    SigmaSearchOptions sigma_options;
    sigma_options.max_alphabet_size = config_.sigma_cap;
    sigma_ = FindBestSigma(config_.p_x, config_.channel, sigma_options);
    p_ = ComputeP0P1(config_.p_x, config_.channel);
    tau_ = RecommendThreshold(p_.p0, p_.p1, config_.tau);
    model_.emplace(config_.p_x, config_.p_s, config_.channel, config_.epsilon, cap);
  } catch (const Error& e) {
    if (!e.is_infrastructure()) throw;
    setup_error_ = e;
  }
}

std::uint64_t Experiment::SeedRowsFor(std::size_t k_tilde) const {
  if (config_.seed_rows) return *config_.seed_rows;
  const double fraction =
      config_.seed_sizing == SeedSizing::kExpected
          ? 1.0 - config_.p_s[0]
          : std::min(1.0, static_cast<double>(k_tilde) / static_cast<double>(config_.n));
  const std::uint64_t lambda =
      RecommendSeedSize(config_.n, std::clamp(fraction, 0.0, 1.0), sigma_->q0, sigma_->q1);
  if (!config_.seed_order || *config_.seed_order == 1.0) return lambda;
  const double scaled = static_cast<double>(lambda) *
                        std::pow(static_cast<double>(config_.n), *config_.seed_order - 1.0);
  return static_cast<std::uint64_t>(std::ceil(scaled));
}

TrialRecord Experiment::RunTrial(std::uint64_t m, StreamKey trial_key,
                                 std::uint64_t trial_index, int threads) const {
  TrialRecord record;
  record.trial = trial_index;
  record.m = m;
  record.n = config_.n;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (setup_error_) throw *setup_error_;
    RunTrialImpl(m, trial_key, threads, record);
  } catch (const Error& e) {
    if (!e.is_infrastructure()) throw;
    record.infrastructure_failure = true;
    record.failure = e.what();
  }
  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

void Experiment::RunTrialImpl(std::uint64_t m, StreamKey key, int threads,
                              TrialRecord& record) const {
  const ExperimentConfig& cfg = config_;
  const std::size_t n = cfg.n;
  GenerationLimits limits;
  limits.max_cells = cfg.memory_cap;

  Xoshiro256 pattern_engine = key.Child(Stream::kPattern).Engine();
  const RepetitionPattern pattern = SamplePattern(n, cfg.p_s, pattern_engine);
  record.k = pattern.total();
  record.sampled = m > cfg.full_match_cap;
  const StreamKey db_key = key.Child(Stream::kDatabase);
  const StreamKey noise_key = key.Child(Stream::kNoise);
  const NoiseSampler noise(cfg.channel);

  std::optional<UnlabeledDatabase> d1;
  Labeling labeling;
  LabeledDatabase replica_view;              // Rows used by replica detection.
  LabeledDatabase probe_view;                // Sampled mode: probed labeled rows.
  std::vector<std::uint64_t> probe_sources;  // Sampled mode: their true rows.
  if (!record.sampled) {
    d1 = GenerateUnlabeled(m, n, cfg.p_x, db_key, limits);
    Xoshiro256 labeling_engine = key.Child(Stream::kLabeling).Engine();
    labeling = SampleLabeling(m, labeling_engine);
    replica_view = ApplyRepetitionNoise(*d1, pattern, labeling, cfg.channel,
                                        noise_key, limits);
  } else {
    // A uniform labeling restricted to the labeled rows we look at: distinct
    // uniform sources for each of them.
    const std::uint64_t replica_rows = std::min(m, cfg.replica_rows_cap);
    Xoshiro256 probe_engine = key.Child(Stream::kProbes).Engine();
    const std::vector<std::uint64_t> probes = SampleDistinct(m, cfg.probe_rows, probe_engine);
    std::vector<std::uint64_t> needed(replica_rows);
    std::iota(needed.begin(), needed.end(), std::uint64_t{0});
    for (std::uint64_t l : probes) {
      if (l >= replica_rows) needed.push_back(l);
    }
    Xoshiro256 labeling_engine = key.Child(Stream::kLabeling).Engine();
    std::unordered_set<std::uint64_t> used;
    std::vector<std::uint64_t> source(needed.size());
    for (std::size_t t = 0; t < needed.size(); ++t) {
      std::uint64_t r;
      do {
        r = labeling_engine.NextBelow(m);
      } while (!used.insert(r).second);
      source[t] = r;
    }
    CheckMatrixSize(needed.size(), n + pattern.total(), limits);
    const CategoricalSampler source_sampler(cfg.p_x.probabilities());
    std::vector<Symbol> row(n);
    auto noisy_row = [&](std::uint64_t label, std::uint64_t src, std::span<Symbol> out) {
      GenerateRowInto(source_sampler, db_key, src, row);
      NoisyRowInto(row, pattern, noise, noise_key, label, out);
    };
    replica_view = LabeledDatabase(replica_rows, pattern.total());
    for (std::uint64_t l = 0; l < replica_rows; ++l) {
      noisy_row(l, source[l], replica_view.MutableRow(l));
    }
    probe_view = LabeledDatabase(probes.size(), pattern.total());
    probe_sources.resize(probes.size());
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const std::uint64_t label = probes[p];
      const std::size_t t =
          label < replica_rows
              ? static_cast<std::size_t>(label)
              : static_cast<std::size_t>(
                    std::lower_bound(needed.begin() + static_cast<std::ptrdiff_t>(replica_rows),
                                     needed.end(), label) -
                    needed.begin());
      probe_sources[p] = source[t];
      noisy_row(label, source[t], probe_view.MutableRow(p));
    }
  }

  // Stage 1: replica runs.
  const RunStructure runs = DetectReplicas(replica_view, tau_);
  record.k_tilde = runs.count();
  record.replica_correct = runs == RunsFromPattern(pattern);
  const std::uint64_t evaluated = record.sampled ? probe_view.rows() : m;
  if (record.k_tilde > n) {
    record.run_mismatch = true;
    record.outcomes.none = static_cast<double>(evaluated);
    record.error_rate = 1.0;
    return;
  }

  // Stage 2: deletions from seeds.
  record.seed_rows = SeedRowsFor(record.k_tilde);
  const SeedBatch seeds =
      GenerateSeeds(record.seed_rows, n, cfg.p_x, pattern, cfg.channel,
                    key.Child(Stream::kSeedRows), key.Child(Stream::kSeedNoise), limits);
  DeletionSearchOptions search;
  search.strategy = cfg.deletion_search;
  search.search_cap = cfg.search_cap;
  const DeletionEstimate deletions =
      DetectDeletions(seeds.g1, CollapseRuns(seeds.g2, runs), sigma_->sigma, search);
  record.min_distance = deletions.min_distance;
  record.deletion_correct = deletions.deleted == pattern.DeletedColumns();
  const RepetitionPattern s_hat = AssemblePattern(runs, deletions, n);
  record.pattern_exact = s_hat == pattern;

  // Stages 3 and 4: marked database and typicality matching.
  if (!record.sampled) {
    const MarkedDatabase marked(std::move(replica_view), s_hat);
    MatchReport report =
        cfg.decoder == Decoder::kMaxLikelihood
            ? MatchAllMaxLikelihood(*d1, marked, *model_)
            : MatchAll(*d1, marked, *model_, MatchOptions{threads});
    report = Evaluate(std::move(report), labeling);
    for (MatchOutcome o : report.outcomes) {
      switch (o) {
        case MatchOutcome::kCorrect: ++record.outcomes.correct; break;
        case MatchOutcome::kWrong: ++record.outcomes.wrong; break;
        case MatchOutcome::kAmbiguous: ++record.outcomes.ambiguous; break;
        default: ++record.outcomes.none; break;
      }
    }
    record.error_rate = report.error_rate;
    return;
  }
  if (cfg.decoder == Decoder::kMaxLikelihood) {
    throw Error(ErrorCode::kConfig,
                "the maximum-likelihood decoder needs m <= fullMatchCap");
  }
  const MarkedDatabase marked(std::move(probe_view), s_hat);
  const CategoricalSampler source_sampler(cfg.p_x.probabilities());
  RivalOptions rival;
  rival.max_states = cfg.rival_state_cap;
  std::vector<Symbol> x(n);
  for (std::size_t p = 0; p < marked.rows(); ++p) {
    GenerateRowInto(source_sampler, db_key, probe_sources[p], x);
    const bool true_typical = IsJointlyTypical(x, marked, p, *model_);
    const double q = IndependentAcceptanceProbability(*model_, marked, p, rival);
    Add(record.outcomes, ProbeOutcomes(true_typical, q, m));
  }
  record.error_rate = record.outcomes.errors() / record.outcomes.evaluated();
}

std::vector<TrialRecord> RunSimulation(const Experiment& experiment, int threads) {
  const ExperimentConfig& cfg = experiment.config();
  const std::uint64_t m = EffectiveRows(cfg);
  const auto trials = static_cast<std::size_t>(cfg.trials);
  std::vector<TrialRecord> records(trials);
  const int inner = trials == 1 ? threads : 1;
  ParallelFor(trials, threads, [&](std::size_t t) {
    records[t] = experiment.RunTrial(m, TrialKey(cfg.master_seed, 0, t), t, inner);
  });
  return records;
}

SweepPoint Aggregate(double rate, std::uint64_t m, std::vector<TrialRecord> records) {
  SweepPoint point;
  point.rate = rate;
  point.m = m;
  double sum = 0.0;
  std::uint64_t replica = 0;
  std::uint64_t deletion = 0;
  for (const TrialRecord& r : records) {
    if (r.infrastructure_failure) {
      ++point.infrastructure_failures;
      continue;
    }
    ++point.trials;
    sum += r.error_rate;
    replica += r.replica_correct;
    deletion += r.deletion_correct;
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (point.trials == 0) {
    point.mean_error_rate = point.ci_low = point.ci_high = nan;
    point.replica_success_rate = point.deletion_success_rate = nan;
  } else {
    const double t = static_cast<double>(point.trials);
    point.mean_error_rate = sum / t;
    double squares = 0.0;
    for (const TrialRecord& r : records) {
      if (r.infrastructure_failure) continue;
      const double d = r.error_rate - point.mean_error_rate;
      squares += d * d;
    }
    const double sd = point.trials > 1 ? std::sqrt(squares / (t - 1.0)) : 0.0;
    const double half = 1.96 * sd / std::sqrt(t);
    point.ci_low = point.mean_error_rate - half;
    point.ci_high = point.mean_error_rate + half;
    point.replica_success_rate = static_cast<double>(replica) / t;
    point.deletion_success_rate = static_cast<double>(deletion) / t;
  }
  point.records = std::move(records);
  return point;
}

SweepResult RunSweep(const Experiment& experiment, const std::vector<double>& rates,
                     int threads) {
  if (rates.empty()) throw Error(ErrorCode::kConfig, "rate grid is empty");
  const ExperimentConfig& cfg = experiment.config();
  const auto trials = static_cast<std::size_t>(cfg.trials);
  std::vector<std::optional<std::uint64_t>> rows(rates.size());
  std::vector<std::string> overflow(rates.size());
  for (std::size_t p = 0; p < rates.size(); ++p) {
    try {
      rows[p] = RowsForRate(cfg.n, rates[p]);
    } catch (const Error& e) {
      overflow[p] = e.what();
    }
  }
  std::vector<std::vector<TrialRecord>> records(rates.size(),
                                                std::vector<TrialRecord>(trials));
  ParallelFor(rates.size() * trials, threads, [&](std::size_t task) {
    const std::size_t p = task / trials;
    const std::size_t t = task % trials;
    if (!rows[p]) {
      TrialRecord& r = records[p][t];
      r.trial = t;
      r.n = cfg.n;
      r.infrastructure_failure = true;
      r.failure = overflow[p];
      return;
    }
    records[p][t] = experiment.RunTrial(*rows[p], TrialKey(cfg.master_seed, p, t), t);
  });
  SweepResult result;
  result.capacity = experiment.capacity().total;
  for (std::size_t p = 0; p < rates.size(); ++p) {
    result.points.push_back(Aggregate(rates[p], rows[p].value_or(0), std::move(records[p])));
    if (result.points.back().trials < kRecommendedMinTrials) result.low_trial_count = true;
  }
  return result;
}

BenchSummary DetectionBench(const Experiment& experiment, int threads) {
  if (experiment.setup_error()) throw *experiment.setup_error();
  const ExperimentConfig& cfg = experiment.config();
  const std::size_t n = cfg.n;
  BenchSummary summary;
  summary.tau = experiment.tau();
  summary.p0 = experiment.disagreement().p0;
  summary.p1 = experiment.disagreement().p1;
  summary.q0 = experiment.sigma().q0;
  summary.q1 = experiment.sigma().q1;
  summary.recommended_seed_rows = experiment.SeedRowsFor(static_cast<std::size_t>(
      std::llround((1.0 - cfg.p_s[0]) * static_cast<double>(n))));

  std::vector<std::uint64_t> bench_rows = cfg.bench_rows;
  if (bench_rows.empty()) bench_rows.push_back(std::min(EffectiveRows(cfg), cfg.replica_rows_cap));
  std::sort(bench_rows.begin(), bench_rows.end());
  std::vector<std::uint64_t> seed_rows = cfg.bench_seed_rows;
  if (seed_rows.empty()) seed_rows.push_back(summary.recommended_seed_rows);
  summary.deletion_stage_rows = std::min(EffectiveRows(cfg), cfg.replica_rows_cap);
  const std::uint64_t max_rows = std::max(bench_rows.back(), summary.deletion_stage_rows);
  const std::uint64_t max_seeds = *std::max_element(seed_rows.begin(), seed_rows.end());

  const auto trials = static_cast<std::size_t>(cfg.trials);
  struct TrialBench {
    std::vector<char> replica_ok;
    std::vector<double> bound;
    std::vector<int> deletion;  // 1 success, 0 failure, -1 infrastructure.
  };
  std::vector<TrialBench> per_trial(trials);
  ParallelFor(trials, threads, [&](std::size_t t) {
    const StreamKey key = TrialKey(cfg.master_seed, 0, t);
    Xoshiro256 pattern_engine = key.Child(Stream::kPattern).Engine();
    const RepetitionPattern pattern = SamplePattern(n, cfg.p_s, pattern_engine);
    const RunStructure truth = RunsFromPattern(pattern);
    const std::size_t k = pattern.total();
    const CategoricalSampler source(cfg.p_x.probabilities());
    const NoiseSampler noise(cfg.channel);
    const StreamKey db_key = key.Child(Stream::kDatabase);
    const StreamKey noise_key = key.Child(Stream::kNoise);
    // Hamming distances accumulated over a growing row prefix; labeled rows
    // are i.i.d., so the prefix of length m is a valid m-row database.
    std::vector<std::uint64_t> hamming(k > 0 ? k - 1 : 0, 0);
    std::vector<Symbol> x(n);
    std::vector<Symbol> y(k);
    TrialBench& out = per_trial[t];
    std::optional<RunStructure> stage_runs;
    std::size_t next_checkpoint = 0;
    for (std::uint64_t r = 0; r < max_rows; ++r) {
      GenerateRowInto(source, db_key, r, x);
      NoisyRowInto(x, pattern, noise, noise_key, r, y);
      for (std::size_t j = 0; j + 1 < k; ++j) hamming[j] += y[j] != y[j + 1];
      const std::uint64_t rows = r + 1;
      auto runs_now = [&] {
        return k == 0 ? RunStructure{} : RunsFromHamming(hamming, rows, summary.tau);
      };
      while (next_checkpoint < bench_rows.size() && bench_rows[next_checkpoint] == rows) {
        out.replica_ok.push_back(runs_now() == truth);
        out.bound.push_back(ReplicaErrorBound(rows, summary.tau, summary.p0, summary.p1, k));
        ++next_checkpoint;
      }
      if (rows == summary.deletion_stage_rows) stage_runs = runs_now();
    }
    const SeedBatch seeds = GenerateSeeds(max_seeds, n, cfg.p_x, pattern, cfg.channel,
                                          key.Child(Stream::kSeedRows),
                                          key.Child(Stream::kSeedNoise));
    const std::vector<int> deleted = pattern.DeletedColumns();
    for (std::uint64_t b : seed_rows) {
      if (stage_runs->count() > n) {
        out.deletion.push_back(0);
        continue;
      }
      DeletionSearchOptions search;
      search.strategy = cfg.deletion_search;
      search.search_cap = cfg.search_cap;
      try {
        const DeletionEstimate estimate = DetectDeletions(
            SelectRows(seeds.g1, 0, b), CollapseRuns(SelectRows(seeds.g2, 0, b), *stage_runs),
            experiment.sigma().sigma, search);
        out.deletion.push_back(estimate.deleted == deleted ? 1 : 0);
      } catch (const Error& e) {
        if (!e.is_infrastructure()) throw;
        out.deletion.push_back(-1);
      }
    }
  });
  for (std::size_t c = 0; c < bench_rows.size(); ++c) {
    ReplicaBenchPoint point;
    point.m = bench_rows[c];
    point.trials = trials;
    for (const TrialBench& tb : per_trial) {
      point.successes += tb.replica_ok[c];
      point.error_bound += tb.bound[c];
    }
    point.success_rate = static_cast<double>(point.successes) / static_cast<double>(trials);
    point.error_bound /= static_cast<double>(trials);
    summary.replica.push_back(point);
  }
  for (std::size_t c = 0; c < seed_rows.size(); ++c) {
    DeletionBenchPoint point;
    point.seed_rows = seed_rows[c];
    for (const TrialBench& tb : per_trial) {
      if (tb.deletion[c] < 0) {
        ++point.infrastructure_failures;
      } else {
        ++point.trials;
        point.successes += static_cast<std::uint64_t>(tb.deletion[c]);
      }
    }
    point.success_rate = point.trials == 0
                             ? std::numeric_limits<double>::quiet_NaN()
                             : static_cast<double>(point.successes) /
                                   static_cast<double>(point.trials);
    summary.deletion.push_back(point);
  }
  return summary;
}

}  // namespace dbmatch
