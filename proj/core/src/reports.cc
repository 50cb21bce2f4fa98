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

#include "dbmatch/reports.h"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

namespace dbmatch {
namespace {

using nlohmann::json;

json Number(double value) {
  if (std::isnan(value)) return nullptr;
  return value;
}

const char* Bool(bool b) { return b ? "1" : "0"; }

json TrialToJson(const TrialRecord& r, const ReportOptions& options) {
  json j;
  j["trial"] = r.trial;
  j["m"] = r.m;
  j["n"] = r.n;
  j["K"] = r.k;
  j["kTilde"] = r.k_tilde;
  j["kTildeOverN"] = r.n == 0 ? 0.0 : static_cast<double>(r.k_tilde) / static_cast<double>(r.n);
  j["seedRows"] = r.seed_rows;
  j["sampled"] = r.sampled;
  j["replicaCorrect"] = r.replica_correct;
  j["deletionCorrect"] = r.deletion_correct;
  j["patternExact"] = r.pattern_exact;
  j["runMismatch"] = r.run_mismatch;
  j["minDistance"] = r.min_distance;
  j["outcomes"] = {
      {"correct", r.outcomes.correct},
      {"wrong", r.outcomes.wrong},
      {"ambiguous", r.outcomes.ambiguous},
      {"none", r.outcomes.none},
  };
  j["errorRate"] = Number(r.error_rate);
  j["infrastructureFailure"] = r.infrastructure_failure;
  if (r.infrastructure_failure) j["failure"] = r.failure;
  if (options.timing) j["wallSeconds"] = r.wall_seconds;
  return j;
}

std::string CsvField(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

}  // namespace

std::string FormatNumber(double value) {
  if (std::isnan(value)) return "nan";
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

std::string CapacityCsv(const CapacityBreakdown& c) {
  std::ostringstream out;
  out << "key,value\n";
  out << "capacity," << FormatNumber(c.total) << '\n';
  out << "direct," << FormatNumber(c.direct) << '\n';
  for (std::size_t s = 1; s < c.per_repetition.size(); ++s) {
    out << "I_" << s << ',' << FormatNumber(c.per_repetition[s]) << '\n';
  }
  return out.str();
}

std::string CapacityJson(const CapacityBreakdown& c, const Pmf& p_s) {
  json j;
  j["capacity"] = c.total;
  j["direct"] = c.direct;
  j["perRepetition"] = c.per_repetition;
  j["pS"] = std::vector<double>(p_s.probabilities().begin(), p_s.probabilities().end());
  return j.dump(2) + "\n";
}

std::string TrialsCsv(const std::vector<TrialRecord>& records,
                      const ReportOptions& options) {
  std::ostringstream out;
  out << "trial,m,n,K,kTilde,seedRows,sampled,replicaCorrect,deletionCorrect,"
         "patternExact,runMismatch,minDistance,evaluatedRows,correct,wrong,"
         "ambiguous,none,errorRate,"
         "infrastructureFailure,failure";
  if (options.timing) out << ",wallSeconds";
  out << '\n';
  for (const TrialRecord& r : records) {
    const OutcomeCounts& o = r.outcomes;
    out << r.trial << ',' << r.m << ',' << r.n << ',' << r.k << ',' << r.k_tilde << ','
        << r.seed_rows << ',' << Bool(r.sampled) << ',' << Bool(r.replica_correct) << ','
        << Bool(r.deletion_correct) << ',' << Bool(r.pattern_exact) << ','
        << Bool(r.run_mismatch) << ',' << r.min_distance << ',' << FormatNumber(o.evaluated())
        << ',' << FormatNumber(o.correct) << ',' << FormatNumber(o.wrong) << ','
        << FormatNumber(o.ambiguous) << ',' << FormatNumber(o.none) << ','
        << FormatNumber(r.infrastructure_failure ? std::nan("") : r.error_rate) << ','
        << Bool(r.infrastructure_failure) << ',' << CsvField(r.failure);
    if (options.timing) out << ',' << FormatNumber(r.wall_seconds);
    out << '\n';
  }
  return out.str();
}

std::string TrialsJson(const Experiment& experiment,
                       const std::vector<TrialRecord>& records,
                       const ReportOptions& options) {
  json j;
  j["capacity"] = Number(experiment.capacity().total);
  json trials = json::array();
  for (const TrialRecord& r : records) trials.push_back(TrialToJson(r, options));
  j["trials"] = trials;
  return j.dump(2) + "\n";
}

std::string SweepCsv(const SweepResult& result) {
  std::ostringstream out;
  out << "rate,m,trials,meanErrorRate,ciLow,ciHigh,replicaSuccessRate,"
         "deletionSuccessRate,capacity\n";
  for (const SweepPoint& p : result.points) {
    out << FormatNumber(p.rate) << ',' << p.m << ',' << p.trials << ','
        << FormatNumber(p.mean_error_rate) << ',' << FormatNumber(p.ci_low) << ','
        << FormatNumber(p.ci_high) << ',' << FormatNumber(p.replica_success_rate) << ','
        << FormatNumber(p.deletion_success_rate) << ',' << FormatNumber(result.capacity)
        << '\n';
  }
  return out.str();
}

std::string SweepJson(const SweepResult& result, const ReportOptions& options) {
  json j;
  j["capacity"] = Number(result.capacity);
  j["lowTrialCount"] = result.low_trial_count;
  json points = json::array();
  for (const SweepPoint& p : result.points) {
    json jp;
    jp["rate"] = p.rate;
    jp["m"] = p.m;
    jp["trials"] = p.trials;
    jp["infrastructureFailures"] = p.infrastructure_failures;
    jp["meanErrorRate"] = Number(p.mean_error_rate);
    jp["ciLow"] = Number(p.ci_low);
    jp["ciHigh"] = Number(p.ci_high);
    jp["replicaSuccessRate"] = Number(p.replica_success_rate);
    jp["deletionSuccessRate"] = Number(p.deletion_success_rate);
    json records = json::array();
    for (const TrialRecord& r : p.records) records.push_back(TrialToJson(r, options));
    jp["records"] = records;
    points.push_back(jp);
  }
  j["points"] = points;
  return j.dump(2) + "\n";
}

std::string BenchCsv(const BenchSummary& summary) {
  std::ostringstream out;
  out << "stage,size,trials,successes,successRate,errorBound\n";
  for (const ReplicaBenchPoint& p : summary.replica) {
    out << "replica," << p.m << ',' << p.trials << ',' << p.successes << ','
        << FormatNumber(p.success_rate) << ',' << FormatNumber(p.error_bound) << '\n';
  }
  for (const DeletionBenchPoint& p : summary.deletion) {
    out << "deletion," << p.seed_rows << ',' << p.trials << ',' << p.successes << ','
        << FormatNumber(p.success_rate) << ",\n";
  }
  return out.str();
}

std::string BenchJson(const BenchSummary& summary) {
  json j;
  j["tau"] = summary.tau;
  j["p0"] = summary.p0;
  j["p1"] = summary.p1;
  j["q0"] = summary.q0;
  j["q1"] = summary.q1;
  j["recommendedSeedRows"] = summary.recommended_seed_rows;
  j["deletionStageRows"] = summary.deletion_stage_rows;
  json replica = json::array();
  for (const ReplicaBenchPoint& p : summary.replica) {
    replica.push_back({{"m", p.m},
                       {"trials", p.trials},
                       {"successes", p.successes},
                       {"successRate", Number(p.success_rate)},
                       {"errorBound", Number(p.error_bound)}});
  }
  json deletion = json::array();
  for (const DeletionBenchPoint& p : summary.deletion) {
    deletion.push_back({{"seedRows", p.seed_rows},
                        {"trials", p.trials},
                        {"successes", p.successes},
                        {"infrastructureFailures", p.infrastructure_failures},
                        {"successRate", Number(p.success_rate)}});
  }
  j["replica"] = replica;
  j["deletion"] = deletion;
  return j.dump(2) + "\n";
}

}  // namespace dbmatch
