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

#ifndef DBMATCH_REPORTS_H_
#define DBMATCH_REPORTS_H_

// CSV and JSON renderings of experiment results. Wall-clock fields are only
// emitted when requested, so that default outputs are reproducible byte for
// byte.

#include <string>
#include <vector>

#include "dbmatch/experiments.h"

namespace dbmatch {

struct ReportOptions {
  bool timing = false;
};

// "%.12g"; "nan" for NaN.
std::string FormatNumber(double value);

std::string CapacityCsv(const CapacityBreakdown& capacity);
std::string CapacityJson(const CapacityBreakdown& capacity, const Pmf& p_s);

std::string TrialsCsv(const std::vector<TrialRecord>& records,
                      const ReportOptions& options = {});
std::string TrialsJson(const Experiment& experiment,
                       const std::vector<TrialRecord>& records,
                       const ReportOptions& options = {});

// Columns: rate,m,trials,meanErrorRate,ciLow,ciHigh,replicaSuccessRate,
// deletionSuccessRate,capacity.
std::string SweepCsv(const SweepResult& result);
std::string SweepJson(const SweepResult& result,
                      const ReportOptions& options = {});

// Columns: stage,size,trials,successes,successRate,errorBound.
std::string BenchCsv(const BenchSummary& summary);
std::string BenchJson(const BenchSummary& summary);

}  // namespace dbmatch

#endif  // DBMATCH_REPORTS_H_
