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

#ifndef DBMATCH_DETECTION_H_
#define DBMATCH_DETECTION_H_

// Pattern recovery. Stage 1 groups consecutive columns of D2 into replica
// runs by thresholding their Hamming distance; stage 2 locates the deleted
// original columns from seed rows by minimum-distance search.

#include <cstdint>
#include <string>
#include <vector>

#include "dbmatch/database.h"
#include "dbmatch/probability.h"

namespace dbmatch {

struct Run {
  std::size_t begin = 0;
  std::size_t length = 0;
  friend bool operator==(const Run&, const Run&) = default;
};

// Ordered, contiguous, disjoint runs covering [0, K).
struct RunStructure {
  std::vector<Run> runs;
  std::size_t count() const { return runs.size(); }
  friend bool operator==(const RunStructure&, const RunStructure&) = default;
};

// Entry j counts the rows where columns j and j+1 differ.
std::vector<std::uint64_t> ConsecutiveHamming(const SymbolMatrix& d2);

// Columns j and j+1 share a run iff hamming[j] < rows * tau.
RunStructure RunsFromHamming(const std::vector<std::uint64_t>& hamming,
                             std::size_t rows, double tau);
RunStructure DetectReplicas(const SymbolMatrix& d2, double tau);

// The runs a perfect detector would report for this pattern.
RunStructure RunsFromPattern(const RepetitionPattern& pattern);

// Keeps the first column of every run.
SymbolMatrix CollapseRuns(const SymbolMatrix& matrix, const RunStructure& runs);

enum class DeletionSearch {
  // Every subset of the right size, as in the reference algorithm.
  kExhaustive,
  // Exact dynamic program over (original column, kept column) positions;
  // returns the same minimizer and tie-break in O(n K) after the distance
  // table.
  kDynamicProgramming,
};

struct DeletionSearchOptions {
  DeletionSearch strategy = DeletionSearch::kExhaustive;
  // Largest C(n, n - K~) the exhaustive search will enumerate.
  std::uint64_t search_cap = 10'000'000;
};

struct DeletionEstimate {
  // Sorted estimated deleted columns, size n - K~.
  std::vector<int> deleted;
  std::uint64_t min_distance = 0;
};

// mismatch[c][k] = #{seed rows where g1[., c] != sigma(g2[., k])}.
std::vector<std::vector<std::uint64_t>> MismatchTable(
    const SymbolMatrix& g1, const SymbolMatrix& g2_collapsed,
    const SymbolMap& sigma);

// Minimizes sum_i sum_k 1[g1(i, kept_k) != sigma(g2(i, k))] over all
// deletion sets, ties to the lexicographically smallest set.
// kRunMismatch when K~ > n, kSearchCapExceeded past the cap.
DeletionEstimate DetectDeletions(const SymbolMatrix& g1,
                                 const SymbolMatrix& g2_collapsed,
                                 const SymbolMap& sigma,
                                 const DeletionSearchOptions& options = {});

// Walks the columns, giving deleted ones count 0 and the rest the next run
// length in order.
RepetitionPattern AssemblePattern(const RunStructure& runs,
                                  const DeletionEstimate& deletions,
                                  std::size_t n);

// Saturating binomial coefficient.
std::uint64_t BinomialSaturating(std::uint64_t n, std::uint64_t k);

struct DetectionDiagnostics {
  std::vector<std::uint64_t> hamming;
  double tau = 0.0;
  RunStructure runs;
  DeletionEstimate deletions;
};

std::string DetectionDiagnosticsToJson(const DetectionDiagnostics& d);

}  // namespace dbmatch

#endif  // DBMATCH_DETECTION_H_
