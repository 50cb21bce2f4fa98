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

#include "dbmatch/detection.h"

#include <algorithm>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "dbmatch/error.h"

namespace dbmatch {

std::vector<std::uint64_t> ConsecutiveHamming(const SymbolMatrix& d2) {
  const std::size_t k = d2.cols();
  if (k <= 1) return {};
  std::vector<std::uint64_t> hamming(k - 1, 0);
  for (std::size_t r = 0; r < d2.rows(); ++r) {
    const std::span<const Symbol> row = d2.Row(r);
    for (std::size_t j = 0; j + 1 < k; ++j) hamming[j] += row[j] != row[j + 1];
  }
  return hamming;
}

RunStructure RunsFromHamming(const std::vector<std::uint64_t>& hamming,
                             std::size_t rows, double tau) {
  RunStructure result;
  const std::size_t k = hamming.size() + 1;
  const double threshold = static_cast<double>(rows) * tau;
  Run current{0, 1};
  for (std::size_t j = 0; j + 1 < k; ++j) {
    if (static_cast<double>(hamming[j]) < threshold) {
      ++current.length;
    } else {
      result.runs.push_back(current);
      current = Run{j + 1, 1};
    }
  }
  result.runs.push_back(current);
  return result;
}

RunStructure DetectReplicas(const SymbolMatrix& d2, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tau must lie in (0, 1)");
  }
  if (d2.cols() == 0) return {};
  return RunsFromHamming(ConsecutiveHamming(d2), d2.rows(), tau);
}

RunStructure RunsFromPattern(const RepetitionPattern& pattern) {
  RunStructure result;
  std::size_t begin = 0;
  for (int s : pattern.counts()) {
    if (s == 0) continue;
    result.runs.push_back(Run{begin, static_cast<std::size_t>(s)});
    begin += static_cast<std::size_t>(s);
  }
  return result;
}

SymbolMatrix CollapseRuns(const SymbolMatrix& matrix, const RunStructure& runs) {
  std::size_t covered = 0;
  for (const Run& run : runs.runs) {
    if (run.begin != covered || run.length == 0) {
      throw Error(ErrorCode::kArityMismatch, "runs are not a contiguous cover");
    }
    covered += run.length;
  }
  if (covered != matrix.cols()) {
    throw Error(ErrorCode::kArityMismatch, "runs do not cover the matrix columns");
  }
  SymbolMatrix out(matrix.rows(), runs.count());
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (std::size_t k = 0; k < runs.count(); ++k) {
      out(r, k) = matrix(r, runs.runs[k].begin);
    }
  }
  return out;
}

std::uint64_t BinomialSaturating(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  unsigned __int128 value = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    // value * (n - k + i) / i stays exact: value is C(n-k+i-1, i-1).
    value = value * (n - k + i) / i;
    if (value > kMax) return kMax;
  }
  return static_cast<std::uint64_t>(value);
}

std::vector<std::vector<std::uint64_t>> MismatchTable(
    const SymbolMatrix& g1, const SymbolMatrix& g2_collapsed,
    const SymbolMap& sigma) {
  const std::size_t n = g1.cols();
  const std::size_t k_tilde = g2_collapsed.cols();
  std::vector<std::vector<std::uint64_t>> table(
      n, std::vector<std::uint64_t>(k_tilde, 0));
  std::vector<Symbol> mapped(k_tilde);
  for (std::size_t r = 0; r < g1.rows(); ++r) {
    const std::span<const Symbol> x = g1.Row(r);
    const std::span<const Symbol> y = g2_collapsed.Row(r);
    for (std::size_t k = 0; k < k_tilde; ++k) mapped[k] = sigma(y[k]);
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t k = 0; k < k_tilde; ++k) table[c][k] += x[c] != mapped[k];
    }
  }
  return table;
}

namespace {

DeletionEstimate ExhaustiveSearch(
    const std::vector<std::vector<std::uint64_t>>& table, std::size_t n,
    std::size_t k_tilde) {
  const std::size_t d = n - k_tilde;
  // Current deletion set in lexicographic enumeration order.
  std::vector<int> deleted(d);
  std::iota(deleted.begin(), deleted.end(), 0);
  std::vector<char> is_deleted(n, 0);
  DeletionEstimate best;
  best.min_distance = std::numeric_limits<std::uint64_t>::max();
  while (true) {
    std::fill(is_deleted.begin(), is_deleted.end(), 0);
    for (int c : deleted) is_deleted[c] = 1;
    std::uint64_t cost = 0;
    std::size_t k = 0;
    for (std::size_t c = 0; c < n && cost < best.min_distance; ++c) {
      if (!is_deleted[c]) cost += table[c][k++];
    }
    if (cost < best.min_distance) {
      best.min_distance = cost;
      best.deleted = deleted;
    }
    // Advance to the next d-combination of [0, n).
    std::size_t pos = d;
    while (pos > 0 && deleted[pos - 1] == static_cast<int>(n - d + pos - 1)) --pos;
    if (pos == 0) break;
    ++deleted[pos - 1];
    for (std::size_t t = pos; t < d; ++t) deleted[t] = deleted[t - 1] + 1;
  }
  return best;
}

DeletionEstimate DynamicProgramSearch(
    const std::vector<std::vector<std::uint64_t>>& table, std::size_t n,
    std::size_t k_tilde) {
  constexpr std::uint64_t kInf = std::numeric_limits<std::uint64_t>::max();
  // cost[c][k]: best distance matching original columns c.. to kept columns k..
  std::vector<std::vector<std::uint64_t>> cost(
      n + 1, std::vector<std::uint64_t>(k_tilde + 1, kInf));
  cost[n][k_tilde] = 0;
  for (std::size_t c = n; c-- > 0;) {
    for (std::size_t k = 0; k <= k_tilde; ++k) {
      if (k_tilde - k > n - c) continue;
      std::uint64_t best = kInf;
      if (n - c - 1 >= k_tilde - k) best = cost[c + 1][k];
      if (k < k_tilde && cost[c + 1][k + 1] != kInf) {
        best = std::min(best, table[c][k] + cost[c + 1][k + 1]);
      }
      cost[c][k] = best;
    }
  }
  DeletionEstimate result;
  result.min_distance = cost[0][0];
  std::size_t k = 0;
  for (std::size_t c = 0; c < n; ++c) {
    // Deleting the earliest possible column gives the lexicographically
    // smallest minimizer.
    const bool can_delete = n - c - 1 >= k_tilde - k;
    if (can_delete && cost[c + 1][k] == cost[c][k]) {
      result.deleted.push_back(static_cast<int>(c));
    } else {
      ++k;
    }
  }
  return result;
}

}  // namespace

DeletionEstimate DetectDeletions(const SymbolMatrix& g1,
                                 const SymbolMatrix& g2_collapsed,
                                 const SymbolMap& sigma,
                                 const DeletionSearchOptions& options) {
  const std::size_t n = g1.cols();
  const std::size_t k_tilde = g2_collapsed.cols();
  if (k_tilde > n) {
    throw Error(ErrorCode::kRunMismatch,
                "detected " + std::to_string(k_tilde) + " runs but only " +
                    std::to_string(n) + " original columns");
  }
  if (g1.rows() != g2_collapsed.rows()) {
    throw Error(ErrorCode::kArityMismatch, "seed batches differ in row count");
  }
  if (k_tilde == n) {
    DeletionEstimate none;
    const auto table = MismatchTable(g1, g2_collapsed, sigma);
    for (std::size_t c = 0; c < n; ++c) none.min_distance += table[c][c];
    return none;
  }
  if (options.strategy == DeletionSearch::kExhaustive) {
    const std::uint64_t candidates = BinomialSaturating(n, n - k_tilde);
    if (candidates > options.search_cap) {
      throw Error(ErrorCode::kSearchCapExceeded,
                  "C(" + std::to_string(n) + ", " + std::to_string(n - k_tilde) +
                      ") candidate deletion sets exceed the search cap of " +
                      std::to_string(options.search_cap));
    }
  }
  const auto table = MismatchTable(g1, g2_collapsed, sigma);
  return options.strategy == DeletionSearch::kExhaustive
             ? ExhaustiveSearch(table, n, k_tilde)
             : DynamicProgramSearch(table, n, k_tilde);
}

RepetitionPattern AssemblePattern(const RunStructure& runs,
                                  const DeletionEstimate& deletions,
                                  std::size_t n) {
  if (runs.count() + deletions.deleted.size() != n) {
    throw Error(ErrorCode::kArityMismatch,
                std::to_string(runs.count()) + " runs plus " +
                    std::to_string(deletions.deleted.size()) +
                    " deletions do not account for " + std::to_string(n) +
                    " columns");
  }
  std::vector<int> counts(n, 0);
  std::vector<char> deleted(n, 0);
  for (int c : deletions.deleted) {
    if (c < 0 || static_cast<std::size_t>(c) >= n || deleted[c]) {
      throw Error(ErrorCode::kArityMismatch, "invalid deletion set");
    }
    deleted[c] = 1;
  }
  std::size_t next = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (!deleted[j]) counts[j] = static_cast<int>(runs.runs[next++].length);
  }
  return RepetitionPattern::FromCounts(std::move(counts));
}

std::string DetectionDiagnosticsToJson(const DetectionDiagnostics& d) {
  nlohmann::json j;
  j["hamming"] = d.hamming;
  j["tau"] = d.tau;
  nlohmann::json runs = nlohmann::json::array();
  for (const Run& run : d.runs.runs) runs.push_back({run.begin, run.length});
  j["runs"] = runs;
  j["deletionSet"] = d.deletions.deleted;
  j["minDistance"] = d.deletions.min_distance;
  return j.dump();
}

}  // namespace dbmatch
