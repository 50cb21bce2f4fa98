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

#ifndef DBMATCH_MATCHER_H_
#define DBMATCH_MATCHER_H_

// Row matching by weak joint typicality under p_{X, Y^S, S}.
//
// D2 is cut into per-column cells using the estimated pattern; deleted
// columns become erasure cells. A labeled row is matched to an unlabeled row
// iff that row is the only one jointly typical with it.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dbmatch/database.h"
#include "dbmatch/packed_rows.h"
#include "dbmatch/probability.h"

namespace dbmatch {

// Slack for comparisons against the typicality window, so that values lying
// exactly on the boundary are not decided by summation order.
inline constexpr double kTypicalitySlack = 1e-9;

class MarkedDatabase {
 public:
  // kArityMismatch unless sum(s_hat) equals the column count of d2.
  MarkedDatabase(LabeledDatabase d2, RepetitionPattern s_hat);

  std::size_t rows() const { return d2_.rows(); }
  std::size_t cols() const { return s_hat_.size(); }
  const RepetitionPattern& pattern() const { return s_hat_; }
  const LabeledDatabase& labeled() const { return d2_; }

  bool erased(std::size_t j) const { return s_hat_[j] == 0; }
  // Symbols of cell (i, j); empty for an erasure.
  std::span<const Symbol> Cell(std::size_t i, std::size_t j) const {
    return d2_.Row(i).subspan(offsets_[j], static_cast<std::size_t>(s_hat_[j]));
  }

 private:
  LabeledDatabase d2_;
  RepetitionPattern s_hat_;
  std::vector<std::size_t> offsets_;
};

MarkedDatabase BuildMarked(const LabeledDatabase& d2,
                           const RepetitionPattern& s_hat);

// log2 p_S(s) + log2 p_{X, Y^S | S}(x, cell | s); -infinity on a zero factor.
// An erasure (s = 0) contributes log2 p_S(0) + log2 p_X(x).
double TripleLogProb(Symbol x, std::span<const Symbol> cell, int s,
                     const Pmf& p_x, const Channel& channel, const Pmf& p_s);

class TypicalityModel {
 public:
  // epsilon defaults to 0.1 * H(X, Y^S, S).
  TypicalityModel(Pmf p_x, Pmf p_s, Channel channel,
                  std::optional<double> epsilon = std::nullopt,
                  const CapacityOptions& options = {});

  const Pmf& p_x() const { return p_x_; }
  const Pmf& p_s() const { return p_s_; }
  const Channel& channel() const { return channel_; }
  const JointEntropies& entropies() const { return entropies_; }
  double epsilon() const { return epsilon_; }
  int alphabet_size() const { return p_x_.size(); }

  // Per-column surprisals in bits (+infinity when impossible).
  double SourceSurprisal(Symbol x) const { return source_surprisal_[x]; }
  double CellSurprisal(std::span<const Symbol> cell, int s) const;
  double TripleSurprisal(Symbol x, std::span<const Symbol> cell, int s) const;

  // Whether the mean surprisal lies within epsilon (plus slack) of entropy.
  bool InWindow(double total, std::size_t n, double entropy) const;

 private:
  Pmf p_x_;
  Pmf p_s_;
  Channel channel_;
  JointEntropies entropies_;
  double epsilon_;
  std::vector<double> source_surprisal_;
};

// Reference implementation of the three weak-typicality conditions for
// unlabeled row x_row against labeled row `label` of the marked database.
bool IsJointlyTypical(std::span<const Symbol> x_row,
                      const MarkedDatabase& marked, std::size_t label,
                      const TypicalityModel& model);

// Table-driven typicality test for one labeled row against packed rows.
class RowScorer {
 public:
  RowScorer(const TypicalityModel& model, const MarkedDatabase& marked,
            std::size_t label, const ChunkTable& source_table, int bits);

  // Condition (b): depends on the labeled row alone. When false no row can
  // be typical with it.
  bool label_typical() const { return label_typical_; }
  // Conditions (a) and (c); stops as soon as the joint surprisal leaves the
  // window from above.
  bool Accepts(std::span<const std::uint8_t> packed_row) const;

 private:
  const TypicalityModel* model_ = nullptr;
  const ChunkTable* source_table_ = nullptr;
  ChunkTable joint_table_;
  std::size_t n_ = 0;
  bool label_typical_ = false;
  double joint_cutoff_ = 0.0;
};

// Source surprisal table shared by every RowScorer of a model.
ChunkTable SourceChunkTable(const TypicalityModel& model, std::size_t n,
                            int bits);

struct RivalOptions {
  // Distinct (source, joint) surprisal states kept per column.
  std::size_t max_states = std::size_t{1} << 22;
};

// Probability that a row drawn from p_X^n, independent of labeled row
// `label`, is jointly typical with it. Exact up to surprisals rounded to
// 2^-32 bits per column. kEnumerationCapExceeded past max_states.
double IndependentAcceptanceProbability(const TypicalityModel& model,
                                        const MarkedDatabase& marked,
                                        std::size_t label,
                                        const RivalOptions& options = {});

enum class MatchOutcome {
  kMatched,  // Unique typical row, not yet evaluated.
  kCorrect,
  kWrong,
  kAmbiguous,
  kNone,
};

std::string_view MatchOutcomeName(MatchOutcome outcome);

struct MatchReport {
  // assignment[l]: unlabeled row matched to labeled row l.
  std::vector<std::optional<std::uint64_t>> assignment;
  std::vector<MatchOutcome> outcomes;
  double error_rate = std::numeric_limits<double>::quiet_NaN();
};

struct MatchOptions {
  int threads = 1;
};

// Scans every unlabeled row for every labeled row.
MatchReport MatchAll(const UnlabeledDatabase& d1, const MarkedDatabase& marked,
                     const TypicalityModel& model,
                     const MatchOptions& options = {});
MatchReport MatchAll(const PackedRows& d1, const MarkedDatabase& marked,
                     const TypicalityModel& model,
                     const MatchOptions& options = {});

// Diagnostic baseline, not the typicality scheme: each labeled row goes to
// the unlabeled row maximizing sum_j TripleLogProb, ties to the lowest index.
// Rows with no finite likelihood are reported as kNone.
MatchReport MatchAllMaxLikelihood(const UnlabeledDatabase& d1,
                                  const MarkedDatabase& marked,
                                  const TypicalityModel& model);

// Fills outcomes against the true labeling; error_rate is the fraction of
// labeled rows not matched correctly.
MatchReport Evaluate(MatchReport report, const Labeling& truth);

std::string MatchReportToJson(const MatchReport& report);

}  // namespace dbmatch

#endif  // DBMATCH_MATCHER_H_
