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

#ifndef DBMATCH_DATABASE_H_
#define DBMATCH_DATABASE_H_

// Generative model for a pair of correlated databases: an unlabeled m x n
// source, a per-column repetition pattern, a hidden row permutation, and the
// noisy repeated labeled copy. Every row draws from its own keyed substream.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dbmatch/probability.h"
#include "dbmatch/rng.h"

namespace dbmatch {

// Dense row-major matrix of symbols.
class SymbolMatrix {
 public:
  SymbolMatrix() = default;
  SymbolMatrix(std::size_t rows, std::size_t cols, Symbol fill = 0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Symbol operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  Symbol& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  std::span<const Symbol> Row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<Symbol> MutableRow(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::vector<Symbol> Column(std::size_t c) const;
  std::span<const Symbol> data() const { return data_; }

  friend bool operator==(const SymbolMatrix&, const SymbolMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Symbol> data_;
};

// D1: m x n, entries i.i.d. p_X.
using UnlabeledDatabase = SymbolMatrix;
// D2: m x K, flat concatenation of the repeated noisy columns.
using LabeledDatabase = SymbolMatrix;

class RepetitionPattern {
 public:
  RepetitionPattern() = default;
  static RepetitionPattern FromCounts(std::vector<int> counts);

  std::size_t size() const { return counts_.size(); }
  int operator[](std::size_t j) const { return counts_[j]; }
  std::span<const int> counts() const { return counts_; }
  // K = sum of counts.
  std::size_t total() const { return total_; }
  // Number of columns with a nonzero count.
  std::size_t retained() const;
  // Sorted {j : S_j = 0}.
  std::vector<int> DeletedColumns() const;

  friend bool operator==(const RepetitionPattern& a,
                         const RepetitionPattern& b) {
    return a.counts_ == b.counts_;
  }

 private:
  explicit RepetitionPattern(std::vector<int> counts);
  std::vector<int> counts_;
  std::size_t total_ = 0;
};

// Theta: unlabeled row i becomes labeled row Theta(i).
class Labeling {
 public:
  Labeling() = default;
  static Labeling FromPermutation(std::vector<std::uint64_t> perm);
  static Labeling Identity(std::uint64_t m);

  std::uint64_t size() const { return perm_.size(); }
  std::uint64_t operator()(std::uint64_t i) const { return perm_[i]; }
  std::uint64_t Inverse(std::uint64_t l) const { return inverse_[l]; }
  std::span<const std::uint64_t> permutation() const { return perm_; }

  friend bool operator==(const Labeling& a, const Labeling& b) {
    return a.perm_ == b.perm_;
  }

 private:
  std::vector<std::uint64_t> perm_;
  std::vector<std::uint64_t> inverse_;
};

struct GroundTruth {
  RepetitionPattern pattern;
  Labeling labeling;
};

// Seed rows: g1 row i and g2 row i are a correctly matched pair.
struct SeedBatch {
  SymbolMatrix g1;
  SymbolMatrix g2;
  std::size_t size() const { return g1.rows(); }
};

struct GenerationLimits {
  // Largest number of cells a single materialized matrix may hold.
  std::uint64_t max_cells = std::uint64_t{1} << 31;
};

// Rejects m * n beyond the memory cap with kSizeOverflow.
void CheckMatrixSize(std::uint64_t rows, std::uint64_t cols,
                     const GenerationLimits& limits);

// Per-input-symbol samplers for the noise kernel.
class NoiseSampler {
 public:
  explicit NoiseSampler(const Channel& channel);
  template <typename Engine>
  Symbol Sample(Symbol x, Engine& engine) const {
    return rows_[x].Sample(engine);
  }

 private:
  std::vector<CategoricalSampler> rows_;
};

// Row r of a database keyed by `key`: n i.i.d. draws from its own substream.
void GenerateRowInto(const CategoricalSampler& source, StreamKey key,
                     std::uint64_t row, std::span<Symbol> out);

// Passes one source row through the pattern and the channel; `out` must have
// pattern.total() entries.
void NoisyRowInto(std::span<const Symbol> source_row,
                  const RepetitionPattern& pattern, const NoiseSampler& noise,
                  StreamKey key, std::uint64_t row, std::span<Symbol> out);

UnlabeledDatabase GenerateUnlabeled(std::uint64_t m, std::uint64_t n,
                                    const Pmf& p_x, StreamKey key,
                                    const GenerationLimits& limits = {});

RepetitionPattern SamplePattern(std::size_t n, const Pmf& p_s,
                                Xoshiro256& engine);

// Uniform permutation by Fisher-Yates.
Labeling SampleLabeling(std::uint64_t m, Xoshiro256& engine);

// Labeled row l is the noisy repeated copy of unlabeled row Inverse(l); its
// noise draws come from key.RowEngine(l).
LabeledDatabase ApplyRepetitionNoise(const UnlabeledDatabase& d1,
                                     const RepetitionPattern& pattern,
                                     const Labeling& labeling,
                                     const Channel& channel, StreamKey key,
                                     const GenerationLimits& limits = {});

// B fresh rows (rows_key) through the same pattern and channel (noise_key),
// aligned by construction.
SeedBatch GenerateSeeds(std::uint64_t b, std::size_t n, const Pmf& p_x,
                        const RepetitionPattern& pattern,
                        const Channel& channel, StreamKey rows_key,
                        StreamKey noise_key,
                        const GenerationLimits& limits = {});

// Sub-matrix of the given rows, in order.
SymbolMatrix SelectRows(const SymbolMatrix& matrix, std::size_t first,
                        std::size_t count);

}  // namespace dbmatch

#endif  // DBMATCH_DATABASE_H_
