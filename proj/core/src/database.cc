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

#include "dbmatch/database.h"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

#include "dbmatch/error.h"

namespace dbmatch {

std::vector<Symbol> SymbolMatrix::Column(std::size_t c) const {
  std::vector<Symbol> column(rows_);
  for (std::size_t r = 0; r < rows_; ++r) column[r] = (*this)(r, c);
  return column;
}

RepetitionPattern::RepetitionPattern(std::vector<int> counts)
    : counts_(std::move(counts)) {
  for (int s : counts_) total_ += static_cast<std::size_t>(s);
}

RepetitionPattern RepetitionPattern::FromCounts(std::vector<int> counts) {
  for (int s : counts) {
    if (s < 0) {
      throw Error(ErrorCode::kInvalidArgument, "negative repetition count");
    }
  }
  return RepetitionPattern(std::move(counts));
}

std::size_t RepetitionPattern::retained() const {
  std::size_t k = 0;
  for (int s : counts_) k += s > 0 ? 1 : 0;
  return k;
}

std::vector<int> RepetitionPattern::DeletedColumns() const {
  std::vector<int> deleted;
  for (std::size_t j = 0; j < counts_.size(); ++j) {
    if (counts_[j] == 0) deleted.push_back(static_cast<int>(j));
  }
  return deleted;
}

Labeling Labeling::FromPermutation(std::vector<std::uint64_t> perm) {
  Labeling labeling;
  labeling.inverse_.assign(perm.size(), perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (perm[i] >= perm.size() || labeling.inverse_[perm[i]] != perm.size()) {
      throw Error(ErrorCode::kInvalidArgument, "labeling is not a permutation");
    }
    labeling.inverse_[perm[i]] = i;
  }
  labeling.perm_ = std::move(perm);
  return labeling;
}

Labeling Labeling::Identity(std::uint64_t m) {
  std::vector<std::uint64_t> perm(m);
  std::iota(perm.begin(), perm.end(), std::uint64_t{0});
  Labeling labeling;
  labeling.inverse_ = perm;
  labeling.perm_ = std::move(perm);
  return labeling;
}

void CheckMatrixSize(std::uint64_t rows, std::uint64_t cols,
                     const GenerationLimits& limits) {
  if (cols != 0 && rows > limits.max_cells / cols) {
    throw Error(ErrorCode::kSizeOverflow,
                std::to_string(rows) + " x " + std::to_string(cols) +
                    " cells exceed the memory cap of " +
                    std::to_string(limits.max_cells));
  }
}

NoiseSampler::NoiseSampler(const Channel& channel) {
  rows_.reserve(static_cast<std::size_t>(channel.size()));
  for (int x = 0; x < channel.size(); ++x) {
    rows_.emplace_back(channel.Row(x).probabilities());
  }
}

void GenerateRowInto(const CategoricalSampler& source, StreamKey key,
                     std::uint64_t row, std::span<Symbol> out) {
  Xoshiro256 engine = key.RowEngine(row);
  for (Symbol& v : out) v = source.Sample(engine);
}

void NoisyRowInto(std::span<const Symbol> source_row,
                  const RepetitionPattern& pattern, const NoiseSampler& noise,
                  StreamKey key, std::uint64_t row, std::span<Symbol> out) {
  Xoshiro256 engine = key.RowEngine(row);
  std::size_t k = 0;
  for (std::size_t j = 0; j < pattern.size(); ++j) {
    for (int copy = 0; copy < pattern[j]; ++copy) {
      out[k++] = noise.Sample(source_row[j], engine);
    }
  }
}

UnlabeledDatabase GenerateUnlabeled(std::uint64_t m, std::uint64_t n,
                                    const Pmf& p_x, StreamKey key,
                                    const GenerationLimits& limits) {
  if (m < 1 || n < 1) {
    throw Error(ErrorCode::kInvalidArgument, "database dimensions must be positive");
  }
  CheckMatrixSize(m, n, limits);
  const CategoricalSampler source(p_x.probabilities());
  UnlabeledDatabase d1(m, n);
  for (std::uint64_t r = 0; r < m; ++r) {
    GenerateRowInto(source, key, r, d1.MutableRow(r));
  }
  return d1;
}

RepetitionPattern SamplePattern(std::size_t n, const Pmf& p_s,
                                Xoshiro256& engine) {
  const CategoricalSampler sampler(p_s.probabilities());
  std::vector<int> counts(n);
  for (int& s : counts) s = sampler.Sample(engine);
  return RepetitionPattern::FromCounts(std::move(counts));
}

Labeling SampleLabeling(std::uint64_t m, Xoshiro256& engine) {
  if (m < 1) throw Error(ErrorCode::kInvalidArgument, "labeling needs m >= 1");
  std::vector<std::uint64_t> perm(m);
  std::iota(perm.begin(), perm.end(), std::uint64_t{0});
  for (std::uint64_t i = m - 1; i > 0; --i) {
    std::swap(perm[i], perm[engine.NextBelow(i + 1)]);
  }
  return Labeling::FromPermutation(std::move(perm));
}

LabeledDatabase ApplyRepetitionNoise(const UnlabeledDatabase& d1,
                                     const RepetitionPattern& pattern,
                                     const Labeling& labeling,
                                     const Channel& channel, StreamKey key,
                                     const GenerationLimits& limits) {
  if (pattern.size() != d1.cols()) {
    throw Error(ErrorCode::kArityMismatch,
                "pattern length differs from the number of columns");
  }
  if (labeling.size() != d1.rows()) {
    throw Error(ErrorCode::kArityMismatch,
                "labeling size differs from the number of rows");
  }
  CheckMatrixSize(d1.rows(), pattern.total(), limits);
  const NoiseSampler noise(channel);
  LabeledDatabase d2(d1.rows(), pattern.total());
  for (std::uint64_t l = 0; l < d1.rows(); ++l) {
    NoisyRowInto(d1.Row(labeling.Inverse(l)), pattern, noise, key, l,
                 d2.MutableRow(l));
  }
  return d2;
}

SeedBatch GenerateSeeds(std::uint64_t b, std::size_t n, const Pmf& p_x,
                        const RepetitionPattern& pattern,
                        const Channel& channel, StreamKey rows_key,
                        StreamKey noise_key, const GenerationLimits& limits) {
  if (pattern.size() != n) {
    throw Error(ErrorCode::kArityMismatch, "pattern length differs from n");
  }
  CheckMatrixSize(b, n + pattern.total(), limits);
  SeedBatch seeds;
  seeds.g1 = SymbolMatrix(b, n);
  seeds.g2 = SymbolMatrix(b, pattern.total());
  const CategoricalSampler source(p_x.probabilities());
  const NoiseSampler noise(channel);
  for (std::uint64_t r = 0; r < b; ++r) {
    GenerateRowInto(source, rows_key, r, seeds.g1.MutableRow(r));
    NoisyRowInto(seeds.g1.Row(r), pattern, noise, noise_key, r,
                 seeds.g2.MutableRow(r));
  }
  return seeds;
}

SymbolMatrix SelectRows(const SymbolMatrix& matrix, std::size_t first,
                        std::size_t count) {
  if (first + count > matrix.rows()) {
    throw Error(ErrorCode::kInvalidArgument, "row range outside matrix");
  }
  SymbolMatrix out(count, matrix.cols());
  for (std::size_t r = 0; r < count; ++r) {
    std::copy(matrix.Row(first + r).begin(), matrix.Row(first + r).end(),
              out.MutableRow(r).begin());
  }
  return out;
}

}  // namespace dbmatch
