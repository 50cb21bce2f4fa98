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

#include "dbmatch/packed_rows.h"

#include <bit>

#include "dbmatch/error.h"

namespace dbmatch {

int PackedBitsFor(int alphabet_size) {
  if (alphabet_size < 1 || alphabet_size > kMaxAlphabetSize) {
    throw Error(ErrorCode::kAlphabetTooLarge, "alphabet size out of range");
  }
  const int needed =
      alphabet_size <= 2 ? 1 : std::bit_width(static_cast<unsigned>(alphabet_size - 1));
  return static_cast<int>(std::bit_ceil(static_cast<unsigned>(needed)));
}

PackedRows::PackedRows(std::size_t cols, int alphabet_size)
    : cols_(cols), bits_(PackedBitsFor(alphabet_size)) {
  const std::size_t per_byte = static_cast<std::size_t>(8 / bits_);
  bytes_per_row_ = (cols + per_byte - 1) / per_byte;
}

PackedRows PackedRows::Pack(const SymbolMatrix& matrix, int alphabet_size) {
  PackedRows packed(matrix.cols(), alphabet_size);
  packed.Reserve(matrix.rows());
  for (std::size_t r = 0; r < matrix.rows(); ++r) packed.Append(matrix.Row(r));
  return packed;
}

void PackedRows::Append(std::span<const Symbol> row) {
  if (row.size() != cols_) {
    throw Error(ErrorCode::kArityMismatch, "packed row has the wrong length");
  }
  const std::size_t start = data_.size();
  data_.resize(start + bytes_per_row_, 0);
  const std::size_t per_byte = static_cast<std::size_t>(8 / bits_);
  for (std::size_t c = 0; c < cols_; ++c) {
    data_[start + c / per_byte] |=
        static_cast<std::uint8_t>(row[c] << ((c % per_byte) * bits_));
  }
  ++rows_;
}

Symbol PackedRows::Get(std::size_t r, std::size_t c) const {
  const std::size_t per_byte = static_cast<std::size_t>(8 / bits_);
  const std::uint8_t byte = data_[r * bytes_per_row_ + c / per_byte];
  const unsigned mask = (1u << bits_) - 1;
  return static_cast<Symbol>((byte >> ((c % per_byte) * bits_)) & mask);
}

ChunkTable::ChunkTable(const std::vector<std::vector<double>>& cost, int bits) {
  const std::size_t per_byte = static_cast<std::size_t>(8 / bits);
  const std::size_t cols = cost.size();
  const unsigned mask = (1u << bits) - 1;
  tables_.resize((cols + per_byte - 1) / per_byte);
  for (std::size_t b = 0; b < tables_.size(); ++b) {
    for (unsigned v = 0; v < 256; ++v) {
      double sum = 0.0;
      for (std::size_t t = 0; t < per_byte; ++t) {
        const std::size_t c = b * per_byte + t;
        if (c >= cols) break;
        const unsigned symbol = (v >> (t * bits)) & mask;
        // Byte values that encode symbols outside the alphabet never occur.
        sum += symbol < cost[c].size() ? cost[c][symbol] : 0.0;
      }
      tables_[b][v] = sum;
    }
  }
}

double ChunkTable::Sum(std::span<const std::uint8_t> row) const {
  double sum = 0.0;
  for (std::size_t b = 0; b < tables_.size(); ++b) sum += tables_[b][row[b]];
  return sum;
}

}  // namespace dbmatch
