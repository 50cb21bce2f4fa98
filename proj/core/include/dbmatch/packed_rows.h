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

#ifndef DBMATCH_PACKED_ROWS_H_
#define DBMATCH_PACKED_ROWS_H_

// Bit-packed row storage and per-byte lookup tables for additive row scores.
// Symbols are stored at 1, 2, 4 or 8 bits so none straddles a byte.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dbmatch/database.h"

namespace dbmatch {

int PackedBitsFor(int alphabet_size);

class PackedRows {
 public:
  PackedRows() = default;
  PackedRows(std::size_t cols, int alphabet_size);
  static PackedRows Pack(const SymbolMatrix& matrix, int alphabet_size);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  int bits() const { return bits_; }
  int symbols_per_byte() const { return 8 / bits_; }
  std::size_t bytes_per_row() const { return bytes_per_row_; }

  void Reserve(std::size_t rows) { data_.reserve(rows * bytes_per_row_); }
  void Append(std::span<const Symbol> row);
  std::span<const std::uint8_t> Row(std::size_t r) const {
    return {data_.data() + r * bytes_per_row_, bytes_per_row_};
  }
  Symbol Get(std::size_t r, std::size_t c) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  int bits_ = 8;
  std::size_t bytes_per_row_ = 0;
  std::vector<std::uint8_t> data_;
};

// Sums per-column costs cost[c][symbol] over a packed row, one table lookup
// per byte. Columns past the row end (padding) contribute nothing.
class ChunkTable {
 public:
  ChunkTable() = default;
  // cost[c] must have one entry per alphabet symbol.
  ChunkTable(const std::vector<std::vector<double>>& cost, int bits);

  std::size_t bytes() const { return tables_.size(); }
  double Lookup(std::size_t byte_index, std::uint8_t value) const {
    return tables_[byte_index][value];
  }
  double Sum(std::span<const std::uint8_t> row) const;

 private:
  std::vector<std::array<double, 256>> tables_;
};

}  // namespace dbmatch

#endif  // DBMATCH_PACKED_ROWS_H_
