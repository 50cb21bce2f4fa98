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

#ifndef DBMATCH_DATABASE_IO_H_
#define DBMATCH_DATABASE_IO_H_

// Serialization of databases and ground truth.
//
// Binary layout (little-endian): "DBMT", u32 version, u64 rows, u64 cols,
// u32 alphabet size, then rows*cols symbols packed LSB-first at
// ceil(log2(alphabet)) bits each, contiguous across rows, zero padded to a
// whole byte.

#include <iosfwd>
#include <string>

#include "dbmatch/database.h"

namespace dbmatch {

inline constexpr std::uint32_t kBinaryFormatVersion = 1;

struct StoredMatrix {
  SymbolMatrix matrix;
  int alphabet_size = 0;
};

void WriteBinary(std::ostream& out, const SymbolMatrix& matrix,
                 int alphabet_size);
StoredMatrix ReadBinary(std::istream& in);

// One row per line, comma separated.
void WriteCsv(std::ostream& out, const SymbolMatrix& matrix);

// {"pattern": [...], "labeling": [...]} where labeling[i] = Theta(i).
std::string GroundTruthToJson(const GroundTruth& truth);
GroundTruth GroundTruthFromJson(const std::string& text);

}  // namespace dbmatch

#endif  // DBMATCH_DATABASE_IO_H_
