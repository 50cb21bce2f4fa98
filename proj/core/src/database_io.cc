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

#include "dbmatch/database_io.h"

#include <algorithm>
#include <bit>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "dbmatch/error.h"

namespace dbmatch {
namespace {

constexpr char kMagic[4] = {'D', 'B', 'M', 'T'};

template <typename T>
void PutLittleEndian(std::ostream& out, T value) {
  for (std::size_t k = 0; k < sizeof(T); ++k) {
    out.put(static_cast<char>((value >> (8 * k)) & 0xff));
  }
}

template <typename T>
T GetLittleEndian(std::istream& in) {
  T value = 0;
  for (std::size_t k = 0; k < sizeof(T); ++k) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) {
      throw Error(ErrorCode::kIo, "truncated database header");
    }
    value |= static_cast<T>(static_cast<unsigned char>(c)) << (8 * k);
  }
  return value;
}

int BitsPerSymbol(int alphabet_size) {
  if (alphabet_size < 1 || alphabet_size > kMaxAlphabetSize) {
    throw Error(ErrorCode::kIo, "alphabet size out of range");
  }
  return alphabet_size == 1 ? 1 : std::bit_width(static_cast<unsigned>(alphabet_size - 1));
}

}  // namespace

void WriteBinary(std::ostream& out, const SymbolMatrix& matrix,
                 int alphabet_size) {
  const int bits = BitsPerSymbol(alphabet_size);
  out.write(kMagic, 4);
  PutLittleEndian<std::uint32_t>(out, kBinaryFormatVersion);
  PutLittleEndian<std::uint64_t>(out, matrix.rows());
  PutLittleEndian<std::uint64_t>(out, matrix.cols());
  PutLittleEndian<std::uint32_t>(out, static_cast<std::uint32_t>(alphabet_size));
  std::uint32_t buffer = 0;
  int filled = 0;
  for (Symbol s : matrix.data()) {
    if (s >= alphabet_size) {
      throw Error(ErrorCode::kInvalidArgument, "symbol outside alphabet");
    }
    buffer |= static_cast<std::uint32_t>(s) << filled;
    filled += bits;
    while (filled >= 8) {
      out.put(static_cast<char>(buffer & 0xff));
      buffer >>= 8;
      filled -= 8;
    }
  }
  if (filled > 0) out.put(static_cast<char>(buffer & 0xff));
  if (!out) throw Error(ErrorCode::kIo, "failed to write database");
}

StoredMatrix ReadBinary(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kMagic)) {
    throw Error(ErrorCode::kIo, "not a dbmatch database file");
  }
  const auto version = GetLittleEndian<std::uint32_t>(in);
  if (version != kBinaryFormatVersion) {
    throw Error(ErrorCode::kIo, "unsupported format version " + std::to_string(version));
  }
  const auto rows = GetLittleEndian<std::uint64_t>(in);
  const auto cols = GetLittleEndian<std::uint64_t>(in);
  const auto alphabet = GetLittleEndian<std::uint32_t>(in);
  const int bits = BitsPerSymbol(static_cast<int>(alphabet));
  CheckMatrixSize(rows, cols, GenerationLimits{});
  StoredMatrix stored{SymbolMatrix(rows, cols), static_cast<int>(alphabet)};
  std::uint32_t buffer = 0;
  int filled = 0;
  const std::uint32_t mask = (1u << bits) - 1;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (filled < bits) {
        const int byte = in.get();
        if (byte == std::char_traits<char>::eof()) {
          throw Error(ErrorCode::kIo, "truncated database body");
        }
        buffer |= static_cast<std::uint32_t>(byte) << filled;
        filled += 8;
      }
      const auto s = static_cast<Symbol>(buffer & mask);
      if (s >= alphabet) throw Error(ErrorCode::kIo, "symbol outside alphabet");
      stored.matrix(r, c) = s;
      buffer >>= bits;
      filled -= bits;
    }
  }
  return stored;
}

void WriteCsv(std::ostream& out, const SymbolMatrix& matrix) {
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
      if (c > 0) out << ',';
      out << static_cast<int>(matrix(r, c));
    }
    out << '\n';
  }
}

std::string GroundTruthToJson(const GroundTruth& truth) {
  nlohmann::json j;
  j["pattern"] = std::vector<int>(truth.pattern.counts().begin(),
                                  truth.pattern.counts().end());
  j["labeling"] = std::vector<std::uint64_t>(truth.labeling.permutation().begin(),
                                             truth.labeling.permutation().end());
  return j.dump();
}

GroundTruth GroundTruthFromJson(const std::string& text) {
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    return GroundTruth{
        RepetitionPattern::FromCounts(j.at("pattern").get<std::vector<int>>()),
        Labeling::FromPermutation(
            j.at("labeling").get<std::vector<std::uint64_t>>())};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("ground truth: ") + e.what());
  }
}

}  // namespace dbmatch
