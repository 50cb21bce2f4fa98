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

#ifndef DBMATCH_RNG_H_
#define DBMATCH_RNG_H_

// Random number plumbing. A single 64-bit master seed is expanded into
// independent, named substreams; rows of a database each get their own
// substream so that any row can be regenerated on demand and rows can be
// produced in any order (or in parallel) with identical results.

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace dbmatch {

// SplitMix64 finalizer. Used to derive keys, and to seed Xoshiro256.
constexpr std::uint64_t Mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t MixPair(std::uint64_t a, std::uint64_t b) {
  return Mix64(a ^ Mix64(b + 0x632be59bd9b4e019ULL));
}

// xoshiro256** 1.0. Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed) {
    for (auto& word : state_) {
      seed += 0x9e3779b97f4a7c15ULL;
      word = Mix64(seed);
    }
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    const std::uint64_t result = Rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = Rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double NextDouble() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform in [0, bound), bound > 0. Lemire's multiply-shift with rejection.
  std::uint64_t NextBelow(std::uint64_t bound) {
    unsigned __int128 product =
        static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        product = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

 private:
  static constexpr std::uint64_t Rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_;
};

enum class Stream : std::uint64_t {
  kDatabase = 1,
  kPattern = 2,
  kLabeling = 3,
  kNoise = 4,
  kSeedRows = 5,
  kSeedNoise = 6,
  kProbes = 7,
};

// A node in the substream tree. Keys are cheap values; engines are created on
// demand.
class StreamKey {
 public:
  constexpr explicit StreamKey(std::uint64_t value) : value_(value) {}

  constexpr StreamKey Child(std::uint64_t tag) const {
    return StreamKey(MixPair(value_, tag));
  }
  constexpr StreamKey Child(Stream stream) const {
    return Child(static_cast<std::uint64_t>(stream));
  }

  Xoshiro256 Engine() const { return Xoshiro256(value_); }
  Xoshiro256 RowEngine(std::uint64_t row) const {
    return Xoshiro256(MixPair(value_, row));
  }

  constexpr std::uint64_t value() const { return value_; }

 private:
  std::uint64_t value_;
};

// Inverse-CDF sampler over {0, ..., size-1}.
class CategoricalSampler {
 public:
  CategoricalSampler() = default;
  explicit CategoricalSampler(std::span<const double> probabilities);

  template <typename Engine>
  std::uint8_t Sample(Engine& engine) const {
    if (deterministic_ >= 0) return static_cast<std::uint8_t>(deterministic_);
    const double u = engine.NextDouble();
    std::size_t k = 0;
    while (k + 1 < cumulative_.size() && u >= cumulative_[k]) ++k;
    return static_cast<std::uint8_t>(k);
  }

 private:
  std::vector<double> cumulative_;
  int deterministic_ = -1;
};

inline CategoricalSampler::CategoricalSampler(
    std::span<const double> probabilities) {
  int support = 0;
  int last = 0;
  double running = 0.0;
  cumulative_.reserve(probabilities.size());
  for (std::size_t k = 0; k < probabilities.size(); ++k) {
    running += probabilities[k];
    cumulative_.push_back(running);
    if (probabilities[k] > 0.0) {
      ++support;
      last = static_cast<int>(k);
    }
  }
  // Zero-probability tail symbols must never be drawn, even when rounding
  // leaves the running sum a hair under 1.
  for (std::size_t k = static_cast<std::size_t>(last); k < cumulative_.size();
       ++k) {
    cumulative_[k] = 2.0;
  }
  if (support == 1) deterministic_ = last;
}

}  // namespace dbmatch

#endif  // DBMATCH_RNG_H_
