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

#ifndef DBMATCH_PROBABILITY_H_
#define DBMATCH_PROBABILITY_H_

// Exact finite-alphabet probability engine. Symbols are dense zero-based
// integers; all logarithms are base 2 unless a name says otherwise.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace dbmatch {

using Symbol = std::uint8_t;

inline constexpr int kMaxAlphabetSize = 256;
inline constexpr double kPmfTolerance = 1e-12;
inline constexpr double kIdentityTolerance = 1e-10;

class Pmf {
 public:
  // Validates: non-empty, entries in [0,1], sum within kPmfTolerance of 1.
  static Pmf FromProbabilities(std::vector<double> probabilities);
  static Pmf Uniform(int size);
  static Pmf PointMass(int size, int symbol);

  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int k) const { return probs_[static_cast<std::size_t>(k)]; }
  std::span<const double> probabilities() const { return probs_; }

  friend bool operator==(const Pmf&, const Pmf&) = default;

 private:
  explicit Pmf(std::vector<double> probs) : probs_(std::move(probs)) {}
  std::vector<double> probs_;
};

// Memoryless noise kernel; element (x, y) is p_{Y|X}(y|x).
class Channel {
 public:
  static Channel FromRows(const std::vector<std::vector<double>>& rows);
  static Channel FromRowMajor(int alphabet_size, std::span<const double> flat);
  static Channel Identity(int alphabet_size);
  // Keeps the symbol with probability 1-crossover, otherwise moves to one of
  // the other symbols uniformly.
  static Channel Symmetric(int alphabet_size, double crossover);
  // Every input produces the same output law: the two databases are
  // independent.
  static Channel Independent(const Pmf& output);

  int size() const { return static_cast<int>(rows_.size()); }
  double operator()(int x, int y) const { return rows_[x][y]; }
  const Pmf& Row(int x) const { return rows_[static_cast<std::size_t>(x)]; }

 private:
  explicit Channel(std::vector<Pmf> rows) : rows_(std::move(rows)) {}
  std::vector<Pmf> rows_;
};

// Bijective relabeling of the alphabet.
class SymbolMap {
 public:
  static SymbolMap FromImages(std::vector<Symbol> images);
  static SymbolMap Identity(int alphabet_size);

  int size() const { return static_cast<int>(images_.size()); }
  Symbol operator()(Symbol s) const { return images_[s]; }
  Symbol Inverse(Symbol s) const { return inverse_[s]; }
  std::span<const Symbol> images() const { return images_; }

  friend bool operator==(const SymbolMap& a, const SymbolMap& b) {
    return a.images_ == b.images_;
  }

 private:
  explicit SymbolMap(std::vector<Symbol> images);
  std::vector<Symbol> images_;
  std::vector<Symbol> inverse_;
};

double Entropy(const Pmf& p);
double BinaryEntropy(double x);
// Bernoulli KL divergence D(a||b) in bits. +infinity when the support of a is
// not contained in that of b.
double BernoulliKl(double a, double b);

// Output marginal p_Y.
Pmf OutputMarginal(const Pmf& p_x, const Channel& channel);

// Disagreement probabilities of two noisy observations: p0 when the
// underlying entries are independent draws, p1 when they are the same entry.
struct DisagreementProbabilities {
  double p0 = 0.0;
  double p1 = 0.0;
};
DisagreementProbabilities ComputeP0P1(const Pmf& p_x, const Channel& channel);

// psi(y) = sum_x p_X(x) [p_{Y|X}(y|x) - p_Y(y)]^2. Sums to p0 - p1.
std::vector<double> ReplicaGapTerms(const Pmf& p_x, const Channel& channel);

// q0(sigma) = Pr(sigma(Y1) != X2) for an independent pair,
// q1(sigma) = Pr(sigma(Y1) != X1) for a correlated pair.
struct RemappedDisagreement {
  double q0 = 0.0;
  double q1 = 0.0;
};
RemappedDisagreement ComputeQ0Q1(const Pmf& p_x, const Channel& channel,
                                 const SymbolMap& sigma);

struct SigmaSearchOptions {
  int max_alphabet_size = 8;
};

struct SigmaChoice {
  SymbolMap sigma;
  double q0;
  double q1;
  double gap() const { return q0 - q1; }
};

// Exhaustive search over all bijections for the one maximizing q0 - q1. Ties
// go to the lexicographically first permutation (identity first).
// Throws kIndependentDatabases when the best gap is <= kPmfTolerance and
// kAlphabetTooLarge when the alphabet exceeds the cap.
SigmaChoice FindBestSigma(const Pmf& p_x, const Channel& channel,
                          const SigmaSearchOptions& options = {});

struct CapacityOptions {
  int max_repetitions = 4;
  // Cap on |alphabet|^s enumerated for a single repetition count s.
  std::uint64_t max_sequences = std::uint64_t{1} << 22;
};

// I(X; Y^s) for the s-fold memoryless extension of the channel.
double RepeatedMutualInformation(const Pmf& p_x, const Channel& channel, int s,
                                 const CapacityOptions& options = {});

// H(X), H(Y^S, S) and H(X, Y^S, S), by enumeration of the joint law.
struct JointEntropies {
  double x = 0.0;
  double ys = 0.0;
  double xys = 0.0;
  double mutual_information() const { return x + ys - xys; }
};
JointEntropies ComputeJointEntropies(const Pmf& p_x, const Pmf& p_s,
                                     const Channel& channel,
                                     const CapacityOptions& options = {});

struct CapacityBreakdown {
  // I(X; Y^s) for s = 0..s_max (entry 0 is always 0).
  std::vector<double> per_repetition;
  // sum_s p_S(s) I(X; Y^s).
  double total = 0.0;
  // I(X; Y^S, S) from the joint entropies.
  double direct = 0.0;
};
CapacityBreakdown ComputeCapacityBreakdown(const Pmf& p_x, const Pmf& p_s,
                                           const Channel& channel,
                                           const CapacityOptions& options = {});

// Matching capacity I(X; Y^S, S) in bits per column. Verifies the
// decomposition against the direct joint computation to kIdentityTolerance.
double Capacity(const Pmf& p_x, const Pmf& p_s, const Channel& channel,
                const CapacityOptions& options = {});

// Midpoint of (p1, p0) unless an override strictly inside the interval is
// supplied. kDegenerateGap when p0 - p1 <= kPmfTolerance.
double RecommendThreshold(double p0, double p1,
                          std::optional<double> override_tau = std::nullopt);

// Smallest integer seed count satisfying
//   B >= 2 n H_b(k) / ((q0 - q1)^2 log2(e)),   k = K-hat / n.
std::uint64_t RecommendSeedSize(std::uint64_t n, double nonzero_fraction,
                                double q0, double q1);

// Union bound on the probability that replica detection mislabels any of the
// K-1 consecutive column pairs.
double ReplicaErrorBound(std::uint64_t m, double tau, double p0, double p1,
                         std::uint64_t k);

// Decay constant exp(-(q0 - q1)^2 / 2) of the deletion-search error.
double DeletionDecayConstant(double q0, double q1);

}  // namespace dbmatch

#endif  // DBMATCH_PROBABILITY_H_
