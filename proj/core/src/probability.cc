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

#include "dbmatch/probability.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "dbmatch/error.h"

namespace dbmatch {
namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

double XLog2X(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

void CheckSameAlphabet(const Pmf& p_x, const Channel& channel) {
  if (p_x.size() != channel.size()) {
    throw Error(ErrorCode::kArityMismatch,
                "source alphabet has " + std::to_string(p_x.size()) +
                    " symbols but channel has " +
                    std::to_string(channel.size()));
  }
}

int EffectiveMaxRepetition(const Pmf& p_s) {
  int s_max = p_s.size() - 1;
  while (s_max > 0 && p_s[s_max] == 0.0) --s_max;
  return s_max;
}

// Calls visit(y_sequence, p(y^s|x) for every x) for each y^s in X^s.
template <typename Visitor>
void ForEachOutputSequence(const Channel& channel, int s,
                           const CapacityOptions& options, Visitor&& visit) {
  const int a = channel.size();
  double count = std::pow(static_cast<double>(a), s);
  if (count > static_cast<double>(options.max_sequences)) {
    throw Error(ErrorCode::kEnumerationCapExceeded,
                std::to_string(a) + "^" + std::to_string(s) +
                    " output sequences exceed the enumeration cap of " +
                    std::to_string(options.max_sequences));
  }
  std::vector<int> y(static_cast<std::size_t>(s), 0);
  std::vector<double> conditional(static_cast<std::size_t>(a));
  while (true) {
    for (int x = 0; x < a; ++x) {
      double p = 1.0;
      for (int t = 0; t < s; ++t) p *= channel(x, y[t]);
      conditional[x] = p;
    }
    visit(std::span<const int>(y), std::span<const double>(conditional));
    int pos = s - 1;
    while (pos >= 0 && ++y[pos] == a) y[pos--] = 0;
    if (pos < 0) break;
  }
}

}  // namespace

Pmf Pmf::FromProbabilities(std::vector<double> probabilities) {
  if (probabilities.empty()) {
    throw Error(ErrorCode::kInvalidPmf, "empty probability vector");
  }
  if (probabilities.size() > static_cast<std::size_t>(kMaxAlphabetSize)) {
    throw Error(ErrorCode::kAlphabetTooLarge,
                "at most " + std::to_string(kMaxAlphabetSize) + " symbols");
  }
  double sum = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorCode::kInvalidPmf,
                  "entry " + std::to_string(p) + " outside [0,1]");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kPmfTolerance) {
    throw Error(ErrorCode::kInvalidPmf,
                "entries sum to " + std::to_string(sum) + ", not 1");
  }
  return Pmf(std::move(probabilities));
}

Pmf Pmf::Uniform(int size) {
  if (size < 1) throw Error(ErrorCode::kInvalidPmf, "size must be positive");
  return FromProbabilities(
      std::vector<double>(static_cast<std::size_t>(size), 1.0 / size));
}

Pmf Pmf::PointMass(int size, int symbol) {
  if (symbol < 0 || symbol >= size) {
    throw Error(ErrorCode::kInvalidArgument, "point mass outside alphabet");
  }
  std::vector<double> p(static_cast<std::size_t>(size), 0.0);
  p[symbol] = 1.0;
  return FromProbabilities(std::move(p));
}

Channel Channel::FromRows(const std::vector<std::vector<double>>& rows) {
  const std::size_t a = rows.size();
  std::vector<Pmf> pmfs;
  pmfs.reserve(a);
  for (std::size_t x = 0; x < a; ++x) {
    if (rows[x].size() != a) {
      throw Error(ErrorCode::kArityMismatch,
                  "channel must be square; row " + std::to_string(x) +
                      " has " + std::to_string(rows[x].size()) + " entries");
    }
    try {
      pmfs.push_back(Pmf::FromProbabilities(rows[x]));
    } catch (const Error& e) {
      throw Error(e.code(), "channel row " + std::to_string(x) + ": " + e.what());
    }
  }
  if (pmfs.empty()) throw Error(ErrorCode::kInvalidPmf, "empty channel");
  return Channel(std::move(pmfs));
}

Channel Channel::FromRowMajor(int alphabet_size, std::span<const double> flat) {
  const auto a = static_cast<std::size_t>(alphabet_size);
  if (alphabet_size < 1 || flat.size() != a * a) {
    throw Error(ErrorCode::kArityMismatch,
                "row-major channel needs alphabetSize^2 entries");
  }
  std::vector<std::vector<double>> rows(a);
  for (std::size_t x = 0; x < a; ++x) {
    rows[x].assign(flat.begin() + static_cast<std::ptrdiff_t>(x * a),
                   flat.begin() + static_cast<std::ptrdiff_t>((x + 1) * a));
  }
  return FromRows(rows);
}

Channel Channel::Identity(int alphabet_size) {
  std::vector<std::vector<double>> rows(
      static_cast<std::size_t>(alphabet_size),
      std::vector<double>(static_cast<std::size_t>(alphabet_size), 0.0));
  for (int x = 0; x < alphabet_size; ++x) rows[x][x] = 1.0;
  return FromRows(rows);
}

Channel Channel::Symmetric(int alphabet_size, double crossover) {
  if (alphabet_size < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need at least two symbols");
  }
  const double off = crossover / (alphabet_size - 1);
  std::vector<std::vector<double>> rows(
      static_cast<std::size_t>(alphabet_size),
      std::vector<double>(static_cast<std::size_t>(alphabet_size), off));
  for (int x = 0; x < alphabet_size; ++x) rows[x][x] = 1.0 - crossover;
  return FromRows(rows);
}

Channel Channel::Independent(const Pmf& output) {
  std::vector<Pmf> rows(static_cast<std::size_t>(output.size()), output);
  return Channel(std::move(rows));
}

SymbolMap::SymbolMap(std::vector<Symbol> images)
    : images_(std::move(images)), inverse_(images_.size()) {
  for (std::size_t k = 0; k < images_.size(); ++k) inverse_[images_[k]] = static_cast<Symbol>(k);
}

SymbolMap SymbolMap::FromImages(std::vector<Symbol> images) {
  std::vector<bool> seen(images.size(), false);
  for (Symbol s : images) {
    if (s >= images.size() || seen[s]) {
      throw Error(ErrorCode::kInvalidArgument, "symbol map is not a bijection");
    }
    seen[s] = true;
  }
  return SymbolMap(std::move(images));
}

SymbolMap SymbolMap::Identity(int alphabet_size) {
  std::vector<Symbol> images(static_cast<std::size_t>(alphabet_size));
  std::iota(images.begin(), images.end(), Symbol{0});
  return SymbolMap(std::move(images));
}

double Entropy(const Pmf& p) {
  double h = 0.0;
  for (double v : p.probabilities()) h -= XLog2X(v);
  return h;
}

double BinaryEntropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "binary entropy argument " + std::to_string(x) +
                    " outside [0,1]");
  }
  return -XLog2X(x) - XLog2X(1.0 - x);
}

double BernoulliKl(double a, double b) {
  if (!(a >= 0.0 && a <= 1.0) || !(b >= 0.0 && b <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "Bernoulli parameters outside [0,1]");
  }
  auto term = [](double p, double q) {
    if (p == 0.0) return 0.0;
    if (q == 0.0) return kInfinity;
    return p * std::log2(p / q);
  };
  return term(a, b) + term(1.0 - a, 1.0 - b);
}

Pmf OutputMarginal(const Pmf& p_x, const Channel& channel) {
  CheckSameAlphabet(p_x, channel);
  const int a = p_x.size();
  std::vector<double> p_y(static_cast<std::size_t>(a), 0.0);
  for (int x = 0; x < a; ++x) {
    for (int y = 0; y < a; ++y) p_y[y] += p_x[x] * channel(x, y);
  }
  // Renormalize away accumulated rounding so validation cannot trip.
  const double sum = std::accumulate(p_y.begin(), p_y.end(), 0.0);
  for (double& v : p_y) v /= sum;
  return Pmf::FromProbabilities(std::move(p_y));
}

DisagreementProbabilities ComputeP0P1(const Pmf& p_x, const Channel& channel) {
  const Pmf p_y = OutputMarginal(p_x, channel);
  const int a = p_x.size();
  DisagreementProbabilities result;
  for (int x = 0; x < a; ++x) {
    for (int y = 0; y < a; ++y) {
      const double joint = p_x[x] * channel(x, y);
      result.p0 += joint * (1.0 - p_y[y]);
      result.p1 += joint * (1.0 - channel(x, y));
    }
  }
  return result;
}

std::vector<double> ReplicaGapTerms(const Pmf& p_x, const Channel& channel) {
  const Pmf p_y = OutputMarginal(p_x, channel);
  const int a = p_x.size();
  std::vector<double> psi(static_cast<std::size_t>(a), 0.0);
  for (int y = 0; y < a; ++y) {
    for (int x = 0; x < a; ++x) {
      const double d = channel(x, y) - p_y[y];
      psi[y] += p_x[x] * d * d;
    }
  }
  return psi;
}

RemappedDisagreement ComputeQ0Q1(const Pmf& p_x, const Channel& channel,
                                 const SymbolMap& sigma) {
  CheckSameAlphabet(p_x, channel);
  if (sigma.size() != p_x.size()) {
    throw Error(ErrorCode::kArityMismatch, "symbol map size differs from alphabet");
  }
  const int a = p_x.size();
  RemappedDisagreement result;
  for (int x1 = 0; x1 < a; ++x1) {
    for (int x2 = 0; x2 < a; ++x2) {
      result.q0 += p_x[x1] * p_x[x2] *
                   (1.0 - channel(x1, sigma.Inverse(static_cast<Symbol>(x2))));
    }
    result.q1 += p_x[x1] * (1.0 - channel(x1, sigma.Inverse(static_cast<Symbol>(x1))));
  }
  return result;
}

SigmaChoice FindBestSigma(const Pmf& p_x, const Channel& channel,
                          const SigmaSearchOptions& options) {
  CheckSameAlphabet(p_x, channel);
  const int a = p_x.size();
  if (a > options.max_alphabet_size) {
    throw Error(ErrorCode::kAlphabetTooLarge,
                "exhaustive sigma search over " + std::to_string(a) +
                    "! permutations exceeds the cap of |X| <= " +
                    std::to_string(options.max_alphabet_size));
  }
  std::vector<Symbol> images(static_cast<std::size_t>(a));
  std::iota(images.begin(), images.end(), Symbol{0});
  std::optional<SigmaChoice> best;
  do {
    SymbolMap sigma = SymbolMap::FromImages(images);
    const RemappedDisagreement q = ComputeQ0Q1(p_x, channel, sigma);
    if (!best || q.q0 - q.q1 > best->gap()) {
      best = SigmaChoice{std::move(sigma), q.q0, q.q1};
    }
  } while (std::next_permutation(images.begin(), images.end()));
  if (best->gap() <= kPmfTolerance) {
    throw Error(ErrorCode::kIndependentDatabases,
                "no symbol remapping makes correlated entries agree more often "
                "than independent ones (p_XY = p_X p_Y); capacity is zero");
  }
  return *best;
}

double RepeatedMutualInformation(const Pmf& p_x, const Channel& channel, int s,
                                 const CapacityOptions& options) {
  CheckSameAlphabet(p_x, channel);
  if (s < 0) throw Error(ErrorCode::kInvalidArgument, "negative repetition count");
  if (s == 0) return 0.0;
  const int a = p_x.size();
  double info = 0.0;
  ForEachOutputSequence(channel, s, options,
                        [&](std::span<const int>, std::span<const double> cond) {
                          double marginal = 0.0;
                          for (int x = 0; x < a; ++x) marginal += p_x[x] * cond[x];
                          if (marginal <= 0.0) return;
                          for (int x = 0; x < a; ++x) {
                            const double joint = p_x[x] * cond[x];
                            if (joint > 0.0) info += joint * std::log2(cond[x] / marginal);
                          }
                        });
  return info;
}

JointEntropies ComputeJointEntropies(const Pmf& p_x, const Pmf& p_s,
                                     const Channel& channel,
                                     const CapacityOptions& options) {
  CheckSameAlphabet(p_x, channel);
  const int s_max = EffectiveMaxRepetition(p_s);
  if (s_max > options.max_repetitions) {
    throw Error(ErrorCode::kEnumerationCapExceeded,
                "s_max = " + std::to_string(s_max) + " exceeds the cap of " +
                    std::to_string(options.max_repetitions));
  }
  const int a = p_x.size();
  JointEntropies h;
  h.x = Entropy(p_x);
  for (int s = 0; s <= s_max; ++s) {
    const double ps = p_s[s];
    if (ps == 0.0) continue;
    ForEachOutputSequence(channel, s, options,
                          [&](std::span<const int>, std::span<const double> cond) {
                            double marginal = 0.0;
                            for (int x = 0; x < a; ++x) {
                              const double joint = ps * p_x[x] * cond[x];
                              h.xys -= XLog2X(joint);
                              marginal += joint;
                            }
                            h.ys -= XLog2X(marginal);
                          });
  }
  return h;
}

CapacityBreakdown ComputeCapacityBreakdown(const Pmf& p_x, const Pmf& p_s,
                                           const Channel& channel,
                                           const CapacityOptions& options) {
  const JointEntropies h = ComputeJointEntropies(p_x, p_s, channel, options);
  CapacityBreakdown result;
  result.direct = h.mutual_information();
  const int s_max = EffectiveMaxRepetition(p_s);
  result.per_repetition.assign(static_cast<std::size_t>(s_max) + 1, 0.0);
  for (int s = 1; s <= s_max; ++s) {
    if (p_s[s] == 0.0) continue;
    result.per_repetition[s] = RepeatedMutualInformation(p_x, channel, s, options);
    result.total += p_s[s] * result.per_repetition[s];
  }
  return result;
}

double Capacity(const Pmf& p_x, const Pmf& p_s, const Channel& channel,
                const CapacityOptions& options) {
  const CapacityBreakdown c = ComputeCapacityBreakdown(p_x, p_s, channel, options);
  if (std::abs(c.total - c.direct) > kIdentityTolerance) {
    throw Error(ErrorCode::kInternal,
                "capacity decomposition " + std::to_string(c.total) +
                    " disagrees with joint computation " +
                    std::to_string(c.direct));
  }
  return c.total;
}

double RecommendThreshold(double p0, double p1, std::optional<double> override_tau) {
  if (p0 - p1 <= kPmfTolerance) {
    throw Error(ErrorCode::kDegenerateGap,
                "p0 - p1 = " + std::to_string(p0 - p1) +
                    "; replicas are indistinguishable from independent columns");
  }
  if (override_tau) {
    if (!(*override_tau > p1 && *override_tau < p0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "tau = " + std::to_string(*override_tau) +
                      " must lie strictly inside (p1, p0) = (" +
                      std::to_string(p1) + ", " + std::to_string(p0) + ")");
    }
    return *override_tau;
  }
  return 0.5 * (p0 + p1);
}

std::uint64_t RecommendSeedSize(std::uint64_t n, double nonzero_fraction,
                                double q0, double q1) {
  if (q0 - q1 <= kPmfTolerance) {
    throw Error(ErrorCode::kDegenerateGap,
                "q0 - q1 must be positive for seeded deletion detection");
  }
  const double hb = BinaryEntropy(nonzero_fraction);
  if (hb == 0.0) return 0;
  const double gap = q0 - q1;
  const double bound = 2.0 * static_cast<double>(n) * hb /
                       (gap * gap * std::numbers::log2e);
  return static_cast<std::uint64_t>(std::ceil(bound));
}

double ReplicaErrorBound(std::uint64_t m, double tau, double p0, double p1,
                         std::uint64_t k) {
  if (!(tau > p1 && tau < p0)) {
    throw Error(ErrorCode::kInvalidArgument, "tau must lie strictly inside (p1, p0)");
  }
  if (k <= 1) return 0.0;
  const double rows = static_cast<double>(m);
  const double false_merge = std::exp2(-rows * BernoulliKl(tau, p0));
  const double false_split = std::exp2(-rows * BernoulliKl(1.0 - tau, 1.0 - p1));
  return static_cast<double>(k - 1) * (false_merge + false_split);
}

double DeletionDecayConstant(double q0, double q1) {
  const double gap = q0 - q1;
  return std::exp(-0.5 * gap * gap);
}

}  // namespace dbmatch
