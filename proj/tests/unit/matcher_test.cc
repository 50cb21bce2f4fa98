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

#include "dbmatch/matcher.h"

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dbmatch/error.h"
#include "testing/oracles.h"

namespace dbmatch {
namespace {

Pmf P(std::vector<double> v) { return Pmf::FromProbabilities(std::move(v)); }

SymbolMatrix FromRows(const std::vector<std::vector<int>>& rows) {
  SymbolMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = static_cast<Symbol>(rows[r][c]);
  }
  return m;
}

std::vector<Symbol> Concat(const MarkedDatabase& marked, std::size_t i) {
  std::vector<Symbol> out;
  for (std::size_t j = 0; j < marked.cols(); ++j) {
    for (Symbol s : marked.Cell(i, j)) out.push_back(s);
  }
  return out;
}

TEST(PackedRowsTest, RoundTripAndChunkSums) {
  std::mt19937_64 rng(31);
  for (int a : {2, 3, 4, 5, 16, 17, 255}) {
    for (std::size_t n : {1u, 7u, 8u, 9u, 33u}) {
      const auto m = GenerateUnlabeled(11, n, Pmf::Uniform(a), StreamKey(a * 100 + n));
      const PackedRows packed = PackedRows::Pack(m, a);
      EXPECT_EQ(8 % packed.bits(), 0);
      std::vector<std::vector<double>> cost(n, std::vector<double>(a));
      std::uniform_real_distribution<double> u(0.0, 5.0);
      for (auto& row : cost) {
        for (double& v : row) v = u(rng);
      }
      const ChunkTable table(cost, packed.bits());
      for (std::size_t r = 0; r < m.rows(); ++r) {
        double direct = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
          EXPECT_EQ(packed.Get(r, c), m(r, c));
          direct += cost[c][m(r, c)];
        }
        EXPECT_NEAR(table.Sum(packed.Row(r)), direct, 1e-9);
      }
    }
  }
}

TEST(BuildMarkedTest, Examples) {
  const SymbolMatrix d2 = FromRows({{0, 1, 2}, {2, 2, 0}});
  const MarkedDatabase ones(d2, RepetitionPattern::FromCounts({1, 1, 1}));
  for (std::size_t j = 0; j < 3; ++j) {
    ASSERT_EQ(ones.Cell(1, j).size(), 1u);
    EXPECT_EQ(ones.Cell(1, j)[0], d2(1, j));
    EXPECT_FALSE(ones.erased(j));
  }
  const MarkedDatabase mixed(d2, RepetitionPattern::FromCounts({2, 0, 1}));
  const auto first = mixed.Cell(0, 0);
  EXPECT_EQ(std::vector<Symbol>(first.begin(), first.end()), (std::vector<Symbol>{0, 1}));
  EXPECT_TRUE(mixed.erased(1));
  EXPECT_TRUE(mixed.Cell(0, 1).empty());
  EXPECT_EQ(mixed.Cell(0, 2)[0], 2);
  const MarkedDatabase gone(SymbolMatrix(2, 0), RepetitionPattern::FromCounts({0, 0}));
  EXPECT_TRUE(gone.erased(0) && gone.erased(1));
  EXPECT_THROW(BuildMarked(d2, RepetitionPattern::FromCounts({1, 1})), Error);
}

TEST(BuildMarkedTest, Lossless) {
  for (int t = 0; t < 100; ++t) {
    Xoshiro256 rng(t);
    const auto pattern = SamplePattern(1 + t % 20, P({0.3, 0.4, 0.2, 0.1}), rng);
    const auto d2 = GenerateUnlabeled(5, std::max<std::size_t>(pattern.total(), 1), Pmf::Uniform(3),
                                      StreamKey(t));
    const SymbolMatrix trimmed =
        pattern.total() == 0 ? SymbolMatrix(5, 0) : d2;
    const MarkedDatabase marked(trimmed, pattern);
    for (std::size_t i = 0; i < 5; ++i) {
      const auto row = trimmed.Row(i);
      EXPECT_EQ(Concat(marked, i), std::vector<Symbol>(row.begin(), row.end()));
    }
  }
}

TEST(TripleLogProbTest, Examples) {
  const Pmf p_x = Pmf::Uniform(2);
  const Pmf p_s = P({0.2, 0.5, 0.3});
  const Channel bsc = Channel::Symmetric(2, 0.1);
  EXPECT_DOUBLE_EQ(TripleLogProb(1, {}, 0, p_x, bsc, p_s), std::log2(0.2) + std::log2(0.5));
  const std::vector<Symbol> one{1};
  EXPECT_TRUE(std::isinf(TripleLogProb(0, one, 1, p_x, Channel::Identity(2), P({0.0, 1.0}))));
  const std::vector<Symbol> cell{0, 1};
  EXPECT_NEAR(TripleLogProb(0, cell, 2, p_x, bsc, p_s),
              std::log2(0.3) + std::log2(0.5 * 0.9 * 0.1), 1e-12);
}

TEST(TripleLogProbTest, SumsToOne) {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 40; ++t) {
    const int a = 2 + t % 2;
    const int s_max = 1 + t % 3;
    const Pmf p_x = P(testing::RandomSimplex(a, rng, 0.1));
    const Pmf p_s = P(testing::RandomSimplex(s_max + 1, rng, 0.1));
    const Channel ch = Channel::FromRows(testing::RandomKernel(a, rng, 0.1));
    double total = 0.0;
    for (int s = 0; s <= s_max; ++s) {
      const int sequences = static_cast<int>(std::pow(a, s));
      for (int code = 0; code < sequences; ++code) {
        std::vector<Symbol> y;
        for (int k = 0, c = code; k < s; ++k, c /= a) y.push_back(static_cast<Symbol>(c % a));
        for (int x = 0; x < a; ++x) {
          total += std::exp2(TripleLogProb(static_cast<Symbol>(x), y, s, p_x, ch, p_s));
        }
      }
    }
    EXPECT_NEAR(total, 1.0, 1e-10);
  }
}

TEST(TypicalityModelTest, EntropiesMatchTables) {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 30; ++t) {
    const auto px = testing::RandomSimplex(3, rng);
    const auto ps = testing::RandomSimplex(3, rng);
    const auto ch = testing::RandomKernel(3, rng);
    const TypicalityModel model(P(px), P(ps), Channel::FromRows(ch));
    const auto h = testing::EntropiesByTables(px, ps, ch);
    EXPECT_NEAR(model.entropies().x, h.x, 1e-12);
    EXPECT_NEAR(model.entropies().ys, h.ys, 1e-12);
    EXPECT_NEAR(model.entropies().xys, h.xys, 1e-12);
    EXPECT_DOUBLE_EQ(model.epsilon(), 0.1 * model.entropies().xys);
  }
  EXPECT_THROW(TypicalityModel(Pmf::Uniform(2), Pmf::Uniform(2), Channel::Identity(2), -1.0),
               Error);
}

// Draws a matched (x row, labeled row) pair through the generative model.
struct Pair {
  std::vector<Symbol> x;
  MarkedDatabase marked;
};

Pair DrawPair(std::size_t n, const Pmf& p_x, const Pmf& p_s, const Channel& ch,
              std::uint64_t seed) {
  Xoshiro256 rng(seed);
  const auto pattern = SamplePattern(n, p_s, rng);
  const auto d1 = GenerateUnlabeled(1, n, p_x, StreamKey(seed));
  const auto d2 = ApplyRepetitionNoise(d1, pattern, Labeling::Identity(1), ch, StreamKey(~seed));
  return Pair{std::vector<Symbol>(d1.Row(0).begin(), d1.Row(0).end()),
              MarkedDatabase(d2, pattern)};
}

TEST(IsJointlyTypicalTest, NoiselessTruePairIsTypical) {
  const TypicalityModel model(Pmf::Uniform(2), P({0.0, 1.0}), Channel::Identity(2), 0.1);
  for (int t = 0; t < 200; ++t) {
    const Pair pair = DrawPair(200, Pmf::Uniform(2), P({0.0, 1.0}), Channel::Identity(2), t);
    EXPECT_TRUE(IsJointlyTypical(pair.x, pair.marked, 0, model));
  }
}

TEST(IsJointlyTypicalTest, ZeroProbabilityTransitionRejected) {
  const TypicalityModel model(Pmf::Uniform(2), P({0.0, 1.0}), Channel::Identity(2), 10.0);
  const MarkedDatabase marked(FromRows({{0, 1, 1}}), RepetitionPattern::FromCounts({1, 1, 1}));
  EXPECT_TRUE(IsJointlyTypical(std::vector<Symbol>{0, 1, 1}, marked, 0, model));
  EXPECT_FALSE(IsJointlyTypical(std::vector<Symbol>{0, 1, 0}, marked, 0, model));
}

TEST(IsJointlyTypicalTest, TruePairFrequencyAtLeastOneMinusTwoEps) {
  const Pmf p_x = Pmf::Uniform(2);
  const Pmf p_s = P({0.2, 0.5, 0.3});
  const Channel bsc = Channel::Symmetric(2, 0.1);
  const TypicalityModel model(p_x, p_s, bsc);
  int typical = 0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) {
    const Pair pair = DrawPair(200, p_x, p_s, bsc, 1000 + t);
    typical += IsJointlyTypical(pair.x, pair.marked, 0, model);
  }
  EXPECT_GE(typical, (1.0 - 2.0 * model.epsilon()) * trials);
}

TEST(IsJointlyTypicalTest, IndependentAcceptanceWithinPackingBound) {
  const Pmf p_x = Pmf::Uniform(2);
  const Pmf p_s = P({0.2, 0.5, 0.3});
  const Channel bsc = Channel::Symmetric(2, 0.1);
  const double capacity = Capacity(p_x, p_s, bsc);
  for (double eps : {0.05, 0.1, 0.15}) {
    const TypicalityModel model(p_x, p_s, bsc, eps);
    for (std::size_t n : {6u, 8u, 10u}) {
      for (int t = 0; t < 20; ++t) {
        const Pair pair = DrawPair(n, p_x, p_s, bsc, 77 * t + n);
        // Exact Pr over an independent uniform x^n, by enumerating all 2^n rows.
        double accepted = 0.0;
        std::vector<Symbol> x(n);
        for (std::uint32_t code = 0; code < (1u << n); ++code) {
          for (std::size_t j = 0; j < n; ++j) x[j] = (code >> j) & 1;
          if (IsJointlyTypical(x, pair.marked, 0, model)) accepted += std::exp2(-double(n));
        }
        EXPECT_LE(accepted, std::exp2(-double(n) * (capacity - 3 * eps)) * (1 + 1e-9));
      }
    }
  }
}

TEST(IndependentAcceptanceTest, MatchesEnumerationOverAllRows) {
  std::mt19937_64 rng(35);
  std::uniform_real_distribution<double> eps_dist(0.05, 0.8);
  int nonzero = 0;
  for (int t = 0; t < 60; ++t) {
    const int a = 2 + t % 2;
    const std::size_t n = a == 2 ? 4 + t % 7 : 3 + t % 4;
    const auto px = testing::RandomSimplex(a, rng, 0.1);
    const auto ps = testing::RandomSimplex(3, rng, 0.1);
    const auto ch = testing::RandomKernel(a, rng, 0.2);
    const TypicalityModel model(P(px), P(ps), Channel::FromRows(ch), eps_dist(rng));
    const Pair pair = DrawPair(n, P(px), P(ps), Channel::FromRows(ch), 900 + t);
    const auto h = testing::EntropiesByTables(px, ps, ch);
    testing::Rows cells;
    for (std::size_t j = 0; j < n; ++j) {
      const auto c = pair.marked.Cell(0, j);
      cells.emplace_back(c.begin(), c.end());
    }
    const std::vector<int> s_hat(pair.marked.pattern().counts().begin(),
                                 pair.marked.pattern().counts().end());
    double expected = 0.0;
    std::vector<int> x(n);
    const int rows = static_cast<int>(std::pow(a, n));
    for (int code = 0; code < rows; ++code) {
      double p = 1.0;
      for (std::size_t j = 0, c = code; j < n; ++j, c /= a) {
        x[j] = static_cast<int>(c % a);
        p *= px[x[j]];
      }
      if (testing::TypicalByProducts(x, cells, s_hat, px, ps, ch, h, model.epsilon())) {
        expected += p;
      }
    }
    const double q = IndependentAcceptanceProbability(model, pair.marked, 0);
    EXPECT_NEAR(q, expected, 1e-12) << "t=" << t;
    nonzero += expected > 0.0;
  }
  EXPECT_GT(nonzero, 10);
}

TEST(IndependentAcceptanceTest, StateCap) {
  const Pmf p_x = P({0.13, 0.29, 0.58});
  const Pmf p_s = P({0.1, 0.6, 0.3});
  const Channel ch = Channel::FromRows({{0.7, 0.2, 0.1}, {0.15, 0.6, 0.25}, {0.05, 0.3, 0.65}});
  const TypicalityModel model(p_x, p_s, ch, 2.0);
  const Pair pair = DrawPair(40, p_x, p_s, ch, 4);
  RivalOptions tight;
  tight.max_states = 16;
  EXPECT_THROW(IndependentAcceptanceProbability(model, pair.marked, 0, tight), Error);
}

TEST(RowScorerTest, AcceptSetsMatchProductOracle) {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> eps_dist(0.05, 0.6);
  int total_accepted = 0;
  int total_checked = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + t % 7;
    const std::size_t m = 1 + t % 16;
    const auto px = testing::RandomSimplex(2, rng);
    const auto ps = testing::RandomSimplex(3, rng, 0.2);
    const auto ch = testing::RandomKernel(2, rng, 0.1);
    const double eps = eps_dist(rng);
    const TypicalityModel model(P(px), P(ps), Channel::FromRows(ch), eps);
    Xoshiro256 engine(t);
    const auto pattern = SamplePattern(n, P(ps), engine);
    const auto d1 = GenerateUnlabeled(m, n, P(px), StreamKey(5 * t));
    const auto labeling = SampleLabeling(m, engine);
    const auto d2 = ApplyRepetitionNoise(d1, pattern, labeling, Channel::FromRows(ch),
                                         StreamKey(5 * t + 1));
    const MarkedDatabase marked(d2, pattern);
    const PackedRows packed = PackedRows::Pack(d1, 2);
    const ChunkTable source = SourceChunkTable(model, n, packed.bits());
    const auto h = testing::EntropiesByTables(px, ps, ch);
    const std::vector<int> s_hat(pattern.counts().begin(), pattern.counts().end());
    const MatchReport report = MatchAll(d1, marked, model);
    for (std::size_t l = 0; l < m; ++l) {
      const RowScorer scorer(model, marked, l, source, packed.bits());
      testing::Rows cells;
      for (std::size_t j = 0; j < n; ++j) {
        const auto c = marked.Cell(l, j);
        cells.emplace_back(c.begin(), c.end());
      }
      int accepted = 0;
      for (std::size_t i = 0; i < m; ++i) {
        const std::vector<int> x(d1.Row(i).begin(), d1.Row(i).end());
        const bool oracle = testing::TypicalByProducts(x, cells, s_hat, px, ps, ch, h, eps);
        const bool fast = scorer.label_typical() && scorer.Accepts(packed.Row(i));
        EXPECT_EQ(fast, oracle) << "t=" << t << " l=" << l << " i=" << i;
        EXPECT_EQ(IsJointlyTypical(d1.Row(i), marked, l, model), oracle);
        accepted += oracle;
        ++total_checked;
      }
      const MatchOutcome expected = accepted == 0   ? MatchOutcome::kNone
                                    : accepted == 1 ? MatchOutcome::kMatched
                                                    : MatchOutcome::kAmbiguous;
      EXPECT_EQ(report.outcomes[l], expected);
      total_accepted += accepted;
    }
  }
  EXPECT_GT(total_accepted, total_checked / 20);
  EXPECT_LT(total_accepted, total_checked - total_checked / 20);
}

TEST(MatchAllTest, Examples) {
  const TypicalityModel model(Pmf::Uniform(2), P({0.0, 1.0}), Channel::Identity(2), 0.1);
  const SymbolMatrix d1 = FromRows({{0, 1, 1, 0}});
  const MarkedDatabase marked(d1, RepetitionPattern::FromCounts({1, 1, 1, 1}));
  const MatchReport single = Evaluate(MatchAll(d1, marked, model), Labeling::Identity(1));
  EXPECT_EQ(single.outcomes[0], MatchOutcome::kCorrect);
  EXPECT_EQ(single.error_rate, 0.0);

  const SymbolMatrix twins = FromRows({{0, 1, 1, 0}, {0, 1, 1, 0}});
  const MarkedDatabase one_label(d1, RepetitionPattern::FromCounts({1, 1, 1, 1}));
  const MatchReport ambiguous = MatchAll(twins, one_label, model);
  EXPECT_EQ(ambiguous.outcomes[0], MatchOutcome::kAmbiguous);
  EXPECT_FALSE(ambiguous.assignment[0].has_value());
}

TEST(MatchAllTest, ThreadCountDoesNotChangeResult) {
  const Pmf p_s = P({0.1, 0.8, 0.1});
  const Channel ch = Channel::Symmetric(3, 0.05);
  const TypicalityModel model(Pmf::Uniform(3), p_s, ch);
  Xoshiro256 rng(9);
  const auto pattern = SamplePattern(40, p_s, rng);
  const auto d1 = GenerateUnlabeled(300, 40, Pmf::Uniform(3), StreamKey(1));
  const auto labeling = SampleLabeling(300, rng);
  const auto d2 = ApplyRepetitionNoise(d1, pattern, labeling, ch, StreamKey(2));
  const MarkedDatabase marked(d2, pattern);
  const MatchReport one = Evaluate(MatchAll(d1, marked, model, {1}), labeling);
  const MatchReport four = Evaluate(MatchAll(d1, marked, model, {4}), labeling);
  EXPECT_EQ(one.assignment, four.assignment);
  EXPECT_EQ(one.outcomes, four.outcomes);
  EXPECT_NE(std::count(one.outcomes.begin(), one.outcomes.end(), MatchOutcome::kCorrect), 0);
}

TEST(MaxLikelihoodTest, RecoversNoiselessRows) {
  const TypicalityModel model(Pmf::Uniform(4), P({0.1, 0.9}), Channel::Identity(4));
  Xoshiro256 rng(10);
  const auto pattern = SamplePattern(30, P({0.1, 0.9}), rng);
  const auto d1 = GenerateUnlabeled(50, 30, Pmf::Uniform(4), StreamKey(3));
  const auto labeling = SampleLabeling(50, rng);
  const auto d2 = ApplyRepetitionNoise(d1, pattern, labeling, Channel::Identity(4), StreamKey(4));
  const MatchReport report =
      Evaluate(MatchAllMaxLikelihood(d1, MarkedDatabase(d2, pattern), model), labeling);
  EXPECT_EQ(report.error_rate, 0.0);
}

double GenieMeanError(double eps) {
  const Pmf p_x = Pmf::Uniform(2);
  const Pmf p_s = P({0.2, 0.5, 0.3});
  const Channel bsc = Channel::Symmetric(2, 0.1);
  const TypicalityModel model(p_x, p_s, bsc, eps);
  double total = 0.0;
  const int trials = 50;
  for (int t = 0; t < trials; ++t) {
    Xoshiro256 rng(600 + t);
    const auto pattern = SamplePattern(60, p_s, rng);
    const auto d1 = GenerateUnlabeled(64, 60, p_x, StreamKey(700 + t));
    const auto labeling = SampleLabeling(64, rng);
    const auto d2 = ApplyRepetitionNoise(d1, pattern, labeling, bsc, StreamKey(800 + t));
    total += Evaluate(MatchAll(d1, MarkedDatabase(d2, pattern), model), labeling).error_rate;
  }
  return total / trials;
}

// n = 60, m = 64 with the true pattern supplied to the matcher.
TEST(MatcherExampleTest, BinarySymmetricEpsilon012) { EXPECT_LE(GenieMeanError(0.12), 0.05); }

TEST(MatcherExampleTest, BinarySymmetricEpsilon035) { EXPECT_LE(GenieMeanError(0.35), 0.05); }

TEST(EvaluateTest, Examples) {
  MatchReport all;
  all.assignment = {1, 0, 2};
  all.outcomes.assign(3, MatchOutcome::kMatched);
  EXPECT_EQ(Evaluate(all, Labeling::FromPermutation({1, 0, 2})).error_rate, 0.0);

  MatchReport empty;
  empty.assignment.assign(3, std::nullopt);
  empty.outcomes.assign(3, MatchOutcome::kNone);
  EXPECT_EQ(Evaluate(empty, Labeling::Identity(3)).error_rate, 1.0);

  MatchReport half;
  half.assignment = {0, 1, std::nullopt, std::nullopt};
  half.outcomes = {MatchOutcome::kMatched, MatchOutcome::kMatched, MatchOutcome::kNone,
                   MatchOutcome::kAmbiguous};
  const MatchReport evaluated = Evaluate(half, Labeling::Identity(4));
  EXPECT_EQ(evaluated.error_rate, 0.5);
  EXPECT_EQ(evaluated.outcomes[0], MatchOutcome::kCorrect);

  MatchReport wrong;
  wrong.assignment = {1, 0};
  wrong.outcomes.assign(2, MatchOutcome::kMatched);
  const MatchReport w = Evaluate(wrong, Labeling::Identity(2));
  EXPECT_EQ(w.outcomes[0], MatchOutcome::kWrong);
  EXPECT_EQ(w.error_rate, 1.0);
}

TEST(MatchReportJsonTest, Shape) {
  MatchReport r;
  r.assignment = {2, std::nullopt};
  r.outcomes = {MatchOutcome::kCorrect, MatchOutcome::kNone};
  r.error_rate = 0.5;
  EXPECT_EQ(MatchReportToJson(r),
            R"({"assignment":{"0":2},"errorRate":0.5,"outcomes":["correct","none"]})");
}

}  // namespace
}  // namespace dbmatch
