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
#include <cstdint>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "dbmatch/error.h"
#include "dbmatch/parallel.h"

namespace dbmatch {
namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

double SafeLog2(double p) { return p > 0.0 ? std::log2(p) : -kInfinity; }

}  // namespace

MarkedDatabase::MarkedDatabase(LabeledDatabase d2, RepetitionPattern s_hat)
    : d2_(std::move(d2)), s_hat_(std::move(s_hat)) {
  if (s_hat_.total() != d2_.cols()) {
    throw Error(ErrorCode::kArityMismatch,
                "pattern estimate accounts for " + std::to_string(s_hat_.total()) +
                    " columns but the labeled database has " +
                    std::to_string(d2_.cols()));
  }
  offsets_.resize(s_hat_.size());
  std::size_t offset = 0;
  for (std::size_t j = 0; j < s_hat_.size(); ++j) {
    offsets_[j] = offset;
    offset += static_cast<std::size_t>(s_hat_[j]);
  }
}

MarkedDatabase BuildMarked(const LabeledDatabase& d2,
                           const RepetitionPattern& s_hat) {
  return MarkedDatabase(d2, s_hat);
}

double TripleLogProb(Symbol x, std::span<const Symbol> cell, int s,
                     const Pmf& p_x, const Channel& channel, const Pmf& p_s) {
  if (s < 0 || s >= p_s.size() || cell.size() != static_cast<std::size_t>(s)) {
    return -kInfinity;
  }
  double log_prob = SafeLog2(p_s[s]) + SafeLog2(p_x[x]);
  for (Symbol y : cell) log_prob += SafeLog2(channel(x, y));
  return log_prob;
}

TypicalityModel::TypicalityModel(Pmf p_x, Pmf p_s, Channel channel,
                                 std::optional<double> epsilon,
                                 const CapacityOptions& options)
    : p_x_(std::move(p_x)), p_s_(std::move(p_s)), channel_(std::move(channel)) {
  entropies_ = ComputeJointEntropies(p_x_, p_s_, channel_, options);
  epsilon_ = epsilon.value_or(0.1 * entropies_.xys);
  if (!(epsilon_ > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive");
  }
  source_surprisal_.resize(static_cast<std::size_t>(p_x_.size()));
  for (int x = 0; x < p_x_.size(); ++x) source_surprisal_[x] = -SafeLog2(p_x_[x]);
}

double TypicalityModel::CellSurprisal(std::span<const Symbol> cell, int s) const {
  if (s < 0 || s >= p_s_.size() || cell.size() != static_cast<std::size_t>(s)) {
    return kInfinity;
  }
  double marginal = 0.0;
  for (int x = 0; x < p_x_.size(); ++x) {
    double p = p_x_[x];
    for (Symbol y : cell) p *= channel_(x, y);
    marginal += p;
  }
  return -SafeLog2(p_s_[s]) - SafeLog2(marginal);
}

double TypicalityModel::TripleSurprisal(Symbol x, std::span<const Symbol> cell,
                                        int s) const {
  return -TripleLogProb(x, cell, s, p_x_, channel_, p_s_);
}

bool TypicalityModel::InWindow(double total, std::size_t n, double entropy) const {
  if (!std::isfinite(total)) return false;
  const double mean = n == 0 ? 0.0 : total / static_cast<double>(n);
  return std::abs(mean - entropy) <= epsilon_ + kTypicalitySlack;
}

bool IsJointlyTypical(std::span<const Symbol> x_row,
                      const MarkedDatabase& marked, std::size_t label,
                      const TypicalityModel& model) {
  const std::size_t n = marked.cols();
  if (x_row.size() != n) {
    throw Error(ErrorCode::kArityMismatch, "row length differs from marked arity");
  }
  double source = 0.0;
  double cell = 0.0;
  double joint = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const int s = marked.pattern()[j];
    const std::span<const Symbol> y = marked.Cell(label, j);
    source += model.SourceSurprisal(x_row[j]);
    cell += model.CellSurprisal(y, s);
    joint += model.TripleSurprisal(x_row[j], y, s);
  }
  const JointEntropies& h = model.entropies();
  return model.InWindow(source, n, h.x) && model.InWindow(cell, n, h.ys) &&
         model.InWindow(joint, n, h.xys);
}

ChunkTable SourceChunkTable(const TypicalityModel& model, std::size_t n,
                            int bits) {
  std::vector<double> per_symbol(static_cast<std::size_t>(model.alphabet_size()));
  for (int x = 0; x < model.alphabet_size(); ++x) {
    per_symbol[x] = model.SourceSurprisal(static_cast<Symbol>(x));
  }
  return ChunkTable(std::vector<std::vector<double>>(n, per_symbol), bits);
}

RowScorer::RowScorer(const TypicalityModel& model, const MarkedDatabase& marked,
                     std::size_t label, const ChunkTable& source_table, int bits)
    : source_table_(&source_table) {
  const std::size_t n = marked.cols();
  const int a = model.alphabet_size();
  std::vector<std::vector<double>> cost(n, std::vector<double>(static_cast<std::size_t>(a)));
  double cell_total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const int s = marked.pattern()[j];
    const std::span<const Symbol> y = marked.Cell(label, j);
    cell_total += model.CellSurprisal(y, s);
    for (int x = 0; x < a; ++x) {
      cost[j][x] = model.TripleSurprisal(static_cast<Symbol>(x), y, s);
    }
  }
  const JointEntropies& h = model.entropies();
  label_typical_ = model.InWindow(cell_total, n, h.ys);
  joint_table_ = ChunkTable(cost, bits);
  model_ = &model;
  n_ = n;
  joint_cutoff_ = static_cast<double>(n) *
                  (h.xys + model.epsilon() + 2.0 * kTypicalitySlack);
}

bool RowScorer::Accepts(std::span<const std::uint8_t> packed_row) const {
  double joint = 0.0;
  for (std::size_t b = 0; b < joint_table_.bytes(); ++b) {
    joint += joint_table_.Lookup(b, packed_row[b]);
    if (joint > joint_cutoff_) return false;
  }
  const JointEntropies& h = model_->entropies();
  return model_->InWindow(joint, n_, h.xys) &&
         model_->InWindow(source_table_->Sum(packed_row), n_, h.x);
}

double IndependentAcceptanceProbability(const TypicalityModel& model,
                                        const MarkedDatabase& marked,
                                        std::size_t label,
                                        const RivalOptions& options) {
  const std::size_t n = marked.cols();
  const int a = model.alphabet_size();
  const JointEntropies& h = model.entropies();
  double cell_total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    cell_total += model.CellSurprisal(marked.Cell(label, j), marked.pattern()[j]);
  }
  if (!model.InWindow(cell_total, n, h.ys)) return 0.0;

  constexpr double kUnit = 0x1p-32;
  const double dn = static_cast<double>(n);
  const double slack = dn * kUnit;
  const double source_cap = dn * (h.x + model.epsilon() + kTypicalitySlack) + slack;
  const double joint_cap = dn * (h.xys + model.epsilon() + kTypicalitySlack) + slack;
  struct State {
    std::int64_t source;
    std::int64_t joint;
    double prob;
  };
  std::vector<State> states{{0, 0, 1.0}};
  std::vector<State> next;
  std::vector<std::int64_t> source_q(static_cast<std::size_t>(a));
  for (int x = 0; x < a; ++x) {
    source_q[x] = std::llround(model.SourceSurprisal(static_cast<Symbol>(x)) / kUnit);
  }
  std::vector<std::int64_t> joint_q(static_cast<std::size_t>(a));
  std::vector<bool> possible(static_cast<std::size_t>(a));
  for (std::size_t j = 0; j < n; ++j) {
    const int s = marked.pattern()[j];
    const std::span<const Symbol> y = marked.Cell(label, j);
    for (int x = 0; x < a; ++x) {
      const double t = model.TripleSurprisal(static_cast<Symbol>(x), y, s);
      possible[x] = std::isfinite(t) && model.p_x()[x] > 0.0;
      joint_q[x] = possible[x] ? std::llround(t / kUnit) : 0;
    }
    next.clear();
    for (const State& st : states) {
      for (int x = 0; x < a; ++x) {
        if (!possible[x]) continue;
        const State moved{st.source + source_q[x], st.joint + joint_q[x],
                          st.prob * model.p_x()[x]};
        if (static_cast<double>(moved.source) * kUnit > source_cap ||
            static_cast<double>(moved.joint) * kUnit > joint_cap) {
          continue;
        }
        next.push_back(moved);
      }
    }
    std::sort(next.begin(), next.end(), [](const State& l, const State& r) {
      return l.source != r.source ? l.source < r.source : l.joint < r.joint;
    });
    states.clear();
    for (const State& st : next) {
      if (!states.empty() && states.back().source == st.source &&
          states.back().joint == st.joint) {
        states.back().prob += st.prob;
      } else {
        states.push_back(st);
      }
    }
    if (states.size() > options.max_states) {
      throw Error(ErrorCode::kEnumerationCapExceeded,
                  "rival acceptance needs more than " +
                      std::to_string(options.max_states) + " surprisal states");
    }
    if (states.empty()) return 0.0;
  }
  double accepted = 0.0;
  for (const State& st : states) {
    if (model.InWindow(static_cast<double>(st.source) * kUnit, n, h.x) &&
        model.InWindow(static_cast<double>(st.joint) * kUnit, n, h.xys)) {
      accepted += st.prob;
    }
  }
  return std::min(accepted, 1.0);
}

std::string_view MatchOutcomeName(MatchOutcome outcome) {
  switch (outcome) {
    case MatchOutcome::kMatched: return "matched";
    case MatchOutcome::kCorrect: return "correct";
    case MatchOutcome::kWrong: return "wrong";
    case MatchOutcome::kAmbiguous: return "ambiguous";
    case MatchOutcome::kNone: return "none";
  }
  return "unknown";
}

MatchReport MatchAll(const UnlabeledDatabase& d1, const MarkedDatabase& marked,
                     const TypicalityModel& model, const MatchOptions& options) {
  return MatchAll(PackedRows::Pack(d1, model.alphabet_size()), marked, model,
                  options);
}

MatchReport MatchAll(const PackedRows& d1, const MarkedDatabase& marked,
                     const TypicalityModel& model, const MatchOptions& options) {
  if (d1.cols() != marked.cols()) {
    throw Error(ErrorCode::kArityMismatch,
                "unlabeled database has " + std::to_string(d1.cols()) +
                    " columns, marked database " + std::to_string(marked.cols()));
  }
  const std::size_t labels = marked.rows();
  MatchReport report;
  report.assignment.assign(labels, std::nullopt);
  report.outcomes.assign(labels, MatchOutcome::kNone);
  const ChunkTable source_table = SourceChunkTable(model, d1.cols(), d1.bits());
  ParallelFor(labels, options.threads, [&](std::size_t l) {
    const RowScorer scorer(model, marked, l, source_table, d1.bits());
    if (!scorer.label_typical()) return;
    int found = 0;
    std::uint64_t match = 0;
    for (std::size_t i = 0; i < d1.rows() && found < 2; ++i) {
      if (scorer.Accepts(d1.Row(i))) {
        ++found;
        match = i;
      }
    }
    if (found == 1) {
      report.assignment[l] = match;
      report.outcomes[l] = MatchOutcome::kMatched;
    } else if (found >= 2) {
      report.outcomes[l] = MatchOutcome::kAmbiguous;
    }
  });
  return report;
}

MatchReport MatchAllMaxLikelihood(const UnlabeledDatabase& d1,
                                  const MarkedDatabase& marked,
                                  const TypicalityModel& model) {
  if (d1.cols() != marked.cols()) {
    throw Error(ErrorCode::kArityMismatch, "arity mismatch");
  }
  const std::size_t n = marked.cols();
  MatchReport report;
  report.assignment.assign(marked.rows(), std::nullopt);
  report.outcomes.assign(marked.rows(), MatchOutcome::kNone);
  for (std::size_t l = 0; l < marked.rows(); ++l) {
    double best = kInfinity;
    for (std::size_t i = 0; i < d1.rows(); ++i) {
      double surprisal = 0.0;
      for (std::size_t j = 0; j < n && surprisal < best; ++j) {
        surprisal += model.TripleSurprisal(d1(i, j), marked.Cell(l, j),
                                           marked.pattern()[j]);
      }
      if (surprisal < best) {
        best = surprisal;
        report.assignment[l] = i;
        report.outcomes[l] = MatchOutcome::kMatched;
      }
    }
  }
  return report;
}

MatchReport Evaluate(MatchReport report, const Labeling& truth) {
  if (truth.size() != report.outcomes.size()) {
    throw Error(ErrorCode::kArityMismatch, "report and labeling differ in size");
  }
  std::size_t errors = 0;
  for (std::size_t l = 0; l < report.outcomes.size(); ++l) {
    if (report.assignment[l]) {
      report.outcomes[l] = *report.assignment[l] == truth.Inverse(l)
                               ? MatchOutcome::kCorrect
                               : MatchOutcome::kWrong;
    }
    if (report.outcomes[l] != MatchOutcome::kCorrect) ++errors;
  }
  report.error_rate = report.outcomes.empty()
                          ? 0.0
                          : static_cast<double>(errors) /
                                static_cast<double>(report.outcomes.size());
  return report;
}

std::string MatchReportToJson(const MatchReport& report) {
  nlohmann::json assignment = nlohmann::json::object();
  for (std::size_t l = 0; l < report.assignment.size(); ++l) {
    if (report.assignment[l]) assignment[std::to_string(l)] = *report.assignment[l];
  }
  nlohmann::json outcomes = nlohmann::json::array();
  for (MatchOutcome o : report.outcomes) outcomes.push_back(MatchOutcomeName(o));
  nlohmann::json j;
  j["assignment"] = assignment;
  j["outcomes"] = outcomes;
  if (std::isnan(report.error_rate)) {
    j["errorRate"] = nullptr;
  } else {
    j["errorRate"] = report.error_rate;
  }
  return j.dump();
}

}  // namespace dbmatch
