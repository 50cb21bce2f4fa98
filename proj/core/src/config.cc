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

#include "dbmatch/config.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "dbmatch/error.h"

namespace dbmatch {
namespace {

using nlohmann::json;

[[noreturn]] void Fail(const std::string& message) {
  throw Error(ErrorCode::kConfig, message);
}

const json& Required(const json& root, const char* key) {
  const auto it = root.find(key);
  if (it == root.end()) Fail(std::string("missing required key \"") + key + "\"");
  return *it;
}

double GetNumber(const json& value, const char* key) {
  if (!value.is_number()) Fail(std::string("\"") + key + "\" must be a number");
  return value.get<double>();
}

std::uint64_t GetCount(const json& value, const char* key) {
  if (!value.is_number_integer() || value.get<std::int64_t>() < 0) {
    Fail(std::string("\"") + key + "\" must be a nonnegative integer");
  }
  return value.get<std::uint64_t>();
}

std::vector<double> GetNumbers(const json& value, const char* key) {
  if (!value.is_array()) Fail(std::string("\"") + key + "\" must be an array");
  std::vector<double> out;
  for (const json& v : value) out.push_back(GetNumber(v, key));
  return out;
}

std::vector<std::uint64_t> GetCounts(const json& value, const char* key) {
  if (!value.is_array()) Fail(std::string("\"") + key + "\" must be an array");
  std::vector<std::uint64_t> out;
  for (const json& v : value) out.push_back(GetCount(v, key));
  return out;
}

Pmf GetPmf(const json& value, const char* key) {
  try {
    return Pmf::FromProbabilities(GetNumbers(value, key));
  } catch (const Error& e) {
    Fail(std::string("\"") + key + "\": " + e.what());
  }
}

Channel GetChannel(const json& value, int alphabet_size) {
  if (!value.is_array() || value.empty()) Fail("\"channel\" must be a non-empty array");
  try {
    if (value.front().is_array()) {
      std::vector<std::vector<double>> rows;
      for (const json& row : value) rows.push_back(GetNumbers(row, "channel"));
      if (rows.size() != static_cast<std::size_t>(alphabet_size)) {
        Fail("\"channel\" needs alphabetSize rows");
      }
      return Channel::FromRows(rows);
    }
    const std::vector<double> flat = GetNumbers(value, "channel");
    return Channel::FromRowMajor(alphabet_size, flat);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    Fail(std::string("\"channel\": ") + e.what());
  }
}

template <typename Enum>
Enum GetChoice(const json& value, const char* key,
               std::initializer_list<std::pair<const char*, Enum>> choices) {
  if (value.is_string()) {
    for (const auto& [name, e] : choices) {
      if (value.get<std::string>() == name) return e;
    }
  }
  std::string names;
  for (const auto& [name, e] : choices) names += std::string(names.empty() ? "" : ", ") + name;
  Fail(std::string("\"") + key + "\" must be one of: " + names);
}

}  // namespace

ExperimentConfig ParseConfig(const std::string& json_text, ConfigScope scope) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    Fail(std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) Fail("top level must be an object");

  ExperimentConfig cfg;
  const std::uint64_t a = GetCount(Required(root, "alphabetSize"), "alphabetSize");
  if (a < 1 || a > static_cast<std::uint64_t>(kMaxAlphabetSize)) {
    Fail("\"alphabetSize\" must be in [1, " + std::to_string(kMaxAlphabetSize) + "]");
  }
  cfg.alphabet_size = static_cast<int>(a);
  cfg.p_x = GetPmf(Required(root, "pX"), "pX");
  if (cfg.p_x.size() != cfg.alphabet_size) Fail("\"pX\" needs alphabetSize entries");
  cfg.p_s = GetPmf(Required(root, "pS"), "pS");
  cfg.channel = GetChannel(Required(root, "channel"), cfg.alphabet_size);

  if (root.contains("sMaxCap")) cfg.s_max_cap = static_cast<int>(GetCount(root["sMaxCap"], "sMaxCap"));
  if (root.contains("sigmaCap")) cfg.sigma_cap = static_cast<int>(GetCount(root["sigmaCap"], "sigmaCap"));
  if (scope == ConfigScope::kDistributions) return cfg;

  cfg.n = GetCount(Required(root, "n"), "n");
  if (cfg.n < 1) Fail("\"n\" must be positive");
  const bool has_rate = root.contains("rate");
  const bool has_m = root.contains("m");
  if (has_rate == has_m) Fail("exactly one of \"rate\" and \"m\" is required");
  if (has_rate) {
    cfg.rate = GetNumber(root["rate"], "rate");
    if (!(*cfg.rate >= 0.0)) Fail("\"rate\" must be nonnegative");
  } else {
    cfg.m = GetCount(root["m"], "m");
    if (*cfg.m < 1) Fail("\"m\" must be positive");
  }
  const json& eps = Required(root, "epsilon");
  if (!(eps.is_string() && eps.get<std::string>() == "auto")) {
    cfg.epsilon = GetNumber(eps, "epsilon");
    if (!(*cfg.epsilon > 0.0)) Fail("\"epsilon\" must be positive");
  }
  const std::uint64_t trials = GetCount(Required(root, "trials"), "trials");
  if (trials < 1 || trials > 1'000'000'000) Fail("\"trials\" must be in [1, 1e9]");
  cfg.trials = static_cast<int>(trials);
  cfg.master_seed = GetCount(Required(root, "masterSeed"), "masterSeed");

  if (root.contains("tau")) cfg.tau = GetNumber(root["tau"], "tau");
  if (root.contains("seedRows")) cfg.seed_rows = GetCount(root["seedRows"], "seedRows");
  if (root.contains("seedOrder")) {
    cfg.seed_order = GetNumber(root["seedOrder"], "seedOrder");
    if (!(*cfg.seed_order >= 0.0)) Fail("\"seedOrder\" must be nonnegative");
  }
  if (root.contains("seedSizing")) {
    cfg.seed_sizing = GetChoice<SeedSizing>(
        root["seedSizing"], "seedSizing",
        {{"expected", SeedSizing::kExpected}, {"realized", SeedSizing::kRealized}});
  }
  if (root.contains("searchCap")) cfg.search_cap = GetCount(root["searchCap"], "searchCap");
  if (root.contains("deletionSearch")) {
    cfg.deletion_search = GetChoice<DeletionSearch>(
        root["deletionSearch"], "deletionSearch",
        {{"exhaustive", DeletionSearch::kExhaustive},
         {"dp", DeletionSearch::kDynamicProgramming}});
  }
  if (root.contains("decoder")) {
    cfg.decoder = GetChoice<Decoder>(
        root["decoder"], "decoder",
        {{"typicality", Decoder::kTypicality}, {"ml", Decoder::kMaxLikelihood}});
  }
  if (root.contains("fullMatchCap")) cfg.full_match_cap = GetCount(root["fullMatchCap"], "fullMatchCap");
  if (root.contains("probeRows")) cfg.probe_rows = GetCount(root["probeRows"], "probeRows");
  if (root.contains("rivalStateCap")) cfg.rival_state_cap = GetCount(root["rivalStateCap"], "rivalStateCap");
  if (root.contains("replicaRowsCap")) cfg.replica_rows_cap = GetCount(root["replicaRowsCap"], "replicaRowsCap");
  if (root.contains("memoryCap")) cfg.memory_cap = GetCount(root["memoryCap"], "memoryCap");
  if (cfg.probe_rows < 1 || cfg.rival_state_cap < 1 || cfg.replica_rows_cap < 1) {
    Fail("\"probeRows\", \"rivalStateCap\" and \"replicaRowsCap\" must be positive");
  }
  if (root.contains("rateGrid")) cfg.rate_grid = GetNumbers(root["rateGrid"], "rateGrid");
  if (root.contains("benchRows")) cfg.bench_rows = GetCounts(root["benchRows"], "benchRows");
  if (root.contains("benchSeedRows")) cfg.bench_seed_rows = GetCounts(root["benchSeedRows"], "benchSeedRows");
  for (double r : cfg.rate_grid) {
    if (!(r >= 0.0)) Fail("\"rateGrid\" entries must be nonnegative");
  }
  for (std::uint64_t rows : cfg.bench_rows) {
    if (rows < 1) Fail("\"benchRows\" entries must be positive");
  }
  return cfg;
}

ExperimentConfig LoadConfig(const std::string& path, ConfigScope scope) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return ParseConfig(text.str(), scope);
}

std::uint64_t RowsForRate(std::size_t n, double rate) {
  const double exponent = static_cast<double>(n) * rate;
  if (exponent > 62.0) {
    throw Error(ErrorCode::kSizeOverflow,
                "2^(nR) = 2^" + std::to_string(exponent) + " rows is out of range");
  }
  const auto m = static_cast<std::uint64_t>(std::llround(std::exp2(exponent)));
  return std::max<std::uint64_t>(2, m);
}

std::uint64_t EffectiveRows(const ExperimentConfig& config) {
  if (config.m) return *config.m;
  if (!config.rate) throw Error(ErrorCode::kConfig, "neither rate nor m is set");
  return RowsForRate(config.n, *config.rate);
}

}  // namespace dbmatch
