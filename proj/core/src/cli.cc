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

#include "dbmatch/cli.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "dbmatch/config.h"
#include "dbmatch/error.h"
#include "dbmatch/experiments.h"
#include "dbmatch/reports.h"

namespace dbmatch {
namespace {

struct CommonFlags {
  std::string config;
  std::string out;
  std::string format = "csv";
  int threads = 1;
  std::optional<std::uint64_t> seed;
  bool timing = false;
};

void AddCommonFlags(CLI::App* command, CommonFlags& flags, bool experiment) {
  command->add_option("--config", flags.config, "Experiment config (JSON)")->required();
  command->add_option("--out", flags.out, "Output file; stdout when omitted");
  command->add_option("--format", flags.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  if (!experiment) return;
  command->add_option("--threads", flags.threads, "Worker threads")
      ->check(CLI::PositiveNumber);
  command->add_option("--seed", flags.seed, "Overrides masterSeed");
  command->add_flag("--timing", flags.timing, "Include wall-clock times");
}

void Emit(const CommonFlags& flags, const std::string& text, std::ostream& out) {
  if (flags.out.empty()) {
    out << text;
    return;
  }
  const std::filesystem::path target(flags.out);
  std::filesystem::path temp = target;
  temp += ".partial";
  {
    std::ofstream file(temp, std::ios::binary | std::ios::trunc);
    if (!file) throw Error(ErrorCode::kIo, "cannot write '" + flags.out + "'");
    file << text;
    file.close();
    if (!file) {
      std::filesystem::remove(temp);
      throw Error(ErrorCode::kIo, "cannot write '" + flags.out + "'");
    }
  }
  std::filesystem::rename(temp, target);
}

ExperimentConfig LoadExperiment(const CommonFlags& flags) {
  ExperimentConfig cfg = LoadConfig(flags.config);
  if (flags.seed) cfg.master_seed = *flags.seed;
  return cfg;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Seeded database matching under noisy column repetitions"};
  app.require_subcommand(1);
  CommonFlags flags;
  std::vector<double> rates;

  CLI::App* capacity = app.add_subcommand("capacity", "Matching capacity and its decomposition");
  AddCommonFlags(capacity, flags, false);
  CLI::App* simulate = app.add_subcommand("simulate", "Run the configured trials");
  AddCommonFlags(simulate, flags, true);
  CLI::App* sweep = app.add_subcommand("sweep", "Sweep the growth rate");
  AddCommonFlags(sweep, flags, true);
  sweep->add_option("--rates", rates, "Rate grid; overrides rateGrid")->delimiter(',');
  CLI::App* bench = app.add_subcommand("detect-bench", "Replica and deletion detection rates");
  AddCommonFlags(bench, flags, true);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    const ReportOptions report{flags.timing};
    const bool json = flags.format == "json";
    if (capacity->parsed()) {
      const ExperimentConfig cfg = LoadConfig(flags.config, ConfigScope::kDistributions);
      CapacityOptions options;
      options.max_repetitions = cfg.s_max_cap;
      // Capacity() verifies the decomposition against the joint computation.
      Capacity(cfg.p_x, cfg.p_s, cfg.channel, options);
      const CapacityBreakdown c = ComputeCapacityBreakdown(cfg.p_x, cfg.p_s, cfg.channel, options);
      Emit(flags, json ? CapacityJson(c, cfg.p_s) : CapacityCsv(c), out);
      return 0;
    }
    const Experiment experiment(LoadExperiment(flags));
    if (experiment.setup_error()) {
      err << "warning: " << experiment.setup_error()->what()
          << "; all trials are infrastructure failures\n";
    }
    if (simulate->parsed()) {
      const std::vector<TrialRecord> records = RunSimulation(experiment, flags.threads);
      Emit(flags, json ? TrialsJson(experiment, records, report) : TrialsCsv(records, report), out);
    } else if (sweep->parsed()) {
      if (rates.empty()) rates = experiment.config().rate_grid;
      const SweepResult result = RunSweep(experiment, rates, flags.threads);
      if (result.low_trial_count) {
        err << "warning: fewer than " << kRecommendedMinTrials
            << " completed trials at some grid point; intervals are rough\n";
      }
      Emit(flags, json ? SweepJson(result, report) : SweepCsv(result), out);
    } else if (bench->parsed()) {
      const BenchSummary summary = DetectionBench(experiment, flags.threads);
      Emit(flags, json ? BenchJson(summary) : BenchCsv(summary), out);
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace dbmatch
