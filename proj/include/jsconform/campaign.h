// Copyright 2026 The jsconform Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// End-to-end pipeline: generate programs, derive test cases, run them on
// the testbeds, deduplicate deviations, minimize and report the new ones.
// Every phase writes content-addressed artifacts under one output root, so
// an interrupted campaign resumes where it stopped.

#ifndef JSCONFORM_CAMPAIGN_H_
#define JSCONFORM_CAMPAIGN_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "jsconform/harness.h"
#include "nlohmann/json.hpp"

namespace jsconform::campaign {

struct CampaignConfig {
  std::filesystem::path output_root;
  std::filesystem::path testbeds;
  std::optional<std::filesystem::path> specdb;  // serialized db; bundled if unset
  uint64_t seed = 1;

  // Program generation.
  int programs = 100;
  int top_k = 10;
  int max_words = 5000;
  double keep_invalid = 0.2;
  double noise = 0.03;
  std::vector<std::string> external_generator;  // argv; built-in if empty
  std::vector<std::string> syntax_checker;      // argv; built-in if empty

  // Test data.
  int random_cases_per_site = 3;
  int max_cases = 0;  // 0 = no limit

  // Execution.
  std::chrono::milliseconds cap{10 * 60 * 1000};
  std::chrono::milliseconds timeout_floor{250};
  int jobs = 0;  // 0 = logical CPU count; not part of the config hash

  int reduce_budget = 2000;
  bool run_reduce = true;

  // The loaded config with defaults filled in; the hash is taken over it.
  nlohmann::json ToJson() const;
  std::string Hash() const;
};

// Parses a config file. Relative paths resolve against the file's directory.
absl::StatusOr<CampaignConfig> LoadConfig(const std::filesystem::path& path);
absl::StatusOr<CampaignConfig> ParseConfig(const nlohmann::json& json,
                                           const std::filesystem::path& base_dir);
// Checks everything a run needs up front: the testbed file (at least two
// testbeds), the spec db, generator settings.
absl::Status Validate(const CampaignConfig& cfg);

struct PhaseTiming {
  std::string phase;
  double seconds = 0;
  bool skipped = false;  // completed by an earlier run
};

struct CampaignReport {
  size_t generated = 0;
  size_t valid = 0;
  size_t invalid_kept = 0;
  size_t dropped = 0;
  size_t cases = 0;
  size_t executed = 0;
  std::map<std::string, size_t> verdicts;  // by outcome name
  size_t novel = 0;
  size_t suppressed = 0;
  size_t minimized = 0;
  std::vector<std::string> errors;
  std::vector<PhaseTiming> timings;  // written apart from the summary

  // Counts and errors only, so it is reproducible.
  nlohmann::json Summary() const;
};

enum class ExitCode { kOk = 0, kConfigError = 2, kPhaseFailure = 3 };

struct RunResult {
  CampaignReport report;
  ExitCode exit = ExitCode::kOk;
};

// Stops after the named phase when set ("generate", "mutate", "execute",
// "dedup", "reduce"), leaving a resumable state. Used to test resumption.
struct RunOptions {
  std::optional<std::string> stop_after;
};

// Runs or resumes the campaign in cfg.output_root. A root holding a state
// file from a different config is refused with a config error.
RunResult RunCampaign(const CampaignConfig& cfg, const RunOptions& options = {});

}  // namespace jsconform::campaign

#endif  // JSCONFORM_CAMPAIGN_H_
