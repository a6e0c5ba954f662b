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

// Runs test cases on engine testbeds and classifies the cross-engine
// results into one of seven outcomes by majority vote.

#ifndef JSCONFORM_HARNESS_H_
#define JSCONFORM_HARNESS_H_

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "jsconform/datagen.h"
#include "nlohmann/json.hpp"

namespace jsconform::harness {

enum class Mode { kNormal, kStrict };
absl::string_view ModeName(Mode mode);

// One entry of the testbed config file. Each entry yields one testbed per
// mode.
struct EngineConfig {
  std::string engine_id;
  std::string version;
  std::string binary;
  // Arguments after the binary; "{FILE}" is replaced by the case path.
  std::vector<std::string> argv_template = {"{FILE}"};
  std::vector<std::string> editions = {"ES5"};
  std::vector<Mode> modes = {Mode::kNormal, Mode::kStrict};
  std::map<std::string, std::string> env;
  // Key into the parse-error table; defaults to engine_id.
  std::string parse_profile;
};

struct Testbed {
  std::string engine_id;
  std::string version;
  std::string binary;
  std::vector<std::string> argv_template;
  Mode mode = Mode::kNormal;
  std::string edition;  // newest supported edition
  std::map<std::string, std::string> env;
  std::string parse_profile;

  // "<engine>@<version>/<mode>", unique within a campaign.
  std::string id() const;
};

absl::StatusOr<std::vector<EngineConfig>> ParseTestbedConfig(
    const nlohmann::json& json);
// Two testbeds per config (normal and strict unless `modes` narrows it).
// Fails on duplicate (engine, version, mode).
absl::StatusOr<std::vector<Testbed>> DeriveTestbeds(
    const std::vector<EngineConfig>& configs);
absl::StatusOr<std::vector<Testbed>> LoadTestbeds(
    const std::filesystem::path& path);

// Edition gating: which ES edition introduced an API.
class EditionTable {
 public:
  static absl::StatusOr<EditionTable> FromJson(const nlohmann::json& json);
  static const EditionTable& Bundled();

  // Position of `edition` in the edition order, or -1 when unknown.
  int Rank(absl::string_view edition) const;
  // Unlisted APIs are treated as ES5.
  bool Supports(const Testbed& tb, const std::vector<std::string>& apis) const;

 private:
  std::vector<std::string> order_;
  std::map<std::string, std::string, std::less<>> api_edition_;
};

// Per-engine stderr/stdout patterns that mark a parse (not runtime) error.
class ParseErrorTable {
 public:
  static absl::StatusOr<ParseErrorTable> FromJson(const nlohmann::json& json);
  static const ParseErrorTable& Bundled();

  bool IsParseFailure(absl::string_view profile, int exit_code,
                      absl::string_view stdout_text,
                      absl::string_view stderr_text) const;

 private:
  struct Rule {
    bool on_stdout = false;
    std::regex pattern;
  };
  std::map<std::string, std::vector<Rule>, std::less<>> profiles_;
  std::vector<Rule> fallback_;
};

struct TimeoutPolicy {
  // Runs are killed here; engines that all hit it are ignored.
  std::chrono::milliseconds absolute_cap{10 * 60 * 1000};
  // An engine timed out iff duration > max(factor * t, floor), t being the
  // slowest of the other engines that completed. The floor keeps scheduling
  // noise on millisecond runs from counting as a timeout.
  double factor = 2.0;
  std::chrono::milliseconds floor{250};
  size_t output_cap = 1 << 20;
};

struct ExecutionResult {
  enum class Phase { kParseFail, kRan };
  enum class Exit { kExited, kCrashed, kTimedOut };

  std::string testbed;
  std::string case_id;
  Phase phase = Phase::kRan;
  Exit exit = Exit::kExited;
  int exit_code = 0;
  int signal = 0;
  std::string stdout_text;  // canonicalized
  std::string stderr_text;
  std::chrono::milliseconds duration{0};

  // What the vote compares: stdout plus a marker for a nonzero exit.
  std::string Observable() const;
};

// Per-line trailing whitespace removed, CRLF folded, trailing blank lines
// dropped.
std::string CanonicalizeOutput(absl::string_view text);

enum class Outcome {
  kPass,
  kDiscarded,
  kInconsistentParse,
  kWrongOutput,
  kRuntimeCrash,
  kRuntimeTimeout,
  kNoMajority,
};
absl::string_view OutcomeName(Outcome outcome);
absl::StatusOr<Outcome> ParseOutcome(absl::string_view name);
bool IsDeviating(Outcome outcome);

struct Verdict {
  std::string case_id;
  Outcome outcome = Outcome::kPass;
  std::vector<std::string> deviants;  // testbed ids, sorted
  std::optional<std::string> majority_output;
  // Observable output (or "CRASH <sig>", "TIMEOUT", "PARSEFAIL") per
  // deviant, kept so signatures can be computed from the log alone.
  std::map<std::string, std::string> deviant_outputs;
  std::map<std::string, int64_t> durations;  // ms, not part of the log
  std::string note;

  // Deterministic log record (durations excluded).
  nlohmann::json ToLogRecord() const;
  static absl::StatusOr<Verdict> FromLogRecord(const nlohmann::json& json);
};

// The decision ladder: parse, then timeout, then crash, then output. Pure.
// Needs at least two results.
absl::StatusOr<Verdict> Classify(const std::vector<ExecutionResult>& results,
                                 const TimeoutPolicy& policy);

// A test case as the harness sees it.
struct Case {
  std::string id;
  std::string source;
  std::vector<std::string> apis;  // for edition gating
};
Case FromTestCase(const datagen::TestCase& tc);
// Reads `<id>.js` files and their optional `<id>.meta.json` siblings, sorted
// by id.
absl::StatusOr<std::vector<Case>> LoadCases(const std::filesystem::path& dir);
absl::Status WriteCase(const std::filesystem::path& dir,
                       const datagen::TestCase& tc);

// Runs one case on one testbed in a fresh working directory. Errors are
// testbed-level: the binary is missing or cannot be executed.
absl::StatusOr<ExecutionResult> RunTestbed(
    const Testbed& tb, const Case& c, const TimeoutPolicy& policy,
    const ParseErrorTable& table = ParseErrorTable::Bundled());

struct MatrixOptions {
  TimeoutPolicy policy;
  int jobs = 1;
  const ParseErrorTable* parse_table = nullptr;  // bundled when null
  const EditionTable* editions = nullptr;        // bundled when null
};

struct MatrixSummary {
  size_t cases = 0;
  size_t executions = 0;
  size_t skipped_by_edition = 0;
  std::vector<std::string> errors;  // testbed-level, aggregated
};

using VerdictSink = std::function<void(const Verdict&)>;

// Classifies every case exactly once, in input order. Executions run on
// `jobs` workers; the sink is called from the calling thread only.
MatrixSummary RunMatrix(const std::vector<Testbed>& testbeds,
                        const std::vector<Case>& cases,
                        const MatrixOptions& options, const VerdictSink& sink);

}  // namespace jsconform::harness

#endif  // JSCONFORM_HARNESS_H_
