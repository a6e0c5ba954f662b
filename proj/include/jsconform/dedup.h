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

// Three-layer knowledge tree (engine, API, behavior) that recognizes
// deviations already seen, so repeated symptoms are reported once.

#ifndef JSCONFORM_DEDUP_H_
#define JSCONFORM_DEDUP_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "jsconform/harness.h"
#include "nlohmann/json.hpp"

namespace jsconform::dedup {

struct BugSignature {
  std::string engine_id;
  std::optional<std::string> api;  // nullopt is the explicit "no API" leaf
  // Canonical class: "TypeError", "RangeError", "SyntaxError",
  // "ReferenceError", "OtherException(<name>)", "WrongValue(<hash>)",
  // "Crash" or "TimeOut".
  std::string behavior;

  auto operator<=>(const BugSignature&) const = default;
  std::string ToString() const;
};

// Maps exception names and outcomes to behavior classes.
class BehaviorTable {
 public:
  static absl::StatusOr<BehaviorTable> FromJson(const nlohmann::json& json);
  static const BehaviorTable& Bundled();

  std::string ForException(absl::string_view name) const;
  std::optional<std::string> ForOutcome(harness::Outcome outcome) const;

 private:
  std::map<std::string, std::string, std::less<>> exceptions_;
  std::map<std::string, std::string, std::less<>> outcomes_;
};

// Name from the first "EXC <Name>" line of a driver's output.
std::optional<std::string> ExceptionName(absl::string_view output);

// Hash of (deviant line count, majority line count, first differing line).
std::string OutputShapeHash(absl::string_view deviant, absl::string_view majority);

// One signature per deviant engine (strict and normal testbeds of an engine
// collapse). `api` comes from the case meta. Pass and Discarded verdicts
// have nothing to sign.
absl::StatusOr<std::vector<BugSignature>> SignatureOf(
    const harness::Verdict& verdict, const std::optional<std::string>& api,
    const BehaviorTable& table = BehaviorTable::Bundled());

class KnowledgeBase {
 public:
  struct Leaf {
    int64_t count = 0;
    std::string first_seen_case;
    int64_t seq = 0;  // creation order
  };
  struct InsertResult {
    bool novel = false;
    int64_t count = 0;
  };

  InsertResult Insert(const BugSignature& sig, absl::string_view case_id);
  const Leaf* Find(const BugSignature& sig) const;
  size_t leaf_count() const { return leaves_.size(); }

  // {engine: {api or "__none__": {behavior: {count, first_seen_case, seq}}}}
  nlohmann::json ToJson() const;
  static absl::StatusOr<KnowledgeBase> FromJson(const nlohmann::json& json);
  static absl::StatusOr<KnowledgeBase> Load(const std::filesystem::path& path);
  absl::Status Save(const std::filesystem::path& path) const;

 private:
  std::map<BugSignature, Leaf> leaves_;
};

using ApiLookup =
    std::function<std::optional<std::string>(const std::string& case_id)>;

struct FilterResult {
  std::vector<harness::Verdict> novel;
  size_t suppressed = 0;
  // Deviating verdicts without a signature (NoMajority has no deviants).
  size_t unsigned_verdicts = 0;
  std::map<std::string, std::vector<BugSignature>> signatures;  // by case id
};

// A verdict is novel iff any of its signatures is new to `kb`.
FilterResult FilterStream(KnowledgeBase& kb,
                          const std::vector<harness::Verdict>& verdicts,
                          const ApiLookup& api_of);

struct ReportInput {
  harness::Verdict verdict;
  std::vector<BugSignature> signatures;
  std::string source;            // minimized when available
  bool minimized = false;
  std::string spec_section;      // from the API's spec entry, may be empty
};

// Markdown bug report. Deterministic in its input.
std::string RenderReport(const ReportInput& in);

}  // namespace jsconform::dedup

#endif  // JSCONFORM_DEDUP_H_
