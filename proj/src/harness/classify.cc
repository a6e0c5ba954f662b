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

#include <algorithm>
#include <map>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "jsconform/common.h"
#include "jsconform/harness.h"

namespace jsconform::harness {
namespace {

using nlohmann::json;

constexpr struct {
  Outcome outcome;
  absl::string_view name;
} kOutcomes[] = {
    {Outcome::kPass, "Pass"},
    {Outcome::kDiscarded, "Discarded"},
    {Outcome::kInconsistentParse, "InconsistentParse"},
    {Outcome::kWrongOutput, "WrongOutput"},
    {Outcome::kRuntimeCrash, "RuntimeCrash"},
    {Outcome::kRuntimeTimeout, "RuntimeTimeout"},
    {Outcome::kNoMajority, "NoMajority"},
};

}  // namespace

absl::string_view OutcomeName(Outcome outcome) {
  for (const auto& o : kOutcomes) {
    if (o.outcome == outcome) return o.name;
  }
  return "Pass";
}

absl::StatusOr<Outcome> ParseOutcome(absl::string_view name) {
  for (const auto& o : kOutcomes) {
    if (o.name == name) return o.outcome;
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown outcome '", name, "'"));
}

bool IsDeviating(Outcome outcome) {
  return outcome != Outcome::kPass && outcome != Outcome::kDiscarded;
}

std::string CanonicalizeOutput(absl::string_view text) {
  std::vector<std::string> lines;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    lines.emplace_back(absl::StripTrailingAsciiWhitespace(line));
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  std::string out;
  for (const std::string& l : lines) absl::StrAppend(&out, l, "\n");
  return out;
}

std::string ExecutionResult::Observable() const {
  if (exit_code == 0) return stdout_text;
  return absl::StrCat(stdout_text, "<nonzero exit>\n");
}

absl::StatusOr<Verdict> Classify(const std::vector<ExecutionResult>& results,
                                 const TimeoutPolicy& policy) {
  using Phase = ExecutionResult::Phase;
  using Exit = ExecutionResult::Exit;
  if (results.size() < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("differential classification needs two results, got ",
                     results.size()));
  }
  Verdict v;
  v.case_id = results[0].case_id;
  for (const ExecutionResult& r : results) {
    v.durations[r.testbed] = r.duration.count();
  }
  auto finish = [&](Outcome o, std::vector<std::string> deviants,
                    const std::function<std::string(const ExecutionResult&)>& show) {
    v.outcome = o;
    std::sort(deviants.begin(), deviants.end());
    v.deviants = std::move(deviants);
    for (const ExecutionResult& r : results) {
      if (std::binary_search(v.deviants.begin(), v.deviants.end(), r.testbed)) {
        v.deviant_outputs[r.testbed] = show(r);
      }
    }
    return v;
  };

  // (a), (b): parsing.
  std::vector<std::string> parse_failed;
  for (const ExecutionResult& r : results) {
    if (r.phase == Phase::kParseFail) parse_failed.push_back(r.testbed);
  }
  if (parse_failed.size() == results.size()) {
    return finish(Outcome::kDiscarded, {}, nullptr);
  }
  if (!parse_failed.empty()) {
    return finish(Outcome::kInconsistentParse, parse_failed,
                  [](const ExecutionResult&) { return std::string("PARSEFAIL"); });
  }

  // (c): timeouts. Each engine is judged against the slowest of the other
  // engines that completed, so a lone slow engine cannot set its own bar.
  bool any_completed = false;
  for (const ExecutionResult& r : results) any_completed |= r.exit != Exit::kTimedOut;
  if (!any_completed) {
    v.note = "no engine finished within the absolute cap";
    return finish(Outcome::kDiscarded, {}, nullptr);
  }
  std::vector<std::string> slow;
  for (size_t i = 0; i < results.size(); ++i) {
    if (results[i].exit == Exit::kTimedOut) {
      slow.push_back(results[i].testbed);
      continue;
    }
    std::chrono::milliseconds t{-1};
    for (size_t j = 0; j < results.size(); ++j) {
      if (j != i && results[j].exit != Exit::kTimedOut) t = std::max(t, results[j].duration);
    }
    if (t.count() < 0) continue;
    const double limit = std::max(policy.factor * static_cast<double>(t.count()),
                                  static_cast<double>(policy.floor.count()));
    if (static_cast<double>(results[i].duration.count()) > limit) {
      slow.push_back(results[i].testbed);
    }
  }
  if (!slow.empty()) {
    return finish(Outcome::kRuntimeTimeout, slow,
                  [](const ExecutionResult&) { return std::string("TIMEOUT"); });
  }

  // (d): crashes.
  std::vector<std::string> crashed;
  for (const ExecutionResult& r : results) {
    if (r.exit == Exit::kCrashed) crashed.push_back(r.testbed);
  }
  if (!crashed.empty()) {
    return finish(Outcome::kRuntimeCrash, crashed, [](const ExecutionResult& r) {
      return absl::StrCat("CRASH ", r.signal);
    });
  }

  // (e): strict-majority vote over observable output.
  std::map<std::string, size_t> votes;
  for (const ExecutionResult& r : results) ++votes[r.Observable()];
  const std::string* winner = nullptr;
  for (const auto& [out, n] : votes) {
    if (2 * n > results.size()) winner = &out;
  }
  if (winner == nullptr) {
    v.note = absl::StrCat(votes.size(), " distinct outputs, no strict majority");
    return finish(Outcome::kNoMajority, {}, nullptr);
  }
  v.majority_output = *winner;
  if (votes.size() == 1) return finish(Outcome::kPass, {}, nullptr);
  std::vector<std::string> wrong;
  for (const ExecutionResult& r : results) {
    if (r.Observable() != *winner) wrong.push_back(r.testbed);
  }
  return finish(Outcome::kWrongOutput, wrong,
                [](const ExecutionResult& r) { return r.Observable(); });
}

json Verdict::ToLogRecord() const {
  json rec = {{"case", case_id},
              {"outcome", OutcomeName(outcome)},
              {"deviants", deviants}};
  rec["majority_output_hash"] =
      majority_output ? json(ContentHash(*majority_output)) : json(nullptr);
  if (majority_output) rec["majority_output"] = *majority_output;
  if (!deviant_outputs.empty()) rec["deviant_outputs"] = deviant_outputs;
  if (!note.empty()) rec["note"] = note;
  return rec;
}

absl::StatusOr<Verdict> Verdict::FromLogRecord(const json& j) {
  if (!j.is_object() || !j.contains("case") || !j["case"].is_string() ||
      !j.contains("outcome") || !j["outcome"].is_string()) {
    return absl::InvalidArgumentError("verdict record: needs string /case and /outcome");
  }
  Verdict v;
  v.case_id = j["case"].get<std::string>();
  auto o = ParseOutcome(j["outcome"].get<std::string>());
  if (!o.ok()) return o.status();
  v.outcome = *o;
  try {
    if (j.contains("deviants")) v.deviants = j["deviants"].get<std::vector<std::string>>();
    if (j.contains("majority_output") && j["majority_output"].is_string()) {
      v.majority_output = j["majority_output"].get<std::string>();
    }
    if (j.contains("deviant_outputs")) {
      v.deviant_outputs =
          j["deviant_outputs"].get<std::map<std::string, std::string>>();
    }
    v.note = j.value("note", "");
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("verdict record: ", e.what()));
  }
  return v;
}

}  // namespace jsconform::harness
