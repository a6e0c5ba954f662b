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

#include "jsconform/dedup.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "embedded_data.h"
#include "jsconform/common.h"

namespace jsconform::dedup {
namespace {

using nlohmann::json;

constexpr char kNoneApi[] = "__none__";

std::vector<absl::string_view> Lines(absl::string_view text) {
  absl::ConsumeSuffix(&text, "\n");
  if (text.empty()) return {};
  return absl::StrSplit(text, '\n');
}

std::string EngineOf(absl::string_view testbed) {
  return std::string(testbed.substr(0, testbed.find('@')));
}

std::string Fence(absl::string_view body, absl::string_view lang = "") {
  std::string text(body);
  if (!text.empty() && text.back() != '\n') text += '\n';
  // A fence longer than any backtick run inside the body.
  size_t run = 0, longest = 0;
  for (char c : text) {
    run = c == '`' ? run + 1 : 0;
    longest = std::max(longest, run);
  }
  const std::string fence(std::max<size_t>(3, longest + 1), '`');
  return absl::StrCat(fence, lang, "\n", text, fence, "\n");
}

}  // namespace

std::string BugSignature::ToString() const {
  return absl::StrCat(engine_id, " / ", api.value_or("(none)"), " / ", behavior);
}

absl::StatusOr<BehaviorTable> BehaviorTable::FromJson(const json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("behavior table: not an object");
  BehaviorTable t;
  for (const char* section : {"exceptions", "outcomes"}) {
    if (!j.contains(section)) continue;
    if (!j[section].is_object()) {
      return absl::InvalidArgumentError(
          absl::StrCat("behavior table: /", section, " must be an object"));
    }
    for (const auto& [k, v] : j[section].items()) {
      if (!v.is_string()) {
        return absl::InvalidArgumentError(
            absl::StrCat("behavior table: /", section, "/", k, " must be a string"));
      }
      if (std::string(section) == "outcomes" && !harness::ParseOutcome(k).ok()) {
        return absl::InvalidArgumentError(
            absl::StrCat("behavior table: /outcomes/", k, ": unknown outcome"));
      }
      (std::string(section) == "exceptions" ? t.exceptions_ : t.outcomes_)[k] =
          v.get<std::string>();
    }
  }
  return t;
}

const BehaviorTable& BehaviorTable::Bundled() {
  static const BehaviorTable* table = [] {
    auto t = FromJson(json::parse(data::kBehaviors));
    if (!t.ok()) {
      std::fprintf(stderr, "bundled behavior table: %s\n", t.status().ToString().c_str());
      std::abort();
    }
    return new BehaviorTable(*std::move(t));
  }();
  return *table;
}

std::string BehaviorTable::ForException(absl::string_view name) const {
  auto it = exceptions_.find(name);
  if (it != exceptions_.end()) return it->second;
  return absl::StrCat("OtherException(", name, ")");
}

std::optional<std::string> BehaviorTable::ForOutcome(harness::Outcome outcome) const {
  auto it = outcomes_.find(harness::OutcomeName(outcome));
  if (it == outcomes_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> ExceptionName(absl::string_view output) {
  for (absl::string_view line : Lines(output)) {
    if (absl::ConsumePrefix(&line, "EXC ")) {
      line = absl::StripAsciiWhitespace(line);
      if (!line.empty()) return std::string(line);
    }
  }
  return std::nullopt;
}

std::string OutputShapeHash(absl::string_view deviant, absl::string_view majority) {
  const auto d = Lines(deviant);
  const auto m = Lines(majority);
  size_t first = 0;
  while (first < d.size() && first < m.size() && d[first] == m[first]) ++first;
  return ContentHash(absl::StrCat(d.size(), ":", m.size(), ":", first));
}

absl::StatusOr<std::vector<BugSignature>> SignatureOf(
    const harness::Verdict& verdict, const std::optional<std::string>& api,
    const BehaviorTable& table) {
  if (!harness::IsDeviating(verdict.outcome)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "verdict ", verdict.case_id, " is ", harness::OutcomeName(verdict.outcome),
        "; nothing to sign"));
  }
  std::vector<BugSignature> out;
  for (const std::string& tb : verdict.deviants) {
    BugSignature sig{EngineOf(tb), api, ""};
    if (auto fixed = table.ForOutcome(verdict.outcome)) {
      sig.behavior = *fixed;
    } else {
      auto it = verdict.deviant_outputs.find(tb);
      const std::string observed = it == verdict.deviant_outputs.end() ? "" : it->second;
      const std::string expected = verdict.majority_output.value_or("");
      const auto thrown = ExceptionName(observed);
      if (thrown && thrown != ExceptionName(expected)) {
        sig.behavior = table.ForException(*thrown);
      } else {
        sig.behavior = absl::StrCat("WrongValue(", OutputShapeHash(observed, expected), ")");
      }
    }
    out.push_back(std::move(sig));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

KnowledgeBase::InsertResult KnowledgeBase::Insert(const BugSignature& sig,
                                                  absl::string_view case_id) {
  auto [it, inserted] = leaves_.try_emplace(sig);
  if (inserted) {
    it->second.first_seen_case = std::string(case_id);
    it->second.seq = static_cast<int64_t>(leaves_.size());
  }
  ++it->second.count;
  return {inserted, it->second.count};
}

const KnowledgeBase::Leaf* KnowledgeBase::Find(const BugSignature& sig) const {
  auto it = leaves_.find(sig);
  return it == leaves_.end() ? nullptr : &it->second;
}

json KnowledgeBase::ToJson() const {
  json root = json::object();
  for (const auto& [sig, leaf] : leaves_) {
    root[sig.engine_id][sig.api.value_or(kNoneApi)][sig.behavior] = {
        {"count", leaf.count},
        {"first_seen_case", leaf.first_seen_case},
        {"seq", leaf.seq}};
  }
  return root;
}

absl::StatusOr<KnowledgeBase> KnowledgeBase::FromJson(const json& root) {
  if (!root.is_object()) return absl::InvalidArgumentError("kb: root must be an object");
  KnowledgeBase kb;
  for (const auto& [engine, apis] : root.items()) {
    if (!apis.is_object()) return absl::InvalidArgumentError(absl::StrCat("kb: /", engine));
    for (const auto& [api, behaviors] : apis.items()) {
      const std::string where = absl::StrCat("kb: /", engine, "/", api);
      if (!behaviors.is_object()) return absl::InvalidArgumentError(where);
      for (const auto& [behavior, leaf] : behaviors.items()) {
        if (!leaf.is_object() || !leaf.contains("count") ||
            !leaf["count"].is_number_integer() || leaf["count"].get<int64_t>() < 1) {
          return absl::InvalidArgumentError(
              absl::StrCat(where, "/", behavior, "/count: positive integer required"));
        }
        BugSignature sig{engine, api == kNoneApi ? std::nullopt : std::optional(api),
                         behavior};
        Leaf l;
        l.count = leaf["count"].get<int64_t>();
        l.first_seen_case = leaf.value("first_seen_case", "");
        l.seq = leaf.value("seq", int64_t{0});
        kb.leaves_[sig] = l;
      }
    }
  }
  return kb;
}

absl::StatusOr<KnowledgeBase> KnowledgeBase::Load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return KnowledgeBase();
  auto text = ReadFile(path);
  if (!text.ok()) return text.status();
  json j = json::parse(*text, nullptr, false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat(path.string(), ": not valid JSON"));
  }
  return FromJson(j);
}

absl::Status KnowledgeBase::Save(const std::filesystem::path& path) const {
  return WriteFileAtomic(path, ToJson().dump(2) + "\n");
}

FilterResult FilterStream(KnowledgeBase& kb, const std::vector<harness::Verdict>& verdicts,
                          const ApiLookup& api_of) {
  FilterResult r;
  for (const harness::Verdict& v : verdicts) {
    if (!harness::IsDeviating(v.outcome)) continue;
    auto sigs = SignatureOf(v, api_of ? api_of(v.case_id) : std::nullopt);
    if (!sigs.ok() || sigs->empty()) {
      ++r.unsigned_verdicts;
      continue;
    }
    bool novel = false;
    for (const BugSignature& s : *sigs) novel |= kb.Insert(s, v.case_id).novel;
    if (novel) {
      r.novel.push_back(v);
    } else {
      ++r.suppressed;
    }
    r.signatures[v.case_id] = *std::move(sigs);
  }
  return r;
}

std::string RenderReport(const ReportInput& in) {
  const harness::Verdict& v = in.verdict;
  std::vector<std::string> engines;
  for (const BugSignature& s : in.signatures) engines.push_back(s.engine_id);
  engines.erase(std::unique(engines.begin(), engines.end()), engines.end());
  const std::string api = in.signatures.empty() || !in.signatures[0].api
                              ? "no API call"
                              : *in.signatures[0].api;
  std::string md = absl::StrCat("# ", harness::OutcomeName(v.outcome), " on ",
                                absl::StrJoin(engines, ", "), " (", api, ")\n\n");
  absl::StrAppend(&md, "- Case: `", v.case_id, "`\n");
  absl::StrAppend(&md, "- Deviant testbeds: ");
  std::vector<std::string> quoted;
  for (const std::string& d : v.deviants) quoted.push_back(absl::StrCat("`", d, "`"));
  absl::StrAppend(&md, absl::StrJoin(quoted, ", "), "\n");
  if (!in.spec_section.empty()) absl::StrAppend(&md, "- Spec section: ", in.spec_section, "\n");
  absl::StrAppend(&md, "- Signatures:\n");
  for (const BugSignature& s : in.signatures) absl::StrAppend(&md, "  - ", s.ToString(), "\n");
  if (!v.note.empty()) absl::StrAppend(&md, "- Note: ", v.note, "\n");
  absl::StrAppend(&md, "\n## Expected (majority)\n\n",
                  Fence(v.majority_output ? *v.majority_output : "(no majority)"));
  absl::StrAppend(&md, "\n## Observed\n");
  for (const auto& [tb, out] : v.deviant_outputs) {
    absl::StrAppend(&md, "\n`", tb, "`:\n\n", Fence(out.empty() ? "(empty output)" : out));
  }
  absl::StrAppend(&md, "\n## Test case", in.minimized ? " (minimized)" : "", "\n\n",
                  Fence(in.source, "js"));
  return md;
}

}  // namespace jsconform::dedup
