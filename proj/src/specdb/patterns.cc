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
#include <cstdlib>

#include "absl/strings/str_cat.h"
#include "embedded_data.h"
#include "jsconform/specdb.h"
#include "nlohmann/json.hpp"

namespace jsconform::specdb {
namespace {

using nlohmann::json;

constexpr absl::string_view kStepKindNames[] = {"Let",    "If",   "Return",
                                                "Throw",  "Call", "Unparsed"};
constexpr absl::string_view kPredicateNames[] = {
    "IsUndefined", "Equals", "LessThan", "GreaterThan", "InRange", "IsType"};

absl::StatusOr<std::regex> CompileRegex(const json& j, absl::string_view where) {
  if (!j.is_string()) {
    return absl::InvalidArgumentError(absl::StrCat(where, ": expected a regex string"));
  }
  try {
    return std::regex(j.get<std::string>(), std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    return absl::InvalidArgumentError(
        absl::StrCat(where, ": bad regex: ", e.what()));
  }
}

int GroupOr(const json& j, const char* key) {
  return j.contains(key) && j[key].is_number_integer() ? j[key].get<int>() : 0;
}

}  // namespace

absl::string_view StepKindName(StepKind kind) {
  return kStepKindNames[static_cast<int>(kind)];
}

absl::StatusOr<StepKind> ParseStepKind(absl::string_view name) {
  for (int i = 0; i < 6; ++i) {
    if (kStepKindNames[i] == name) return static_cast<StepKind>(i);
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown step kind '", name, "'"));
}

absl::string_view PredicateName(Predicate p) {
  return kPredicateNames[static_cast<int>(p)];
}

absl::StatusOr<Predicate> ParsePredicate(absl::string_view name) {
  for (int i = 0; i < 6; ++i) {
    if (kPredicateNames[i] == name) return static_cast<Predicate>(i);
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown predicate '", name, "'"));
}

absl::StatusOr<PatternTable> PatternTable::FromJson(absl::string_view text) {
  json j = json::parse(text.begin(), text.end(), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError("pattern table is not a JSON object");
  }
  PatternTable table;
  for (const char* key : {"api_heading", "accessor_heading", "object_heading", "alias", "steps",
                          "boundaries", "conversions", "global_names",
                          "receiver_words"}) {
    if (!j.contains(key)) {
      return absl::InvalidArgumentError(absl::StrCat("pattern table: missing '", key, "'"));
    }
  }
  auto api = CompileRegex(j["api_heading"], "/api_heading");
  if (!api.ok()) return api.status();
  table.api_heading_ = *std::move(api);
  auto accessor = CompileRegex(j["accessor_heading"], "/accessor_heading");
  if (!accessor.ok()) return accessor.status();
  table.accessor_heading_ = *std::move(accessor);
  auto obj = CompileRegex(j["object_heading"], "/object_heading");
  if (!obj.ok()) return obj.status();
  table.object_heading_ = *std::move(obj);
  auto alias = CompileRegex(j["alias"], "/alias");
  if (!alias.ok()) return alias.status();
  table.alias_ = *std::move(alias);

  for (size_t i = 0; i < j["steps"].size(); ++i) {
    const json& s = j["steps"][i];
    const std::string where = absl::StrCat("/steps/", i);
    if (!s.is_object() || !s.contains("kind") || !s["kind"].is_string()) {
      return absl::InvalidArgumentError(absl::StrCat(where, ": missing kind"));
    }
    auto kind = ParseStepKind(s["kind"].get<std::string>());
    if (!kind.ok()) return kind.status();
    auto re = CompileRegex(s.value("regex", json()), where);
    if (!re.ok()) return re.status();
    table.steps_.push_back(
        {*kind, *std::move(re), GroupOr(s, "var"), GroupOr(s, "func")});
  }
  for (size_t i = 0; i < j["boundaries"].size(); ++i) {
    const json& b = j["boundaries"][i];
    const std::string where = absl::StrCat("/boundaries/", i);
    if (!b.is_object() || !b.contains("predicate") || !b["predicate"].is_string()) {
      return absl::InvalidArgumentError(absl::StrCat(where, ": missing predicate"));
    }
    auto pred = ParsePredicate(b["predicate"].get<std::string>());
    if (!pred.ok()) return pred.status();
    auto re = CompileRegex(b.value("regex", json()), where);
    if (!re.ok()) return re.status();
    BoundaryPattern p;
    p.predicate = *pred;
    p.re = *std::move(re);
    p.target_group = b.contains("target") ? GroupOr(b, "target") : 1;
    p.value_group = GroupOr(b, "value");
    p.lo_group = GroupOr(b, "lo");
    p.hi_group = GroupOr(b, "hi");
    p.type_group = GroupOr(b, "type");
    if (b.contains("type_literal")) {
      auto t = ParseJsType(b["type_literal"].get<std::string>());
      if (!t.ok()) return t.status();
      p.fixed_type = *t;
    }
    if (b.contains("value_literal")) {
      auto v = ValueFromJson(b["value_literal"]);
      if (!v.ok()) return v.status();
      p.fixed_value = *std::move(v);
    }
    table.boundaries_.push_back(std::move(p));
  }
  for (const auto& [func, type] : j["conversions"].items()) {
    auto t = ParseJsType(type.get<std::string>());
    if (!t.ok()) return t.status();
    table.conversions_.push_back({func, *t});
  }
  for (const auto& n : j["global_names"]) table.global_names_.push_back(n);
  for (const auto& w : j["receiver_words"]) table.receiver_words_.push_back(w);
  return table;
}

const PatternTable& PatternTable::Default() {
  static const PatternTable* table = [] {
    auto t = FromJson(data::kSpecPatterns);
    // The bundled table is validated by the unit tests; failing here means
    // the build embedded a broken data file.
    if (!t.ok()) std::abort();
    return new PatternTable(*std::move(t));
  }();
  return *table;
}

bool PatternTable::IsGlobalName(absl::string_view name) const {
  return std::find(global_names_.begin(), global_names_.end(), name) !=
         global_names_.end();
}

bool PatternTable::IsReceiverWord(absl::string_view word) const {
  return std::find(receiver_words_.begin(), receiver_words_.end(), word) !=
         receiver_words_.end();
}

std::optional<JsType> PatternTable::ConversionType(absl::string_view func) const {
  for (const auto& c : conversions_) {
    if (c.func == func) return c.type;
  }
  return std::nullopt;
}

}  // namespace jsconform::specdb
