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

// Canonical JSON form of the spec database. Keys are sorted (nlohmann's
// default object ordering), integral numbers are written without a
// fraction, and decoding rejects any field it does not know.

#include <cmath>
#include <set>

#include "absl/strings/str_cat.h"
#include "jsconform/specdb.h"
#include "nlohmann/json.hpp"

namespace jsconform::specdb {
namespace {

using nlohmann::json;

json NumberJson(double d) {
  if (std::isfinite(d) && d == std::trunc(d) && std::fabs(d) < 9.007199254740992e15 &&
      !(d == 0 && std::signbit(d))) {
    return static_cast<int64_t>(d);
  }
  return ValueToJson(Value::Number(d));
}

json BoundaryJson(const BoundaryCondition& bc) {
  json j = {{"target", bc.target},
            {"predicate", PredicateName(bc.predicate)},
            {"step", bc.origin_step}};
  switch (bc.predicate) {
    case Predicate::kIsUndefined:
      break;
    case Predicate::kInRange:
      j["value"] = json::array({NumberJson(bc.lo), NumberJson(bc.hi)});
      break;
    case Predicate::kIsType:
      j["value"] = JsTypeName(bc.type);
      break;
    default:
      j["value"] = ValueToJson(bc.value);
  }
  return j;
}

json ApiJson(const ApiSpec& api) {
  json params = json::array();
  for (const ParamSpec& p : api.parameters) {
    json types = json::array();
    for (JsType t : p.declared_types) types.push_back(JsTypeName(t));
    json boundaries = json::array();
    for (const auto& bc : p.boundaries) boundaries.push_back(BoundaryJson(bc));
    json pj = {{"name", p.name},
               {"types", types},
               {"optional", p.optional},
               {"boundaries", boundaries}};
    if (p.value_range) {
      pj["range"] = json::array(
          {NumberJson(p.value_range->first), NumberJson(p.value_range->second)});
    }
    params.push_back(std::move(pj));
  }
  json steps = json::array();
  for (const SpecStep& s : api.steps) {
    json sj = {{"i", s.index},
               {"kind", StepKindName(s.kind)},
               {"raw", s.raw_text},
               {"boundary", s.boundary_tag}};
    if (s.var) sj["var"] = *s.var;
    if (s.func) sj["func"] = *s.func;
    steps.push_back(std::move(sj));
  }
  json receiver = json::array();
  for (const auto& bc : api.receiver_boundaries) receiver.push_back(BoundaryJson(bc));
  return {{"name", api.name},
          {"receiver", api.receiver_type},
          {"section", api.source_section},
          {"params", params},
          {"steps", steps},
          {"prose_only", api.prose_only},
          {"receiver_boundaries", receiver}};
}

// Decoding helpers. Each takes the JSON-pointer path of the value so errors
// can name the offending location.
absl::Status SchemaError(const std::string& path, absl::string_view what) {
  return absl::InvalidArgumentError(absl::StrCat("schema violation at ", path, ": ", what));
}

absl::Status CheckFields(const json& j, const std::string& path,
                         const std::set<std::string>& required,
                         const std::set<std::string>& optional) {
  if (!j.is_object()) return SchemaError(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!required.count(key) && !optional.count(key)) {
      return SchemaError(absl::StrCat(path, "/", key), "unknown field");
    }
  }
  for (const std::string& key : required) {
    if (!j.contains(key)) return SchemaError(absl::StrCat(path, "/", key), "missing field");
  }
  return absl::OkStatus();
}

absl::StatusOr<std::string> GetString(const json& j, const std::string& path) {
  if (!j.is_string()) return SchemaError(path, "expected a string");
  return j.get<std::string>();
}

absl::StatusOr<double> GetNumber(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  auto v = ValueFromJson(j);
  if (!v.ok() || v->type() != JsType::kNumber) return SchemaError(path, "expected a number");
  return v->number();
}

absl::StatusOr<BoundaryCondition> DecodeBoundary(const json& j, const std::string& path) {
  if (absl::Status s = CheckFields(j, path, {"target", "predicate", "step"}, {"value"});
      !s.ok()) {
    return s;
  }
  BoundaryCondition bc;
  auto target = GetString(j["target"], path + "/target");
  if (!target.ok()) return target.status();
  bc.target = *target;
  auto pred_name = GetString(j["predicate"], path + "/predicate");
  if (!pred_name.ok()) return pred_name.status();
  auto pred = ParsePredicate(*pred_name);
  if (!pred.ok()) return SchemaError(path + "/predicate", pred.status().message());
  bc.predicate = *pred;
  if (!j["step"].is_number_integer()) return SchemaError(path + "/step", "expected an integer");
  bc.origin_step = j["step"].get<int>();
  const std::string vpath = path + "/value";
  const bool needs_value = bc.predicate != Predicate::kIsUndefined;
  if (needs_value != j.contains("value")) {
    return SchemaError(vpath, needs_value ? "missing field" : "unexpected field");
  }
  switch (bc.predicate) {
    case Predicate::kIsUndefined:
      break;
    case Predicate::kInRange: {
      const json& v = j["value"];
      if (!v.is_array() || v.size() != 2) return SchemaError(vpath, "expected [lo, hi]");
      auto lo = GetNumber(v[0], vpath + "/0");
      if (!lo.ok()) return lo.status();
      auto hi = GetNumber(v[1], vpath + "/1");
      if (!hi.ok()) return hi.status();
      if (*lo > *hi) return SchemaError(vpath, "low bound exceeds high bound");
      bc.lo = *lo;
      bc.hi = *hi;
      break;
    }
    case Predicate::kIsType: {
      auto name = GetString(j["value"], vpath);
      if (!name.ok()) return name.status();
      auto t = ParseJsType(*name);
      if (!t.ok()) return SchemaError(vpath, t.status().message());
      bc.type = *t;
      break;
    }
    default: {
      auto v = ValueFromJson(j["value"]);
      if (!v.ok()) return SchemaError(vpath, v.status().message());
      bc.value = *std::move(v);
    }
  }
  return bc;
}

absl::StatusOr<ParamSpec> DecodeParam(const json& j, const std::string& path) {
  if (absl::Status s = CheckFields(j, path, {"name", "types", "optional", "boundaries"},
                                   {"range"});
      !s.ok()) {
    return s;
  }
  ParamSpec p;
  auto name = GetString(j["name"], path + "/name");
  if (!name.ok()) return name.status();
  p.name = *name;
  if (!j["types"].is_array()) return SchemaError(path + "/types", "expected an array");
  for (size_t i = 0; i < j["types"].size(); ++i) {
    const std::string tpath = absl::StrCat(path, "/types/", i);
    auto tn = GetString(j["types"][i], tpath);
    if (!tn.ok()) return tn.status();
    auto t = ParseJsType(*tn);
    if (!t.ok()) return SchemaError(tpath, t.status().message());
    p.declared_types.push_back(*t);
  }
  if (!std::is_sorted(p.declared_types.begin(), p.declared_types.end()) ||
      std::adjacent_find(p.declared_types.begin(), p.declared_types.end()) !=
          p.declared_types.end()) {
    return SchemaError(path + "/types", "types must be sorted and unique");
  }
  if (!j["optional"].is_boolean()) return SchemaError(path + "/optional", "expected a boolean");
  p.optional = j["optional"].get<bool>();
  if (!j["boundaries"].is_array()) {
    return SchemaError(path + "/boundaries", "expected an array");
  }
  for (size_t i = 0; i < j["boundaries"].size(); ++i) {
    auto bc = DecodeBoundary(j["boundaries"][i], absl::StrCat(path, "/boundaries/", i));
    if (!bc.ok()) return bc.status();
    p.boundaries.push_back(*std::move(bc));
  }
  if (j.contains("range")) {
    const json& r = j["range"];
    const std::string rpath = path + "/range";
    if (!r.is_array() || r.size() != 2) return SchemaError(rpath, "expected [low, high]");
    auto lo = GetNumber(r[0], rpath + "/0");
    if (!lo.ok()) return lo.status();
    auto hi = GetNumber(r[1], rpath + "/1");
    if (!hi.ok()) return hi.status();
    if (*lo > *hi) return SchemaError(rpath, "low bound exceeds high bound");
    p.value_range = {*lo, *hi};
  }
  return p;
}

absl::StatusOr<SpecStep> DecodeStep(const json& j, const std::string& path) {
  if (absl::Status s = CheckFields(j, path, {"i", "kind", "raw", "boundary"},
                                   {"var", "func"});
      !s.ok()) {
    return s;
  }
  SpecStep step;
  if (!j["i"].is_number_integer() || j["i"].get<int>() < 1) {
    return SchemaError(path + "/i", "expected a positive integer");
  }
  step.index = j["i"].get<int>();
  auto kind_name = GetString(j["kind"], path + "/kind");
  if (!kind_name.ok()) return kind_name.status();
  auto kind = ParseStepKind(*kind_name);
  if (!kind.ok()) return SchemaError(path + "/kind", kind.status().message());
  step.kind = *kind;
  auto raw = GetString(j["raw"], path + "/raw");
  if (!raw.ok()) return raw.status();
  step.raw_text = *raw;
  if (!j["boundary"].is_boolean()) return SchemaError(path + "/boundary", "expected a boolean");
  step.boundary_tag = j["boundary"].get<bool>();
  for (const char* key : {"var", "func"}) {
    if (!j.contains(key)) continue;
    auto v = GetString(j[key], absl::StrCat(path, "/", key));
    if (!v.ok()) return v.status();
    (key[0] == 'v' ? step.var : step.func) = *v;
  }
  if (step.kind == StepKind::kUnparsed && (step.var || step.func)) {
    return SchemaError(path, "Unparsed steps carry no var or func");
  }
  if (step.boundary_tag && step.kind != StepKind::kIf && step.kind != StepKind::kLet) {
    return SchemaError(path + "/boundary", "only If and Let steps may be tagged");
  }
  return step;
}

absl::StatusOr<ApiSpec> DecodeApi(const json& j, const std::string& path) {
  if (absl::Status s = CheckFields(
          j, path, {"name", "receiver", "section", "params", "steps", "prose_only"},
          {"receiver_boundaries"});
      !s.ok()) {
    return s;
  }
  ApiSpec api;
  for (auto [key, field] : {std::pair{"name", &api.name},
                            std::pair{"receiver", &api.receiver_type},
                            std::pair{"section", &api.source_section}}) {
    auto v = GetString(j[key], absl::StrCat(path, "/", key));
    if (!v.ok()) return v.status();
    *field = *v;
  }
  if (!j["params"].is_array()) return SchemaError(path + "/params", "expected an array");
  std::set<std::string> names;
  for (size_t i = 0; i < j["params"].size(); ++i) {
    const std::string ppath = absl::StrCat(path, "/params/", i);
    auto p = DecodeParam(j["params"][i], ppath);
    if (!p.ok()) return p.status();
    if (!names.insert(p->name).second) return SchemaError(ppath + "/name", "duplicate parameter");
    api.parameters.push_back(*std::move(p));
  }
  if (!j["steps"].is_array()) return SchemaError(path + "/steps", "expected an array");
  for (size_t i = 0; i < j["steps"].size(); ++i) {
    auto s = DecodeStep(j["steps"][i], absl::StrCat(path, "/steps/", i));
    if (!s.ok()) return s.status();
    api.steps.push_back(*std::move(s));
  }
  if (!j["prose_only"].is_boolean()) {
    return SchemaError(path + "/prose_only", "expected a boolean");
  }
  api.prose_only = j["prose_only"].get<bool>();
  if (j.contains("receiver_boundaries")) {
    const json& rb = j["receiver_boundaries"];
    if (!rb.is_array()) return SchemaError(path + "/receiver_boundaries", "expected an array");
    for (size_t i = 0; i < rb.size(); ++i) {
      auto bc = DecodeBoundary(rb[i], absl::StrCat(path, "/receiver_boundaries/", i));
      if (!bc.ok()) return bc.status();
      api.receiver_boundaries.push_back(*std::move(bc));
    }
  }

  // Cross-field invariants.
  auto step_tagged = [&](int index) {
    for (const SpecStep& s : api.steps) {
      if (s.index == index) return s.boundary_tag;
    }
    return false;
  };
  for (size_t i = 0; i < api.parameters.size(); ++i) {
    for (size_t b = 0; b < api.parameters[i].boundaries.size(); ++b) {
      const BoundaryCondition& bc = api.parameters[i].boundaries[b];
      const std::string bpath = absl::StrCat(path, "/params/", i, "/boundaries/", b);
      if (bc.target != api.parameters[i].name) {
        return SchemaError(bpath + "/target", "does not name the owning parameter");
      }
      if (!step_tagged(bc.origin_step)) {
        return SchemaError(bpath + "/step", "origin step missing or not boundary-tagged");
      }
    }
  }
  for (size_t b = 0; b < api.receiver_boundaries.size(); ++b) {
    const BoundaryCondition& bc = api.receiver_boundaries[b];
    const std::string bpath = absl::StrCat(path, "/receiver_boundaries/", b);
    if (bc.target != kReceiver) return SchemaError(bpath + "/target", "expected \"receiver\"");
    if (!step_tagged(bc.origin_step)) {
      return SchemaError(bpath + "/step", "origin step missing or not boundary-tagged");
    }
  }
  return api;
}

}  // namespace

bool BoundaryCondition::operator==(const BoundaryCondition& o) const {
  if (target != o.target || predicate != o.predicate || origin_step != o.origin_step) {
    return false;
  }
  switch (predicate) {
    case Predicate::kIsUndefined: return true;
    case Predicate::kInRange: return lo == o.lo && hi == o.hi;
    case Predicate::kIsType: return type == o.type;
    default: return value == o.value;
  }
}

const ParamSpec* ApiSpec::FindParam(absl::string_view param) const {
  for (const ParamSpec& p : parameters) {
    if (p.name == param) return &p;
  }
  return nullptr;
}

const ApiSpec* SpecDb::Find(absl::string_view name) const {
  for (const ApiSpec& api : apis) {
    if (api.name == name) return &api;
  }
  return nullptr;
}

std::string Serialize(const SpecDb& db) {
  json apis = json::array();
  for (const ApiSpec& api : db.apis) apis.push_back(ApiJson(api));
  return json{{"apis", apis}}.dump(2) + "\n";
}

absl::StatusOr<SpecDb> Deserialize(absl::string_view json_text) {
  json j = json::parse(json_text.begin(), json_text.end(), nullptr,
                       /*allow_exceptions=*/false);
  if (j.is_discarded()) return absl::InvalidArgumentError("spec database is not valid JSON");
  if (absl::Status s = CheckFields(j, "", {"apis"}, {}); !s.ok()) return s;
  if (!j["apis"].is_array()) return SchemaError("/apis", "expected an array");
  SpecDb db;
  for (size_t i = 0; i < j["apis"].size(); ++i) {
    auto api = DecodeApi(j["apis"][i], absl::StrCat("/apis/", i));
    if (!api.ok()) return api.status();
    db.apis.push_back(*std::move(api));
  }
  return db;
}

}  // namespace jsconform::specdb
