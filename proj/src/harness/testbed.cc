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

#include <set>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "embedded_data.h"
#include "jsconform/common.h"
#include "jsconform/harness.h"

namespace jsconform::harness {
namespace {

using nlohmann::json;

absl::Status FieldError(size_t index, absl::string_view field,
                        absl::string_view what) {
  return absl::InvalidArgumentError(
      absl::StrCat("testbed config: /testbeds/", index, "/", field, ": ", what));
}

absl::StatusOr<std::vector<std::string>> StringList(const json& j, size_t index,
                                                    absl::string_view field) {
  if (!j.is_array()) return FieldError(index, field, "expected an array of strings");
  std::vector<std::string> out;
  for (const json& e : j) {
    if (!e.is_string()) return FieldError(index, field, "expected an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

}  // namespace

absl::string_view ModeName(Mode mode) {
  return mode == Mode::kStrict ? "strict" : "normal";
}

std::string Testbed::id() const {
  return absl::StrCat(engine_id, "@", version, "/", ModeName(mode));
}

absl::StatusOr<std::vector<EngineConfig>> ParseTestbedConfig(const json& root) {
  const json* list = &root;
  if (root.is_object()) {
    if (!root.contains("testbeds")) {
      return absl::InvalidArgumentError("testbed config: missing /testbeds");
    }
    list = &root["testbeds"];
  }
  if (!list->is_array()) {
    return absl::InvalidArgumentError("testbed config: /testbeds must be an array");
  }
  static const std::set<std::string> kKnown = {
      "engine_id", "version", "binary", "argv_template", "editions",
      "modes", "env", "parse_profile"};
  std::vector<EngineConfig> out;
  for (size_t i = 0; i < list->size(); ++i) {
    const json& e = (*list)[i];
    if (!e.is_object()) return FieldError(i, "", "expected an object");
    for (const auto& [key, _] : e.items()) {
      if (!kKnown.count(key)) return FieldError(i, key, "unknown field");
    }
    EngineConfig cfg;
    for (const char* key : {"engine_id", "version", "binary"}) {
      if (!e.contains(key) || !e[key].is_string() || e[key].get<std::string>().empty()) {
        return FieldError(i, key, "required non-empty string");
      }
    }
    cfg.engine_id = e["engine_id"].get<std::string>();
    cfg.version = e["version"].get<std::string>();
    cfg.binary = e["binary"].get<std::string>();
    if (e.contains("argv_template")) {
      auto argv = StringList(e["argv_template"], i, "argv_template");
      if (!argv.ok()) return argv.status();
      cfg.argv_template = *std::move(argv);
    }
    bool has_file = false;
    for (const std::string& a : cfg.argv_template) {
      has_file |= a.find("{FILE}") != std::string::npos;
    }
    if (!has_file) return FieldError(i, "argv_template", "no {FILE} placeholder");
    if (e.contains("editions")) {
      auto eds = StringList(e["editions"], i, "editions");
      if (!eds.ok()) return eds.status();
      if (eds->empty()) return FieldError(i, "editions", "must not be empty");
      cfg.editions = *std::move(eds);
    }
    if (e.contains("modes")) {
      auto modes = StringList(e["modes"], i, "modes");
      if (!modes.ok()) return modes.status();
      cfg.modes.clear();
      for (const std::string& m : *modes) {
        if (m == "normal") {
          cfg.modes.push_back(Mode::kNormal);
        } else if (m == "strict") {
          cfg.modes.push_back(Mode::kStrict);
        } else {
          return FieldError(i, "modes", absl::StrCat("unknown mode '", m, "'"));
        }
      }
      if (cfg.modes.empty()) return FieldError(i, "modes", "must not be empty");
    }
    if (e.contains("env")) {
      if (!e["env"].is_object()) return FieldError(i, "env", "expected an object");
      for (const auto& [k, v] : e["env"].items()) {
        if (!v.is_string()) return FieldError(i, "env/" + k, "expected a string");
        cfg.env[k] = v.get<std::string>();
      }
    }
    cfg.parse_profile = e.value("parse_profile", cfg.engine_id);
    out.push_back(std::move(cfg));
  }
  return out;
}

absl::StatusOr<std::vector<Testbed>> DeriveTestbeds(
    const std::vector<EngineConfig>& configs) {
  const EditionTable& editions = EditionTable::Bundled();
  std::vector<Testbed> out;
  std::set<std::string> ids;
  for (const EngineConfig& cfg : configs) {
    std::string newest;
    for (const std::string& e : cfg.editions) {
      if (editions.Rank(e) < 0) {
        return absl::InvalidArgumentError(
            absl::StrCat("testbed ", cfg.engine_id, ": unknown edition '", e, "'"));
      }
      if (newest.empty() || editions.Rank(e) > editions.Rank(newest)) newest = e;
    }
    for (Mode mode : cfg.modes) {
      Testbed tb;
      tb.engine_id = cfg.engine_id;
      tb.version = cfg.version;
      tb.binary = cfg.binary;
      tb.argv_template = cfg.argv_template;
      tb.mode = mode;
      tb.edition = newest;
      tb.env = cfg.env;
      tb.parse_profile = cfg.parse_profile.empty() ? cfg.engine_id : cfg.parse_profile;
      if (!ids.insert(tb.id()).second) {
        return absl::InvalidArgumentError(
            absl::StrCat("duplicate testbed ", tb.id()));
      }
      out.push_back(std::move(tb));
    }
  }
  return out;
}

absl::StatusOr<std::vector<Testbed>> LoadTestbeds(const std::filesystem::path& path) {
  auto text = ReadFile(path);
  if (!text.ok()) return text.status();
  json root = json::parse(*text, nullptr, false);
  if (root.is_discarded()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path.string(), ": not valid JSON"));
  }
  auto configs = ParseTestbedConfig(root);
  if (!configs.ok()) return configs.status();
  // Relative binary paths are relative to the config file.
  for (EngineConfig& cfg : *configs) {
    std::filesystem::path bin(cfg.binary);
    if (bin.is_relative() && cfg.binary.find('/') != std::string::npos) {
      cfg.binary = (path.parent_path() / bin).lexically_normal().string();
    }
  }
  return DeriveTestbeds(*configs);
}

absl::StatusOr<EditionTable> EditionTable::FromJson(const json& j) {
  if (!j.is_object() || !j.contains("order") || !j["order"].is_array()) {
    return absl::InvalidArgumentError("edition table: missing /order");
  }
  EditionTable t;
  for (const json& e : j["order"]) {
    if (!e.is_string()) return absl::InvalidArgumentError("edition table: /order");
    t.order_.push_back(e.get<std::string>());
  }
  if (j.contains("apis")) {
    for (const auto& [api, ed] : j["apis"].items()) {
      if (!ed.is_string() || t.Rank(ed.get<std::string>()) < 0) {
        return absl::InvalidArgumentError(
            absl::StrCat("edition table: /apis/", api, ": unknown edition"));
      }
      t.api_edition_[api] = ed.get<std::string>();
    }
  }
  return t;
}

const EditionTable& EditionTable::Bundled() {
  static const EditionTable* table = [] {
    auto t = FromJson(json::parse(data::kEditions));
    if (!t.ok()) {
      std::fprintf(stderr, "bundled edition table: %s\n", t.status().ToString().c_str());
      std::abort();
    }
    return new EditionTable(*std::move(t));
  }();
  return *table;
}

int EditionTable::Rank(absl::string_view edition) const {
  for (size_t i = 0; i < order_.size(); ++i) {
    if (order_[i] == edition) return static_cast<int>(i);
  }
  return -1;
}

bool EditionTable::Supports(const Testbed& tb,
                            const std::vector<std::string>& apis) const {
  const int have = Rank(tb.edition);
  for (const std::string& api : apis) {
    auto it = api_edition_.find(api);
    if (it != api_edition_.end() && Rank(it->second) > have) return false;
  }
  return true;
}

absl::StatusOr<ParseErrorTable> ParseErrorTable::FromJson(const json& j) {
  auto rules = [](const json& list, absl::string_view where)
      -> absl::StatusOr<std::vector<Rule>> {
    if (!list.is_array()) {
      return absl::InvalidArgumentError(absl::StrCat("parse-error table: ", where));
    }
    std::vector<Rule> out;
    for (size_t i = 0; i < list.size(); ++i) {
      const json& r = list[i];
      if (!r.is_object() || !r.contains("pattern") || !r["pattern"].is_string()) {
        return absl::InvalidArgumentError(
            absl::StrCat("parse-error table: ", where, "/", i, "/pattern"));
      }
      Rule rule;
      const std::string stream = r.value("stream", "stderr");
      if (stream != "stderr" && stream != "stdout") {
        return absl::InvalidArgumentError(
            absl::StrCat("parse-error table: ", where, "/", i, "/stream"));
      }
      rule.on_stdout = stream == "stdout";
      try {
        rule.pattern = std::regex(r["pattern"].get<std::string>());
      } catch (const std::regex_error& e) {
        return absl::InvalidArgumentError(absl::StrCat(
            "parse-error table: ", where, "/", i, "/pattern: ", e.what()));
      }
      out.push_back(std::move(rule));
    }
    return out;
  };
  if (!j.is_object()) return absl::InvalidArgumentError("parse-error table: not an object");
  ParseErrorTable t;
  if (j.contains("profiles")) {
    for (const auto& [name, list] : j["profiles"].items()) {
      auto r = rules(list, absl::StrCat("/profiles/", name));
      if (!r.ok()) return r.status();
      t.profiles_[name] = *std::move(r);
    }
  }
  if (j.contains("default")) {
    auto r = rules(j["default"], "/default");
    if (!r.ok()) return r.status();
    t.fallback_ = *std::move(r);
  }
  return t;
}

const ParseErrorTable& ParseErrorTable::Bundled() {
  static const ParseErrorTable* table = [] {
    auto t = FromJson(json::parse(data::kParseErrors));
    if (!t.ok()) {
      std::fprintf(stderr, "bundled parse-error table: %s\n",
                   t.status().ToString().c_str());
      std::abort();
    }
    return new ParseErrorTable(*std::move(t));
  }();
  return *table;
}

bool ParseErrorTable::IsParseFailure(absl::string_view profile, int exit_code,
                                     absl::string_view stdout_text,
                                     absl::string_view stderr_text) const {
  if (exit_code == 0) return false;
  auto it = profiles_.find(profile);
  const std::vector<Rule>& rules = it == profiles_.end() ? fallback_ : it->second;
  for (const Rule& r : rules) {
    const absl::string_view text = r.on_stdout ? stdout_text : stderr_text;
    if (std::regex_search(text.begin(), text.end(), r.pattern)) return true;
  }
  return false;
}

}  // namespace jsconform::harness
