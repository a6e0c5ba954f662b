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

// Scripted stand-in for a JS engine. Usage:
//
//   mock_engine [--rules <file>] <case.js>
//
// Rules come from the file or from $MOCK_RULES, as JSON:
//
//   {"rules": [{"if_contains": "..." or [...], "unless_contains": "...",
//               "sleep_ms": 0, "action": "...", ...}]}
//
// The first rule whose conditions hold applies. Actions:
//
//   default     what happens with no matching rule: parse-fail when the
//               source does not parse, else print "mock <hash of source>"
//   print       print "text" ("{HASH}" expands to the source hash)
//   crash       raise "signal" (default SIGSEGV)
//   hang        sleep forever
//   parsefail   report a parse error and exit 2
//   exit        print "text" then exit with "code"
//
// A leading strict-mode directive is ignored for matching and hashing so
// normal and strict testbeds agree unless a rule says otherwise.

#include <sys/resource.h>
#include <unistd.h>

#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>

#include "absl/strings/match.h"
#include "absl/strings/str_replace.h"
#include "jsconform/common.h"
#include "jsconform/js/ast.h"
#include "nlohmann/json.hpp"

namespace {

using nlohmann::json;

constexpr char kStrictPrefix[] = "\"use strict\";\n";

[[noreturn]] void Die(const std::string& msg) {
  std::fprintf(stderr, "mock_engine: %s\n", msg.c_str());
  std::exit(64);
}

bool Holds(const json& rule, const std::string& source) {
  if (rule.contains("if_contains")) {
    const json& need = rule["if_contains"];
    for (const json& n : need.is_array() ? need : json::array({need})) {
      if (!absl::StrContains(source, n.get<std::string>())) return false;
    }
  }
  if (rule.contains("unless_contains") &&
      absl::StrContains(source, rule["unless_contains"].get<std::string>())) {
    return false;
  }
  if (rule.contains("if_strict") && rule["if_strict"].get<bool>() !=
                                        absl::StartsWith(source, kStrictPrefix)) {
    return false;
  }
  return true;
}

void Print(const std::string& text) {
  std::fwrite(text.data(), 1, text.size(), stdout);
  if (!text.empty() && text.back() != '\n') std::fputc('\n', stdout);
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  std::string rules_text;
  std::string file;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--rules" && i + 1 < argc) {
      auto t = jsconform::ReadFile(argv[++i]);
      if (!t.ok()) Die(t.status().ToString());
      rules_text = *t;
    } else {
      file = a;
    }
  }
  if (file.empty()) Die("no case file");
  if (rules_text.empty()) {
    if (const char* env = std::getenv("MOCK_RULES")) rules_text = env;
  }
  json rules = json::object();
  if (!rules_text.empty()) {
    rules = json::parse(rules_text, nullptr, false);
    if (rules.is_discarded()) Die("rules are not valid JSON");
  }
  auto src = jsconform::ReadFile(file);
  if (!src.ok()) Die(src.status().ToString());
  const std::string& full = *src;
  std::string body = full;
  if (absl::StartsWith(body, kStrictPrefix)) body.erase(0, sizeof(kStrictPrefix) - 1);
  const std::string hash = jsconform::ContentHash(body);

  json rule = {{"action", "default"}};
  for (const json& r : rules.value("rules", json::array())) {
    if (Holds(r, full)) {
      rule = r;
      break;
    }
  }
  if (int ms = rule.value("sleep_ms", 0); ms > 0) {
    std::this_thread::sleep_for(std::chrono::milliseconds(ms));
  }
  const std::string action = rule.value("action", "default");
  const std::string text =
      absl::StrReplaceAll(rule.value("text", ""), {{"{HASH}", hash}});
  if (action == "default") {
    if (!jsconform::js::IsSyntacticallyValid(body)) {
      std::fprintf(stderr, "MOCK-PARSE-ERROR: does not parse\n");
      return 2;
    }
    Print("mock " + hash);
    return 0;
  }
  if (action == "print") {
    Print(text);
    return 0;
  }
  if (action == "exit") {
    Print(text);
    return rule.value("code", 1);
  }
  if (action == "parsefail") {
    std::fprintf(stderr, "MOCK-PARSE-ERROR: %s\n", text.c_str());
    return 2;
  }
  if (action == "crash") {
    struct rlimit none = {0, 0};
    setrlimit(RLIMIT_CORE, &none);
    std::fflush(stdout);
    const int sig = rule.value("signal", SIGSEGV);
    std::signal(sig, SIG_DFL);
    std::raise(sig);
    return 70;
  }
  if (action == "hang") {
    for (;;) std::this_thread::sleep_for(std::chrono::seconds(60));
  }
  Die("unknown action " + action);
}
