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

#include <regex>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "datagen/internal.h"
#include "jsconform/datagen.h"

namespace jsconform::datagen {
namespace {

// Runtime support shared by every driver. Written in ES5 so the oldest
// engines under test run it; wrapped in a function so it cannot collide
// with program globals.
constexpr absl::string_view kPrelude = R"JS(
;(function () {
  var __print = typeof print === "function" ? print
      : function (s) { console.log(s); };
  function __canon(v, depth) {
    if (v === undefined) return "undefined";
    if (v === null) return "null";
    var t = typeof v;
    if (t === "number") return v === 0 && 1 / v < 0 ? "-0" : String(v);
    if (t === "string") return depth === 0 ? v : JSON.stringify(v);
    if (t === "boolean" || t === "bigint") return String(v);
    if (t === "symbol") return "Symbol";
    if (t === "function") return "function";
    if (depth > 2) return "...";
    var parts = [], i;
    if (Array.isArray(v)) {
      for (i = 0; i < v.length && i < 64; i++) parts.push(__canon(v[i], depth + 1));
      return "[" + parts.join(",") + "]";
    }
    var keys = Object.keys(v).sort();
    for (i = 0; i < keys.length && i < 64; i++) {
      parts.push(keys[i] + ":" + __canon(v[keys[i]], depth + 1));
    }
    return "{" + parts.join(",") + "}";
  }
  function __excName(e) {
    if (e !== null && (typeof e === "object" || typeof e === "function")) {
      if (typeof e.name === "string" && e.name) return e.name;
      return "Object";
    }
    return "Value";
  }
  function __line(s) { return String(s).split("\n").join("\\n"); }
)JS";

// Entry name and parameters from the first line of a program that does not
// parse, so invalid programs still get a driver calling the right function.
std::optional<EntryFunction> EntryFromHeader(absl::string_view source) {
  static const std::regex kHeader(
      R"(^\s*(?:function\s+([A-Za-z_$][\w$]*)|(?:var|let|const)\s+([A-Za-z_$][\w$]*)\s*=\s*function\b[^(]*)\s*\(([^)]*)\))");
  std::string first(source.substr(0, source.find('\n')));
  std::smatch m;
  if (!std::regex_search(first, m, kHeader)) return std::nullopt;
  EntryFunction e;
  e.name = m[1].matched ? m[1].str() : m[2].str();
  for (absl::string_view p : absl::StrSplit(m[3].str(), ',')) {
    p = absl::StripAsciiWhitespace(p);
    if (!p.empty()) e.params.emplace_back(p);
  }
  return e;
}

}  // namespace

std::optional<EntryFunction> internal::EntryOf(const progen::TestProgram& prog) {
  auto ast = js::Parse(prog.source);
  if (ast.ok()) return FindEntry(*ast);
  return EntryFromHeader(prog.source);
}

absl::StatusOr<TestCase> SynthesizeDriver(const progen::TestProgram& prog,
                                          const std::vector<Binding>& bindings) {
  std::string driver(kPrelude);
  auto entry = internal::EntryOf(prog);
  std::vector<std::string> args;
  for (const Binding& b : bindings) {
    if (!b.in_driver) continue;
    static const std::regex kIdentifier(R"(^[A-Za-z_$][\w$]*$)");
    if (!std::regex_match(b.variable, kIdentifier)) {
      return absl::InvalidArgumentError(
          absl::StrCat("binding name is not an identifier: ", b.variable));
    }
    absl::StrAppend(&driver, "  var ", b.variable, " = ", ToJsLiteral(b.value),
                    ";\n");
  }
  if (entry) {
    for (const std::string& p : entry->params) {
      bool bound = false;
      for (const Binding& b : bindings) bound |= b.in_driver && b.variable == p;
      args.push_back(bound ? p : "undefined");
    }
    absl::StrAppend(&driver, "  try {\n    __print(__line(__canon(",
                    entry->name, "(", absl::StrJoin(args, ", "),
                    "), 0)));\n  } catch (e) {\n",
                    "    __print(\"EXC \" + __excName(e));\n  }\n");
  } else {
    absl::StrAppend(&driver, "  __print(\"no entry function\");\n");
  }
  absl::StrAppend(&driver, "})();\n");

  TestCase tc;
  tc.program = prog;
  tc.program_id = prog.id;
  tc.bindings = bindings;
  tc.driver = std::move(driver);
  tc.id = ContentHash(tc.source());
  return tc;
}

}  // namespace jsconform::datagen
