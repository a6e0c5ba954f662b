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

// Abstract JavaScript values: the concrete inputs datagen binds to program
// variables, and the boundary constants recorded in the spec database.

#ifndef JSCONFORM_VALUE_H_
#define JSCONFORM_VALUE_H_

#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "nlohmann/json.hpp"

namespace jsconform {

enum class JsType {
  kUndefined,
  kNull,
  kBoolean,
  kNumber,
  kString,
  kObject,
  kArray,
  kFunction,
};

absl::string_view JsTypeName(JsType type);
absl::StatusOr<JsType> ParseJsType(absl::string_view name);
// All types in declaration order.
const std::vector<JsType>& AllJsTypes();

class Value {
 public:
  static Value Undefined() { return Value(JsType::kUndefined); }
  static Value Null() { return Value(JsType::kNull); }
  static Value Boolean(bool b);
  static Value Number(double d);
  static Value String(std::string s);
  static Value Array(std::vector<Value> elements);
  static Value Object(std::vector<std::pair<std::string, Value>> fields);
  static Value FunctionStub() { return Value(JsType::kFunction); }

  Value() : type_(JsType::kUndefined) {}

  JsType type() const { return type_; }
  bool boolean() const { return boolean_; }
  double number() const { return number_; }
  const std::string& string() const { return string_; }
  const std::vector<Value>& elements() const { return elements_; }
  const std::vector<std::pair<std::string, Value>>& fields() const {
    return fields_;
  }

  // Structural equality. NaN equals NaN and -0 differs from +0, matching
  // SameValue rather than ===.
  bool operator==(const Value& other) const;
  bool operator!=(const Value& other) const { return !(*this == other); }

 private:
  explicit Value(JsType type) : type_(type) {}

  JsType type_;
  bool boolean_ = false;
  double number_ = 0;
  std::string string_;  // UTF-8
  std::vector<Value> elements_;
  std::vector<std::pair<std::string, Value>> fields_;
};

// JavaScript source for `value`, usable in any expression position
// (negative numbers are parenthesized). Non-ASCII characters are written as
// \u escapes so the text is plain ASCII.
std::string ToJsLiteral(const Value& value);

// Shortest round-trip decimal form, with JS spellings for the non-finite
// values ("NaN", "Infinity", "-Infinity") and "-0".
std::string FormatNumber(double d);

// JSON encoding. Finite numbers, strings, booleans and null map to
// themselves; undefined, functions, NaN, the infinities and -0 are tagged
// as {"$": "<name>"}; objects are wrapped as {"$object": {...}}.
nlohmann::json ValueToJson(const Value& value);
absl::StatusOr<Value> ValueFromJson(const nlohmann::json& json);

// Short human-readable form for notes and reports.
std::string DebugString(const Value& value);

}  // namespace jsconform

#endif  // JSCONFORM_VALUE_H_
