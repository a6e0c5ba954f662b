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

#include "jsconform/value.h"

#include <charconv>
#include <cmath>
#include <cstring>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace jsconform {
namespace {

constexpr absl::string_view kTypeNames[] = {
    "Undefined", "Null", "Boolean", "Number",
    "String",    "Object", "Array", "Function"};

// Decodes one UTF-8 sequence at s[i], advancing i. Malformed input yields
// U+FFFD and consumes one byte.
uint32_t DecodeUtf8(absl::string_view s, size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](size_t k) -> int {
    if (i + k >= s.size()) return -1;
    auto b = static_cast<unsigned char>(s[i + k]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = b0 >= 0xF0 ? 4 : b0 >= 0xE0 ? 3 : b0 >= 0xC0 ? 2 : 0;
  if (len == 0) {
    ++i;
    return 0xFFFD;
  }
  uint32_t cp = b0 & (0x7F >> len);
  for (int k = 1; k < len; ++k) {
    int c = cont(k);
    if (c < 0) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | static_cast<uint32_t>(c);
  }
  i += len;
  return cp;
}

void AppendEscapedString(std::string& out, absl::string_view s) {
  out.push_back('"');
  for (size_t i = 0; i < s.size();) {
    uint32_t cp = DecodeUtf8(s, i);
    switch (cp) {
      case '"': out += "\\\""; continue;
      case '\\': out += "\\\\"; continue;
      case '\n': out += "\\n"; continue;
      case '\r': out += "\\r"; continue;
      case '\t': out += "\\t"; continue;
      default: break;
    }
    if (cp >= 0x20 && cp < 0x7F) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x10000) {
      absl::StrAppendFormat(&out, "\\u%04x", cp);
    } else {
      cp -= 0x10000;
      absl::StrAppendFormat(&out, "\\u%04x\\u%04x", 0xD800 + (cp >> 10),
                            0xDC00 + (cp & 0x3FF));
    }
  }
  out.push_back('"');
}

bool SameNumber(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return a == b && std::signbit(a) == std::signbit(b);
}

}  // namespace

absl::string_view JsTypeName(JsType type) {
  return kTypeNames[static_cast<int>(type)];
}

absl::StatusOr<JsType> ParseJsType(absl::string_view name) {
  for (JsType t : AllJsTypes()) {
    if (JsTypeName(t) == name) return t;
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown JS type '", name, "'"));
}

const std::vector<JsType>& AllJsTypes() {
  static const auto* types = new std::vector<JsType>{
      JsType::kUndefined, JsType::kNull,   JsType::kBoolean, JsType::kNumber,
      JsType::kString,    JsType::kObject, JsType::kArray,   JsType::kFunction};
  return *types;
}

Value Value::Boolean(bool b) {
  Value v(JsType::kBoolean);
  v.boolean_ = b;
  return v;
}

Value Value::Number(double d) {
  Value v(JsType::kNumber);
  v.number_ = d;
  return v;
}

Value Value::String(std::string s) {
  Value v(JsType::kString);
  v.string_ = std::move(s);
  return v;
}

Value Value::Array(std::vector<Value> elements) {
  Value v(JsType::kArray);
  v.elements_ = std::move(elements);
  return v;
}

Value Value::Object(std::vector<std::pair<std::string, Value>> fields) {
  Value v(JsType::kObject);
  v.fields_ = std::move(fields);
  return v;
}

bool Value::operator==(const Value& other) const {
  if (type_ != other.type_) return false;
  switch (type_) {
    case JsType::kBoolean: return boolean_ == other.boolean_;
    case JsType::kNumber: return SameNumber(number_, other.number_);
    case JsType::kString: return string_ == other.string_;
    case JsType::kArray: return elements_ == other.elements_;
    case JsType::kObject: return fields_ == other.fields_;
    default: return true;
  }
}

std::string FormatNumber(double d) {
  if (std::isnan(d)) return "NaN";
  if (std::isinf(d)) return d > 0 ? "Infinity" : "-Infinity";
  if (d == 0) return std::signbit(d) ? "-0" : "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), d);
  return std::string(buf, end);
}

std::string ToJsLiteral(const Value& value) {
  switch (value.type()) {
    case JsType::kUndefined: return "undefined";
    case JsType::kNull: return "null";
    case JsType::kBoolean: return value.boolean() ? "true" : "false";
    case JsType::kNumber: {
      std::string s = FormatNumber(value.number());
      return s[0] == '-' ? absl::StrCat("(", s, ")") : s;
    }
    case JsType::kString: {
      std::string out;
      AppendEscapedString(out, value.string());
      return out;
    }
    case JsType::kArray: {
      std::string out = "[";
      for (size_t i = 0; i < value.elements().size(); ++i) {
        if (i > 0) out += ", ";
        out += ToJsLiteral(value.elements()[i]);
      }
      return out + "]";
    }
    case JsType::kObject: {
      // Parenthesized so the literal is never read as a block.
      std::string out = "({";
      for (size_t i = 0; i < value.fields().size(); ++i) {
        if (i > 0) out += ", ";
        AppendEscapedString(out, value.fields()[i].first);
        out += ": ";
        out += ToJsLiteral(value.fields()[i].second);
      }
      return out + "})";
    }
    case JsType::kFunction: return "(function(){})";
  }
  return "undefined";
}

nlohmann::json ValueToJson(const Value& value) {
  using nlohmann::json;
  switch (value.type()) {
    case JsType::kUndefined: return json{{"$", "undefined"}};
    case JsType::kNull: return nullptr;
    case JsType::kBoolean: return value.boolean();
    case JsType::kNumber: {
      double d = value.number();
      if (!std::isfinite(d) || (d == 0 && std::signbit(d))) {
        return json{{"$", FormatNumber(d)}};
      }
      if (d == std::trunc(d) && std::fabs(d) < 9.007199254740992e15) {
        return static_cast<int64_t>(d);
      }
      return d;
    }
    case JsType::kString: return value.string();
    case JsType::kArray: {
      json arr = json::array();
      for (const Value& e : value.elements()) arr.push_back(ValueToJson(e));
      return arr;
    }
    case JsType::kObject: {
      // Field order matters to JS enumeration, so keep it as a pair list.
      json fields = json::array();
      for (const auto& [k, v] : value.fields()) {
        fields.push_back(json::array({k, ValueToJson(v)}));
      }
      return json{{"$object", fields}};
    }
    case JsType::kFunction: return json{{"$", "function"}};
  }
  return nullptr;
}

absl::StatusOr<Value> ValueFromJson(const nlohmann::json& json) {
  if (json.is_null()) return Value::Null();
  if (json.is_boolean()) return Value::Boolean(json.get<bool>());
  if (json.is_number()) return Value::Number(json.get<double>());
  if (json.is_string()) return Value::String(json.get<std::string>());
  if (json.is_array()) {
    std::vector<Value> elements;
    for (const auto& e : json) {
      auto v = ValueFromJson(e);
      if (!v.ok()) return v.status();
      elements.push_back(*std::move(v));
    }
    return Value::Array(std::move(elements));
  }
  if (json.is_object() && json.size() == 1) {
    if (json.contains("$") && json["$"].is_string()) {
      const std::string tag = json["$"].get<std::string>();
      if (tag == "undefined") return Value::Undefined();
      if (tag == "function") return Value::FunctionStub();
      if (tag == "NaN") return Value::Number(std::nan(""));
      if (tag == "Infinity") return Value::Number(HUGE_VAL);
      if (tag == "-Infinity") return Value::Number(-HUGE_VAL);
      if (tag == "-0") return Value::Number(-0.0);
      return absl::InvalidArgumentError(absl::StrCat("unknown value tag '", tag, "'"));
    }
    if (json.contains("$object") && json["$object"].is_array()) {
      std::vector<std::pair<std::string, Value>> fields;
      for (const auto& pair : json["$object"]) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string()) {
          return absl::InvalidArgumentError("malformed object field");
        }
        auto v = ValueFromJson(pair[1]);
        if (!v.ok()) return v.status();
        fields.emplace_back(pair[0].get<std::string>(), *std::move(v));
      }
      return Value::Object(std::move(fields));
    }
  }
  return absl::InvalidArgumentError(absl::StrCat("not a value: ", json.dump()));
}

std::string DebugString(const Value& value) {
  switch (value.type()) {
    case JsType::kNumber: return FormatNumber(value.number());
    case JsType::kObject: {
      std::string s = ToJsLiteral(value);
      return s.substr(1, s.size() - 2);
    }
    case JsType::kFunction: return "function(){}";
    default: return ToJsLiteral(value);
  }
}

}  // namespace jsconform
