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

// A database of ECMAScript API rules extracted from the HTML rendering of
// the language specification: parameters, algorithm steps, and the
// boundary conditions those steps test.

#ifndef JSCONFORM_SPECDB_H_
#define JSCONFORM_SPECDB_H_

#include <optional>
#include <regex>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "jsconform/value.h"

namespace jsconform::specdb {

inline constexpr absl::string_view kReceiver = "receiver";

enum class StepKind { kLet, kIf, kReturn, kThrow, kCall, kUnparsed };
enum class Predicate {
  kIsUndefined,
  kEquals,
  kLessThan,
  kGreaterThan,
  kInRange,
  kIsType,
};

absl::string_view StepKindName(StepKind kind);
absl::StatusOr<StepKind> ParseStepKind(absl::string_view name);
absl::string_view PredicateName(Predicate p);
absl::StatusOr<Predicate> ParsePredicate(absl::string_view name);

struct BoundaryCondition {
  std::string target;  // parameter name or kReceiver
  Predicate predicate = Predicate::kIsUndefined;
  Value value;            // kEquals, kLessThan, kGreaterThan
  double lo = 0, hi = 0;  // kInRange
  JsType type = JsType::kUndefined;  // kIsType
  int origin_step = 0;

  bool operator==(const BoundaryCondition& o) const;
};

struct ParamSpec {
  std::string name;
  std::vector<JsType> declared_types;  // sorted, unique
  bool optional = false;
  std::vector<BoundaryCondition> boundaries;
  std::optional<std::pair<double, double>> value_range;

  bool operator==(const ParamSpec&) const = default;
};

struct SpecStep {
  int index = 0;  // 1-based, document order across nesting levels
  StepKind kind = StepKind::kUnparsed;
  std::optional<std::string> var;
  std::optional<std::string> func;
  std::string raw_text;
  bool boundary_tag = false;

  bool operator==(const SpecStep&) const = default;
};

struct ApiSpec {
  std::string name;
  std::string receiver_type;
  std::vector<ParamSpec> parameters;
  std::vector<SpecStep> steps;
  std::string source_section;
  bool prose_only = false;
  // Conditions on the this-value, kept apart from the argument list.
  std::vector<BoundaryCondition> receiver_boundaries;

  const ParamSpec* FindParam(absl::string_view param) const;
  bool operator==(const ApiSpec&) const = default;
};

struct SpecDb {
  std::vector<ApiSpec> apis;

  const ApiSpec* Find(absl::string_view name) const;
  bool operator==(const SpecDb&) const = default;
};

// Regular-expression table driving step classification and boundary
// tagging. Loaded from JSON so new spec phrasings need no code change.
class PatternTable {
 public:
  struct StepPattern {
    StepKind kind;
    std::regex re;
    int var_group = 0;   // 0: none
    int func_group = 0;  // 0: none
  };
  struct BoundaryPattern {
    Predicate predicate = Predicate::kIsUndefined;
    std::regex re;
    int target_group = 1;
    int value_group = 0;
    int lo_group = 0, hi_group = 0;
    int type_group = 0;
    std::optional<JsType> fixed_type;
    std::optional<Value> fixed_value;
  };
  struct Conversion {
    std::string func;
    JsType type;
  };

  static absl::StatusOr<PatternTable> FromJson(absl::string_view text);
  // The table bundled into the binary.
  static const PatternTable& Default();

  const std::vector<StepPattern>& steps() const { return steps_; }
  const std::vector<BoundaryPattern>& boundaries() const { return boundaries_; }
  const std::regex& alias() const { return alias_; }
  const std::vector<Conversion>& conversions() const { return conversions_; }
  const std::regex& api_heading() const { return api_heading_; }
  const std::regex& accessor_heading() const { return accessor_heading_; }
  const std::regex& object_heading() const { return object_heading_; }
  std::optional<JsType> ConversionType(absl::string_view func) const;
  bool IsGlobalName(absl::string_view name) const;
  bool IsReceiverWord(absl::string_view word) const;

 private:
  std::vector<StepPattern> steps_;
  std::vector<BoundaryPattern> boundaries_;
  std::regex alias_;
  std::vector<Conversion> conversions_;
  std::regex api_heading_;
  std::regex accessor_heading_;
  std::regex object_heading_;
  std::vector<std::string> global_names_;
  std::vector<std::string> receiver_words_;
};

struct ParseResult {
  std::vector<ApiSpec> apis;
  std::vector<std::string> warnings;
};

// Segments `html` into API sections and extracts their rules.
absl::StatusOr<ParseResult> ParseSpecDocument(
    absl::string_view html,
    const PatternTable& patterns = PatternTable::Default());

// Classifies one algorithm step. Lines matching no pattern are kUnparsed
// with their text preserved.
SpecStep ExtractStep(absl::string_view line, int index = 1,
                     const PatternTable& patterns = PatternTable::Default());

// Canonical spelling used for matching: markup sigils and the ?/! macros
// removed, Unicode operators mapped to ASCII, whitespace collapsed.
std::string NormalizeStepText(absl::string_view text);

// Concrete inputs exercising the boundaries of `param` (or kReceiver).
absl::StatusOr<std::vector<Value>> BoundaryValues(const ApiSpec& spec,
                                                  absl::string_view param);
// One representative value per type.
Value TypeRepresentative(JsType type);

struct CoverageReport {
  int total_sections = 0;
  int extracted = 0;
  double ratio = 0;
  bool empty = false;
};
CoverageReport Coverage(const SpecDb& db);

std::string Serialize(const SpecDb& db);
absl::StatusOr<SpecDb> Deserialize(absl::string_view json_text);

// Rules extracted from the spec subset bundled with the library (a few
// dozen String, Number, Array, Object and Math APIs). Parsed once.
const SpecDb& BundledDb();

}  // namespace jsconform::specdb

#endif  // JSCONFORM_SPECDB_H_
