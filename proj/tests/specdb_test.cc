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

#include "jsconform/specdb.h"

#include <cmath>
#include <string>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "jsconform/common.h"

namespace jsconform::specdb {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

std::string Fixture(const std::string& name) {
  auto text = ReadFile("tests/fixtures/specs/" + name);
  EXPECT_TRUE(text.ok()) << text.status();
  return text.ok() ? *text : "";
}

SpecDb ParseFixture(const std::string& name) {
  auto result = ParseSpecDocument(Fixture(name));
  EXPECT_TRUE(result.ok()) << result.status();
  return SpecDb{result.ok() ? result->apis : std::vector<ApiSpec>{}};
}

TEST(ExtractStepTest, LetWithConversion) {
  SpecStep s = ExtractStep("Let len be ? ToInteger(length).");
  EXPECT_EQ(s.kind, StepKind::kLet);
  EXPECT_EQ(s.var, "len");
  EXPECT_EQ(s.func, "ToInteger");
  EXPECT_FALSE(s.boundary_tag);
}

TEST(ExtractStepTest, UndefinedTestIsTaggedIf) {
  SpecStep s = ExtractStep("If length is undefined, let end be +\xE2\x88\x9E.");
  EXPECT_EQ(s.kind, StepKind::kIf);
  EXPECT_TRUE(s.boundary_tag);
}

TEST(ExtractStepTest, ProseIsUnparsedAndPreserved) {
  const std::string line = "\xE2\x80\x94 some prose sentence \xE2\x80\x94";
  SpecStep s = ExtractStep(line);
  EXPECT_EQ(s.kind, StepKind::kUnparsed);
  EXPECT_FALSE(s.var.has_value());
  EXPECT_FALSE(s.func.has_value());
  EXPECT_EQ(s.raw_text, line);
}

TEST(ExtractStepTest, OtherKinds) {
  EXPECT_EQ(ExtractStep("Return ToString(x).").kind, StepKind::kReturn);
  EXPECT_EQ(ExtractStep("Throw a TypeError exception.").func, "TypeError");
  EXPECT_EQ(ExtractStep("ReturnIfAbrupt(S).").kind, StepKind::kCall);
  EXPECT_EQ(ExtractStep("Perform ? Set(O, \"length\", 0, true).").func, "Set");
  EXPECT_EQ(ExtractStep("Assert: x is a Number.").kind, StepKind::kUnparsed);
}

TEST(NormalizeTest, StripsMacrosAndSigils) {
  EXPECT_EQ(NormalizeStepText("Let _x_ be ? ToNumber(*this* value)."),
            "Let x be ToNumber(this value).");
  EXPECT_EQ(NormalizeStepText("If f \xE2\x89\xA5 0"), "If f >= 0");
}

TEST(ParseSpecDocumentTest, SubstrMatchesAstShape) {
  SpecDb db = ParseFixture("substr.html");
  ASSERT_EQ(db.apis.size(), 1u);
  const ApiSpec& api = db.apis[0];
  EXPECT_EQ(api.name, "String.prototype.substr");
  EXPECT_EQ(api.receiver_type, "String");
  EXPECT_EQ(api.source_section, "B.2.3.1");
  EXPECT_FALSE(api.prose_only);
  ASSERT_EQ(api.parameters.size(), 2u);
  EXPECT_EQ(api.parameters[0].name, "start");
  EXPECT_FALSE(api.parameters[0].optional);
  const ParamSpec& length = api.parameters[1];
  EXPECT_EQ(length.name, "length");
  EXPECT_TRUE(length.optional);
  ASSERT_EQ(length.boundaries.size(), 1u);
  EXPECT_EQ(length.boundaries[0].predicate, Predicate::kIsUndefined);
  EXPECT_EQ(length.boundaries[0].target, "length");
  EXPECT_THAT(length.declared_types, ElementsAre(JsType::kNumber));
  EXPECT_EQ(api.steps.size(), 12u);
}

TEST(ParseSpecDocumentTest, SubstrGoldenAndByteStable) {
  const std::string html = Fixture("substr.html");
  auto a = ParseSpecDocument(html);
  auto b = ParseSpecDocument(html);
  ASSERT_TRUE(a.ok() && b.ok());
  const std::string first = Serialize(SpecDb{a->apis});
  EXPECT_EQ(first, Serialize(SpecDb{b->apis}));
  EXPECT_EQ(first, Serialize(SpecDb{a->apis}));
  EXPECT_EQ(first, Fixture("substr.golden.json"));
}

TEST(ParseSpecDocumentTest, ToFixedRange) {
  SpecDb db = ParseFixture("tofixed.html");
  const ApiSpec* api = db.Find("Number.prototype.toFixed");
  ASSERT_NE(api, nullptr);
  const ParamSpec* digits = api->FindParam("fractionDigits");
  ASSERT_NE(digits, nullptr);
  ASSERT_TRUE(digits->value_range.has_value());
  EXPECT_EQ(digits->value_range->first, 0);
  EXPECT_EQ(digits->value_range->second, 20);
  EXPECT_TRUE(digits->optional);
  EXPECT_FALSE(api->receiver_boundaries.empty());
  // The enclosing object clause is prose only.
  const ApiSpec* proto = db.Find("Properties of the Number Prototype Object");
  ASSERT_NE(proto, nullptr);
  EXPECT_TRUE(proto->prose_only);
}

TEST(ParseSpecDocumentTest, EveryLineLandsInOneStep) {
  SpecDb db = ParseFixture("tofixed.html");
  const std::string html = Fixture("tofixed.html");
  const ApiSpec* api = db.Find("Number.prototype.toFixed");
  ASSERT_NE(api, nullptr);
  EXPECT_EQ(static_cast<size_t>(std::count(html.begin(), html.end(), '\n')) > 0, true);
  // 24 <li> elements in the fixture, each a step.
  size_t items = 0;
  for (size_t p = html.find("<li>"); p != std::string::npos; p = html.find("<li>", p + 1)) {
    ++items;
  }
  EXPECT_EQ(api->steps.size(), items);
  for (size_t i = 0; i < api->steps.size(); ++i) {
    EXPECT_EQ(api->steps[i].index, static_cast<int>(i) + 1);
    EXPECT_FALSE(api->steps[i].raw_text.empty());
  }
}

TEST(ParseSpecDocumentTest, BoundaryOriginsAreTagged) {
  for (const char* name : {"substr.html", "tofixed.html", "corpus50.html"}) {
    SpecDb db = ParseFixture(name);
    for (const ApiSpec& api : db.apis) {
      auto check = [&](const BoundaryCondition& bc) {
        ASSERT_GE(bc.origin_step, 1);
        ASSERT_LE(bc.origin_step, static_cast<int>(api.steps.size()));
        EXPECT_TRUE(api.steps[bc.origin_step - 1].boundary_tag) << api.name;
      };
      for (const ParamSpec& p : api.parameters) {
        for (const auto& bc : p.boundaries) check(bc);
      }
      for (const auto& bc : api.receiver_boundaries) check(bc);
    }
  }
}

TEST(ParseSpecDocumentTest, EmptyDocument) {
  auto result = ParseSpecDocument("");
  ASSERT_TRUE(result.ok());
  EXPECT_TRUE(result->apis.empty());
  EXPECT_THAT(result->warnings, ElementsAre(HasSubstr("no API sections")));
}

TEST(ParseSpecDocumentTest, MalformedHtmlReportsOffset) {
  auto result = ParseSpecDocument("<h1>ok</h1>\n<p class=\"x");
  ASSERT_FALSE(result.ok());
  EXPECT_THAT(std::string(result.status().message()), HasSubstr("byte 12"));
  auto comment = ParseSpecDocument("<p>a</p><!-- open");
  EXPECT_THAT(std::string(comment.status().message()), HasSubstr("byte 8"));
}

TEST(ParseSpecDocumentTest, UnrenderedAlgorithmText) {
  const char* html =
      "<emu-clause id=\"sec-x\"><h1>Math.sign ( x )</h1><emu-alg>\n"
      "1. Let _n_ be ? ToNumber(_x_).\n"
      "1. If _n_ is *NaN*, return *NaN*.\n"
      "</emu-alg></emu-clause>";
  auto result = ParseSpecDocument(html);
  ASSERT_TRUE(result.ok());
  ASSERT_EQ(result->apis.size(), 1u);
  const ApiSpec& api = result->apis[0];
  EXPECT_EQ(api.source_section, "sec-x");
  ASSERT_EQ(api.steps.size(), 2u);
  EXPECT_EQ(api.steps[0].func, "ToNumber");
  ASSERT_EQ(api.parameters[0].boundaries.size(), 1u);
  EXPECT_EQ(api.parameters[0].boundaries[0].predicate, Predicate::kEquals);
  EXPECT_TRUE(std::isnan(api.parameters[0].boundaries[0].value.number()));
}

TEST(ParseSpecDocumentTest, AbstractOperationsAreNotApis) {
  const char* html =
      "<h1><span class=\"secnum\">7.1.4</span>ToInteger ( argument )</h1>"
      "<emu-alg><ol><li>Let number be ? ToNumber(argument).</li></ol></emu-alg>";
  auto result = ParseSpecDocument(html);
  ASSERT_TRUE(result.ok());
  EXPECT_TRUE(result->apis.empty());
}

TEST(ParseSpecDocumentTest, BracketedParametersAreOptional) {
  const char* html =
      "<h1>String.prototype.includes ( searchString [ , position ] )</h1><p>x</p>";
  auto result = ParseSpecDocument(html);
  ASSERT_TRUE(result.ok());
  ASSERT_EQ(result->apis.size(), 1u);
  const ApiSpec& api = result->apis[0];
  EXPECT_TRUE(api.prose_only);
  ASSERT_EQ(api.parameters.size(), 2u);
  EXPECT_FALSE(api.parameters[0].optional);
  EXPECT_TRUE(api.parameters[1].optional);
}

TEST(BoundaryValuesTest, ToFixedDigits) {
  SpecDb db = ParseFixture("tofixed.html");
  auto values = BoundaryValues(*db.Find("Number.prototype.toFixed"), "fractionDigits");
  ASSERT_TRUE(values.ok());
  EXPECT_THAT(*values, ElementsAre(Value::Undefined(), Value::Number(-1), Value::Number(0),
                                   Value::Number(20), Value::Number(21)));
}

TEST(BoundaryValuesTest, SubstrLengthAddsTypeRepresentatives) {
  SpecDb db = ParseFixture("substr.html");
  auto values = BoundaryValues(db.apis[0], "length");
  ASSERT_TRUE(values.ok());
  EXPECT_THAT(*values, ElementsAre(Value::Undefined(), Value::Number(3),
                                   Value::String("abc")));
}

TEST(BoundaryValuesTest, NoBoundariesGivesRepresentativesOnly) {
  ApiSpec api;
  api.name = "f";
  ParamSpec p;
  p.name = "x";
  p.declared_types = {JsType::kString};
  api.parameters.push_back(p);
  auto values = BoundaryValues(api, "x");
  ASSERT_TRUE(values.ok());
  EXPECT_THAT(*values, ElementsAre(Value::String("abc"), Value::Number(3)));
}

TEST(BoundaryValuesTest, UnknownParamNamesTheApi) {
  ApiSpec api;
  api.name = "Math.abs";
  auto values = BoundaryValues(api, "y");
  EXPECT_EQ(values.status().code(), absl::StatusCode::kNotFound);
  EXPECT_THAT(std::string(values.status().message()), HasSubstr("Math.abs"));
}

TEST(CoverageTest, Arithmetic) {
  SpecDb db;
  for (int i = 0; i < 10; ++i) {
    ApiSpec api;
    api.name = absl::StrCat("a", i);
    if (i < 8) {
      api.steps.push_back(SpecStep{1, StepKind::kReturn});
    } else {
      api.prose_only = true;
    }
    db.apis.push_back(api);
  }
  CoverageReport r = Coverage(db);
  EXPECT_EQ(r.total_sections, 10);
  EXPECT_EQ(r.extracted, 8);
  EXPECT_DOUBLE_EQ(r.ratio, 0.8);
  CoverageReport empty = Coverage(SpecDb{});
  EXPECT_TRUE(empty.empty);
  EXPECT_EQ(empty.total_sections, 0);
  EXPECT_EQ(empty.ratio, 0);
}

TEST(CoverageTest, FixtureCorpusMatchesHandCount) {
  // corpus50.html: 50 API and object sections, of which 41 carry algorithm
  // steps and 9 are prose only. The five decoy clauses (abstract operations
  // and document chapters) are not API sections.
  CoverageReport r = Coverage(ParseFixture("corpus50.html"));
  EXPECT_EQ(r.total_sections, 50);
  EXPECT_EQ(r.extracted, 41);
  EXPECT_DOUBLE_EQ(r.ratio, 41.0 / 50.0);
}

TEST(SerializeTest, RoundTrip) {
  for (const char* name : {"substr.html", "tofixed.html", "corpus50.html"}) {
    SpecDb db = ParseFixture(name);
    const std::string text = Serialize(db);
    auto back = Deserialize(text);
    ASSERT_TRUE(back.ok()) << name << ": " << back.status();
    EXPECT_TRUE(*back == db) << name;
    EXPECT_EQ(Serialize(*back), text);
  }
}

TEST(SerializeTest, RejectsUnknownFields) {
  auto r = Deserialize(R"({"apis": [], "extra": 1})");
  EXPECT_THAT(std::string(r.status().message()), HasSubstr("/extra"));
  const std::string text = Serialize(ParseFixture("substr.html"));
  std::string bad = text;
  bad.replace(bad.find("\"optional\""), 10, "\"optionel\"");
  r = Deserialize(bad);
  ASSERT_FALSE(r.ok());
  EXPECT_THAT(std::string(r.status().message()), HasSubstr("/apis/0/params/0/optionel"));
}

TEST(SerializeTest, RejectsInvertedRange) {
  const char* text = R"({"apis": [{"name": "f", "receiver": "global", "section": "1",
      "prose_only": true, "steps": [],
      "params": [{"name": "x", "types": [], "optional": false, "boundaries": [],
                  "range": [20, 0]}]}]})";
  auto r = Deserialize(text);
  ASSERT_FALSE(r.ok());
  EXPECT_THAT(std::string(r.status().message()), HasSubstr("/apis/0/params/0/range"));
}

TEST(SerializeTest, RejectsUntaggedOrigin) {
  const char* text = R"({"apis": [{"name": "f", "receiver": "global", "section": "1",
      "prose_only": false,
      "steps": [{"i": 1, "kind": "If", "raw": "If x is undefined", "boundary": false}],
      "params": [{"name": "x", "types": [], "optional": true,
                  "boundaries": [{"target": "x", "predicate": "IsUndefined", "step": 1}]}]}]})";
  auto r = Deserialize(text);
  ASSERT_FALSE(r.ok());
  EXPECT_THAT(std::string(r.status().message()), HasSubstr("boundaries/0/step"));
}

TEST(PatternTableTest, BundledTableLoadsAndBadRegexFails) {
  EXPECT_FALSE(PatternTable::Default().steps().empty());
  auto bad = PatternTable::FromJson(R"({"api_heading": "(", "accessor_heading": "",
      "object_heading": "", "alias": "", "steps": [], "boundaries": [],
      "conversions": {}, "global_names": [], "receiver_words": []})");
  ASSERT_FALSE(bad.ok());
  EXPECT_THAT(std::string(bad.status().message()), HasSubstr("/api_heading"));
}

}  // namespace
}  // namespace jsconform::specdb
