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

#include "jsconform/datagen.h"

#include <cmath>
#include <filesystem>
#include <set>
#include <string>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "jsconform/js/ast.h"
#include "jsconform/process.h"

namespace jsconform::datagen {
namespace {

using ::testing::Contains;
using ::testing::HasSubstr;
using ::testing::Not;

progen::TestProgram Fixture(const std::string& name) {
  auto text = ReadFile("tests/fixtures/programs/" + name);
  EXPECT_TRUE(text.ok()) << text.status();
  return progen::TestProgram::FromSource(text.value_or(""),
                                         progen::TestProgram::Origin::kExternal, "");
}

progen::TestProgram Inline(std::string source) {
  return progen::TestProgram::FromSource(std::move(source),
                                         progen::TestProgram::Origin::kBuiltIn, "");
}

const specdb::SpecDb& Db() { return specdb::BundledDb(); }

bool HaveNode() { return std::filesystem::exists("/usr/bin/node"); }

// Runs `source` under node and returns its stdout.
std::string RunNode(const std::string& source) {
  auto dir = ScopedTempDir::Create("datagen_test");
  EXPECT_TRUE(dir.ok());
  const auto path = dir->path() / "case.js";
  EXPECT_TRUE(WriteFile(path, source).ok());
  ProcessSpec spec;
  spec.argv = {"/usr/bin/node", path.string()};
  auto r = RunProcess(spec);
  EXPECT_TRUE(r.ok()) << r.status();
  return r.ok() ? r->stdout_text : "";
}

std::vector<TestCase> CasesFor(const progen::TestProgram& prog,
                               absl::string_view api, uint64_t seed = 7) {
  const auto sites = FindApiCalls(prog, Db());
  for (const CallSite& s : sites) {
    if (s.api_name != api) continue;
    Rng rng(seed);
    auto cases = MutateTestData(prog, s, *Db().Find(api), Db(), {}, rng);
    EXPECT_TRUE(cases.ok()) << cases.status();
    return cases.value_or(std::vector<TestCase>{});
  }
  ADD_FAILURE() << "no call site for " << api;
  return {};
}

const TestCase* FindCase(const std::vector<TestCase>& cases, MutationOrigin::Kind kind,
                         absl::string_view param, absl::string_view detail) {
  for (const TestCase& tc : cases) {
    if (tc.origin.kind == kind && tc.origin.param == param &&
        tc.origin.detail == detail) {
      return &tc;
    }
  }
  return nullptr;
}

TEST(FindApiCallsTest, ResolvesEntryParameters) {
  const auto sites = FindApiCalls(Fixture("fig3.js"), Db());
  ASSERT_EQ(sites.size(), 1u);
  EXPECT_EQ(sites[0].api_name, "String.prototype.substr");
  ASSERT_EQ(sites[0].args.size(), 2u);
  EXPECT_EQ(sites[0].args[0].kind, ArgBinding::Kind::kVariable);
  EXPECT_EQ(sites[0].args[0].entry_param, 1);
  EXPECT_EQ(sites[0].args[1].variable, "len");
  EXPECT_EQ(sites[0].args[1].entry_param, 2);
}

TEST(FindApiCallsTest, BranchAssignedArgumentIsOpaque) {
  const auto sites = FindApiCalls(Fixture("branch.js"), Db());
  ASSERT_EQ(sites.size(), 1u);
  EXPECT_EQ(sites[0].args[0].kind, ArgBinding::Kind::kOpaque);
  EXPECT_FALSE(sites[0].args[0].note.empty());
  EXPECT_EQ(sites[0].args[1].kind, ArgBinding::Kind::kLiteral);
}

TEST(FindApiCallsTest, MarksAbsentOptionalArguments) {
  const auto sites = FindApiCalls(Inline("function f(s) { return s.substr(1); }"), Db());
  ASSERT_EQ(sites.size(), 1u);
  ASSERT_EQ(sites[0].args.size(), 2u);
  EXPECT_FALSE(sites[0].args[0].absent);
  EXPECT_TRUE(sites[0].args[1].absent);
}

TEST(AsGeneratedTest, UsesTopLevelCallValues) {
  const auto b = AsGeneratedBindings(Fixture("fig3.js"), Db());
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[0].variable, "str");
  EXPECT_EQ(b[0].value, Value::String("Albert"));
  EXPECT_EQ(b[1].value, Value::Number(0));
  EXPECT_EQ(b[2].value, Value::Number(3));
}

TEST(AsGeneratedTest, FallsBackToInferredTypes) {
  const auto b = AsGeneratedBindings(
      Inline("function f(s, n) { return s.substr(n); }"), Db());
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0].value.type(), JsType::kString);
  EXPECT_EQ(b[1].value.type(), JsType::kNumber);
}

// The motivating case: dropping the length must give the whole string.
TEST(MutateTest, UndefinedLengthCaseReproducesAlbert) {
  const auto cases = CasesFor(Fixture("fig3.js"), "String.prototype.substr");
  const TestCase* tc = FindCase(cases, MutationOrigin::Kind::kBoundary, "length", "undefined");
  ASSERT_NE(tc, nullptr);
  EXPECT_THAT(tc->source(), HasSubstr("var len = undefined;"));
  EXPECT_EQ(tc->program.source, Fixture("fig3.js").source);
  if (!HaveNode()) GTEST_SKIP() << "node not installed";
  EXPECT_EQ(RunNode(tc->source()), "Albert\n");
  EXPECT_EQ(RunNode(cases[0].source()), "Alb\n");
}

TEST(MutateTest, ToFixedBoundarySetAndRewrite) {
  const auto prog = Fixture("tofixed.js");
  const auto cases = CasesFor(prog, "Number.prototype.toFixed");
  std::set<std::string> details;
  for (const TestCase& tc : cases) {
    if (tc.origin.kind == MutationOrigin::Kind::kBoundary &&
        tc.origin.param == "fractionDigits") {
      details.insert(tc.origin.detail);
    }
  }
  for (const char* want : {"-1", "0", "20", "21", "undefined"}) {
    EXPECT_THAT(details, Contains(want));
  }
  const TestCase* tc = FindCase(cases, MutationOrigin::Kind::kBoundary, "fractionDigits", "21");
  ASSERT_NE(tc, nullptr);
  EXPECT_THAT(tc->program.source, HasSubstr("var digits = 21;"));
  EXPECT_NE(tc->program.id, prog.id);
  EXPECT_EQ(tc->program_id, prog.id);
  if (!HaveNode()) GTEST_SKIP() << "node not installed";
  const TestCase* neg = FindCase(cases, MutationOrigin::Kind::kBoundary, "fractionDigits", "-1");
  ASSERT_NE(neg, nullptr);
  EXPECT_EQ(RunNode(neg->source()), "EXC RangeError\n");
}

TEST(MutateTest, BoundaryCasesCoverEveryValue) {
  const auto prog = Fixture("fig3.js");
  const auto cases = CasesFor(prog, "String.prototype.substr");
  const specdb::ApiSpec& spec = *Db().Find("String.prototype.substr");
  for (const specdb::ParamSpec& p : spec.parameters) {
    auto values = specdb::BoundaryValues(spec, p.name);
    ASSERT_TRUE(values.ok());
    size_t n = 0;
    for (const TestCase& tc : cases) {
      n += tc.origin.kind == MutationOrigin::Kind::kBoundary && tc.origin.param == p.name;
    }
    EXPECT_EQ(n, values->size()) << p.name;
  }
}

TEST(MutateTest, ReceiverBoundariesRewriteTheReceiverDefinition) {
  const auto cases = CasesFor(Fixture("tofixed.js"), "Number.prototype.toFixed");
  const TestCase* tc = FindCase(cases, MutationOrigin::Kind::kBoundary, "receiver", "NaN");
  ASSERT_NE(tc, nullptr);
  EXPECT_THAT(tc->program.source, HasSubstr("var x = NaN;"));
}

TEST(MutateTest, OpaqueArgumentsAreSkippedWithNote) {
  const auto cases = CasesFor(Fixture("branch.js"), "String.prototype.substr");
  ASSERT_FALSE(cases.empty());
  EXPECT_THAT(cases[0].notes, Contains(HasSubstr("skipped start")));
  for (const TestCase& tc : cases) EXPECT_NE(tc.origin.param, "start");
}

TEST(MutateTest, LiteralArgumentsAreRewrittenInPlace) {
  const auto cases = CasesFor(Inline("function f() { return \"hello\".substr(1, 2); }"),
                              "String.prototype.substr");
  const TestCase* tc = FindCase(cases, MutationOrigin::Kind::kBoundary, "start", "-1");
  ASSERT_NE(tc, nullptr);
  EXPECT_THAT(tc->program.source, HasSubstr("\"hello\".substr((-1), 2)"));
}

TEST(MutateTest, AbsentArgumentsAreAppended) {
  const auto cases = CasesFor(Inline("function f(s) { return s.substr(1); }"),
                              "String.prototype.substr");
  const TestCase* tc = FindCase(cases, MutationOrigin::Kind::kBoundary, "length", "\"abc\"");
  ASSERT_NE(tc, nullptr);
  EXPECT_THAT(tc->program.source, HasSubstr("s.substr(1, \"abc\")"));
}

TEST(MutateTest, ArityCases) {
  const auto cases = CasesFor(Fixture("fig3.js"), "String.prototype.substr");
  const TestCase* drop = FindCase(cases, MutationOrigin::Kind::kArity, "length", "drop");
  ASSERT_NE(drop, nullptr);
  EXPECT_THAT(drop->program.source, HasSubstr("str.substr(start);"));
  const TestCase* extra = FindCase(cases, MutationOrigin::Kind::kArity, "", "extra");
  ASSERT_NE(extra, nullptr);
  EXPECT_THAT(extra->program.source, HasSubstr("str.substr(start, len, "));
}

TEST(MutateTest, RandomCasesPerSite) {
  const auto cases = CasesFor(Fixture("fig3.js"), "String.prototype.substr");
  size_t n = 0;
  for (const TestCase& tc : cases) n += tc.origin.kind == MutationOrigin::Kind::kRandom;
  EXPECT_EQ(n, 3u);
}

TEST(MutateTest, ZeroParameterApiHasNoRandomCases) {
  const auto cases = CasesFor(Inline("function f(s) { return s.trim(); }"),
                              "String.prototype.trim");
  ASSERT_FALSE(cases.empty());
  for (const TestCase& tc : cases) {
    EXPECT_NE(tc.origin.kind, MutationOrigin::Kind::kRandom);
    EXPECT_NE(tc.origin.kind, MutationOrigin::Kind::kBoundary);
  }
  EXPECT_NE(FindCase(cases, MutationOrigin::Kind::kArity, "", "extra"), nullptr);
}

TEST(MutateTest, RejectsMismatchedSpec) {
  const auto prog = Fixture("fig3.js");
  const auto sites = FindApiCalls(prog, Db());
  Rng rng(1);
  auto r = MutateTestData(prog, sites[0], *Db().Find("Number.prototype.toFixed"), Db(),
                          {}, rng);
  EXPECT_EQ(r.status().code(), absl::StatusCode::kInvalidArgument);
}

TEST(GenerateTestCasesTest, DeterministicPerSeed) {
  const auto prog = Fixture("fig3.js");
  auto ids = [&](uint64_t seed) {
    std::vector<std::string> out;
    for (const TestCase& tc : GenerateTestCases(prog, Db(), {}, seed)) out.push_back(tc.id);
    return out;
  };
  EXPECT_EQ(ids(11), ids(11));
  EXPECT_NE(ids(11), ids(12));
}

TEST(GenerateTestCasesTest, ProgramWithoutApiCallsGivesOneCase) {
  const auto cases = GenerateTestCases(Inline("function f(a) { return a + 1; }"), Db(), {}, 1);
  ASSERT_EQ(cases.size(), 1u);
  EXPECT_EQ(cases[0].origin.kind, MutationOrigin::Kind::kAsGenerated);
  EXPECT_TRUE(cases[0].api.empty());
}

// Every case of a valid program must itself parse.
TEST(GenerateTestCasesTest, CasesOfValidProgramsAreValid) {
  progen::GenConfig cfg;
  cfg.rng_seed = 99;
  const auto batch = progen::GenerateBatch(cfg, Db(), 150, 1);
  size_t checked = 0;
  for (const progen::TestProgram& prog : batch) {
    if (!js::IsSyntacticallyValid(prog.source)) continue;
    for (const TestCase& tc : GenerateTestCases(prog, Db(), {}, 3)) {
      ++checked;
      ASSERT_TRUE(js::IsSyntacticallyValid(tc.source())) << tc.source();
    }
  }
  EXPECT_GT(checked, 500u);
}

TEST(DriverTest, CanonicalOutputForSpecialNumbers) {
  const auto prog = Inline("function f(x) { return x; }");
  if (!HaveNode()) GTEST_SKIP() << "node not installed";
  auto nan = SynthesizeDriver(prog, {{"x", Value::Number(std::nan("")), true}});
  ASSERT_TRUE(nan.ok());
  EXPECT_EQ(RunNode(nan->source()), "NaN\n");
  auto neg = SynthesizeDriver(prog, {{"x", Value::Number(-0.0), true}});
  ASSERT_TRUE(neg.ok());
  EXPECT_EQ(RunNode(neg->source()), "-0\n");
  auto arr = SynthesizeDriver(
      prog, {{"x", Value::Array({Value::String("a\nb"), Value::Number(1)}), true}});
  ASSERT_TRUE(arr.ok());
  EXPECT_EQ(RunNode(arr->source()), "[\"a\\nb\",1]\n");
}

TEST(DriverTest, NoEntryFunction) {
  auto tc = SynthesizeDriver(Inline("var x = 1;"), {});
  ASSERT_TRUE(tc.ok());
  EXPECT_THAT(tc->driver, HasSubstr("no entry function"));
}

TEST(DriverTest, RejectsNonIdentifierBinding) {
  auto tc = SynthesizeDriver(Inline("function f(x) { return x; }"),
                             {{"not valid", Value::Null(), true}});
  EXPECT_FALSE(tc.ok());
}

TEST(DriverTest, UnboundParamsAreUndefined) {
  auto tc = SynthesizeDriver(Inline("function f(x, y) { return y; }"),
                             {{"x", Value::Number(1), true}});
  ASSERT_TRUE(tc.ok());
  EXPECT_THAT(tc->driver, HasSubstr("f(x, undefined)"));
}

TEST(RandomValueTest, StaysWithinUtf16Limit) {
  Rng rng(5);
  bool saw_unicode = false;
  for (int i = 0; i < 2000; ++i) {
    Value v = RandomValue(JsType::kString, rng);
    size_t units = 0;
    for (size_t k = 0; k < v.string().size(); ++k) {
      const unsigned char c = v.string()[k];
      if ((c & 0xC0) == 0x80) continue;
      units += c >= 0xF0 ? 2 : 1;
      saw_unicode |= c >= 0x80;
    }
    ASSERT_LE(units, 64u);
  }
  EXPECT_TRUE(saw_unicode);
}

TEST(RandomValueTest, NumberStrata) {
  Rng rng(8);
  bool nan = false, inf = false, neg_zero = false, frac = false;
  for (int i = 0; i < 2000; ++i) {
    const double d = RandomValue(JsType::kNumber, rng).number();
    nan |= std::isnan(d);
    inf |= std::isinf(d);
    neg_zero |= d == 0 && std::signbit(d);
    frac |= std::isfinite(d) && d != std::floor(d);
  }
  EXPECT_TRUE(nan && inf && neg_zero && frac);
}

TEST(CaseMetaTest, RecordsOrigin) {
  const auto cases = CasesFor(Fixture("fig3.js"), "String.prototype.substr");
  const auto meta = CaseMeta(cases[1]);
  EXPECT_EQ(meta["api"], "String.prototype.substr");
  EXPECT_EQ(meta["mutation_origin"]["kind"], "boundary");
  EXPECT_EQ(meta["program_id"], cases[1].program_id);
  EXPECT_EQ(meta["bindings"].size(), 3u);
}

}  // namespace
}  // namespace jsconform::datagen
