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

#include "jsconform/reduce.h"

#include <chrono>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "absl/strings/match.h"
#include "absl/strings/str_split.h"
#include "helpers/classifier_matrix.h"
#include "jsconform/js/ast.h"

namespace jsconform::reduce {
namespace {

using ::testing::HasSubstr;
using harness::Outcome;

const char kMock[] = JSCONFORM_MOCK_ENGINE;

datagen::TestCase CaseOf(const std::string& source) {
  auto prog = progen::TestProgram::FromSource(source, progen::TestProgram::Origin::kExternal, "");
  auto tc = datagen::SynthesizeDriver(prog,
                                      datagen::AsGeneratedBindings(prog, specdb::BundledDb()));
  EXPECT_TRUE(tc.ok()) << tc.status();
  return *tc;
}

datagen::TestCase InjectedCase() {
  auto text = ReadFile("tests/fixtures/reduce/injected.js");
  EXPECT_TRUE(text.ok());
  return CaseOf(*text);
}

std::vector<harness::Testbed> InjectedTestbeds() {
  auto tbs = testing::MockTestbeds(nlohmann::json::parse(R"json([
    {"id": "a", "rules": []},
    {"id": "b", "rules": []},
    {"id": "c", "rules": [{"if_contains": ["var radix = 36;", ".toString(radix)"],
                           "action": "print", "text": "WRONG"}]}])json"),
                                   kMock);
  EXPECT_TRUE(tbs.ok());
  return *tbs;
}

harness::MatrixOptions Options() {
  harness::MatrixOptions o;
  o.policy = testing::ScaledPolicy();
  o.jobs = 3;
  return o;
}

size_t BodyStatements(const std::string& source) {
  auto ast = js::Parse(source);
  if (!ast.ok()) return 0;
  for (const js::Node* st : js::Statements(ast->root())) {
    if (st->kind == js::NodeKind::kFunctionDecl) {
      return js::Statements(*st->child(1)).size();
    }
  }
  return 0;
}

// Replay stub returning a fixed verdict for every input.
ReductionOracle Constant(bool holds) {
  ReductionOracle o;
  o.outcome = Outcome::kWrongOutput;
  o.deviants = {"x"};
  o.replay = [holds](const datagen::TestCase& tc) -> absl::StatusOr<harness::Verdict> {
    harness::Verdict v;
    v.case_id = tc.id;
    v.outcome = holds ? Outcome::kWrongOutput : Outcome::kPass;
    if (holds) v.deviants = {"x"};
    return v;
  };
  return o;
}

TEST(ReduceTest, InjectedBugReducesToCore) {
  const datagen::TestCase tc = InjectedCase();
  ASSERT_EQ(BodyStatements(tc.program.source), 50u);
  const auto testbeds = InjectedTestbeds();
  std::optional<harness::Verdict> target;
  harness::RunMatrix(testbeds, {harness::FromTestCase(tc)}, Options(),
                     [&](const harness::Verdict& v) { target = v; });
  ASSERT_TRUE(target.has_value());
  ASSERT_EQ(target->outcome, Outcome::kWrongOutput);
  ASSERT_EQ(target->deviants, std::vector<std::string>{"c@1/normal"});

  const ReductionOracle oracle = HarnessOracle(*target, testbeds, Options());
  const auto start = std::chrono::steady_clock::now();
  auto r = Reduce(tc, oracle);
  const auto elapsed = std::chrono::steady_clock::now() - start;
  ASSERT_TRUE(r.ok()) << r.status();
  const std::string& out = r->tc.program.source;
  EXPECT_LE(BodyStatements(out), 3u) << out;
  EXPECT_THAT(out, HasSubstr("var radix = 36;"));
  EXPECT_THAT(out, HasSubstr(".toString(radix)"));
  EXPECT_LE(r->stats.oracle_calls, 2000);
  EXPECT_FALSE(r->stats.budget_exhausted);
  EXPECT_LT(elapsed, std::chrono::seconds(60));
  EXPECT_LT(out.size(), tc.program.source.size());
  EXPECT_EQ(r->tc.driver, tc.driver);

  // Verdict preserved and 1-minimal.
  EXPECT_TRUE(*oracle(r->tc));
  for (const std::string& step : SingleSteps(r->tc)) {
    datagen::TestCase smaller = r->tc;
    smaller.program.source = step;
    EXPECT_FALSE(*oracle(smaller)) << step;
  }

  // Idempotent.
  auto again = Reduce(r->tc, oracle);
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(again->tc.program.source, out);
  EXPECT_EQ(again->stats.removals, 0);
}

TEST(ReduceTest, MinimalCaseUnchanged) {
  const auto tc = CaseOf("function f(a) {\n}\n");
  auto r = Reduce(tc, Constant(true));
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->tc.program.source, tc.program.source);
  EXPECT_EQ(r->stats.passes, 1);
  EXPECT_EQ(r->stats.removals, 0);
}

TEST(ReduceTest, AcceptAllOracleLeavesEmptyEntryFunction) {
  const auto tc = CaseOf(
      "function f(a, b) {\n  var x = a + b;\n  if (x > 2) {\n    x = x * 2;\n  }\n"
      "  return x;\n}\nvar r = f(1, 2);\n");
  auto r = Reduce(tc, Constant(true));
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->tc.program.source, "function f(a, b) {\n}\n");
  EXPECT_TRUE(js::IsSyntacticallyValid(r->tc.source()));
}

TEST(ReduceTest, FalseOnInputIsError) {
  auto r = Reduce(CaseOf("function f() { return 1; }\n"), Constant(false));
  EXPECT_EQ(r.status().code(), absl::StatusCode::kFailedPrecondition);
}

TEST(ReduceTest, FlakyOracleAborts) {
  ReductionOracle o = Constant(true);
  auto calls = std::make_shared<int>(0);
  o.replay = [calls](const datagen::TestCase&) -> absl::StatusOr<harness::Verdict> {
    harness::Verdict v;
    // Input and first candidate hold, the confirmation does not.
    v.outcome = ++*calls <= 2 ? Outcome::kWrongOutput : Outcome::kPass;
    if (v.outcome == Outcome::kWrongOutput) v.deviants = {"x"};
    return v;
  };
  auto r = Reduce(CaseOf("function f() {\n  var a = 1;\n  return a;\n}\n"), o);
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(IsFlakyOracle(r.status())) << r.status();
}

TEST(ReduceTest, BudgetReturnsBestSoFar) {
  const datagen::TestCase tc = InjectedCase();
  ReduceOptions opts;
  opts.budget = 7;
  auto r = Reduce(tc, Constant(true), opts);
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(r->stats.budget_exhausted);
  EXPECT_LE(r->stats.oracle_calls, 7);
  EXPECT_LT(r->tc.program.source.size(), tc.program.source.size());
}

TEST(SingleStepsTest, LargestFirstAndValid) {
  const auto tc = CaseOf("function f(a) {\n  var x = 1;\n  if (a) {\n    x = [a, a, a];\n  }\n"
                         "  return x;\n}\n");
  const auto steps = SingleSteps(tc);
  ASSERT_FALSE(steps.empty());
  // The if statement is the largest removable piece.
  EXPECT_THAT(steps[0], ::testing::Not(HasSubstr("if (a)")));
  for (const std::string& s : steps) {
    EXPECT_TRUE(js::IsSyntacticallyValid(s)) << s;
    EXPECT_LT(s.size(), tc.program.source.size());
    EXPECT_THAT(s, HasSubstr("function f(a) {"));
  }
}

}  // namespace
}  // namespace jsconform::reduce
