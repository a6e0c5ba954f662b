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

#include "jsconform/harness.h"

#include <csignal>
#include <filesystem>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "absl/strings/str_cat.h"
#include "helpers/classifier_matrix.h"

namespace jsconform::harness {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;
using Exit = ExecutionResult::Exit;
using Phase = ExecutionResult::Phase;

const char kMock[] = JSCONFORM_MOCK_ENGINE;

Testbed Mock(const std::string& id, const std::string& rules = "",
             Mode mode = Mode::kNormal) {
  Testbed tb;
  tb.engine_id = id;
  tb.version = "1";
  tb.binary = kMock;
  tb.argv_template = {"{FILE}"};
  tb.mode = mode;
  tb.edition = "ES2023";
  tb.parse_profile = "mock";
  if (!rules.empty()) tb.env["MOCK_RULES"] = rules;
  return tb;
}

std::string PrintRule(const std::string& text) {
  return nlohmann::json{{"rules", {{{"action", "print"}, {"text", text}}}}}.dump();
}

ExecutionResult Ran(const std::string& tb, const std::string& out, int ms = 10) {
  ExecutionResult r;
  r.testbed = tb;
  r.case_id = "c";
  r.stdout_text = out;
  r.duration = std::chrono::milliseconds(ms);
  return r;
}

ExecutionResult With(ExecutionResult r, Exit exit, Phase phase = Phase::kRan) {
  r.exit = exit;
  r.phase = phase;
  if (exit == Exit::kCrashed) r.signal = SIGSEGV;
  return r;
}

TEST(TestbedConfigTest, DerivesTwoTestbedsPerEngine) {
  auto cfg = ParseTestbedConfig(nlohmann::json::parse(R"({"testbeds": [
    {"engine_id": "node", "version": "20", "binary": "/usr/bin/node",
     "editions": ["ES5", "ES2019"]},
    {"engine_id": "qjs", "version": "2021", "binary": "qjs",
     "argv_template": ["--std", "{FILE}"], "modes": ["normal"]}]})"));
  ASSERT_TRUE(cfg.ok()) << cfg.status();
  auto tbs = DeriveTestbeds(*cfg);
  ASSERT_TRUE(tbs.ok());
  ASSERT_EQ(tbs->size(), 3u);
  EXPECT_EQ((*tbs)[0].id(), "node@20/normal");
  EXPECT_EQ((*tbs)[1].id(), "node@20/strict");
  EXPECT_EQ((*tbs)[0].edition, "ES2019");
  EXPECT_EQ((*tbs)[2].parse_profile, "qjs");
  EXPECT_THAT((*tbs)[2].argv_template, ElementsAre("--std", "{FILE}"));
}

TEST(TestbedConfigTest, RejectsBadConfigs) {
  auto parse = [](const char* text) {
    return ParseTestbedConfig(nlohmann::json::parse(text)).status();
  };
  EXPECT_THAT(parse(R"([{"engine_id": "a", "version": "1"}])").message(),
              HasSubstr("/testbeds/0/binary"));
  EXPECT_THAT(parse(R"([{"engine_id": "a", "version": "1", "binary": "x", "colour": 1}])")
                  .message(),
              HasSubstr("colour: unknown field"));
  EXPECT_THAT(parse(R"([{"engine_id": "a", "version": "1", "binary": "x",
                         "argv_template": ["-e"]}])").message(),
              HasSubstr("{FILE}"));
  EXPECT_THAT(parse(R"([{"engine_id": "a", "version": "1", "binary": "x",
                         "modes": ["sloppy"]}])").message(),
              HasSubstr("sloppy"));
  auto dup = ParseTestbedConfig(nlohmann::json::parse(
      R"([{"engine_id": "a", "version": "1", "binary": "x"},
          {"engine_id": "a", "version": "1", "binary": "y"}])"));
  ASSERT_TRUE(dup.ok());
  EXPECT_THAT(DeriveTestbeds(*dup).status().message(), HasSubstr("duplicate testbed"));
  auto bad_ed = ParseTestbedConfig(nlohmann::json::parse(
      R"([{"engine_id": "a", "version": "1", "binary": "x", "editions": ["ES7"]}])"));
  EXPECT_FALSE(DeriveTestbeds(*bad_ed).ok());
}

TEST(TestbedConfigTest, RelativeBinaryResolvesAgainstConfigDir) {
  auto dir = ScopedTempDir::Create("harness_test");
  ASSERT_TRUE(dir.ok());
  ASSERT_TRUE(WriteFile(dir->path() / "tb.json",
                        R"([{"engine_id": "a", "version": "1", "binary": "bin/eng"}])")
                  .ok());
  auto tbs = LoadTestbeds(dir->path() / "tb.json");
  ASSERT_TRUE(tbs.ok()) << tbs.status();
  EXPECT_EQ((*tbs)[0].binary, (dir->path() / "bin/eng").string());
}

TEST(EditionTableTest, GatesNewerApis) {
  const EditionTable& t = EditionTable::Bundled();
  Testbed old = Mock("old");
  old.edition = "ES2015";
  EXPECT_TRUE(t.Supports(old, {"String.prototype.includes"}));
  EXPECT_FALSE(t.Supports(old, {"Array.prototype.flat"}));
  EXPECT_TRUE(t.Supports(old, {"String.prototype.substr", "not.listed"}));
}

TEST(ParseErrorTableTest, NodeCompileErrorsOnly) {
  const ParseErrorTable& t = ParseErrorTable::Bundled();
  const std::string compile =
      "/tmp/x.js:1\nvar a = ;\n        ^\n\nSyntaxError: Unexpected token ';'\n"
      "    at wrapSafe (node:internal/modules/cjs/loader:1464:18)\n";
  const std::string runtime =
      "SyntaxError: Expected property name\n    at JSON.parse (<anonymous>)\n";
  EXPECT_TRUE(t.IsParseFailure("node", 1, "", compile));
  EXPECT_FALSE(t.IsParseFailure("node", 1, "", runtime));
  EXPECT_FALSE(t.IsParseFailure("node", 0, "", compile));
  EXPECT_TRUE(t.IsParseFailure("unknown-engine", 2, "", "MOCK-PARSE-ERROR: x\n"));
}

TEST(ParseErrorTableTest, RejectsBadPattern) {
  auto t = ParseErrorTable::FromJson(
      nlohmann::json::parse(R"({"profiles": {"x": [{"pattern": "("}]}})"));
  EXPECT_THAT(t.status().message(), HasSubstr("/profiles/x/0/pattern"));
}

TEST(CanonicalizeOutputTest, TrailingWhitespaceAndBlankLines) {
  EXPECT_EQ(CanonicalizeOutput("a  \r\nb\t\n\n\n"), "a\nb\n");
  EXPECT_EQ(CanonicalizeOutput(""), "");
  EXPECT_EQ(CanonicalizeOutput("  x"), "  x\n");
}

TEST(ClassifyTest, NeedsTwoResults) {
  EXPECT_FALSE(Classify({Ran("a", "1")}, {}).ok());
}

TEST(ClassifyTest, MajorityDeviant) {
  auto v = Classify({Ran("a", "A"), Ran("b", "A"), Ran("c", "A"), Ran("d", "A"),
                     Ran("e", "B")},
                    {});
  ASSERT_TRUE(v.ok());
  EXPECT_EQ(v->outcome, Outcome::kWrongOutput);
  EXPECT_THAT(v->deviants, ElementsAre("e"));
  EXPECT_EQ(v->majority_output, "A");
  EXPECT_EQ(v->deviant_outputs.at("e"), "B");
}

TEST(ClassifyTest, TieIsNoMajority) {
  auto v = Classify({Ran("a", "A"), Ran("b", "A"), Ran("c", "B"), Ran("d", "B")}, {});
  ASSERT_TRUE(v.ok());
  EXPECT_EQ(v->outcome, Outcome::kNoMajority);
  EXPECT_TRUE(v->deviants.empty());
  EXPECT_FALSE(v->majority_output.has_value());
}

TEST(ClassifyTest, PassHasNoDeviants) {
  auto v = Classify({Ran("a", "A"), Ran("b", "A")}, {});
  ASSERT_TRUE(v.ok());
  EXPECT_EQ(v->outcome, Outcome::kPass);
  EXPECT_TRUE(v->deviants.empty());
}

TEST(ClassifyTest, ParseLadder) {
  auto all = Classify({With(Ran("a", ""), Exit::kExited, Phase::kParseFail),
                       With(Ran("b", ""), Exit::kExited, Phase::kParseFail)},
                      {});
  EXPECT_EQ(all->outcome, Outcome::kDiscarded);
  auto some = Classify({With(Ran("a", ""), Exit::kExited, Phase::kParseFail),
                        Ran("b", "x"), With(Ran("c", ""), Exit::kCrashed)},
                       {});
  EXPECT_EQ(some->outcome, Outcome::kInconsistentParse);
  EXPECT_THAT(some->deviants, ElementsAre("a"));
}

TEST(ClassifyTest, TwoTRule) {
  TimeoutPolicy p;
  p.floor = std::chrono::milliseconds(0);
  // t = 300; 601 is past 2t, 600 is not.
  auto slow = Classify({Ran("a", "x", 300), Ran("b", "x", 200), Ran("c", "x", 601)}, p);
  EXPECT_EQ(slow->outcome, Outcome::kRuntimeTimeout);
  EXPECT_THAT(slow->deviants, ElementsAre("c"));
  auto edge = Classify({Ran("a", "x", 300), Ran("b", "x", 600)}, p);
  EXPECT_EQ(edge->outcome, Outcome::kPass);
}

TEST(ClassifyTest, FloorAbsorbsNoise) {
  TimeoutPolicy p;  // floor 250ms
  auto v = Classify({Ran("a", "x", 2), Ran("b", "x", 3), Ran("c", "x", 40)}, p);
  EXPECT_EQ(v->outcome, Outcome::kPass);
}

TEST(ClassifyTest, AllCappedIsDiscarded) {
  auto v = Classify({With(Ran("a", ""), Exit::kTimedOut), With(Ran("b", ""), Exit::kTimedOut)},
                    {});
  EXPECT_EQ(v->outcome, Outcome::kDiscarded);
  EXPECT_FALSE(v->note.empty());
}

TEST(ClassifyTest, TimeoutBeforeCrash) {
  auto v = Classify({Ran("a", "x"), With(Ran("b", ""), Exit::kCrashed),
                     With(Ran("c", ""), Exit::kTimedOut)},
                    {});
  EXPECT_EQ(v->outcome, Outcome::kRuntimeTimeout);
  EXPECT_THAT(v->deviants, ElementsAre("c"));
}

TEST(ClassifyTest, NonzeroExitIsObservable) {
  ExecutionResult bad = Ran("c", "x");
  bad.exit_code = 1;
  auto v = Classify({Ran("a", "x"), Ran("b", "x"), bad}, {});
  EXPECT_EQ(v->outcome, Outcome::kWrongOutput);
}

TEST(VerdictLogTest, RoundTripWithoutDurations) {
  auto v = Classify({Ran("a", "A", 5), Ran("b", "A", 7), Ran("c", "B", 9)}, {});
  ASSERT_TRUE(v.ok());
  const auto rec = v->ToLogRecord();
  EXPECT_FALSE(rec.contains("durations"));
  EXPECT_EQ(rec["majority_output_hash"], ContentHash("A"));
  auto back = Verdict::FromLogRecord(rec);
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(back->outcome, Outcome::kWrongOutput);
  EXPECT_EQ(back->deviants, v->deviants);
  EXPECT_EQ(back->deviant_outputs, v->deviant_outputs);
  EXPECT_EQ(back->ToLogRecord(), rec);
  EXPECT_FALSE(Verdict::FromLogRecord({{"case", "x"}, {"outcome", "Meh"}}).ok());
}

TEST(RunTestbedTest, PrintsOutput) {
  auto r = RunTestbed(Mock("m", PrintRule("42")), {"c1", "var x;", {}},
                      testing::ScaledPolicy());
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(r->phase, Phase::kRan);
  EXPECT_EQ(r->exit, Exit::kExited);
  EXPECT_EQ(r->stdout_text, "42\n");
  EXPECT_EQ(r->testbed, "m@1/normal");
}

TEST(RunTestbedTest, CrashIsReported) {
  auto r = RunTestbed(Mock("m", R"({"rules": [{"action": "crash", "signal": 6}]})"),
                      {"c1", "var x;", {}}, testing::ScaledPolicy());
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->exit, Exit::kCrashed);
  EXPECT_EQ(r->signal, SIGABRT);
}

TEST(RunTestbedTest, ParseFailureDetected) {
  auto r = RunTestbed(Mock("m"), {"c1", "function (", {}}, testing::ScaledPolicy());
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->phase, Phase::kParseFail);
}

TEST(RunTestbedTest, StrictModeAddsDirective) {
  const std::string rules =
      R"({"rules": [{"if_strict": true, "action": "print", "text": "strict"}]})";
  auto strict = RunTestbed(Mock("m", rules, Mode::kStrict), {"c1", "var x;", {}},
                           testing::ScaledPolicy());
  auto normal = RunTestbed(Mock("m", rules, Mode::kNormal), {"c1", "var x;", {}},
                           testing::ScaledPolicy());
  EXPECT_EQ(strict->stdout_text, "strict\n");
  EXPECT_THAT(normal->stdout_text, HasSubstr("mock "));
}

TEST(RunTestbedTest, CapKillsHangingEngine) {
  TimeoutPolicy p;
  p.absolute_cap = std::chrono::milliseconds(300);
  auto r = RunTestbed(Mock("m", R"({"rules": [{"action": "hang"}]})"), {"c1", "", {}}, p);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->exit, Exit::kTimedOut);
  EXPECT_LE(r->duration, p.absolute_cap);
}

TEST(RunTestbedTest, MissingBinaryIsTestbedError) {
  Testbed tb = Mock("m");
  tb.binary = "/nonexistent/engine";
  auto r = RunTestbed(tb, {"c1", "", {}}, testing::ScaledPolicy());
  EXPECT_FALSE(r.ok());
  EXPECT_THAT(r.status().message(), HasSubstr("m@1/normal"));
}

TEST(RunMatrixTest, OneVerdictPerCaseInOrder) {
  std::vector<Case> cases = {{"c1", "var a;", {}}, {"c2", "var b;", {}}, {"c3", "var c;", {}}};
  std::vector<std::string> ids;
  MatrixOptions opts;
  opts.policy = testing::ScaledPolicy();
  opts.jobs = 3;
  auto s = RunMatrix({Mock("a"), Mock("b")}, cases, opts,
                     [&](const Verdict& v) { ids.push_back(v.case_id); });
  EXPECT_THAT(ids, ElementsAre("c1", "c2", "c3"));
  EXPECT_EQ(s.executions, 6u);
  EXPECT_TRUE(s.errors.empty());
}

TEST(RunMatrixTest, EmptyCaseSet) {
  size_t n = 0;
  RunMatrix({Mock("a"), Mock("b")}, {}, {}, [&](const Verdict&) { ++n; });
  EXPECT_EQ(n, 0u);
}

TEST(RunMatrixTest, EditionGatingExcludesTestbed) {
  Testbed old = Mock("old", PrintRule("different"));
  old.edition = "ES2015";
  std::vector<Verdict> got;
  MatrixOptions opts;
  opts.policy = testing::ScaledPolicy();
  auto s = RunMatrix({Mock("a"), Mock("b"), old},
                     {{"c1", "var x = [[1]].flat();", {"Array.prototype.flat"}}}, opts,
                     [&](const Verdict& v) { got.push_back(v); });
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].outcome, Outcome::kPass);
  EXPECT_EQ(got[0].durations.size(), 2u);
  EXPECT_EQ(s.skipped_by_edition, 1u);
}

TEST(RunMatrixTest, ErrorsAggregateAndMatrixContinues) {
  Testbed broken = Mock("broken");
  broken.binary = "/nonexistent/engine";
  std::vector<Verdict> got;
  MatrixOptions opts;
  opts.policy = testing::ScaledPolicy();
  auto s = RunMatrix({Mock("a"), Mock("b"), broken},
                     {{"c1", "var x;", {}}, {"c2", "var y;", {}}}, opts,
                     [&](const Verdict& v) { got.push_back(v); });
  EXPECT_EQ(got.size(), 2u);
  EXPECT_EQ(s.errors.size(), 2u);
  EXPECT_EQ(got[0].outcome, Outcome::kPass);
}

TEST(RunMatrixTest, TooFewEligibleTestbedsIsDiscarded) {
  std::vector<Verdict> got;
  RunMatrix({Mock("a")}, {{"c1", "var x;", {}}}, {},
            [&](const Verdict& v) { got.push_back(v); });
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].outcome, Outcome::kDiscarded);
  EXPECT_THAT(got[0].note, HasSubstr("fewer than two"));
}

// A sleeper at 1.5x the others stays within 2t.
TEST(RunMatrixTest, ModeratelySlowEngineIsNotTimedOut) {
  auto sleep = [](int ms) {
    return nlohmann::json{{"rules", {{{"sleep_ms", ms}, {"action", "default"}}}}}.dump();
  };
  std::vector<Verdict> got;
  MatrixOptions opts;
  opts.policy = testing::ScaledPolicy();
  opts.jobs = 3;
  RunMatrix({Mock("a", sleep(300)), Mock("b", sleep(300)), Mock("c", sleep(450))},
            {{"c1", "var x;", {}}}, opts, [&](const Verdict& v) { got.push_back(v); });
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].outcome, Outcome::kPass);
}

TEST(ClassifierMatrixTest, AllFixturesMatch) {
  const auto rows =
      testing::RunClassifierMatrix("tests/fixtures/classifier/matrix.json", kMock);
  EXPECT_EQ(rows.size(), 30u);
  std::set<std::string> outcomes;
  for (const auto& row : rows) EXPECT_TRUE(row.ok) << row.name << ": " << row.detail;
  const auto root =
      nlohmann::json::parse(*ReadFile("tests/fixtures/classifier/matrix.json"));
  for (const auto& fx : root["cases"]) {
    outcomes.insert(fx["expect"]["outcome"].get<std::string>());
  }
  EXPECT_EQ(outcomes.size(), 7u);
}

}  // namespace
}  // namespace jsconform::harness
