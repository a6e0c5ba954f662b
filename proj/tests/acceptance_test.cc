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

// Acceptance run: one PASS/FAIL/SKIP line per top-level requirement, exit
// status 1 if any line fails. Runs from the source directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "helpers/campaign_fixture.h"
#include "helpers/classifier_matrix.h"
#include "jsconform/campaign.h"
#include "jsconform/common.h"
#include "jsconform/datagen.h"
#include "jsconform/dedup.h"
#include "jsconform/harness.h"
#include "jsconform/js/ast.h"
#include "jsconform/process.h"
#include "jsconform/progen.h"
#include "jsconform/reduce.h"
#include "jsconform/specdb.h"

namespace jsconform {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

const char kMock[] = JSCONFORM_MOCK_ENGINE;

struct Result {
  enum class State { kPass, kFail, kSkip } state = State::kFail;
  std::string detail;
};

Result Pass(std::string d) { return {Result::State::kPass, std::move(d)}; }
Result Fail(std::string d) { return {Result::State::kFail, std::move(d)}; }
Result Skip(std::string d) { return {Result::State::kSkip, std::move(d)}; }

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string MustRead(const fs::path& p) {
  auto t = ReadFile(p);
  return t.ok() ? *t : "";
}

// ---- spec db ----

Result SpecGolden() {
  const auto start = Clock::now();
  const std::string html = MustRead("tests/fixtures/specs/substr.html");
  auto a = specdb::ParseSpecDocument(html);
  auto b = specdb::ParseSpecDocument(html);
  if (!a.ok() || !b.ok()) return Fail("parse failed");
  const std::string first = specdb::Serialize(specdb::SpecDb{a->apis});
  const std::string second = specdb::Serialize(specdb::SpecDb{b->apis});
  const double secs = Seconds(start);
  if (first != second) return Fail("serialization differs between runs");
  if (first != MustRead("tests/fixtures/specs/substr.golden.json")) return Fail("golden mismatch");
  if (a->apis.size() != 1) return Fail("expected one API");
  const specdb::ApiSpec& api = a->apis[0];
  if (api.name != "String.prototype.substr" || api.parameters.size() != 2) {
    return Fail("wrong name or arity");
  }
  const specdb::ParamSpec& len = api.parameters[1];
  const bool undef = std::any_of(len.boundaries.begin(), len.boundaries.end(), [](const auto& c) {
    return c.predicate == specdb::Predicate::kIsUndefined && c.target == "length";
  });
  if (len.name != "length" || !len.optional || !undef) {
    return Fail("length must be optional with an IsUndefined boundary");
  }
  if (secs >= 1.0) return Fail(absl::StrCat("took ", secs, " s"));
  return Pass(absl::StrCat("substr: 2 params, length optional + IsUndefined; byte-stable; ",
                           absl::StrFormat("%.3f", secs), " s"));
}

Result Coverage() {
  auto parsed = specdb::ParseSpecDocument(MustRead("tests/fixtures/specs/corpus50.html"));
  if (!parsed.ok()) return Fail(std::string(parsed.status().message()));
  const specdb::CoverageReport r = specdb::Coverage(specdb::SpecDb{parsed->apis});
  // Hand count: 50 API sections, 41 with algorithm steps, 9 prose only.
  const bool ok = r.total_sections == 50 && r.extracted == 41 && r.ratio == 41.0 / 50.0;
  const std::string d = absl::StrCat(r.extracted, "/", r.total_sections, " = ", r.ratio,
                                     " (hand count 41/50)");
  return ok ? Pass(d) : Fail(d);
}

// ---- generator ----

Result GeneratorValidity() {
  const auto start = Clock::now();
  progen::GenConfig cfg;
  cfg.rng_seed = 2024;
  cfg.seed_header_corpus = progen::BundledSeedHeaders();
  const int jobs = std::max(1u, std::thread::hardware_concurrency());
  auto batch = progen::GenerateBatch(cfg, specdb::BundledDb(), 10000, jobs);
  if (batch.size() != 10000) return Fail(absl::StrCat("generated ", batch.size()));
  Rng rng(DeriveSeed(cfg.rng_seed, 1));
  auto fr = progen::SyntaxFilter(std::move(batch), progen::BuiltinChecker(), cfg, rng);
  const double secs = Seconds(start);
  const size_t valid = fr.kept_valid.size();
  const size_t invalid = fr.kept_invalid.size() + fr.dropped.size();
  const double p = cfg.keep_invalid_fraction;
  const double expect = p * invalid;
  const double sigma = std::sqrt(invalid * p * (1 - p));
  const double dev = std::abs(fr.kept_invalid.size() - expect);
  const std::string d = absl::StrFormat(
      "valid %zu/10000 (%.2f%%); invalid kept %zu/%zu (%.3f, %.1f sigma from 0.2); %.1f s", valid,
      valid / 100.0, fr.kept_invalid.size(), invalid,
      invalid ? double(fr.kept_invalid.size()) / invalid : 0.0, sigma > 0 ? dev / sigma : 0.0,
      secs);
  if (valid < 9500) return Fail(d);
  if (invalid == 0 || dev > 5 * sigma) return Fail(d);
  if (secs >= 300) return Fail(d);
  return Pass(d);
}

// ---- test data ----

progen::TestProgram ProgramFixture(const std::string& name) {
  return progen::TestProgram::FromSource(MustRead("tests/fixtures/programs/" + name),
                                         progen::TestProgram::Origin::kExternal, "");
}

std::vector<datagen::TestCase> CasesFor(const progen::TestProgram& prog, const std::string& api) {
  const auto& db = specdb::BundledDb();
  for (const auto& site : datagen::FindApiCalls(prog, db)) {
    if (site.api_name != api) continue;
    Rng rng(7);
    auto cases = datagen::MutateTestData(prog, site, *db.Find(api), db, {}, rng);
    if (cases.ok()) return *cases;
  }
  return {};
}

// The first reference engine found: node, else the QuickJS wrapper.
std::optional<std::vector<std::string>> ReferenceEngine() {
  if (fs::exists("/usr/bin/node")) return std::vector<std::string>{"/usr/bin/node"};
  ProcessSpec probe;
  probe.argv = {"python3", "-c", "import quickjs"};
  auto r = RunProcess(probe);
  if (r.ok() && r->exit_code == 0) {
    return std::vector<std::string>{"python3", "tools/engines/pyengine.py", "--engine",
                                    "quickjs"};
  }
  return std::nullopt;
}

absl::StatusOr<std::string> RunOn(std::vector<std::string> argv, const std::string& source) {
  auto dir = ScopedTempDir::Create("acceptance");
  if (!dir.ok()) return dir.status();
  const fs::path path = dir->path() / "case.js";
  if (auto s = WriteFile(path, source); !s.ok()) return s;
  ProcessSpec spec;
  argv.push_back(path.string());
  spec.argv = argv;
  spec.inherit_env = true;
  auto r = RunProcess(spec);
  if (!r.ok()) return r.status();
  return r->stdout_text;
}

Result DataOracle() {
  std::set<std::string> got;
  for (const auto& tc : CasesFor(ProgramFixture("tofixed.js"), "Number.prototype.toFixed")) {
    if (tc.origin.kind == datagen::MutationOrigin::Kind::kBoundary &&
        tc.origin.param == "fractionDigits") {
      got.insert(tc.origin.detail);
    }
  }
  for (const char* want : {"-1", "0", "20", "21", "undefined"}) {
    if (!got.count(want)) return Fail(absl::StrCat("toFixed boundary set lacks ", want));
  }
  const datagen::TestCase* undef = nullptr;
  const auto cases = CasesFor(ProgramFixture("fig3.js"), "String.prototype.substr");
  for (const auto& tc : cases) {
    if (tc.origin.kind == datagen::MutationOrigin::Kind::kBoundary &&
        tc.origin.param == "length" && tc.origin.detail == "undefined") {
      undef = &tc;
    }
  }
  if (undef == nullptr) return Fail("no substr case with length = undefined");
  auto engine = ReferenceEngine();
  if (!engine) return Fail("no reference engine to run the substr case on");
  auto out = RunOn(*engine, undef->source());
  if (!out.ok()) return Fail(std::string(out.status().message()));
  if (*out != "Albert\n") return Fail(absl::StrCat("substr case printed '", *out, "'"));
  return Pass(absl::StrCat("toFixed {", absl::StrJoin(got, ","), "}; substr(start, undefined) on ",
                           fs::path((*engine)[engine->size() > 1 ? 1 : 0]).filename().string(),
                           " prints Albert"));
}

// ---- classifier ----

Result ClassifierMatrix() {
  const std::string fixture = "tests/fixtures/classifier/matrix.json";
  const auto rows = testing::RunClassifierMatrix(fixture, kMock);
  std::vector<std::string> failed;
  bool three_times = false;
  for (const auto& r : rows) {
    if (!r.ok) failed.push_back(absl::StrCat(r.name, ": ", r.detail));
    if (r.name == "timeout_three_times_slower" && r.ok) three_times = true;
  }
  std::set<std::string> outcomes;
  const json root = json::parse(MustRead(fixture));
  for (const auto& fx : root["cases"]) {
    outcomes.insert(fx["expect"]["outcome"].get<std::string>());
  }
  const std::string d = absl::StrCat(rows.size() - failed.size(), "/", rows.size(),
                                     " fixtures; outcomes covered ", outcomes.size(),
                                     "/7; 3x sleeper ", three_times ? "timed out" : "missed",
                                     "; cap 2 s");
  if (rows.size() != 30 || !failed.empty() || outcomes.size() != 7 || !three_times) {
    return Fail(absl::StrCat(d, failed.empty() ? "" : "; ", absl::StrJoin(failed, "; ")));
  }
  return Pass(d);
}

// ---- reducer ----

size_t BodyStatements(const std::string& source) {
  auto ast = js::Parse(source);
  if (!ast.ok()) return 0;
  for (const js::Node* st : js::Statements(ast->root())) {
    if (st->kind == js::NodeKind::kFunctionDecl) return js::Statements(*st->child(1)).size();
  }
  return 0;
}

Result Reducer() {
  auto prog = progen::TestProgram::FromSource(MustRead("tests/fixtures/reduce/injected.js"),
                                              progen::TestProgram::Origin::kExternal, "");
  auto tc = datagen::SynthesizeDriver(prog, datagen::AsGeneratedBindings(prog, specdb::BundledDb()));
  if (!tc.ok()) return Fail(std::string(tc.status().message()));
  if (BodyStatements(tc->program.source) != 50) return Fail("fixture is not 50 statements");
  auto testbeds = testing::MockTestbeds(json::parse(R"json([
    {"id": "a", "rules": []},
    {"id": "b", "rules": []},
    {"id": "c", "rules": [{"if_contains": ["var radix = 36;", ".toString(radix)"],
                           "action": "print", "text": "WRONG"}]}])json"),
                                        kMock);
  if (!testbeds.ok()) return Fail(std::string(testbeds.status().message()));
  harness::MatrixOptions opts;
  opts.policy = testing::ScaledPolicy();
  opts.jobs = 3;
  std::optional<harness::Verdict> target;
  harness::RunMatrix(*testbeds, {harness::FromTestCase(*tc)}, opts,
                     [&](const harness::Verdict& v) { target = v; });
  if (!target || target->outcome != harness::Outcome::kWrongOutput) {
    return Fail("fixture does not produce WrongOutput");
  }
  const auto oracle = reduce::HarnessOracle(*target, *testbeds, opts);
  const auto start = Clock::now();
  auto r = reduce::Reduce(*tc, oracle);
  const double secs = Seconds(start);
  if (!r.ok()) return Fail(std::string(r.status().message()));
  const std::string& out = r->tc.program.source;
  const size_t n = BodyStatements(out);
  const bool core = absl::StrContains(out, "var radix = 36;") &&
                    absl::StrContains(out, ".toString(radix)");
  auto holds = oracle(r->tc);
  bool minimal = true;
  for (const std::string& step : reduce::SingleSteps(r->tc)) {
    datagen::TestCase smaller = r->tc;
    smaller.program.source = step;
    auto h = oracle(smaller);
    if (!h.ok() || *h) minimal = false;
  }
  auto again = reduce::Reduce(r->tc, oracle);
  const bool idempotent = again.ok() && again->tc.program.source == out;
  const std::string d = absl::StrFormat(
      "50 -> %zu statements, core %s, verdict %s, 1-minimal %s, %d oracle calls, %.1f s, "
      "idempotent %s",
      n, core ? "kept" : "lost", holds.ok() && *holds ? "preserved" : "lost",
      minimal ? "yes" : "no", r->stats.oracle_calls, secs, idempotent ? "yes" : "no");
  const bool ok = n <= 3 && core && holds.ok() && *holds && minimal &&
                  r->stats.oracle_calls <= 2000 && secs < 60 && idempotent;
  return ok ? Pass(d) : Fail(d);
}

// ---- dedup ----

Result Dedup() {
  // Twelve signatures: {crash, timeout, TypeError, wrong value} x three engines.
  const std::vector<std::string> engines = {"v8", "sm", "jsc"};
  std::vector<harness::Verdict> stream;
  Rng rng(99);
  for (int i = 0; i < 1000; ++i) {
    const int k = i < 12 ? i : static_cast<int>(rng.Uniform(12));
    const std::string tb = absl::StrCat(engines[k % 3], "@1/normal");
    harness::Verdict v;
    v.case_id = absl::StrCat("case", i);
    v.deviants = {tb};
    switch (k / 3) {
      case 0: v.outcome = harness::Outcome::kRuntimeCrash; break;
      case 1: v.outcome = harness::Outcome::kRuntimeTimeout; break;
      case 2:
        v.outcome = harness::Outcome::kWrongOutput;
        v.deviant_outputs[tb] = "EXC TypeError\n";
        v.majority_output = absl::StrCat(i, "\n");
        break;
      default:
        v.outcome = harness::Outcome::kWrongOutput;
        v.deviant_outputs[tb] = absl::StrCat(i, "\n");
        v.majority_output = absl::StrCat(i + 1, "\n");
    }
    stream.push_back(std::move(v));
  }
  const dedup::ApiLookup api = [](const std::string&) {
    return std::optional<std::string>("String.prototype.substr");
  };
  dedup::KnowledgeBase kb;
  auto first = dedup::FilterStream(kb, stream, api);
  auto dir = ScopedTempDir::Create("acceptance_kb");
  if (!dir.ok()) return Fail("temp dir");
  const fs::path path = dir->path() / "kb.json";
  if (!kb.Save(path).ok()) return Fail("save failed");
  auto loaded = dedup::KnowledgeBase::Load(path);
  if (!loaded.ok()) return Fail("load failed");
  auto replay = dedup::FilterStream(*loaded, stream, api);
  const std::string d = absl::StrCat("first pass ", first.novel.size(), " novel / ",
                                     first.suppressed, " suppressed; replay after reload ",
                                     replay.novel.size(), " novel / ", replay.suppressed,
                                     " suppressed");
  const bool ok = first.novel.size() == 12 && first.suppressed == 988 && replay.novel.empty() &&
                  replay.suppressed == 1000;
  return ok ? Pass(d) : Fail(d);
}

// ---- campaign ----

std::map<std::string, std::string> ReproducibleArtifacts(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    const std::string rel = fs::relative(e.path(), root).generic_string();
    if (!e.is_regular_file()) continue;
    if (rel == "verdicts/verdicts.jsonl" || absl::StartsWith(rel, "reports/")) {
      out[rel] = MustRead(e.path());
    }
  }
  return out;
}

Result Determinism() {
  auto dir = ScopedTempDir::Create("acceptance_campaign");
  if (!dir.ok()) return Fail("temp dir");
  if (!WriteFile(dir->path() / "testbeds.json", testing::MockCampaignEngines(kMock).dump()).ok()) {
    return Fail("write testbeds");
  }
  std::map<std::string, std::string> runs[2];
  campaign::CampaignReport report;
  for (int i = 0; i < 2; ++i) {
    const std::string root = absl::StrCat("run", i);
    auto cfg = campaign::ParseConfig(testing::MockCampaignConfig(root), dir->path());
    if (!cfg.ok()) return Fail(std::string(cfg.status().message()));
    auto r = campaign::RunCampaign(*cfg);
    if (r.exit != campaign::ExitCode::kOk) {
      return Fail(absl::StrCat("run ", i, ": ", absl::StrJoin(r.report.errors, "; ")));
    }
    report = r.report;
    runs[i] = ReproducibleArtifacts(dir->path() / root);
  }
  if (runs[0].empty() || !runs[0].count("verdicts/verdicts.jsonl")) return Fail("no artifacts");
  if (runs[0] != runs[1]) {
    std::vector<std::string> diff;
    for (const auto& [k, v] : runs[0]) {
      if (!runs[1].count(k) || runs[1][k] != v) diff.push_back(k);
    }
    return Fail(absl::StrCat("differs: ", absl::StrJoin(diff, ", ")));
  }
  return Pass(absl::StrCat(report.cases, " cases, ", report.novel, " novel; verdict log and ",
                           runs[0].size() - 1, " report files byte-identical across two runs"));
}

// ---- live smoke ----

bool PythonHas(const std::string& module) {
  ProcessSpec probe;
  probe.argv = {"python3", "-c", "import " + module};
  probe.inherit_env = true;
  auto r = RunProcess(probe);
  return r.ok() && r->termination == ProcessResult::Termination::kExited && r->exit_code == 0;
}

Result LiveSmoke() {
  const json all = json::parse(MustRead("tools/engines/testbeds.json"));
  json present = json::array();
  std::set<std::string> families;
  for (json tb : all["testbeds"]) {
    const std::string id = tb["engine_id"].get<std::string>();
    bool ok = false;
    if (id == "node") {
      ok = fs::exists("/usr/bin/node");
      tb["binary"] = "/usr/bin/node";
    } else {
      ok = PythonHas(id);
      tb["binary"] = fs::absolute("tools/engines/pyengine.py").string();
    }
    if (!ok) continue;
    // dukpy 0.6 embeds QuickJS, so it does not count as a second engine.
    families.insert(id == "node" ? "v8" : "quickjs");
    present.push_back(tb);
  }
  if (families.size() < 2) {
    return Skip(absl::StrCat("needs two real engines, found ", families.size()));
  }
  auto dir = ScopedTempDir::Create("acceptance_live");
  if (!dir.ok()) return Fail("temp dir");
  if (!WriteFile(dir->path() / "testbeds.json", json{{"testbeds", present}}.dump()).ok()) {
    return Fail("write testbeds");
  }
  const json config = {{"output_root", "live"},
                       {"testbeds", "testbeds.json"},
                       {"seed", 11},
                       {"generator", {{"programs", 20}}},
                       {"datagen", {{"max_cases", 100}}},
                       {"harness", {{"cap_ms", 20000}}},
                       {"reduce", {{"enabled", false}}}};
  auto cfg = campaign::ParseConfig(config, dir->path());
  if (!cfg.ok()) return Fail(std::string(cfg.status().message()));
  const auto start = Clock::now();
  auto r = campaign::RunCampaign(*cfg);
  const double secs = Seconds(start);
  const fs::path root = dir->path() / "live";
  auto matrix = ReadFile(root / "verdicts" / "matrix.json");
  if (!matrix.ok()) return Fail(absl::StrCat("no matrix summary: ", absl::StrJoin(r.report.errors, "; ")));
  const json m = json::parse(*matrix);
  size_t well_formed = 0;
  for (const auto& e : fs::directory_iterator(root / "reports")) {
    if (e.path().extension() != ".md" || e.path().stem() == "summary") continue;
    const std::string md = MustRead(e.path());
    if (absl::StartsWith(md, "# ") && absl::StrContains(md, "```")) ++well_formed;
  }
  std::vector<std::string> names;
  for (const auto& tb : present) names.push_back(tb["engine_id"].get<std::string>());
  const std::string d = absl::StrFormat(
      "%s: %zu cases, %zu executions, %zu harness errors, %zu/%zu reports well-formed, %.0f s",
      absl::StrJoin(names, "+"), r.report.cases, r.report.executed, m["errors"].size(),
      well_formed, r.report.novel, secs);
  const bool ok = r.exit == campaign::ExitCode::kOk && r.report.cases == 100 &&
                  m["errors"].empty() && well_formed == r.report.novel;
  return ok ? Pass(d) : Fail(absl::StrCat(d, "; ", absl::StrJoin(r.report.errors, "; ")));
}

}  // namespace
}  // namespace jsconform

int main() {
  using jsconform::Result;
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria = {
      {"spec-extraction-golden", jsconform::SpecGolden},
      {"extraction-coverage", jsconform::Coverage},
      {"generator-validity", jsconform::GeneratorValidity},
      {"boundary-data-oracle", jsconform::DataOracle},
      {"classifier-matrix", jsconform::ClassifierMatrix},
      {"reducer", jsconform::Reducer},
      {"dedup", jsconform::Dedup},
      {"end-to-end-determinism", jsconform::Determinism},
      {"live-smoke", jsconform::LiveSmoke},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Result r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r = jsconform::Fail(std::string("exception: ") + e.what());
    }
    const char* tag = r.state == Result::State::kPass   ? "PASS"
                      : r.state == Result::State::kSkip ? "SKIP"
                                                        : "FAIL";
    failed += r.state == Result::State::kFail;
    std::printf("%s %s: %s\n", tag, name, r.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
