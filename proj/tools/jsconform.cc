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

// jsconform: command-line front end. Each subcommand runs one pipeline
// stage over files; `campaign` runs them all.
//
// Exit codes: 0 success, 2 usage or config error, 3 failure while running.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "jsconform/campaign.h"
#include "jsconform/common.h"
#include "jsconform/datagen.h"
#include "jsconform/dedup.h"
#include "jsconform/harness.h"
#include "jsconform/progen.h"
#include "jsconform/reduce.h"
#include "jsconform/specdb.h"
#include "nlohmann/json.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace jsconform;

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kFailed = 3;

int Fail(int code, const absl::Status& s) {
  std::cerr << "jsconform: " << s.message() << "\n";
  return code;
}

std::vector<std::string> SplitArgv(const std::string& cmd) {
  return absl::StrSplit(cmd, absl::ByAnyChar(" \t"), absl::SkipEmpty());
}

absl::StatusOr<specdb::SpecDb> LoadDb(const std::string& path) {
  if (path.empty()) return specdb::BundledDb();
  auto text = ReadFile(path);
  if (!text.ok()) return text.status();
  return specdb::Deserialize(*text);
}

absl::StatusOr<json> ReadJsonFile(const fs::path& path) {
  auto text = ReadFile(path);
  if (!text.ok()) return text.status();
  json j = json::parse(*text, nullptr, false);
  if (j.is_discarded()) return absl::InvalidArgumentError(path.string() + ": not valid JSON");
  return j;
}

absl::StatusOr<std::vector<harness::Verdict>> ReadVerdictLog(const fs::path& path) {
  auto text = ReadFile(path);
  if (!text.ok()) return text.status();
  std::vector<harness::Verdict> out;
  int line = 0;
  for (absl::string_view l : absl::StrSplit(*text, '\n')) {
    ++line;
    if (l.empty()) continue;
    json j = json::parse(l, nullptr, false);
    auto v = harness::Verdict::FromLogRecord(j);
    if (!v.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat(path.string(), ":", line, ": ", v.status().message()));
    }
    out.push_back(*std::move(v));
  }
  return out;
}

// ---- extract ----

struct ExtractArgs {
  std::string spec, out, patterns;
  bool report = false;
};

int RunExtract(const ExtractArgs& a) {
  auto html = ReadFile(a.spec);
  if (!html.ok()) return Fail(kUsage, html.status());
  specdb::PatternTable table = specdb::PatternTable::Default();
  if (!a.patterns.empty()) {
    auto text = ReadFile(a.patterns);
    if (!text.ok()) return Fail(kUsage, text.status());
    auto t = specdb::PatternTable::FromJson(*text);
    if (!t.ok()) return Fail(kUsage, t.status());
    table = *std::move(t);
  }
  auto parsed = specdb::ParseSpecDocument(*html, table);
  if (!parsed.ok()) return Fail(kFailed, parsed.status());
  specdb::SpecDb db{parsed->apis};
  if (absl::Status s = WriteFileAtomic(a.out, specdb::Serialize(db)); !s.ok()) {
    return Fail(kFailed, s);
  }
  for (const std::string& w : parsed->warnings) std::cerr << "warning: " << w << "\n";
  if (a.report) {
    const specdb::CoverageReport c = specdb::Coverage(db);
    std::cout << "sections " << c.total_sections << "\nextracted " << c.extracted
              << "\ncoverage " << c.ratio << "\n";
  }
  return kOk;
}

// ---- generate ----

struct GenerateArgs {
  int count = 100;
  std::string out, external_cmd, syntax_cmd, specdb;
  uint64_t seed = 1;
  double keep_invalid = 0.2;
  int top_k = 10, max_words = 5000, jobs = 1;
};

int RunGenerate(const GenerateArgs& a) {
  progen::GenConfig g;
  g.rng_seed = a.seed;
  g.keep_invalid_fraction = a.keep_invalid;
  g.top_k = a.top_k;
  g.max_words = a.max_words;
  g.seed_header_corpus = progen::BundledSeedHeaders();
  if (absl::Status s = g.Validate(); !s.ok()) return Fail(kUsage, s);
  auto db = LoadDb(a.specdb);
  if (!db.ok()) return Fail(kUsage, db.status());

  std::vector<progen::TestProgram> batch;
  if (a.external_cmd.empty()) {
    batch = progen::GenerateBatch(g, *db, a.count, a.jobs);
  } else {
    auto gen = progen::ExternalGenerator::Start(SplitArgv(a.external_cmd));
    if (!gen.ok()) return Fail(kFailed, gen.status());
    for (int i = 0; i < a.count; ++i) {
      Rng rng(DeriveSeed(a.seed, i));
      auto header = progen::PickSeedHeader(g.seed_header_corpus, rng);
      if (!header.ok()) return Fail(kFailed, header.status());
      auto p = (*gen)->Generate(*header, g);
      if (!p.ok()) return Fail(kFailed, p.status());
      batch.push_back(*std::move(p));
    }
  }
  const auto checker = a.syntax_cmd.empty()
                           ? progen::BuiltinChecker()
                           : progen::ExternalChecker(SplitArgv(a.syntax_cmd),
                                                     std::chrono::seconds(10));
  Rng frng(DeriveSeed(a.seed, 0x66696c746572));
  const size_t generated = batch.size();
  auto fr = progen::SyntaxFilter(std::move(batch), checker, g, frng);
  json index = json::array();
  for (const auto* group : {&fr.kept_valid, &fr.kept_invalid}) {
    for (const auto& p : *group) {
      if (absl::Status s = WriteFileAtomic(fs::path(a.out) / (p.id + ".js"), p.source); !s.ok()) {
        return Fail(kFailed, s);
      }
      index.push_back({{"id", p.id},
                       {"validity", progen::ValidityName(p.validity)},
                       {"seed_header", p.seed_header}});
    }
  }
  for (const std::string& w : fr.warnings) std::cerr << "warning: " << w << "\n";
  if (absl::Status s = WriteFileAtomic(fs::path(a.out) / "index.json", index.dump(2) + "\n");
      !s.ok()) {
    return Fail(kFailed, s);
  }
  std::cout << "generated " << generated << " valid " << fr.kept_valid.size() << " invalid_kept "
            << fr.kept_invalid.size() << " dropped " << fr.dropped.size() << "\n";
  return kOk;
}

// ---- mutate ----

struct MutateArgs {
  std::string programs, specdb, out;
  uint64_t seed = 1;
  int random_per_site = 3;
};

int RunMutate(const MutateArgs& a) {
  auto db = LoadDb(a.specdb);
  if (!db.ok()) return Fail(kUsage, db.status());
  std::map<std::string, json> index;
  if (auto j = ReadJsonFile(fs::path(a.programs) / "index.json"); j.ok()) {
    for (const auto& e : *j) index[e["id"].get<std::string>()] = e;
  }
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(a.programs, ec)) {
    if (e.path().extension() == ".js") files.push_back(e.path());
  }
  if (ec) return Fail(kUsage, absl::NotFoundError(a.programs + ": " + ec.message()));
  std::sort(files.begin(), files.end());
  datagen::DatagenConfig cfg;
  cfg.random_cases_per_site = a.random_per_site;
  size_t cases = 0;
  std::set<std::string> seen;
  for (size_t i = 0; i < files.size(); ++i) {
    auto src = ReadFile(files[i]);
    if (!src.ok()) return Fail(kFailed, src.status());
    const std::string stem = files[i].stem().string();
    const json meta = index.count(stem) ? index[stem] : json::object();
    auto prog = progen::TestProgram::FromSource(*std::move(src),
                                                progen::TestProgram::Origin::kBuiltIn,
                                                meta.value("seed_header", ""));
    for (const auto& tc : datagen::GenerateTestCases(prog, *db, cfg, DeriveSeed(a.seed, i))) {
      if (!seen.insert(tc.id).second) continue;
      if (absl::Status s = harness::WriteCase(a.out, tc); !s.ok()) return Fail(kFailed, s);
      ++cases;
    }
  }
  std::cout << "programs " << files.size() << " cases " << cases << "\n";
  return kOk;
}

// ---- fuzz ----

struct FuzzArgs {
  std::string testbeds, cases, out;
  int64_t cap_ms = 10 * 60 * 1000;
  int64_t floor_ms = 250;
  int jobs = 0;
};

harness::MatrixOptions MatrixOf(int64_t cap_ms, int64_t floor_ms, int jobs) {
  harness::MatrixOptions o;
  o.policy.absolute_cap = std::chrono::milliseconds(cap_ms);
  o.policy.floor = std::chrono::milliseconds(floor_ms);
  o.jobs = jobs > 0 ? jobs : std::max(1u, std::thread::hardware_concurrency());
  return o;
}

int RunFuzz(const FuzzArgs& a) {
  auto testbeds = harness::LoadTestbeds(a.testbeds);
  if (!testbeds.ok()) return Fail(kUsage, testbeds.status());
  auto cases = harness::LoadCases(a.cases);
  if (!cases.ok()) return Fail(kUsage, cases.status());
  std::string log, durations;
  std::map<std::string, int> counts;
  auto summary = harness::RunMatrix(*testbeds, *cases, MatrixOf(a.cap_ms, a.floor_ms, a.jobs),
                                    [&](const harness::Verdict& v) {
                                      absl::StrAppend(&log, v.ToLogRecord().dump(), "\n");
                                      absl::StrAppend(&durations,
                                                      json{{"case", v.case_id},
                                                           {"durations", v.durations}}
                                                          .dump(),
                                                      "\n");
                                      ++counts[std::string(harness::OutcomeName(v.outcome))];
                                    });
  const fs::path out(a.out);
  for (auto [name, text] : {std::pair{"verdicts.jsonl", &log}, {"durations.jsonl", &durations}}) {
    if (absl::Status s = WriteFileAtomic(out / name, *text); !s.ok()) return Fail(kFailed, s);
  }
  std::cout << "cases " << summary.cases << " executions " << summary.executions
            << " skipped_by_edition " << summary.skipped_by_edition << "\n";
  for (const auto& [o, n] : counts) std::cout << o << " " << n << "\n";
  for (const std::string& e : summary.errors) std::cerr << "error: " << e << "\n";
  return summary.errors.empty() ? kOk : kFailed;
}

// ---- reduce ----

struct ReduceArgs {
  std::string case_file, testbeds, target, out;
  int budget = 2000;
  int64_t cap_ms = 10 * 60 * 1000;
  int jobs = 0;
};

// The target is a log record given inline, or a verdict log whose record
// for this case is used.
absl::StatusOr<harness::Verdict> TargetVerdict(const std::string& arg, const std::string& id) {
  json j = json::parse(arg, nullptr, false);
  if (j.is_object()) return harness::Verdict::FromLogRecord(j);
  auto log = ReadVerdictLog(arg);
  if (!log.ok()) return log.status();
  for (auto& v : *log) {
    if (v.case_id == id) return v;
  }
  return absl::NotFoundError(absl::StrCat(arg, ": no record for case ", id));
}

int RunReduce(const ReduceArgs& a) {
  const fs::path path(a.case_file);
  auto src = ReadFile(path);
  if (!src.ok()) return Fail(kUsage, src.status());
  json meta = json::object();
  const fs::path meta_path = path.parent_path() / (path.stem().string() + ".meta.json");
  if (fs::exists(meta_path)) {
    auto m = ReadJsonFile(meta_path);
    if (!m.ok()) return Fail(kUsage, m.status());
    meta = *std::move(m);
  }
  auto tc = datagen::CaseFromMeta(*std::move(src), meta);
  if (!tc.ok()) return Fail(kUsage, tc.status());
  const std::string id = path.stem().string();
  auto target = TargetVerdict(a.target, id);
  if (!target.ok()) return Fail(kUsage, target.status());
  auto testbeds = harness::LoadTestbeds(a.testbeds);
  if (!testbeds.ok()) return Fail(kUsage, testbeds.status());
  reduce::ReduceOptions opts;
  opts.budget = a.budget;
  auto r = reduce::Reduce(*tc, reduce::HarnessOracle(*target, *testbeds, MatrixOf(a.cap_ms, 250, a.jobs)),
                          opts);
  if (!r.ok()) return Fail(kFailed, r.status());
  const fs::path out = (a.out.empty() ? path.parent_path() : fs::path(a.out)) / (id + ".min.js");
  if (absl::Status s = WriteFileAtomic(out, r->tc.source()); !s.ok()) return Fail(kFailed, s);
  std::cout << out.string() << "\noracle_calls " << r->stats.oracle_calls << " removals "
            << r->stats.removals << (r->stats.budget_exhausted ? " budget_exhausted" : "") << "\n";
  return kOk;
}

// ---- report ----

struct ReportArgs {
  std::string kb, verdicts, out, cases, specdb;
};

int RunReport(const ReportArgs& a) {
  auto kb = dedup::KnowledgeBase::Load(a.kb);
  if (!kb.ok()) return Fail(kUsage, kb.status());
  auto verdicts = ReadVerdictLog(a.verdicts);
  if (!verdicts.ok()) return Fail(kUsage, verdicts.status());
  auto db = LoadDb(a.specdb);
  if (!db.ok()) return Fail(kUsage, db.status());
  const fs::path cases = a.cases.empty() ? fs::path(a.verdicts).parent_path() : fs::path(a.cases);
  auto meta_of = [&](const std::string& id) -> json {
    auto m = ReadJsonFile(cases / (id + ".meta.json"));
    return m.ok() ? *m : json::object();
  };
  const dedup::ApiLookup api_of = [&](const std::string& id) -> std::optional<std::string> {
    const json m = meta_of(id);
    if (m.contains("api") && m["api"].is_string()) return m["api"].get<std::string>();
    return std::nullopt;
  };
  auto r = dedup::FilterStream(*kb, *verdicts, api_of);
  if (absl::Status s = kb->Save(a.kb); !s.ok()) return Fail(kFailed, s);
  for (const auto& v : r.novel) {
    dedup::ReportInput in;
    in.verdict = v;
    in.signatures = r.signatures[v.case_id];
    const fs::path min = cases / (v.case_id + ".min.js");
    in.minimized = fs::exists(min);
    auto src = ReadFile(in.minimized ? min : cases / (v.case_id + ".js"));
    if (src.ok()) in.source = *std::move(src);
    if (auto api = api_of(v.case_id)) {
      if (const auto* spec = db->Find(*api)) in.spec_section = spec->source_section;
    }
    const fs::path out = fs::path(a.out) / (v.case_id + ".md");
    if (absl::Status s = WriteFileAtomic(out, dedup::RenderReport(in)); !s.ok()) {
      return Fail(kFailed, s);
    }
  }
  std::cout << "novel " << r.novel.size() << " suppressed " << r.suppressed << " unsigned "
            << r.unsigned_verdicts << "\n";
  return kOk;
}

// ---- campaign ----

struct CampaignArgs {
  std::string config, stop_after;
  bool dry_run = false;
};

int RunCampaignCmd(const CampaignArgs& a) {
  auto cfg = campaign::LoadConfig(a.config);
  if (!cfg.ok()) return Fail(kUsage, cfg.status());
  if (a.dry_run) {
    if (absl::Status s = campaign::Validate(*cfg); !s.ok()) return Fail(kUsage, s);
    std::cout << cfg->ToJson().dump(2) << "\n";
    return kOk;
  }
  campaign::RunOptions opts;
  if (!a.stop_after.empty()) opts.stop_after = a.stop_after;
  const campaign::RunResult r = campaign::RunCampaign(*cfg, opts);
  std::cout << r.report.Summary().dump(2) << "\n";
  for (const std::string& e : r.report.errors) std::cerr << "error: " << e << "\n";
  return static_cast<int>(r.exit);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differential conformance fuzzing for JavaScript engines"};
  app.require_subcommand(1);

  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "Build a rule database from a spec document");
  extract->add_option("--spec", ex.spec, "Spec HTML file")->required();
  extract->add_option("--out", ex.out, "Output database (JSON)")->required();
  extract->add_option("--patterns", ex.patterns, "Pattern table replacing the bundled one");
  extract->add_flag("--report", ex.report, "Print extraction coverage");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate and syntax-filter test programs");
  generate->add_option("--count", gen.count, "Programs to generate")->check(CLI::NonNegativeNumber);
  generate->add_option("--out", gen.out, "Output directory")->required();
  generate->add_option("--external-cmd", gen.external_cmd, "External generator command line");
  generate->add_option("--seed", gen.seed);
  generate->add_option("--keep-invalid", gen.keep_invalid, "Fraction of invalid programs kept")
      ->check(CLI::Range(0.0, 1.0));
  generate->add_option("--syntax-checker", gen.syntax_cmd, "External syntax checker command");
  generate->add_option("--specdb", gen.specdb, "Rule database (bundled if omitted)");
  generate->add_option("--top-k", gen.top_k);
  generate->add_option("--max-words", gen.max_words);
  generate->add_option("--jobs", gen.jobs)->check(CLI::PositiveNumber);

  MutateArgs mu;
  auto* mutate = app.add_subcommand("mutate", "Derive test cases from programs");
  mutate->add_option("--programs", mu.programs, "Program directory")->required();
  mutate->add_option("--specdb", mu.specdb, "Rule database (bundled if omitted)");
  mutate->add_option("--out", mu.out, "Case directory")->required();
  mutate->add_option("--seed", mu.seed);
  mutate->add_option("--random-per-site", mu.random_per_site)->check(CLI::NonNegativeNumber);

  FuzzArgs fz;
  auto* fuzz = app.add_subcommand("fuzz", "Run cases on every testbed and classify");
  fuzz->add_option("--testbeds", fz.testbeds, "Testbed config")->required();
  fuzz->add_option("--cases", fz.cases, "Case directory")->required();
  fuzz->add_option("--out", fz.out, "Output directory for the verdict log")->required();
  fuzz->add_option("--cap-ms", fz.cap_ms, "Per-execution time cap")->check(CLI::PositiveNumber);
  fuzz->add_option("--floor-ms", fz.floor_ms, "Slow-engine threshold floor");
  fuzz->add_option("--jobs", fz.jobs);

  ReduceArgs rd;
  auto* reducecmd = app.add_subcommand("reduce", "Minimize a case while keeping its verdict");
  reducecmd->add_option("--case", rd.case_file, "Case file (<id>.js)")->required();
  reducecmd->add_option("--testbeds", rd.testbeds, "Testbed config")->required();
  reducecmd->add_option("--target-verdict", rd.target,
                        "Verdict log record (inline JSON) or a verdict log")
      ->required();
  reducecmd->add_option("--budget", rd.budget, "Oracle call budget")->check(CLI::PositiveNumber);
  reducecmd->add_option("--out", rd.out, "Directory for <id>.min.js (default: beside the case)");
  reducecmd->add_option("--cap-ms", rd.cap_ms)->check(CLI::PositiveNumber);
  reducecmd->add_option("--jobs", rd.jobs);

  ReportArgs rp;
  auto* report = app.add_subcommand("report", "Deduplicate verdicts and write bug reports");
  report->add_option("--kb", rp.kb, "Knowledge base (created if missing)")->required();
  report->add_option("--verdicts", rp.verdicts, "Verdict log")->required();
  report->add_option("--out", rp.out, "Report directory")->required();
  report->add_option("--cases", rp.cases, "Case directory (default: the log's directory)");
  report->add_option("--specdb", rp.specdb, "Rule database (bundled if omitted)");

  CampaignArgs cp;
  auto* camp = app.add_subcommand("campaign", "Run or resume a full campaign");
  camp->add_option("--config", cp.config, "Campaign config")->required();
  camp->add_flag("--dry-run", cp.dry_run, "Validate the config and exit");
  camp->add_option("--stop-after", cp.stop_after, "Stop after the named phase")
      ->check(CLI::IsMember({"generate", "mutate", "execute", "dedup", "reduce"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  if (extract->parsed()) return RunExtract(ex);
  if (generate->parsed()) return RunGenerate(gen);
  if (mutate->parsed()) return RunMutate(mu);
  if (fuzz->parsed()) return RunFuzz(fz);
  if (reducecmd->parsed()) return RunReduce(rd);
  if (report->parsed()) return RunReport(rp);
  if (camp->parsed()) return RunCampaignCmd(cp);
  return kUsage;
}
