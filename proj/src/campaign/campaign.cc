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

#include "jsconform/campaign.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>
#include <thread>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "jsconform/common.h"
#include "jsconform/datagen.h"
#include "jsconform/dedup.h"
#include "jsconform/progen.h"
#include "jsconform/reduce.h"
#include "jsconform/specdb.h"

namespace jsconform::campaign {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kPhases[] = {"generate", "mutate", "execute", "dedup", "reduce",
                                   "report"};
constexpr uint64_t kFilterStream = 0x66696c746572;  // "filter"
constexpr uint64_t kMutateStream = 0x6d7574617465;  // "mutate"

absl::Status ConfigError(absl::string_view path, absl::string_view what) {
  return absl::InvalidArgumentError(absl::StrCat("campaign config: ", path, ": ", what));
}

absl::StatusOr<json> ReadJson(const fs::path& path) {
  auto text = ReadFile(path);
  if (!text.ok()) return text.status();
  json j = json::parse(*text, nullptr, false);
  if (j.is_discarded()) {
    return absl::DataLossError(absl::StrCat(path.string(), ": not valid JSON"));
  }
  return j;
}

absl::Status WriteJson(const fs::path& path, const json& j) {
  return WriteFileAtomic(path, j.dump(2) + "\n");
}

// Reads the known keys of one config section, rejecting unknown ones.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  absl::Status Check(std::initializer_list<const char*> known) const {
    if (!j_.is_object()) return ConfigError(path_, "expected an object");
    for (const auto& [k, _] : j_.items()) {
      if (std::find_if(known.begin(), known.end(),
                       [&](const char* n) { return k == n; }) == known.end()) {
        return ConfigError(absl::StrCat(path_, "/", k), "unknown field");
      }
    }
    return absl::OkStatus();
  }
  bool Has(const char* key) const { return j_.contains(key); }
  const json& At(const char* key) const { return j_.at(key); }
  std::string Path(const char* key) const { return absl::StrCat(path_, "/", key); }

  template <typename T>
  absl::Status Get(const char* key, T& out) const {
    if (!j_.contains(key)) return absl::OkStatus();
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      return ConfigError(Path(key), "wrong type");
    }
    return absl::OkStatus();
  }

 private:
  const json& j_;
  std::string path_;
};

#define RETURN_IF_ERROR(expr)                 \
  do {                                        \
    if (absl::Status _s = (expr); !_s.ok()) { \
      return _s;                              \
    }                                         \
  } while (0)

fs::path Resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_relative() ? (base / path).lexically_normal() : path;
}

struct Context {
  const CampaignConfig& cfg;
  CampaignReport& report;
  const specdb::SpecDb* db = nullptr;
  specdb::SpecDb owned_db;
  std::vector<harness::Testbed> testbeds;
  int jobs = 1;

  fs::path root() const { return cfg.output_root; }
  fs::path dir(absl::string_view name) const { return cfg.output_root / std::string(name); }
  harness::MatrixOptions matrix() const {
    harness::MatrixOptions o;
    o.policy.absolute_cap = cfg.cap;
    o.policy.floor = cfg.timeout_floor;
    o.jobs = jobs;
    return o;
  }
};

absl::Status LoadInputs(Context& ctx) {
  if (ctx.cfg.specdb) {
    auto text = ReadFile(*ctx.cfg.specdb);
    if (!text.ok()) return text.status();
    auto db = specdb::Deserialize(*text);
    if (!db.ok()) return db.status();
    ctx.owned_db = *std::move(db);
    ctx.db = &ctx.owned_db;
  } else {
    ctx.db = &specdb::BundledDb();
  }
  auto tbs = harness::LoadTestbeds(ctx.cfg.testbeds);
  if (!tbs.ok()) return tbs.status();
  if (tbs->size() < 2) {
    return absl::InvalidArgumentError(absl::StrCat(
        "differential testing needs at least two testbeds; ", ctx.cfg.testbeds.string(),
        " defines ", tbs->size()));
  }
  ctx.testbeds = *std::move(tbs);
  return absl::OkStatus();
}

progen::GenConfig GenConfigOf(const CampaignConfig& cfg) {
  progen::GenConfig g;
  g.top_k = cfg.top_k;
  g.max_words = cfg.max_words;
  g.keep_invalid_fraction = cfg.keep_invalid;
  g.noise = cfg.noise;
  g.rng_seed = cfg.seed;
  g.seed_header_corpus = progen::BundledSeedHeaders();
  return g;
}

// ---- generate ----

absl::Status Generate(Context& ctx) {
  const CampaignConfig& cfg = ctx.cfg;
  const progen::GenConfig g = GenConfigOf(cfg);
  std::vector<progen::TestProgram> batch;
  std::vector<std::string> warnings;
  if (cfg.external_generator.empty()) {
    batch = progen::GenerateBatch(g, *ctx.db, cfg.programs, ctx.jobs);
  } else {
    auto gen = progen::ExternalGenerator::Start(cfg.external_generator);
    if (!gen.ok()) return gen.status();
    for (int i = 0; i < cfg.programs; ++i) {
      Rng rng(DeriveSeed(cfg.seed, i));
      auto header = progen::PickSeedHeader(g.seed_header_corpus, rng);
      if (!header.ok()) return header.status();
      auto prog = (*gen)->Generate(*header, g);
      if (!prog.ok()) {
        warnings.push_back(absl::StrCat("generate ", i, ": ", prog.status().message()));
        continue;
      }
      batch.push_back(*std::move(prog));
    }
  }
  const size_t generated = batch.size();
  const progen::SyntaxChecker checker =
      cfg.syntax_checker.empty()
          ? progen::BuiltinChecker()
          : progen::ExternalChecker(cfg.syntax_checker, std::chrono::seconds(10));
  Rng frng(DeriveSeed(cfg.seed, kFilterStream));
  std::vector<std::string> order;
  for (const auto& p : batch) order.push_back(p.id);
  progen::FilterResult fr = progen::SyntaxFilter(std::move(batch), checker, g, frng);

  std::map<std::string, const progen::TestProgram*> kept;
  for (const auto* group : {&fr.kept_valid, &fr.kept_invalid}) {
    for (const auto& p : *group) kept.emplace(p.id, &p);
  }
  const fs::path dir = ctx.dir("programs");
  json list = json::array();
  std::set<std::string> written;
  for (const std::string& id : order) {
    auto it = kept.find(id);
    if (it == kept.end() || !written.insert(id).second) continue;
    const progen::TestProgram& p = *it->second;
    RETURN_IF_ERROR(WriteFileAtomic(dir / (id + ".js"), p.source));
    list.push_back({{"id", id},
                    {"validity", progen::ValidityName(p.validity)},
                    {"seed_header", p.seed_header},
                    {"origin", p.origin == progen::TestProgram::Origin::kBuiltIn ? "builtin"
                                                                                 : "external"},
                    {"command_id", p.command_id}});
  }
  for (const std::string& w : fr.warnings) warnings.push_back("filter: " + w);
  return WriteJson(dir / "index.json",
                   {{"generated", generated},
                    {"valid", fr.kept_valid.size()},
                    {"invalid_kept", fr.kept_invalid.size()},
                    {"dropped", fr.dropped.size()},
                    {"warnings", warnings},
                    {"programs", list}});
}

absl::Status LoadGenerateCounts(Context& ctx) {
  auto j = ReadJson(ctx.dir("programs") / "index.json");
  if (!j.ok()) return j.status();
  ctx.report.generated = (*j)["generated"].get<size_t>();
  ctx.report.valid = (*j)["valid"].get<size_t>();
  ctx.report.invalid_kept = (*j)["invalid_kept"].get<size_t>();
  ctx.report.dropped = (*j)["dropped"].get<size_t>();
  for (const auto& w : (*j)["warnings"]) ctx.report.errors.push_back(w.get<std::string>());
  return absl::OkStatus();
}

// ---- mutate ----

absl::Status Mutate(Context& ctx) {
  auto index = ReadJson(ctx.dir("programs") / "index.json");
  if (!index.ok()) return index.status();
  datagen::DatagenConfig dcfg;
  dcfg.random_cases_per_site = ctx.cfg.random_cases_per_site;
  const fs::path dir = ctx.dir("cases");
  std::vector<std::string> ids;
  std::set<std::string> seen;
  size_t i = 0;
  for (const json& entry : (*index)["programs"]) {
    const std::string id = entry["id"].get<std::string>();
    auto src = ReadFile(ctx.dir("programs") / (id + ".js"));
    if (!src.ok()) return src.status();
    auto prog = progen::TestProgram::FromSource(
        *std::move(src),
        entry["origin"] == "builtin" ? progen::TestProgram::Origin::kBuiltIn
                                     : progen::TestProgram::Origin::kExternal,
        entry["seed_header"].get<std::string>());
    prog.command_id = entry.value("command_id", "");
    for (auto v : {progen::Validity::kValid, progen::Validity::kInvalid,
                   progen::Validity::kUnchecked}) {
      if (progen::ValidityName(v) == entry["validity"].get<std::string>()) prog.validity = v;
    }
    for (const datagen::TestCase& tc : datagen::GenerateTestCases(
             prog, *ctx.db, dcfg, DeriveSeed(ctx.cfg.seed ^ kMutateStream, i))) {
      if (ctx.cfg.max_cases > 0 && ids.size() >= static_cast<size_t>(ctx.cfg.max_cases)) break;
      if (!seen.insert(tc.id).second) continue;
      RETURN_IF_ERROR(harness::WriteCase(dir, tc));
      ids.push_back(tc.id);
    }
    ++i;
  }
  return WriteJson(dir / "index.json", {{"cases", ids}});
}

absl::StatusOr<std::vector<std::string>> CaseIds(const Context& ctx) {
  auto j = ReadJson(ctx.dir("cases") / "index.json");
  if (!j.ok()) return j.status();
  return (*j)["cases"].get<std::vector<std::string>>();
}

absl::StatusOr<json> CaseMetaOf(const Context& ctx, const std::string& id) {
  return ReadJson(ctx.dir("cases") / (id + ".meta.json"));
}

// ---- execute ----

// Verdict records already written by an interrupted run.
std::map<std::string, std::pair<std::string, std::string>> PartialVerdicts(
    const fs::path& log, const fs::path& durations) {
  std::map<std::string, std::pair<std::string, std::string>> out;
  auto lines = [](const fs::path& p) {
    std::vector<std::string> v;
    auto text = ReadFile(p);
    if (!text.ok()) return v;
    for (absl::string_view l : absl::StrSplit(*text, '\n')) {
      if (!l.empty()) v.emplace_back(l);
    }
    return v;
  };
  std::map<std::string, std::string> dur;
  for (const std::string& l : lines(durations)) {
    json j = json::parse(l, nullptr, false);
    if (j.is_object() && j.contains("case")) dur[j["case"].get<std::string>()] = l;
  }
  for (const std::string& l : lines(log)) {
    json j = json::parse(l, nullptr, false);
    if (!j.is_object() || !j.contains("case")) continue;  // torn last line
    const std::string id = j["case"].get<std::string>();
    if (dur.count(id)) out[id] = {l, dur[id]};
  }
  return out;
}

absl::Status Execute(Context& ctx) {
  auto ids = CaseIds(ctx);
  if (!ids.ok()) return ids.status();
  const fs::path dir = ctx.dir("verdicts");
  const fs::path partial_log = dir / "verdicts.partial.jsonl";
  const fs::path partial_dur = dir / "durations.partial.jsonl";
  auto done = PartialVerdicts(partial_log, partial_dur);

  std::vector<harness::Case> todo;
  for (const std::string& id : *ids) {
    if (done.count(id)) continue;
    auto src = ReadFile(ctx.dir("cases") / (id + ".js"));
    if (!src.ok()) return src.status();
    auto meta = CaseMetaOf(ctx, id);
    if (!meta.ok()) return meta.status();
    harness::Case c{id, *std::move(src), {}};
    if (meta->contains("apis")) c.apis = (*meta)["apis"].get<std::vector<std::string>>();
    todo.push_back(std::move(c));
  }
  // Rewrite the partial files with only their complete records, then append.
  {
    std::string log, dur;
    for (const std::string& id : *ids) {
      auto it = done.find(id);
      if (it == done.end()) continue;
      absl::StrAppend(&log, it->second.first, "\n");
      absl::StrAppend(&dur, it->second.second, "\n");
    }
    RETURN_IF_ERROR(WriteFileAtomic(partial_log, log));
    RETURN_IF_ERROR(WriteFileAtomic(partial_dur, dur));
  }
  std::ofstream log_out(partial_log, std::ios::app);
  std::ofstream dur_out(partial_dur, std::ios::app);
  auto summary = harness::RunMatrix(
      ctx.testbeds, todo, ctx.matrix(), [&](const harness::Verdict& v) {
        const std::string rec = v.ToLogRecord().dump();
        const std::string d = json{{"case", v.case_id}, {"durations", v.durations}}.dump();
        log_out << rec << "\n" << std::flush;
        dur_out << d << "\n" << std::flush;
        done[v.case_id] = {rec, d};
      });
  log_out.close();
  dur_out.close();

  std::string log, dur;
  for (const std::string& id : *ids) {
    auto it = done.find(id);
    if (it == done.end()) return absl::InternalError(absl::StrCat("no verdict for ", id));
    absl::StrAppend(&log, it->second.first, "\n");
    absl::StrAppend(&dur, it->second.second, "\n");
  }
  RETURN_IF_ERROR(WriteFileAtomic(dir / "verdicts.jsonl", log));
  RETURN_IF_ERROR(WriteFileAtomic(dir / "durations.jsonl", dur));
  fs::remove(partial_log);
  fs::remove(partial_dur);
  // Counted from the sidecar so a resumed run reports what a fresh one does.
  size_t executions = 0;
  for (const auto& [id, rec] : done) {
    executions += json::parse(rec.second)["durations"].size();
  }
  return WriteJson(dir / "matrix.json", {{"executions", executions},
                                         {"skipped_by_edition", summary.skipped_by_edition},
                                         {"errors", summary.errors}});
}

absl::StatusOr<std::vector<harness::Verdict>> LoadVerdicts(const Context& ctx) {
  auto text = ReadFile(ctx.dir("verdicts") / "verdicts.jsonl");
  if (!text.ok()) return text.status();
  std::vector<harness::Verdict> out;
  for (absl::string_view l : absl::StrSplit(*text, '\n')) {
    if (l.empty()) continue;
    json j = json::parse(l, nullptr, false);
    auto v = harness::Verdict::FromLogRecord(j);
    if (!v.ok()) return v.status();
    out.push_back(*std::move(v));
  }
  return out;
}

// ---- dedup ----

absl::Status Dedup(Context& ctx) {
  auto verdicts = LoadVerdicts(ctx);
  if (!verdicts.ok()) return verdicts.status();
  dedup::KnowledgeBase kb;
  const dedup::ApiLookup api_of = [&](const std::string& id) -> std::optional<std::string> {
    auto meta = CaseMetaOf(ctx, id);
    if (!meta.ok() || !(*meta)["api"].is_string()) return std::nullopt;
    return (*meta)["api"].get<std::string>();
  };
  auto r = dedup::FilterStream(kb, *verdicts, api_of);
  RETURN_IF_ERROR(kb.Save(ctx.dir("kb") / "kb.json"));
  json novel = json::array();
  for (const harness::Verdict& v : r.novel) {
    json sigs = json::array();
    for (const auto& s : r.signatures[v.case_id]) {
      sigs.push_back({{"engine", s.engine_id},
                      {"api", s.api ? json(*s.api) : json(nullptr)},
                      {"behavior", s.behavior}});
    }
    novel.push_back({{"case", v.case_id}, {"signatures", sigs}});
  }
  return WriteJson(ctx.dir("kb") / "novel.json", {{"novel", novel},
                                                  {"suppressed", r.suppressed},
                                                  {"unsigned", r.unsigned_verdicts}});
}

// ---- reduce ----

absl::Status Reduce(Context& ctx) {
  auto novel = ReadJson(ctx.dir("kb") / "novel.json");
  if (!novel.ok()) return novel.status();
  auto verdicts = LoadVerdicts(ctx);
  if (!verdicts.ok()) return verdicts.status();
  std::map<std::string, harness::Verdict> by_id;
  for (auto& v : *verdicts) by_id[v.case_id] = v;
  for (const json& n : (*novel)["novel"]) {
    const std::string id = n["case"].get<std::string>();
    const fs::path out = ctx.dir("minimized") / (id + ".min.js");
    if (fs::exists(out)) continue;
    auto src = ReadFile(ctx.dir("cases") / (id + ".js"));
    if (!src.ok()) return src.status();
    auto meta = CaseMetaOf(ctx, id);
    if (!meta.ok()) return meta.status();
    auto tc = datagen::CaseFromMeta(*std::move(src), *meta);
    if (!tc.ok()) return tc.status();
    const auto oracle = reduce::HarnessOracle(by_id[id], ctx.testbeds, ctx.matrix());
    reduce::ReduceOptions opts;
    opts.budget = ctx.cfg.reduce_budget;
    auto r = reduce::Reduce(*tc, oracle, opts);
    if (!r.ok()) {
      // Not reducible (a flaky verdict, say): keep the case unminimized.
      ctx.report.errors.push_back(absl::StrCat("reduce ", id, ": ", r.status().message()));
      continue;
    }
    RETURN_IF_ERROR(WriteFileAtomic(out, r->tc.source()));
  }
  return absl::OkStatus();
}

// ---- report ----

absl::Status Report(Context& ctx) {
  auto novel = ReadJson(ctx.dir("kb") / "novel.json");
  if (!novel.ok()) return novel.status();
  auto verdicts = LoadVerdicts(ctx);
  if (!verdicts.ok()) return verdicts.status();
  auto matrix = ReadJson(ctx.dir("verdicts") / "matrix.json");
  if (!matrix.ok()) return matrix.status();
  auto ids = CaseIds(ctx);
  if (!ids.ok()) return ids.status();

  CampaignReport& rep = ctx.report;
  rep.cases = ids->size();
  rep.executed = (*matrix)["executions"].get<size_t>();
  for (const std::string& e : (*matrix)["errors"].get<std::vector<std::string>>()) {
    rep.errors.push_back("execute: " + e);
  }
  std::map<std::string, harness::Verdict> by_id;
  for (const auto& v : *verdicts) {
    ++rep.verdicts[std::string(harness::OutcomeName(v.outcome))];
    by_id[v.case_id] = v;
  }
  rep.novel = (*novel)["novel"].size();
  rep.suppressed = (*novel)["suppressed"].get<size_t>();

  for (const json& n : (*novel)["novel"]) {
    const std::string id = n["case"].get<std::string>();
    dedup::ReportInput in;
    in.verdict = by_id[id];
    for (const json& s : n["signatures"]) {
      in.signatures.push_back({s["engine"].get<std::string>(),
                               s["api"].is_string()
                                   ? std::optional<std::string>(s["api"].get<std::string>())
                                   : std::nullopt,
                               s["behavior"].get<std::string>()});
    }
    const fs::path min = ctx.dir("minimized") / (id + ".min.js");
    auto src = ReadFile(fs::exists(min) ? min : ctx.dir("cases") / (id + ".js"));
    if (!src.ok()) return src.status();
    in.source = *std::move(src);
    in.minimized = fs::exists(min);
    rep.minimized += in.minimized;
    if (!in.signatures.empty() && in.signatures[0].api) {
      if (const auto* spec = ctx.db->Find(*in.signatures[0].api)) {
        in.spec_section = spec->source_section;
      }
    }
    RETURN_IF_ERROR(WriteFileAtomic(ctx.dir("reports") / (id + ".md"), dedup::RenderReport(in)));
  }
  return absl::OkStatus();
}

std::string SummaryMarkdown(const CampaignReport& r) {
  std::string md = "# Campaign summary\n\n| phase | count |\n|---|---|\n";
  absl::StrAppend(&md, "| generated programs | ", r.generated, " |\n");
  absl::StrAppend(&md, "| valid | ", r.valid, " |\n");
  absl::StrAppend(&md, "| invalid kept | ", r.invalid_kept, " |\n");
  absl::StrAppend(&md, "| dropped | ", r.dropped, " |\n");
  absl::StrAppend(&md, "| test cases | ", r.cases, " |\n");
  absl::StrAppend(&md, "| executions | ", r.executed, " |\n");
  for (const auto& [o, n] : r.verdicts) absl::StrAppend(&md, "| verdict ", o, " | ", n, " |\n");
  absl::StrAppend(&md, "| novel | ", r.novel, " |\n");
  absl::StrAppend(&md, "| suppressed | ", r.suppressed, " |\n");
  absl::StrAppend(&md, "| minimized | ", r.minimized, " |\n");
  if (!r.errors.empty()) {
    absl::StrAppend(&md, "\n## Errors\n\n");
    for (const std::string& e : r.errors) absl::StrAppend(&md, "- ", e, "\n");
  }
  return md;
}

absl::Status WriteManifest(const fs::path& root) {
  std::vector<std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = fs::relative(e.path(), root).generic_string();
    // Timings vary run to run; everything else is reproducible.
    if (rel != "manifest.json" && rel != "timings.json") files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  json list = json::array();
  for (const std::string& f : files) {
    auto text = ReadFile(root / f);
    if (!text.ok()) return text.status();
    list.push_back({{"path", f}, {"sha256", Sha256Hex(*text)}, {"bytes", text->size()}});
  }
  return WriteJson(root / "manifest.json", {{"files", list}});
}

}  // namespace

// ---- config ----

json CampaignConfig::ToJson() const {
  json j = {
      {"output_root", output_root.string()},
      {"testbeds", testbeds.string()},
      {"specdb", specdb ? json(specdb->string()) : json(nullptr)},
      {"seed", seed},
      {"generator",
       {{"programs", programs},
        {"top_k", top_k},
        {"max_words", max_words},
        {"keep_invalid", keep_invalid},
        {"noise", noise},
        {"external_cmd", external_generator},
        {"syntax_checker", syntax_checker}}},
      {"datagen", {{"random_cases_per_site", random_cases_per_site}, {"max_cases", max_cases}}},
      {"harness", {{"cap_ms", cap.count()}, {"floor_ms", timeout_floor.count()}}},
      {"reduce", {{"enabled", run_reduce}, {"budget", reduce_budget}}},
  };
  return j;
}

std::string CampaignConfig::Hash() const { return Sha256Hex(ToJson().dump()); }

absl::StatusOr<CampaignConfig> ParseConfig(const json& j, const fs::path& base) {
  CampaignConfig c;
  Section top(j, "");
  RETURN_IF_ERROR(top.Check({"output_root", "testbeds", "specdb", "seed", "generator",
                             "datagen", "harness", "reduce"}));
  std::string root, testbeds, specdb;
  RETURN_IF_ERROR(top.Get("output_root", root));
  RETURN_IF_ERROR(top.Get("testbeds", testbeds));
  if (root.empty()) return ConfigError("/output_root", "required");
  if (testbeds.empty()) return ConfigError("/testbeds", "required");
  c.output_root = Resolve(base, root);
  c.testbeds = Resolve(base, testbeds);
  if (top.Has("specdb") && !top.At("specdb").is_null()) {
    RETURN_IF_ERROR(top.Get("specdb", specdb));
    c.specdb = Resolve(base, specdb);
  }
  RETURN_IF_ERROR(top.Get("seed", c.seed));
  if (top.Has("generator")) {
    Section g(top.At("generator"), "/generator");
    RETURN_IF_ERROR(g.Check({"programs", "top_k", "max_words", "keep_invalid", "noise",
                             "external_cmd", "syntax_checker"}));
    RETURN_IF_ERROR(g.Get("programs", c.programs));
    RETURN_IF_ERROR(g.Get("top_k", c.top_k));
    RETURN_IF_ERROR(g.Get("max_words", c.max_words));
    RETURN_IF_ERROR(g.Get("keep_invalid", c.keep_invalid));
    RETURN_IF_ERROR(g.Get("noise", c.noise));
    RETURN_IF_ERROR(g.Get("external_cmd", c.external_generator));
    RETURN_IF_ERROR(g.Get("syntax_checker", c.syntax_checker));
    if (c.programs < 0) return ConfigError("/generator/programs", "must be >= 0");
  }
  if (top.Has("datagen")) {
    Section d(top.At("datagen"), "/datagen");
    RETURN_IF_ERROR(d.Check({"random_cases_per_site", "max_cases"}));
    RETURN_IF_ERROR(d.Get("random_cases_per_site", c.random_cases_per_site));
    RETURN_IF_ERROR(d.Get("max_cases", c.max_cases));
    if (c.random_cases_per_site < 0 || c.max_cases < 0) {
      return ConfigError("/datagen", "counts must be >= 0");
    }
  }
  if (top.Has("harness")) {
    Section h(top.At("harness"), "/harness");
    RETURN_IF_ERROR(h.Check({"cap_ms", "floor_ms", "jobs"}));
    int64_t cap = c.cap.count(), floor = c.timeout_floor.count();
    RETURN_IF_ERROR(h.Get("cap_ms", cap));
    RETURN_IF_ERROR(h.Get("floor_ms", floor));
    RETURN_IF_ERROR(h.Get("jobs", c.jobs));
    if (cap <= 0) return ConfigError("/harness/cap_ms", "must be > 0");
    if (floor < 0) return ConfigError("/harness/floor_ms", "must be >= 0");
    if (c.jobs < 0) return ConfigError("/harness/jobs", "must be >= 0");
    c.cap = std::chrono::milliseconds(cap);
    c.timeout_floor = std::chrono::milliseconds(floor);
  }
  if (top.Has("reduce")) {
    Section r(top.At("reduce"), "/reduce");
    RETURN_IF_ERROR(r.Check({"enabled", "budget"}));
    RETURN_IF_ERROR(r.Get("enabled", c.run_reduce));
    RETURN_IF_ERROR(r.Get("budget", c.reduce_budget));
    if (c.reduce_budget < 1) return ConfigError("/reduce/budget", "must be >= 1");
  }
  return c;
}

absl::StatusOr<CampaignConfig> LoadConfig(const fs::path& path) {
  auto j = ReadJson(path);
  if (!j.ok()) return absl::InvalidArgumentError(j.status().message());
  return ParseConfig(*j, path.parent_path());
}

absl::Status Validate(const CampaignConfig& cfg) {
  RETURN_IF_ERROR(GenConfigOf(cfg).Validate());
  CampaignReport scratch;
  Context ctx{cfg, scratch};
  return LoadInputs(ctx);
}

json CampaignReport::Summary() const {
  return {{"generated", generated},   {"valid", valid},
          {"invalid_kept", invalid_kept}, {"dropped", dropped},
          {"cases", cases},           {"executed", executed},
          {"verdicts", verdicts},     {"novel", novel},
          {"suppressed", suppressed}, {"minimized", minimized},
          {"errors", errors}};
}

RunResult RunCampaign(const CampaignConfig& cfg, const RunOptions& options) {
  RunResult result;
  CampaignReport& rep = result.report;
  auto config_error = [&](const absl::Status& s) {
    rep.errors.push_back(std::string(s.message()));
    result.exit = ExitCode::kConfigError;
    return result;
  };
  if (absl::Status s = GenConfigOf(cfg).Validate(); !s.ok()) return config_error(s);
  Context ctx{cfg, rep};
  ctx.jobs = cfg.jobs > 0 ? cfg.jobs
                          : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  if (absl::Status s = LoadInputs(ctx); !s.ok()) return config_error(s);

  const fs::path state_path = cfg.output_root / "state.json";
  std::set<std::string> completed;
  if (fs::exists(state_path)) {
    auto state = ReadJson(state_path);
    if (!state.ok()) return config_error(state.status());
    if ((*state)["config_hash"] != cfg.Hash()) {
      return config_error(absl::FailedPreconditionError(absl::StrCat(
          cfg.output_root.string(), " holds a campaign with a different config; refusing to resume")));
    }
    for (const auto& p : (*state)["completed"]) completed.insert(p.get<std::string>());
  }
  for (const char* d : {"programs", "cases", "verdicts", "kb", "reports", "minimized"}) {
    std::error_code ec;
    fs::create_directories(ctx.dir(d), ec);
    if (ec) return config_error(absl::InternalError(ec.message()));
  }
  auto save_state = [&] {
    return WriteJson(state_path, {{"config_hash", cfg.Hash()},
                                  {"config", cfg.ToJson()},
                                  {"completed", std::vector<std::string>(completed.begin(),
                                                                         completed.end())}});
  };
  if (absl::Status s = save_state(); !s.ok()) return config_error(s);

  using Fn = absl::Status (*)(Context&);
  const std::map<std::string, Fn> run = {
      {"generate", &Generate}, {"mutate", &Mutate}, {"execute", &Execute},
      {"dedup", &Dedup},       {"reduce", &Reduce}, {"report", &Report}};
  for (const char* phase : kPhases) {
    const auto start = std::chrono::steady_clock::now();
    PhaseTiming t{phase, 0, completed.count(phase) > 0};
    absl::Status s = absl::OkStatus();
    if (std::string(phase) == "reduce" && !cfg.run_reduce) {
      t.skipped = true;
    } else if (!t.skipped || std::string(phase) == "report") {
      // The report is always rebuilt; it reads every earlier phase.
      s = run.at(phase)(ctx);
    }
    if (s.ok() && std::string(phase) == "generate") s = LoadGenerateCounts(ctx);
    t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rep.timings.push_back(t);
    if (!s.ok()) {
      rep.errors.push_back(absl::StrCat(phase, ": ", s.message()));
      result.exit = ExitCode::kPhaseFailure;
      break;
    }
    completed.insert(phase);
    if (absl::Status st = save_state(); !st.ok()) {
      rep.errors.push_back(absl::StrCat("state: ", st.message()));
      result.exit = ExitCode::kPhaseFailure;
      break;
    }
    if (options.stop_after && *options.stop_after == phase) return result;
  }

  std::sort(rep.errors.begin(), rep.errors.end());
  (void)WriteJson(ctx.dir("reports") / "summary.json", rep.Summary());
  (void)WriteFileAtomic(ctx.dir("reports") / "summary.md", SummaryMarkdown(rep));
  json timings = json::array();
  for (const PhaseTiming& t : rep.timings) {
    timings.push_back({{"phase", t.phase}, {"seconds", t.seconds}, {"skipped", t.skipped}});
  }
  (void)WriteJson(cfg.output_root / "timings.json", {{"phases", timings}});
  if (absl::Status s = WriteManifest(cfg.output_root); !s.ok()) {
    rep.errors.push_back(absl::StrCat("manifest: ", s.message()));
    result.exit = ExitCode::kPhaseFailure;
  }
  return result;
}

}  // namespace jsconform::campaign
