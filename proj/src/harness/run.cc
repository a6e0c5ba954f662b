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

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <mutex>
#include <thread>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_replace.h"
#include "jsconform/common.h"
#include "jsconform/harness.h"
#include "jsconform/process.h"

namespace jsconform::harness {

namespace fs = std::filesystem;

Case FromTestCase(const datagen::TestCase& tc) {
  return {tc.id, tc.source(), tc.apis_used};
}

absl::Status WriteCase(const fs::path& dir, const datagen::TestCase& tc) {
  if (absl::Status s = WriteFileAtomic(dir / (tc.id + ".js"), tc.source()); !s.ok()) {
    return s;
  }
  return WriteFileAtomic(dir / (tc.id + ".meta.json"),
                         datagen::CaseMeta(tc).dump(2) + "\n");
}

absl::StatusOr<std::vector<Case>> LoadCases(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    return absl::NotFoundError(absl::StrCat("case directory ", dir.string(), " not found"));
  }
  std::vector<Case> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const fs::path& p = entry.path();
    if (p.extension() != ".js" || absl::EndsWith(p.filename().string(), ".min.js")) {
      continue;
    }
    Case c;
    c.id = p.stem().string();
    auto src = ReadFile(p);
    if (!src.ok()) return src.status();
    c.source = *std::move(src);
    const fs::path meta = dir / (c.id + ".meta.json");
    if (fs::exists(meta)) {
      auto text = ReadFile(meta);
      if (!text.ok()) return text.status();
      auto j = nlohmann::json::parse(*text, nullptr, false);
      if (j.is_discarded() || !j.is_object()) {
        return absl::InvalidArgumentError(absl::StrCat(meta.string(), ": not a JSON object"));
      }
      if (j.contains("apis") && j["apis"].is_array()) {
        for (const auto& a : j["apis"]) {
          if (a.is_string()) c.apis.push_back(a.get<std::string>());
        }
      }
    }
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(),
            [](const Case& a, const Case& b) { return a.id < b.id; });
  return out;
}

absl::StatusOr<ExecutionResult> RunTestbed(const Testbed& tb, const Case& c,
                                           const TimeoutPolicy& policy,
                                           const ParseErrorTable& table) {
  auto dir = ScopedTempDir::Create("jsconform-run");
  if (!dir.ok()) return dir.status();
  const fs::path file = dir->path() / "case.js";
  const std::string source =
      tb.mode == Mode::kStrict ? absl::StrCat("\"use strict\";\n", c.source) : c.source;
  if (absl::Status s = WriteFile(file, source); !s.ok()) return s;

  ProcessSpec spec;
  spec.argv.push_back(tb.binary);
  for (const std::string& a : tb.argv_template) {
    spec.argv.push_back(absl::StrReplaceAll(a, {{"{FILE}", file.string()}}));
  }
  spec.env = tb.env;
  spec.cwd = dir->path();
  spec.timeout = policy.absolute_cap;
  spec.output_cap = policy.output_cap;
  auto run = RunProcess(spec);
  if (!run.ok()) {
    return absl::Status(run.status().code(),
                        absl::StrCat("testbed ", tb.id(), ": ", run.status().message()));
  }

  ExecutionResult r;
  r.testbed = tb.id();
  r.case_id = c.id;
  r.duration = std::min(run->duration, policy.absolute_cap);
  r.stderr_text = std::move(run->stderr_text);
  switch (run->termination) {
    case ProcessResult::Termination::kTimedOut:
      r.exit = ExecutionResult::Exit::kTimedOut;
      r.duration = policy.absolute_cap;
      break;
    case ProcessResult::Termination::kSignaled:
      r.exit = ExecutionResult::Exit::kCrashed;
      r.signal = run->signal;
      break;
    case ProcessResult::Termination::kExited:
      r.exit = ExecutionResult::Exit::kExited;
      r.exit_code = run->exit_code;
      break;
  }
  r.stdout_text = CanonicalizeOutput(run->stdout_text);
  if (r.exit == ExecutionResult::Exit::kExited &&
      table.IsParseFailure(tb.parse_profile, r.exit_code, run->stdout_text,
                           r.stderr_text)) {
    r.phase = ExecutionResult::Phase::kParseFail;
  }
  return r;
}

MatrixSummary RunMatrix(const std::vector<Testbed>& testbeds,
                        const std::vector<Case>& cases,
                        const MatrixOptions& options, const VerdictSink& sink) {
  const ParseErrorTable& table =
      options.parse_table ? *options.parse_table : ParseErrorTable::Bundled();
  const EditionTable& editions =
      options.editions ? *options.editions : EditionTable::Bundled();
  MatrixSummary summary;
  summary.cases = cases.size();

  struct Job {
    size_t case_index;
    size_t testbed_index;
  };
  std::vector<Job> jobs;
  std::vector<size_t> remaining(cases.size(), 0);
  for (size_t c = 0; c < cases.size(); ++c) {
    for (size_t t = 0; t < testbeds.size(); ++t) {
      if (!editions.Supports(testbeds[t], cases[c].apis)) {
        ++summary.skipped_by_edition;
        continue;
      }
      jobs.push_back({c, t});
      ++remaining[c];
    }
  }

  // Results land in per-case slots; the calling thread classifies cases in
  // order as soon as all of a case's executions are in.
  std::vector<std::vector<absl::StatusOr<ExecutionResult>>> slots(cases.size());
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t j = next++; j < jobs.size(); j = next++) {
      const Job& job = jobs[j];
      auto r = RunTestbed(testbeds[job.testbed_index], cases[job.case_index],
                          options.policy, table);
      std::lock_guard<std::mutex> lock(mu);
      slots[job.case_index].push_back(std::move(r));
      if (--remaining[job.case_index] == 0) cv.notify_all();
    }
  };
  const int n = std::max(1, std::min<int>(options.jobs, static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int i = 0; i < n && !jobs.empty(); ++i) pool.emplace_back(worker);

  for (size_t c = 0; c < cases.size(); ++c) {
    std::vector<absl::StatusOr<ExecutionResult>> got;
    {
      std::unique_lock<std::mutex> lock(mu);
      cv.wait(lock, [&] { return remaining[c] == 0; });
      got = std::move(slots[c]);
    }
    std::vector<ExecutionResult> results;
    for (auto& r : got) {
      if (r.ok()) {
        results.push_back(*std::move(r));
        ++summary.executions;
      } else {
        summary.errors.push_back(absl::StrCat(cases[c].id, ": ", r.status().message()));
      }
    }
    // Testbed order, not completion order, so the verdict is reproducible.
    std::sort(results.begin(), results.end(),
              [](const ExecutionResult& a, const ExecutionResult& b) {
                return a.testbed < b.testbed;
              });
    auto verdict = Classify(results, options.policy);
    if (!verdict.ok()) {
      Verdict v;
      v.case_id = cases[c].id;
      v.outcome = Outcome::kDiscarded;
      v.note = absl::StrCat("fewer than two eligible testbeds (", results.size(), ")");
      for (const ExecutionResult& r : results) v.durations[r.testbed] = r.duration.count();
      sink(v);
    } else {
      sink(*verdict);
    }
  }
  for (std::thread& t : pool) t.join();
  std::sort(summary.errors.begin(), summary.errors.end());
  return summary;
}

}  // namespace jsconform::harness
