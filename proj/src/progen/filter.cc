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

#include "absl/strings/str_cat.h"
#include "jsconform/js/ast.h"
#include "jsconform/progen.h"

namespace jsconform::progen {

SyntaxChecker BuiltinChecker() {
  return [](absl::string_view source) -> absl::StatusOr<bool> {
    return js::IsSyntacticallyValid(source);
  };
}

SyntaxChecker ExternalChecker(std::vector<std::string> argv,
                              std::chrono::milliseconds timeout) {
  return [argv = std::move(argv),
          timeout](absl::string_view source) -> absl::StatusOr<bool> {
    auto dir = ScopedTempDir::Create("jsconform-check-");
    if (!dir.ok()) return dir.status();
    const auto file = dir->path() / "program.js";
    if (absl::Status s = WriteFile(file, source); !s.ok()) return s;
    ProcessSpec spec;
    spec.argv = argv;
    spec.argv.push_back(file.string());
    spec.inherit_env = true;
    spec.timeout = timeout;
    auto r = RunProcess(spec);
    if (!r.ok()) return r.status();
    if (r->termination == ProcessResult::Termination::kExited) {
      if (r->exit_code == 0) return true;
      if (r->exit_code == 1) return false;
    }
    return absl::InternalError(absl::StrCat(
        "checker ", argv[0], " failed: ",
        r->termination == ProcessResult::Termination::kTimedOut ? "timed out"
        : r->termination == ProcessResult::Termination::kSignaled
            ? absl::StrCat("signal ", r->signal)
            : absl::StrCat("exit ", r->exit_code)));
  };
}

FilterResult SyntaxFilter(std::vector<TestProgram> batch,
                          const SyntaxChecker& checker, const GenConfig& cfg,
                          Rng& rng) {
  FilterResult out;
  for (TestProgram& p : batch) {
    auto valid = checker(p.source);
    if (!valid.ok()) {
      out.warnings.push_back(absl::StrCat("program ", p.id, " left unchecked: ",
                                          valid.status().message()));
      p.validity = Validity::kUnchecked;
      out.kept_valid.push_back(std::move(p));
      continue;
    }
    if (*valid) {
      p.validity = Validity::kValid;
      out.kept_valid.push_back(std::move(p));
      continue;
    }
    p.validity = Validity::kInvalid;
    // One draw per invalid program, so the kept set for a given seed does
    // not depend on how the valid ones interleave.
    if (rng.Bernoulli(cfg.keep_invalid_fraction)) {
      out.kept_invalid.push_back(std::move(p));
    } else {
      out.dropped.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace jsconform::progen
