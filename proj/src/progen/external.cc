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

#include <chrono>

#include "absl/strings/escaping.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/strip.h"
#include "jsconform/progen.h"

namespace jsconform::progen {

namespace {

// Longest stderr excerpt carried in an error.
constexpr size_t kStderrExcerpt = 2000;

std::string Excerpt(const std::string& s) {
  if (s.size() <= kStderrExcerpt) return s;
  return s.substr(s.size() - kStderrExcerpt);
}

}  // namespace

absl::StatusOr<std::unique_ptr<ExternalGenerator>> ExternalGenerator::Start(
    std::vector<std::string> argv) {
  std::unique_ptr<ExternalGenerator> gen(new ExternalGenerator());
  gen->command_id_ = absl::StrJoin(argv, " ");
  if (absl::Status s = gen->child_.Start(argv); !s.ok()) {
    return absl::UnavailableError(
        absl::StrCat("generator error: ", s.message()));
  }
  return gen;
}

ExternalGenerator::~ExternalGenerator() { child_.Terminate(); }

absl::Status ExternalGenerator::Fail(absl::string_view what) {
  int code = child_.Terminate();
  return absl::UnavailableError(absl::StrCat(
      "generator error: ", what, " (", command_id_, ", exit ", code,
      "); stderr: ", Excerpt(child_.captured_stderr())));
}

absl::StatusOr<TestProgram> ExternalGenerator::Generate(
    absl::string_view header, const GenConfig& cfg) {
  if (!child_.running()) return Fail("generator is not running");
  const auto deadline = std::chrono::steady_clock::now() + cfg.request_budget;
  std::string request =
      absl::StrCat("GEN ", cfg.max_words, " ", cfg.top_k, " ",
                   absl::Base64Escape(header), "\n");
  if (absl::Status s = child_.Write(request); !s.ok()) return Fail(s.message());
  auto line = child_.ReadLine(deadline);
  if (!line.ok()) {
    return Fail(absl::IsDeadlineExceeded(line.status())
                    ? "request exceeded its wall-clock budget"
                    : line.status().message());
  }
  absl::string_view rest = *line;
  if (absl::ConsumePrefix(&rest, "ERR")) {
    return absl::UnavailableError(
        absl::StrCat("generator error: ", absl::StripAsciiWhitespace(rest),
                     "; stderr: ", Excerpt(child_.captured_stderr())));
  }
  size_t n = 0;
  if (!absl::ConsumePrefix(&rest, "PROG ") || !absl::SimpleAtoi(rest, &n)) {
    return Fail(absl::StrCat("malformed frame: ",
                             absl::CHexEscape(line->substr(0, 80))));
  }
  auto body = child_.ReadExact(n, deadline);
  if (!body.ok()) {
    return Fail(absl::StrCat("short frame: ", body.status().message()));
  }
  TokenSink::Stop stop;
  std::string text = ApplyStopRules(*body, cfg.max_words, &stop);
  TestProgram p = TestProgram::FromSource(
      std::move(text), TestProgram::Origin::kExternal, std::string(header));
  p.command_id = command_id_;
  return p;
}

absl::StatusOr<TestProgram> GenerateExternal(
    const std::vector<std::string>& argv, absl::string_view header,
    const GenConfig& cfg) {
  auto gen = ExternalGenerator::Start(argv);
  if (!gen.ok()) return gen.status();
  return (*gen)->Generate(header, cfg);
}

}  // namespace jsconform::progen
