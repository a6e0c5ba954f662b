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

// Test program generation: a grammar-driven built-in generator, a client
// for external generators speaking a line protocol, and the syntax filter
// that decides which programs move on to test data generation.

#ifndef JSCONFORM_PROGEN_H_
#define JSCONFORM_PROGEN_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "jsconform/common.h"
#include "jsconform/process.h"
#include "jsconform/specdb.h"

namespace jsconform::progen {

enum class Validity { kValid, kInvalid, kUnchecked };
absl::string_view ValidityName(Validity v);

struct TestProgram {
  enum class Origin { kBuiltIn, kExternal };

  std::string source;
  Origin origin = Origin::kBuiltIn;
  std::string command_id;  // kExternal only
  std::string seed_header;
  Validity validity = Validity::kUnchecked;
  std::string id;  // ContentHash(source)

  static TestProgram FromSource(std::string source, Origin origin,
                                std::string seed_header);
};

struct GenConfig {
  int top_k = 10;
  int max_words = 5000;
  double keep_invalid_fraction = 0.2;
  std::vector<std::string> seed_header_corpus;
  uint64_t rng_seed = 0;
  // Built-in generator only: chance that a program is damaged on purpose
  // (an early end token or a stray token), standing in for the malformed
  // output a learned generator produces.
  double noise = 0.03;
  // External generators only: wall-clock budget per request.
  std::chrono::milliseconds request_budget{30'000};

  absl::Status Validate() const;
};

// The 2000 headers bundled with the library.
const std::vector<std::string>& BundledSeedHeaders();
// One header per non-empty line.
absl::StatusOr<std::vector<std::string>> LoadSeedHeaders(
    const std::filesystem::path& path);
absl::StatusOr<std::string> PickSeedHeader(
    const std::vector<std::string>& corpus, Rng& rng);

// Incremental program text with the three stop rules: the brace opened by
// the header is closed, the end token is produced, or the word cap is hit.
class TokenSink {
 public:
  enum class Stop { kNone, kBalanced, kEndToken, kWordCap };

  explicit TokenSink(int max_words) : max_words_(max_words) {}

  // Appends `fragment` unless generation has stopped.
  void Push(absl::string_view fragment);
  void EndToken();

  bool stopped() const { return stop_ != Stop::kNone; }
  Stop stop() const { return stop_; }
  const std::string& text() const { return text_; }

 private:
  int max_words_;
  std::string text_;
  int depth_ = 0;
  bool opened_ = false;
  size_t words_ = 0;
  bool in_word_ = false;
  Stop stop_ = Stop::kNone;
};

// Applies the stop rules to text produced elsewhere. The literal "<EOF>"
// is the end token.
std::string ApplyStopRules(absl::string_view text, int max_words,
                           TokenSink::Stop* stop = nullptr);

// One program from the built-in grammar, calling APIs drawn from `db`.
TestProgram GenerateBuiltin(const GenConfig& cfg, const specdb::SpecDb& db,
                            Rng& rng);
// `count` programs; program i uses the stream DeriveSeed(cfg.rng_seed, i),
// so the batch does not depend on `jobs`.
std::vector<TestProgram> GenerateBatch(const GenConfig& cfg,
                                       const specdb::SpecDb& db, int count,
                                       int jobs = 1);

// A long-lived external generator process. Protocol, one exchange per
// request: the client writes "GEN <max_words> <top_k> <base64 header>\n";
// the generator answers "PROG <n>\n" followed by n bytes of UTF-8 source,
// or "ERR <message>\n".
class ExternalGenerator {
 public:
  static absl::StatusOr<std::unique_ptr<ExternalGenerator>> Start(
      std::vector<std::string> argv);
  ~ExternalGenerator();

  // Errors carry the generator's stderr.
  absl::StatusOr<TestProgram> Generate(absl::string_view header,
                                       const GenConfig& cfg);
  const std::string& command_id() const { return command_id_; }

 private:
  ExternalGenerator() = default;
  absl::Status Fail(absl::string_view what);

  ChildProcess child_;
  std::string command_id_;
};

// Starts `argv`, serves one request and shuts the process down.
absl::StatusOr<TestProgram> GenerateExternal(
    const std::vector<std::string>& argv, absl::string_view header,
    const GenConfig& cfg);

// Decides syntactic validity. An error means the checker itself failed.
using SyntaxChecker = std::function<absl::StatusOr<bool>(absl::string_view)>;
// The library's own parser.
SyntaxChecker BuiltinChecker();
// Runs `argv` with the program's path appended: exit 0 accepts, exit 1
// rejects, anything else is a checker failure.
SyntaxChecker ExternalChecker(std::vector<std::string> argv,
                              std::chrono::milliseconds timeout);

struct FilterResult {
  std::vector<TestProgram> kept_valid;
  std::vector<TestProgram> kept_invalid;
  std::vector<TestProgram> dropped;
  std::vector<std::string> warnings;
};
// Keeps every valid program and each invalid one with probability
// cfg.keep_invalid_fraction. Programs the checker fails on are kept in
// kept_valid, marked kUnchecked, with a warning.
FilterResult SyntaxFilter(std::vector<TestProgram> batch,
                          const SyntaxChecker& checker, const GenConfig& cfg,
                          Rng& rng);

}  // namespace jsconform::progen

#endif  // JSCONFORM_PROGEN_H_
