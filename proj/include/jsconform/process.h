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

// POSIX subprocess helpers: one-shot runs with a deadline and output caps,
// plus a long-lived child spoken to over its standard streams.

#ifndef JSCONFORM_PROCESS_H_
#define JSCONFORM_PROCESS_H_

#include <sys/types.h>

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace jsconform {

struct ProcessSpec {
  std::vector<std::string> argv;
  // When `inherit_env` is false the child sees only `env` (plus PATH).
  bool inherit_env = false;
  std::map<std::string, std::string> env;
  std::filesystem::path cwd;
  std::string stdin_data;
  std::chrono::milliseconds timeout{10'000};
  // Bytes retained per stream; the rest is read and discarded.
  size_t output_cap = 1 << 20;
};

struct ProcessResult {
  enum class Termination { kExited, kSignaled, kTimedOut };
  Termination termination = Termination::kExited;
  int exit_code = 0;
  int signal = 0;
  std::string stdout_text;
  std::string stderr_text;
  bool output_truncated = false;
  std::chrono::milliseconds duration{0};
};

// Runs `spec` to completion or until its timeout, killing the whole process
// group on expiry. Returns NotFound/FailedPrecondition when the program
// cannot be executed at all.
absl::StatusOr<ProcessResult> RunProcess(const ProcessSpec& spec);

// A child process with piped stdin/stdout/stderr for request/response
// protocols. Not thread-safe; one owner at a time.
class ChildProcess {
 public:
  ChildProcess() = default;
  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;
  ChildProcess(ChildProcess&& other) noexcept;
  ChildProcess& operator=(ChildProcess&& other) noexcept;
  ~ChildProcess();

  absl::Status Start(const std::vector<std::string>& argv);
  bool running() const { return pid_ > 0; }

  absl::Status Write(absl::string_view data);
  // Reads through the next '\n' (not included in the result).
  absl::StatusOr<std::string> ReadLine(
      std::chrono::steady_clock::time_point deadline);
  absl::StatusOr<std::string> ReadExact(
      size_t n, std::chrono::steady_clock::time_point deadline);

  // Closes stdin, waits briefly, then kills. Returns the exit code or
  // -signal.
  int Terminate();
  // Everything the child wrote to stderr so far.
  const std::string& captured_stderr() const { return stderr_; }

 private:
  absl::Status Fill(std::chrono::steady_clock::time_point deadline);
  void Reset();

  pid_t pid_ = -1;
  int in_fd_ = -1;
  int out_fd_ = -1;
  int err_fd_ = -1;
  std::string buffer_;
  std::string stderr_;
};

}  // namespace jsconform

#endif  // JSCONFORM_PROCESS_H_
