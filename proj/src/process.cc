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

#include "jsconform/process.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <thread>
#include <utility>

#include "absl/strings/str_cat.h"

namespace jsconform {
namespace {

using Clock = std::chrono::steady_clock;

void IgnoreSigpipeOnce() {
  static std::once_flag once;
  std::call_once(once, [] { signal(SIGPIPE, SIG_IGN); });
}

void CloseFd(int& fd) {
  if (fd >= 0) {
    close(fd);
    fd = -1;
  }
}

int RemainingMs(Clock::time_point deadline) {
  auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                  deadline - Clock::now())
                  .count();
  if (left < 0) return 0;
  return left > 1'000'000 ? 1'000'000 : static_cast<int>(left);
}

// Owns the NUL-terminated arrays handed to execvpe.
struct ExecArgs {
  std::vector<std::string> storage_argv;
  std::vector<std::string> storage_env;
  std::vector<char*> argv;
  std::vector<char*> envp;

  ExecArgs(const std::vector<std::string>& args, bool inherit,
           const std::map<std::string, std::string>& env) {
    storage_argv = args;
    if (inherit) {
      for (char** e = environ; *e != nullptr; ++e) storage_env.emplace_back(*e);
    } else if (const char* path = std::getenv("PATH"); path != nullptr) {
      storage_env.push_back(absl::StrCat("PATH=", path));
    }
    for (const auto& [k, v] : env) storage_env.push_back(absl::StrCat(k, "=", v));
    for (auto& s : storage_argv) argv.push_back(s.data());
    argv.push_back(nullptr);
    for (auto& s : storage_env) envp.push_back(s.data());
    envp.push_back(nullptr);
  }
};

struct Pipes {
  int in[2] = {-1, -1};
  int out[2] = {-1, -1};
  int err[2] = {-1, -1};
  int exec_err[2] = {-1, -1};

  bool Open() {
    return pipe2(in, O_CLOEXEC) == 0 && pipe2(out, O_CLOEXEC) == 0 &&
           pipe2(err, O_CLOEXEC) == 0 && pipe2(exec_err, O_CLOEXEC) == 0;
  }
  void CloseAll() {
    for (int* p : {in, out, err, exec_err}) {
      CloseFd(p[0]);
      CloseFd(p[1]);
    }
  }
};

// Child side of fork: only async-signal-safe calls from here on.
[[noreturn]] void ExecChild(const ExecArgs& args, const Pipes& pipes,
                            const char* cwd) {
  setpgid(0, 0);
  struct rlimit no_core = {0, 0};
  setrlimit(RLIMIT_CORE, &no_core);
  dup2(pipes.in[0], STDIN_FILENO);
  dup2(pipes.out[1], STDOUT_FILENO);
  dup2(pipes.err[1], STDERR_FILENO);
  signal(SIGPIPE, SIG_DFL);
  if (cwd != nullptr && chdir(cwd) != 0) {
    int e = errno;
    ssize_t ignored = write(pipes.exec_err[1], &e, sizeof(e));
    (void)ignored;
    _exit(127);
  }
  execvpe(args.argv[0], args.argv.data(), args.envp.data());
  int e = errno;
  ssize_t ignored = write(pipes.exec_err[1], &e, sizeof(e));
  (void)ignored;
  _exit(127);
}

// Returns the errno reported by a failed exec, or 0 when exec succeeded.
int AwaitExec(int exec_err_read) {
  int child_errno = 0;
  ssize_t n;
  do {
    n = read(exec_err_read, &child_errno, sizeof(child_errno));
  } while (n < 0 && errno == EINTR);
  return n == sizeof(child_errno) ? child_errno : 0;
}

}  // namespace

absl::StatusOr<ProcessResult> RunProcess(const ProcessSpec& spec) {
  if (spec.argv.empty()) return absl::InvalidArgumentError("empty argv");
  IgnoreSigpipeOnce();
  ExecArgs args(spec.argv, spec.inherit_env, spec.env);
  std::string cwd = spec.cwd.string();
  Pipes pipes;
  if (!pipes.Open()) {
    pipes.CloseAll();
    return absl::ResourceExhaustedError(
        absl::StrCat("pipe: ", std::strerror(errno)));
  }

  const Clock::time_point start = Clock::now();
  pid_t pid = fork();
  if (pid < 0) {
    pipes.CloseAll();
    return absl::ResourceExhaustedError(
        absl::StrCat("fork: ", std::strerror(errno)));
  }
  if (pid == 0) ExecChild(args, pipes, cwd.empty() ? nullptr : cwd.c_str());
  setpgid(pid, pid);

  CloseFd(pipes.in[0]);
  CloseFd(pipes.out[1]);
  CloseFd(pipes.err[1]);
  CloseFd(pipes.exec_err[1]);
  if (int e = AwaitExec(pipes.exec_err[0]); e != 0) {
    waitpid(pid, nullptr, 0);
    pipes.CloseAll();
    return absl::NotFoundError(absl::StrCat("cannot execute ", spec.argv[0],
                                            ": ", std::strerror(e)));
  }
  CloseFd(pipes.exec_err[0]);

  ProcessResult result;
  const Clock::time_point deadline = start + spec.timeout;
  int in_fd = pipes.in[1];
  int out_fd = pipes.out[0];
  int err_fd = pipes.err[0];
  fcntl(in_fd, F_SETFL, O_NONBLOCK);
  size_t written = 0;
  if (spec.stdin_data.empty()) CloseFd(in_fd);
  bool timed_out = false;
  char buf[65536];

  while (out_fd >= 0 || err_fd >= 0) {
    std::vector<pollfd> fds;
    if (out_fd >= 0) fds.push_back({out_fd, POLLIN, 0});
    if (err_fd >= 0) fds.push_back({err_fd, POLLIN, 0});
    if (in_fd >= 0) fds.push_back({in_fd, POLLOUT, 0});
    int wait_ms = RemainingMs(deadline);
    if (wait_ms == 0) {
      timed_out = true;
      break;
    }
    int rc = poll(fds.data(), fds.size(), wait_ms);
    if (rc < 0) {
      if (errno == EINTR) continue;
      break;
    }
    for (const pollfd& p : fds) {
      if (p.revents == 0) continue;
      if (p.fd == in_fd) {
        ssize_t n = write(in_fd, spec.stdin_data.data() + written,
                          spec.stdin_data.size() - written);
        if (n > 0) written += static_cast<size_t>(n);
        if (n < 0 && errno != EAGAIN) written = spec.stdin_data.size();
        if (written >= spec.stdin_data.size()) CloseFd(in_fd);
        continue;
      }
      ssize_t n = read(p.fd, buf, sizeof(buf));
      if (n <= 0) {
        if (n < 0 && (errno == EINTR || errno == EAGAIN)) continue;
        if (p.fd == out_fd) CloseFd(out_fd);
        if (p.fd == err_fd) CloseFd(err_fd);
        continue;
      }
      std::string& sink =
          p.fd == out_fd ? result.stdout_text : result.stderr_text;
      size_t room = spec.output_cap > sink.size() ? spec.output_cap - sink.size()
                                                  : 0;
      if (static_cast<size_t>(n) > room) result.output_truncated = true;
      sink.append(buf, std::min(room, static_cast<size_t>(n)));
    }
  }

  int status = 0;
  if (!timed_out) {
    // Streams closed; the process may still be running briefly.
    while (true) {
      pid_t w = waitpid(pid, &status, WNOHANG);
      if (w == pid) break;
      if (w < 0 && errno != EINTR) break;
      if (Clock::now() >= deadline) {
        timed_out = true;
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
  }
  if (timed_out) {
    kill(-pid, SIGKILL);
    kill(pid, SIGKILL);
    waitpid(pid, &status, 0);
    result.termination = ProcessResult::Termination::kTimedOut;
  } else if (WIFSIGNALED(status)) {
    result.termination = ProcessResult::Termination::kSignaled;
    result.signal = WTERMSIG(status);
  } else {
    result.termination = ProcessResult::Termination::kExited;
    result.exit_code = WEXITSTATUS(status);
  }
  // Reap anything left in the group.
  kill(-pid, SIGKILL);
  result.duration = std::chrono::duration_cast<std::chrono::milliseconds>(
      Clock::now() - start);
  CloseFd(in_fd);
  CloseFd(out_fd);
  CloseFd(err_fd);
  return result;
}

ChildProcess::ChildProcess(ChildProcess&& other) noexcept { *this = std::move(other); }

ChildProcess& ChildProcess::operator=(ChildProcess&& other) noexcept {
  if (this != &other) {
    Terminate();
    pid_ = std::exchange(other.pid_, -1);
    in_fd_ = std::exchange(other.in_fd_, -1);
    out_fd_ = std::exchange(other.out_fd_, -1);
    err_fd_ = std::exchange(other.err_fd_, -1);
    buffer_ = std::move(other.buffer_);
    stderr_ = std::move(other.stderr_);
  }
  return *this;
}

ChildProcess::~ChildProcess() { Terminate(); }

absl::Status ChildProcess::Start(const std::vector<std::string>& argv) {
  if (argv.empty()) return absl::InvalidArgumentError("empty argv");
  IgnoreSigpipeOnce();
  Terminate();
  ExecArgs args(argv, /*inherit=*/true, {});
  Pipes pipes;
  if (!pipes.Open()) {
    pipes.CloseAll();
    return absl::ResourceExhaustedError("pipe failed");
  }
  pid_t pid = fork();
  if (pid < 0) {
    pipes.CloseAll();
    return absl::ResourceExhaustedError("fork failed");
  }
  if (pid == 0) ExecChild(args, pipes, nullptr);
  setpgid(pid, pid);
  CloseFd(pipes.in[0]);
  CloseFd(pipes.out[1]);
  CloseFd(pipes.err[1]);
  CloseFd(pipes.exec_err[1]);
  if (int e = AwaitExec(pipes.exec_err[0]); e != 0) {
    waitpid(pid, nullptr, 0);
    pipes.CloseAll();
    return absl::NotFoundError(
        absl::StrCat("cannot execute ", argv[0], ": ", std::strerror(e)));
  }
  CloseFd(pipes.exec_err[0]);
  pid_ = pid;
  in_fd_ = pipes.in[1];
  out_fd_ = pipes.out[0];
  err_fd_ = pipes.err[0];
  buffer_.clear();
  stderr_.clear();
  return absl::OkStatus();
}

absl::Status ChildProcess::Write(absl::string_view data) {
  if (in_fd_ < 0) return absl::FailedPreconditionError("child not running");
  while (!data.empty()) {
    ssize_t n = write(in_fd_, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      return absl::UnavailableError(
          absl::StrCat("write to child: ", std::strerror(errno)));
    }
    data.remove_prefix(static_cast<size_t>(n));
  }
  return absl::OkStatus();
}

absl::Status ChildProcess::Fill(Clock::time_point deadline) {
  char buf[65536];
  while (true) {
    if (out_fd_ < 0) return absl::UnavailableError("child closed stdout");
    std::vector<pollfd> fds = {{out_fd_, POLLIN, 0}};
    if (err_fd_ >= 0) fds.push_back({err_fd_, POLLIN, 0});
    int wait_ms = RemainingMs(deadline);
    if (wait_ms == 0) return absl::DeadlineExceededError("child response");
    int rc = poll(fds.data(), fds.size(), wait_ms);
    if (rc < 0) {
      if (errno == EINTR) continue;
      return absl::InternalError("poll failed");
    }
    bool got_stdout = false;
    for (const pollfd& p : fds) {
      if (p.revents == 0) continue;
      ssize_t n = read(p.fd, buf, sizeof(buf));
      if (n <= 0) {
        if (n < 0 && errno == EINTR) continue;
        if (p.fd == err_fd_) {
          CloseFd(err_fd_);
        } else {
          CloseFd(out_fd_);
          return absl::UnavailableError("child closed stdout");
        }
        continue;
      }
      if (p.fd == out_fd_) {
        buffer_.append(buf, static_cast<size_t>(n));
        got_stdout = true;
      } else if (stderr_.size() < (1 << 20)) {
        stderr_.append(buf, static_cast<size_t>(n));
      }
    }
    if (got_stdout) return absl::OkStatus();
  }
}

absl::StatusOr<std::string> ChildProcess::ReadLine(Clock::time_point deadline) {
  while (true) {
    size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    if (absl::Status s = Fill(deadline); !s.ok()) return s;
  }
}

absl::StatusOr<std::string> ChildProcess::ReadExact(size_t n,
                                                    Clock::time_point deadline) {
  while (buffer_.size() < n) {
    if (absl::Status s = Fill(deadline); !s.ok()) return s;
  }
  std::string out = buffer_.substr(0, n);
  buffer_.erase(0, n);
  return out;
}

int ChildProcess::Terminate() {
  if (pid_ <= 0) {
    Reset();
    return 0;
  }
  CloseFd(in_fd_);
  int status = 0;
  bool reaped = false;
  for (int i = 0; i < 50; ++i) {
    pid_t w = waitpid(pid_, &status, WNOHANG);
    if (w == pid_) {
      reaped = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  if (!reaped) {
    kill(-pid_, SIGKILL);
    kill(pid_, SIGKILL);
    waitpid(pid_, &status, 0);
  }
  // Drain remaining stderr for diagnostics.
  if (err_fd_ >= 0) {
    fcntl(err_fd_, F_SETFL, O_NONBLOCK);
    char buf[4096];
    ssize_t n;
    while ((n = read(err_fd_, buf, sizeof(buf))) > 0 && stderr_.size() < (1 << 20)) {
      stderr_.append(buf, static_cast<size_t>(n));
    }
  }
  pid_ = -1;
  Reset();
  if (WIFSIGNALED(status)) return -WTERMSIG(status);
  return WEXITSTATUS(status);
}

void ChildProcess::Reset() {
  CloseFd(in_fd_);
  CloseFd(out_fd_);
  CloseFd(err_fd_);
  buffer_.clear();
}

}  // namespace jsconform
