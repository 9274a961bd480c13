// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <string>

#include "hyperbmc/error.hpp"
#include "hyperbmc/qbf.hpp"
#include "hyperbmc/qcir.hpp"

namespace hyperbmc {

/// Environment variable that may hold the default external command template.
inline constexpr const char* kSolverEnvVar = "HYPERBMC_SOLVER";

struct ExternalOptions {
  double timeout_seconds = 600;
};

namespace detail {

struct ProcessOutcome {
  int exit_code = -1;
  std::string output;
};

class TempFile {
 public:
  explicit TempFile(const std::string& content) {
    const char* dir = std::getenv("TMPDIR");
    path_ = std::string(dir && *dir ? dir : "/tmp") + "/hyperbmc-XXXXXX.qcir";
    int fd = ::mkstemps(path_.data(), 5);
    if (fd < 0) throw Error("cannot create temporary file: " + std::string(std::strerror(errno)));
    std::size_t written = 0;
    while (written < content.size()) {
      auto n = ::write(fd, content.data() + written, content.size() - written);
      if (n <= 0) {
        ::close(fd);
        throw Error("cannot write temporary file");
      }
      written += static_cast<std::size_t>(n);
    }
    ::close(fd);
  }
  ~TempFile() { ::unlink(path_.c_str()); }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

inline std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

inline ProcessOutcome run_shell(const std::string& command, double timeout_seconds) {
  int pipe_fds[2];
  if (::pipe(pipe_fds) != 0) throw Error("pipe failed");
  pid_t pid = ::fork();
  if (pid < 0) throw Error("fork failed");
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(pipe_fds[1], STDOUT_FILENO);
    ::close(pipe_fds[0]);
    ::close(pipe_fds[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(pipe_fds[1]);

  ProcessOutcome outcome;
  auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_seconds);
  char buffer[4096];
  bool open = true;
  while (open) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      ::kill(-pid, SIGKILL);
      ::waitpid(pid, nullptr, 0);
      ::close(pipe_fds[0]);
      throw Timeout(timeout_seconds);
    }
    pollfd p{pipe_fds[0], POLLIN, 0};
    int ready = ::poll(&p, 1, static_cast<int>(std::min<long long>(left.count(), 1000)));
    if (ready > 0) {
      auto n = ::read(pipe_fds[0], buffer, sizeof buffer);
      if (n <= 0)
        open = false;
      else if (outcome.output.size() < (1u << 20))
        outcome.output.append(buffer, static_cast<std::size_t>(n));
    }
  }
  ::close(pipe_fds[0]);
  int status = 0;
  ::waitpid(pid, &status, 0);
  outcome.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  return outcome;
}

}  // namespace detail

/// Maps a finished solver run to a QBF value.
inline bool interpret_solver_outcome(int exit_code, const std::string& output) {
  if (exit_code == 10) return true;
  if (exit_code == 20) return false;
  if (exit_code == 126 || exit_code == 127) throw SolverNotFound("solver command not found or not executable");
  auto first = output.substr(0, output.find('\n'));
  if (!first.empty() && first.back() == '\r') first.pop_back();
  if (first == "r SAT") return true;
  if (first == "r UNSAT") return false;
  throw UnparsableOutput(output.substr(0, 200));
}

/// Writes `q` as QCIR, runs `command_template` with `{file}` replaced by the
/// quoted file path, and reads back the verdict. No witness is returned.
inline SolveResult run_external(const std::string& command_template, const PrenexQBF& q,
                                const ExternalOptions& options = {}) {
  auto at = command_template.find("{file}");
  if (at == std::string::npos) throw ConfigError("solver command template lacks a {file} placeholder");
  detail::TempFile file(emit_qcir(q));
  std::string command = command_template;
  while ((at = command.find("{file}")) != std::string::npos)
    command.replace(at, 6, detail::shell_quote(file.path()));
  auto outcome = detail::run_shell(command, options.timeout_seconds);
  SolveResult result;
  result.value = interpret_solver_outcome(outcome.exit_code, outcome.output);
  return result;
}

}  // namespace hyperbmc
