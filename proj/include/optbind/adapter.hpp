#pragma once

// External solver adapter: runs a shell command, writes the model JSON to its
// standard input and reads {status, objective, x} from standard output.

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <optional>
#include <string>

#include "json.hpp"
#include "optbind/model.hpp"
#include "optbind/solver_types.hpp"

namespace optbind {

struct SolverAdapter {
  std::string command;  // run through /bin/sh -c
  double timeout_seconds = 60.0;
};

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  bool signaled = false;
  std::string out;
};

// Runs `command` with `input` on stdin, collecting stdout until the process
// exits or the timeout elapses (then it is killed).
inline ProcessResult run_process(const std::string& command, const std::string& input, double timeout_seconds) {
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0) throw internal_error("pipe() failed");
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw internal_error("pipe() failed");
  }
  const pid_t pid = fork();
  if (pid < 0) throw internal_error("fork() failed");
  if (pid == 0) {
    setpgid(0, 0);
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  fcntl(in_pipe[1], F_SETFL, O_NONBLOCK);
  fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
  struct sigaction ign {}, old {};
  ign.sa_handler = SIG_IGN;
  sigaction(SIGPIPE, &ign, &old);

  ProcessResult res;
  std::size_t written = 0;
  int wfd = in_pipe[1];
  int rfd = out_pipe[0];
  if (input.empty()) {
    close(wfd);
    wfd = -1;
  }
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_seconds);
  char buf[65536];
  while (rfd >= 0) {
    const auto now = std::chrono::steady_clock::now();
    if (now >= deadline) {
      res.timed_out = true;
      break;
    }
    const int wait_ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count() + 1);
    pollfd fds[2];
    nfds_t nf = 0;
    fds[nf++] = {rfd, POLLIN, 0};
    if (wfd >= 0) fds[nf++] = {wfd, POLLOUT, 0};
    const int pr = poll(fds, nf, wait_ms);
    if (pr < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (nf == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const ssize_t w = write(wfd, input.data() + written, input.size() - written);
      if (w > 0) written += static_cast<std::size_t>(w);
      if (w < 0 && errno != EAGAIN) written = input.size();
      if (written >= input.size()) {
        close(wfd);
        wfd = -1;
      }
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      const ssize_t r = read(rfd, buf, sizeof(buf));
      if (r > 0) {
        res.out.append(buf, static_cast<std::size_t>(r));
      } else if (r == 0 || errno != EAGAIN) {
        close(rfd);
        rfd = -1;
      }
    }
  }
  if (wfd >= 0) close(wfd);
  if (rfd >= 0) close(rfd);
  if (res.timed_out) {
    kill(-pid, SIGKILL);
    kill(pid, SIGKILL);
  }
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  sigaction(SIGPIPE, &old, nullptr);
  if (WIFEXITED(status)) res.exit_code = WEXITSTATUS(status);
  if (WIFSIGNALED(status)) res.signaled = true;
  return res;
}

struct ExternalSolveOutcome {
  std::optional<SolveResult> result;
  std::string error;  // set iff result is empty
  bool timed_out = false;

  bool ok() const { return result.has_value(); }
};

inline SolveResult solve_result_from_json(const nlohmann::json& j, std::size_t num_vars) {
  if (!j.is_object() || !j.contains("status")) throw data_error("solver output lacks 'status'");
  SolveResult r;
  r.status = parse_solve_status(j.at("status").get<std::string>());
  if (r.status == SolveStatus::Optimal) {
    if (!j.contains("objective") || !j.at("objective").is_number())
      throw data_error("optimal solver output lacks a numeric 'objective'");
    r.objective = j.at("objective").get<double>();
    if (j.contains("x") && !j.at("x").is_null()) {
      auto x = j.at("x").get<std::vector<double>>();
      if (x.size() != num_vars)
        throw data_error("solver output x has " + std::to_string(x.size()) + " entries, model has " +
                         std::to_string(num_vars));
      r.point = Point{std::move(x)};
    }
  }
  if (j.contains("node_count")) r.node_count = j.at("node_count").get<std::size_t>();
  if (j.contains("iterations")) r.iterations = j.at("iterations").get<std::size_t>();
  return r;
}

inline nlohmann::json solve_result_to_json(const SolveResult& r) {
  nlohmann::json j;
  j["status"] = to_string(r.status);
  j["objective"] = r.objective ? nlohmann::json(*r.objective) : nlohmann::json(nullptr);
  j["x"] = r.point ? nlohmann::json(r.point->x) : nlohmann::json(nullptr);
  j["node_count"] = r.node_count;
  j["iterations"] = r.iterations;
  return j;
}

inline ExternalSolveOutcome external_solve(const StandardFormModel& m, const SolverAdapter& adapter) {
  if (adapter.command.empty()) throw usage_error("solver adapter command is empty");
  if (!(adapter.timeout_seconds > 0)) throw usage_error("solver adapter timeout must be positive");
  ExternalSolveOutcome o;
  const auto proc = run_process(adapter.command, model_to_json(m).dump(), adapter.timeout_seconds);
  if (proc.timed_out) {
    o.timed_out = true;
    o.error = "timeout after " + std::to_string(adapter.timeout_seconds) + " s";
    return o;
  }
  if (proc.signaled) {
    o.error = "adapter terminated by signal";
    return o;
  }
  if (proc.exit_code != 0) {
    o.error = "adapter exited with code " + std::to_string(proc.exit_code);
    return o;
  }
  try {
    o.result = solve_result_from_json(nlohmann::json::parse(proc.out), m.num_vars());
  } catch (const std::exception& e) {
    o.error = std::string("malformed adapter output: ") + e.what();
  }
  return o;
}

}  // namespace optbind
