#include "gfuzz/target.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <regex>

namespace gfuzz {

namespace {

std::vector<std::string> split_template(const std::string& tmpl, const std::string& path) {
  std::vector<std::string> argv;
  size_t i = 0;
  while (i < tmpl.size()) {
    while (i < tmpl.size() && std::isspace(static_cast<unsigned char>(tmpl[i]))) ++i;
    if (i >= tmpl.size()) break;
    size_t j = i;
    while (j < tmpl.size() && !std::isspace(static_cast<unsigned char>(tmpl[j]))) ++j;
    std::string word = tmpl.substr(i, j - i);
    size_t ph;
    while ((ph = word.find("{}")) != std::string::npos) word.replace(ph, 2, path);
    argv.push_back(std::move(word));
    i = j;
  }
  return argv;
}

struct TempInputFile {
  std::string path;
  explicit TempInputFile(std::string_view contents) {
    const char* dir = getenv("TMPDIR");
    std::string tmpl = std::string(dir && *dir ? dir : "/tmp") + "/gfuzz_input_XXXXXX";
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    int fd = mkstemp(buf.data());
    if (fd < 0) throw TargetError(std::string("mkstemp failed: ") + std::strerror(errno));
    path.assign(buf.data());
    size_t written = 0;
    while (written < contents.size()) {
      ssize_t n = write(fd, contents.data() + written, contents.size() - written);
      if (n < 0) {
        close(fd);
        throw TargetError(std::string("writing input file failed: ") + std::strerror(errno));
      }
      written += static_cast<size_t>(n);
    }
    close(fd);
  }
  ~TempInputFile() {
    if (!path.empty()) unlink(path.c_str());
  }
  TempInputFile(const TempInputFile&) = delete;
  TempInputFile& operator=(const TempInputFile&) = delete;
};

std::string classify_output(const TargetSpec& target, const std::string& output) {
  for (const ClassifierEntry& entry : target.classifiers) {
    std::regex re(entry.pattern);
    if (entry.type_group < 0 || entry.type_group > static_cast<int>(re.mark_count()))
      throw TargetError("classifier group " + std::to_string(entry.type_group) +
                        " out of range for pattern '" + entry.pattern + "'");
    std::smatch m;
    if (std::regex_search(output, m, re))
      return m[static_cast<size_t>(entry.type_group)].str();
  }
  return "";
}

ExecutionResult execute_external(const TargetSpec& target, std::string_view input) {
  TempInputFile file(input);
  std::vector<std::string> argv = split_template(target.command_template, file.path);
  if (argv.empty()) throw TargetError("empty command template");

  int out_pipe[2];
  int err_pipe[2];  // exec failure notification, O_CLOEXEC
  if (pipe(out_pipe) != 0) throw TargetError("pipe failed");
  if (pipe2(err_pipe, O_CLOEXEC) != 0) {
    close(out_pipe[0]);
    close(out_pipe[1]);
    throw TargetError("pipe failed");
  }

  const auto start = std::chrono::steady_clock::now();
  pid_t pid = fork();
  if (pid < 0) {
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    close(err_pipe[1]);
    throw TargetError(std::string("fork failed: ") + std::strerror(errno));
  }
  if (pid == 0) {
    setpgid(0, 0);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(out_pipe[1], STDERR_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (std::string& s : argv) cargv.push_back(s.data());
    cargv.push_back(nullptr);
    execvp(cargv[0], cargv.data());
    int err = errno;
    ssize_t ignored = write(err_pipe[1], &err, sizeof(err));
    (void)ignored;
    _exit(127);
  }

  close(out_pipe[1]);
  close(err_pipe[1]);

  // Did exec succeed? A write on the CLOEXEC pipe means it did not.
  int exec_errno = 0;
  {
    ssize_t n = read(err_pipe[0], &exec_errno, sizeof(exec_errno));
    close(err_pipe[0]);
    if (n == static_cast<ssize_t>(sizeof(exec_errno))) {
      close(out_pipe[0]);
      waitpid(pid, nullptr, 0);
      throw TargetError("cannot run '" + argv[0] + "': " + std::strerror(exec_errno));
    }
  }

  std::string output;
  bool timed_out = false;
  bool eof = false;
  const auto deadline = start + std::chrono::milliseconds(target.timeout_ms);
  char buf[4096];

  auto remaining_ms = [&]() {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                    deadline - std::chrono::steady_clock::now())
                    .count();
    return left < 0 ? int64_t{0} : left;
  };

  while (!eof) {
    int64_t left = remaining_ms();
    if (left == 0) {
      timed_out = true;
      break;
    }
    struct pollfd pfd{out_pipe[0], POLLIN, 0};
    int pr = poll(&pfd, 1, static_cast<int>(left));
    if (pr < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (pr == 0) {
      timed_out = true;
      break;
    }
    ssize_t n = read(out_pipe[0], buf, sizeof(buf));
    if (n <= 0) {
      eof = true;
    } else if (output.size() < target.max_capture_bytes) {
      output.append(buf, static_cast<size_t>(
                             std::min<ssize_t>(n, static_cast<ssize_t>(
                                                      target.max_capture_bytes - output.size()))));
    }
  }
  close(out_pipe[0]);

  int status = 0;
  if (timed_out) {
    kill(-pid, SIGKILL);
    kill(pid, SIGKILL);
    waitpid(pid, &status, 0);
  } else {
    // Output closed; wait for exit, still honoring the deadline.
    while (true) {
      pid_t r = waitpid(pid, &status, WNOHANG);
      if (r == pid) break;
      if (r < 0 && errno != EINTR) break;
      if (remaining_ms() == 0) {
        timed_out = true;
        kill(-pid, SIGKILL);
        kill(pid, SIGKILL);
        waitpid(pid, &status, 0);
        break;
      }
      usleep(1000);
    }
  }

  ExecutionResult result;
  result.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  if (timed_out) {
    result.outcome = ExecutionResult::Outcome::timeout;
    return result;
  }

  std::string type = classify_output(target, output);
  if (!type.empty()) {
    result.outcome = ExecutionResult::Outcome::exception;
    result.exception_type = type;
    return result;
  }
  if (WIFSIGNALED(status)) {
    result.outcome = ExecutionResult::Outcome::exception;
    result.exception_type = "signal:" + std::to_string(WTERMSIG(status));
    return result;
  }
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  if (code != 0 && target.nonzero_exit_is_exception) {
    result.outcome = ExecutionResult::Outcome::exception;
    result.exception_type = "exit:" + std::to_string(code);
    return result;
  }
  result.outcome = ExecutionResult::Outcome::ok;
  return result;
}

}  // namespace

bool builtin_target_exists(std::string_view name) { return name == "json" || name == "ok"; }

int builtin_target_branch_total(std::string_view name) {
  return name == "json" ? builtin_json_branch_total() : 0;
}

ExecutionResult execute(const TargetSpec& target, std::string_view input) {
  if (target.kind == TargetSpec::Kind::builtin) {
    const auto start = std::chrono::steady_clock::now();
    ExecutionResult result;
    if (target.builtin_name == "json")
      result = builtin_json_target(input);
    else if (target.builtin_name == "ok")
      result = builtin_ok_target(input);
    else
      throw TargetError("unknown built-in target '" + target.builtin_name + "'");
    result.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    return result;
  }
  return execute_external(target, input);
}

CoverageSummary coverage_union_sets(const std::set<int>& covered, int total) {
  CoverageSummary s;
  s.covered = covered;
  s.total = total;
  s.percent = total > 0 ? 100.0 * static_cast<double>(covered.size()) /
                              static_cast<double>(total)
                        : 0.0;
  return s;
}

CoverageSummary coverage_union(std::span<const ExecutionResult> results, int total) {
  std::set<int> covered;
  for (const ExecutionResult& r : results)
    if (r.coverage) covered.insert(r.coverage->begin(), r.coverage->end());
  return coverage_union_sets(covered, total);
}

}  // namespace gfuzz
