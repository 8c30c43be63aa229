#include "semred/oracle.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <thread>

#include "semred/errors.hpp"
#include "semred/util.hpp"

extern char** environ;

namespace semred {

namespace {

/** Temp file removed on scope exit. */
class TempFile
{
 public:
  explicit TempFile(const std::string& contents)
  {
    const char* dir = std::getenv("TMPDIR");
    std::string tmpl = std::string(dir && *dir ? dir : "/tmp")
                       + "/semred-XXXXXX.c";
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    int fd = mkstemps(buf.data(), 2);
    if (fd < 0) {
      throw OracleError(std::string("mkstemps failed: ") + std::strerror(errno));
    }
    path_ = buf.data();
    size_t off = 0;
    while (off < contents.size()) {
      ssize_t n = ::write(fd, contents.data() + off, contents.size() - off);
      if (n < 0) {
        ::close(fd);
        throw OracleError(std::string("write failed: ") + std::strerror(errno));
      }
      off += static_cast<size_t>(n);
    }
    ::close(fd);
  }

  ~TempFile() { ::unlink(path_.c_str()); }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace

const char* outcome_kind_name(OracleOutcome::Kind kind)
{
  switch (kind) {
    case OracleOutcome::Kind::Passed: return "passed";
    case OracleOutcome::Kind::SemanticFail: return "semantic_fail";
    case OracleOutcome::Kind::NonSemanticFail: return "non_semantic_fail";
  }
  return "passed";
}

OracleOutcome::Kind outcome_kind_from_name(const std::string& name)
{
  if (name == "passed") return OracleOutcome::Kind::Passed;
  if (name == "semantic_fail") return OracleOutcome::Kind::SemanticFail;
  if (name == "non_semantic_fail") return OracleOutcome::Kind::NonSemanticFail;
  throw Error("unknown outcome kind '" + name + "'");
}

bool run_external(const CommandSpec& cmd, const std::string& candidate_text,
                  std::ostream* log)
{
  TempFile file(candidate_text);

  std::vector<std::string> argv_strings;
  argv_strings.push_back(cmd.program);
  argv_strings.insert(argv_strings.end(), cmd.args.begin(), cmd.args.end());
  argv_strings.push_back(file.path());
  std::vector<char*> argv;
  for (auto& s : argv_strings) argv.push_back(s.data());
  argv.push_back(nullptr);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, "/dev/null",
                                   O_WRONLY, 0);
  posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, "/dev/null",
                                   O_WRONLY, 0);

  pid_t pid = -1;
  int rc = posix_spawnp(&pid, cmd.program.c_str(), &actions, nullptr,
                        argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    throw OracleError("cannot spawn oracle '" + cmd.program
                      + "': " + std::strerror(rc));
  }

  const auto deadline =
      std::chrono::steady_clock::now()
      + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(cmd.timeout_seconds));
  int status = 0;
  while (true) {
    pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid) {
      return WIFEXITED(status) && WEXITSTATUS(status) == 0;
    }
    if (done < 0 && errno != EINTR) {
      throw OracleError(std::string("waitpid failed: ") + std::strerror(errno));
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(pid, SIGKILL);
      while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
      }
      std::ostream& out = log ? *log : std::cerr;
      out << "oracle timeout after " << cmd.timeout_seconds << "s: "
          << cmd.program << '\n';
      return false;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
}

OracleOutcome ExternalOracle::run(const SyntaxTree& candidate)
{
  auto start = std::chrono::steady_clock::now();
  bool ok = run_external(cmd_, print(candidate), log_);
  OracleOutcome out;
  out.kind = ok ? OracleOutcome::Kind::Passed
                : OracleOutcome::Kind::NonSemanticFail;
  out.duration =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return out;
}

OracleOutcome run_composite(const CheckerFn& sem, const PropertyFn& prop,
                            const SyntaxTree& candidate)
{
  auto start = std::chrono::steady_clock::now();
  OracleOutcome out;
  out.issues = sem(candidate);
  if (!out.issues.empty()) {
    out.kind = OracleOutcome::Kind::SemanticFail;
  } else if (!prop(candidate)) {
    out.kind = OracleOutcome::Kind::NonSemanticFail;
  } else {
    out.kind = OracleOutcome::Kind::Passed;
  }
  out.duration =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return out;
}

}  // namespace semred
