#pragma once

// Command implementations behind the `stepviz` executable. Each returns the
// process exit code; output goes to the given streams so tests can drive
// them directly.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "stepviz/cgr.hpp"

namespace stepviz::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,  // bad flags, unreadable or unwritable files
  kCompileError = 2,
  kRuntimeError = 3,
  kTruncated = 4,
  kInvalidDocument = 5,
  kBindFailure = 6,
};

struct TraceConfig {
  std::string source_path;
  std::optional<std::string> out_path;  // stdout when absent
  std::optional<std::string> stdin_path;
  InterpreterOptions options;
};

int cmd_trace(const TraceConfig& config, std::ostream& out, std::ostream& err);
int cmd_check(const std::string& source_path, std::ostream& out, std::ostream& err);
int cmd_validate(const std::string& trace_path, std::ostream& out, std::ostream& err);

struct ServeConfig {
  std::string trace_path;
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::string> ui_dir;
};

// Called once the server is listening, with the bound port and a function
// that shuts the server down.
using ServeReady = std::function<void(int port, std::function<void()> stop)>;

// Blocks until stopped.
int cmd_serve(const ServeConfig& config, std::ostream& out, std::ostream& err,
              const ServeReady& ready = {});

// Exit code for a finished trace.
int exit_code_for(const cgr::Termination& t);

// Full command line, as run by the executable.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace stepviz::cli
