#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "support.hpp"

namespace testing {

struct Observed {
  std::string out;
  int exit_code = -1;
  bool operator==(const Observed&) const = default;
};

struct DifferentialRow {
  std::string name;
  Observed native;
  Observed interpreted;
  std::string expected;  // contents of NAME.expected
  std::string problem;   // empty when all three agree
};

inline std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'') q += "'\\''";
    else q += c;
  }
  return q + "'";
}

// Compiles with the same compiler the project was built with and runs the binary.
inline Observed run_native(const CorpusProgram& p, const std::filesystem::path& work) {
  auto exe = work / p.name;
  auto out = work / (p.name + ".stdout");
  std::string compile = std::string(STEPVIZ_NATIVE_CXX) + " -std=c++20 -O0 -w -o " +
                        shell_quote(exe.string()) + " " + shell_quote(p.source.string());
  if (std::system(compile.c_str()) != 0) return {"<native compile failed>", -1};
  auto in = p.source;
  in.replace_extension(".in");
  std::string cmd = shell_quote(exe.string()) + " < " +
                    shell_quote(std::filesystem::exists(in) ? in.string() : "/dev/null") + " > " +
                    shell_quote(out.string());
  int status = std::system(cmd.c_str());
  Observed o;
  o.out = read_file(out);
  o.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

inline Observed run_interpreted(const CorpusProgram& p) {
  stepviz::InterpreterOptions o;
  o.stdin_text = p.stdin_text;
  o.max_frames = 1'000'000;
  auto doc = trace(p.text, o);
  const auto& last = doc.frames.back();
  Observed r;
  r.out = last.stdout_so_far;
  if (const auto* f = std::get_if<stepviz::cgr::Finished>(&*last.termination)) {
    r.exit_code = static_cast<int>(f->exit_value & 0xff);
  }
  return r;
}

inline std::vector<DifferentialRow> differential(const std::filesystem::path& work) {
  std::filesystem::create_directories(work);
  std::vector<DifferentialRow> rows;
  for (const auto& p : corpus()) {
    DifferentialRow row;
    row.name = p.name;
    row.native = run_native(p, work);
    row.interpreted = run_interpreted(p);
    auto exp = p.source;
    exp.replace_extension(".expected");
    row.expected = std::filesystem::exists(exp) ? read_file(exp) : "<missing>";
    if (row.native.exit_code < 0) row.problem = "native run failed";
    else if (!(row.native == row.interpreted)) row.problem = "interpreter disagrees with native";
    else if (row.expected != row.native.out) row.problem = "expected file is stale";
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace testing
