#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace stepviz {

// 1-based, inclusive on both ends.
struct SourceSpan {
  int start_line = 1;
  int start_col = 1;
  int end_line = 1;
  int end_col = 1;

  bool operator==(const SourceSpan&) const = default;

  // Smallest span covering both.
  static SourceSpan cover(const SourceSpan& a, const SourceSpan& b) {
    SourceSpan s = a;
    if (b.start_line < s.start_line ||
        (b.start_line == s.start_line && b.start_col < s.start_col)) {
      s.start_line = b.start_line;
      s.start_col = b.start_col;
    }
    if (b.end_line > s.end_line ||
        (b.end_line == s.end_line && b.end_col > s.end_col)) {
      s.end_line = b.end_line;
      s.end_col = b.end_col;
    }
    return s;
  }

  std::string to_string() const {
    return std::to_string(start_line) + ":" + std::to_string(start_col) + "-" +
           std::to_string(end_line) + ":" + std::to_string(end_col);
  }
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string kind;  // machine-readable code, e.g. "UnresolvedName"
  std::string message;
  SourceSpan span;

  bool operator==(const Diagnostic&) const = default;

  std::string to_string() const {
    return std::to_string(span.start_line) + ":" +
           std::to_string(span.start_col) + ": " +
           (severity == Severity::Error ? "error" : "warning") + " [" + kind +
           "] " + message;
  }
};

using Diagnostics = std::vector<Diagnostic>;

// Either a value or the diagnostics explaining why there is none.
template <typename T>
class Result {
 public:
  Result(T value) : data_(std::move(value)) {}
  Result(Diagnostics diags) : data_(std::move(diags)) {}
  Result(Diagnostic diag) : data_(Diagnostics{std::move(diag)}) {}

  bool ok() const { return std::holds_alternative<T>(data_); }
  explicit operator bool() const { return ok(); }

  T& value() & { return std::get<T>(data_); }
  const T& value() const& { return std::get<T>(data_); }
  T&& value() && { return std::get<T>(std::move(data_)); }

  const Diagnostics& diagnostics() const {
    static const Diagnostics kNone;
    return ok() ? kNone : std::get<Diagnostics>(data_);
  }

 private:
  std::variant<T, Diagnostics> data_;
};

// Line count as an editor would report it; an empty text has one (empty) line.
inline int count_lines(std::string_view text) {
  int lines = 1;
  for (char c : text) {
    if (c == '\n') ++lines;
  }
  return lines;
}

}  // namespace stepviz
