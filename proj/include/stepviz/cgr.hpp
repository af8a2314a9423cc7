#pragma once

// Canonical graphics representation: the versioned, frame-by-frame trace
// document that decouples execution from display. docs/cgr-schema.md holds
// the wire format.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "stepviz/containers.hpp"
#include "stepviz/source.hpp"
#include "stepviz/value.hpp"

namespace stepviz {

struct InterpreterOptions {
  std::size_t max_frames = 10000;
  bool substeps = true;
  std::size_t hash_buckets = 6;
  std::string stdin_text;
  std::optional<std::size_t> stream_chunk;
  std::size_t max_depth = 500;

  bool operator==(const InterpreterOptions&) const = default;
};

}  // namespace stepviz

namespace stepviz::cgr {

inline constexpr std::string_view kFormatVersion = "1.0.0";
inline constexpr int kFormatMajor = 1;

struct Binding {
  std::string name;
  Value value;
  bool operator==(const Binding&) const = default;
};

using ScopeBlock = std::vector<Binding>;

struct FunctionFrame {
  std::string function;
  std::optional<SourceSpan> call_site;  // absent for the entry function
  bool active = false;
  std::vector<ScopeBlock> scopes;
  bool operator==(const FunctionFrame&) const = default;
};

using ExecutionStack = std::vector<FunctionFrame>;

struct ContainerSnapshot {
  ContainerId id;
  std::string name;
  std::optional<ScalarType> key_type;
  ScalarType elem_type = ScalarType::Int;
  containers::ContainerState state;
  bool operator==(const ContainerSnapshot&) const = default;
};

struct Finished {
  std::int64_t exit_value = 0;
  bool operator==(const Finished&) const = default;
};
struct RuntimeError {
  std::string kind;
  std::string message;
  SourceSpan span;
  bool operator==(const RuntimeError&) const = default;
};
struct Truncated {
  bool operator==(const Truncated&) const = default;
};

using Termination = std::variant<Finished, RuntimeError, Truncated>;

struct TraceFrame {
  std::size_t index = 0;
  SourceSpan span;
  std::string explanation;
  ExecutionStack stacks;
  std::vector<ContainerSnapshot> containers;  // ordered by id
  std::vector<containers::AccessEvent> events;
  std::string stdout_so_far;
  std::optional<Termination> termination;  // final frame only
  bool operator==(const TraceFrame&) const = default;
};

struct TraceDocument {
  std::string format_version{kFormatVersion};
  std::string source_text;
  InterpreterOptions options;
  std::vector<TraceFrame> frames;
  bool operator==(const TraceDocument&) const = default;
};

// ---------------------------------------------------------------------------
// Serialization

enum class CgrErrorKind { SchemaViolation, VersionMismatch };

class CgrError : public std::runtime_error {
 public:
  CgrError(CgrErrorKind kind, std::string path, const std::string& reason)
      : std::runtime_error((kind == CgrErrorKind::SchemaViolation ? "SchemaViolation at "
                                                                  : "VersionMismatch at ") +
                           (path.empty() ? std::string("/") : path) + ": " + reason),
        kind_(kind),
        path_(std::move(path)),
        reason_(reason) {}

  CgrErrorKind kind() const { return kind_; }
  const std::string& path() const { return path_; }
  const std::string& reason() const { return reason_; }

 private:
  CgrErrorKind kind_;
  std::string path_;
  std::string reason_;
};

// Canonical bytes: fixed key order, no insignificant whitespace. The document
// is laid out as header_prefix + frame, frame, ... + document_suffix so that
// frames can be written out as they are produced.
std::string serialize(const TraceDocument& doc);
std::string serialize_frame(const TraceFrame& frame);
std::string header_prefix(const TraceDocument& doc);  // ends with `"frames":[`
inline constexpr std::string_view kDocumentSuffix = "]}";

// Throws CgrError.
TraceDocument deserialize(std::string_view bytes);

// ---------------------------------------------------------------------------
// Validation and frame-window transforms

// Every document invariant plus cross-frame scope nesting and event-target
// existence. Empty iff valid.
Diagnostics validate_document(const TraceDocument& doc);

class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Frames [from, to] re-indexed from zero. A window that cuts the trace short
// marks its last frame Truncated. Throws RangeError.
TraceDocument window(const TraceDocument& doc, std::size_t from, std::size_t to);

// Whether any event in frames [from, from + horizon) touches the container.
// Throws RangeError if `from` is past the last frame.
bool peek_usage(const TraceDocument& doc, ContainerId container, std::size_t from,
                std::size_t horizon);

std::string_view termination_name(const Termination& t);

}  // namespace stepviz::cgr
