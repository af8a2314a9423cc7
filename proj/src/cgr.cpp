#include "stepviz/cgr.hpp"

#include <algorithm>

#include <json.hpp>

namespace stepviz::cgr {

using Json = nlohmann::ordered_json;
using containers::AccessEvent;
using containers::BstNode;
using containers::BstState;
using containers::ContainerState;
using containers::HashState;
using containers::SequenceState;

std::string_view termination_name(const Termination& t) {
  switch (t.index()) {
    case 0: return "finished";
    case 1: return "runtimeError";
    default: return "truncated";
  }
}

// ---------------------------------------------------------------------------
// Encoding

namespace {

Json span_json(const SourceSpan& s) {
  return Json{{"startLine", s.start_line},
              {"startCol", s.start_col},
              {"endLine", s.end_line},
              {"endCol", s.end_col}};
}

// Scalars inside containers are stored bare; their type comes from the
// container's declared key/element type.
Json raw_json(const Value& v) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, char>) {
          return static_cast<int>(static_cast<unsigned char>(x));
        } else if constexpr (std::is_same_v<T, ContainerRef>) {
          return x.id.value;
        } else {
          return x;
        }
      },
      v);
}

Json value_json(const Value& v) {
  std::string type = std::holds_alternative<ContainerRef>(v)
                         ? std::string("container")
                         : std::string(to_string(*scalar_type_of(v)));
  return Json{{"type", type}, {"value", raw_json(v)}};
}

Json optional_id(const std::optional<containers::NodeId>& id) {
  return id ? Json(*id) : Json(nullptr);
}

Json state_json(const ContainerState& s) {
  if (const auto* seq = std::get_if<SequenceState>(&s.payload)) {
    Json elems = Json::array();
    for (const auto& v : seq->elements) elems.push_back(raw_json(v));
    return Json{{"elements", std::move(elems)}};
  }
  if (const auto* bst = std::get_if<BstState>(&s.payload)) {
    Json nodes = Json::array();
    for (const auto& [id, n] : bst->nodes) {
      nodes.push_back(Json{{"id", n.id},
                           {"key", raw_json(n.key)},
                           {"value", raw_json(n.value)},
                           {"left", optional_id(n.left)},
                           {"right", optional_id(n.right)}});
    }
    return Json{{"root", optional_id(bst->root)},
                {"nextNodeId", bst->next_id},
                {"nodes", std::move(nodes)}};
  }
  const auto& hash = std::get<HashState>(s.payload);
  Json buckets = Json::array();
  for (const auto& chain : hash.buckets) {
    Json entries = Json::array();
    for (const auto& [k, v] : chain) {
      entries.push_back(Json{{"key", raw_json(k)}, {"value", raw_json(v)}});
    }
    buckets.push_back(std::move(entries));
  }
  return Json{{"buckets", std::move(buckets)}};
}

Json target_json(const containers::EventTarget& t) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, containers::IndexTarget>) {
          return Json{{"index", x.index}};
        } else if constexpr (std::is_same_v<T, containers::NodeTarget>) {
          return Json{{"node", x.node}};
        } else if constexpr (std::is_same_v<T, containers::BucketTarget>) {
          return Json{{"bucket", x.bucket}};
        } else {
          return Json{{"key", raw_json(x.key)}};
        }
      },
      t);
}

Json termination_json(const std::optional<Termination>& t) {
  if (!t) return nullptr;
  Json j{{"status", termination_name(*t)}};
  if (const auto* f = std::get_if<Finished>(&*t)) {
    j["exitValue"] = f->exit_value;
  } else if (const auto* e = std::get_if<RuntimeError>(&*t)) {
    j["kind"] = e->kind;
    j["message"] = e->message;
    j["span"] = span_json(e->span);
  }
  return j;
}

Json frame_json(const TraceFrame& f) {
  Json stacks = Json::array();
  for (const auto& fn : f.stacks) {
    Json scopes = Json::array();
    for (const auto& scope : fn.scopes) {
      Json vars = Json::array();
      for (const auto& b : scope) vars.push_back(Json{{"name", b.name}, {"value", value_json(b.value)}});
      scopes.push_back(std::move(vars));
    }
    stacks.push_back(Json{{"function", fn.function},
                          {"callSite", fn.call_site ? span_json(*fn.call_site) : Json(nullptr)},
                          {"active", fn.active},
                          {"scopes", std::move(scopes)}});
  }
  Json conts = Json::array();
  for (const auto& c : f.containers) {
    conts.push_back(Json{{"id", c.id.value},
                         {"name", c.name},
                         {"kind", to_string(c.state.kind)},
                         {"keyType", c.key_type ? Json(to_string(*c.key_type)) : Json(nullptr)},
                         {"elemType", to_string(c.elem_type)},
                         {"state", state_json(c.state)}});
  }
  Json events = Json::array();
  for (const auto& e : f.events) {
    events.push_back(Json{{"container", e.container.value},
                          {"kind", containers::to_string(e.kind)},
                          {"target", target_json(e.target)},
                          {"step", e.step}});
  }
  return Json{{"index", f.index},
              {"span", span_json(f.span)},
              {"explanation", f.explanation},
              {"stacks", std::move(stacks)},
              {"containers", std::move(conts)},
              {"events", std::move(events)},
              {"stdout", f.stdout_so_far},
              {"termination", termination_json(f.termination)}};
}

Json options_json(const InterpreterOptions& o) {
  return Json{{"maxFrames", o.max_frames},
              {"substeps", o.substeps},
              {"hashBuckets", o.hash_buckets},
              {"stdinText", o.stdin_text},
              {"streamChunk", o.stream_chunk ? Json(*o.stream_chunk) : Json(nullptr)},
              {"maxDepth", o.max_depth}};
}

std::string dump(const Json& j) {
  return j.dump(-1, ' ', false, nlohmann::detail::error_handler_t::replace);
}

}  // namespace

std::string serialize_frame(const TraceFrame& frame) { return dump(frame_json(frame)); }

std::string header_prefix(const TraceDocument& doc) {
  Json head{{"formatVersion", doc.format_version},
            {"source", doc.source_text},
            {"options", options_json(doc.options)}};
  std::string s = dump(head);
  s.pop_back();  // closing brace
  return s + ",\"frames\":[";
}

std::string serialize(const TraceDocument& doc) {
  std::string out = header_prefix(doc);
  for (std::size_t i = 0; i < doc.frames.size(); ++i) {
    if (i) out += ',';
    out += serialize_frame(doc.frames[i]);
  }
  out += kDocumentSuffix;
  return out;
}

// ---------------------------------------------------------------------------
// Decoding

namespace {

[[noreturn]] void violation(const std::string& path, const std::string& reason) {
  throw CgrError(CgrErrorKind::SchemaViolation, path, reason);
}

const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) violation(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) violation(path + "/" + key, "missing field");
  return *it;
}

const Json& array_field(const Json& j, const char* key, const std::string& path) {
  const Json& a = field(j, key, path);
  if (!a.is_array()) violation(path + "/" + key, "expected an array");
  return a;
}

std::string string_of(const Json& j, const std::string& path) {
  if (!j.is_string()) violation(path, "expected a string");
  return j.get<std::string>();
}

std::uint64_t unsigned_of(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    violation(path, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

std::int64_t integer_of(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) violation(path, "expected an integer");
  if (j.is_number_unsigned() &&
      j.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
    violation(path, "integer out of range");
  }
  return j.get<std::int64_t>();
}

int int_of(const Json& j, const std::string& path) {
  std::int64_t v = integer_of(j, path);
  if (v < INT32_MIN || v > INT32_MAX) violation(path, "integer out of range");
  return static_cast<int>(v);
}

bool bool_of(const Json& j, const std::string& path) {
  if (!j.is_boolean()) violation(path, "expected a boolean");
  return j.get<bool>();
}

SourceSpan span_of(const Json& j, const std::string& path) {
  return SourceSpan{int_of(field(j, "startLine", path), path + "/startLine"),
                    int_of(field(j, "startCol", path), path + "/startCol"),
                    int_of(field(j, "endLine", path), path + "/endLine"),
                    int_of(field(j, "endCol", path), path + "/endCol")};
}

ScalarType scalar_type_field(const Json& j, const std::string& path) {
  auto t = scalar_type_from_string(string_of(j, path));
  if (!t) violation(path, "unknown scalar type");
  return *t;
}

Value raw_value(const Json& j, ScalarType t, const std::string& path) {
  switch (t) {
    case ScalarType::Int: return integer_of(j, path);
    case ScalarType::Bool: return bool_of(j, path);
    case ScalarType::Char: {
      std::int64_t c = integer_of(j, path);
      if (c < 0 || c > 255) violation(path, "character code out of range");
      return static_cast<char>(static_cast<unsigned char>(c));
    }
    case ScalarType::Double:
      if (!j.is_number()) violation(path, "expected a number");
      return j.get<double>();
    case ScalarType::String: return string_of(j, path);
  }
  violation(path, "unknown scalar type");
}

Value value_of(const Json& j, const std::string& path) {
  std::string type = string_of(field(j, "type", path), path + "/type");
  const Json& v = field(j, "value", path);
  if (type == "container") return ContainerRef{ContainerId{unsigned_of(v, path + "/value")}};
  auto t = scalar_type_from_string(type);
  if (!t) violation(path + "/type", "unknown value type '" + type + "'");
  return raw_value(v, *t, path + "/value");
}

std::optional<containers::NodeId> optional_node(const Json& j, const std::string& path) {
  if (j.is_null()) return std::nullopt;
  return unsigned_of(j, path);
}

ContainerState state_of(const Json& j, ContainerKind kind, std::optional<ScalarType> key,
                        ScalarType elem, const std::string& path) {
  ContainerState s;
  s.kind = kind;
  if (!is_keyed(kind)) {
    SequenceState seq;
    const Json& elems = array_field(j, "elements", path);
    for (std::size_t i = 0; i < elems.size(); ++i) {
      seq.elements.push_back(raw_value(elems[i], elem, path + "/elements/" + std::to_string(i)));
    }
    s.payload = std::move(seq);
    return s;
  }
  if (!key) violation(path, "keyed container without a key type");
  if (kind == ContainerKind::BstMap) {
    BstState bst;
    bst.root = optional_node(field(j, "root", path), path + "/root");
    bst.next_id = unsigned_of(field(j, "nextNodeId", path), path + "/nextNodeId");
    const Json& nodes = array_field(j, "nodes", path);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      std::string p = path + "/nodes/" + std::to_string(i);
      BstNode n;
      n.id = unsigned_of(field(nodes[i], "id", p), p + "/id");
      n.key = raw_value(field(nodes[i], "key", p), *key, p + "/key");
      n.value = raw_value(field(nodes[i], "value", p), elem, p + "/value");
      n.left = optional_node(field(nodes[i], "left", p), p + "/left");
      n.right = optional_node(field(nodes[i], "right", p), p + "/right");
      if (!bst.nodes.emplace(n.id, n).second) violation(p + "/id", "duplicate node id");
    }
    s.payload = std::move(bst);
    return s;
  }
  const Json& buckets = array_field(j, "buckets", path);
  HashState hash(buckets.size());
  for (std::size_t b = 0; b < buckets.size(); ++b) {
    std::string bp = path + "/buckets/" + std::to_string(b);
    if (!buckets[b].is_array()) violation(bp, "expected an array");
    for (std::size_t i = 0; i < buckets[b].size(); ++i) {
      std::string p = bp + "/" + std::to_string(i);
      hash.buckets[b].emplace_back(raw_value(field(buckets[b][i], "key", p), *key, p + "/key"),
                                   raw_value(field(buckets[b][i], "value", p), elem, p + "/value"));
    }
  }
  s.payload = std::move(hash);
  return s;
}

containers::EventTarget target_of(const Json& j, const std::string& path) {
  if (!j.is_object() || j.size() != 1) violation(path, "expected a single-field target object");
  if (j.contains("index")) return containers::IndexTarget{unsigned_of(j["index"], path + "/index")};
  if (j.contains("node")) return containers::NodeTarget{unsigned_of(j["node"], path + "/node")};
  if (j.contains("bucket")) return containers::BucketTarget{unsigned_of(j["bucket"], path + "/bucket")};
  if (j.contains("key")) return containers::KeyTarget{Value{integer_of(j["key"], path + "/key")}};
  violation(path, "unknown target kind");
}

std::optional<Termination> termination_of(const Json& j, const std::string& path) {
  if (j.is_null()) return std::nullopt;
  std::string status = string_of(field(j, "status", path), path + "/status");
  if (status == "finished") return Finished{integer_of(field(j, "exitValue", path), path + "/exitValue")};
  if (status == "truncated") return Truncated{};
  if (status == "runtimeError") {
    return RuntimeError{string_of(field(j, "kind", path), path + "/kind"),
                        string_of(field(j, "message", path), path + "/message"),
                        span_of(field(j, "span", path), path + "/span")};
  }
  violation(path + "/status", "unknown termination status '" + status + "'");
}

TraceFrame frame_of(const Json& j, const std::string& path) {
  TraceFrame f;
  f.index = unsigned_of(field(j, "index", path), path + "/index");
  f.span = span_of(field(j, "span", path), path + "/span");
  f.explanation = string_of(field(j, "explanation", path), path + "/explanation");

  const Json& stacks = array_field(j, "stacks", path);
  for (std::size_t i = 0; i < stacks.size(); ++i) {
    std::string p = path + "/stacks/" + std::to_string(i);
    FunctionFrame fn;
    fn.function = string_of(field(stacks[i], "function", p), p + "/function");
    const Json& cs = field(stacks[i], "callSite", p);
    if (!cs.is_null()) fn.call_site = span_of(cs, p + "/callSite");
    fn.active = bool_of(field(stacks[i], "active", p), p + "/active");
    const Json& scopes = array_field(stacks[i], "scopes", p);
    for (std::size_t s = 0; s < scopes.size(); ++s) {
      std::string sp = p + "/scopes/" + std::to_string(s);
      if (!scopes[s].is_array()) violation(sp, "expected an array");
      ScopeBlock block;
      for (std::size_t v = 0; v < scopes[s].size(); ++v) {
        std::string vp = sp + "/" + std::to_string(v);
        block.push_back(Binding{string_of(field(scopes[s][v], "name", vp), vp + "/name"),
                                value_of(field(scopes[s][v], "value", vp), vp + "/value")});
      }
      fn.scopes.push_back(std::move(block));
    }
    f.stacks.push_back(std::move(fn));
  }

  const Json& conts = array_field(j, "containers", path);
  for (std::size_t i = 0; i < conts.size(); ++i) {
    std::string p = path + "/containers/" + std::to_string(i);
    ContainerSnapshot c;
    c.id = ContainerId{unsigned_of(field(conts[i], "id", p), p + "/id")};
    c.name = string_of(field(conts[i], "name", p), p + "/name");
    auto kind = container_kind_from_string(string_of(field(conts[i], "kind", p), p + "/kind"));
    if (!kind) violation(p + "/kind", "unknown container kind");
    const Json& kt = field(conts[i], "keyType", p);
    if (!kt.is_null()) c.key_type = scalar_type_field(kt, p + "/keyType");
    c.elem_type = scalar_type_field(field(conts[i], "elemType", p), p + "/elemType");
    c.state = state_of(field(conts[i], "state", p), *kind, c.key_type, c.elem_type, p + "/state");
    f.containers.push_back(std::move(c));
  }

  const Json& events = array_field(j, "events", path);
  for (std::size_t i = 0; i < events.size(); ++i) {
    std::string p = path + "/events/" + std::to_string(i);
    AccessEvent e;
    e.container = ContainerId{unsigned_of(field(events[i], "container", p), p + "/container")};
    auto kind = containers::event_kind_from_string(string_of(field(events[i], "kind", p), p + "/kind"));
    if (!kind) violation(p + "/kind", "unknown event kind");
    e.kind = *kind;
    e.target = target_of(field(events[i], "target", p), p + "/target");
    std::uint64_t step = unsigned_of(field(events[i], "step", p), p + "/step");
    if (step > UINT32_MAX) violation(p + "/step", "step out of range");
    e.step = static_cast<std::uint32_t>(step);
    f.events.push_back(std::move(e));
  }

  f.stdout_so_far = string_of(field(j, "stdout", path), path + "/stdout");
  f.termination = termination_of(field(j, "termination", path), path + "/termination");
  return f;
}

InterpreterOptions options_of(const Json& j, const std::string& path) {
  InterpreterOptions o;
  o.max_frames = unsigned_of(field(j, "maxFrames", path), path + "/maxFrames");
  o.substeps = bool_of(field(j, "substeps", path), path + "/substeps");
  o.hash_buckets = unsigned_of(field(j, "hashBuckets", path), path + "/hashBuckets");
  o.stdin_text = string_of(field(j, "stdinText", path), path + "/stdinText");
  const Json& chunk = field(j, "streamChunk", path);
  if (!chunk.is_null()) o.stream_chunk = unsigned_of(chunk, path + "/streamChunk");
  o.max_depth = unsigned_of(field(j, "maxDepth", path), path + "/maxDepth");
  return o;
}

}  // namespace

TraceDocument deserialize(std::string_view bytes) {
  Json j = Json::parse(bytes, nullptr, false);
  if (j.is_discarded()) violation("", "not well-formed JSON");
  if (!j.is_object()) violation("", "expected an object");

  std::string version = string_of(field(j, "formatVersion", ""), "/formatVersion");
  int major = -1;
  try {
    std::size_t used = 0;
    major = std::stoi(version, &used);
    if (used == 0 || (used < version.size() && version[used] != '.')) major = -1;
  } catch (const std::exception&) {
    major = -1;
  }
  if (major != kFormatMajor) {
    throw CgrError(CgrErrorKind::VersionMismatch, "/formatVersion",
                   "found '" + version + "', supported '" + std::string(kFormatVersion) + "'");
  }

  TraceDocument doc;
  doc.format_version = version;
  doc.source_text = string_of(field(j, "source", ""), "/source");
  doc.options = options_of(field(j, "options", ""), "/options");
  const Json& frames = array_field(j, "frames", "");
  if (frames.empty()) violation("/frames", "a trace must contain at least one frame");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    doc.frames.push_back(frame_of(frames[i], "/frames/" + std::to_string(i)));
  }
  return doc;
}

}  // namespace stepviz::cgr

// ---------------------------------------------------------------------------
// Validation

namespace stepviz::cgr {

namespace {

class DocumentChecker {
 public:
  explicit DocumentChecker(const TraceDocument& doc) : doc_(doc) {
    std::size_t len = 0;
    for (char c : doc.source_text) {
      if (c == '\n') {
        line_lengths_.push_back(len);
        len = 0;
      } else {
        ++len;
      }
    }
    line_lengths_.push_back(len);
  }

  Diagnostics run() {
    if (doc_.frames.empty()) {
      fail("EmptyDocument", "a trace must contain at least one frame", {});
      return std::move(diags_);
    }
    check_version();
    check_options();
    for (std::size_t i = 0; i < doc_.frames.size(); ++i) check_frame(i);
    for (std::size_t i = 1; i < doc_.frames.size(); ++i) {
      check_nesting(doc_.frames[i - 1], doc_.frames[i], i);
    }
    return std::move(diags_);
  }

 private:
  void fail(const char* kind, std::string message, SourceSpan span) {
    diags_.push_back(Diagnostic{Severity::Error, kind, std::move(message), span});
  }

  static std::string at(std::size_t frame) { return "/frames/" + std::to_string(frame); }

  bool span_in_bounds(const SourceSpan& s) const {
    int lines = static_cast<int>(line_lengths_.size());
    if (s.start_line < 1 || s.end_line > lines || s.start_col < 1 || s.end_col < 1) return false;
    if (s.start_line > s.end_line || (s.start_line == s.end_line && s.start_col > s.end_col)) {
      return false;
    }
    // One column past the end of a line is allowed (a span may end at the newline).
    auto limit = [&](int line) { return static_cast<int>(line_lengths_[line - 1]) + 1; };
    return s.start_col <= limit(s.start_line) && s.end_col <= limit(s.end_line);
  }

  void check_version() {
    const std::string& v = doc_.format_version;
    std::size_t dot = v.find('.');
    if (v.substr(0, dot) != std::to_string(kFormatMajor)) {
      fail("VersionMismatch",
           "found '" + v + "', supported '" + std::string(kFormatVersion) + "'", {});
    }
  }

  void check_options() {
    const auto& o = doc_.options;
    if (o.max_frames < 2) fail("InvalidOptions", "/options/maxFrames must be at least 2", {});
    if (o.hash_buckets < 1) fail("InvalidOptions", "/options/hashBuckets must be at least 1", {});
    if (o.stream_chunk && *o.stream_chunk < 1) {
      fail("InvalidOptions", "/options/streamChunk must be at least 1", {});
    }
    if (doc_.frames.size() > o.max_frames) {
      fail("FrameLimitExceeded",
           std::to_string(doc_.frames.size()) + " frames exceed maxFrames " +
               std::to_string(o.max_frames),
           {});
    }
  }

  void check_value_type(const Value& v, ScalarType want, const std::string& where,
                        const SourceSpan& span) {
    if (scalar_type_of(v) != want) {
      fail("ElementTypeMismatch", where + " does not hold a " + std::string(to_string(want)),
           span);
    }
  }

  void check_frame(std::size_t i) {
    const TraceFrame& f = doc_.frames[i];
    std::string p = at(i);
    if (f.index != i) {
      fail("ContiguityViolation",
           p + "/index is " + std::to_string(f.index) + ", expected " + std::to_string(i), f.span);
    }
    if (!span_in_bounds(f.span)) {
      fail("SpanOutOfRange", p + "/span " + f.span.to_string() + " lies outside the source", {});
    }
    if (f.termination.has_value() != (i + 1 == doc_.frames.size())) {
      fail("TerminationPlacement",
           f.termination ? p + " carries a termination but is not the last frame"
                         : p + " is the last frame but carries no termination",
           f.span);
    }
    if (f.termination) {
      if (const auto* e = std::get_if<RuntimeError>(&*f.termination);
          e && !span_in_bounds(e->span)) {
        fail("SpanOutOfRange", p + "/termination/span lies outside the source", f.span);
      }
    }

    // Exactly one active function frame, the innermost.
    for (std::size_t k = 0; k < f.stacks.size(); ++k) {
      bool should = k + 1 == f.stacks.size();
      if (f.stacks[k].active != should) {
        fail("ActiveFrameViolation",
             p + "/stacks/" + std::to_string(k) +
                 (should ? " is the innermost frame but is not active" : " is active but not innermost"),
             f.span);
      }
      if (f.stacks[k].scopes.empty()) {
        fail("ScopeNestingViolation", p + "/stacks/" + std::to_string(k) + " has no scope", f.span);
      }
      if (f.stacks[k].call_site && !span_in_bounds(*f.stacks[k].call_site)) {
        fail("SpanOutOfRange", p + "/stacks/" + std::to_string(k) + "/callSite lies outside the source",
             f.span);
      }
    }

    // Containers: unique ascending ids, typed contents, structural invariants.
    for (std::size_t k = 0; k < f.containers.size(); ++k) {
      const auto& c = f.containers[k];
      std::string cp = p + "/containers/" + std::to_string(k);
      if (k > 0 && !(f.containers[k - 1].id < c.id)) {
        fail("ContainerOrder", cp + " is out of id order or duplicated", f.span);
      }
      if (is_keyed(c.state.kind) != c.key_type.has_value()) {
        fail("ElementTypeMismatch", cp + "/keyType does not match the container kind", f.span);
      }
      check_contents(c, cp, f.span);
      if (auto why = containers::check_invariants(c.state)) {
        fail("ContainerInvariant", cp + ": " + *why, f.span);
      }
      if (const auto* h = std::get_if<containers::HashState>(&c.state.payload);
          h && h->buckets.size() != doc_.options.hash_buckets) {
        fail("ContainerInvariant",
             cp + " has " + std::to_string(h->buckets.size()) + " buckets, expected " +
                 std::to_string(doc_.options.hash_buckets),
             f.span);
      }
    }

    // Container references from variables.
    for (std::size_t k = 0; k < f.stacks.size(); ++k) {
      for (const auto& scope : f.stacks[k].scopes) {
        for (const auto& b : scope) {
          if (const auto* ref = std::get_if<ContainerRef>(&b.value); ref && !find(f, ref->id)) {
            fail("DanglingContainerRef",
                 p + ": variable " + b.name + " refers to missing container " +
                     std::to_string(ref->id.value),
                 f.span);
          }
        }
      }
    }

    for (std::size_t k = 0; k < f.events.size(); ++k) {
      const auto& e = f.events[k];
      const ContainerSnapshot* c = find(f, e.container);
      if (!c || !containers::target_exists(c->state, e.target)) {
        fail("DanglingEventTarget",
             p + "/events/" + std::to_string(k) + " targets something absent from container " +
                 std::to_string(e.container.value),
             f.span);
      }
    }
  }

  void check_contents(const ContainerSnapshot& c, const std::string& cp, const SourceSpan& span) {
    if (const auto* seq = std::get_if<containers::SequenceState>(&c.state.payload)) {
      for (std::size_t i = 0; i < seq->elements.size(); ++i) {
        check_value_type(seq->elements[i], c.elem_type, cp + " element " + std::to_string(i), span);
      }
    } else if (const auto* bst = std::get_if<containers::BstState>(&c.state.payload)) {
      for (const auto& [id, n] : bst->nodes) {
        if (c.key_type) check_value_type(n.key, *c.key_type, cp + " node " + std::to_string(id), span);
        check_value_type(n.value, c.elem_type, cp + " node " + std::to_string(id), span);
      }
    } else if (const auto* h = std::get_if<containers::HashState>(&c.state.payload)) {
      for (const auto& chain : h->buckets) {
        for (const auto& [k, v] : chain) {
          if (c.key_type) check_value_type(k, *c.key_type, cp + " entry", span);
          check_value_type(v, c.elem_type, cp + " entry", span);
        }
      }
    }
  }

  static const ContainerSnapshot* find(const TraceFrame& f, ContainerId id) {
    for (const auto& c : f.containers) {
      if (c.id == id) return &c;
    }
    return nullptr;
  }

  // The stack flattened outermost-first into function marks and scopes.
  struct Entry {
    bool is_mark = false;
    std::string function;
    std::optional<SourceSpan> call_site;
    std::vector<std::string> names;
  };

  static std::vector<Entry> flatten(const TraceFrame& f) {
    std::vector<Entry> out;
    for (const auto& fn : f.stacks) {
      out.push_back(Entry{true, fn.function, fn.call_site, {}});
      for (const auto& scope : fn.scopes) {
        Entry e;
        for (const auto& b : scope) e.names.push_back(b.name);
        out.push_back(std::move(e));
      }
    }
    return out;
  }

  // A surviving scope may only have gained bindings at its end.
  static bool compatible(const Entry& a, const Entry& b) {
    if (a.is_mark != b.is_mark) return false;
    if (a.is_mark) return a.function == b.function && a.call_site == b.call_site;
    if (a.names.size() > b.names.size()) return false;
    return std::equal(a.names.begin(), a.names.end(), b.names.begin());
  }

  // Between consecutive frames the stack may pop any number of scopes and
  // function frames, then push scopes, optionally under one fresh call.
  // The parameter scope of a call lives as long as the call.
  void check_nesting(const TraceFrame& prev, const TraceFrame& next, std::size_t i) {
    auto a = flatten(prev);
    auto b = flatten(next);
    std::size_t k = 0;
    while (k < a.size() && k < b.size() && compatible(a[k], b[k])) ++k;
    // A surviving call keeps its outermost scope.
    bool ok = !(k > 0 && a[k - 1].is_mark && k < a.size() && k < b.size());
    if (k < b.size() && b[k].is_mark) {
      ok = k + 1 < b.size();
      ++k;
    }
    for (; k < b.size(); ++k) ok = ok && !b[k].is_mark;
    if (!ok) {
      fail("ScopeNestingViolation",
           at(i) + " does not nest with frame " + std::to_string(i - 1), next.span);
    }
  }

  const TraceDocument& doc_;
  std::vector<std::size_t> line_lengths_;
  Diagnostics diags_;
};

}  // namespace

Diagnostics validate_document(const TraceDocument& doc) { return DocumentChecker(doc).run(); }

TraceDocument window(const TraceDocument& doc, std::size_t from, std::size_t to) {
  if (from > to || to >= doc.frames.size()) {
    throw RangeError("window [" + std::to_string(from) + ", " + std::to_string(to) +
                     "] outside a trace of " + std::to_string(doc.frames.size()) + " frames");
  }
  TraceDocument out;
  out.format_version = std::string(kFormatVersion);
  out.source_text = doc.source_text;
  out.options = doc.options;
  out.frames.assign(doc.frames.begin() + static_cast<std::ptrdiff_t>(from),
                    doc.frames.begin() + static_cast<std::ptrdiff_t>(to) + 1);
  for (std::size_t i = 0; i < out.frames.size(); ++i) out.frames[i].index = i;
  if (!out.frames.back().termination) out.frames.back().termination = Truncated{};
  return out;
}

bool peek_usage(const TraceDocument& doc, ContainerId container, std::size_t from,
                std::size_t horizon) {
  if (from >= doc.frames.size()) {
    throw RangeError("frame " + std::to_string(from) + " outside a trace of " +
                     std::to_string(doc.frames.size()) + " frames");
  }
  std::size_t end = std::min(doc.frames.size(), from + std::min(horizon, doc.frames.size()));
  for (std::size_t i = from; i < end; ++i) {
    for (const auto& e : doc.frames[i].events) {
      if (e.container == container) return true;
    }
  }
  return false;
}

}  // namespace stepviz::cgr
