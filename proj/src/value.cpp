#include "stepviz/value.hpp"

#include <array>
#include <charconv>
#include <sstream>

namespace stepviz {

namespace {

constexpr std::array<std::string_view, 5> kScalarNames = {
    "int", "bool", "char", "double", "string"};
constexpr std::array<std::string_view, 6> kKindNames = {
    "vector", "stack", "queue", "deque", "bstMap", "hashMap"};
constexpr std::array<std::string_view, 6> kKindSourceNames = {
    "vector", "stack", "queue", "deque", "map", "unordered_map"};

}  // namespace

std::string_view to_string(ScalarType t) {
  return kScalarNames[static_cast<std::size_t>(t)];
}

std::string_view to_string(ContainerKind k) {
  return kKindNames[static_cast<std::size_t>(k)];
}

std::string_view source_name(ContainerKind k) {
  return kKindSourceNames[static_cast<std::size_t>(k)];
}

std::optional<ScalarType> scalar_type_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kScalarNames.size(); ++i) {
    if (kScalarNames[i] == s) return static_cast<ScalarType>(i);
  }
  return std::nullopt;
}

std::optional<ContainerKind> container_kind_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == s) return static_cast<ContainerKind>(i);
  }
  return std::nullopt;
}

std::optional<ScalarType> scalar_type_of(const Value& v) {
  switch (v.index()) {
    case 0: return ScalarType::Int;
    case 1: return ScalarType::Bool;
    case 2: return ScalarType::Char;
    case 3: return ScalarType::Double;
    case 4: return ScalarType::String;
    default: return std::nullopt;
  }
}

bool is_scalar(const Value& v) { return !std::holds_alternative<ContainerRef>(v); }

Value default_value(ScalarType t) {
  switch (t) {
    case ScalarType::Int: return std::int64_t{0};
    case ScalarType::Bool: return false;
    case ScalarType::Char: return '\0';
    case ScalarType::Double: return 0.0;
    case ScalarType::String: return std::string{};
  }
  return std::int64_t{0};
}

std::string format_double(double d) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), d);
  std::string s(buf.data(), end);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

namespace {

std::string escape_char(char c) {
  switch (c) {
    case '\n': return "\\n";
    case '\t': return "\\t";
    case '\0': return "\\0";
    case '\\': return "\\\\";
    case '\'': return "\\'";
    case '"': return "\\\"";
    default: return std::string(1, c);
  }
}

}  // namespace

std::string display(const Value& v) {
  struct Visitor {
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(char c) const { return "'" + escape_char(c) + "'"; }
    std::string operator()(double d) const { return format_double(d); }
    std::string operator()(const std::string& s) const {
      std::string out = "\"";
      for (char c : s) out += c == '\'' ? std::string("'") : escape_char(c);
      return out + "\"";
    }
    std::string operator()(ContainerRef r) const {
      return "<container " + std::to_string(r.id.value) + ">";
    }
  };
  return std::visit(Visitor{}, v);
}

std::string stream_text(const Value& v) {
  std::ostringstream out;
  std::visit(
      [&out](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ContainerRef>) {
          out << "<container " << x.id.value << ">";
        } else {
          out << x;
        }
      },
      v);
  return out.str();
}

bool key_less(const Value& a, const Value& b) { return a < b; }

}  // namespace stepviz
