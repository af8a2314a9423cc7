#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace stepviz {

enum class ScalarType { Int, Bool, Char, Double, String };

enum class ContainerKind { Vector, Stack, Queue, Deque, BstMap, HashMap };

std::string_view to_string(ScalarType t);
std::string_view to_string(ContainerKind k);
std::optional<ScalarType> scalar_type_from_string(std::string_view s);
std::optional<ContainerKind> container_kind_from_string(std::string_view s);

// Surface spelling of the kind, e.g. "map" for BstMap.
std::string_view source_name(ContainerKind k);

inline bool is_keyed(ContainerKind k) {
  return k == ContainerKind::BstMap || k == ContainerKind::HashMap;
}

// Opaque per-run container identity; stable across frames.
struct ContainerId {
  std::uint64_t value = 0;
  auto operator<=>(const ContainerId&) const = default;
};

struct ContainerRef {
  ContainerId id;
  auto operator<=>(const ContainerRef&) const = default;
};

// Runtime value held by a variable or stored in a container. Containers only
// ever hold the scalar alternatives.
using Value =
    std::variant<std::int64_t, bool, char, double, std::string, ContainerRef>;

std::optional<ScalarType> scalar_type_of(const Value& v);
bool is_scalar(const Value& v);

// Zero value used for default-initialised variables and new map slots.
Value default_value(ScalarType t);

// Rendering used in explanations: strings quoted, chars in single quotes,
// doubles in shortest round-trip form, bools as true/false.
std::string display(const Value& v);

// Rendering used by the print statement; mirrors an ostream with default
// flags (bools as 1/0, doubles with six significant digits).
std::string stream_text(const Value& v);

// Shortest round-trip decimal form of a double.
std::string format_double(double d);

// Strict weak order used by the BST map; only meaningful for values of the
// same scalar type.
bool key_less(const Value& a, const Value& b);

}  // namespace stepviz
