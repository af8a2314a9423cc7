#pragma once

// Instrumented models of the supported data structures. Every operation
// mutates the state and reports the element-level accesses it performed, in
// order, through an EventSink. The sink is invoked at the exact moment of the
// access: reads and writes after the location holds its new content, deletes
// while the doomed element is still present.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "stepviz/value.hpp"

namespace stepviz::containers {

using NodeId = std::uint64_t;

enum class EventKind { Read, Write, Delete };

std::string_view to_string(EventKind k);
std::optional<EventKind> event_kind_from_string(std::string_view s);

struct IndexTarget {
  std::size_t index;
  bool operator==(const IndexTarget&) const = default;
};
struct NodeTarget {
  NodeId node;
  bool operator==(const NodeTarget&) const = default;
};
struct BucketTarget {
  std::size_t bucket;
  bool operator==(const BucketTarget&) const = default;
};
// A hash-map entry, identified by its (unique) key.
struct KeyTarget {
  Value key;
  bool operator==(const KeyTarget&) const = default;
};

using EventTarget = std::variant<IndexTarget, NodeTarget, BucketTarget, KeyTarget>;

struct AccessEvent {
  ContainerId container;
  EventTarget target;
  EventKind kind = EventKind::Read;
  std::uint32_t step = 0;  // position within the logical operation

  bool operator==(const AccessEvent&) const = default;
};

using EventSink = std::function<void(const AccessEvent&)>;

// Numbers events of one logical operation and forwards them.
class Recorder {
 public:
  Recorder(ContainerId id, EventSink sink) : id_(id), sink_(std::move(sink)) {}

  void read(EventTarget t) { emit(std::move(t), EventKind::Read); }
  void write(EventTarget t) { emit(std::move(t), EventKind::Write); }
  void remove(EventTarget t) { emit(std::move(t), EventKind::Delete); }

 private:
  void emit(EventTarget t, EventKind k) {
    if (sink_) sink_(AccessEvent{id_, std::move(t), k, step_});
    ++step_;
  }

  ContainerId id_;
  EventSink sink_;
  std::uint32_t step_ = 0;
};

enum class ContainerErrorKind { IndexOutOfBounds, EmptyContainer };

class ContainerError : public std::runtime_error {
 public:
  ContainerError(ContainerErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  ContainerErrorKind kind() const { return kind_; }
  std::string_view kind_name() const {
    return kind_ == ContainerErrorKind::IndexOutOfBounds ? "IndexOutOfBounds" : "EmptyContainer";
  }

 private:
  ContainerErrorKind kind_;
};

// ---------------------------------------------------------------------------
// Sequences: vector, stack (top last), queue and deque (front first).

struct SequenceState {
  std::vector<Value> elements;
  bool operator==(const SequenceState&) const = default;
};

Value index_get(const SequenceState& s, std::int64_t i, Recorder& rec);
void index_set(SequenceState& s, std::int64_t i, Value v, Recorder& rec);
void push_back(SequenceState& s, Value v, Recorder& rec);
void push_front(SequenceState& s, Value v, Recorder& rec);
Value pop_back(SequenceState& s, Recorder& rec);
Value pop_front(SequenceState& s, Recorder& rec);
Value peek_back(const SequenceState& s, Recorder& rec);
Value peek_front(const SequenceState& s, Recorder& rec);

// ---------------------------------------------------------------------------
// Unbalanced binary search tree backing `map`.

struct BstNode {
  NodeId id = 0;
  Value key;
  Value value;
  std::optional<NodeId> left;
  std::optional<NodeId> right;
  bool operator==(const BstNode&) const = default;
};

struct BstState {
  std::optional<NodeId> root;
  std::map<NodeId, BstNode> nodes;  // ordered by id
  NodeId next_id = 1;
  bool operator==(const BstState&) const = default;

  std::vector<Value> keys_in_order() const;
  std::size_t size() const { return nodes.size(); }
};

// Lookup along the search path; every compared node is read.
std::optional<Value> bst_find(const BstState& s, const Value& key, Recorder& rec);
// Insert-or-assign when `overwrite`, insert-if-absent otherwise. Returns true
// if a new node was created.
bool bst_insert(BstState& s, const Value& key, Value value, bool overwrite, Recorder& rec);
// `m[key]` as an rvalue: creates a default-valued node when absent.
Value bst_index(BstState& s, const Value& key, const Value& fallback, Recorder& rec);
// Successor-replacement delete. Returns the number of nodes removed.
std::size_t bst_erase(BstState& s, const Value& key, Recorder& rec);

// ---------------------------------------------------------------------------
// Separate-chaining hash table backing `unordered_map` (int keys).

struct HashState {
  std::vector<std::vector<std::pair<Value, Value>>> buckets;
  bool operator==(const HashState&) const = default;

  explicit HashState(std::size_t bucket_count = 6) : buckets(bucket_count) {}
  std::size_t size() const;
};

std::size_t bucket_of(std::int64_t key, std::size_t bucket_count);

std::optional<Value> hash_find(const HashState& s, const Value& key, Recorder& rec);
bool hash_insert(HashState& s, const Value& key, Value value, bool overwrite, Recorder& rec);
Value hash_index(HashState& s, const Value& key, const Value& fallback, Recorder& rec);
std::size_t hash_erase(HashState& s, const Value& key, Recorder& rec);

// ---------------------------------------------------------------------------

using Payload = std::variant<SequenceState, BstState, HashState>;

struct ContainerState {
  ContainerKind kind = ContainerKind::Vector;
  Payload payload;
  bool operator==(const ContainerState&) const = default;

  std::size_t size() const;
  static ContainerState make(ContainerKind kind, std::size_t hash_buckets = 6);
};

// Deep, independent copy suitable for embedding in a trace frame.
inline ContainerState container_snapshot(const ContainerState& s) { return s; }

// True if the target names something currently present in the state.
bool target_exists(const ContainerState& s, const EventTarget& t);

// Checks the kind-specific structural invariants (search-tree order, bucket
// residency, reachability). Returns a description of the first violation.
std::optional<std::string> check_invariants(const ContainerState& s);

// ---------------------------------------------------------------------------
// Value-returning forms: take a state, return the successor state and the
// events, leaving the argument untouched.

template <typename State, typename R = std::monostate>
struct Outcome {
  State state;
  std::vector<AccessEvent> events;
  R result{};
};

Outcome<SequenceState, Value> vector_index_get(const SequenceState& s, std::int64_t i,
                                               ContainerId id = {});
Outcome<BstState, bool> bst_insert(BstState s, const Value& key, Value value,
                                   ContainerId id = {});
Outcome<BstState, std::size_t> bst_erase(BstState s, const Value& key, ContainerId id = {});
Outcome<HashState, bool> hash_insert(HashState s, const Value& key, Value value,
                                     ContainerId id = {});

}  // namespace stepviz::containers
