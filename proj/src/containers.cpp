#include "stepviz/containers.hpp"

#include <set>

namespace stepviz::containers {

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::Read: return "read";
    case EventKind::Write: return "write";
    case EventKind::Delete: return "delete";
  }
  return "read";
}

std::optional<EventKind> event_kind_from_string(std::string_view s) {
  if (s == "read") return EventKind::Read;
  if (s == "write") return EventKind::Write;
  if (s == "delete") return EventKind::Delete;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Sequences

namespace {

std::size_t checked_index(const SequenceState& s, std::int64_t i) {
  if (i < 0 || static_cast<std::uint64_t>(i) >= s.elements.size()) {
    throw ContainerError(ContainerErrorKind::IndexOutOfBounds,
                         "index " + std::to_string(i) + " is out of range for size " +
                             std::to_string(s.elements.size()));
  }
  return static_cast<std::size_t>(i);
}

void require_nonempty(const SequenceState& s) {
  if (s.elements.empty()) {
    throw ContainerError(ContainerErrorKind::EmptyContainer, "container is empty");
  }
}

}  // namespace

Value index_get(const SequenceState& s, std::int64_t i, Recorder& rec) {
  std::size_t at = checked_index(s, i);
  rec.read(IndexTarget{at});
  return s.elements[at];
}

void index_set(SequenceState& s, std::int64_t i, Value v, Recorder& rec) {
  std::size_t at = checked_index(s, i);
  s.elements[at] = std::move(v);
  rec.write(IndexTarget{at});
}

void push_back(SequenceState& s, Value v, Recorder& rec) {
  s.elements.push_back(std::move(v));
  rec.write(IndexTarget{s.elements.size() - 1});
}

void push_front(SequenceState& s, Value v, Recorder& rec) {
  s.elements.insert(s.elements.begin(), std::move(v));
  rec.write(IndexTarget{0});
}

Value pop_back(SequenceState& s, Recorder& rec) {
  require_nonempty(s);
  rec.remove(IndexTarget{s.elements.size() - 1});
  Value v = std::move(s.elements.back());
  s.elements.pop_back();
  return v;
}

Value pop_front(SequenceState& s, Recorder& rec) {
  require_nonempty(s);
  rec.remove(IndexTarget{0});
  Value v = std::move(s.elements.front());
  s.elements.erase(s.elements.begin());
  return v;
}

Value peek_back(const SequenceState& s, Recorder& rec) {
  require_nonempty(s);
  rec.read(IndexTarget{s.elements.size() - 1});
  return s.elements.back();
}

Value peek_front(const SequenceState& s, Recorder& rec) {
  require_nonempty(s);
  rec.read(IndexTarget{0});
  return s.elements.front();
}

// ---------------------------------------------------------------------------
// Binary search tree

std::vector<Value> BstState::keys_in_order() const {
  std::vector<Value> out;
  std::vector<NodeId> stack;
  std::optional<NodeId> cur = root;
  while (cur || !stack.empty()) {
    while (cur) {
      stack.push_back(*cur);
      cur = nodes.at(*cur).left;
    }
    const BstNode& n = nodes.at(stack.back());
    stack.pop_back();
    out.push_back(n.key);
    cur = n.right;
  }
  return out;
}

namespace {

NodeId new_node(BstState& s, const Value& key, Value value) {
  NodeId id = s.next_id++;
  s.nodes.emplace(id, BstNode{id, key, std::move(value), std::nullopt, std::nullopt});
  return id;
}

}  // namespace

std::optional<Value> bst_find(const BstState& s, const Value& key, Recorder& rec) {
  std::optional<NodeId> cur = s.root;
  while (cur) {
    const BstNode& n = s.nodes.at(*cur);
    rec.read(NodeTarget{n.id});
    if (key == n.key) return n.value;
    cur = key_less(key, n.key) ? n.left : n.right;
  }
  return std::nullopt;
}

bool bst_insert(BstState& s, const Value& key, Value value, bool overwrite, Recorder& rec) {
  if (!s.root) {
    s.root = new_node(s, key, std::move(value));
    rec.write(NodeTarget{*s.root});
    return true;
  }
  NodeId cur = *s.root;
  while (true) {
    BstNode& n = s.nodes.at(cur);
    rec.read(NodeTarget{cur});
    if (key == n.key) {
      if (overwrite) {
        n.value = std::move(value);
        rec.write(NodeTarget{cur});
      }
      return false;
    }
    bool left = key_less(key, n.key);
    std::optional<NodeId> next = left ? n.left : n.right;
    if (!next) {
      NodeId id = new_node(s, key, std::move(value));
      (left ? n.left : n.right) = id;
      rec.write(NodeTarget{id});
      return true;
    }
    cur = *next;
  }
}

Value bst_index(BstState& s, const Value& key, const Value& fallback, Recorder& rec) {
  if (!s.root) {
    s.root = new_node(s, key, fallback);
    rec.write(NodeTarget{*s.root});
    return fallback;
  }
  NodeId cur = *s.root;
  while (true) {
    const BstNode& n = s.nodes.at(cur);
    rec.read(NodeTarget{cur});
    if (key == n.key) return n.value;
    bool left = key_less(key, n.key);
    std::optional<NodeId> next = left ? n.left : n.right;
    if (!next) {
      NodeId id = new_node(s, key, fallback);
      BstNode& parent = s.nodes.at(cur);
      (left ? parent.left : parent.right) = id;
      rec.write(NodeTarget{id});
      return fallback;
    }
    cur = *next;
  }
}

std::size_t bst_erase(BstState& s, const Value& key, Recorder& rec) {
  std::optional<NodeId> parent;
  std::optional<NodeId> cur = s.root;
  while (cur) {
    const BstNode& n = s.nodes.at(*cur);
    rec.read(NodeTarget{n.id});
    if (key == n.key) break;
    parent = cur;
    cur = key_less(key, n.key) ? n.left : n.right;
  }
  if (!cur) return 0;

  const NodeId target = *cur;
  BstNode& z = s.nodes.at(target);
  if (z.left && z.right) {
    // Two children: the in-order successor gives up its entry and is removed
    // in place of the target.
    NodeId succ_parent = target;
    NodeId succ = *z.right;
    rec.read(NodeTarget{succ});
    while (s.nodes.at(succ).left) {
      succ_parent = succ;
      succ = *s.nodes.at(succ).left;
      rec.read(NodeTarget{succ});
    }
    rec.remove(NodeTarget{succ});
    BstNode successor = std::move(s.nodes.at(succ));
    s.nodes.erase(succ);
    BstNode& zz = s.nodes.at(target);
    zz.key = std::move(successor.key);
    zz.value = std::move(successor.value);
    if (succ_parent == target) {
      zz.right = successor.right;
    } else {
      s.nodes.at(succ_parent).left = successor.right;
    }
    rec.write(NodeTarget{target});
    if (succ_parent != target) rec.write(NodeTarget{succ_parent});
    return 1;
  }

  rec.remove(NodeTarget{target});
  std::optional<NodeId> child = z.left ? z.left : z.right;
  s.nodes.erase(target);
  if (!parent) {
    s.root = child;
    return 1;
  }
  BstNode& p = s.nodes.at(*parent);
  (p.left == target ? p.left : p.right) = child;
  rec.write(NodeTarget{*parent});
  return 1;
}

// ---------------------------------------------------------------------------
// Hash table

std::size_t HashState::size() const {
  std::size_t n = 0;
  for (const auto& b : buckets) n += b.size();
  return n;
}

std::size_t bucket_of(std::int64_t key, std::size_t bucket_count) {
  const auto b = static_cast<std::int64_t>(bucket_count);
  return static_cast<std::size_t>(((key % b) + b) % b);
}

namespace {

std::size_t bucket_for(const HashState& s, const Value& key) {
  return bucket_of(std::get<std::int64_t>(key), s.buckets.size());
}

}  // namespace

std::optional<Value> hash_find(const HashState& s, const Value& key, Recorder& rec) {
  std::size_t b = bucket_for(s, key);
  rec.read(BucketTarget{b});
  for (const auto& [k, v] : s.buckets[b]) {
    rec.read(KeyTarget{k});
    if (k == key) return v;
  }
  return std::nullopt;
}

bool hash_insert(HashState& s, const Value& key, Value value, bool overwrite, Recorder& rec) {
  std::size_t b = bucket_for(s, key);
  rec.read(BucketTarget{b});
  for (auto& [k, v] : s.buckets[b]) {
    rec.read(KeyTarget{k});
    if (k == key) {
      if (overwrite) {
        v = std::move(value);
        rec.write(KeyTarget{k});
      }
      return false;
    }
  }
  s.buckets[b].emplace_back(key, std::move(value));
  rec.write(KeyTarget{key});
  return true;
}

Value hash_index(HashState& s, const Value& key, const Value& fallback, Recorder& rec) {
  std::size_t b = bucket_for(s, key);
  rec.read(BucketTarget{b});
  for (const auto& [k, v] : s.buckets[b]) {
    rec.read(KeyTarget{k});
    if (k == key) return v;
  }
  s.buckets[b].emplace_back(key, fallback);
  rec.write(KeyTarget{key});
  return fallback;
}

std::size_t hash_erase(HashState& s, const Value& key, Recorder& rec) {
  std::size_t b = bucket_for(s, key);
  rec.read(BucketTarget{b});
  auto& chain = s.buckets[b];
  for (auto it = chain.begin(); it != chain.end(); ++it) {
    rec.read(KeyTarget{it->first});
    if (it->first == key) {
      rec.remove(KeyTarget{it->first});
      chain.erase(it);
      return 1;
    }
  }
  return 0;
}

// ---------------------------------------------------------------------------

std::size_t ContainerState::size() const {
  return std::visit(
      [](const auto& p) -> std::size_t {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, SequenceState>) {
          return p.elements.size();
        } else {
          return p.size();
        }
      },
      payload);
}

ContainerState ContainerState::make(ContainerKind kind, std::size_t hash_buckets) {
  switch (kind) {
    case ContainerKind::BstMap: return ContainerState{kind, BstState{}};
    case ContainerKind::HashMap: return ContainerState{kind, HashState{hash_buckets}};
    default: return ContainerState{kind, SequenceState{}};
  }
}

bool target_exists(const ContainerState& s, const EventTarget& t) {
  if (const auto* seq = std::get_if<SequenceState>(&s.payload)) {
    const auto* i = std::get_if<IndexTarget>(&t);
    return i && i->index < seq->elements.size();
  }
  if (const auto* bst = std::get_if<BstState>(&s.payload)) {
    const auto* n = std::get_if<NodeTarget>(&t);
    return n && bst->nodes.count(n->node);
  }
  const auto& hash = std::get<HashState>(s.payload);
  if (const auto* b = std::get_if<BucketTarget>(&t)) return b->bucket < hash.buckets.size();
  if (const auto* k = std::get_if<KeyTarget>(&t)) {
    const auto* key = std::get_if<std::int64_t>(&k->key);
    if (!key || hash.buckets.empty()) return false;
    for (const auto& [ek, ev] : hash.buckets[bucket_of(*key, hash.buckets.size())]) {
      if (ek == k->key) return true;
    }
  }
  return false;
}

std::optional<std::string> check_invariants(const ContainerState& s) {
  bool sequence_kind = !is_keyed(s.kind);
  if (sequence_kind != std::holds_alternative<SequenceState>(s.payload) ||
      (s.kind == ContainerKind::BstMap && !std::holds_alternative<BstState>(s.payload)) ||
      (s.kind == ContainerKind::HashMap && !std::holds_alternative<HashState>(s.payload))) {
    return "payload does not match container kind";
  }
  if (const auto* bst = std::get_if<BstState>(&s.payload)) {
    std::set<NodeId> seen;
    std::vector<NodeId> todo;
    if (bst->root) todo.push_back(*bst->root);
    while (!todo.empty()) {
      NodeId id = todo.back();
      todo.pop_back();
      auto it = bst->nodes.find(id);
      if (it == bst->nodes.end()) return "node " + std::to_string(id) + " is referenced but missing";
      if (it->second.id != id) return "node " + std::to_string(id) + " has a mismatched id";
      if (!seen.insert(id).second) return "node " + std::to_string(id) + " is reachable twice";
      if (it->second.left) todo.push_back(*it->second.left);
      if (it->second.right) todo.push_back(*it->second.right);
    }
    if (seen.size() != bst->nodes.size()) return "tree contains unreachable nodes";
    if (!bst->nodes.empty() && bst->nodes.rbegin()->first >= bst->next_id) {
      return "next node id is not past every assigned id";
    }
    auto keys = bst->keys_in_order();
    for (std::size_t i = 1; i < keys.size(); ++i) {
      if (!key_less(keys[i - 1], keys[i])) return "in-order keys are not strictly increasing";
    }
  }
  if (const auto* hash = std::get_if<HashState>(&s.payload)) {
    if (hash->buckets.empty()) return "hash table has no buckets";
    std::set<std::int64_t> keys;
    for (std::size_t b = 0; b < hash->buckets.size(); ++b) {
      for (const auto& [k, v] : hash->buckets[b]) {
        const auto* key = std::get_if<std::int64_t>(&k);
        if (!key) return "hash key is not an integer";
        if (bucket_of(*key, hash->buckets.size()) != b) {
          return "key " + std::to_string(*key) + " resides in bucket " + std::to_string(b);
        }
        if (!keys.insert(*key).second) return "key " + std::to_string(*key) + " appears twice";
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

namespace {

struct Collect {
  std::vector<AccessEvent> events;
  EventSink sink() {
    return [this](const AccessEvent& e) { events.push_back(e); };
  }
};

}  // namespace

Outcome<SequenceState, Value> vector_index_get(const SequenceState& s, std::int64_t i,
                                               ContainerId id) {
  Collect c;
  Recorder rec(id, c.sink());
  Value v = index_get(s, i, rec);
  return {s, std::move(c.events), std::move(v)};
}

Outcome<BstState, bool> bst_insert(BstState s, const Value& key, Value value, ContainerId id) {
  Collect c;
  Recorder rec(id, c.sink());
  bool created = bst_insert(s, key, std::move(value), true, rec);
  return {std::move(s), std::move(c.events), created};
}

Outcome<BstState, std::size_t> bst_erase(BstState s, const Value& key, ContainerId id) {
  Collect c;
  Recorder rec(id, c.sink());
  std::size_t removed = bst_erase(s, key, rec);
  return {std::move(s), std::move(c.events), removed};
}

Outcome<HashState, bool> hash_insert(HashState s, const Value& key, Value value, ContainerId id) {
  Collect c;
  Recorder rec(id, c.sink());
  bool created = hash_insert(s, key, std::move(value), true, rec);
  return {std::move(s), std::move(c.events), created};
}

}  // namespace stepviz::containers
