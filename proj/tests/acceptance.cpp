// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <unistd.h>

#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "container_oracles.hpp"
#include "differential.hpp"
#include "stepviz/cli.hpp"

using namespace stepviz;
namespace fs = std::filesystem;

namespace {

constexpr double kDifferentialBudget = 60.0;  // seconds
constexpr double kOracleBudget = 30.0;        // seconds
constexpr std::size_t kOracleOps = 10'000;

struct Check {
  std::vector<std::string> notes;
  void expect(bool ok, const std::string& what) {
    if (!ok) notes.push_back(what);
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path scratch() {
  auto dir = fs::temp_directory_path() / ("stepviz_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

void differential(Check& c) {
  auto t0 = std::chrono::steady_clock::now();
  auto rows = testing::differential(scratch() / "native");
  c.expect(rows.size() >= 20, "corpus has " + std::to_string(rows.size()) + " programs");
  for (const auto& r : rows) c.expect(r.problem.empty(), r.name + ": " + r.problem);
  double s = seconds_since(t0);
  c.expect(s < kDifferentialBudget, "took " + std::to_string(s) + "s");
}

void container_oracles(Check& c) {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<std::pair<std::string, testing::OracleReport>> reports;
  for (auto kind : {ContainerKind::Vector, ContainerKind::Stack, ContainerKind::Queue, ContainerKind::Deque}) {
    reports.emplace_back(std::string(to_string(kind)), testing::fuzz_sequence(kind, kOracleOps, 11));
  }
  reports.emplace_back("map", testing::fuzz_bst(kOracleOps, 12));
  reports.emplace_back("unordered_map", testing::fuzz_hash(kOracleOps, 13, 6));
  for (const auto& [name, r] : reports) {
    c.expect(r.ops == kOracleOps, name + " ran " + std::to_string(r.ops) + " ops");
    c.expect(r.ok(), name + ": " + testing::describe(r));
  }
  double s = seconds_since(t0);
  c.expect(s < kOracleBudget, "took " + std::to_string(s) + "s");
}

void bst_golden(Check& c) {
  auto dir = testing::golden_dir();
  auto doc = testing::trace(testing::read_file(dir / "bst_insert_erase.cpp"));
  c.expect(cgr::serialize(doc) == testing::read_file(dir / "bst_insert_erase.json"), "bytes differ from golden");

  std::map<containers::NodeId, std::string> key_of;
  for (const auto& f : doc.frames) {
    for (const auto& s : f.containers) {
      if (const auto* b = std::get_if<containers::BstState>(&s.state.payload)) {
        for (const auto& [id, n] : b->nodes) key_of[id] = display(n.key);
      }
    }
  }
  std::vector<std::string> insert, erase;
  auto* into = static_cast<std::vector<std::string>*>(nullptr);
  for (const auto& f : doc.frames) {
    if (f.explanation == "Assigning 1 to m[6]") into = &insert;
    if (f.explanation == "Erasing key 6 from m") into = &erase;
    if (!into) continue;
    for (const auto& e : f.events) {
      into->push_back(std::string(containers::to_string(e.kind)) + " " +
                      key_of[std::get<containers::NodeTarget>(e.target).node]);
    }
  }
  c.expect(insert == std::vector<std::string>{"read 5", "read 8", "write 6"}, "insert events");
  c.expect(erase.size() >= 2 && erase[erase.size() - 2] == "delete 6" && erase.back() == "write 8",
           "erase events");
}

void hash_buckets(Check& c) {
  auto doc = testing::trace(
      "#include <unordered_map>\nusing namespace std;\n"
      "int main() {\n  unordered_map<int, int> h;\n  h[8] = 1;\n  h[14] = 2;\n  h[-1] = 3;\n  return 0;\n}\n");
  const containers::HashState* h = nullptr;
  for (const auto& f : doc.frames) {
    for (const auto& s : f.containers) {
      if (const auto* p = std::get_if<containers::HashState>(&s.state.payload)) h = p;
    }
    if (h && h->size() == 3) break;
  }
  c.expect(h && h->buckets.size() == 6, "six buckets");
  if (!h || h->buckets.size() != 6) return;
  auto keys = [&](std::size_t b) {
    std::vector<std::int64_t> out;
    for (const auto& e : h->buckets[b]) out.push_back(std::get<std::int64_t>(e.first));
    return out;
  };
  c.expect(keys(2) == std::vector<std::int64_t>{8, 14}, "bucket 2 chain");
  c.expect(keys(5) == std::vector<std::int64_t>{-1}, "bucket 5 chain");
}

void cgr_closure(Check& c) {
  for (const auto& p : testing::corpus()) {
    InterpreterOptions o;
    o.stdin_text = p.stdin_text;
    auto doc = testing::trace(p.text, o);
    auto bytes = cgr::serialize(doc);
    c.expect(cgr::validate_document(doc).empty(), p.name + ": invalid");
    c.expect(cgr::deserialize(bytes) == doc, p.name + ": deserialize changed the document");
    c.expect(cgr::serialize(cgr::deserialize(bytes)) == bytes, p.name + ": bytes not stable");
    c.expect(cgr::serialize(testing::trace(p.text, o)) == bytes, p.name + ": nondeterministic");

    o.stream_chunk = 5;
    cli::TraceConfig config;
    config.source_path = p.source.string();
    config.options = o;
    std::ostringstream out, err;
    cli::cmd_trace(config, out, err);
    c.expect(out.str() == cgr::serialize(testing::trace(p.text, o)), p.name + ": stream differs from batch");
  }
}

void truncation(Check& c) {
  auto src = scratch() / "loop.cpp";
  testing::write_file(src, "int main() {\n  int i = 0;\n  while (true) {\n    i++;\n  }\n  return 0;\n}\n");
  cli::TraceConfig config;
  config.source_path = src.string();
  config.options.max_frames = 100;
  std::ostringstream out, err;
  int code = cli::cmd_trace(config, out, err);
  c.expect(code == 4, "exit code " + std::to_string(code));
  auto doc = cgr::deserialize(out.str());
  c.expect(doc.frames.size() == 100, std::to_string(doc.frames.size()) + " frames");
  c.expect(doc.frames.back().termination == cgr::Termination{cgr::Truncated{}}, "not truncated");
}

void scope_semantics(Check& c) {
  auto doc = testing::trace(
      "#include <iostream>\nusing namespace std;\n"
      "int main() {\n  int x = 1;\n  {\n    int x = 2;\n    cout << x;\n  }\n  {\n  }\n  return x;\n}\n");
  bool two_x = false, empty_scope = false;
  for (const auto& f : doc.frames) {
    for (const auto& fn : f.stacks) {
      if (!fn.active) continue;
      int with_x = 0;
      std::optional<Value> inner;
      for (const auto& s : fn.scopes) {
        for (const auto& b : s) {
          if (b.name != "x") continue;
          ++with_x;
          inner = b.value;
        }
      }
      if (with_x == 2 && inner == Value{std::int64_t{2}}) two_x = true;
      if (fn.scopes.size() == 2 && fn.scopes.back().empty() && f.explanation == "Entering a new scope") {
        empty_scope = true;
      }
    }
  }
  c.expect(two_x, "no frame with two scopes binding x");
  c.expect(empty_scope, "no empty scope block");
  const auto& last = doc.frames.back();
  c.expect(last.stdout_so_far == "2", "lookup printed " + last.stdout_so_far);
  c.expect(last.termination == cgr::Termination{cgr::Finished{1}}, "outer x not restored");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"differential execution matches native toolchain", differential},
      {"container oracles, 10000 ops per kind", container_oracles},
      {"BST insert/erase of 6 matches golden trace", bst_golden},
      {"hash buckets: 8,14 -> bucket 2, -1 -> bucket 5", hash_buckets},
      {"CGR closure: validate, round trip, stream, determinism", cgr_closure},
      {"truncation at 100 frames exits 4", truncation},
      {"scope semantics: shadowing and empty block", scope_semantics},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Check c;
    try {
      run(c);
    } catch (const std::exception& e) {
      c.notes.push_back(std::string("exception: ") + e.what());
    }
    std::cout << (c.notes.empty() ? "PASS " : "FAIL ") << name << "\n";
    for (const auto& n : c.notes) std::cout << "     " << n << "\n";
    failed += !c.notes.empty();
  }
  fs::remove_all(scratch());
  return failed == 0 ? 0 : 1;
}
