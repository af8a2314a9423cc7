#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stepviz/frontend.hpp"
#include "stepviz/interpreter.hpp"

namespace testing {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

inline std::filesystem::path corpus_dir() { return STEPVIZ_CORPUS_DIR; }
inline std::filesystem::path golden_dir() { return STEPVIZ_GOLDEN_DIR; }

struct CorpusProgram {
  std::string name;
  std::filesystem::path source;
  std::string text;
  std::string stdin_text;  // from NAME.in when present
};

inline std::vector<CorpusProgram> corpus() {
  std::vector<CorpusProgram> out;
  for (const auto& entry : std::filesystem::directory_iterator(corpus_dir())) {
    if (entry.path().extension() != ".cpp") continue;
    CorpusProgram p;
    p.name = entry.path().stem().string();
    p.source = entry.path();
    p.text = read_file(entry.path());
    auto in = entry.path();
    in.replace_extension(".in");
    if (std::filesystem::exists(in)) p.stdin_text = read_file(in);
    out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end(),
            [](const CorpusProgram& a, const CorpusProgram& b) { return a.name < b.name; });
  return out;
}

inline stepviz::ccr::CcrProgram compile_or_throw(std::string_view source) {
  auto r = stepviz::frontend::compile(source);
  if (!r) {
    std::string msg;
    for (const auto& d : r.diagnostics()) msg += d.to_string() + "\n";
    throw std::runtime_error("compile failed:\n" + msg);
  }
  return std::move(r).value();
}

inline stepviz::cgr::TraceDocument trace(std::string_view source,
                                         stepviz::InterpreterOptions options = {}) {
  return stepviz::run(compile_or_throw(source), options);
}

// Seeded source for the hand-rolled property generators.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // Uniform in [lo, hi].
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
  }
  bool chance(int percent) { return range(0, 99) < percent; }
  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[static_cast<std::size_t>(range(0, static_cast<std::int64_t>(items.size()) - 1))];
  }

 private:
  std::mt19937_64 engine_;
};

// Random well-typed program in the subset. Loops are bounded by counters the
// body never writes, so every program terminates; arithmetic may still hit a
// runtime error, which is a legitimate trace ending.
class ProgramGen {
 public:
  explicit ProgramGen(Rng& rng) : rng_(rng) {}

  std::string program() {
    out_.clear();
    next_ = 0;
    scopes_.clear();
    out_ += "#include <iostream>\n#include <vector>\n#include <map>\nusing namespace std;\n\n";
    out_ += "int helper(int a, int b) {\n  int r = a + b * 2;\n  return r;\n}\n\n";
    out_ += "void fill(vector<int>& xs, int n) {\n  xs.push_back(n);\n}\n\n";
    out_ += "int main() {\n";
    scopes_.push_back({});
    line(1, "vector<int> v;");
    line(1, "map<int, int> m;");
    int n = static_cast<int>(rng_.range(3, 12));
    for (int i = 0; i < n; ++i) statement(1, 2);
    line(1, "return 0;");
    out_ += "}\n";
    return out_;
  }

 private:
  struct Var {
    std::string name;
    bool is_bool;
    bool frozen;  // loop counter
  };

  void line(int indent, const std::string& text) {
    out_ += std::string(static_cast<std::size_t>(indent) * 2, ' ') + text + "\n";
  }

  std::vector<const Var*> visible(bool want_bool, bool writable) const {
    std::vector<const Var*> out;
    std::vector<std::string> seen;
    for (auto s = scopes_.rbegin(); s != scopes_.rend(); ++s) {
      for (const auto& v : *s) {
        if (std::find(seen.begin(), seen.end(), v.name) != seen.end()) continue;
        seen.push_back(v.name);
        if (v.is_bool == want_bool && !(writable && v.frozen)) out.push_back(&v);
      }
    }
    return out;
  }

  std::string fresh_name() {
    // Sometimes shadow an outer name not declared in the current scope.
    if (scopes_.size() > 1 && rng_.chance(20)) {
      for (std::size_t i = 0; i + 1 < scopes_.size(); ++i) {
        for (const auto& v : scopes_[i]) {
          bool here = false;
          for (const auto& w : scopes_.back()) here = here || w.name == v.name;
          if (!here && !v.frozen) return v.name;
        }
      }
    }
    return "x" + std::to_string(next_++);
  }

  std::string int_expr(int depth) {
    auto vars = visible(false, false);
    int choice = static_cast<int>(rng_.range(0, depth <= 0 ? 1 : 9));
    switch (choice) {
      case 0: return std::to_string(rng_.range(0, 20));
      case 1:
        if (!vars.empty()) return rng_.pick(vars)->name;
        return std::to_string(rng_.range(0, 9));
      case 2: return int_expr(depth - 1) + " + " + int_expr(depth - 1);
      case 3: return int_expr(depth - 1) + " - " + int_expr(depth - 1);
      case 4: return "(" + int_expr(depth - 1) + ") * " + std::to_string(rng_.range(0, 3));
      case 5: return int_expr(depth - 1) + " / " + std::to_string(rng_.range(1, 5));
      case 6: return int_expr(depth - 1) + " % " + std::to_string(rng_.range(1, 5));
      case 7: return rng_.chance(50) ? "v.size()" : "m.count(" + int_expr(depth - 1) + ")";
      case 8: return "helper(" + int_expr(depth - 1) + ", " + int_expr(depth - 1) + ")";
      default: return "-" + std::to_string(rng_.range(1, 9));
    }
  }

  std::string bool_expr(int depth) {
    auto vars = visible(true, false);
    int choice = static_cast<int>(rng_.range(0, depth <= 0 ? 1 : 6));
    static const std::vector<std::string> kRel = {"<", "<=", ">", ">=", "==", "!="};
    switch (choice) {
      case 0: return rng_.chance(50) ? "true" : "false";
      case 1:
        if (!vars.empty()) return rng_.pick(vars)->name;
        return int_expr(0) + " < " + int_expr(0);
      case 2:
      case 3: return int_expr(depth - 1) + " " + rng_.pick(kRel) + " " + int_expr(depth - 1);
      case 4: return "(" + bool_expr(depth - 1) + ") && (" + bool_expr(depth - 1) + ")";
      case 5: return "(" + bool_expr(depth - 1) + ") || (" + bool_expr(depth - 1) + ")";
      default: return "!(" + bool_expr(depth - 1) + ")";
    }
  }

  void body(int indent, int depth) {
    scopes_.push_back({});
    int n = static_cast<int>(rng_.range(0, 3));
    for (int i = 0; i < n; ++i) statement(indent, depth);
    scopes_.pop_back();
  }

  void statement(int indent, int depth) {
    int choice = static_cast<int>(rng_.range(0, depth <= 0 ? 8 : 13));
    switch (choice) {
      case 0:
      case 1: {
        bool is_bool = rng_.chance(25);
        std::string name = fresh_name();
        std::string init = is_bool ? bool_expr(2) : int_expr(2);
        line(indent, std::string(is_bool ? "bool " : "int ") + name + " = " + init + ";");
        scopes_.back().push_back({name, is_bool, false});
        return;
      }
      case 2: {
        auto vars = visible(false, true);
        if (vars.empty()) return statement(indent, depth);
        static const std::vector<std::string> kOps = {"=", "+=", "-=", "*="};
        const std::string& op = rng_.pick(kOps);
        std::string rhs = op == "*=" ? std::to_string(rng_.range(0, 2)) : int_expr(2);
        line(indent, rng_.pick(vars)->name + " " + op + " " + rhs + ";");
        return;
      }
      case 3: {
        auto vars = visible(false, true);
        if (vars.empty()) return statement(indent, depth);
        line(indent, rng_.pick(vars)->name + (rng_.chance(50) ? "++;" : "--;"));
        return;
      }
      case 4: line(indent, "cout << " + int_expr(2) + " << endl;"); return;
      case 5: line(indent, "v.push_back(" + int_expr(1) + ");"); return;
      case 6: line(indent, "m[" + int_expr(1) + "] = " + int_expr(1) + ";"); return;
      case 7:
        if (rng_.chance(50)) {
          line(indent, "m.erase(" + int_expr(1) + ");");
        } else {
          line(indent, "fill(v, " + int_expr(1) + ");");
        }
        return;
      case 8:
        line(indent, "if (!v.empty()) {");
        line(indent + 1, "v.pop_back();");
        line(indent, "}");
        return;
      case 9:
        line(indent, "if (" + bool_expr(2) + ") {");
        body(indent + 1, depth - 1);
        if (rng_.chance(50)) {
          line(indent, "} else {");
          body(indent + 1, depth - 1);
        }
        line(indent, "}");
        return;
      case 10: {
        std::string i = "i" + std::to_string(next_++);
        line(indent, "for (int " + i + " = 0; " + i + " < " + std::to_string(rng_.range(0, 4)) +
                         "; " + i + "++) {");
        scopes_.push_back({{i, false, true}});
        body(indent + 1, depth - 1);
        scopes_.pop_back();
        line(indent, "}");
        return;
      }
      case 11: {
        std::string w = "w" + std::to_string(next_++);
        line(indent, "int " + w + " = 0;");
        scopes_.back().push_back({w, false, true});
        line(indent, "while (" + w + " < " + std::to_string(rng_.range(0, 3)) + ") {");
        body(indent + 1, depth - 1);
        line(indent + 1, w + "++;");
        line(indent, "}");
        return;
      }
      case 12:
        line(indent, "if (m.find(" + int_expr(1) + ") != m.end()) {");
        body(indent + 1, depth - 1);
        line(indent, "}");
        return;
      default:
        line(indent, "{");
        body(indent + 1, depth - 1);
        line(indent, "}");
        return;
    }
  }

  Rng& rng_;
  std::string out_;
  int next_ = 0;
  std::vector<std::vector<Var>> scopes_;
};

}  // namespace testing
