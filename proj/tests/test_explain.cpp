#include <doctest.h>

#include <regex>
#include <set>

#include "stepviz/explain.hpp"
#include "support.hpp"

using namespace stepviz;
using namespace stepviz::explain;

namespace {

std::regex matcher(std::string_view pattern) {
  std::string re;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    char c = pattern[i];
    if (c == '{') {
      i = pattern.find('}', i);
      re += "(.*)";
    } else if (std::string_view("\\^$.|?*+()[]{}").find(c) != std::string_view::npos) {
      re += '\\';
      re += c;
    } else {
      re += c;
    }
  }
  return std::regex(re);
}

}  // namespace

TEST_SUITE("explain") {

TEST_CASE("template ids are T1 to T34 in order") {
  std::set<std::string_view> patterns;
  for (std::size_t i = 0; i < kTemplates.size(); ++i) {
    CHECK(static_cast<std::size_t>(kTemplates[i].id) == i + 1);
    CHECK(template_id(kTemplates[i].id) == "T" + std::to_string(i + 1));
    CHECK(pattern(kTemplates[i].id) == kTemplates[i].pattern);
    patterns.insert(kTemplates[i].pattern);
  }
  CHECK(patterns.size() == kTemplates.size());
}

TEST_CASE("render fills placeholders in order") {
  CHECK(render(Template::DeclareInit, {"x", "5"}) == "Declaring variable x and initializing it to 5");
  CHECK(render(Template::LoopExit, {"i < n"}) == "Condition i < n is false, exiting loop");
  CHECK(render(Template::Append, {"7", "v"}) == "Appending 7 to the back of v");
  CHECK(render(Template::UpdateIndex, {"v", "2", "1", "4"}) == "Updating v[2] from 1 to 4");
  CHECK(render(Template::EnterScope, {}) == "Entering a new scope");
  // Braces inside arguments are not re-expanded.
  CHECK(render(Template::Print, {"\"{x}\""}) == "Printing \"{x}\"");
  CHECK_THROWS_AS(render(Template::DeclareInit, {"x"}), std::invalid_argument);
  CHECK_THROWS_AS(render(Template::EnterScope, {"extra"}), std::invalid_argument);
}

TEST_CASE("the published table lists every pattern under its id") {
  std::string doc = testing::read_file(std::filesystem::path(STEPVIZ_DOCS_DIR) / "templates.md");
  for (const auto& t : kTemplates) {
    std::string id = template_id(t.id);
    std::string cell = id + std::string(4 - id.size(), ' ') + "| `" + std::string(t.pattern) + "` |";
    CHECK_MESSAGE(doc.find("| " + cell) != std::string::npos, cell);
  }
}

TEST_CASE("every corpus explanation is an instance of a template") {
  std::vector<std::regex> res;
  for (const auto& t : kTemplates) res.push_back(matcher(t.pattern));
  std::set<std::size_t> used;
  for (bool substeps : {true, false}) {
    for (const auto& p : testing::corpus()) {
      InterpreterOptions o;
      o.substeps = substeps;
      o.stdin_text = p.stdin_text;
      for (const auto& f : testing::trace(p.text, o).frames) {
        std::vector<std::size_t> hits;
        for (std::size_t i = 0; i < res.size(); ++i) {
          if (std::regex_match(f.explanation, res[i])) hits.push_back(i);
        }
        CHECK_MESSAGE(!hits.empty(), p.name << ": " << f.explanation);
        if (!hits.empty()) used.insert(hits.front());
      }
    }
  }
  // The corpus exercises most of the table.
  CHECK(used.size() >= 30);
}

}  // TEST_SUITE
