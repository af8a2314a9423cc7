#include "stepviz/explain.hpp"

#include <stdexcept>

namespace stepviz::explain {

std::string template_id(Template t) { return "T" + std::to_string(static_cast<int>(t)); }

std::string_view pattern(Template t) {
  return kTemplates.at(static_cast<std::size_t>(t) - 1).pattern;
}

std::string render(Template t, const std::vector<std::string>& args) {
  std::string_view p = pattern(t);
  std::string out;
  std::size_t used = 0;
  std::size_t i = 0;
  while (i < p.size()) {
    if (p[i] == '{') {
      std::size_t close = p.find('}', i);
      if (used == args.size()) break;
      out += args[used++];
      i = close + 1;
    } else {
      out += p[i++];
    }
  }
  if (i < p.size() || used != args.size()) {
    throw std::invalid_argument(template_id(t) + " expects a different number of arguments");
  }
  return out;
}

}  // namespace stepviz::explain
