#pragma once
#include <string>
#include <string_view>
#include <vector>

#include "ct/error.hpp"

namespace ct {

// Minimal S-expression reader shared by every textual format in the project.
// Atoms are bare symbols (anything up to whitespace/parens); ';' starts a
// comment running to end of line.
struct SNode {
  bool is_list = false;
  std::string text;          // symbol text when !is_list
  std::vector<SNode> items;  // children when is_list
  int line = 0, col = 0;

  bool is_sym() const { return !is_list; }
  bool sym_is(std::string_view s) const { return !is_list && text == s; }
  const SNode& at(size_t i) const {
    if (!is_list || i >= items.size()) fail(Errc::SyntaxError, "malformed form near line " + std::to_string(line));
    return items[i];
  }
  std::string where() const { return "line " + std::to_string(line) + ":" + std::to_string(col); }
};

std::vector<SNode> parse_sexprs(std::string_view text);
std::string read_file(const std::string& path);  // throws UsageError on failure

}  // namespace ct
