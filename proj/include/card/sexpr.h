#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace card {

struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  int line = 0;
  int column = 0;

  bool is_atom() const { return !is_list; }
  bool is_atom(std::string_view s) const { return !is_list && atom == s; }
  std::string head() const { return is_list && !items.empty() && items[0].is_atom() ? items[0].atom : ""; }
  std::string str() const;
};

// Reads all top-level s-expressions; ';' starts a comment, |...| quotes a symbol.
// Throws Error(SyntaxError) with line:column on malformed input.
std::vector<SExpr> read_sexprs(std::string_view text);

}  // namespace card
