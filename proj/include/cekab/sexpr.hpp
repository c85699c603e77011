#pragma once

#include <string>
#include <vector>

namespace cekab {

struct SExpr {
  bool list = false;
  std::string text;  // symbol text when !list
  std::vector<SExpr> items;
  int line = 0;
  int col = 0;

  bool is_symbol() const { return !list; }
  /// Case-insensitive comparison of a symbol's text.
  bool is(const char* word) const;
  /// True for a list whose first item is the given symbol.
  bool head_is(const char* word) const;
};

/// Reads every top-level expression. `;` comments run to end of line.
std::vector<SExpr> parse_sexprs(const std::string& text);
std::string to_string(const SExpr& e);

}  // namespace cekab
