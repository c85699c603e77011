#include "cekab/sexpr.hpp"

#include <cctype>

#include "cekab/core.hpp"

namespace cekab {

bool SExpr::is(const char* word) const { return !list && iequals(text, word); }

bool SExpr::head_is(const char* word) const { return list && !items.empty() && items[0].is(word); }

std::vector<SExpr> parse_sexprs(const std::string& text) {
  std::vector<SExpr> top;
  std::vector<SExpr> stack;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&]() {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++i;
  };
  auto emit = [&](SExpr e) {
    if (stack.empty())
      top.push_back(std::move(e));
    else
      stack.back().items.push_back(std::move(e));
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
    } else if (c == ';') {
      while (i < text.size() && text[i] != '\n') advance();
    } else if (c == '(') {
      SExpr e;
      e.list = true;
      e.line = line;
      e.col = col;
      stack.push_back(std::move(e));
      advance();
    } else if (c == ')') {
      if (stack.empty()) throw ParseError(line, col, "expression", "')'");
      SExpr e = std::move(stack.back());
      stack.pop_back();
      advance();
      emit(std::move(e));
    } else {
      SExpr e;
      e.line = line;
      e.col = col;
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '(' &&
             text[i] != ')' && text[i] != ';') {
        e.text += text[i];
        advance();
      }
      emit(std::move(e));
    }
  }
  if (!stack.empty()) throw ParseError(stack.back().line, stack.back().col, "')' matching this '('", "end of input");
  return top;
}

std::string to_string(const SExpr& e) {
  if (!e.list) return e.text;
  std::string out = "(";
  for (std::size_t i = 0; i < e.items.size(); ++i) out += (i ? " " : "") + to_string(e.items[i]);
  return out + ")";
}

}  // namespace cekab
