#pragma once

#include <set>
#include <stdexcept>
#include <string>

#include "mplc/syntax.hpp"

namespace mplc {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int col, std::set<std::string> expected, std::string found);

  int line;
  int col;
  std::set<std::string> expected;
  std::string found;
};

Program parse_program(const std::string& text);
TypePtr parse_type(const std::string& text);
ExprPtr parse_expr(const std::string& text);

}  // namespace mplc
