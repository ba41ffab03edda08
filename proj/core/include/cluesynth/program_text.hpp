#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cluesynth {

/// Syntax tree of the program text form:
///
///   expr   := call | string | integer | ident
///   call   := ident '(' [expr (',' expr)*] ')'
///   string := '"' (char | '\' escape)* '"'      escapes: \n \t \r \\ \" \xHH
///   ident  := [A-Za-z_][A-Za-z0-9_]*            `x` is the program input
///
/// Whitespace between tokens is ignored. The canonical printing separates
/// arguments with ", ".
struct Expr {
  enum class Kind : std::uint8_t { call, string, integer, ident };

  Kind kind = Kind::ident;
  std::string name;  // call name, identifier, or string contents
  std::int64_t number = 0;
  std::vector<Expr> args;

  friend bool operator==(const Expr&, const Expr&) = default;
};

/// Throws Error(syntax_error) with a column position on malformed text.
Expr parse_expr(std::string_view text);

std::string print_expr(const Expr& expr);

}  // namespace cluesynth
