#pragma once

#include "superproj/super_function.hpp"

#include <string>
#include <string_view>

namespace superproj {

/// Parses the expression grammar into a SuperFunction over dim.
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' '-'? integer)?
///   primary := integer | x<k> | th<k> | '(' expr ')'
///
/// Division and negative powers require an even divisor free of odd
/// generators. Errors are ParseError with a 1-based column.
SuperFunction parse_expression(std::string_view text, Dimension dim);

/// Canonical printed form; parse_expression(print_expression(f)) == f.
inline std::string print_expression(const SuperFunction& f) { return f.to_string(); }

/// Human-readable grammar summary printed by the CLI.
std::string expression_grammar();

}  // namespace superproj
