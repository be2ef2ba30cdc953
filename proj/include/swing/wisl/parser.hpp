#pragma once

#include "swing/wisl/ast.hpp"

#include <nlohmann/json.hpp>
#include <string_view>

namespace swing::wisl {

/// Parses a whole WISL file. Throws ParseError on malformed syntax and
/// ResolutionError when validation reports diagnostics.
Program parse_program(std::string_view text, std::string path = {});

/// Parses without running validation.
Program parse_program_unchecked(std::string_view text, std::string path = {});

/// Parses a single expression; logical variables are accepted.
Expr parse_expr(std::string_view text);

Assertion parse_assertion(std::string_view text);

/// Diagnostics for unresolved names, arity mismatches and badly scoped
/// logical variables. Empty iff the program is well-formed.
std::vector<Diagnostic> validate(const Program &p);

nlohmann::json to_json(const Diagnostic &d);

} // namespace swing::wisl
