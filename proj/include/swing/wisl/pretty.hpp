#pragma once

#include "swing/wisl/ast.hpp"

#include <string>

namespace swing::wisl {

/// WISL-style rendering; parse_expr(pretty_expr(e)) == e for expressions
/// built from the parser's vocabulary.
std::string pretty_expr(const Expr &e);
std::string pretty_value(const Value &v);
std::string pretty_atom(const Atom &a);
/// An atom on its own, without the parentheses it takes inside an assertion.
std::string atom_text(const Atom &a);
std::string pretty_assertion(const Assertion &a);
std::string pretty_logic_cmd(const LogicCmd &c);

/// Statement text from the source span, whitespace collapsed and nested
/// blocks elided as `{ … }`.
std::string display_text(const std::string &source, const SourceLoc &loc);

} // namespace swing::wisl
