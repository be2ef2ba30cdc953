#pragma once

#include "swing/wisl/ast.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace swing::wisl::detail {

enum class Tok { Ident, LVar, Number, String, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceLoc loc;
};

std::vector<Token> lex(std::string_view text);

} // namespace swing::wisl::detail
