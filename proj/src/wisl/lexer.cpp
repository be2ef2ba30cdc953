#include "lexer.hpp"

#include <array>
#include <cctype>

namespace swing::wisl::detail {

namespace {

// Longest match first.
constexpr std::array<std::string_view, 30> kPuncts = {
    ":=", "==", "!=", "<=", ">=", "->", "::", "&&", "||", "(",  ")",  "{",
    "}",  "[",  "]",  ",",  ";",  ":",  "=",  "<",  ">",  "+",  "-",  "*",
    "@",  "!",  ".",  "/",  "%",  "&"};

struct Cursor {
  std::string_view text;
  std::size_t pos = 0;
  int line = 1;
  int col = 1;

  char peek(std::size_t k = 0) const { return pos + k < text.size() ? text[pos + k] : '\0'; }
  void advance() {
    if (text[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }
};

} // namespace

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  Cursor c{text};
  while (true) {
    // whitespace and comments
    while (c.pos < text.size()) {
      char ch = c.peek();
      if (std::isspace(static_cast<unsigned char>(ch))) {
        c.advance();
      } else if (ch == '/' && c.peek(1) == '/') {
        while (c.pos < text.size() && c.peek() != '\n')
          c.advance();
      } else if (ch == '/' && c.peek(1) == '*') {
        c.advance();
        c.advance();
        while (c.pos < text.size() && !(c.peek() == '*' && c.peek(1) == '/'))
          c.advance();
        if (c.pos < text.size()) {
          c.advance();
          c.advance();
        }
      } else {
        break;
      }
    }
    Token tok;
    tok.loc.start_line = c.line;
    tok.loc.start_col = c.col;
    tok.loc.begin = c.pos;
    if (c.pos >= text.size()) {
      tok.kind = Tok::End;
      tok.loc.end_line = c.line;
      tok.loc.end_col = c.col;
      tok.loc.end = c.pos;
      out.push_back(tok);
      return out;
    }
    int last_line = c.line, last_col = c.col;
    auto take = [&] {
      last_line = c.line;
      last_col = c.col;
      tok.text += c.peek();
      c.advance();
    };
    char ch = c.peek();
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      tok.kind = Tok::Ident;
      while (std::isalnum(static_cast<unsigned char>(c.peek())) || c.peek() == '_')
        take();
    } else if (ch == '#') {
      tok.kind = Tok::LVar;
      take();
      if (!(std::isalpha(static_cast<unsigned char>(c.peek())) || c.peek() == '_'))
        throw ParseError("expected logical variable name after '#'", tok.loc);
      while (std::isalnum(static_cast<unsigned char>(c.peek())) || c.peek() == '_')
        take();
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      tok.kind = Tok::Number;
      while (std::isdigit(static_cast<unsigned char>(c.peek())))
        take();
    } else if (ch == '"') {
      tok.kind = Tok::String;
      c.advance();
      while (c.pos < text.size() && c.peek() != '"')
        take();
      if (c.pos >= text.size())
        throw ParseError("unterminated string literal", tok.loc);
      last_line = c.line;
      last_col = c.col;
      c.advance();
    } else {
      tok.kind = Tok::Punct;
      bool matched = false;
      for (auto p : kPuncts) {
        if (text.substr(c.pos, p.size()) == p) {
          for (std::size_t i = 0; i < p.size(); ++i)
            take();
          matched = true;
          break;
        }
      }
      if (!matched) {
        tok.loc.end_line = c.line;
        tok.loc.end_col = c.col;
        tok.loc.end = c.pos + 1;
        throw ParseError(std::string("unexpected character '") + ch + "'", tok.loc);
      }
    }
    tok.loc.end_line = last_line;
    tok.loc.end_col = last_col;
    tok.loc.end = c.pos;
    out.push_back(std::move(tok));
  }
}

} // namespace swing::wisl::detail
