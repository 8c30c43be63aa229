#include "semred/lexer.hpp"

#include <cctype>

#include "semred/errors.hpp"

namespace semred {

namespace {

bool id_start(char c)
{
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool id_char(char c)
{
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

const char* two_char_puncts[] = {"==", "!=", "<=", ">=", "&&", "||"};
const char one_char_puncts[] = "{}();,=.+-*/<>!&|[]%";

}  // namespace

std::vector<Token> lex(const std::string& source)
{
  std::vector<Token> tokens;
  size_t i = 0;
  int line = 1, col = 1;

  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n && i < source.size(); ++k, ++i) {
      if (source[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };

  while (i < source.size()) {
    char c = source[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < source.size() && source[i + 1] == '/') {
      while (i < source.size() && source[i] != '\n') advance(1);
      continue;
    }
    if (c == '/' && i + 1 < source.size() && source[i + 1] == '*') {
      int start_line = line, start_col = col;
      advance(2);
      while (i + 1 < source.size()
             && !(source[i] == '*' && source[i + 1] == '/')) {
        advance(1);
      }
      if (i + 1 >= source.size()) {
        throw LexError("unterminated block comment", start_line, start_col);
      }
      advance(2);
      continue;
    }

    int tok_line = line, tok_col = col;
    if (id_start(c)) {
      size_t j = i;
      while (j < source.size() && id_char(source[j])) ++j;
      tokens.push_back({TokenKind::Identifier, source.substr(i, j - i),
                        tok_line, tok_col});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < source.size()
             && std::isdigit(static_cast<unsigned char>(source[j]))) {
        ++j;
      }
      tokens.push_back(
          {TokenKind::Number, source.substr(i, j - i), tok_line, tok_col});
      advance(j - i);
      continue;
    }
    if (c == '"') {
      size_t j = i + 1;
      while (j < source.size() && source[j] != '"') {
        if (source[j] == '\\' && j + 1 < source.size()) ++j;
        ++j;
      }
      if (j >= source.size()) {
        throw LexError("unterminated string literal", tok_line, tok_col);
      }
      tokens.push_back({TokenKind::String, source.substr(i, j - i + 1),
                        tok_line, tok_col});
      advance(j - i + 1);
      continue;
    }
    if (i + 1 < source.size()) {
      bool matched = false;
      for (const char* p : two_char_puncts) {
        if (source[i] == p[0] && source[i + 1] == p[1]) {
          tokens.push_back({TokenKind::Punct, p, tok_line, tok_col});
          advance(2);
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    bool single = false;
    for (const char* p = one_char_puncts; *p; ++p) {
      if (c == *p) {
        tokens.push_back(
            {TokenKind::Punct, std::string(1, c), tok_line, tok_col});
        advance(1);
        single = true;
        break;
      }
    }
    if (single) continue;

    throw LexError(std::string("unexpected character '") + c + "' at line "
                       + std::to_string(tok_line) + ", column "
                       + std::to_string(tok_col),
                   tok_line, tok_col);
  }
  return tokens;
}

}  // namespace semred
