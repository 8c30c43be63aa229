#pragma once

#include <string>
#include <vector>

namespace semred {

enum class TokenKind
{
  Identifier,
  Number,
  String,
  Punct,
};

struct Token
{
  TokenKind kind;
  std::string text;  // verbatim source text, quotes included for strings
  int line;
  int column;
};

/**
 * Tokenize C-like source: identifiers, integer literals, double-quoted
 * strings with backslash escapes, punctuation, // and block comments.
 * Throws LexError on any other character.
 */
std::vector<Token> lex(const std::string& source);

}  // namespace semred
