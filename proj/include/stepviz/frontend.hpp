#pragma once

// Subset-of-C++ frontend: source text -> tokens -> canonical code
// representation. The accepted grammar is documented in docs/grammar.ebnf.

#include <string>
#include <string_view>
#include <vector>

#include "stepviz/ccr.hpp"
#include "stepviz/source.hpp"

namespace stepviz::frontend {

enum class TokenKind {
  Keyword,
  Identifier,
  IntLiteral,
  DoubleLiteral,
  CharLiteral,
  StringLiteral,
  Operator,
  Punctuation,
  Directive,  // a `#...` line, ignored by the parser
};

std::string_view to_string(TokenKind k);

struct Token {
  TokenKind kind;
  std::string lexeme;   // exact source slice
  SourceSpan span;
  std::string leading;  // whitespace and comments preceding the token

  bool is(TokenKind k, std::string_view text) const { return kind == k && lexeme == text; }
};

struct TokenStream {
  std::vector<Token> tokens;
  std::string trailing;  // trivia after the last token

  // Concatenates all trivia and lexemes; equals the tokenized source.
  std::string reconstruct() const;
};

Result<TokenStream> tokenize(std::string_view source);

// Parses a whole translation unit. Stops at the first syntax error.
Result<ccr::CcrProgram> parse(const TokenStream& tokens, std::string source_text);

// Parses a single expression (used by tests and tooling).
Result<ccr::ExprPtr> parse_expression(std::string_view source);

// tokenize, parse and validate; a program is returned only if all are clean.
Result<ccr::CcrProgram> compile(std::string_view source);

}  // namespace stepviz::frontend
