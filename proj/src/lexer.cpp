#include <array>
#include <cctype>
#include <set>

#include "stepviz/frontend.hpp"

namespace stepviz::frontend {

std::string_view to_string(TokenKind k) {
  static constexpr std::array<std::string_view, 9> kNames = {
      "keyword",       "identifier",     "int-literal", "double-literal", "char-literal",
      "string-literal", "operator",      "punctuation", "directive"};
  return kNames[static_cast<std::size_t>(k)];
}

std::string TokenStream::reconstruct() const {
  std::string out;
  for (const auto& t : tokens) {
    out += t.leading;
    out += t.lexeme;
  }
  return out + trailing;
}

namespace {

const std::set<std::string_view> kKeywords = {
    "int",  "long", "bool",   "char",  "double", "void",  "if",
    "else", "while", "for",   "return", "true",  "false", "using", "namespace"};

// Longest first so that maximal munch falls out of a linear scan.
constexpr std::array<std::string_view, 27> kOperators = {
    "::", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "++", "--", "+=", "-=", "*=",
    "/=", "%=", "+",  "-",  "*",  "/",  "%",  "<",  ">",  "=",  "!",  ".",  "&"};

constexpr std::string_view kPunctuation = "(){}[];,";

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Result<TokenStream> run() {
    TokenStream out;
    std::string trivia;
    while (true) {
      std::size_t trivia_start = pos_;
      if (auto err = skip_trivia()) return *err;
      trivia.assign(src_.substr(trivia_start, pos_ - trivia_start));
      if (pos_ >= src_.size()) break;

      int line = line_, col = col_;
      std::size_t start = pos_;
      auto kind = scan();
      if (!kind) return error_;
      Token t;
      t.kind = *kind;
      t.lexeme = std::string(src_.substr(start, pos_ - start));
      t.span = SourceSpan{line, col, last_line_, last_col_};
      t.leading = std::move(trivia);
      trivia.clear();
      out.tokens.push_back(std::move(t));
    }
    out.trailing = std::move(trivia);
    return out;
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    last_line_ = line_;
    last_col_ = col_;
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  Diagnostic diag(std::string kind, std::string message, int line, int col) const {
    return Diagnostic{Severity::Error, std::move(kind), std::move(message),
                      SourceSpan{line, col, line, col}};
  }

  std::optional<Diagnostic> skip_trivia() {
    while (pos_ < src_.size()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        int line = line_, col = col_;
        advance();
        advance();
        while (pos_ < src_.size() && !(peek() == '*' && peek(1) == '/')) advance();
        if (pos_ >= src_.size()) {
          return diag("UnterminatedComment", "block comment is never closed", line, col);
        }
        advance();
        advance();
      } else {
        break;
      }
    }
    return std::nullopt;
  }

  std::optional<TokenKind> scan() {
    char c = peek();
    if (c == '#') {
      while (pos_ < src_.size() && peek() != '\n') advance();
      return TokenKind::Directive;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      return kKeywords.count(src_.substr(start, pos_ - start)) ? TokenKind::Keyword
                                                                : TokenKind::Identifier;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    if (c == '"' || c == '\'') return quoted(c);
    for (auto op : kOperators) {
      if (src_.substr(pos_, op.size()) == op) {
        for (std::size_t i = 0; i < op.size(); ++i) advance();
        return TokenKind::Operator;
      }
    }
    if (kPunctuation.find(c) != std::string_view::npos) {
      advance();
      return TokenKind::Punctuation;
    }
    error_ = diag("UnknownCharacter",
                  std::string("unexpected character '") + c + "'", line_, col_);
    return std::nullopt;
  }

  TokenKind number() {
    bool is_double = false;
    auto digits = [&] {
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
    };
    digits();
    if (peek() == '.') {
      is_double = true;
      advance();
      digits();
    }
    if ((peek() == 'e' || peek() == 'E') &&
        (std::isdigit(static_cast<unsigned char>(peek(1))) ||
         ((peek(1) == '+' || peek(1) == '-') && std::isdigit(static_cast<unsigned char>(peek(2)))))) {
      is_double = true;
      advance();
      if (peek() == '+' || peek() == '-') advance();
      digits();
    }
    return is_double ? TokenKind::DoubleLiteral : TokenKind::IntLiteral;
  }

  std::optional<TokenKind> quoted(char quote) {
    int line = line_, col = col_;
    advance();
    while (pos_ < src_.size() && peek() != quote && peek() != '\n') {
      if (peek() == '\\' && pos_ + 1 < src_.size() && peek(1) != '\n') advance();
      advance();
    }
    if (peek() != quote) {
      error_ = diag("UnterminatedString",
                    quote == '"' ? "string literal is not terminated"
                                 : "character literal is not terminated",
                    line, col);
      return std::nullopt;
    }
    advance();
    return quote == '"' ? TokenKind::StringLiteral : TokenKind::CharLiteral;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  int last_line_ = 1, last_col_ = 1;
  Diagnostic error_;
};

}  // namespace

Result<TokenStream> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace stepviz::frontend
