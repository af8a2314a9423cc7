#include <charconv>
#include <set>

#include "stepviz/frontend.hpp"

namespace stepviz::frontend {

using namespace ccr;

namespace {

const std::set<std::string_view> kSequenceKinds = {"vector", "stack", "queue", "deque"};
const std::set<std::string_view> kMapKinds = {"map", "unordered_map"};

ContainerKind kind_from_source(std::string_view name) {
  if (name == "vector") return ContainerKind::Vector;
  if (name == "stack") return ContainerKind::Stack;
  if (name == "queue") return ContainerKind::Queue;
  if (name == "deque") return ContainerKind::Deque;
  if (name == "map") return ContainerKind::BstMap;
  return ContainerKind::HashMap;
}

// Thrown to abort on the first error; converted to a diagnostic at the API
// boundary.
struct ParseError {
  Diagnostic diag;
};

template <typename T>
ExprPtr make_expr(SourceSpan span, T node) {
  return std::make_unique<Expr>(Expr{span, std::move(node)});
}

template <typename T>
StmtPtr make_stmt(SourceSpan span, T node) {
  return std::make_unique<Stmt>(Stmt{span, std::move(node)});
}

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) {
    for (const auto& t : tokens) {
      if (t.kind != TokenKind::Directive) toks_.push_back(&t);
    }
  }

  CcrProgram program(std::string source_text) {
    CcrProgram prog;
    prog.source_text = std::move(source_text);
    while (!at_end()) {
      if (peek().is(TokenKind::Keyword, "using")) {
        using_directive();
        continue;
      }
      FunctionDef f = function();
      if (prog.functions.count(f.name)) {
        throw ParseError{Diagnostic{Severity::Error, "DuplicateFunction",
                                    "function '" + f.name + "' is defined more than once",
                                    f.header_span}};
      }
      prog.order.push_back(f.name);
      prog.functions.emplace(f.name, std::move(f));
    }
    return prog;
  }

  ExprPtr lone_expression() {
    auto e = expression();
    if (!at_end()) fail("end of input");
    return e;
  }

 private:
  // ---- token helpers ------------------------------------------------------

  bool at_end() const { return pos_ >= toks_.size(); }

  const Token& peek(std::size_t ahead = 0) const {
    static const Token kEof{TokenKind::Punctuation, "", SourceSpan{}, ""};
    return pos_ + ahead < toks_.size() ? *toks_[pos_ + ahead] : kEof;
  }

  bool check(std::string_view text, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return pos_ + ahead < toks_.size() && t.kind != TokenKind::StringLiteral &&
           t.kind != TokenKind::CharLiteral && t.lexeme == text;
  }

  bool check_ident(std::string_view text, std::size_t ahead = 0) const {
    return pos_ + ahead < toks_.size() && peek(ahead).is(TokenKind::Identifier, text);
  }

  const Token& advance() { return *toks_[pos_++]; }

  SourceSpan prev_span() const { return toks_[pos_ - 1]->span; }

  SourceSpan here() const {
    if (!at_end()) return peek().span;
    if (toks_.empty()) return SourceSpan{};
    const auto& s = toks_.back()->span;
    return SourceSpan{s.end_line, s.end_col, s.end_line, s.end_col};
  }

  [[noreturn]] void fail(const std::string& expected) const {
    std::string found = at_end() ? "end of input" : "'" + peek().lexeme + "'";
    throw ParseError{Diagnostic{Severity::Error, "SyntaxError",
                                "expected " + expected + " but found " + found, here()}};
  }

  [[noreturn]] void unsupported(const std::string& what, const SourceSpan& span) const {
    throw ParseError{Diagnostic{Severity::Error, "UnsupportedFeature", what, span}};
  }

  const Token& expect(std::string_view text) {
    if (!check(text)) fail("'" + std::string(text) + "'");
    return advance();
  }

  const Token& expect_identifier(const std::string& what = "identifier") {
    if (at_end() || peek().kind != TokenKind::Identifier) fail(what);
    return advance();
  }

  bool accept(std::string_view text) {
    if (!check(text)) return false;
    ++pos_;
    return true;
  }

  // Skips an optional `std::` qualifier in front of a library name.
  void skip_std() {
    if (check_ident("std") && check("::", 1)) pos_ += 2;
  }

  std::size_t after_std() const { return check_ident("std") && check("::", 1) ? 2 : 0; }

  // ---- top level ----------------------------------------------------------

  void using_directive() {
    advance();
    expect("namespace");
    if (!check_ident("std")) fail("'std'");
    advance();
    expect(";");
  }

  bool type_start(std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    if (pos_ + ahead >= toks_.size()) return false;
    if (t.kind == TokenKind::Keyword) {
      return t.lexeme == "int" || t.lexeme == "long" || t.lexeme == "bool" ||
             t.lexeme == "char" || t.lexeme == "double";
    }
    if (t.kind != TokenKind::Identifier) return false;
    if (t.lexeme == "std" && check("::", ahead + 1)) return type_start(ahead + 2);
    return t.lexeme == "string" || kSequenceKinds.count(t.lexeme) || kMapKinds.count(t.lexeme);
  }

  ScalarType scalar_type() {
    skip_std();
    if (accept("int")) return ScalarType::Int;
    if (accept("long")) {
      accept("long");
      accept("int");
      return ScalarType::Int;
    }
    if (accept("bool")) return ScalarType::Bool;
    if (accept("char")) return ScalarType::Char;
    if (accept("double")) return ScalarType::Double;
    if (check_ident("string")) {
      advance();
      return ScalarType::String;
    }
    if (check_ident("vector") || check_ident("map") || check_ident("stack") ||
        check_ident("queue") || check_ident("deque") || check_ident("unordered_map")) {
      unsupported("containers of containers are not supported", peek().span);
    }
    fail("scalar type");
  }

  TypeTag type() {
    skip_std();
    if (!at_end() && peek().kind == TokenKind::Identifier &&
        (kSequenceKinds.count(peek().lexeme) || kMapKinds.count(peek().lexeme))) {
      const Token& name = advance();
      ContainerType c;
      c.kind = kind_from_source(name.lexeme);
      expect("<");
      if (is_keyed(c.kind)) {
        c.key = scalar_type();
        expect(",");
      }
      c.elem = scalar_type();
      if (check(">>")) unsupported("containers of containers are not supported", peek().span);
      expect(">");
      return c;
    }
    return scalar_type();
  }

  FunctionDef function() {
    FunctionDef f;
    SourceSpan start = here();
    if (accept("void")) {
      f.return_type = std::nullopt;
    } else if (type_start()) {
      f.return_type = type();
    } else {
      fail("function definition");
    }
    f.name = expect_identifier("function name").lexeme;
    expect("(");
    if (!check(")")) {
      do {
        f.params.push_back(param());
      } while (accept(","));
    }
    expect(")");
    f.header_span = SourceSpan::cover(start, prev_span());
    if (!check("{")) fail("'{'");
    f.body = block(BlockRole::FunctionBody);
    f.span = SourceSpan::cover(start, prev_span());
    return f;
  }

  Param param() {
    SourceSpan start = here();
    if (!type_start()) fail("parameter type");
    Param p;
    p.type = type();
    bool by_ref = accept("&");
    bool container = std::holds_alternative<ContainerType>(p.type);
    if (container && !by_ref) {
      unsupported("containers must be passed by reference", SourceSpan::cover(start, prev_span()));
    }
    if (!container && by_ref) {
      unsupported("only container parameters may be references",
                  SourceSpan::cover(start, prev_span()));
    }
    p.name = expect_identifier("parameter name").lexeme;
    p.span = SourceSpan::cover(start, prev_span());
    return p;
  }

  // ---- statements ---------------------------------------------------------

  StmtPtr block(BlockRole role) {
    SourceSpan start = expect("{").span;
    Block b;
    b.role = role;
    while (!check("}")) {
      if (at_end()) fail("'}'");
      b.stmts.push_back(statement());
    }
    advance();
    return make_stmt(SourceSpan::cover(start, prev_span()), std::move(b));
  }

  // Body of if/while/for: a braced block opens a scope without its own frame.
  StmtPtr branch() {
    if (check("{")) return block(BlockRole::Branch);
    return statement();
  }

  StmtPtr statement() {
    if (check("{")) return block(BlockRole::Plain);
    if (check("if")) return if_statement();
    if (check("while")) return while_statement();
    if (check("for")) return for_statement();
    if (check("return")) return return_statement();
    std::size_t q = after_std();
    if (check_ident("cout", q)) return print_statement();
    if (check_ident("cin", q)) return read_statement();
    SourceSpan start = here();
    StmtPtr s = simple_statement();
    expect(";");
    s->span = SourceSpan::cover(start, prev_span());
    return s;
  }

  // Declaration, assignment, increment or expression, without the `;`.
  StmtPtr simple_statement() {
    SourceSpan start = here();
    if (type_start()) return declaration();
    if (check("++") || check("--")) {
      bool inc = advance().lexeme == "++";
      ExprPtr target = postfix();
      return make_stmt(SourceSpan::cover(start, prev_span()),
                       Assign{inc ? AssignOp::Increment : AssignOp::Decrement,
                              std::move(target), nullptr, true});
    }
    ExprPtr e = expression();
    static const std::pair<std::string_view, AssignOp> kAssignOps[] = {
        {"=", AssignOp::Set},  {"+=", AssignOp::Add}, {"-=", AssignOp::Sub},
        {"*=", AssignOp::Mul}, {"/=", AssignOp::Div}, {"%=", AssignOp::Mod}};
    for (const auto& [text, op] : kAssignOps) {
      if (accept(text)) {
        ExprPtr value = expression();
        return make_stmt(SourceSpan::cover(start, prev_span()),
                         Assign{op, std::move(e), std::move(value), false});
      }
    }
    if (check("++") || check("--")) {
      bool inc = advance().lexeme == "++";
      return make_stmt(SourceSpan::cover(start, prev_span()),
                       Assign{inc ? AssignOp::Increment : AssignOp::Decrement, std::move(e),
                              nullptr, false});
    }
    return make_stmt(SourceSpan::cover(start, prev_span()), ExprStmt{std::move(e)});
  }

  StmtPtr declaration() {
    SourceSpan start = here();
    VarDecl d;
    d.type = type();
    if (std::holds_alternative<ContainerType>(d.type)) {
      const Token& name = expect_identifier("variable name");
      d.declarators.push_back({name.lexeme, name.span, nullptr});
      if (accept("(")) {
        if (!check(")")) {
          do {
            d.ctor_args.push_back(expression());
          } while (accept(","));
        }
        expect(")");
      } else if (accept("=")) {
        d.init_list = init_list();
      } else if (check("{")) {
        d.init_list = init_list();
      }
    } else {
      do {
        const Token& name = expect_identifier("variable name");
        VarDecl::Declarator decl{name.lexeme, name.span, nullptr};
        if (accept("=")) decl.init = expression();
        d.declarators.push_back(std::move(decl));
      } while (accept(","));
    }
    return make_stmt(SourceSpan::cover(start, prev_span()), std::move(d));
  }

  std::vector<ExprPtr> init_list() {
    expect("{");
    std::vector<ExprPtr> items;
    if (!check("}")) {
      do {
        items.push_back(expression());
      } while (accept(","));
    }
    expect("}");
    return items;
  }

  StmtPtr if_statement() {
    SourceSpan start = advance().span;
    expect("(");
    ExprPtr cond = expression();
    expect(")");
    StmtPtr then_branch = branch();
    StmtPtr else_branch;
    if (accept("else")) else_branch = branch();
    return make_stmt(SourceSpan::cover(start, prev_span()),
                     If{std::move(cond), std::move(then_branch), std::move(else_branch)});
  }

  StmtPtr while_statement() {
    SourceSpan start = advance().span;
    expect("(");
    ExprPtr cond = expression();
    expect(")");
    StmtPtr body = branch();
    return make_stmt(SourceSpan::cover(start, prev_span()),
                     While{std::move(cond), std::move(body), false});
  }

  // for (init; cond; step) body  ==>
  //   ForScope{ init; While{cond, ForBody{ body; step }} }
  // with every synthesized node carrying the span of the whole loop.
  StmtPtr for_statement() {
    SourceSpan start = advance().span;
    expect("(");
    StmtPtr init;
    if (!check(";")) {
      SourceSpan init_start = here();
      init = simple_statement();
      if (const auto* d = as<VarDecl>(*init); d && d->declarators.size() != 1) {
        unsupported("a for-loop may declare only one variable", init->span);
      }
      init->span = SourceSpan::cover(init_start, prev_span());
    }
    expect(";");
    ExprPtr cond;
    if (!check(";")) cond = expression();
    SourceSpan cond_end = expect(";").span;
    StmtPtr step;
    if (!check(")")) {
      step = simple_statement();
      if (as<VarDecl>(*step)) unsupported("declarations are not allowed in a for-loop step", step->span);
    }
    expect(")");
    StmtPtr body = branch();
    SourceSpan whole = SourceSpan::cover(start, prev_span());
    if (!cond) cond = make_expr(cond_end, Literal{true});

    Block inner;
    inner.role = BlockRole::ForBody;
    inner.stmts.push_back(std::move(body));
    if (step) inner.stmts.push_back(std::move(step));
    Block outer;
    outer.role = BlockRole::ForScope;
    if (init) outer.stmts.push_back(std::move(init));
    outer.stmts.push_back(make_stmt(
        whole, While{std::move(cond), make_stmt(whole, std::move(inner)), true}));
    return make_stmt(whole, std::move(outer));
  }

  StmtPtr return_statement() {
    SourceSpan start = advance().span;
    ExprPtr value;
    if (!check(";")) value = expression();
    expect(";");
    return make_stmt(SourceSpan::cover(start, prev_span()), Return{std::move(value)});
  }

  StmtPtr print_statement() {
    SourceSpan start = here();
    skip_std();
    advance();
    Print p;
    if (!check("<<")) fail("'<<'");
    while (accept("<<")) {
      std::size_t q = after_std();
      if (check_ident("endl", q)) {
        pos_ += q + 1;
        p.items.push_back(nullptr);
      } else {
        p.items.push_back(expression());
      }
    }
    expect(";");
    return make_stmt(SourceSpan::cover(start, prev_span()), std::move(p));
  }

  StmtPtr read_statement() {
    SourceSpan start = here();
    skip_std();
    advance();
    Read r;
    if (!check(">>")) fail("'>>'");
    while (accept(">>")) r.targets.push_back(postfix());
    expect(";");
    return make_stmt(SourceSpan::cover(start, prev_span()), std::move(r));
  }

  // ---- expressions --------------------------------------------------------

  ExprPtr expression() { return logical_or(); }

  using SubParser = ExprPtr (Parser::*)();

  ExprPtr left_assoc(SubParser next, std::initializer_list<std::pair<std::string_view, BinaryOp>> ops) {
    ExprPtr lhs = (this->*next)();
    while (true) {
      bool matched = false;
      for (const auto& [text, op] : ops) {
        if (check(text) && peek().kind == TokenKind::Operator) {
          advance();
          ExprPtr rhs = (this->*next)();
          SourceSpan span = SourceSpan::cover(lhs->span, rhs->span);
          lhs = make_expr(span, Binary{op, std::move(lhs), std::move(rhs)});
          matched = true;
          break;
        }
      }
      if (!matched) return lhs;
    }
  }

  ExprPtr logical_or() { return left_assoc(&Parser::logical_and, {{"||", BinaryOp::Or}}); }
  ExprPtr logical_and() { return left_assoc(&Parser::equality, {{"&&", BinaryOp::And}}); }
  ExprPtr equality() {
    return left_assoc(&Parser::relational, {{"==", BinaryOp::Eq}, {"!=", BinaryOp::Ne}});
  }
  ExprPtr relational() {
    return left_assoc(&Parser::additive, {{"<=", BinaryOp::Le},
                                          {">=", BinaryOp::Ge},
                                          {"<", BinaryOp::Lt},
                                          {">", BinaryOp::Gt}});
  }
  ExprPtr additive() {
    return left_assoc(&Parser::multiplicative, {{"+", BinaryOp::Add}, {"-", BinaryOp::Sub}});
  }
  ExprPtr multiplicative() {
    return left_assoc(&Parser::unary,
                      {{"*", BinaryOp::Mul}, {"/", BinaryOp::Div}, {"%", BinaryOp::Mod}});
  }

  ExprPtr unary() {
    if (check("-") || check("!")) {
      SourceSpan start = peek().span;
      UnaryOp op = advance().lexeme == "-" ? UnaryOp::Neg : UnaryOp::Not;
      ExprPtr operand = unary();
      SourceSpan span = SourceSpan::cover(start, operand->span);
      return make_expr(span, Unary{op, std::move(operand)});
    }
    return postfix();
  }

  ExprPtr postfix() {
    ExprPtr e = primary();
    while (true) {
      if (accept("[")) {
        ExprPtr index = expression();
        expect("]");
        SourceSpan span = SourceSpan::cover(e->span, prev_span());
        e = make_expr(span, IndexAccess{std::move(e), std::move(index)});
      } else if (check(".")) {
        advance();
        const Token& name = expect_identifier("method name");
        std::string method = name.lexeme;
        expect("(");
        std::vector<ExprPtr> args;
        if (method == "insert" && check("{")) {
          advance();
          args.push_back(expression());
          expect(",");
          args.push_back(expression());
          expect("}");
        } else if (!check(")")) {
          do {
            args.push_back(expression());
          } while (accept(","));
        }
        expect(")");
        if (method == "find") {
          e = find_comparison(std::move(e), std::move(args));
          continue;
        }
        SourceSpan span = SourceSpan::cover(e->span, prev_span());
        e = make_expr(span, ContainerMethodCall{std::move(e), method, std::move(args)});
      } else {
        return e;
      }
    }
  }

  // `m.find(k) != m.end()` -> find(k); `m.find(k) == m.end()` -> !find(k).
  ExprPtr find_comparison(ExprPtr receiver, std::vector<ExprPtr> args) {
    SourceSpan find_span = SourceSpan::cover(receiver->span, prev_span());
    const auto* recv = as<VarRef>(*receiver);
    bool negate;
    if (accept("!=")) {
      negate = false;
    } else if (accept("==")) {
      negate = true;
    } else {
      fail("comparison of find() with end()");
    }
    if (!recv || !check_ident(recv->name)) fail("'" + (recv ? recv->name : std::string("receiver")) + ".end()'");
    advance();
    expect(".");
    if (!check_ident("end")) fail("'end'");
    advance();
    expect("(");
    expect(")");
    SourceSpan whole = SourceSpan::cover(find_span, prev_span());
    ExprPtr call = make_expr(whole, ContainerMethodCall{std::move(receiver), "find", std::move(args)});
    if (!negate) return call;
    return make_expr(whole, Unary{UnaryOp::Not, std::move(call)});
  }

  ExprPtr primary() {
    if (at_end()) fail("expression");
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::IntLiteral: {
        advance();
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(t.lexeme.data(), t.lexeme.data() + t.lexeme.size(), v);
        if (ec != std::errc{} || p != t.lexeme.data() + t.lexeme.size()) {
          throw ParseError{Diagnostic{Severity::Error, "InvalidLiteral",
                                      "integer literal '" + t.lexeme + "' is out of range", t.span}};
        }
        return make_expr(t.span, Literal{v});
      }
      case TokenKind::DoubleLiteral: {
        advance();
        double v = 0;
        auto [p, ec] = std::from_chars(t.lexeme.data(), t.lexeme.data() + t.lexeme.size(), v);
        if (ec != std::errc{}) {
          throw ParseError{Diagnostic{Severity::Error, "InvalidLiteral",
                                      "floating literal '" + t.lexeme + "' is out of range", t.span}};
        }
        return make_expr(t.span, Literal{v});
      }
      case TokenKind::CharLiteral: {
        advance();
        std::string body = unescape(t);
        if (body.size() != 1) {
          throw ParseError{Diagnostic{Severity::Error, "InvalidLiteral",
                                      "character literal must hold exactly one character", t.span}};
        }
        return make_expr(t.span, Literal{body[0]});
      }
      case TokenKind::StringLiteral:
        advance();
        return make_expr(t.span, Literal{unescape(t)});
      case TokenKind::Keyword:
        if (t.lexeme == "true" || t.lexeme == "false") {
          advance();
          return make_expr(t.span, Literal{t.lexeme == "true"});
        }
        break;
      case TokenKind::Identifier: {
        advance();
        if (accept("(")) {
          std::vector<ExprPtr> args;
          if (!check(")")) {
            do {
              args.push_back(expression());
            } while (accept(","));
          }
          expect(")");
          return make_expr(SourceSpan::cover(t.span, prev_span()),
                           FunctionCall{t.lexeme, std::move(args)});
        }
        return make_expr(t.span, VarRef{t.lexeme});
      }
      case TokenKind::Punctuation:
        if (t.lexeme == "(") {
          advance();
          ExprPtr e = expression();
          expect(")");
          return e;
        }
        break;
      default:
        break;
    }
    fail("expression");
  }

  static std::string unescape(const Token& t) {
    std::string out;
    const std::string& s = t.lexeme;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      char c = s[i];
      if (c != '\\') {
        out += c;
        continue;
      }
      char e = s[++i];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case '0': out += '\0'; break;
        case 'r': out += '\r'; break;
        case '\\': out += '\\'; break;
        case '\'': out += '\''; break;
        case '"': out += '"'; break;
        default:
          throw ParseError{Diagnostic{Severity::Error, "InvalidLiteral",
                                      std::string("unknown escape sequence '\\") + e + "'", t.span}};
      }
    }
    return out;
  }

  std::vector<const Token*> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Result<CcrProgram> parse(const TokenStream& tokens, std::string source_text) {
  try {
    return Parser(tokens.tokens).program(std::move(source_text));
  } catch (const ParseError& e) {
    return e.diag;
  }
}

Result<ExprPtr> parse_expression(std::string_view source) {
  auto lexed = tokenize(source);
  if (!lexed) return lexed.diagnostics();
  try {
    return Parser(lexed.value().tokens).lone_expression();
  } catch (const ParseError& e) {
    return e.diag;
  }
}

Result<CcrProgram> compile(std::string_view source) {
  auto lexed = tokenize(source);
  if (!lexed) return lexed.diagnostics();
  auto parsed = parse(lexed.value(), std::string(source));
  if (!parsed) return parsed.diagnostics();
  Diagnostics diags = validate(parsed.value());
  if (!diags.empty()) return diags;
  return std::move(parsed).value();
}

}  // namespace stepviz::frontend
