#include <map>
#include <optional>
#include <set>

#include "stepviz/ccr.hpp"

namespace stepviz::ccr {

namespace {

// Static type of an expression; `error` suppresses cascading diagnostics.
struct Ty {
  bool error = false;
  bool is_void = false;
  TypeTag tag = ScalarType::Int;

  static Ty err() { return Ty{true, false, ScalarType::Int}; }
  static Ty none() { return Ty{false, true, ScalarType::Int}; }
  static Ty of(TypeTag t) { return Ty{false, false, t}; }

  const ScalarType* scalar() const {
    return error || is_void ? nullptr : std::get_if<ScalarType>(&tag);
  }
  const ContainerType* container() const {
    return error || is_void ? nullptr : std::get_if<ContainerType>(&tag);
  }
};

bool integral(ScalarType t) { return t == ScalarType::Int || t == ScalarType::Char; }
bool numeric(ScalarType t) { return integral(t) || t == ScalarType::Double; }
bool condition_like(ScalarType t) { return t == ScalarType::Bool || integral(t); }

// Implicit conversions permitted on initialisation, assignment and argument
// passing: identity, char -> int, and int/char -> double.
bool assignable(ScalarType to, ScalarType from) {
  if (to == from) return true;
  if (to == ScalarType::Int) return from == ScalarType::Char;
  if (to == ScalarType::Double) return integral(from);
  return false;
}

class Checker {
 public:
  explicit Checker(const CcrProgram& p) : program_(p), lines_(count_lines(p.source_text)) {}

  Diagnostics run() {
    check_entry();
    for (const auto& name : program_.order) {
      auto it = program_.functions.find(name);
      if (it != program_.functions.end()) check_function(it->second);
    }
    return std::move(diags_);
  }

 private:
  void report(std::string kind, std::string message, const SourceSpan& span) {
    diags_.push_back(Diagnostic{Severity::Error, std::move(kind), std::move(message), span});
  }

  void check_span(const SourceSpan& s) {
    if (s.start_line < 1 || s.end_line > lines_ || s.start_line > s.end_line ||
        s.start_col < 1 || s.end_col < 1) {
      report("SpanOutOfRange", "source span " + s.to_string() + " lies outside the source text", s);
    }
  }

  void check_entry() {
    auto it = program_.functions.find(program_.entry);
    if (it == program_.functions.end()) {
      report("MissingEntry", "program has no '" + program_.entry + "' function", SourceSpan{});
      return;
    }
    const auto& f = it->second;
    bool int_return = f.return_type && *f.return_type == TypeTag{ScalarType::Int};
    if (!f.params.empty() || !int_return) {
      report("BadEntrySignature",
             "'" + program_.entry + "' must take no parameters and return int",
             f.header_span);
    }
  }

  void check_function(const FunctionDef& f) {
    current_ = &f;
    check_span(f.span);
    check_span(f.header_span);
    scopes_.clear();
    scopes_.emplace_back();
    std::set<std::string> seen;
    for (const auto& p : f.params) {
      check_span(p.span);
      check_type(p.type, p.span);
      if (!seen.insert(p.name).second) {
        report("DuplicateParameter", "parameter '" + p.name + "' declared twice", p.span);
        continue;
      }
      scopes_.back()[p.name] = p.type;
    }
    if (!f.body) return;
    check_span(f.body->span);
    if (const auto* b = as<Block>(*f.body)) {
      for (const auto& s : b->stmts) stmt(*s);
    }
    scopes_.clear();
  }

  void check_type(const TypeTag& t, const SourceSpan& span) {
    const auto* c = std::get_if<ContainerType>(&t);
    if (!c) return;
    if (is_keyed(c->kind) != c->key.has_value()) {
      report("MalformedType", "container type '" + type_name(t) + "' has the wrong arity", span);
    }
    if (c->kind == ContainerKind::HashMap && c->key && *c->key != ScalarType::Int) {
      report("UnsupportedKeyType", "unordered_map keys must be int", span);
    }
  }

  std::optional<TypeTag> lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return f->second;
    }
    return std::nullopt;
  }

  void declare(const std::string& name, const TypeTag& t, const SourceSpan& span) {
    auto& scope = scopes_.back();
    if (scope.count(name)) {
      report("Redeclaration", "'" + name + "' is already declared in this scope", span);
      return;
    }
    scope[name] = t;
  }

  // ---- statements ---------------------------------------------------------

  void stmt(const Stmt& s) {
    check_span(s.span);
    std::visit([&](const auto& x) { visit_stmt(x, s); }, s.node);
  }

  void block_scope(const Stmt& s) {
    scopes_.emplace_back();
    stmt(s);
    scopes_.pop_back();
  }

  void visit_stmt(const Block& b, const Stmt&) {
    scopes_.emplace_back();
    for (const auto& c : b.stmts) stmt(*c);
    scopes_.pop_back();
  }

  void visit_stmt(const VarDecl& d, const Stmt& s) {
    check_type(d.type, s.span);
    if (const auto* c = std::get_if<ContainerType>(&d.type)) {
      bool sequence_init = c->kind == ContainerKind::Vector || c->kind == ContainerKind::Deque;
      if (!d.ctor_args.empty()) {
        if (!sequence_init || d.ctor_args.size() > 2) {
          report("IllegalConstructor",
                 "'" + type_name(d.type) + "' cannot be constructed with these arguments", s.span);
        } else {
          expect_integral(*d.ctor_args[0], "element count");
          if (d.ctor_args.size() == 2) expect_assignable(c->elem, *d.ctor_args[1]);
        }
      }
      if (d.init_list) {
        if (!sequence_init) {
          report("IllegalConstructor",
                 "'" + type_name(d.type) + "' cannot be list-initialised", s.span);
        } else {
          for (const auto& item : *d.init_list) expect_assignable(c->elem, *item);
        }
      }
      for (const auto& decl : d.declarators) {
        check_span(decl.name_span);
        declare(decl.name, d.type, decl.name_span);
      }
      return;
    }
    const auto t = std::get<ScalarType>(d.type);
    for (const auto& decl : d.declarators) {
      check_span(decl.name_span);
      if (decl.init) expect_assignable(t, *decl.init);
      declare(decl.name, d.type, decl.name_span);
    }
  }

  void visit_stmt(const Assign& a, const Stmt& s) {
    Ty target = lvalue(*a.target);
    if (target.error) {
      if (a.value) expr(*a.value);
      return;
    }
    const auto* t = target.scalar();
    if (!t) {
      report("InvalidAssignmentTarget", "only scalar variables and elements can be assigned",
             a.target->span);
      if (a.value) expr(*a.value);
      return;
    }
    switch (a.op) {
      case AssignOp::Set:
        expect_assignable(*t, *a.value);
        return;
      case AssignOp::Increment:
      case AssignOp::Decrement:
        if (!numeric(*t)) {
          report("TypeMismatch", "cannot increment a value of type " + std::string(to_string(*t)),
                 s.span);
        }
        return;
      default:
        break;
    }
    Ty v = expr(*a.value);
    const auto* vs = v.scalar();
    if (!vs) {
      if (!v.error) report("TypeMismatch", "compound assignment needs a scalar operand", a.value->span);
      return;
    }
    static const std::map<AssignOp, BinaryOp> kOps = {
        {AssignOp::Add, BinaryOp::Add}, {AssignOp::Sub, BinaryOp::Sub},
        {AssignOp::Mul, BinaryOp::Mul}, {AssignOp::Div, BinaryOp::Div},
        {AssignOp::Mod, BinaryOp::Mod}};
    auto r = binary_result(kOps.at(a.op), *t, *vs);
    if (!r || !assignable(*t, *r)) {
      report("TypeMismatch",
             "cannot apply '" + std::string(to_string(kOps.at(a.op))) + "=' to " +
                 std::string(to_string(*t)) + " and " + std::string(to_string(*vs)),
             s.span);
    }
  }

  void visit_stmt(const If& i, const Stmt&) {
    expect_condition(*i.cond);
    block_scope(*i.then_branch);
    if (i.else_branch) block_scope(*i.else_branch);
  }

  void visit_stmt(const While& w, const Stmt&) {
    expect_condition(*w.cond);
    block_scope(*w.body);
  }

  void visit_stmt(const Return& r, const Stmt& s) {
    if (!current_->return_type) {
      if (r.value) {
        expr(*r.value);
        report("TypeMismatch", "void function '" + current_->name + "' cannot return a value", s.span);
      }
      return;
    }
    if (!r.value) {
      report("TypeMismatch", "function '" + current_->name + "' must return a value", s.span);
      return;
    }
    const auto* rt = std::get_if<ScalarType>(&*current_->return_type);
    if (!rt) {
      report("TypeMismatch", "functions cannot return containers", current_->header_span);
      expr(*r.value);
      return;
    }
    expect_assignable(*rt, *r.value);
  }

  void visit_stmt(const ExprStmt& e, const Stmt&) { expr(*e.expr); }

  void visit_stmt(const Print& p, const Stmt&) {
    for (const auto& item : p.items) {
      if (!item) continue;
      Ty t = expr(*item);
      if (!t.error && !t.scalar()) {
        report("TypeMismatch", "only scalar values can be printed", item->span);
      }
    }
  }

  void visit_stmt(const Read& r, const Stmt&) {
    for (const auto& target : r.targets) {
      Ty t = lvalue(*target);
      if (!t.error && !t.scalar()) {
        report("InvalidAssignmentTarget", "input can only be read into scalar locations",
               target->span);
      }
    }
  }

  // ---- expressions --------------------------------------------------------

  void expect_assignable(ScalarType to, const Expr& e) {
    Ty t = expr(e);
    if (t.error) return;
    const auto* s = t.scalar();
    if (!s || !assignable(to, *s)) {
      report("TypeMismatch",
             "expected " + std::string(to_string(to)) + " but found " +
                 (t.is_void ? std::string("void") : type_name(t.tag)),
             e.span);
    }
  }

  void expect_integral(const Expr& e, const std::string& what) {
    Ty t = expr(e);
    if (t.error) return;
    const auto* s = t.scalar();
    if (!s || !integral(*s)) report("TypeMismatch", what + " must be an integer", e.span);
  }

  void expect_condition(const Expr& e) {
    Ty t = expr(e);
    if (t.error) return;
    const auto* s = t.scalar();
    if (!s || !condition_like(*s)) report("TypeMismatch", "condition must be bool or integer", e.span);
  }

  // Assignable location: scalar variable or writable element.
  Ty lvalue(const Expr& e) {
    check_span(e.span);
    if (as<VarRef>(e)) return expr(e);
    if (const auto* ix = as<IndexAccess>(e)) {
      Ty r = expr(*ix->receiver);
      if (r.error) {
        expr(*ix->index);
        return Ty::err();
      }
      if (const auto* c = r.container(); c && !supports_index_write(c->kind)) {
        report("IllegalMethod",
               "elements of '" + type_name(r.tag) + "' cannot be assigned through []", e.span);
        expr(*ix->index);
        return Ty::err();
      }
      if (r.scalar() && *r.scalar() == ScalarType::String) {
        report("InvalidAssignmentTarget", "string characters are read-only", e.span);
        expr(*ix->index);
        return Ty::err();
      }
      return expr(e);
    }
    report("InvalidAssignmentTarget", "expression is not assignable", e.span);
    expr(e);
    return Ty::err();
  }

  static std::optional<ScalarType> binary_result(BinaryOp op, ScalarType l, ScalarType r) {
    switch (op) {
      case BinaryOp::Add:
        if (l == ScalarType::String && (r == ScalarType::String || r == ScalarType::Char)) {
          return ScalarType::String;
        }
        if (r == ScalarType::String && l == ScalarType::Char) return ScalarType::String;
        [[fallthrough]];
      case BinaryOp::Sub:
      case BinaryOp::Mul:
      case BinaryOp::Div:
        if (!numeric(l) || !numeric(r)) return std::nullopt;
        return (l == ScalarType::Double || r == ScalarType::Double) ? ScalarType::Double
                                                                    : ScalarType::Int;
      case BinaryOp::Mod:
        if (!integral(l) || !integral(r)) return std::nullopt;
        return ScalarType::Int;
      case BinaryOp::Lt:
      case BinaryOp::Le:
      case BinaryOp::Gt:
      case BinaryOp::Ge:
        if ((numeric(l) && numeric(r)) || (l == ScalarType::String && r == ScalarType::String)) {
          return ScalarType::Bool;
        }
        return std::nullopt;
      case BinaryOp::Eq:
      case BinaryOp::Ne:
        if ((numeric(l) && numeric(r)) || l == r) return ScalarType::Bool;
        return std::nullopt;
      case BinaryOp::And:
      case BinaryOp::Or:
        if (condition_like(l) && condition_like(r)) return ScalarType::Bool;
        return std::nullopt;
    }
    return std::nullopt;
  }

  Ty expr(const Expr& e) {
    check_span(e.span);
    return std::visit([&](const auto& x) { return visit_expr(x, e); }, e.node);
  }

  Ty visit_expr(const Literal& l, const Expr& e) {
    auto t = scalar_type_of(l.value);
    if (!t) {
      report("TypeMismatch", "literal must be a scalar", e.span);
      return Ty::err();
    }
    return Ty::of(*t);
  }

  Ty visit_expr(const VarRef& v, const Expr& e) {
    auto t = lookup(v.name);
    if (!t) {
      report("UnresolvedName", "'" + v.name + "' was not declared in this scope", e.span);
      return Ty::err();
    }
    return Ty::of(*t);
  }

  Ty visit_expr(const Binary& b, const Expr& e) {
    Ty l = expr(*b.lhs);
    Ty r = expr(*b.rhs);
    if (l.error || r.error) return Ty::err();
    const auto* ls = l.scalar();
    const auto* rs = r.scalar();
    std::optional<ScalarType> res;
    if (ls && rs) res = binary_result(b.op, *ls, *rs);
    if (!res) {
      report("TypeMismatch",
             "operator '" + std::string(to_string(b.op)) + "' cannot be applied to " +
                 (l.is_void ? "void" : type_name(l.tag)) + " and " +
                 (r.is_void ? "void" : type_name(r.tag)),
             e.span);
      return Ty::err();
    }
    return Ty::of(*res);
  }

  Ty visit_expr(const Unary& u, const Expr& e) {
    Ty t = expr(*u.operand);
    if (t.error) return Ty::err();
    const auto* s = t.scalar();
    if (u.op == UnaryOp::Neg && s && numeric(*s)) {
      return Ty::of(*s == ScalarType::Double ? ScalarType::Double : ScalarType::Int);
    }
    if (u.op == UnaryOp::Not && s && condition_like(*s)) return Ty::of(ScalarType::Bool);
    report("TypeMismatch", "operator '" + std::string(to_string(u.op)) + "' cannot be applied here",
           e.span);
    return Ty::err();
  }

  Ty visit_expr(const FunctionCall& c, const Expr& e) {
    auto it = program_.functions.find(c.callee);
    if (it == program_.functions.end()) {
      report("UnresolvedName", "function '" + c.callee + "' is not defined", e.span);
      for (const auto& a : c.args) expr(*a);
      return Ty::err();
    }
    const auto& f = it->second;
    if (f.params.size() != c.args.size()) {
      report("ArityMismatch",
             "'" + c.callee + "' expects " + std::to_string(f.params.size()) +
                 " argument(s) but got " + std::to_string(c.args.size()),
             e.span);
      for (const auto& a : c.args) expr(*a);
    } else {
      for (std::size_t i = 0; i < c.args.size(); ++i) {
        const auto& p = f.params[i];
        if (const auto* pt = std::get_if<ScalarType>(&p.type)) {
          expect_assignable(*pt, *c.args[i]);
          continue;
        }
        Ty a = expr(*c.args[i]);
        if (a.error) continue;
        if (!as<VarRef>(*c.args[i]) || a.is_void || a.tag != p.type) {
          report("TypeMismatch",
                 "argument " + std::to_string(i + 1) + " of '" + c.callee +
                     "' must be a variable of type " + type_name(p.type),
                 c.args[i]->span);
        }
      }
    }
    if (!f.return_type) return Ty::none();
    return Ty::of(*f.return_type);
  }

  Ty visit_expr(const ContainerMethodCall& m, const Expr& e) {
    Ty r = expr(*m.receiver);
    if (r.error) {
      for (const auto& a : m.args) expr(*a);
      return Ty::err();
    }
    if (r.scalar() && *r.scalar() == ScalarType::String) {
      if ((m.method == "size" || m.method == "length") && m.args.empty()) {
        return Ty::of(ScalarType::Int);
      }
      report("IllegalMethod", "string has no method '" + m.method + "' in this subset", e.span);
      return Ty::err();
    }
    const auto* c = r.container();
    if (!c) {
      report("TypeMismatch", "methods can only be called on containers and strings", e.span);
      return Ty::err();
    }
    if (!as<VarRef>(*m.receiver)) {
      report("TypeMismatch", "method receiver must be a container variable", m.receiver->span);
      return Ty::err();
    }
    if (!is_legal_method(c->kind, m.method)) {
      report("IllegalMethod",
             "'" + m.method + "' is not a method of " + std::string(source_name(c->kind)), e.span);
      for (const auto& a : m.args) expr(*a);
      return Ty::err();
    }
    auto arity = [&](std::size_t n) {
      if (m.args.size() == n) return true;
      report("ArityMismatch",
             "'" + m.method + "' expects " + std::to_string(n) + " argument(s)", e.span);
      for (const auto& a : m.args) expr(*a);
      return false;
    };
    const std::string& name = m.method;
    if (name == "size") return arity(0) ? Ty::of(ScalarType::Int) : Ty::err();
    if (name == "empty") return arity(0) ? Ty::of(ScalarType::Bool) : Ty::err();
    if (name == "push_back" || name == "push_front" || name == "push") {
      if (!arity(1)) return Ty::err();
      expect_assignable(c->elem, *m.args[0]);
      return Ty::none();
    }
    if (name == "pop_back" || name == "pop_front" || name == "pop") {
      return arity(0) ? Ty::none() : Ty::err();
    }
    if (name == "top" || name == "front" || name == "back") {
      return arity(0) ? Ty::of(c->elem) : Ty::err();
    }
    if (name == "insert") {
      if (!arity(2)) return Ty::err();
      expect_assignable(*c->key, *m.args[0]);
      expect_assignable(c->elem, *m.args[1]);
      return Ty::none();
    }
    // erase / count / find take one key.
    if (!arity(1)) return Ty::err();
    expect_assignable(*c->key, *m.args[0]);
    return Ty::of(name == "find" ? ScalarType::Bool : ScalarType::Int);
  }

  Ty visit_expr(const IndexAccess& ix, const Expr& e) {
    Ty r = expr(*ix.receiver);
    if (r.error) {
      expr(*ix.index);
      return Ty::err();
    }
    if (r.scalar() && *r.scalar() == ScalarType::String) {
      expect_integral(*ix.index, "string index");
      return Ty::of(ScalarType::Char);
    }
    const auto* c = r.container();
    if (!c || !supports_index_read(c->kind)) {
      report(c ? "IllegalMethod" : "TypeMismatch",
             "'" + (r.is_void ? std::string("void") : type_name(r.tag)) + "' does not support []",
             e.span);
      expr(*ix.index);
      return Ty::err();
    }
    if (!as<VarRef>(*ix.receiver)) {
      report("TypeMismatch", "indexed container must be a variable", ix.receiver->span);
      return Ty::err();
    }
    if (c->key) {
      expect_assignable(*c->key, *ix.index);
    } else {
      expect_integral(*ix.index, "index");
    }
    return Ty::of(c->elem);
  }

  const CcrProgram& program_;
  int lines_;
  const FunctionDef* current_ = nullptr;
  std::vector<std::map<std::string, TypeTag>> scopes_;
  Diagnostics diags_;
};

}  // namespace

Diagnostics validate(const CcrProgram& program) { return Checker(program).run(); }

}  // namespace stepviz::ccr
