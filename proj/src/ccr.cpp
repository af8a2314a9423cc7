#include <algorithm>
#include <array>
#include <sstream>

#include "stepviz/ccr.hpp"

namespace stepviz::ccr {

std::string type_name(const TypeTag& t) {
  if (const auto* s = std::get_if<ScalarType>(&t)) return std::string(to_string(*s));
  const auto& c = std::get<ContainerType>(t);
  std::string out(source_name(c.kind));
  out += "<";
  if (c.key) {
    out += to_string(*c.key);
    out += ", ";
  }
  out += to_string(c.elem);
  out += ">";
  return out;
}

std::string_view to_string(BinaryOp op) {
  static constexpr std::array<std::string_view, 13> kNames = {
      "+", "-", "*", "/", "%", "<", "<=", ">", ">=", "==", "!=", "&&", "||"};
  return kNames[static_cast<std::size_t>(op)];
}

std::string_view to_string(UnaryOp op) { return op == UnaryOp::Neg ? "-" : "!"; }

SourceSpan span_of(const Stmt& s) { return s.span; }
SourceSpan span_of(const Expr& e) { return e.span; }

bool is_legal_method(ContainerKind kind, std::string_view m) {
  auto in = [m](std::initializer_list<std::string_view> names) {
    return std::find(names.begin(), names.end(), m) != names.end();
  };
  switch (kind) {
    case ContainerKind::Vector:
      return in({"push_back", "pop_back", "size", "empty"});
    case ContainerKind::Stack:
      return in({"push", "pop", "top", "size", "empty"});
    case ContainerKind::Queue:
      return in({"push", "pop", "front", "back", "size", "empty"});
    case ContainerKind::Deque:
      return in({"push_back", "push_front", "pop_back", "pop_front", "front",
                 "back", "size", "empty"});
    case ContainerKind::BstMap:
    case ContainerKind::HashMap:
      return in({"insert", "erase", "find", "count", "size", "empty"});
  }
  return false;
}

bool supports_index_read(ContainerKind kind) {
  return kind == ContainerKind::Vector || kind == ContainerKind::Deque ||
         is_keyed(kind);
}

bool supports_index_write(ContainerKind kind) {
  return kind == ContainerKind::Vector || is_keyed(kind);
}

// ---------------------------------------------------------------------------
// Structural equality

namespace {

struct Equal {
  bool spans;

  bool span(const SourceSpan& a, const SourceSpan& b) const { return !spans || a == b; }

  bool expr(const ExprPtr& a, const ExprPtr& b) const {
    if (!a || !b) return !a && !b;
    return expr(*a, *b);
  }

  bool exprs(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) const {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!expr(a[i], b[i])) return false;
    }
    return true;
  }

  bool expr(const Expr& a, const Expr& b) const {
    if (!span(a.span, b.span) || a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          const auto& y = std::get<T>(b.node);
          if constexpr (std::is_same_v<T, Literal>) {
            return x.value == y.value;
          } else if constexpr (std::is_same_v<T, VarRef>) {
            return x.name == y.name;
          } else if constexpr (std::is_same_v<T, Binary>) {
            return x.op == y.op && expr(x.lhs, y.lhs) && expr(x.rhs, y.rhs);
          } else if constexpr (std::is_same_v<T, Unary>) {
            return x.op == y.op && expr(x.operand, y.operand);
          } else if constexpr (std::is_same_v<T, FunctionCall>) {
            return x.callee == y.callee && exprs(x.args, y.args);
          } else if constexpr (std::is_same_v<T, ContainerMethodCall>) {
            return x.method == y.method && expr(x.receiver, y.receiver) &&
                   exprs(x.args, y.args);
          } else {
            return expr(x.receiver, y.receiver) && expr(x.index, y.index);
          }
        },
        a.node);
  }

  bool stmt(const StmtPtr& a, const StmtPtr& b) const {
    if (!a || !b) return !a && !b;
    return stmt(*a, *b);
  }

  bool stmt(const Stmt& a, const Stmt& b) const {
    if (!span(a.span, b.span) || a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          const auto& y = std::get<T>(b.node);
          if constexpr (std::is_same_v<T, Block>) {
            if (x.role != y.role || x.stmts.size() != y.stmts.size()) return false;
            for (std::size_t i = 0; i < x.stmts.size(); ++i) {
              if (!stmt(x.stmts[i], y.stmts[i])) return false;
            }
            return true;
          } else if constexpr (std::is_same_v<T, VarDecl>) {
            if (x.type != y.type || x.declarators.size() != y.declarators.size() ||
                !exprs(x.ctor_args, y.ctor_args) ||
                x.init_list.has_value() != y.init_list.has_value()) {
              return false;
            }
            if (x.init_list && !exprs(*x.init_list, *y.init_list)) return false;
            for (std::size_t i = 0; i < x.declarators.size(); ++i) {
              const auto& dx = x.declarators[i];
              const auto& dy = y.declarators[i];
              if (dx.name != dy.name || !span(dx.name_span, dy.name_span) ||
                  !expr(dx.init, dy.init)) {
                return false;
              }
            }
            return true;
          } else if constexpr (std::is_same_v<T, Assign>) {
            return x.op == y.op && x.prefix == y.prefix &&
                   expr(x.target, y.target) && expr(x.value, y.value);
          } else if constexpr (std::is_same_v<T, If>) {
            return expr(x.cond, y.cond) && stmt(x.then_branch, y.then_branch) &&
                   stmt(x.else_branch, y.else_branch);
          } else if constexpr (std::is_same_v<T, While>) {
            return x.from_for == y.from_for && expr(x.cond, y.cond) &&
                   stmt(x.body, y.body);
          } else if constexpr (std::is_same_v<T, Return>) {
            return expr(x.value, y.value);
          } else if constexpr (std::is_same_v<T, ExprStmt>) {
            return expr(x.expr, y.expr);
          } else if constexpr (std::is_same_v<T, Print>) {
            return exprs(x.items, y.items);
          } else {
            return exprs(x.targets, y.targets);
          }
        },
        a.node);
  }
};

}  // namespace

bool structurally_equal(const Expr& a, const Expr& b, bool compare_spans) {
  return Equal{compare_spans}.expr(a, b);
}

bool structurally_equal(const Stmt& a, const Stmt& b, bool compare_spans) {
  return Equal{compare_spans}.stmt(a, b);
}

bool structurally_equal(const CcrProgram& a, const CcrProgram& b, bool compare_spans) {
  if (a.entry != b.entry || a.order != b.order ||
      a.functions.size() != b.functions.size()) {
    return false;
  }
  Equal eq{compare_spans};
  for (const auto& [name, fa] : a.functions) {
    auto it = b.functions.find(name);
    if (it == b.functions.end()) return false;
    const auto& fb = it->second;
    if (fa.return_type != fb.return_type || fa.params.size() != fb.params.size()) {
      return false;
    }
    if (compare_spans && (fa.span != fb.span || fa.header_span != fb.header_span)) {
      return false;
    }
    for (std::size_t i = 0; i < fa.params.size(); ++i) {
      if (fa.params[i].name != fb.params[i].name ||
          fa.params[i].type != fb.params[i].type ||
          !eq.span(fa.params[i].span, fb.params[i].span)) {
        return false;
      }
    }
    if (!eq.stmt(fa.body, fb.body)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or: return 1;
    case BinaryOp::And: return 2;
    case BinaryOp::Eq:
    case BinaryOp::Ne: return 3;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return 4;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 5;
    default: return 6;
  }
}

constexpr int kUnaryPrecedence = 7;

int precedence(const Expr& e) {
  if (const auto* b = as<Binary>(e)) return precedence(b->op);
  if (as<Unary>(e)) return kUnaryPrecedence;
  return 8;
}

bool is_find(const Expr& e) {
  const auto* m = as<ContainerMethodCall>(e);
  return m && m->method == "find";
}

std::string scalar_source(ScalarType t) {
  return std::string(to_string(t));
}

std::string type_source(const TypeTag& t) {
  if (const auto* s = std::get_if<ScalarType>(&t)) return scalar_source(*s);
  return type_name(t);
}

class Printer {
 public:
  std::string expr(const Expr& e) const {
    return std::visit(
        [&](const auto& x) -> std::string {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Literal>) {
            return display(x.value);
          } else if constexpr (std::is_same_v<T, VarRef>) {
            return x.name;
          } else if constexpr (std::is_same_v<T, Binary>) {
            int p = precedence(x.op);
            std::string l = operand(*x.lhs, p, false);
            std::string r = operand(*x.rhs, p, true);
            return l + " " + std::string(to_string(x.op)) + " " + r;
          } else if constexpr (std::is_same_v<T, Unary>) {
            if (x.op == UnaryOp::Not && is_find(*x.operand)) {
              const auto& m = std::get<ContainerMethodCall>(x.operand->node);
              std::string recv = expr(*m.receiver);
              return "(" + recv + ".find(" + args(m.args) + ") == " + recv +
                     ".end())";
            }
            std::string inner = operand(*x.operand, kUnaryPrecedence, false);
            // Avoid "--x" being read as a decrement.
            if (x.op == UnaryOp::Neg && !inner.empty() && inner[0] == '-') {
              inner = "(" + inner + ")";
            }
            return std::string(to_string(x.op)) + inner;
          } else if constexpr (std::is_same_v<T, FunctionCall>) {
            return x.callee + "(" + args(x.args) + ")";
          } else if constexpr (std::is_same_v<T, ContainerMethodCall>) {
            std::string recv = expr(*x.receiver);
            if (x.method == "find") {
              return "(" + recv + ".find(" + args(x.args) + ") != " + recv + ".end())";
            }
            if (x.method == "insert" && x.args.size() == 2) {
              return recv + ".insert({" + args(x.args) + "})";
            }
            return recv + "." + x.method + "(" + args(x.args) + ")";
          } else {
            return expr(*x.receiver) + "[" + expr(*x.index) + "]";
          }
        },
        e.node);
  }

  std::string simple(const Stmt& s) const {
    if (const auto* a = as<Assign>(s)) {
      std::string t = expr(*a->target);
      switch (a->op) {
        case AssignOp::Increment: return a->prefix ? "++" + t : t + "++";
        case AssignOp::Decrement: return a->prefix ? "--" + t : t + "--";
        case AssignOp::Set: return t + " = " + expr(*a->value);
        case AssignOp::Add: return t + " += " + expr(*a->value);
        case AssignOp::Sub: return t + " -= " + expr(*a->value);
        case AssignOp::Mul: return t + " *= " + expr(*a->value);
        case AssignOp::Div: return t + " /= " + expr(*a->value);
        case AssignOp::Mod: return t + " %= " + expr(*a->value);
      }
    }
    if (const auto* d = as<VarDecl>(s)) return decl(*d);
    if (const auto* e = as<ExprStmt>(s)) return expr(*e->expr);
    return {};
  }

  void stmt(const Stmt& s, int depth, std::ostringstream& out) const {
    const std::string pad(static_cast<std::size_t>(depth) * 4, ' ');
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Block>) {
            if (x.role == BlockRole::ForScope) {
              for_loop(x, depth, out);
              return;
            }
            out << pad << "{\n";
            for (const auto& c : x.stmts) stmt(*c, depth + 1, out);
            out << pad << "}\n";
          } else if constexpr (std::is_same_v<T, If>) {
            out << pad << "if (" << expr(*x.cond) << ")\n";
            branch(*x.then_branch, depth, out);
            if (x.else_branch) {
              out << pad << "else\n";
              branch(*x.else_branch, depth, out);
            }
          } else if constexpr (std::is_same_v<T, While>) {
            out << pad << "while (" << expr(*x.cond) << ")\n";
            branch(*x.body, depth, out);
          } else if constexpr (std::is_same_v<T, Return>) {
            out << pad << "return";
            if (x.value) out << " " << expr(*x.value);
            out << ";\n";
          } else if constexpr (std::is_same_v<T, Print>) {
            out << pad << "cout";
            for (const auto& item : x.items) {
              out << " << " << (item ? expr(*item) : std::string("endl"));
            }
            out << ";\n";
          } else if constexpr (std::is_same_v<T, Read>) {
            out << pad << "cin";
            for (const auto& t : x.targets) out << " >> " << expr(*t);
            out << ";\n";
          } else {
            out << pad << simple(s) << ";\n";
          }
        },
        s.node);
  }

  std::string program(const CcrProgram& p) const {
    std::ostringstream out;
    out << "#include <iostream>\n#include <string>\n#include <vector>\n"
           "#include <stack>\n#include <queue>\n#include <deque>\n"
           "#include <map>\n#include <unordered_map>\n"
           "using namespace std;\n";
    for (const auto& name : p.order) {
      const auto& f = p.functions.at(name);
      out << "\n"
          << (f.return_type ? type_source(*f.return_type) : std::string("void"))
          << " " << f.name << "(";
      for (std::size_t i = 0; i < f.params.size(); ++i) {
        if (i) out << ", ";
        const auto& prm = f.params[i];
        out << type_source(prm.type)
            << (std::holds_alternative<ContainerType>(prm.type) ? "& " : " ")
            << prm.name;
      }
      out << ")\n";
      stmt(*f.body, 0, out);
    }
    return out.str();
  }

 private:
  std::string operand(const Expr& e, int parent, bool right) const {
    std::string s = expr(e);
    int p = precedence(e);
    if (p < parent || (right && p == parent && p < kUnaryPrecedence)) {
      return "(" + s + ")";
    }
    return s;
  }

  std::string args(const std::vector<ExprPtr>& a) const {
    std::string out;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i) out += ", ";
      out += expr(*a[i]);
    }
    return out;
  }

  std::string decl(const VarDecl& d) const {
    std::string out = type_source(d.type) + " ";
    for (std::size_t i = 0; i < d.declarators.size(); ++i) {
      if (i) out += ", ";
      out += d.declarators[i].name;
      if (d.declarators[i].init) out += " = " + expr(*d.declarators[i].init);
    }
    if (!d.ctor_args.empty()) out += "(" + args(d.ctor_args) + ")";
    if (d.init_list) out += " = {" + args(*d.init_list) + "}";
    return out;
  }

  void branch(const Stmt& s, int depth, std::ostringstream& out) const {
    if (const auto* b = as<Block>(s); b && b->role != BlockRole::ForScope) {
      stmt(s, depth, out);
    } else {
      stmt(s, depth + 1, out);
    }
  }

  void for_loop(const Block& scope, int depth, std::ostringstream& out) const {
    const std::string pad(static_cast<std::size_t>(depth) * 4, ' ');
    const Stmt* init = nullptr;
    const Stmt* loop = scope.stmts.back().get();
    if (scope.stmts.size() == 2) init = scope.stmts.front().get();
    const auto& w = std::get<While>(loop->node);
    const auto& body = std::get<Block>(w.body->node);
    const Stmt* step = body.stmts.size() == 2 ? body.stmts.back().get() : nullptr;
    out << pad << "for (" << (init ? simple(*init) : "") << "; " << expr(*w.cond)
        << "; " << (step ? simple(*step) : "") << ")\n";
    branch(*body.stmts.front(), depth, out);
  }
};

}  // namespace

std::string pretty_print(const CcrProgram& program) { return Printer{}.program(program); }

std::string pretty_print(const Expr& e) { return Printer{}.expr(e); }

}  // namespace stepviz::ccr
