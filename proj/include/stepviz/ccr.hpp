#pragma once

// Canonical code representation: the language-independent syntax tree that
// frontends produce and the interpreter consumes.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stepviz/source.hpp"
#include "stepviz/value.hpp"

namespace stepviz::ccr {

struct ContainerType {
  ContainerKind kind = ContainerKind::Vector;
  std::optional<ScalarType> key;  // set for the keyed kinds only
  ScalarType elem = ScalarType::Int;

  bool operator==(const ContainerType&) const = default;
};

using TypeTag = std::variant<ScalarType, ContainerType>;

std::string type_name(const TypeTag& t);

enum class BinaryOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };
enum class UnaryOp { Neg, Not };

std::string_view to_string(BinaryOp op);
std::string_view to_string(UnaryOp op);

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Literal {
  Value value;
};
struct VarRef {
  std::string name;
};
struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct Unary {
  UnaryOp op;
  ExprPtr operand;
};
struct FunctionCall {
  std::string callee;
  std::vector<ExprPtr> args;
};
// `find` is represented as a membership test yielding bool; the frontend
// accepts it only in the `m.find(k) != m.end()` comparison form.
struct ContainerMethodCall {
  ExprPtr receiver;
  std::string method;
  std::vector<ExprPtr> args;
};
struct IndexAccess {
  ExprPtr receiver;
  ExprPtr index;
};

struct Expr {
  SourceSpan span;
  std::variant<Literal, VarRef, Binary, Unary, FunctionCall,
               ContainerMethodCall, IndexAccess>
      node;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

// How a block came to be. Function bodies share the parameter scope; loop and
// branch bodies open a scope silently; only free-standing blocks get their own
// frame; for-loop blocks are synthesized by desugaring.
enum class BlockRole { Plain, FunctionBody, Branch, ForScope, ForBody };

struct Block {
  BlockRole role = BlockRole::Plain;
  std::vector<StmtPtr> stmts;
};

struct VarDecl {
  struct Declarator {
    std::string name;
    SourceSpan name_span;
    ExprPtr init;  // scalar initialiser, may be null
  };
  TypeTag type;
  std::vector<Declarator> declarators;  // exactly one for containers
  // Container construction: `(count)`, `(count, fill)` or `= {items}`.
  std::vector<ExprPtr> ctor_args;
  std::optional<std::vector<ExprPtr>> init_list;
};

enum class AssignOp { Set, Add, Sub, Mul, Div, Mod, Increment, Decrement };

struct Assign {
  AssignOp op = AssignOp::Set;
  ExprPtr target;  // VarRef or IndexAccess
  ExprPtr value;   // null for Increment/Decrement
  bool prefix = false;  // ++x rather than x++ (display only)
};

struct If {
  ExprPtr cond;
  StmtPtr then_branch;
  StmtPtr else_branch;  // may be null
};

struct While {
  ExprPtr cond;
  StmtPtr body;
  bool from_for = false;
};

struct Return {
  ExprPtr value;  // may be null
};

struct ExprStmt {
  ExprPtr expr;
};

struct Print {
  // A null item stands for `endl`.
  std::vector<ExprPtr> items;
};

struct Read {
  std::vector<ExprPtr> targets;
};

struct Stmt {
  SourceSpan span;
  std::variant<Block, VarDecl, Assign, If, While, Return, ExprStmt, Print, Read>
      node;
};

struct Param {
  std::string name;
  TypeTag type;
  SourceSpan span;
};

struct FunctionDef {
  std::string name;
  std::vector<Param> params;
  std::optional<TypeTag> return_type;  // nullopt for void
  SourceSpan span;         // whole definition
  SourceSpan header_span;  // return type through closing parenthesis
  StmtPtr body;            // always a Block with role FunctionBody
};

struct CcrProgram {
  std::map<std::string, FunctionDef> functions;
  std::vector<std::string> order;  // definition order, for printing
  std::string entry = "main";
  std::string source_text;
};

// ---------------------------------------------------------------------------
// Operations

// Structural and static-semantic checks. Empty iff the program is runnable.
Diagnostics validate(const CcrProgram& program);

SourceSpan span_of(const Stmt& s);
SourceSpan span_of(const Expr& e);

// Print the program back as subset source. Re-parsing the output yields a
// structurally identical program.
std::string pretty_print(const CcrProgram& program);
std::string pretty_print(const Expr& e);

// Structural equality; spans are ignored when `compare_spans` is false.
bool structurally_equal(const CcrProgram& a, const CcrProgram& b,
                        bool compare_spans = false);
bool structurally_equal(const Expr& a, const Expr& b, bool compare_spans = false);
bool structurally_equal(const Stmt& a, const Stmt& b, bool compare_spans = false);

// Method table for container receivers, shared by the checker and the
// interpreter. `find` yields bool; `end` is never legal on its own.
bool is_legal_method(ContainerKind kind, std::string_view method);
bool supports_index_read(ContainerKind kind);
bool supports_index_write(ContainerKind kind);

template <typename T>
const T* as(const Expr& e) {
  return std::get_if<T>(&e.node);
}
template <typename T>
const T* as(const Stmt& s) {
  return std::get_if<T>(&s.node);
}

}  // namespace stepviz::ccr
