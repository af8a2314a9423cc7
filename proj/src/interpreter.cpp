#include "stepviz/interpreter.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <stdexcept>

#include "stepviz/explain.hpp"
#include "stepviz/frontend.hpp"

namespace stepviz {

namespace {

using ccr::Expr;
using ccr::Stmt;
using containers::AccessEvent;
using containers::ContainerState;
using containers::Recorder;
using explain::Template;
using explain::render;

// A runtime failure of the subject program.
struct Fault {
  std::string kind;
  std::string message;
};

// The trace ended early: frame limit reached or the consumer stopped.
struct Halt {};

enum class Flow { Next, Return };

struct HeapEntry {
  std::string name;
  ccr::ContainerType type;
  ContainerState state;
};

struct Scope {
  std::vector<cgr::Binding> vars;
  std::vector<ContainerId> owned;
};

struct Activation {
  std::string function;
  std::optional<SourceSpan> call_site;
  std::vector<Scope> scopes;
};

constexpr std::int64_t kMaxConstructedSize = 10'000'000;

bool truthy(const Value& v) {
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i != 0;
  if (const auto* c = std::get_if<char>(&v)) return *c != 0;
  if (const auto* d = std::get_if<double>(&v)) return *d != 0.0;
  return false;
}

std::int64_t to_int(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  if (const auto* c = std::get_if<char>(&v)) return *c;
  if (const auto* b = std::get_if<bool>(&v)) return *b ? 1 : 0;
  if (const auto* d = std::get_if<double>(&v)) return static_cast<std::int64_t>(*d);
  throw std::logic_error("not an integral value");
}

double to_double(const Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return static_cast<double>(to_int(v));
}

std::string to_text(const Value& v) {
  if (const auto* c = std::get_if<char>(&v)) return std::string(1, *c);
  return std::get<std::string>(v);
}

// Implicit conversion on binding to a declared type.
Value convert(const Value& v, ScalarType t) {
  switch (t) {
    case ScalarType::Int: return to_int(v);
    case ScalarType::Double: return to_double(v);
    case ScalarType::Char: return static_cast<char>(to_int(v));
    case ScalarType::Bool: return truthy(v);
    case ScalarType::String: return to_text(v);
  }
  return v;
}

double checked_double(double d) {
  if (!std::isfinite(d)) throw Fault{"NonFiniteDouble", "floating-point result is not finite"};
  return d;
}

Value arithmetic(ccr::BinaryOp op, const Value& l, const Value& r) {
  using ccr::BinaryOp;
  if (op == BinaryOp::Add &&
      (std::holds_alternative<std::string>(l) || std::holds_alternative<std::string>(r))) {
    return to_text(l) + to_text(r);
  }
  if (std::holds_alternative<double>(l) || std::holds_alternative<double>(r)) {
    double a = to_double(l);
    double b = to_double(r);
    switch (op) {
      case BinaryOp::Add: return checked_double(a + b);
      case BinaryOp::Sub: return checked_double(a - b);
      case BinaryOp::Mul: return checked_double(a * b);
      case BinaryOp::Div:
        if (b == 0.0) throw Fault{"DivisionByZero", "division by zero"};
        return checked_double(a / b);
      default: break;
    }
    throw std::logic_error("unsupported floating-point operator");
  }
  std::int64_t a = to_int(l);
  std::int64_t b = to_int(r);
  std::int64_t out = 0;
  bool overflow = false;
  switch (op) {
    case BinaryOp::Add: overflow = __builtin_add_overflow(a, b, &out); break;
    case BinaryOp::Sub: overflow = __builtin_sub_overflow(a, b, &out); break;
    case BinaryOp::Mul: overflow = __builtin_mul_overflow(a, b, &out); break;
    case BinaryOp::Div:
    case BinaryOp::Mod:
      if (b == 0) {
        throw Fault{"DivisionByZero",
                    op == BinaryOp::Div ? "division by zero" : "modulo by zero"};
      }
      if (a == std::numeric_limits<std::int64_t>::min() && b == -1) {
        overflow = true;
      } else {
        out = op == BinaryOp::Div ? a / b : a % b;
      }
      break;
    default: throw std::logic_error("unsupported integer operator");
  }
  if (overflow) {
    throw Fault{"IntegerOverflow", std::to_string(a) + " " + std::string(ccr::to_string(op)) +
                                       " " + std::to_string(b) + " overflows"};
  }
  return out;
}

bool compare(ccr::BinaryOp op, const Value& l, const Value& r) {
  using ccr::BinaryOp;
  int c = 0;
  if (std::holds_alternative<std::string>(l) && std::holds_alternative<std::string>(r)) {
    c = std::get<std::string>(l).compare(std::get<std::string>(r));
  } else if (std::holds_alternative<double>(l) || std::holds_alternative<double>(r)) {
    double a = to_double(l);
    double b = to_double(r);
    c = a < b ? -1 : (b < a ? 1 : 0);
  } else {
    std::int64_t a = to_int(l);
    std::int64_t b = to_int(r);
    c = a < b ? -1 : (b < a ? 1 : 0);
  }
  switch (op) {
    case BinaryOp::Lt: return c < 0;
    case BinaryOp::Le: return c <= 0;
    case BinaryOp::Gt: return c > 0;
    case BinaryOp::Ge: return c >= 0;
    case BinaryOp::Eq: return c == 0;
    case BinaryOp::Ne: return c != 0;
    default: break;
  }
  throw std::logic_error("not a comparison");
}

ccr::BinaryOp compound_op(ccr::AssignOp op) {
  switch (op) {
    case ccr::AssignOp::Add:
    case ccr::AssignOp::Increment: return ccr::BinaryOp::Add;
    case ccr::AssignOp::Sub:
    case ccr::AssignOp::Decrement: return ccr::BinaryOp::Sub;
    case ccr::AssignOp::Mul: return ccr::BinaryOp::Mul;
    case ccr::AssignOp::Div: return ccr::BinaryOp::Div;
    case ccr::AssignOp::Mod: return ccr::BinaryOp::Mod;
    case ccr::AssignOp::Set: break;
  }
  throw std::logic_error("plain assignment has no operator");
}

bool is_block(const Stmt& s) { return std::holds_alternative<ccr::Block>(s.node); }

SourceSpan closing_brace(const ccr::FunctionDef& f) {
  return SourceSpan{f.span.end_line, f.span.end_col, f.span.end_line, f.span.end_col};
}

class Interpreter {
 public:
  using FrameOut = std::function<void(cgr::TraceFrame&&)>;

  Interpreter(const ccr::CcrProgram& program, const InterpreterOptions& options, FrameOut out)
      : program_(program), options_(options), out_(std::move(out)) {}

  void execute() {
    const ccr::FunctionDef& main = program_.functions.at(program_.entry);
    current_span_ = main.header_span;
    try {
      try {
        emit(main.header_span, render(Template::ProgramStart, {main.name}));
        std::int64_t exit_value = run_main(main);
        terminal(closing_brace(main),
                 render(Template::ProgramFinished, {std::to_string(exit_value)}),
                 cgr::Finished{exit_value});
      } catch (const Fault& f) {
        terminal(current_span_, render(Template::RuntimeError, {f.message}),
                 cgr::RuntimeError{f.kind, f.message, current_span_});
      }
    } catch (const Halt&) {
    }
  }

 private:
  // ---- frames -------------------------------------------------------------

  cgr::TraceFrame make_frame(const SourceSpan& span, std::string text,
                             std::optional<cgr::Termination> termination) {
    cgr::TraceFrame f;
    f.index = frames_++;
    f.span = span;
    f.explanation = std::move(text);
    for (std::size_t i = 0; i < stack_.size(); ++i) {
      cgr::FunctionFrame fn;
      fn.function = stack_[i].function;
      fn.call_site = stack_[i].call_site;
      fn.active = i + 1 == stack_.size();
      for (const auto& scope : stack_[i].scopes) fn.scopes.push_back(scope.vars);
      f.stacks.push_back(std::move(fn));
    }
    for (const auto& [id, entry] : heap_) {
      f.containers.push_back(cgr::ContainerSnapshot{ContainerId{id}, entry.name, entry.type.key,
                                                    entry.type.elem,
                                                    containers::container_snapshot(entry.state)});
    }
    f.events = std::exchange(pending_, {});
    f.stdout_so_far = stdout_;
    f.termination = std::move(termination);
    return f;
  }

  void emit(const SourceSpan& span, std::string text) {
    if (frames_ + 1 >= options_.max_frames) {
      terminal(current_span_,
               render(Template::Truncated, {std::to_string(options_.max_frames)}),
               cgr::Truncated{});
      throw Halt{};
    }
    out_(make_frame(span, std::move(text), std::nullopt));
  }

  void terminal(const SourceSpan& span, std::string text, cgr::Termination t) {
    out_(make_frame(span, std::move(text), std::move(t)));
  }

  std::string describe_target(const HeapEntry& entry, const containers::EventTarget& t) const {
    if (const auto* i = std::get_if<containers::IndexTarget>(&t)) {
      return "index " + std::to_string(i->index);
    }
    if (const auto* n = std::get_if<containers::NodeTarget>(&t)) {
      const auto& bst = std::get<containers::BstState>(entry.state.payload);
      return "node with key " + display(bst.nodes.at(n->node).key);
    }
    if (const auto* b = std::get_if<containers::BucketTarget>(&t)) {
      return "bucket " + std::to_string(b->bucket);
    }
    return "entry with key " + display(std::get<containers::KeyTarget>(t).key);
  }

  void substep(const AccessEvent& e) {
    const HeapEntry& entry = heap_.at(e.container.value);
    Template t = e.kind == containers::EventKind::Read    ? Template::SubstepRead
                 : e.kind == containers::EventKind::Write ? Template::SubstepWrite
                                                          : Template::SubstepDelete;
    std::string text = render(t, {describe_target(entry, e.target), entry.name});
    pending_.push_back(e);
    emit(current_span_, std::move(text));
  }

  // ---- container access ---------------------------------------------------

  using Op = std::function<Value(ContainerState&, Recorder&)>;

  static Value guarded(const Op& op, ContainerState& s, Recorder& rec) {
    try {
      return op(s, rec);
    } catch (const containers::ContainerError& e) {
      throw Fault{std::string(e.kind_name()), e.what()};
    }
  }

  // Runs one container operation and records its events. With
  // `statement_text` the operation is the effect of the current statement and
  // that text labels its frame; otherwise it is part of evaluating `expr`.
  // Without substeps, a deleting operation is shown on the state it deletes
  // from, so that every event target is still present in its frame.
  Value access(ContainerId id, bool deleting, const Op& op,
               const std::optional<std::string>& statement_text, const Expr& expr) {
    if (options_.substeps) {
      if (statement_text) emit(current_span_, *statement_text);
      Recorder rec(id, [this](const AccessEvent& e) { substep(e); });
      return guarded(op, heap_.at(id.value).state, rec);
    }
    std::vector<AccessEvent> local;
    Recorder rec(id, [&local](const AccessEvent& e) { local.push_back(e); });
    if (!deleting) {
      Value r = guarded(op, heap_.at(id.value).state, rec);
      pending_.insert(pending_.end(), local.begin(), local.end());
      if (statement_text) emit(current_span_, *statement_text);
      return r;
    }
    ContainerState copy = heap_.at(id.value).state;
    Value r = guarded(op, copy, rec);
    pending_.insert(pending_.end(), local.begin(), local.end());
    emit(current_span_, statement_text ? *statement_text
                                       : render(Template::Evaluate, {ccr::pretty_print(expr)}));
    heap_.at(id.value).state = std::move(copy);
    return r;
  }

  HeapEntry& entry_of(const Value& v) {
    return heap_.at(std::get<ContainerRef>(v).id.value);
  }

  static containers::SequenceState& seq(ContainerState& s) {
    return std::get<containers::SequenceState>(s.payload);
  }

  // ---- environment --------------------------------------------------------

  Activation& active() { return stack_.back(); }

  cgr::Binding& lookup(const std::string& name) {
    auto& scopes = active().scopes;
    for (auto s = scopes.rbegin(); s != scopes.rend(); ++s) {
      for (auto& b : s->vars) {
        if (b.name == name) return b;
      }
    }
    throw std::logic_error("unresolved variable '" + name + "' survived validation");
  }

  void pop_scope(Activation& a) {
    for (ContainerId id : a.scopes.back().owned) heap_.erase(id.value);
    a.scopes.pop_back();
  }

  void pop_activation() {
    while (!active().scopes.empty()) pop_scope(active());
    stack_.pop_back();
  }

  std::string describe(const Value& v) {
    if (const auto* r = std::get_if<ContainerRef>(&v)) return heap_.at(r->id.value).name;
    return display(v);
  }

  // ---- statements ---------------------------------------------------------

  Flow exec(const Stmt& s) {
    SourceSpan saved = current_span_;
    current_span_ = s.span;
    Flow f = std::visit([&](const auto& node) { return exec_node(node, s); }, s.node);
    current_span_ = saved;
    return f;
  }

  // Runs a branch or loop body in its own scope.
  Flow exec_scoped(const Stmt& s) {
    if (is_block(s)) return exec(s);
    active().scopes.emplace_back();
    Flow f = exec(s);
    if (f == Flow::Next) pop_scope(active());
    return f;
  }

  Flow exec_node(const ccr::Block& b, const Stmt&) {
    bool own_scope = b.role != ccr::BlockRole::FunctionBody;
    if (own_scope) active().scopes.emplace_back();
    if (b.role == ccr::BlockRole::Plain) emit(current_span_, render(Template::EnterScope, {}));
    for (const auto& child : b.stmts) {
      if (exec(*child) == Flow::Return) return Flow::Return;
    }
    if (own_scope) pop_scope(active());
    return Flow::Next;
  }

  Flow exec_node(const ccr::VarDecl& d, const Stmt& s) {
    if (const auto* ct = std::get_if<ccr::ContainerType>(&d.type)) {
      declare_container(d, *ct, s);
      return Flow::Next;
    }
    ScalarType t = std::get<ScalarType>(d.type);
    for (const auto& decl : d.declarators) {
      Value v = decl.init ? convert(eval(*decl.init), t) : default_value(t);
      emit(s.span, render(decl.init ? Template::DeclareInit : Template::DeclareDefault,
                          {decl.name, display(v)}));
      active().scopes.back().vars.push_back(cgr::Binding{decl.name, std::move(v)});
    }
    return Flow::Next;
  }

  void declare_container(const ccr::VarDecl& d, const ccr::ContainerType& ct, const Stmt& s) {
    ContainerState state = ContainerState::make(ct.kind, options_.hash_buckets);
    if (!d.ctor_args.empty()) {
      std::int64_t n = to_int(eval(*d.ctor_args[0]));
      Value fill = d.ctor_args.size() > 1 ? convert(eval(*d.ctor_args[1]), ct.elem)
                                          : default_value(ct.elem);
      if (n < 0 || n > kMaxConstructedSize) {
        throw Fault{"IndexOutOfBounds", "cannot create a container with " + std::to_string(n) +
                                            " elements"};
      }
      seq(state).elements.assign(static_cast<std::size_t>(n), fill);
    } else if (d.init_list) {
      for (const auto& item : *d.init_list) {
        seq(state).elements.push_back(convert(eval(*item), ct.elem));
      }
    }
    const std::string& name = d.declarators.front().name;
    std::size_t n = state.size();
    std::string kind(source_name(ct.kind));
    emit(s.span, n == 0 ? render(Template::CreateEmpty, {kind, name})
                        : render(Template::CreateSized, {kind, name, std::to_string(n)}));
    ContainerId id{next_container_++};
    heap_.emplace(id.value, HeapEntry{name, ct, std::move(state)});
    active().scopes.back().vars.push_back(cgr::Binding{name, ContainerRef{id}});
    active().scopes.back().owned.push_back(id);
  }

  Flow exec_node(const ccr::Assign& a, const Stmt& s) {
    if (const auto* var = ccr::as<ccr::VarRef>(*a.target)) {
      assign_variable(a, var->name, s);
    } else {
      assign_element(a, std::get<ccr::IndexAccess>(a.target->node), s);
    }
    return Flow::Next;
  }

  void assign_variable(const ccr::Assign& a, const std::string& name, const Stmt& s) {
    ScalarType t = *scalar_type_of(lookup(name).value);
    if (a.op == ccr::AssignOp::Set) {
      Value v = convert(eval(*a.value), t);
      emit(s.span, render(Template::AssignVar, {display(v), name}));
      lookup(name).value = std::move(v);
      return;
    }
    Value old = lookup(name).value;
    Value rhs = a.value ? eval(*a.value) : Value{std::int64_t{1}};
    Value v = convert(arithmetic(compound_op(a.op), old, rhs), t);
    emit(s.span, render(Template::UpdateVar, {name, display(old), display(v)}));
    lookup(name).value = std::move(v);
  }

  void assign_element(const ccr::Assign& a, const ccr::IndexAccess& ix, const Stmt&) {
    Value recv = eval(*ix.receiver);
    ContainerId id = std::get<ContainerRef>(recv).id;
    ccr::ContainerType type = entry_of(recv).type;
    Value key = eval(*ix.index);
    if (type.key) key = convert(key, *type.key);
    std::string label = ccr::pretty_print(*ix.receiver);
    std::string text;
    Value v;
    if (a.op == ccr::AssignOp::Set) {
      v = convert(eval(*a.value), type.elem);
      text = render(Template::AssignIndex, {display(v), label, display(key)});
    } else {
      Value old = read_element(id, type, key, *a.target);
      Value rhs = a.value ? eval(*a.value) : Value{std::int64_t{1}};
      v = convert(arithmetic(compound_op(a.op), old, rhs), type.elem);
      text = render(Template::UpdateIndex, {label, display(key), display(old), display(v)});
    }
    write_element(id, type, key, std::move(v), text, *a.target);
  }

  Value read_element(ContainerId id, const ccr::ContainerType& type, const Value& key,
                     const Expr& e) {
    Value fallback = default_value(type.elem);
    Op op;
    switch (type.kind) {
      case ContainerKind::BstMap:
        op = [&](ContainerState& s, Recorder& r) {
          return containers::bst_index(std::get<containers::BstState>(s.payload), key, fallback, r);
        };
        break;
      case ContainerKind::HashMap:
        op = [&](ContainerState& s, Recorder& r) {
          return containers::hash_index(std::get<containers::HashState>(s.payload), key, fallback,
                                        r);
        };
        break;
      default:
        op = [&](ContainerState& s, Recorder& r) {
          return containers::index_get(seq(s), to_int(key), r);
        };
    }
    return access(id, false, op, std::nullopt, e);
  }

  void write_element(ContainerId id, const ccr::ContainerType& type, const Value& key, Value v,
                     const std::string& text, const Expr& e) {
    Op op;
    switch (type.kind) {
      case ContainerKind::BstMap:
        op = [&](ContainerState& s, Recorder& r) {
          containers::bst_insert(std::get<containers::BstState>(s.payload), key, v, true, r);
          return Value{};
        };
        break;
      case ContainerKind::HashMap:
        op = [&](ContainerState& s, Recorder& r) {
          containers::hash_insert(std::get<containers::HashState>(s.payload), key, v, true, r);
          return Value{};
        };
        break;
      default:
        op = [&](ContainerState& s, Recorder& r) {
          containers::index_set(seq(s), to_int(key), v, r);
          return Value{};
        };
    }
    access(id, false, op, text, e);
  }

  Flow exec_node(const ccr::If& i, const Stmt& s) {
    bool c = truthy(eval(*i.cond));
    std::string cond = ccr::pretty_print(*i.cond);
    Template t = c ? Template::IfTrue
                   : (i.else_branch ? Template::IfFalseElse : Template::IfFalseSkip);
    emit(s.span, render(t, {cond}));
    if (c) return exec_scoped(*i.then_branch);
    if (i.else_branch) return exec_scoped(*i.else_branch);
    return Flow::Next;
  }

  Flow exec_node(const ccr::While& w, const Stmt& s) {
    std::string cond = ccr::pretty_print(*w.cond);
    while (true) {
      bool c = truthy(eval(*w.cond));
      emit(s.span, render(c ? Template::LoopEnter : Template::LoopExit, {cond}));
      if (!c) return Flow::Next;
      if (exec_scoped(*w.body) == Flow::Return) return Flow::Return;
    }
  }

  Flow exec_node(const ccr::Return& r, const Stmt& s) {
    const ccr::FunctionDef& f = program_.functions.at(active().function);
    if (r.value) {
      Value v = convert(eval(*r.value), std::get<ScalarType>(*f.return_type));
      emit(s.span, render(Template::ReturnValue, {display(v), f.name}));
      return_value_ = std::move(v);
    } else {
      emit(s.span, render(Template::ReturnVoid, {f.name}));
      return_value_.reset();
    }
    return Flow::Return;
  }

  Flow exec_node(const ccr::ExprStmt& e, const Stmt& s) {
    if (const auto* m = ccr::as<ccr::ContainerMethodCall>(*e.expr); m && is_effect(m->method)) {
      Value recv = eval(*m->receiver);
      std::vector<Value> args;
      for (const auto& a : m->args) args.push_back(eval(*a));
      call_method(recv, *m, std::move(args), *e.expr, true);
      return Flow::Next;
    }
    if (ccr::as<ccr::FunctionCall>(*e.expr)) {
      eval(*e.expr);
      return Flow::Next;
    }
    eval(*e.expr);
    emit(s.span, render(Template::Evaluate, {ccr::pretty_print(*e.expr)}));
    return Flow::Next;
  }

  Flow exec_node(const ccr::Print& p, const Stmt& s) {
    std::string text;
    for (const auto& item : p.items) text += item ? stream_text(eval(*item)) : std::string("\n");
    emit(s.span, render(Template::Print, {display(Value{text})}));
    stdout_ += text;
    return Flow::Next;
  }

  Flow exec_node(const ccr::Read& r, const Stmt& s) {
    for (const auto& target : r.targets) {
      if (const auto* var = ccr::as<ccr::VarRef>(*target)) {
        ScalarType t = *scalar_type_of(lookup(var->name).value);
        Value v = read_input(t, var->name);
        emit(s.span, render(Template::ReadInput, {display(v), var->name}));
        lookup(var->name).value = std::move(v);
        continue;
      }
      const auto& ix = std::get<ccr::IndexAccess>(target->node);
      Value recv = eval(*ix.receiver);
      ContainerId id = std::get<ContainerRef>(recv).id;
      ccr::ContainerType type = entry_of(recv).type;
      Value key = eval(*ix.index);
      if (type.key) key = convert(key, *type.key);
      std::string label = ccr::pretty_print(*ix.receiver) + "[" + display(key) + "]";
      Value v = read_input(type.elem, label);
      write_element(id, type, key, v, render(Template::ReadInput, {display(v), label}), *target);
    }
    return Flow::Next;
  }

  // ---- input --------------------------------------------------------------

  Value read_input(ScalarType t, const std::string& target) {
    const std::string& in = options_.stdin_text;
    while (input_pos_ < in.size() && std::isspace(static_cast<unsigned char>(in[input_pos_]))) {
      ++input_pos_;
    }
    if (input_pos_ >= in.size()) {
      throw Fault{"InputExhausted", "no input left to read into " + target};
    }
    if (t == ScalarType::Char) return in[input_pos_++];
    std::size_t end = input_pos_;
    while (end < in.size() && !std::isspace(static_cast<unsigned char>(in[end]))) ++end;
    std::string token = in.substr(input_pos_, end - input_pos_);
    input_pos_ = end;
    auto invalid = [&]() {
      return Fault{"InvalidInput", "cannot read \"" + token + "\" as " +
                                       std::string(to_string(t)) + " into " + target};
    };
    switch (t) {
      case ScalarType::String: return token;
      case ScalarType::Double: {
        char* stop = nullptr;
        double d = std::strtod(token.c_str(), &stop);
        if (stop != token.c_str() + token.size() || !std::isfinite(d)) throw invalid();
        return d;
      }
      default: {
        std::string_view digits = token;
        if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
        if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty()) {
          throw invalid();
        }
        if (t == ScalarType::Bool) {
          if (v != 0 && v != 1) throw invalid();
          return v == 1;
        }
        return v;
      }
    }
  }

  // ---- expressions --------------------------------------------------------

  Value eval(const Expr& e) {
    return std::visit([&](const auto& node) { return eval_node(node, e); }, e.node);
  }

  Value eval_node(const ccr::Literal& l, const Expr&) { return l.value; }

  Value eval_node(const ccr::VarRef& v, const Expr&) { return lookup(v.name).value; }

  Value eval_node(const ccr::Binary& b, const Expr&) {
    using ccr::BinaryOp;
    if (b.op == BinaryOp::And) return truthy(eval(*b.lhs)) && truthy(eval(*b.rhs));
    if (b.op == BinaryOp::Or) return truthy(eval(*b.lhs)) || truthy(eval(*b.rhs));
    Value l = eval(*b.lhs);
    Value r = eval(*b.rhs);
    switch (b.op) {
      case BinaryOp::Add:
      case BinaryOp::Sub:
      case BinaryOp::Mul:
      case BinaryOp::Div:
      case BinaryOp::Mod: return arithmetic(b.op, l, r);
      default: return compare(b.op, l, r);
    }
  }

  Value eval_node(const ccr::Unary& u, const Expr&) {
    Value v = eval(*u.operand);
    if (u.op == ccr::UnaryOp::Not) return !truthy(v);
    if (const auto* d = std::get_if<double>(&v)) return -*d;
    std::int64_t i = to_int(v);
    if (i == std::numeric_limits<std::int64_t>::min()) {
      throw Fault{"IntegerOverflow", "-(" + std::to_string(i) + ") overflows"};
    }
    return -i;
  }

  Value eval_node(const ccr::FunctionCall& c, const Expr& e) {
    const ccr::FunctionDef& f = program_.functions.at(c.callee);
    Scope params;
    std::string shown;
    for (std::size_t i = 0; i < c.args.size(); ++i) {
      Value v = eval(*c.args[i]);
      if (const auto* t = std::get_if<ScalarType>(&f.params[i].type)) v = convert(v, *t);
      if (i) shown += ", ";
      shown += describe(v);
      params.vars.push_back(cgr::Binding{f.params[i].name, std::move(v)});
    }
    emit(e.span, render(Template::Call, {f.name, shown}));
    if (stack_.size() >= options_.max_depth) {
      throw Fault{"RecursionDepthExceeded",
                  "call depth exceeds " + std::to_string(options_.max_depth)};
    }
    stack_.push_back(Activation{f.name, e.span, {}});
    active().scopes.push_back(std::move(params));
    SourceSpan saved = current_span_;
    Flow flow = exec(*f.body);
    if (flow != Flow::Return && f.return_type) {
      current_span_ = closing_brace(f);
      throw Fault{"MissingReturn", "function " + f.name + " ended without returning a value"};
    }
    Value result = flow == Flow::Return && return_value_ ? *return_value_ : Value{std::int64_t{0}};
    return_value_.reset();
    pop_activation();
    current_span_ = saved;
    return result;
  }

  Value eval_node(const ccr::ContainerMethodCall& m, const Expr& e) {
    Value recv = eval(*m.receiver);
    if (const auto* s = std::get_if<std::string>(&recv)) {
      return static_cast<std::int64_t>(s->size());
    }
    std::vector<Value> args;
    for (const auto& a : m.args) args.push_back(eval(*a));
    return call_method(recv, m, std::move(args), e, false);
  }

  Value eval_node(const ccr::IndexAccess& ix, const Expr& e) {
    Value recv = eval(*ix.receiver);
    Value key = eval(*ix.index);
    if (const auto* s = std::get_if<std::string>(&recv)) {
      std::int64_t i = to_int(key);
      if (i < 0 || static_cast<std::uint64_t>(i) >= s->size()) {
        throw Fault{"IndexOutOfBounds", "index " + std::to_string(i) +
                                            " is out of range for string of length " +
                                            std::to_string(s->size())};
      }
      return (*s)[static_cast<std::size_t>(i)];
    }
    ccr::ContainerType type = entry_of(recv).type;
    if (type.key) key = convert(key, *type.key);
    return read_element(std::get<ContainerRef>(recv).id, type, key, e);
  }

  // ---- container methods --------------------------------------------------

  static bool is_effect(const std::string& method) {
    return method == "push_back" || method == "push_front" || method == "push" ||
           method == "pop_back" || method == "pop_front" || method == "pop" ||
           method == "insert" || method == "erase";
  }

  Value call_method(const Value& recv, const ccr::ContainerMethodCall& m, std::vector<Value> args,
                    const Expr& e, bool as_statement) {
    HeapEntry& entry = entry_of(recv);
    ContainerId id = std::get<ContainerRef>(recv).id;
    const ccr::ContainerType type = entry.type;
    const std::string& name = m.method;
    std::string label = ccr::pretty_print(*m.receiver);

    if (name == "size") return static_cast<std::int64_t>(entry.state.size());
    if (name == "empty") return entry.state.size() == 0;

    auto statement = [&](std::string text) {
      return as_statement ? std::optional<std::string>(std::move(text)) : std::nullopt;
    };

    if (name == "push_back" || name == "push_front" || name == "push") {
      Value v = convert(args.at(0), type.elem);
      bool front = name == "push_front";
      Template t = type.kind == ContainerKind::Vector  ? Template::Append
                   : type.kind == ContainerKind::Stack ? Template::PushTop
                   : front                             ? Template::AddFront
                                                       : Template::AddBack;
      access(id, false,
             [&](ContainerState& s, Recorder& r) {
               front ? containers::push_front(seq(s), v, r) : containers::push_back(seq(s), v, r);
               return Value{};
             },
             statement(render(t, {display(v), label})), e);
      return Value{};
    }

    if (name == "pop_back" || name == "pop_front" || name == "pop") {
      bool front = name == "pop_front" || (name == "pop" && type.kind == ContainerKind::Queue);
      std::string end = type.kind == ContainerKind::Stack ? "top" : (front ? "front" : "back");
      Recorder silent(id, nullptr);
      Value doomed;
      try {
        auto& sq = seq(entry.state);
        doomed = front ? containers::peek_front(sq, silent) : containers::peek_back(sq, silent);
      } catch (const containers::ContainerError& err) {
        throw Fault{std::string(err.kind_name()), "cannot " + name + " from empty " + label};
      }
      access(id, true,
             [&](ContainerState& s, Recorder& r) {
               return front ? containers::pop_front(seq(s), r) : containers::pop_back(seq(s), r);
             },
             statement(render(Template::Remove, {display(doomed), end, label})), e);
      return Value{};
    }

    if (name == "top" || name == "front" || name == "back") {
      bool front = name == "front";
      try {
        return access(id, false,
                      [&](ContainerState& s, Recorder& r) {
                        return front ? containers::peek_front(seq(s), r)
                                     : containers::peek_back(seq(s), r);
                      },
                      std::nullopt, e);
      } catch (const Fault& f) {
        throw Fault{f.kind, "cannot read " + name + " of empty " + label};
      }
    }

    Value key = convert(args.at(0), *type.key);
    bool bst = type.kind == ContainerKind::BstMap;

    if (name == "insert") {
      Value v = convert(args.at(1), type.elem);
      access(id, false,
             [&](ContainerState& s, Recorder& r) {
               if (bst) {
                 containers::bst_insert(std::get<containers::BstState>(s.payload), key, v, false, r);
               } else {
                 containers::hash_insert(std::get<containers::HashState>(s.payload), key, v, false,
                                         r);
               }
               return Value{};
             },
             statement(render(Template::InsertKey, {display(key), display(v), label})), e);
      return Value{};
    }

    if (name == "erase") {
      return access(id, true,
                    [&](ContainerState& s, Recorder& r) -> Value {
                      std::size_t n =
                          bst ? containers::bst_erase(std::get<containers::BstState>(s.payload), key, r)
                              : containers::hash_erase(std::get<containers::HashState>(s.payload),
                                                       key, r);
                      return static_cast<std::int64_t>(n);
                    },
                    statement(render(Template::EraseKey, {display(key), label})), e);
    }

    // find / count
    Value found = access(id, false,
                         [&](ContainerState& s, Recorder& r) -> Value {
                           auto hit = bst ? containers::bst_find(
                                                std::get<containers::BstState>(s.payload), key, r)
                                          : containers::hash_find(
                                                std::get<containers::HashState>(s.payload), key, r);
                           return hit.has_value();
                         },
                         std::nullopt, e);
    if (name == "count") return static_cast<std::int64_t>(std::get<bool>(found) ? 1 : 0);
    return found;
  }

  // ---- entry point --------------------------------------------------------

  std::int64_t run_main(const ccr::FunctionDef& main) {
    stack_.push_back(Activation{main.name, std::nullopt, {}});
    active().scopes.emplace_back();
    Flow flow = exec(*main.body);
    std::int64_t exit_value = 0;
    if (flow == Flow::Return && return_value_) exit_value = to_int(*return_value_);
    pop_activation();
    return exit_value;
  }

  const ccr::CcrProgram& program_;
  const InterpreterOptions& options_;
  FrameOut out_;

  std::vector<Activation> stack_;
  std::map<std::uint64_t, HeapEntry> heap_;
  std::uint64_t next_container_ = 1;
  std::vector<AccessEvent> pending_;
  std::string stdout_;
  std::size_t input_pos_ = 0;
  std::size_t frames_ = 0;
  SourceSpan current_span_;
  std::optional<Value> return_value_;
};

void check_options(const InterpreterOptions& o) {
  if (o.max_frames < 2) throw std::invalid_argument("max_frames must be at least 2");
  if (o.hash_buckets < 1) throw std::invalid_argument("hash_buckets must be at least 1");
  if (o.stream_chunk && *o.stream_chunk < 1) {
    throw std::invalid_argument("stream_chunk must be at least 1");
  }
  if (o.max_depth < 1) throw std::invalid_argument("max_depth must be at least 1");
}

}  // namespace

cgr::TraceDocument run(const ccr::CcrProgram& program, const InterpreterOptions& options) {
  check_options(options);
  cgr::TraceDocument doc;
  doc.source_text = program.source_text;
  doc.options = options;
  Interpreter(program, options, [&doc](cgr::TraceFrame&& f) {
    doc.frames.push_back(std::move(f));
  }).execute();
  return doc;
}

StreamSummary stream_run(const ccr::CcrProgram& program, const InterpreterOptions& options,
                         const ChunkSink& sink) {
  check_options(options);
  std::size_t chunk = options.stream_chunk.value_or(options.max_frames);
  StreamSummary summary;
  std::vector<cgr::TraceFrame> buffer;
  auto flush = [&](bool last) {
    ++summary.chunks;
    bool more = sink(buffer);
    buffer.clear();
    if (!more && !last) {
      summary.stopped = true;
      throw Halt{};
    }
  };
  Interpreter interp(program, options, [&](cgr::TraceFrame&& f) {
    bool last = f.termination.has_value();
    buffer.push_back(std::move(f));
    ++summary.frames;
    if (buffer.size() == chunk || last) flush(last);
  });
  interp.execute();
  return summary;
}

Result<cgr::TraceDocument> trace_source(std::string_view source,
                                        const InterpreterOptions& options) {
  auto program = frontend::compile(source);
  if (!program) return program.diagnostics();
  return run(program.value(), options);
}

}  // namespace stepviz
