#pragma once

// Explanation templates. Each frame's explanation is one of these patterns
// with its placeholders filled in order; docs/templates.md is the published
// copy of the table.

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace stepviz::explain {

enum class Template {
  DeclareInit = 1,   // T1
  DeclareDefault,    // T2
  LoopEnter,         // T3
  LoopExit,          // T4
  IfTrue,            // T5
  IfFalseElse,       // T6
  Append,            // T7
  IfFalseSkip,       // T8
  AssignVar,         // T9
  UpdateVar,         // T10
  AssignIndex,       // T11
  UpdateIndex,       // T12
  CreateSized,       // T13
  CreateEmpty,       // T14
  ReturnValue,       // T15
  ReturnVoid,        // T16
  Print,             // T17
  ReadInput,         // T18
  Call,              // T19
  EnterScope,        // T20
  PushTop,           // T21
  AddBack,           // T22
  AddFront,          // T23
  Remove,            // T24
  InsertKey,         // T25
  EraseKey,          // T26
  Evaluate,          // T27
  ProgramStart,      // T28
  ProgramFinished,   // T29
  RuntimeError,      // T30
  Truncated,         // T31
  SubstepRead,       // T32
  SubstepWrite,      // T33
  SubstepDelete,     // T34
};

struct TemplateInfo {
  Template id;
  std::string_view pattern;
};

inline constexpr std::array<TemplateInfo, 34> kTemplates{{
    {Template::DeclareInit, "Declaring variable {x} and initializing it to {v}"},
    {Template::DeclareDefault, "Declaring variable {x} with default value {v}"},
    {Template::LoopEnter, "Condition {cond} is true, entering loop"},
    {Template::LoopExit, "Condition {cond} is false, exiting loop"},
    {Template::IfTrue, "Condition {cond} is true, entering if branch"},
    {Template::IfFalseElse, "Condition {cond} is false, entering else branch"},
    {Template::Append, "Appending {v} to the back of {c}"},
    {Template::IfFalseSkip, "Condition {cond} is false, skipping if branch"},
    {Template::AssignVar, "Assigning {v} to variable {x}"},
    {Template::UpdateVar, "Updating variable {x} from {old} to {new}"},
    {Template::AssignIndex, "Assigning {v} to {c}[{k}]"},
    {Template::UpdateIndex, "Updating {c}[{k}] from {old} to {new}"},
    {Template::CreateSized, "Creating {kind} {x} with {n} elements"},
    {Template::CreateEmpty, "Creating empty {kind} {x}"},
    {Template::ReturnValue, "Returning {v} from {f}"},
    {Template::ReturnVoid, "Returning from {f}"},
    {Template::Print, "Printing {text}"},
    {Template::ReadInput, "Reading {v} from input into {target}"},
    {Template::Call, "Calling {f}({args})"},
    {Template::EnterScope, "Entering a new scope"},
    {Template::PushTop, "Pushing {v} onto the top of {c}"},
    {Template::AddBack, "Adding {v} to the back of {c}"},
    {Template::AddFront, "Adding {v} to the front of {c}"},
    {Template::Remove, "Removing {v} from the {end} of {c}"},
    {Template::InsertKey, "Inserting key {k} with value {v} into {c}"},
    {Template::EraseKey, "Erasing key {k} from {c}"},
    {Template::Evaluate, "Evaluating {expr}"},
    {Template::ProgramStart, "Starting program execution at {f}"},
    {Template::ProgramFinished, "Program finished with exit code {v}"},
    {Template::RuntimeError, "Runtime error: {message}"},
    {Template::Truncated, "Execution stopped after {n} frames (frame limit reached)"},
    {Template::SubstepRead, "Reading {target} of {c}"},
    {Template::SubstepWrite, "Writing {target} of {c}"},
    {Template::SubstepDelete, "Deleting {target} of {c}"},
}};

// "T1", "T2", ...
std::string template_id(Template t);
std::string_view pattern(Template t);

// Fills the placeholders left to right. Throws std::invalid_argument if the
// argument count does not match the pattern.
std::string render(Template t, const std::vector<std::string>& args);

}  // namespace stepviz::explain
