#pragma once

// Tree-walking interpreter over the canonical code representation. Running a
// program yields its trace document: one frame per executed statement, plus
// one per container access when substeps are on, bracketed by an initial
// empty frame and a terminal frame.

#include <functional>
#include <string_view>
#include <vector>

#include "stepviz/ccr.hpp"
#include "stepviz/cgr.hpp"

namespace stepviz {

// Throws std::invalid_argument if the options violate their bounds
// (max_frames >= 2, hash_buckets >= 1, stream_chunk >= 1 when set,
// max_depth >= 1). The program must have passed ccr::validate.
cgr::TraceDocument run(const ccr::CcrProgram& program, const InterpreterOptions& options);

// Receives consecutive frames; returning false stops execution.
using ChunkSink = std::function<bool(const std::vector<cgr::TraceFrame>& chunk)>;

struct StreamSummary {
  std::size_t frames = 0;
  std::size_t chunks = 0;
  bool stopped = false;  // the sink asked to stop before the trace ended
};

// Same frames as run(), delivered in chunks of options.stream_chunk (all at
// once if unset) as soon as each chunk is complete.
StreamSummary stream_run(const ccr::CcrProgram& program, const InterpreterOptions& options,
                         const ChunkSink& sink);

// compile + run.
Result<cgr::TraceDocument> trace_source(std::string_view source, const InterpreterOptions& options);

}  // namespace stepviz
