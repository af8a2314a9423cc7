#include "stepviz/cli.hpp"

#include <CLI11.hpp>
#include <httplib.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include "stepviz/frontend.hpp"
#include "stepviz/interpreter.hpp"

namespace stepviz::cli {

namespace {

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void print_diagnostics(const Diagnostics& diags, const std::string& path, std::ostream& err) {
  for (const auto& d : diags) err << path << ":" << d.to_string() << "\n";
}

// Built-in page served at / when no UI bundle directory is given.
constexpr const char* kFallbackPage = R"(<!doctype html>
<html>
<head><meta charset="utf-8"><title>stepviz trace</title></head>
<body>
<p>No stepper bundle is being served. The trace is available at <a href="/trace">/trace</a>.</p>
<pre id="summary"></pre>
<script>
fetch('/trace').then(r => r.json()).then(doc => {
  const last = doc.frames[doc.frames.length - 1];
  document.getElementById('summary').textContent =
      doc.frames.length + ' frames, ended: ' + last.termination.status;
});
</script>
</body>
</html>
)";

}  // namespace

int exit_code_for(const cgr::Termination& t) {
  switch (t.index()) {
    case 0: return kOk;
    case 1: return kRuntimeError;
    default: return kTruncated;
  }
}

int cmd_check(const std::string& source_path, std::ostream& out, std::ostream& err) {
  auto source = read_file(source_path);
  if (!source) {
    err << "cannot read " << source_path << "\n";
    return kUsage;
  }
  auto program = frontend::compile(*source);
  if (!program) {
    print_diagnostics(program.diagnostics(), source_path, err);
    return kCompileError;
  }
  out << source_path << ": ok\n";
  return kOk;
}

int cmd_trace(const TraceConfig& config, std::ostream& out, std::ostream& err) {
  auto source = read_file(config.source_path);
  if (!source) {
    err << "cannot read " << config.source_path << "\n";
    return kUsage;
  }
  InterpreterOptions options = config.options;
  if (config.stdin_path) {
    auto input = read_file(*config.stdin_path);
    if (!input) {
      err << "cannot read " << *config.stdin_path << "\n";
      return kUsage;
    }
    options.stdin_text = *input;
  }
  auto program = frontend::compile(*source);
  if (!program) {
    print_diagnostics(program.diagnostics(), config.source_path, err);
    return kCompileError;
  }

  std::ofstream file;
  if (config.out_path) {
    file.open(*config.out_path, std::ios::binary | std::ios::trunc);
    if (!file) {
      err << "cannot write " << *config.out_path << "\n";
      return kUsage;
    }
  }
  std::ostream& sink = config.out_path ? file : out;

  std::optional<cgr::Termination> termination;
  if (options.stream_chunk) {
    cgr::TraceDocument head;
    head.source_text = program.value().source_text;
    head.options = options;
    sink << cgr::header_prefix(head);
    bool first = true;
    stream_run(program.value(), options, [&](const std::vector<cgr::TraceFrame>& chunk) {
      for (const auto& f : chunk) {
        if (!first) sink << ',';
        first = false;
        sink << cgr::serialize_frame(f);
        if (f.termination) termination = f.termination;
      }
      sink.flush();
      return true;
    });
    sink << cgr::kDocumentSuffix;
  } else {
    cgr::TraceDocument doc = run(program.value(), options);
    termination = doc.frames.back().termination;
    sink << cgr::serialize(doc);
  }
  sink.flush();
  if (!sink) {
    err << "failed writing the trace\n";
    return kUsage;
  }
  if (const auto* e = std::get_if<cgr::RuntimeError>(&*termination)) {
    err << config.source_path << ":" << e->span.start_line << ":" << e->span.start_col
        << ": runtime error [" << e->kind << "] " << e->message << "\n";
  } else if (std::holds_alternative<cgr::Truncated>(*termination)) {
    err << config.source_path << ": trace truncated at " << options.max_frames << " frames\n";
  }
  return exit_code_for(*termination);
}

namespace {

// Reads and fully validates a trace file. Returns the exit code to use on
// failure, or the raw bytes.
std::variant<int, std::string> load_valid_trace(const std::string& path, std::ostream& err) {
  auto bytes = read_file(path);
  if (!bytes) {
    err << "cannot read " << path << "\n";
    return kUsage;
  }
  try {
    cgr::TraceDocument doc = cgr::deserialize(*bytes);
    Diagnostics diags = cgr::validate_document(doc);
    if (!diags.empty()) {
      for (const auto& d : diags) err << path << ": [" << d.kind << "] " << d.message << "\n";
      return kInvalidDocument;
    }
  } catch (const cgr::CgrError& e) {
    err << path << ": " << e.what() << "\n";
    return kInvalidDocument;
  }
  return std::move(*bytes);
}

}  // namespace

int cmd_validate(const std::string& trace_path, std::ostream& out, std::ostream& err) {
  auto loaded = load_valid_trace(trace_path, err);
  if (const int* code = std::get_if<int>(&loaded)) return *code;
  out << trace_path << ": valid\n";
  return kOk;
}

int cmd_serve(const ServeConfig& config, std::ostream& out, std::ostream& err,
              const ServeReady& ready) {
  auto loaded = load_valid_trace(config.trace_path, err);
  if (const int* code = std::get_if<int>(&loaded)) return *code;
  const std::string trace = std::get<std::string>(std::move(loaded));

  httplib::Server server;
  // SO_REUSEADDR only, so a port in use fails to bind.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  if (config.ui_dir && !server.set_mount_point("/", *config.ui_dir)) {
    err << "cannot serve UI directory " << *config.ui_dir << "\n";
    return kUsage;
  }
  if (!config.ui_dir) {
    server.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(kFallbackPage, "text/html; charset=utf-8");
    });
  }
  server.Get("/trace", [&trace](const httplib::Request&, httplib::Response& res) {
    res.set_content(trace, "application/json");
  });
  server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("ok", "text/plain");
  });

  int port = config.port;
  if (port == 0) {
    port = server.bind_to_any_port(config.host);
    if (port < 0) port = -1;
  } else if (!server.bind_to_port(config.host, port)) {
    port = -1;
  }
  if (port < 0) {
    err << "cannot listen on " << config.host << ":" << config.port << "\n";
    return kBindFailure;
  }
  out << "serving " << config.trace_path << " on http://" << config.host << ":" << port << "/\n";
  out.flush();
  if (ready) ready(port, [&server] {
    server.wait_until_ready();
    server.stop();
  });
  server.listen_after_bind();
  return kOk;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Step-by-step execution traces for a teaching subset of C++"};
  app.require_subcommand(1);

  TraceConfig trace;
  std::string out_path;
  std::string stdin_path;
  std::size_t stream_chunk = 0;
  auto* trace_cmd = app.add_subcommand("trace", "Run a program and write its trace document");
  trace_cmd->add_option("source", trace.source_path, "Program source file")
      ->required()
      ->check(CLI::ExistingFile);
  trace_cmd->add_option("--out,-o", out_path, "Output file (default: standard output)");
  trace_cmd->add_option("--max-frames", trace.options.max_frames, "Frame limit")
      ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
  trace_cmd->add_option("--hash-buckets", trace.options.hash_buckets, "unordered_map bucket count")
      ->check(CLI::PositiveNumber);
  trace_cmd->add_flag("--substeps,!--no-substeps", trace.options.substeps,
                      "Give every container access its own frame (default on)");
  trace_cmd->add_option("--stream-chunk", stream_chunk, "Write frames in chunks of this size")
      ->check(CLI::PositiveNumber);
  trace_cmd->add_option("--stdin-file", stdin_path, "File supplying the program's input")
      ->check(CLI::ExistingFile);
  trace_cmd->add_option("--max-depth", trace.options.max_depth, "Call depth limit")
      ->check(CLI::PositiveNumber);

  std::string check_path;
  auto* check_cmd = app.add_subcommand("check", "Compile a program and report diagnostics");
  check_cmd->add_option("source", check_path, "Program source file")->required();

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a trace document");
  validate_cmd->add_option("trace", validate_path, "Trace document")->required();

  ServeConfig serve;
  std::string ui_dir;
  auto* serve_cmd = app.add_subcommand("serve", "Serve a trace and the stepper over HTTP");
  serve_cmd->add_option("trace", serve.trace_path, "Trace document")->required();
  serve_cmd->add_option("--port", serve.port, "Port to listen on")
      ->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--host", serve.host, "Address to bind");
  serve_cmd->add_option("--ui-dir", ui_dir, "Directory holding the stepper bundle")
      ->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  if (trace_cmd->parsed()) {
    if (!out_path.empty()) trace.out_path = out_path;
    if (!stdin_path.empty()) trace.stdin_path = stdin_path;
    if (stream_chunk > 0) trace.options.stream_chunk = stream_chunk;
    return cmd_trace(trace, out, err);
  }
  if (check_cmd->parsed()) return cmd_check(check_path, out, err);
  if (validate_cmd->parsed()) return cmd_validate(validate_path, out, err);
  if (!ui_dir.empty()) serve.ui_dir = ui_dir;
  return cmd_serve(serve, out, err);
}

}  // namespace stepviz::cli
