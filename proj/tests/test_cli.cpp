#include <doctest.h>

#include <httplib.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <future>
#include <thread>

#include "stepviz/cli.hpp"
#include "support.hpp"

using namespace stepviz;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("stepviz_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string put(const std::string& name, const std::string& text) const {
    testing::write_file(dir / name, text);
    return (dir / name).string();
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "stepviz");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const char* kGood = "#include <vector>\nint main() {\n  vector<int> v;\n  v.push_back(2);\n  return v[0];\n}\n";

// Runs cmd_serve on a background thread until the test releases it.
class ServerThread {
 public:
  explicit ServerThread(cli::ServeConfig config) {
    std::promise<int> ready;
    port_future_ = ready.get_future();
    thread_ = std::thread([this, config, p = std::move(ready)]() mutable {
      std::ostringstream out, err;
      bool signalled = false;
      code_ = cli::cmd_serve(config, out, err, [&](int port, std::function<void()> stop) {
        stop_ = std::move(stop);
        signalled = true;
        p.set_value(port);
      });
      if (!signalled) p.set_value(-1);
    });
    port_ = port_future_.get();
  }
  ~ServerThread() {
    if (stop_) stop_();
    if (thread_.joinable()) thread_.join();
  }
  int port() const { return port_; }
  int code() {
    if (stop_) stop_();
    stop_ = nullptr;
    if (thread_.joinable()) thread_.join();
    return code_;
  }

 private:
  std::future<int> port_future_;
  std::function<void()> stop_;
  std::thread thread_;
  int port_ = -1;
  int code_ = -1;
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("trace writes a valid document and exits 0") {
  Scratch s;
  auto src = s.put("good.cpp", kGood);
  auto r = invoke({"trace", src, "-o", s.path("good.json")});
  CHECK(r.code == cli::kOk);
  auto doc = cgr::deserialize(testing::read_file(s.path("good.json")));
  CHECK(cgr::validate_document(doc).empty());
  CHECK(doc.frames.back().termination == cgr::Termination{cgr::Finished{2}});

  auto to_stdout = invoke({"trace", src});
  CHECK(to_stdout.code == cli::kOk);
  CHECK(to_stdout.out == testing::read_file(s.path("good.json")));
}

TEST_CASE("exit codes distinguish the outcomes") {
  Scratch s;
  auto compile_err = invoke({"trace", s.put("bad.cpp", "int main() {\n  return y;\n}\n")});
  CHECK(compile_err.code == cli::kCompileError);
  CHECK(compile_err.err.find("bad.cpp:2:10: error [UnresolvedName]") != std::string::npos);

  auto runtime = invoke({"trace", s.put("div.cpp", "int main() {\n  int z = 0;\n  return 1 / z;\n}\n"),
                      "-o", s.path("div.json")});
  CHECK(runtime.code == cli::kRuntimeError);
  CHECK(runtime.err.find("runtime error [DivisionByZero]") != std::string::npos);
  CHECK(cgr::validate_document(cgr::deserialize(testing::read_file(s.path("div.json")))).empty());

  auto loop = invoke({"trace", s.put("loop.cpp", "int main(){ while(true){} }"), "--max-frames", "100",
                   "-o", s.path("loop.json")});
  CHECK(loop.code == cli::kTruncated);
  CHECK(cgr::deserialize(testing::read_file(s.path("loop.json"))).frames.size() == 100);

  CHECK(invoke({"trace", s.path("missing.cpp")}).code == cli::kUsage);
  CHECK(invoke({"trace", s.put("ok.cpp", kGood), "--max-frames", "1"}).code == cli::kUsage);
  CHECK(invoke({"trace", s.path("ok.cpp"), "--bogus"}).code == cli::kUsage);
  CHECK(invoke({}).code == cli::kUsage);
  CHECK(invoke({"--help"}).code == cli::kOk);
}

TEST_CASE("check reports diagnostics without running") {
  Scratch s;
  auto ok = invoke({"check", s.put("ok.cpp", kGood)});
  CHECK(ok.code == cli::kOk);
  CHECK(ok.out == s.path("ok.cpp") + ": ok\n");
  auto bad = invoke({"check", s.put("bad.cpp", "#include <stack>\nint main() {\n  stack<int> st;\n  st.push_front(1);\n  return 0;\n}\n")});
  CHECK(bad.code == cli::kCompileError);
  CHECK(bad.err.find("[IllegalMethod]") != std::string::npos);
}

TEST_CASE("stdin comes from a file") {
  Scratch s;
  auto src = s.put("sum.cpp", "int main() {\n  int a;\n  int b;\n  cin >> a >> b;\n  cout << a + b;\n  return 0;\n}\n");
  auto in = s.put("sum.in", "4 5\n");
  auto r = invoke({"trace", src, "--stdin-file", in, "-o", s.path("sum.json")});
  CHECK(r.code == cli::kOk);
  CHECK(cgr::deserialize(testing::read_file(s.path("sum.json"))).frames.back().stdout_so_far == "9");
}

TEST_CASE("streamed output equals the batch serialization byte for byte") {
  Scratch s;
  for (const auto& p : testing::corpus()) {
    std::vector<std::string> args = {"trace", p.source.string(), "--stream-chunk", "7",
                                     "-o", s.path(p.name + ".json")};
    InterpreterOptions o;
    o.stream_chunk = 7;
    if (!p.stdin_text.empty()) {
      auto in = p.source;
      in.replace_extension(".in");
      args.push_back("--stdin-file");
      args.push_back(in.string());
      o.stdin_text = p.stdin_text;
    }
    auto r = invoke(args);
    CHECK(r.code == cli::exit_code_for(*testing::trace(p.text, o).frames.back().termination));
    CHECK_MESSAGE(testing::read_file(s.path(p.name + ".json")) == cgr::serialize(testing::trace(p.text, o)),
                  p.name);
  }
}

TEST_CASE("validate accepts traces and refuses corrupt ones") {
  Scratch s;
  auto src = s.put("good.cpp", kGood);
  REQUIRE(invoke({"trace", src, "-o", s.path("good.json")}).code == cli::kOk);
  auto ok = invoke({"validate", s.path("good.json")});
  CHECK(ok.code == cli::kOk);
  CHECK(ok.out == s.path("good.json") + ": valid\n");

  auto doc = cgr::deserialize(testing::read_file(s.path("good.json")));
  doc.frames[1].index = 7;
  s.put("bad.json", cgr::serialize(doc));
  auto bad = invoke({"validate", s.path("bad.json")});
  CHECK(bad.code == cli::kInvalidDocument);
  CHECK(bad.err.find("[ContiguityViolation]") != std::string::npos);

  CHECK(invoke({"validate", s.put("junk.json", "{not json")}).code == cli::kInvalidDocument);
  CHECK(invoke({"validate", s.path("nope.json")}).code == cli::kUsage);
}

TEST_CASE("serve exposes the trace over HTTP") {
  Scratch s;
  REQUIRE(invoke({"trace", s.put("good.cpp", kGood), "-o", s.path("good.json")}).code == cli::kOk);
  cli::ServeConfig config;
  config.trace_path = s.path("good.json");
  config.port = 0;
  ServerThread server(config);
  REQUIRE(server.port() > 0);

  httplib::Client client("127.0.0.1", server.port());
  auto trace = client.Get("/trace");
  REQUIRE(trace);
  CHECK(trace->status == 200);
  CHECK(trace->body == testing::read_file(s.path("good.json")));
  CHECK(trace->get_header_value("Content-Type") == "application/json");

  auto health = client.Get("/healthz");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(health->body == "ok");

  auto page = client.Get("/");
  REQUIRE(page);
  CHECK(page->status == 200);
  CHECK(page->body.find("/trace") != std::string::npos);

  CHECK(server.code() == cli::kOk);
}

TEST_CASE("serve mounts a UI bundle directory") {
  Scratch s;
  REQUIRE(invoke({"trace", s.put("good.cpp", kGood), "-o", s.path("good.json")}).code == cli::kOk);
  fs::create_directories(s.dir / "ui");
  s.put("ui/index.html", "<html>stepper</html>");
  s.put("ui/app.js", "console.log(1);");
  cli::ServeConfig config;
  config.trace_path = s.path("good.json");
  config.port = 0;
  config.ui_dir = s.path("ui");
  ServerThread server(config);
  REQUIRE(server.port() > 0);
  httplib::Client client("127.0.0.1", server.port());
  auto index = client.Get("/");
  REQUIRE(index);
  CHECK(index->body == "<html>stepper</html>");
  auto js = client.Get("/app.js");
  REQUIRE(js);
  CHECK(js->body == "console.log(1);");
  auto trace = client.Get("/trace");
  REQUIRE(trace);
  CHECK(trace->body == testing::read_file(s.path("good.json")));
}

TEST_CASE("serve refuses invalid traces and busy ports") {
  Scratch s;
  std::ostringstream out, err;
  cli::ServeConfig bad;
  bad.trace_path = s.put("bad.json", "{\"formatVersion\":\"9.0.0\"}");
  bad.port = 0;
  CHECK(cli::cmd_serve(bad, out, err) == cli::kInvalidDocument);

  REQUIRE(invoke({"trace", s.put("good.cpp", kGood), "-o", s.path("good.json")}).code == cli::kOk);

  int sock = ::socket(AF_INET, SOCK_STREAM, 0);
  REQUIRE(sock >= 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  REQUIRE(::bind(sock, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) == 0);
  REQUIRE(::listen(sock, 1) == 0);
  socklen_t len = sizeof(addr);
  ::getsockname(sock, reinterpret_cast<sockaddr*>(&addr), &len);

  cli::ServeConfig busy;
  busy.trace_path = s.path("good.json");
  busy.port = ntohs(addr.sin_port);
  CHECK(cli::cmd_serve(busy, out, err) == cli::kBindFailure);
  ::close(sock);

  busy.host = "256.1.1.1";
  busy.port = 0;
  CHECK(cli::cmd_serve(busy, out, err) == cli::kBindFailure);
}

}  // TEST_SUITE
