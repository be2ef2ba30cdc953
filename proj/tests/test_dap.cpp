#include <doctest.h>

#include "swing/dap.hpp"
#include "test_util.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstdlib>
#include <future>
#include <regex>
#include <sstream>
#include <thread>

using namespace swing;
using nlohmann::json;

namespace {

struct Client {
  std::vector<json> out;
  dap::Adapter adapter{[this](const json &m) { out.push_back(m); }};
  int seq = 0;

  // Sends a request and returns everything it produced.
  std::vector<json> send(const std::string &command, json args = json::object()) {
    std::size_t from = out.size();
    json req = {{"seq", ++seq}, {"type", "request"}, {"command", command}};
    if (!args.empty())
      req["arguments"] = args;
    adapter.handle(req);
    return {out.begin() + static_cast<std::ptrdiff_t>(from), out.end()};
  }

  json response(const std::string &command, json args = json::object()) { return send(command, args).at(0); }

  void launch(const std::string &file, const std::string &proc) {
    auto r = send("launch", {{"program", test::corpus_path(file)}, {"procedure", proc}});
    REQUIRE(r.at(0)["success"] == true);
  }

  json tree() { return response("fullMap")["body"]["tree"]; }

  std::int64_t find(const std::string &text, const std::string &status = "") {
    auto t = tree();
    for (const auto &n : t["nodes"])
      if (n["text"] == text && (status.empty() || n["status"] == status))
        return n["id"];
    throw std::runtime_error("no node " + text);
  }

  std::vector<std::string> vars(int ref) {
    std::vector<std::string> out;
    auto r = response("variables", {{"variablesReference", ref}});
    for (const auto &v : r["body"]["variables"])
      out.push_back(v["name"].get<std::string>() + " = " + v["value"].get<std::string>());
    return out;
  }
};

std::vector<std::string> kinds(const std::vector<json> &ms) {
  std::vector<std::string> out;
  for (const auto &m : ms)
    out.push_back(m["type"] == "event" ? "event:" + m["event"].get<std::string>()
                                       : "response:" + m["command"].get<std::string>());
  return out;
}

std::string framed_script(const json &requests) {
  std::string s;
  for (const auto &r : requests)
    s += dap::frame(r);
  return s;
}

std::string substitute(std::string s, const std::string &from, const std::string &to) {
  for (std::size_t at = s.find(from); at != std::string::npos; at = s.find(from, at + to.size()))
    s.replace(at, from.size(), to);
  return s;
}

std::string run_transcript(const std::string &name) {
  auto script = test::read_file(std::string(SWING_GOLDEN_DIR) + "/" + name + ".requests.json");
  script = substitute(script, "${CORPUS}", SWING_CORPUS_DIR);
  std::istringstream in(framed_script(json::parse(script)));
  std::ostringstream out;
  dap::serve(in, out);
  return out.str();
}

// Transcripts are stored one message per line, with the corpus path
// abstracted, so that the golden file is readable and machine-independent.
std::string normalize(const std::string &raw) {
  std::istringstream in(raw);
  std::string out;
  while (auto m = dap::read_message(in))
    out += m->dump() + "\n";
  return substitute(out, SWING_CORPUS_DIR, "${CORPUS}");
}

// The transcript with every "seq" value blanked.
std::string without_seq(const std::string &s) {
  return std::regex_replace(s, std::regex(R"("(request_)?seq":\d+)"), R"("$1seq":_)");
}

} // namespace

TEST_CASE("framing") {
  CHECK(dap::frame(json{{"a", 1}}) == "Content-Length: 7\r\n\r\n{\"a\":1}");

  std::istringstream in(dap::frame(json{{"a", 1}}) + "Content-Type: x\r\nContent-Length: 2\r\n\r\n[]");
  CHECK(dap::read_message(in) == json{{"a", 1}});
  CHECK(dap::read_message(in) == json::array());
  CHECK_FALSE(dap::read_message(in));

  auto bad = [](const std::string &s) {
    std::istringstream in(s);
    return dap::read_message(in);
  };
  CHECK_THROWS_AS(bad("Content-Length: 2\n\n[]"), dap::ProtocolError);
  CHECK_THROWS_AS(bad("X: 1\r\n\r\n[]"), dap::ProtocolError);
  CHECK_THROWS_AS(bad("Content-Length: 5\r\n\r\n[]"), dap::ProtocolError);
  CHECK_THROWS_AS(bad("Content-Length: 2\r\n\r\n{x"), dap::ProtocolError);
  CHECK_THROWS_AS(bad("Content-Length: -2\r\n\r\n[]"), dap::ProtocolError);
}

TEST_CASE("initialize and protocol laws") {
  Client c;
  auto r = c.response("initialize", {{"adapterID", "swing"}});
  CHECK(r["success"] == true);
  CHECK(r["body"]["supportsStepBack"] == true);
  CHECK(r["body"]["supportsRestartRequest"] == true);
  CHECK(r["request_seq"] == 1);

  auto u = c.response("frobnicate");
  CHECK(u["success"] == false);
  CHECK(u["message"] == "unknown command 'frobnicate'");

  auto n = c.response("next");
  CHECK(n["success"] == false);

  c.adapter.handle(json{{"seq", 41}, {"type", "request"}, {"command", "threads"}});
  c.adapter.handle(json{{"seq", 40}, {"type", "request"}, {"command", "initialize"}});
  CHECK(c.out[c.out.size() - 2]["request_seq"] == 41);
  CHECK(c.out.back()["request_seq"] == 40);
  for (std::size_t i = 1; i < c.out.size(); ++i)
    CHECK(c.out[i]["seq"].get<int>() == c.out[i - 1]["seq"].get<int>() + 1);
}

TEST_CASE("launch emits the initial tree and stops at the root") {
  Client c;
  c.send("initialize");
  auto ms = c.send("launch", {{"program", test::corpus_path("llen_buggy.wisl")}, {"procedure", "llen"}});
  CHECK(kinds(ms) ==
        std::vector<std::string>{"response:launch", "event:initialized", "event:mapUpdate", "event:stopped"});
  const auto &map = ms[2]["body"];
  CHECK(map["kind"] == "full");
  REQUIRE(map["tree"]["nodes"].size() == 1);
  const auto &root = map["tree"]["nodes"][0];
  REQUIRE(root["children"].size() == 1);
  CHECK(root["children"][0]["id"] == "unexplored");
  CHECK(ms[3]["body"]["reason"] == "entry");

  CHECK(c.vars(1) == std::vector<std::string>{"x = #x"});
  CHECK(c.vars(2).empty());

  auto scopes = c.response("scopes", {{"frameId", 0}})["body"]["scopes"];
  std::vector<std::string> names;
  for (const auto &s : scopes)
    names.push_back(s["name"]);
  CHECK(names == std::vector<std::string>{"Store", "Heap", "Predicates", "Path Conditions"});
  CHECK(c.response("threads")["body"]["threads"].size() == 1);
}

TEST_CASE("launch failures") {
  Client c;
  auto r = c.response("launch", {{"program", test::corpus_path("llen_buggy.wisl")}, {"procedure", "nope"}});
  CHECK(r["success"] == false);
  CHECK(r["message"].get<std::string>().find("nope") != std::string::npos);

  auto dir = std::filesystem::temp_directory_path() / "swing_dap_test";
  std::filesystem::create_directories(dir);
  auto file = dir / "broken.wisl";
  std::ofstream(file) << "function f() {\n  x := ;\n  return x\n}\n";
  auto p = c.response("launch", {{"program", file.string()}, {"procedure", "f"}});
  CHECK(p["success"] == false);
  CHECK(p["message"].get<std::string>().find("broken.wisl:2:") != std::string::npos);

  auto m = c.response("launch", {{"program", (dir / "missing.wisl").string()}, {"procedure", "f"}});
  CHECK(m["success"] == false);
}

TEST_CASE("run control on llen") {
  Client c;
  c.launch("llen_buggy.wisl", "llen");
  auto back = c.response("stepBack");
  CHECK(back["success"] == false);
  CHECK(back["message"] == "nothing to undo");

  auto ms = c.send("next");
  CHECK(kinds(ms) == std::vector<std::string>{"response:next", "event:mapUpdate", "event:stopped"});
  CHECK(ms[1]["body"]["kind"] == "delta");
  auto fork = ms[2]["body"]["nodeId"].get<std::int64_t>();

  auto amb = c.send("next");
  REQUIRE(amb.size() == 1);
  CHECK(amb[0]["success"] == false);
  CHECK(amb[0]["message"] == "branch choice required");

  auto banana = c.response("stepSpecific", {{"nodeId", fork}, {"branchLabel", "banana"}});
  CHECK(banana["success"] == false);

  auto el = c.send("stepSpecific", {{"nodeId", fork}, {"branchLabel", "else"}});
  CHECK(kinds(el) == std::vector<std::string>{"response:stepSpecific", "event:mapUpdate", "event:stopped"});
  bool created = false;
  for (const auto &n : el[1]["body"]["tree"]["nodes"])
    created |= n["text"] == "x+1";
  CHECK(created);

  auto again = c.response("stepSpecific", {{"nodeId", fork}, {"branchLabel", "else"}});
  CHECK(again["success"] == false);
  CHECK(again["message"] == "already explored; use jump");

  auto th = c.send("stepSpecific", {{"nodeId", fork}, {"branchLabel", "then"}});
  CHECK(th[0]["success"] == true);
  auto t = c.tree();
  std::set<std::string> labels;
  for (const auto &ch : t["nodes"][fork]["children"])
    labels.insert(ch["label"].get<std::string>());
  CHECK(labels == std::set<std::string>{"then", "else"});

  // Walk the else path to the failure and inspect the state there.
  c.response("jump", {{"nodeId", c.find("x+1")}});
  for (int i = 0; i < 3; ++i)
    c.send("next");
  auto bad = c.find("return n", "Finished-Failure");
  auto j = c.send("jump", {{"nodeId", bad}});
  CHECK(kinds(j) == std::vector<std::string>{"response:jump", "event:stopped"});
  auto pc = c.vars(4);
  bool found = false;
  for (const auto &f : pc)
    found |= std::regex_search(f, std::regex(R"(#alpha == \[#lvar_\d+\] @ #lvar_\d+)"));
  CHECK(found);
  auto store = c.vars(1);
  CHECK(std::any_of(store.begin(), store.end(), [](const std::string &s) { return s.starts_with("ret = len(#lvar_"); }));

  auto frame = c.response("stackTrace", {{"threadId", 1}})["body"]["stackFrames"][0];
  CHECK(frame["line"] == 14);
  CHECK(frame["column"] == 3);
  CHECK(frame["name"] == "return n");

  auto unknown = c.response("jump", {{"nodeId", 12345}});
  CHECK(unknown["success"] == false);
  auto same = c.send("jump", {{"nodeId", bad}});
  CHECK(kinds(same) == std::vector<std::string>{"response:jump", "event:stopped"});
}

TEST_CASE("continue after choosing then stops at the verified return") {
  Client c;
  c.launch("llen_fixed.wisl", "llen");
  auto fork = c.send("next")[2]["body"]["nodeId"].get<std::int64_t>();
  c.send("stepSpecific", {{"nodeId", fork}, {"branchLabel", "then"}});
  auto ms = c.send("continue");
  CHECK(ms.back()["event"] == "stopped");
  auto at = ms.back()["body"]["nodeId"].get<std::int64_t>();
  auto node = c.tree()["nodes"][at];
  CHECK(node["text"] == "return n");
  CHECK(node["status"] == "Finished-Success");
}

TEST_CASE("breakpoints stop continue") {
  Client c;
  c.response("setBreakpoints", {{"source", {{"path", "llen_fixed.wisl"}}}, {"breakpoints", {{{"line", 13}}}}});
  c.launch("llen_fixed.wisl", "llen");
  auto fork = c.send("next")[2]["body"]["nodeId"].get<std::int64_t>();
  c.send("stepSpecific", {{"nodeId", fork}, {"branchLabel", "else"}});
  auto ms = c.send("continue");
  CHECK(ms.back()["body"]["reason"] == "breakpoint");
  auto at = ms.back()["body"]["nodeId"].get<std::int64_t>();
  CHECK(c.tree()["nodes"][at]["text"] == "n := n + 1");
}

TEST_CASE("every state change ends in exactly one stop") {
  Client c;
  c.launch("length_iter.wisl", "length");
  for (const char *cmd : {"next", "next", "stepIn", "next", "stepOut", "next", "stepBack", "reverseContinue",
                          "restart", "continue"}) {
    CAPTURE(cmd);
    auto ms = c.send(cmd);
    REQUIRE(ms[0]["success"] == true);
    int stops = 0, maps = 0;
    for (std::size_t i = 1; i < ms.size(); ++i) {
      if (ms[i]["event"] == "stopped") {
        ++stops;
        CHECK(i == ms.size() - 1);
      }
      maps += ms[i]["event"] == "mapUpdate";
    }
    CHECK(stops == 1);
    CHECK(maps <= 1);
    if (maps == 1)
      CHECK(ms[ms.size() - 2]["event"] == "mapUpdate");
  }
}

TEST_CASE("restart rebuilds the session") {
  Client c;
  c.launch("llen_buggy.wisl", "llen");
  c.send("next");
  CHECK(c.tree()["nodes"].size() == 2);
  auto ms = c.send("restart");
  CHECK(kinds(ms) == std::vector<std::string>{"response:restart", "event:mapUpdate", "event:stopped"});
  CHECK(c.tree()["nodes"].size() == 1);
}

TEST_CASE("golden transcript replays byte for byte") {
  auto first = run_transcript("llen_session");
  auto second = run_transcript("llen_session");
  CHECK(first == second);
  auto path = std::string(SWING_GOLDEN_DIR) + "/llen_session.transcript";
  if (std::getenv("SWING_UPDATE_GOLDEN"))
    std::ofstream(path, std::ios::binary) << normalize(first);
  CHECK(without_seq(normalize(first)) == without_seq(test::read_file(path)));

  // One mapUpdate right before each stopped that follows a tree change.
  std::istringstream in(first);
  std::vector<json> ms;
  while (auto m = dap::read_message(in))
    ms.push_back(*m);
  for (std::size_t i = 0; i < ms.size(); ++i)
    if (ms[i].value("event", "") == "mapUpdate")
      CHECK(ms.at(i + 1)["event"] == "stopped");
}

TEST_CASE("stdio serve stops on malformed framing") {
  std::istringstream in(dap::frame(json{{"seq", 1}, {"type", "request"}, {"command", "initialize"}}) +
                        "garbage\r\n\r\n" +
                        dap::frame(json{{"seq", 2}, {"type", "request"}, {"command", "initialize"}}));
  std::ostringstream out;
  dap::serve(in, out);
  std::istringstream back(out.str());
  int n = 0;
  while (dap::read_message(back))
    ++n;
  CHECK(n == 1);
}

TEST_CASE("tcp transport") {
  std::promise<int> bound;
  auto port = bound.get_future();
  std::thread server([&] { dap::serve_tcp(0, [&](int p) { bound.set_value(p); }, 1); });
  int p = port.get();
  CHECK(p > 0);

  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(p));
  REQUIRE(::connect(fd, reinterpret_cast<sockaddr *>(&addr), sizeof addr) == 0);
  std::string req = dap::frame(json{{"seq", 1}, {"type", "request"}, {"command", "initialize"}}) +
                    dap::frame(json{{"seq", 2}, {"type", "request"}, {"command", "disconnect"}});
  REQUIRE(::write(fd, req.data(), req.size()) == static_cast<ssize_t>(req.size()));
  std::string got;
  char buf[4096];
  for (ssize_t n; (n = ::read(fd, buf, sizeof buf)) > 0;)
    got.append(buf, static_cast<std::size_t>(n));
  ::close(fd);
  server.join();
  std::istringstream in(got);
  auto first = dap::read_message(in);
  REQUIRE(first);
  CHECK((*first)["command"] == "initialize");
  CHECK((*first)["body"]["supportsStepBack"] == true);
  auto second = dap::read_message(in);
  REQUIRE(second);
  CHECK((*second)["command"] == "disconnect");
}
