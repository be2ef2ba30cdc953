#pragma once

// Debug Adapter Protocol server: base-protocol framing, the standard
// run-control and state requests, and the tree extensions (mapUpdate event,
// jump / stepSpecific / fullMap requests).

#include "swing/lifter.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

namespace swing::dap {

using nlohmann::json;

class ProtocolError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// `Content-Length: <n>\r\n\r\n<body>`
std::string frame(const json &body);
/// Next framed message; nullopt on clean end of stream. Throws ProtocolError
/// on bad framing or a body that is not JSON.
std::optional<json> read_message(std::istream &in);

/// One debugging session. Requests go in, responses and events come out
/// through the sink in emission order.
class Adapter {
public:
  using Sink = std::function<void(const json &)>;
  explicit Adapter(Sink sink) : sink_(std::move(sink)) {}

  void handle(const json &request);
  bool done() const { return done_; }

  /// The live explorer, once launched.
  const lifter::Explorer *explorer() const { return ex_.get(); }

private:
  Sink sink_;
  int seq_ = 0;
  bool done_ = false;
  std::unique_ptr<lifter::Explorer> ex_;
  json launch_args_;
  std::set<int> breakpoints_;

  void respond(const json &req, bool ok, json body = json::object(), const std::string &message = {});
  void event(const std::string &name, json body = json::object());
  void stopped(const std::string &reason);
  void map_update(const lifter::TreeDelta &d, bool full);

  void launch(const json &args);
  json variables(int ref) const;
};

/// Serves one connection until disconnect or end of stream.
void serve(std::istream &in, std::ostream &out);

/// Listens on 127.0.0.1:port (0 picks a free port) and serves connections
/// one at a time. on_listen receives the bound port. Serves at most
/// max_connections when given.
void serve_tcp(int port, const std::function<void(int)> &on_listen,
               std::optional<int> max_connections = std::nullopt);

} // namespace swing::dap
