#include "swing/dap.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cctype>
#include <cstring>
#include <istream>
#include <ostream>
#include <streambuf>

namespace swing::dap {

std::string frame(const json &body) {
  std::string s = body.dump();
  return "Content-Length: " + std::to_string(s.size()) + "\r\n\r\n" + s;
}

std::optional<json> read_message(std::istream &in) {
  std::optional<std::size_t> length;
  bool any = false;
  for (;;) {
    std::string line;
    if (!std::getline(in, line)) {
      if (!any && line.empty())
        return std::nullopt;
      throw ProtocolError("stream ended inside a header");
    }
    any = true;
    if (line.empty() || line.back() != '\r')
      throw ProtocolError("header line not terminated by CRLF");
    line.pop_back();
    if (line.empty())
      break;
    auto colon = line.find(':');
    if (colon == std::string::npos)
      throw ProtocolError("malformed header '" + line + "'");
    std::string name = line.substr(0, colon);
    std::string value = line.substr(colon + 1);
    while (!value.empty() && value.front() == ' ')
      value.erase(value.begin());
    if (name == "Content-Length") {
      if (value.empty() || !std::all_of(value.begin(), value.end(), [](unsigned char c) { return std::isdigit(c); }))
        throw ProtocolError("bad Content-Length '" + value + "'");
      length = std::stoul(value);
    }
  }
  if (!length)
    throw ProtocolError("missing Content-Length");
  std::string body(*length, '\0');
  if (!in.read(body.data(), static_cast<std::streamsize>(body.size())))
    throw ProtocolError("stream ended inside a body");
  try {
    return json::parse(body);
  } catch (const json::parse_error &e) {
    throw ProtocolError(std::string("body is not JSON: ") + e.what());
  }
}

void serve(std::istream &in, std::ostream &out) {
  Adapter a([&](const json &m) {
    out << frame(m);
    out.flush();
  });
  try {
    while (!a.done()) {
      auto m = read_message(in);
      if (!m)
        return;
      a.handle(*m);
    }
  } catch (const ProtocolError &) {
    // Bad framing closes the connection.
  }
}

namespace {

class FdBuf : public std::streambuf {
public:
  explicit FdBuf(int fd) : fd_(fd) { setg(in_, in_, in_); setp(out_, out_ + sizeof out_); }
  ~FdBuf() override { sync(); }

protected:
  int_type underflow() override {
    ssize_t n = ::read(fd_, in_, sizeof in_);
    if (n <= 0)
      return traits_type::eof();
    setg(in_, in_, in_ + n);
    return traits_type::to_int_type(*gptr());
  }
  int_type overflow(int_type c) override {
    if (sync() != 0)
      return traits_type::eof();
    if (!traits_type::eq_int_type(c, traits_type::eof())) {
      *pptr() = traits_type::to_char_type(c);
      pbump(1);
    }
    return traits_type::not_eof(c);
  }
  int sync() override {
    for (char *p = pbase(); p < pptr();) {
      ssize_t n = ::write(fd_, p, static_cast<std::size_t>(pptr() - p));
      if (n <= 0)
        return -1;
      p += n;
    }
    setp(out_, out_ + sizeof out_);
    return 0;
  }

private:
  int fd_;
  char in_[4096];
  char out_[4096];
};

struct Fd {
  int fd;
  ~Fd() {
    if (fd >= 0)
      ::close(fd);
  }
};

} // namespace

void serve_tcp(int port, const std::function<void(int)> &on_listen, std::optional<int> max_connections) {
  Fd server{::socket(AF_INET, SOCK_STREAM, 0)};
  if (server.fd < 0)
    throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
  int yes = 1;
  ::setsockopt(server.fd, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::bind(server.fd, reinterpret_cast<sockaddr *>(&addr), sizeof addr) != 0)
    throw std::runtime_error("cannot bind port " + std::to_string(port) + ": " + std::strerror(errno));
  if (::listen(server.fd, 4) != 0)
    throw std::runtime_error(std::string("listen: ") + std::strerror(errno));
  socklen_t len = sizeof addr;
  ::getsockname(server.fd, reinterpret_cast<sockaddr *>(&addr), &len);
  if (on_listen)
    on_listen(ntohs(addr.sin_port));

  for (int served = 0; !max_connections || served < *max_connections; ++served) {
    Fd conn{::accept(server.fd, nullptr, nullptr)};
    if (conn.fd < 0)
      throw std::runtime_error(std::string("accept: ") + std::strerror(errno));
    FdBuf buf(conn.fd);
    std::istream in(&buf);
    std::ostream out(&buf);
    serve(in, out);
  }
}

} // namespace swing::dap
