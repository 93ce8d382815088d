#include "driverl/transport.hpp"

#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <cstring>

#include "driverl/error.hpp"
#include "httplib.h"

namespace driverl {

namespace {

constexpr std::size_t kMaxLine = 64u << 20;

bool write_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    off += static_cast<std::size_t>(n);
  }
  return true;
}

sockaddr_un unix_address(const std::string& path) {
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  if (path.size() >= sizeof(addr.sun_path)) throw ValidationError("socket path too long: " + path);
  std::memcpy(addr.sun_path, path.c_str(), path.size() + 1);
  return addr;
}

}  // namespace

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(RolloutService& service) : impl_(std::make_unique<Impl>()) {
  auto bind = [&](const char* path, ServiceReply (RolloutService::*fn)(const std::string&)) {
    impl_->server.Post(path, [&service, fn](const httplib::Request& req, httplib::Response& res) {
      const ServiceReply reply = (service.*fn)(req.body);
      res.status = reply.status;
      res.set_content(reply.body, "application/json");
    });
  };
  bind("/task", &RolloutService::handle_task);
  bind("/score", &RolloutService::handle_score);
  bind("/episode", &RolloutService::handle_episode);
  impl_->server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const std::string code = res.status == 404 ? "not_found" : "bad_request";
    res.set_content(error_body(code, "HTTP " + std::to_string(res.status)), "application/json");
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port(host);
    if (port_ < 0) throw Error("cannot bind " + host);
  } else {
    if (!impl_->server.bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
    port_ = port;
  }
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port_;
}

void HttpServer::listen(const std::string& host, int port) {
  port_ = port;
  if (!impl_->server.listen(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
}

void HttpServer::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

SocketServer::SocketServer(RolloutService& service) : service_(service) {}

SocketServer::~SocketServer() { stop(); }

void SocketServer::start(const std::string& path) {
  const sockaddr_un addr = unix_address(path);
  listen_fd_ = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw Error(std::string("socket: ") + std::strerror(errno));
  ::unlink(path.c_str());
  if (::bind(listen_fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listen_fd_, 64) != 0) {
    const std::string err = std::strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw Error("cannot bind socket " + path + ": " + err);
  }
  path_ = path;
  running_ = true;
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void SocketServer::accept_loop() {
  while (running_) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      break;
    }
    std::lock_guard lock(clients_mutex_);
    if (!running_) {
      ::close(fd);
      break;
    }
    client_fds_.push_back(fd);
    clients_.emplace_back([this, fd] { serve_client(fd); });
  }
}

void SocketServer::serve_client(int fd) {
  std::string buffer;
  char chunk[65536];
  bool open = true;
  while (open) {
    const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t nl;
    while ((nl = buffer.find('\n')) != std::string::npos) {
      std::string line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      if (!write_all(fd, service_.handle_line(line).body + "\n")) {
        open = false;
        break;
      }
    }
    if (buffer.size() > kMaxLine) {
      write_all(fd, error_body("bad_request", "request line too long") + "\n");
      break;
    }
  }
  std::lock_guard lock(clients_mutex_);
  std::erase(client_fds_, fd);
  ::close(fd);
}

void SocketServer::stop() {
  if (!running_.exchange(false)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  if (accept_thread_.joinable()) accept_thread_.join();
  std::vector<std::thread> clients;
  {
    std::lock_guard lock(clients_mutex_);
    for (int fd : client_fds_) ::shutdown(fd, SHUT_RDWR);
    clients.swap(clients_);
  }
  for (auto& t : clients) t.join();
  ::unlink(path_.c_str());
  listen_fd_ = -1;
}

SocketClient::SocketClient(const std::string& path) {
  const sockaddr_un addr = unix_address(path);
  fd_ = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (fd_ < 0 || ::connect(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
    const std::string err = std::strerror(errno);
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
    throw PolicyError("cannot connect to " + path + ": " + err);
  }
}

SocketClient::~SocketClient() {
  if (fd_ >= 0) ::close(fd_);
}

void SocketClient::send_raw(const std::string& bytes) {
  if (!write_all(fd_, bytes)) throw PolicyError("socket write failed");
}

std::string SocketClient::read_line() {
  char chunk[65536];
  std::size_t nl;
  while ((nl = buffer_.find('\n')) == std::string::npos) {
    const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw PolicyError("socket closed before a response line");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
  std::string line = buffer_.substr(0, nl);
  buffer_.erase(0, nl + 1);
  return line;
}

std::string SocketClient::request(const std::string& line) {
  send_raw(line + "\n");
  return read_line();
}

HttpResponse http_post(const std::string& base_url, const std::string& path, const std::string& body,
                       int timeout_seconds) {
  httplib::Client client(base_url);
  client.set_connection_timeout(5);
  client.set_read_timeout(timeout_seconds);
  client.set_write_timeout(timeout_seconds);
  auto res = client.Post(path, body, "application/json");
  if (!res) throw PolicyError("POST " + base_url + path + " failed: " + httplib::to_string(res.error()));
  return {res->status, res->body};
}

int port_from_env(int fallback) {
  const char* v = std::getenv("DRIVERL_PORT");
  if (!v || !*v) return fallback;
  char* end = nullptr;
  const long p = std::strtol(v, &end, 10);
  if (*end != '\0' || p < 0 || p > 65535) throw ValidationError(std::string("bad DRIVERL_PORT '") + v + "'");
  return static_cast<int>(p);
}

}  // namespace driverl
