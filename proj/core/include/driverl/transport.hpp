#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <thread>

#include "driverl/service.hpp"

namespace driverl {

/// POST /task, /score, /episode bound to a RolloutService.
class HttpServer {
 public:
  explicit HttpServer(RolloutService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds (port 0 picks a free port) and serves on a background thread.
  /// Throws Error when the address cannot be bound.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Blocks serving on the calling thread.
  void listen(const std::string& host, int port);
  void stop();
  int port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
  int port_ = 0;
};

/// Line-delimited JSON over a unix stream socket; one request object per
/// line, one response object per line, in order.
class SocketServer {
 public:
  explicit SocketServer(RolloutService& service);
  ~SocketServer();
  SocketServer(const SocketServer&) = delete;
  SocketServer& operator=(const SocketServer&) = delete;

  /// Binds `path` (an existing socket file is replaced) and accepts on a
  /// background thread.
  void start(const std::string& path);
  void stop();
  const std::string& path() const { return path_; }

 private:
  void accept_loop();
  void serve_client(int fd);

  RolloutService& service_;
  std::string path_;
  int listen_fd_ = -1;
  std::atomic<bool> running_{false};
  std::thread accept_thread_;
  std::mutex clients_mutex_;
  std::vector<std::thread> clients_;
  std::vector<int> client_fds_;
};

/// Blocking line client for SocketServer.
class SocketClient {
 public:
  explicit SocketClient(const std::string& path);
  ~SocketClient();
  SocketClient(const SocketClient&) = delete;
  SocketClient& operator=(const SocketClient&) = delete;

  /// Sends one line, returns the response line (without newline). Throws
  /// PolicyError on transport failure.
  std::string request(const std::string& line);
  void send_raw(const std::string& bytes);
  std::string read_line();

 private:
  int fd_ = -1;
  std::string buffer_;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// POST a JSON body to base_url + path ("http://host:port"). Throws
/// PolicyError when the endpoint is unreachable.
HttpResponse http_post(const std::string& base_url, const std::string& path, const std::string& body,
                       int timeout_seconds = 600);

/// Port from DRIVERL_PORT, or `fallback`. Throws ValidationError on a bad value.
int port_from_env(int fallback = 8080);

}  // namespace driverl
