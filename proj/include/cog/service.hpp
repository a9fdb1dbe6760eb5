#pragma once

#include <memory>
#include <string>
#include <thread>

#include "cog/session.hpp"

namespace httplib {
class Server;
}

namespace cog {

/// HTTP front end over a SessionManager. JSON in, JSON out; errors come back
/// as {"error": code, "detail": text}.
class Service {
 public:
  explicit Service(std::shared_ptr<SessionManager> sessions);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and serves on a background thread; returns the bound port
  /// (pass 0 for an ephemeral one).
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

  SessionManager& sessions() { return *sessions_; }

 private:
  void routes();

  std::shared_ptr<SessionManager> sessions_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

/// HTTP status for a runtime error code.
int http_status_for(const std::string& code);

}  // namespace cog
