#pragma once

// WebSocket frame server: one thread and one Session per connection. Plain
// HTTP GET requests are answered from an optional static directory.

#include <atomic>
#include <memory>
#include <string>

#include "hyperspace/session.hpp"

namespace hyperspace {

struct ServerConfig {
    std::string address = "127.0.0.1";
    unsigned short port = 0;  // 0 picks a free port
    std::string staticRoot;   // empty: no static files
    SessionConfig session;
};

class Server {
public:
    explicit Server(ServerConfig config);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds and starts accepting on a background thread.
    void start();
    /// Closes the listener and every open connection, then joins all threads.
    void stop();
    /// Blocks until stop() is called from elsewhere.
    void wait();

    unsigned short port() const;
    int activeSessions() const;
    int sessionsServed() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace hyperspace
