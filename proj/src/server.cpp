#include "hyperspace/server.hpp"

#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <list>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace hyperspace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

std::string contentType(const std::filesystem::path& p) {
    const std::string ext = p.extension().string();
    if (ext == ".html") return "text/html";
    if (ext == ".js" || ext == ".mjs") return "application/javascript";
    if (ext == ".css") return "text/css";
    if (ext == ".json") return "application/json";
    if (ext == ".png") return "image/png";
    if (ext == ".svg") return "image/svg+xml";
    return "application/octet-stream";
}

http::response<http::string_body> staticResponse(const http::request<http::string_body>& req,
                                                 const std::string& root) {
    auto reply = [&](http::status status, std::string body, const std::string& type) {
        http::response<http::string_body> res{status, req.version()};
        res.set(http::field::content_type, type);
        res.keep_alive(false);
        res.body() = std::move(body);
        res.prepare_payload();
        return res;
    };
    if (req.method() != http::verb::get) return reply(http::status::bad_request, "GET only\n", "text/plain");
    std::string target(req.target());
    if (const auto q = target.find('?'); q != std::string::npos) target.resize(q);
    if (root.empty() || target.empty() || target[0] != '/' || target.find("..") != std::string::npos) {
        return reply(http::status::not_found, "not found\n", "text/plain");
    }
    if (target.back() == '/') target += "index.html";
    const std::filesystem::path path = std::filesystem::path(root) / target.substr(1);
    std::ifstream in(path, std::ios::binary);
    if (!in) return reply(http::status::not_found, "not found\n", "text/plain");
    std::ostringstream body;
    body << in.rdbuf();
    return reply(http::status::ok, body.str(), contentType(path));
}

}  // namespace

struct Server::Impl {
    ServerConfig config;
    std::shared_ptr<TilingCache> cache = std::make_shared<TilingCache>();
    asio::io_context ioc;
    std::unique_ptr<tcp::acceptor> acceptor;
    std::thread acceptThread;

    mutable std::mutex mutex;
    std::condition_variable stopped;
    bool running = false;
    bool finished = false;
    std::list<std::shared_ptr<tcp::socket>> sockets;
    std::list<std::thread> workers;
    int active = 0;
    int served = 0;

    void acceptLoop() {
        for (;;) {
            auto socket = std::make_shared<tcp::socket>(ioc);
            beast::error_code ec;
            acceptor->accept(*socket, ec);
            std::lock_guard lock(mutex);
            if (!running) return;
            if (ec) continue;
            // One small frame per tick: do not let Nagle hold replies back.
            socket->set_option(tcp::no_delay(true), ec);
            sockets.push_back(socket);
            ++active;
            ++served;
            workers.emplace_back([this, socket] { serveConnection(socket); });
        }
    }

    void serveConnection(const std::shared_ptr<tcp::socket>& socket) {
        try {
            beast::flat_buffer buffer;
            http::request<http::string_body> req;
            http::read(*socket, buffer, req);
            if (websocket::is_upgrade(req)) {
                websocket::stream<tcp::socket&> ws(*socket);
                ws.accept(req);
                ws.text(true);
                Session session(config.session, cache);
                for (;;) {
                    beast::flat_buffer in;
                    ws.read(in);
                    const Session::Reply reply = session.handle(beast::buffers_to_string(in.data()));
                    ws.write(asio::buffer(reply.text));
                    if (reply.close) {
                        ws.close(websocket::close_code::policy_error);
                        break;
                    }
                }
            } else {
                http::write(*socket, staticResponse(req, config.staticRoot));
            }
        } catch (const std::exception&) {
            // Peer went away or sent garbage; the session simply ends.
        }
        beast::error_code ec;
        socket->shutdown(tcp::socket::shutdown_both, ec);
        std::lock_guard lock(mutex);
        sockets.remove(socket);
        --active;
    }
};

Server::Server(ServerConfig config) : impl_(std::make_unique<Impl>()) { impl_->config = std::move(config); }

Server::~Server() { stop(); }

void Server::start() {
    Impl& s = *impl_;
    const tcp::endpoint endpoint(asio::ip::make_address(s.config.address), s.config.port);
    s.acceptor = std::make_unique<tcp::acceptor>(s.ioc);
    s.acceptor->open(endpoint.protocol());
    s.acceptor->set_option(asio::socket_base::reuse_address(true));
    s.acceptor->bind(endpoint);
    s.acceptor->listen();
    {
        std::lock_guard lock(s.mutex);
        s.running = true;
        s.finished = false;
    }
    s.acceptThread = std::thread([&s] { s.acceptLoop(); });
}

void Server::stop() {
    Impl& s = *impl_;
    {
        std::lock_guard lock(s.mutex);
        if (!s.running) return;
        s.running = false;
        for (auto& sock : s.sockets) {
            beast::error_code ec;
            sock->shutdown(tcp::socket::shutdown_both, ec);
        }
    }
    // Wake the blocking accept with a throwaway connection, then close.
    {
        beast::error_code ec;
        tcp::socket poke(s.ioc);
        poke.connect(tcp::endpoint(asio::ip::make_address(s.config.address), port()), ec);
    }
    if (s.acceptThread.joinable()) s.acceptThread.join();
    beast::error_code ec;
    s.acceptor->close(ec);
    std::list<std::thread> workers;
    {
        std::lock_guard lock(s.mutex);
        workers.swap(s.workers);
    }
    for (auto& t : workers) t.join();
    {
        std::lock_guard lock(s.mutex);
        s.finished = true;
    }
    s.stopped.notify_all();
}

void Server::wait() {
    std::unique_lock lock(impl_->mutex);
    impl_->stopped.wait(lock, [this] { return impl_->finished; });
}

unsigned short Server::port() const { return impl_->acceptor ? impl_->acceptor->local_endpoint().port() : 0; }

int Server::activeSessions() const {
    std::lock_guard lock(impl_->mutex);
    return impl_->active;
}

int Server::sessionsServed() const {
    std::lock_guard lock(impl_->mutex);
    return impl_->served;
}

}  // namespace hyperspace
