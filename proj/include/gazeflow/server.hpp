// Transports for the serve pipeline: newline-delimited JSON over a stream
// pair, a local TCP socket, or HTTP for browsers.
//
// One Session per connection (TCP) or per session id (HTTP); sessions are
// independent and each is driven sequentially.
#pragma once

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

#include <httplib.h>

#include "gazeflow/pipeline.hpp"

namespace gazeflow {

/// Feeds one NDJSON line; unparseable lines produce an error message.
inline std::vector<wire::json> feed_line(Session& session, const std::string& line) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) return {};
    wire::json msg;
    try {
        msg = wire::json::parse(line);
    } catch (const wire::json::parse_error& e) {
        return {wire::error(0.0, std::string("bad json: ") + e.what())};
    }
    return session.on_message(msg);
}

/// Runs a session over a pair of streams until EOF, then flushes.
inline void serve_stream(const PipelineConfig& cfg, std::istream& in, std::ostream& out) {
    Session session(cfg);
    std::string line;
    while (std::getline(in, line)) {
        for (const auto& m : feed_line(session, line)) out << m.dump() << '\n';
        out.flush();
    }
    for (const auto& m : session.finish()) out << m.dump() << '\n';
    out.flush();
}

/// Blocking TCP server bound to 127.0.0.1. Each accepted connection gets
/// its own thread and Session.
class TcpServer {
public:
    explicit TcpServer(PipelineConfig cfg) : cfg_(cfg) {}
    ~TcpServer() { stop(); }

    TcpServer(const TcpServer&) = delete;
    TcpServer& operator=(const TcpServer&) = delete;

    /// Binds and listens; port 0 picks a free port. Returns the bound port.
    int listen(int port) {
        fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd_ < 0) throw std::system_error(errno, std::generic_category(), "socket");
        int one = 1;
        ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        addr.sin_port = htons(static_cast<uint16_t>(port));
        if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0)
            throw std::system_error(errno, std::generic_category(), "bind");
        if (::listen(fd_, 16) < 0) throw std::system_error(errno, std::generic_category(), "listen");
        socklen_t len = sizeof addr;
        ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
        return ntohs(addr.sin_port);
    }

    /// Accept loop; returns after stop().
    void run() {
        while (!stopping_) {
            const int client = ::accept(fd_, nullptr, nullptr);
            if (client < 0) {
                if (stopping_) break;
                if (errno == EINTR) continue;
                break;
            }
            std::lock_guard lock(mu_);
            workers_.emplace_back([this, client] { handle(client); });
        }
        std::vector<std::thread> workers;
        {
            std::lock_guard lock(mu_);
            workers.swap(workers_);
        }
        for (auto& w : workers) w.join();
    }

    void stop() {
        if (stopping_.exchange(true)) return;
        if (fd_ >= 0) {
            ::shutdown(fd_, SHUT_RDWR);
            ::close(fd_);
        }
    }

private:
    void handle(int client) {
        Session session(cfg_);
        std::string buffer;
        char chunk[4096];
        auto send_all = [client](const std::vector<wire::json>& msgs) {
            std::string data;
            for (const auto& m : msgs) data += m.dump() + '\n';
            std::size_t off = 0;
            while (off < data.size()) {
                const auto n = ::send(client, data.data() + off, data.size() - off, MSG_NOSIGNAL);
                if (n <= 0) return false;
                off += static_cast<std::size_t>(n);
            }
            return true;
        };
        bool ok = true;
        while (ok) {
            const auto n = ::recv(client, chunk, sizeof chunk, 0);
            if (n <= 0) break;
            buffer.append(chunk, static_cast<std::size_t>(n));
            std::size_t nl;
            while (ok && (nl = buffer.find('\n')) != std::string::npos) {
                const std::string line = buffer.substr(0, nl);
                buffer.erase(0, nl + 1);
                ok = send_all(feed_line(session, line));
            }
        }
        if (ok) {
            if (!buffer.empty()) ok = send_all(feed_line(session, buffer));
            if (ok) send_all(session.finish());
        }
        ::close(client);
    }

    PipelineConfig cfg_;
    int fd_ = -1;
    std::atomic<bool> stopping_{false};
    std::mutex mu_;
    std::vector<std::thread> workers_;
};

/// HTTP bridge for browsers, which cannot open raw sockets:
///
///   POST   /session/<id>   body: upstream NDJSON  -> response: downstream NDJSON
///   DELETE /session/<id>                          -> flush events, session dropped
///   GET    /health
///
/// Requests on one session id are serialized.
class HttpBridge {
public:
    explicit HttpBridge(PipelineConfig cfg) : cfg_(cfg) {
        server_.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
        server_.Options(R"(/session/([A-Za-z0-9_\-]+))", [](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Methods", "POST, DELETE, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.status = 204;
        });
        server_.Get("/health", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("{\"status\":\"ok\"}\n", "application/json");
        });
        server_.Post(R"(/session/([A-Za-z0-9_\-]+))", [this](const httplib::Request& req, httplib::Response& res) {
            auto entry = session(req.matches[1]);
            std::string body;
            {
                std::lock_guard lock(entry->mu);
                std::size_t pos = 0;
                while (pos <= req.body.size()) {
                    auto nl = req.body.find('\n', pos);
                    if (nl == std::string::npos) nl = req.body.size();
                    for (const auto& m : feed_line(entry->session, req.body.substr(pos, nl - pos)))
                        body += m.dump() + '\n';
                    pos = nl + 1;
                }
            }
            res.set_content(body, "application/x-ndjson");
        });
        server_.Delete(R"(/session/([A-Za-z0-9_\-]+))", [this](const httplib::Request& req, httplib::Response& res) {
            std::shared_ptr<Entry> entry;
            {
                std::lock_guard lock(mu_);
                auto it = sessions_.find(req.matches[1]);
                if (it == sessions_.end()) {
                    res.status = 404;
                    return;
                }
                entry = it->second;
                sessions_.erase(it);
            }
            std::string body;
            std::lock_guard lock(entry->mu);
            for (const auto& m : entry->session.finish()) body += m.dump() + '\n';
            res.set_content(body, "application/x-ndjson");
        });
    }

    /// Binds to 127.0.0.1; port 0 picks a free port. Returns the bound port.
    int bind(int port) {
        const int p = port == 0 ? server_.bind_to_any_port("127.0.0.1") : (server_.bind_to_port("127.0.0.1", port) ? port : -1);
        if (p < 0) throw std::runtime_error("cannot bind HTTP bridge to port " + std::to_string(port));
        return p;
    }
    void run() { server_.listen_after_bind(); }
    void stop() { server_.stop(); }
    void wait_until_ready() { server_.wait_until_ready(); }

private:
    struct Entry {
        explicit Entry(const PipelineConfig& c) : session(c) {}
        std::mutex mu;
        Session session;
    };

    std::shared_ptr<Entry> session(const std::string& id) {
        std::lock_guard lock(mu_);
        auto& e = sessions_[id];
        if (!e) e = std::make_shared<Entry>(cfg_);
        return e;
    }

    PipelineConfig cfg_;
    httplib::Server server_;
    std::mutex mu_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

}  // namespace gazeflow
