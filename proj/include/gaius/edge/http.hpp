#pragma once

#include "gaius/edge/service.hpp"

#include <condition_variable>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace gaius::edge {

// HTTP status for an error code.
int http_status(Errc code) noexcept;

// {"error": code, "message": text, "violations": [...]}
json error_body(const Error& e);

// HTTP/1.1 front end for an EdgeService. Pending metrics records are flushed
// once a second while the server runs and in full on stop().
class HttpServer {
public:
    explicit HttpServer(EdgeService& service);
    ~HttpServer();

    // Binds (port 0 picks a free port) and serves on a background thread.
    // Returns the bound port; throws Error(io_error) when binding fails.
    int start(const std::string& host, int port);
    // Blocks until stop() has finished on another thread.
    void wait();
    void stop();

private:
    void routes();

    EdgeService& service_;
    std::unique_ptr<httplib::Server> server_;
    std::thread listener_;
    std::thread flusher_;
    std::mutex mu_;
    std::condition_variable cv_;
    bool stopping_ = false;
    bool stopped_ = false;
};

}  // namespace gaius::edge
