#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "lstgrid/engine/net.hpp"
#include "lstgrid/engine/ops.hpp"

namespace lstgrid::engine {

struct WorkerServerOptions {
    std::uint16_t protocol_version = wire::kProtocolVersion;
    /// Fault injection: after this many RESULT frames have been sent (across
    /// all connections) the server drops every connection and stops, like a
    /// killed process.
    std::optional<std::size_t> exit_after_results;
};

/// Executes JOB frames from coordinators. One thread per connection; PING is
/// answered while a job runs.
class WorkerServer {
public:
    explicit WorkerServer(WorkerServerOptions options = {});
    ~WorkerServer();
    WorkerServer(const WorkerServer&) = delete;
    WorkerServer& operator=(const WorkerServer&) = delete;

    /// Binds the listener; returns the bound port.
    std::uint16_t bind(const net::Endpoint& endpoint);
    /// Accept loop; returns after stop().
    void serve();
    /// serve() on a background thread.
    void start();
    void stop();

    std::uint16_t port() const noexcept { return port_; }
    std::size_t results_sent() const noexcept { return results_sent_.load(); }
    bool stopped() const noexcept { return stopping_.load(); }

private:
    void handle(std::shared_ptr<net::Socket> conn);
    void note_result_sent();

    WorkerServerOptions options_;
    net::Socket listener_;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::atomic<std::size_t> results_sent_{0};
    std::thread accept_thread_;
    std::mutex conns_mutex_;
    std::vector<std::shared_ptr<net::Socket>> conns_;
    std::vector<std::thread> conn_threads_;
};

/// Coordinator side of one worker connection (one job slot).
class WorkerConnection {
public:
    struct Timing {
        std::chrono::milliseconds connect_timeout{5000};
        std::chrono::milliseconds ping_interval{2000};
        std::chrono::milliseconds ping_timeout{10000};
    };

    /// Connects and performs the HELLO handshake. Throws ProtocolError when
    /// the worker rejects the version or cannot be reached.
    static WorkerConnection connect(const net::Endpoint& endpoint, Timing timing,
                                    std::uint16_t version = wire::kProtocolVersion);
    static WorkerConnection connect(const net::Endpoint& endpoint) {
        return connect(endpoint, Timing{});
    }

    /// Ships the job and waits for its RESULT. While waiting, the worker is
    /// PINGed every ping_interval; silence for ping_timeout throws
    /// ProtocolError (worker dead). An ERROR frame yields TaskError.
    OpOutput run(std::uint64_t job_id, const OpParams& params,
                 std::span<const RasterGrid* const> bands);

    /// Round-trip PING; false when no PONG arrives within ping_timeout.
    bool ping();

    const net::Endpoint& endpoint() const noexcept { return endpoint_; }

private:
    WorkerConnection(net::Endpoint ep, net::Socket sock, Timing timing)
        : endpoint_(std::move(ep)), socket_(std::move(sock)), timing_(timing) {}

    wire::Frame await_frame();

    net::Endpoint endpoint_;
    net::Socket socket_;
    Timing timing_;
};

/// Connects to a worker (HELLO handshake).
inline WorkerConnection connect_worker(const net::Endpoint& endpoint) {
    return WorkerConnection::connect(endpoint);
}

} // namespace lstgrid::engine
