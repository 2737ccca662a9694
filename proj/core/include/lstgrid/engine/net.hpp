#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "lstgrid/engine/wire.hpp"

namespace lstgrid::engine::net {

struct Endpoint {
    std::string host;
    std::uint16_t port = 0;

    std::string to_string() const;
};

/// Parses `host:port`; throws std::invalid_argument.
Endpoint parse_endpoint(std::string_view text);

/// Owning TCP socket.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) noexcept : fd_(fd) {}
    ~Socket();
    Socket(Socket&& other) noexcept;
    Socket& operator=(Socket&& other) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;

    int fd() const noexcept { return fd_; }
    bool valid() const noexcept { return fd_ >= 0; }
    void close() noexcept;
    /// shutdown(2) both directions; unblocks readers in other threads.
    void shutdown() noexcept;

    static Socket connect(const Endpoint& ep, std::chrono::milliseconds timeout);
    /// Binds and listens; port 0 picks an ephemeral port.
    static Socket listen(const Endpoint& ep, int backlog = 64);
    std::uint16_t local_port() const;
    /// Blocks until a client connects; empty when the listener was shut down.
    std::optional<Socket> accept();

    /// Throws ProtocolError on I/O failure or peer close.
    void send_frame(const wire::Frame& frame);
    /// Waits at most `timeout` for data to start arriving; empty on timeout.
    /// Throws ProtocolError on peer close or malformed frame.
    std::optional<wire::Frame> recv_frame(std::chrono::milliseconds timeout);
    wire::Frame recv_frame();

private:
    int fd_ = -1;
};

} // namespace lstgrid::engine::net
