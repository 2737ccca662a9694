#include "lstgrid/engine/net.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/uio.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>
#include <string>

#include "lstgrid/error.hpp"
#include "../text_util.hpp"

namespace lstgrid::engine::net {

namespace {

// Inactivity allowed once a frame has started arriving.
constexpr std::chrono::milliseconds kMidFrameTimeout{30000};

std::string errno_text(const char* what) {
    return std::string(what) + ": " + std::strerror(errno);
}

/// Waits until readable; false on timeout.
bool wait_readable(int fd, std::chrono::milliseconds timeout) {
    pollfd p{fd, POLLIN, 0};
    while (true) {
        const int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
        if (rc > 0) return true;
        if (rc == 0) return false;
        if (errno != EINTR) throw ProtocolError(errno_text("poll"));
    }
}

void read_exact(int fd, std::uint8_t* dst, std::size_t n) {
    while (n > 0) {
        if (!wait_readable(fd, kMidFrameTimeout)) throw ProtocolError("peer stalled mid-frame");
        const ssize_t got = ::recv(fd, dst, n, 0);
        if (got == 0) throw ProtocolError("connection closed by peer");
        if (got < 0) {
            if (errno == EINTR || errno == EAGAIN) continue;
            throw ProtocolError(errno_text("recv"));
        }
        dst += got;
        n -= static_cast<std::size_t>(got);
    }
}

void write_all(int fd, const std::uint8_t* src, std::size_t n) {
    while (n > 0) {
        const ssize_t sent = ::send(fd, src, n, MSG_NOSIGNAL);
        if (sent < 0) {
            if (errno == EINTR) continue;
            throw ProtocolError(errno_text("send"));
        }
        src += sent;
        n -= static_cast<std::size_t>(sent);
    }
}

} // namespace

std::string Endpoint::to_string() const { return host + ":" + std::to_string(port); }

Endpoint parse_endpoint(std::string_view text) {
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos || colon == 0)
        throw std::invalid_argument("endpoint must be host:port, got '" + std::string(text) + "'");
    const auto port = detail::parse_int<std::uint32_t>(text.substr(colon + 1));
    if (!port || *port > 65535)
        throw std::invalid_argument("bad port in endpoint '" + std::string(text) + "'");
    return {std::string(text.substr(0, colon)), static_cast<std::uint16_t>(*port)};
}

Socket::~Socket() { close(); }

Socket::Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

Socket& Socket::operator=(Socket&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = other.fd_;
        other.fd_ = -1;
    }
    return *this;
}

void Socket::close() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
}

void Socket::shutdown() noexcept {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

Socket Socket::connect(const Endpoint& ep, std::chrono::milliseconds timeout) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string port = std::to_string(ep.port);
    if (const int rc = ::getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &res); rc != 0)
        throw ProtocolError("resolve " + ep.to_string() + ": " + ::gai_strerror(rc));

    std::string last_error = "no addresses";
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
        Socket s(::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol));
        if (!s.valid()) continue;
        const int flags = ::fcntl(s.fd(), F_GETFL, 0);
        ::fcntl(s.fd(), F_SETFL, flags | O_NONBLOCK);
        int rc = ::connect(s.fd(), ai->ai_addr, ai->ai_addrlen);
        if (rc < 0 && errno == EINPROGRESS) {
            pollfd p{s.fd(), POLLOUT, 0};
            rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
            if (rc == 0) {
                last_error = "connect timed out";
                continue;
            }
            int err = 0;
            socklen_t len = sizeof err;
            ::getsockopt(s.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
            if (err != 0) {
                last_error = std::strerror(err);
                continue;
            }
            rc = 0;
        }
        if (rc < 0) {
            last_error = std::strerror(errno);
            continue;
        }
        ::fcntl(s.fd(), F_SETFL, flags);
        int one = 1;
        ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        ::freeaddrinfo(res);
        return s;
    }
    ::freeaddrinfo(res);
    throw ProtocolError("connect " + ep.to_string() + ": " + last_error);
}

Socket Socket::listen(const Endpoint& ep, int backlog) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    const std::string port = std::to_string(ep.port);
    const char* host = ep.host.empty() || ep.host == "*" ? nullptr : ep.host.c_str();
    if (const int rc = ::getaddrinfo(host, port.c_str(), &hints, &res); rc != 0)
        throw ProtocolError("resolve " + ep.to_string() + ": " + ::gai_strerror(rc));
    std::string last_error = "no addresses";
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
        Socket s(::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol));
        if (!s.valid()) continue;
        int one = 1;
        ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(s.fd(), ai->ai_addr, ai->ai_addrlen) < 0 || ::listen(s.fd(), backlog) < 0) {
            last_error = std::strerror(errno);
            continue;
        }
        ::freeaddrinfo(res);
        return s;
    }
    ::freeaddrinfo(res);
    throw ProtocolError("listen " + ep.to_string() + ": " + last_error);
}

std::uint16_t Socket::local_port() const {
    sockaddr_storage addr{};
    socklen_t len = sizeof addr;
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) < 0)
        throw ProtocolError(errno_text("getsockname"));
    if (addr.ss_family == AF_INET)
        return ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
    return ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
}

std::optional<Socket> Socket::accept() {
    while (true) {
        const int fd = ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
        if (fd >= 0) {
            int one = 1;
            ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
            return Socket(fd);
        }
        if (errno == EINTR || errno == ECONNABORTED) continue;
        return std::nullopt;
    }
}

void Socket::send_frame(const wire::Frame& frame) {
    const std::size_t length = frame.payload.size() + 1;
    if (length > wire::kMaxFrameBytes) throw ProtocolError("frame exceeds 256 MiB limit");
    std::uint8_t header[5] = {
        static_cast<std::uint8_t>(length >> 24), static_cast<std::uint8_t>(length >> 16),
        static_cast<std::uint8_t>(length >> 8), static_cast<std::uint8_t>(length),
        static_cast<std::uint8_t>(frame.type)};
    write_all(fd_, header, sizeof header);
    write_all(fd_, frame.payload.data(), frame.payload.size());
}

std::optional<wire::Frame> Socket::recv_frame(std::chrono::milliseconds timeout) {
    if (!wait_readable(fd_, timeout)) return std::nullopt;
    std::uint8_t header[5];
    read_exact(fd_, header, sizeof header);
    const std::uint32_t length = (std::uint32_t{header[0]} << 24) | (std::uint32_t{header[1]} << 16) |
                                 (std::uint32_t{header[2]} << 8) | header[3];
    if (length == 0 || length > wire::kMaxFrameBytes) throw ProtocolError("bad frame length");
    if (header[4] < 1 || header[4] > 7)
        throw ProtocolError("unknown message type " + std::to_string(header[4]));
    wire::Frame f;
    f.type = static_cast<wire::MsgType>(header[4]);
    f.payload.resize(length - 1);
    read_exact(fd_, f.payload.data(), f.payload.size());
    return f;
}

wire::Frame Socket::recv_frame() {
    while (true)
        if (auto f = recv_frame(std::chrono::milliseconds(60000))) return std::move(*f);
}

} // namespace lstgrid::engine::net
