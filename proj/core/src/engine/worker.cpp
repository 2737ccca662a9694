#include "lstgrid/engine/worker.hpp"

#include <iostream>
#include <string>

#include "lstgrid/error.hpp"

namespace lstgrid::engine {

WorkerServer::WorkerServer(WorkerServerOptions options) : options_(options) {}

WorkerServer::~WorkerServer() { stop(); }

std::uint16_t WorkerServer::bind(const net::Endpoint& endpoint) {
    listener_ = net::Socket::listen(endpoint);
    port_ = listener_.local_port();
    return port_;
}

void WorkerServer::serve() {
    if (!listener_.valid()) throw std::logic_error("WorkerServer::serve before bind");
    while (!stopping_) {
        auto conn = listener_.accept();
        if (!conn) break;
        auto shared = std::make_shared<net::Socket>(std::move(*conn));
        std::lock_guard lock(conns_mutex_);
        if (stopping_) {
            shared->shutdown();
            break;
        }
        conns_.push_back(shared);
        conn_threads_.emplace_back([this, shared] { handle(shared); });
    }
}

void WorkerServer::start() {
    accept_thread_ = std::thread([this] { serve(); });
}

void WorkerServer::stop() {
    stopping_ = true;
    listener_.shutdown();
    {
        std::lock_guard lock(conns_mutex_);
        for (auto& c : conns_) c->shutdown();
    }
    if (accept_thread_.joinable()) accept_thread_.join();
    std::vector<std::thread> threads;
    {
        std::lock_guard lock(conns_mutex_);
        threads.swap(conn_threads_);
    }
    for (auto& t : threads)
        if (t.joinable()) t.join();
    std::lock_guard lock(conns_mutex_);
    conns_.clear();
    listener_.close();
}

void WorkerServer::note_result_sent() {
    const auto n = ++results_sent_;
    if (options_.exit_after_results && n >= *options_.exit_after_results) {
        // Simulated crash: drop every connection without further replies.
        stopping_ = true;
        listener_.shutdown();
        std::lock_guard lock(conns_mutex_);
        for (auto& c : conns_) c->shutdown();
    }
}

void WorkerServer::handle(std::shared_ptr<net::Socket> conn) {
    std::mutex write_mutex;
    std::thread job_thread;
    auto send = [&](const wire::Frame& f) {
        std::lock_guard lock(write_mutex);
        conn->send_frame(f);
    };
    try {
        const auto hello = conn->recv_frame();
        const auto version = wire::decode_hello(hello);
        if (hello.type != wire::MsgType::Hello || version != options_.protocol_version) {
            send(wire::encode_error(0, "protocol version mismatch: worker speaks " +
                                           std::to_string(options_.protocol_version) +
                                           ", coordinator sent " + std::to_string(version)));
            conn->shutdown();
            return;
        }
        send(wire::make_hello_ack(options_.protocol_version));

        while (!stopping_) {
            auto frame = conn->recv_frame();
            switch (frame.type) {
            case wire::MsgType::Ping: send(wire::make_pong()); break;
            case wire::MsgType::Job: {
                if (job_thread.joinable()) job_thread.join();
                job_thread = std::thread([this, &send, f = std::move(frame)] {
                    std::uint64_t job_id = 0;
                    OpOutput out;
                    std::string failure;
                    try {
                        job_id = wire::frame_job_id(f);
                        auto job = wire::decode_job(f);
                        out = execute_op(job.params, job.bands);
                    } catch (const std::exception& e) {
                        failure = e.what();
                        if (failure.empty()) failure = "job failed";
                    }
                    try {
                        if (stopping_) return;
                        if (failure.empty()) {
                            send(wire::encode_result(job_id, out));
                            note_result_sent();
                        } else {
                            send(wire::encode_error(job_id, failure));
                        }
                    } catch (const std::exception&) {
                        // Connection is gone; the coordinator reschedules.
                    }
                });
                break;
            }
            default:
                send(wire::encode_error(0, "unexpected message type " +
                                               std::to_string(static_cast<int>(frame.type))));
                break;
            }
        }
    } catch (const std::exception&) {
        // Peer closed or the server is stopping.
    }
    if (job_thread.joinable()) job_thread.join();
    conn->shutdown();
}

WorkerConnection WorkerConnection::connect(const net::Endpoint& endpoint, Timing timing,
                                           std::uint16_t version) {
    auto sock = net::Socket::connect(endpoint, timing.connect_timeout);
    sock.send_frame(wire::make_hello(version));
    auto reply = sock.recv_frame(timing.ping_timeout);
    if (!reply) throw ProtocolError(endpoint.to_string() + ": no HELLO_ACK");
    if (reply->type == wire::MsgType::Error)
        throw ProtocolError(endpoint.to_string() + ": rejected: " + wire::decode_error(*reply).reason);
    if (reply->type != wire::MsgType::HelloAck)
        throw ProtocolError(endpoint.to_string() + ": expected HELLO_ACK");
    const auto got = wire::decode_hello(*reply);
    if (got != version)
        throw ProtocolError(endpoint.to_string() + ": worker speaks protocol version " +
                            std::to_string(got));
    return WorkerConnection(endpoint, std::move(sock), timing);
}

wire::Frame WorkerConnection::await_frame() {
    using clock = std::chrono::steady_clock;
    auto last_heard = clock::now();
    bool ping_outstanding = false;
    while (true) {
        auto frame = socket_.recv_frame(timing_.ping_interval);
        if (frame) {
            if (frame->type == wire::MsgType::Pong) {
                last_heard = clock::now();
                ping_outstanding = false;
                continue;
            }
            return std::move(*frame);
        }
        if (clock::now() - last_heard >= timing_.ping_timeout)
            throw ProtocolError(endpoint_.to_string() + ": worker unresponsive for " +
                                std::to_string(timing_.ping_timeout.count()) + " ms");
        if (!ping_outstanding) {
            socket_.send_frame(wire::make_ping());
            ping_outstanding = true;
        }
    }
}

OpOutput WorkerConnection::run(std::uint64_t job_id, const OpParams& params,
                               std::span<const RasterGrid* const> bands) {
    socket_.send_frame(wire::encode_job(job_id, params, bands));
    const auto frame = await_frame();
    switch (frame.type) {
    case wire::MsgType::Result: {
        auto msg = wire::decode_result(frame, op_code(params));
        if (msg.job_id != job_id) throw ProtocolError("RESULT for unexpected job id");
        return std::move(msg.output);
    }
    case wire::MsgType::Error: {
        const auto err = wire::decode_error(frame);
        throw TaskError("worker " + endpoint_.to_string() + " failed job " +
                        std::to_string(err.job_id) + ": " + err.reason);
    }
    default: throw ProtocolError("unexpected frame while awaiting RESULT");
    }
}

bool WorkerConnection::ping() {
    socket_.send_frame(wire::make_ping());
    auto deadline = std::chrono::steady_clock::now() + timing_.ping_timeout;
    while (std::chrono::steady_clock::now() < deadline) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
            deadline - std::chrono::steady_clock::now());
        auto f = socket_.recv_frame(std::max(left, std::chrono::milliseconds(1)));
        if (!f) return false;
        if (f->type == wire::MsgType::Pong) return true;
    }
    return false;
}

} // namespace lstgrid::engine
