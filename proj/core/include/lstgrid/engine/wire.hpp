#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lstgrid/engine/ops.hpp"

namespace lstgrid::engine::wire {

// Frame layout, all integers big-endian, f64 as IEEE-754 bit patterns:
//
//   u32 length        bytes that follow (msg_type + payload)
//   u8  msg_type
//   ... payload
//
// HELLO      u16 version
// HELLO_ACK  u16 version
// JOB        u64 job_id, u8 op_code, param block, u32 rows, u32 cols,
//            f64 samples[rows*cols] for each input band of the op
// RESULT     u64 job_id, payload by op_code (see encode_result)
// ERROR      u64 job_id, UTF-8 reason (rest of frame)
// PING/PONG  empty
//
// The param block is `u32 length | u8 band_count | f64 nodata[band_count] |
// op-specific fields`.

inline constexpr std::uint16_t kProtocolVersion = 1;
inline constexpr std::uint32_t kMaxFrameBytes = 256u << 20;

enum class MsgType : std::uint8_t {
    Hello = 1,
    HelloAck = 2,
    Job = 3,
    Result = 4,
    Error = 5,
    Ping = 6,
    Pong = 7,
};

struct Frame {
    MsgType type{};
    std::vector<std::uint8_t> payload;
};

class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f64(double v);
    void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
    /// u32 length + UTF-8 bytes.
    void str(std::string_view s);
    /// Overwrites a u32 at `offset` (for back-patched lengths).
    void patch_u32(std::size_t offset, std::uint32_t v);

    std::size_t size() const noexcept { return buf_.size(); }
    std::vector<std::uint8_t>& buffer() noexcept { return buf_; }
    std::vector<std::uint8_t> take() { return std::move(buf_); }

private:
    std::vector<std::uint8_t> buf_;
};

/// Bounds-checked reader; throws ProtocolError on truncation.
class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint8_t u8();
    std::uint16_t u16();
    std::uint32_t u32();
    std::uint64_t u64();
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    double f64();
    std::string str();
    std::span<const std::uint8_t> bytes(std::size_t n);
    std::span<const std::uint8_t> rest();

    std::size_t remaining() const noexcept { return data_.size() - pos_; }
    void expect_end() const;

private:
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

/// Serialized frame including the length prefix.
std::vector<std::uint8_t> encode_frame(const Frame& frame);

/// Decodes one complete frame (length prefix included). Throws ProtocolError.
Frame decode_frame(std::span<const std::uint8_t> bytes);

Frame make_hello(std::uint16_t version = kProtocolVersion);
Frame make_hello_ack(std::uint16_t version = kProtocolVersion);
Frame make_ping();
Frame make_pong();
std::uint16_t decode_hello(const Frame& frame);

/// A job as it travels: the op and its input tiles.
struct JobMessage {
    std::uint64_t job_id = 0;
    OpParams params;
    std::vector<RasterGrid> bands;
};

Frame encode_job(std::uint64_t job_id, const OpParams& params,
                 std::span<const RasterGrid* const> bands);
JobMessage decode_job(const Frame& frame);

struct ResultMessage {
    std::uint64_t job_id = 0;
    OpOutput output;
};

Frame encode_result(std::uint64_t job_id, const OpOutput& output);
/// The op code is not on the wire; the coordinator knows it from job_id.
ResultMessage decode_result(const Frame& frame, OpCode op);

struct ErrorMessage {
    std::uint64_t job_id = 0;
    std::string reason;
};

Frame encode_error(std::uint64_t job_id, std::string_view reason);
ErrorMessage decode_error(const Frame& frame);

/// Peek at the job id of a RESULT or ERROR frame.
std::uint64_t frame_job_id(const Frame& frame);

} // namespace lstgrid::engine::wire
