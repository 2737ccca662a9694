#include "lstgrid/engine/wire.hpp"

#include <bit>
#include <cstring>
#include <limits>
#include <string>

#include "lstgrid/error.hpp"

namespace lstgrid::engine::wire {

void ByteWriter::u16(std::uint16_t v) {
    buf_.push_back(static_cast<std::uint8_t>(v >> 8));
    buf_.push_back(static_cast<std::uint8_t>(v));
}

void ByteWriter::u32(std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> s));
}

void ByteWriter::u64(std::uint64_t v) {
    for (int s = 56; s >= 0; s -= 8) buf_.push_back(static_cast<std::uint8_t>(v >> s));
}

void ByteWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
}

void ByteWriter::patch_u32(std::size_t offset, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.at(offset + i) = static_cast<std::uint8_t>(v >> (24 - 8 * i));
}

std::span<const std::uint8_t> ByteReader::bytes(std::size_t n) {
    if (n > remaining()) throw ProtocolError("truncated message");
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
}

std::uint8_t ByteReader::u8() { return bytes(1)[0]; }

std::uint16_t ByteReader::u16() {
    const auto b = bytes(2);
    return static_cast<std::uint16_t>((b[0] << 8) | b[1]);
}

std::uint32_t ByteReader::u32() {
    const auto b = bytes(4);
    std::uint32_t v = 0;
    for (auto x : b) v = (v << 8) | x;
    return v;
}

std::uint64_t ByteReader::u64() {
    const auto b = bytes(8);
    std::uint64_t v = 0;
    for (auto x : b) v = (v << 8) | x;
    return v;
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

std::string ByteReader::str() {
    const auto n = u32();
    const auto b = bytes(n);
    return std::string(b.begin(), b.end());
}

std::span<const std::uint8_t> ByteReader::rest() { return bytes(remaining()); }

void ByteReader::expect_end() const {
    if (remaining() != 0) throw ProtocolError("trailing bytes in message");
}

std::vector<std::uint8_t> encode_frame(const Frame& frame) {
    const std::size_t length = frame.payload.size() + 1;
    if (length > kMaxFrameBytes) throw ProtocolError("frame exceeds 256 MiB limit");
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(length));
    w.u8(static_cast<std::uint8_t>(frame.type));
    w.bytes(frame.payload);
    return w.take();
}

Frame decode_frame(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    const auto length = r.u32();
    if (length == 0 || length > kMaxFrameBytes) throw ProtocolError("bad frame length");
    if (length != r.remaining()) throw ProtocolError("frame length does not match data");
    const auto type = r.u8();
    if (type < 1 || type > 7) throw ProtocolError("unknown message type " + std::to_string(type));
    const auto rest = r.rest();
    return {static_cast<MsgType>(type), {rest.begin(), rest.end()}};
}

namespace {

Frame frame_of(MsgType type, ByteWriter& w) { return {type, w.take()}; }

void expect_type(const Frame& f, MsgType t, const char* what) {
    if (f.type != t) throw ProtocolError(std::string("expected ") + what + " frame");
}

void put_model(ByteWriter& w, const ReflectanceModel& m) {
    w.f64(m.gain);
    w.f64(m.bias);
    w.f64(m.l_path);
    w.f64(m.scale);
}

ReflectanceModel get_model(ByteReader& r) {
    ReflectanceModel m;
    m.gain = r.f64();
    m.bias = r.f64();
    m.l_path = r.f64();
    m.scale = r.f64();
    return m;
}

void put_emissivity(ByteWriter& w, const EmissivityConfig& c) {
    w.f64(c.ndvi_low);
    w.f64(c.ndvi_high);
    w.f64(c.eps_soil);
    w.f64(c.eps_veg);
    w.f64(c.eps_water);
}

EmissivityConfig get_emissivity(ByteReader& r) {
    EmissivityConfig c;
    c.ndvi_low = r.f64();
    c.ndvi_high = r.f64();
    c.eps_soil = r.f64();
    c.eps_veg = r.f64();
    c.eps_water = r.f64();
    return c;
}

struct ParamWriter {
    ByteWriter& w;

    void operator()(const IdentityParams&) const {}
    void operator()(const HistogramParams& p) const { w.i32(p.max_dn); }
    void operator()(const CalibrateParams& p) const {
        w.u8(static_cast<std::uint8_t>(p.output));
        put_model(w, p.model);
    }
    void operator()(const NdviParams& p) const {
        put_model(w, p.red);
        put_model(w, p.nir);
    }
    void operator()(const EmissivityParams& p) const { put_emissivity(w, p.config); }
    void operator()(const LstMapParams& p) const {
        w.f64(p.psi.psi1);
        w.f64(p.psi.psi2);
        w.f64(p.psi.psi3);
        w.f64(p.gain);
        w.f64(p.bias);
        w.f64(p.k1);
        w.f64(p.k2);
        w.f64(p.lambda_um);
        put_emissivity(w, p.emissivity);
    }
    void operator()(const ClassifyParams& p) const {
        w.u32(static_cast<std::uint32_t>(p.bands));
        w.u32(static_cast<std::uint32_t>(p.signatures.size()));
        for (const auto& s : p.signatures) {
            w.str(s.class_name);
            if (s.intervals.size() != p.bands)
                throw std::invalid_argument("classify params: signature arity mismatch");
            for (const auto& iv : s.intervals) {
                w.f64(iv.lo);
                w.f64(iv.hi);
            }
        }
    }
};

OpParams read_params(OpCode op, ByteReader& r) {
    switch (op) {
    case OpCode::Identity: return IdentityParams{};
    case OpCode::Histogram: {
        HistogramParams p;
        p.max_dn = r.i32();
        if (p.max_dn < 0 || p.max_dn > 65535) throw ProtocolError("histogram max_dn out of range");
        return p;
    }
    case OpCode::Calibrate: {
        CalibrateParams p;
        const auto out = r.u8();
        if (out > 1) throw ProtocolError("bad calibrate output kind");
        p.output = static_cast<CalibrateParams::Output>(out);
        p.model = get_model(r);
        return p;
    }
    case OpCode::Ndvi: {
        NdviParams p;
        p.red = get_model(r);
        p.nir = get_model(r);
        return p;
    }
    case OpCode::Emissivity: return EmissivityParams{get_emissivity(r)};
    case OpCode::LstMap: {
        LstMapParams p;
        p.psi.psi1 = r.f64();
        p.psi.psi2 = r.f64();
        p.psi.psi3 = r.f64();
        p.gain = r.f64();
        p.bias = r.f64();
        p.k1 = r.f64();
        p.k2 = r.f64();
        p.lambda_um = r.f64();
        p.emissivity = get_emissivity(r);
        return p;
    }
    case OpCode::ClassifyMap: {
        ClassifyParams p;
        p.bands = r.u32();
        const auto n = r.u32();
        if (n > 255) throw ProtocolError("too many class signatures");
        for (std::uint32_t k = 0; k < n; ++k) {
            ClassSignature s;
            s.class_name = r.str();
            for (std::size_t b = 0; b < p.bands; ++b) {
                Interval iv;
                iv.lo = r.f64();
                iv.hi = r.f64();
                s.intervals.push_back(iv);
            }
            p.signatures.push_back(std::move(s));
        }
        return p;
    }
    }
    throw ProtocolError("unknown op code " + std::to_string(static_cast<int>(op)));
}

std::uint32_t checked_dim(std::size_t v) {
    if (v > std::numeric_limits<std::uint32_t>::max()) throw ProtocolError("tile too large");
    return static_cast<std::uint32_t>(v);
}

} // namespace

Frame make_hello(std::uint16_t version) {
    ByteWriter w;
    w.u16(version);
    return frame_of(MsgType::Hello, w);
}

Frame make_hello_ack(std::uint16_t version) {
    ByteWriter w;
    w.u16(version);
    return frame_of(MsgType::HelloAck, w);
}

Frame make_ping() { return {MsgType::Ping, {}}; }
Frame make_pong() { return {MsgType::Pong, {}}; }

std::uint16_t decode_hello(const Frame& frame) {
    if (frame.type != MsgType::Hello && frame.type != MsgType::HelloAck)
        throw ProtocolError("expected HELLO frame");
    ByteReader r(frame.payload);
    const auto v = r.u16();
    r.expect_end();
    return v;
}

Frame encode_job(std::uint64_t job_id, const OpParams& params,
                 std::span<const RasterGrid* const> bands) {
    if (bands.size() != band_count(params))
        throw std::invalid_argument("encode_job: wrong number of bands for op");
    const std::size_t rows = bands.empty() ? 0 : bands.front()->height();
    const std::size_t cols = bands.empty() ? 0 : bands.front()->width();
    const std::size_t data_bytes = bands.size() * rows * cols * 8;
    if (data_bytes + 4096 > kMaxFrameBytes) throw ProtocolError("JOB frame would exceed 256 MiB");

    ByteWriter w;
    w.buffer().reserve(data_bytes + 512);
    w.u64(job_id);
    w.u8(static_cast<std::uint8_t>(op_code(params)));
    const std::size_t len_at = w.size();
    w.u32(0);
    w.u8(static_cast<std::uint8_t>(bands.size()));
    for (const auto* b : bands) w.f64(b->nodata());
    std::visit(ParamWriter{w}, params);
    w.patch_u32(len_at, static_cast<std::uint32_t>(w.size() - len_at - 4));
    w.u32(checked_dim(rows));
    w.u32(checked_dim(cols));
    for (const auto* b : bands) {
        if (b->height() != rows || b->width() != cols)
            throw std::invalid_argument("encode_job: band shapes differ");
        for (double v : b->samples()) w.f64(v);
    }
    return frame_of(MsgType::Job, w);
}

JobMessage decode_job(const Frame& frame) {
    expect_type(frame, MsgType::Job, "JOB");
    ByteReader r(frame.payload);
    JobMessage job;
    job.job_id = r.u64();
    const auto code = r.u8();
    if (code > static_cast<std::uint8_t>(OpCode::ClassifyMap))
        throw ProtocolError("unknown op code " + std::to_string(code));
    const auto op = static_cast<OpCode>(code);
    const auto param_len = r.u32();
    ByteReader pr(r.bytes(param_len));
    const auto nbands = pr.u8();
    std::vector<double> nodata;
    for (int i = 0; i < nbands; ++i) nodata.push_back(pr.f64());
    job.params = read_params(op, pr);
    pr.expect_end();
    if (nbands != band_count(job.params)) throw ProtocolError("band count does not match op");

    const std::size_t rows = r.u32();
    const std::size_t cols = r.u32();
    if (rows * cols * nbands * 8 != r.remaining())
        throw ProtocolError("JOB sample data length does not match rows x cols");
    for (std::size_t b = 0; b < nbands; ++b) {
        std::vector<double> samples(rows * cols);
        for (auto& v : samples) v = r.f64();
        job.bands.emplace_back(cols, rows, std::move(samples), nodata[b]);
    }
    return job;
}

namespace {

struct ResultWriter {
    ByteWriter& w;

    void operator()(const RasterPayload& p) const {
        w.u32(checked_dim(p.grid.height()));
        w.u32(checked_dim(p.grid.width()));
        w.f64(p.grid.nodata());
        w.u64(p.flagged);
        for (double v : p.grid.samples()) w.f64(v);
    }
    void operator()(const ClassifiedGrid& g) const {
        w.u32(checked_dim(g.height));
        w.u32(checked_dim(g.width));
        w.bytes(g.labels);
    }
    void operator()(const DnHistogram& h) const {
        w.u32(static_cast<std::uint32_t>(h.counts.size()));
        for (auto c : h.counts) w.u64(c);
    }
};

} // namespace

Frame encode_result(std::uint64_t job_id, const OpOutput& output) {
    ByteWriter w;
    w.u64(job_id);
    std::visit(ResultWriter{w}, output);
    return frame_of(MsgType::Result, w);
}

ResultMessage decode_result(const Frame& frame, OpCode op) {
    expect_type(frame, MsgType::Result, "RESULT");
    ByteReader r(frame.payload);
    ResultMessage msg;
    msg.job_id = r.u64();
    switch (op) {
    case OpCode::Histogram: {
        const auto bins = r.u32();
        if (bins == 0 || bins > 65536) throw ProtocolError("bad histogram size");
        DnHistogram h(static_cast<int>(bins) - 1);
        for (auto& c : h.counts) {
            c = r.u64();
            h.total += c;
        }
        msg.output = std::move(h);
        break;
    }
    case OpCode::ClassifyMap: {
        const std::size_t rows = r.u32();
        const std::size_t cols = r.u32();
        ClassifiedGrid g(cols, rows);
        const auto b = r.bytes(rows * cols);
        std::copy(b.begin(), b.end(), g.labels.begin());
        msg.output = std::move(g);
        break;
    }
    default: {
        const std::size_t rows = r.u32();
        const std::size_t cols = r.u32();
        const double nodata = r.f64();
        const auto flagged = r.u64();
        if (rows * cols * 8 != r.remaining()) throw ProtocolError("RESULT raster length mismatch");
        std::vector<double> samples(rows * cols);
        for (auto& v : samples) v = r.f64();
        msg.output = RasterPayload{RasterGrid(cols, rows, std::move(samples), nodata), flagged};
        break;
    }
    }
    r.expect_end();
    return msg;
}

Frame encode_error(std::uint64_t job_id, std::string_view reason) {
    ByteWriter w;
    w.u64(job_id);
    w.bytes(std::span(reinterpret_cast<const std::uint8_t*>(reason.data()), reason.size()));
    return frame_of(MsgType::Error, w);
}

ErrorMessage decode_error(const Frame& frame) {
    expect_type(frame, MsgType::Error, "ERROR");
    ByteReader r(frame.payload);
    ErrorMessage e;
    e.job_id = r.u64();
    const auto rest = r.rest();
    e.reason.assign(rest.begin(), rest.end());
    return e;
}

std::uint64_t frame_job_id(const Frame& frame) {
    ByteReader r(frame.payload);
    return r.u64();
}

} // namespace lstgrid::engine::wire
