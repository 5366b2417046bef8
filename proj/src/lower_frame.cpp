#include "mlsteg/lower_frame.hpp"

#include <algorithm>
#include <cmath>

#include "mlsteg/errors.hpp"

namespace mlsteg::mls {

std::string_view to_string(FrameType t) noexcept
{
    switch (t) {
    case FrameType::key:
        return "KEY";
    case FrameType::hash:
        return "HASH";
    case FrameType::ctrl:
        return "CTRL";
    case FrameType::data:
        return "DATA";
    case FrameType::seqidx:
        return "SEQIDX";
    }
    return "?";
}

void append_frame(BitString& out, const LowerFrame& frame)
{
    if (frame.payload.size() > kMaxFramePayloadBits) {
        throw SizeError("frame payload of " + std::to_string(frame.payload.size()) +
                        " bits exceeds 8191");
    }
    append_uint(out, static_cast<std::uint8_t>(frame.type), 3);
    append_uint(out, frame.payload.size(), 13);
    out.insert(out.end(), frame.payload.begin(), frame.payload.end());
}

BitString serialize(const LowerFrame& frame)
{
    BitString out;
    append_frame(out, frame);
    return out;
}

FrameParse parse_frames(const BitString& bits)
{
    FrameParse r;
    std::size_t pos = 0;
    while (true) {
        if (bits.size() - pos < 3) {
            r.truncated = pos != bits.size();
            break;
        }
        const auto type = read_uint(bits, pos, 3);
        if (type > static_cast<unsigned>(FrameType::seqidx)) {
            r.terminated = true;
            break;
        }
        if (bits.size() - pos < kFrameHeaderBits) {
            r.truncated = true;
            break;
        }
        const auto len = read_uint(bits, pos + 3, 13);
        if (bits.size() - pos - kFrameHeaderBits < len) {
            r.truncated = true;
            break;
        }
        const auto begin = bits.begin() + static_cast<std::ptrdiff_t>(pos + kFrameHeaderBits);
        r.frames.push_back(LowerFrame{static_cast<FrameType>(type),
                                      BitString(begin, begin + static_cast<std::ptrdiff_t>(len))});
        pos += kFrameHeaderBits + len;
    }
    r.consumed_bits = pos;
    return r;
}

std::optional<LowerFrame> FrameParser::push(bool bit)
{
    if (terminated_) {
        return std::nullopt;
    }
    buf_.push_back(bit);
    if (buf_.size() == 3 && read_uint(buf_, 0, 3) > static_cast<unsigned>(FrameType::seqidx)) {
        terminated_ = true;
        buf_.clear();
        return std::nullopt;
    }
    if (buf_.size() < kFrameHeaderBits) {
        return std::nullopt;
    }
    const auto len = read_uint(buf_, 3, 13);
    if (buf_.size() < kFrameHeaderBits + len) {
        return std::nullopt;
    }
    LowerFrame f{static_cast<FrameType>(read_uint(buf_, 0, 3)),
                 BitString(buf_.begin() + kFrameHeaderBits, buf_.end())};
    buf_.clear();
    return f;
}

ControlMsg ControlMsg::set_p_lack(double p)
{
    if (!(p >= 0.0 && p < 1.0)) {
        throw ParameterError("signalled p_lack must lie in [0, 1)");
    }
    const auto v = std::lround(p * 65536.0);
    return ControlMsg{Parameter::set_p_lack, static_cast<std::uint16_t>(std::min<long>(v, 65535))};
}

LowerFrame control_frame(const ControlMsg& msg)
{
    LowerFrame f{FrameType::ctrl, {}};
    append_uint(f.payload, static_cast<std::uint8_t>(msg.parameter), 8);
    append_uint(f.payload, msg.value, 16);
    return f;
}

ControlMsg decode_control(const LowerFrame& frame)
{
    if (frame.type != FrameType::ctrl || frame.payload.size() != 24) {
        throw ParseError("not a 24-bit CTRL frame");
    }
    const auto code = read_uint(frame.payload, 0, 8);
    if (code != static_cast<unsigned>(Parameter::set_p_lack)) {
        throw ParseError("unknown CTRL parameter code " + std::to_string(code));
    }
    return ControlMsg{Parameter::set_p_lack,
                      static_cast<std::uint16_t>(read_uint(frame.payload, 8, 16))};
}

LowerFrame key_frame(const BitString& key_bits)
{
    return LowerFrame{FrameType::key, key_bits};
}

LowerFrame hash_frame(const Md5Digest& digest)
{
    return LowerFrame{FrameType::hash, bytes_to_bits(digest)};
}

Md5Digest decode_hash(const LowerFrame& frame)
{
    if (frame.type != FrameType::hash || frame.payload.size() != 128) {
        throw ParseError("not a 128-bit HASH frame");
    }
    const auto bytes = bits_to_bytes(frame.payload);
    Md5Digest d{};
    std::copy(bytes.begin(), bytes.end(), d.begin());
    return d;
}

LowerFrame seqidx_frame(PartIndex idx)
{
    LowerFrame f{FrameType::seqidx, {}};
    append_uint(f.payload, idx.index, 16);
    append_uint(f.payload, idx.count, 16);
    return f;
}

PartIndex decode_seqidx(const LowerFrame& frame)
{
    if (frame.type != FrameType::seqidx || frame.payload.size() != 32) {
        throw ParseError("not a 32-bit SEQIDX frame");
    }
    return PartIndex{static_cast<std::uint16_t>(read_uint(frame.payload, 0, 16)),
                     static_cast<std::uint16_t>(read_uint(frame.payload, 16, 16))};
}

std::vector<LowerFrame> data_frames(const BitString& bits)
{
    std::vector<LowerFrame> out;
    for (std::size_t off = 0; off < bits.size(); off += kMaxFramePayloadBits) {
        const auto end = std::min(bits.size(), off + kMaxFramePayloadBits);
        out.push_back(LowerFrame{FrameType::data,
                                 BitString(bits.begin() + static_cast<std::ptrdiff_t>(off),
                                           bits.begin() + static_cast<std::ptrdiff_t>(end))});
    }
    return out;
}

} // namespace mlsteg::mls
