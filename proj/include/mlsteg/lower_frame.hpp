#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "mlsteg/bits.hpp"
#include "mlsteg/md5.hpp"

namespace mlsteg::mls {

// Lower-channel wire format, bit-exact:
//
//   +--------+------------------+-----------------+
//   | type:3 | length:13 (MSB)  | payload: length |
//   +--------+------------------+-----------------+
//
// Frames follow each other with no gap. Type codes 5..7 are unassigned; the
// alternating filler sent once the lower message is exhausted starts with
// "101", so the parser sees type 5 there and stops.

enum class FrameType : std::uint8_t { key = 0, hash = 1, ctrl = 2, data = 3, seqidx = 4 };

inline constexpr unsigned kFrameHeaderBits = 16;
inline constexpr std::size_t kMaxFramePayloadBits = (1U << 13) - 1;

std::string_view to_string(FrameType t) noexcept;

struct LowerFrame {
    FrameType type = FrameType::data;
    BitString payload;

    std::size_t length() const { return payload.size(); }
    bool operator==(const LowerFrame&) const = default;
};

/// Throws SizeError if the payload exceeds 8191 bits.
void append_frame(BitString& out, const LowerFrame& frame);
BitString serialize(const LowerFrame& frame);

struct FrameParse {
    std::vector<LowerFrame> frames;
    std::size_t consumed_bits = 0;
    /// An unassigned type code was met (normal end of a framed stream).
    bool terminated = false;
    /// The stream ended inside a header or payload.
    bool truncated = false;
};

/// Greedy parse from bit 0; stops at an unassigned type or at a partial frame.
FrameParse parse_frames(const BitString& bits);

/// Bit-at-a-time form of parse_frames for the receiver.
class FrameParser {
public:
    std::optional<LowerFrame> push(bool bit);

    bool terminated() const { return terminated_; }
    /// Bits buffered for a frame still in progress.
    std::size_t pending_bits() const { return buf_.size(); }

private:
    BitString buf_;
    bool terminated_ = false;
};

// ---- typed payloads --------------------------------------------------------

enum class Parameter : std::uint8_t { set_p_lack = 0 };

/// Parameter change for the upper level; value is a probability in units of 2^-16.
struct ControlMsg {
    Parameter parameter = Parameter::set_p_lack;
    std::uint16_t value = 0;

    static ControlMsg set_p_lack(double p);
    double probability() const { return value / 65536.0; }
    bool operator==(const ControlMsg&) const = default;
};

/// CTRL payload: 8-bit parameter code then 16-bit value.
LowerFrame control_frame(const ControlMsg& msg);
/// Throws ParseError if the frame is not a well-formed CTRL frame.
ControlMsg decode_control(const LowerFrame& frame);

LowerFrame key_frame(const BitString& key_bits);
LowerFrame hash_frame(const Md5Digest& digest);
/// Throws ParseError unless the frame is a 128-bit HASH frame.
Md5Digest decode_hash(const LowerFrame& frame);

/// SEQIDX payload: 16-bit part index then 16-bit part count.
struct PartIndex {
    std::uint16_t index = 0;
    std::uint16_t count = 0;
    bool operator==(const PartIndex&) const = default;
};
LowerFrame seqidx_frame(PartIndex idx);
PartIndex decode_seqidx(const LowerFrame& frame);

/// Splits `bits` into DATA frames of at most 8191 payload bits. Empty input gives no frames.
std::vector<LowerFrame> data_frames(const BitString& bits);

/// Zero-length DATA frame the sender emits while waiting for queued frames.
inline LowerFrame keepalive_frame()
{
    return LowerFrame{FrameType::data, {}};
}

} // namespace mlsteg::mls
