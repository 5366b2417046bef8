#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <vector>

#include "mlsteg/bits.hpp"

namespace mlsteg::rtp {

using std::chrono::milliseconds;
using SeqNum = std::uint16_t;

/// Framing of the overt G.711 stream: 50 packets/s, 20 ms and 160 bytes per packet.
struct StreamConfig {
    unsigned packets_per_second = 50;
    std::size_t frame_bytes = 160;
    milliseconds frame_duration{20};
    SeqNum start_seq = 0;

    /// Throws ValidationError unless packets_per_second * frame_duration == 1 s.
    void validate() const;
};

struct RtpPacket {
    SeqNum seq = 0;
    milliseconds nominal_send_time{0};
    Bytes payload;
    bool is_lack = false;
};

/// Sequence number of the packet at `index` in a stream (wraps mod 2^16).
constexpr SeqNum seq_at(const StreamConfig& cfg, std::size_t index) noexcept
{
    return static_cast<SeqNum>(cfg.start_seq + index);
}

/// Forward distance from `from` to `to` modulo 2^16.
constexpr std::size_t seq_distance(SeqNum from, SeqNum to) noexcept
{
    return static_cast<SeqNum>(to - from);
}

/// Splits `bytes` into frame_bytes frames, zero-padding the final one.
std::vector<Bytes> chunk_payload(std::span<const std::uint8_t> bytes, const StreamConfig& cfg);

/// Numbers frames consecutively from cfg.start_seq. Throws SizeError on a frame of the wrong length.
std::vector<RtpPacket> build_stream(std::span<const Bytes> frames, const StreamConfig& cfg);

/// The `x` least significant bits of `seq`, most significant first. 1 <= x <= 16.
BitString low_bits(SeqNum seq, unsigned x);

} // namespace mlsteg::rtp
