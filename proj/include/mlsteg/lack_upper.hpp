#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mlsteg/bits.hpp"
#include "mlsteg/channel.hpp"
#include "mlsteg/rng.hpp"
#include "mlsteg/rtp_model.hpp"

namespace mlsteg::lack {

using std::chrono::milliseconds;

struct LackConfig {
    double p_lack = 0.032;
    milliseconds min_delay{120};
    /// Leading bytes of the MD5 digest appended to each LACK payload (1..16).
    std::size_t digest_bytes = 16;

    /// Checks the probability range, digest_bytes < frame_bytes and min_delay > playout_deadline.
    void validate(const rtp::StreamConfig& stream, const channel::ChannelConfig& channel) const;

    /// Steganogram bytes per LACK packet.
    std::size_t chunk_bytes(const rtp::StreamConfig& stream) const
    {
        return stream.frame_bytes - digest_bytes;
    }
};

/// One LACK payload: steganogram bytes followed by their (truncated) MD5.
struct UpperChunk {
    Bytes steg_bytes;
    Bytes digest;

    /// Computes the digest over `steg`.
    static UpperChunk seal(Bytes steg, std::size_t digest_bytes);

    bool operator==(const UpperChunk&) const = default;
};

/// Reassembled upper steganogram. The wire form is a 4-byte big-endian
/// length followed by the body, spread over consecutive chunks and
/// zero-padded in the last one.
struct UpperMessage {
    std::uint32_t declared_length = 0;
    Bytes body;
};

struct Reassembly {
    /// Present once declared_length body bytes have arrived.
    std::optional<UpperMessage> message;
    /// Known once the 4-byte prefix arrived.
    std::optional<std::uint32_t> declared_length;
    /// Body bytes received (excluding the prefix), capped at declared_length.
    std::size_t received_bytes = 0;

    bool complete() const { return message.has_value(); }
};

Bytes frame_message(std::span<const std::uint8_t> body);

/// Cuts a framed message into sealed chunks on demand. Once the message is
/// exhausted further chunks are all-zero padding.
class ChunkWriter {
public:
    ChunkWriter(Bytes framed, std::size_t chunk_bytes, std::size_t digest_bytes);

    UpperChunk next();
    bool exhausted() const { return offset_ >= framed_.size(); }
    std::size_t chunks_needed() const { return (framed_.size() + chunk_bytes_ - 1) / chunk_bytes_; }
    std::size_t chunks_written() const { return written_; }

private:
    Bytes framed_;
    std::size_t chunk_bytes_;
    std::size_t digest_bytes_;
    std::size_t offset_ = 0;
    std::size_t written_ = 0;
};

/// Draws one uniform per call; true with probability p.
inline bool draw_candidate(SplitMix64& rng, double p) noexcept
{
    return rng.uniform() < p;
}

/// Stream positions independently flagged with probability p_lack.
std::vector<std::size_t> select_candidates(std::span<const rtp::RtpPacket> stream,
                                           const LackConfig& cfg, SplitMix64& rng);

struct Embedded {
    rtp::RtpPacket packet;
    milliseconds extra_delay{0};
};

/// Replaces the payload with steg_bytes || digest and schedules the packet
/// min_delay late. Throws SizeError if the chunk does not fill the frame.
Embedded embed_chunk(rtp::RtpPacket packet, const UpperChunk& chunk, const LackConfig& cfg);

/// Recovers the chunk iff the trailing digest matches the leading bytes.
std::optional<UpperChunk> try_extract(const rtp::RtpPacket& packet, const LackConfig& cfg);

Reassembly reassemble(std::span<const UpperChunk> chunks);

} // namespace mlsteg::lack
