#include "mlsteg/rtp_model.hpp"

#include <algorithm>

#include "mlsteg/errors.hpp"

namespace mlsteg::rtp {

void StreamConfig::validate() const
{
    if (packets_per_second == 0 || frame_duration.count() <= 0) {
        throw ValidationError("stream rate and frame duration must be positive");
    }
    if (packets_per_second * frame_duration.count() != 1000) {
        throw ValidationError("packets_per_second * frame_duration must equal 1000 ms");
    }
    if (frame_bytes == 0) {
        throw ValidationError("frame_bytes must be positive");
    }
}

std::vector<Bytes> chunk_payload(std::span<const std::uint8_t> bytes, const StreamConfig& cfg)
{
    cfg.validate();
    std::vector<Bytes> frames;
    frames.reserve((bytes.size() + cfg.frame_bytes - 1) / cfg.frame_bytes);
    for (std::size_t off = 0; off < bytes.size(); off += cfg.frame_bytes) {
        const auto n = std::min(cfg.frame_bytes, bytes.size() - off);
        Bytes frame(cfg.frame_bytes, 0);
        std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(off), n, frame.begin());
        frames.push_back(std::move(frame));
    }
    return frames;
}

std::vector<RtpPacket> build_stream(std::span<const Bytes> frames, const StreamConfig& cfg)
{
    cfg.validate();
    std::vector<RtpPacket> stream;
    stream.reserve(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (frames[i].size() != cfg.frame_bytes) {
            throw SizeError("frame " + std::to_string(i) + " has " +
                            std::to_string(frames[i].size()) + " bytes, expected " +
                            std::to_string(cfg.frame_bytes));
        }
        stream.push_back(RtpPacket{seq_at(cfg, i),
                                   cfg.frame_duration * static_cast<std::int64_t>(i),
                                   frames[i], false});
    }
    return stream;
}

BitString low_bits(SeqNum seq, unsigned x)
{
    if (x < 1 || x > 16) {
        throw ParameterError("x must be in 1..16, got " + std::to_string(x));
    }
    BitString bits;
    append_uint(bits, seq, x);
    return bits;
}

} // namespace mlsteg::rtp
